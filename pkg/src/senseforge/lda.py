"""Per-word LDA topic models, trained by collapsed Gibbs sampling.

One model is trained per target word on that word's instances alone.  The
latent per-token topics are integrated over by resampling each token's
topic from its full conditional given every other assignment; the trained
artifact keeps only the topic-word counts, from which the topic-word
distribution and held-out document inference both derive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _sampler
from .corpus import EncodedDocument, Vocabulary
from .seeding import derive_seed

MODEL_FORMAT = "senseforge-topic-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class LdaConfig:
    """Sampler hyperparameters.

    ``alpha`` left as None resolves to ``50 / n_topics`` at use; ``beta``
    smooths the topic-word distribution.  ``seed`` pins the full sampling
    trajectory: training consumes one derived stream, and each document
    inferred gets its own stream keyed by instance id, so per-instance
    results do not depend on processing order.
    """

    n_topics: int
    alpha: float | None = None
    beta: float = 0.01
    train_iters: int = 1000
    infer_iters: int = 100
    infer_burn_in: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_topics < 1:
            raise ValueError(f"n_topics must be >= 1, got {self.n_topics}")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.train_iters < 1:
            raise ValueError(f"train_iters must be >= 1, got {self.train_iters}")
        if not 0 <= self.infer_burn_in < self.infer_iters:
            raise ValueError(
                f"need 0 <= infer_burn_in < infer_iters, got "
                f"{self.infer_burn_in} / {self.infer_iters}"
            )

    @property
    def effective_alpha(self) -> float:
        return 50.0 / self.n_topics if self.alpha is None else self.alpha


@dataclass(frozen=True, eq=False)
class TopicModel:
    """Trained state: topic-word counts plus the vocabulary they index."""

    vocab: Vocabulary
    n_kw: np.ndarray  # (n_topics, vocab size) int64
    n_k: np.ndarray  # (n_topics,) int64
    config: LdaConfig

    def __post_init__(self) -> None:
        n_kw = np.ascontiguousarray(self.n_kw, dtype=np.int64)
        n_k = np.ascontiguousarray(self.n_k, dtype=np.int64)
        if n_kw.shape != (self.config.n_topics, len(self.vocab)):
            raise ValueError("topic-word count shape does not match config/vocabulary")
        if (n_kw < 0).any():
            raise ValueError("counts must be non-negative")
        if not np.array_equal(n_kw.sum(axis=1), n_k):
            raise ValueError("n_k must equal the row sums of n_kw")
        n_kw.setflags(write=False)
        n_k.setflags(write=False)
        object.__setattr__(self, "n_kw", n_kw)
        object.__setattr__(self, "n_k", n_k)

    @property
    def n_topics(self) -> int:
        return self.config.n_topics


@dataclass(frozen=True, eq=False)
class SamplerState:
    """Mid-training view: per-document token assignments and topic counts."""

    z: tuple[np.ndarray, ...]  # one int32 array per document
    n_dk: np.ndarray  # (n_docs, n_topics) int64


class GibbsSampler:
    """Collapsed Gibbs chain over one target word's encoded documents.

    The chain is exposed sweep by sweep so invariants can be checked between
    sweeps; :func:`train` drives it for ``config.train_iters`` sweeps and
    snapshots the result.
    """

    def __init__(self, docs: Sequence[EncodedDocument], vocab_size: int, config: LdaConfig):
        self.config = config
        self.vocab_size = vocab_size
        self._doc_ids = [doc.instance_id for doc in docs]
        lengths = [len(doc) for doc in docs]
        if sum(lengths) == 0:
            raise ValueError("cannot train: every document is empty")
        self._offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
        self._tokens = np.concatenate(
            [doc.tokens for doc in docs if len(doc)]
        ).astype(np.int32)
        if self._tokens.size and (self._tokens.min() < 0 or self._tokens.max() >= vocab_size):
            raise ValueError("token id out of vocabulary range")
        self._doc_of = np.repeat(
            np.arange(len(docs), dtype=np.int32), lengths
        )
        k = config.n_topics
        self._z = np.empty(self._tokens.shape[0], dtype=np.int32)
        self._n_dk = np.zeros((len(docs), k), dtype=np.int64)
        self._n_kw = np.zeros((k, vocab_size), dtype=np.int64)
        self._n_k = np.zeros(k, dtype=np.int64)
        self._probs = np.empty(k, dtype=np.float64)
        self._rng = _sampler.new_rng_state(derive_seed("lda-train", config.seed))
        _sampler.init_assignments(
            self._tokens, self._doc_of, self._z, self._n_dk, self._n_kw, self._n_k, self._rng
        )
        self.sweeps_done = 0

    def sweep(self) -> None:
        """Resample the topic of every token once."""
        _sampler.train_sweep(
            self._tokens,
            self._doc_of,
            self.config.effective_alpha,
            self.config.beta,
            self._z,
            self._n_dk,
            self._n_kw,
            self._n_k,
            self._rng,
            self._probs,
        )
        self.sweeps_done += 1

    def run(self, n_sweeps: int) -> None:
        for _ in range(n_sweeps):
            self.sweep()

    @property
    def n_docs(self) -> int:
        return len(self._doc_ids)

    @property
    def total_tokens(self) -> int:
        return int(self._tokens.shape[0])

    def state(self) -> SamplerState:
        z = tuple(
            self._z[self._offsets[d] : self._offsets[d + 1]].copy()
            for d in range(self.n_docs)
        )
        return SamplerState(z, self._n_dk.copy())

    def counts(self) -> tuple[np.ndarray, np.ndarray]:
        return self._n_kw.copy(), self._n_k.copy()

    def conditional(self, d: int, n: int) -> np.ndarray:
        """Full conditional of token ``n`` of document ``d`` under current counts."""
        offset = int(self._offsets[d])
        if not 0 <= n < int(self._offsets[d + 1]) - offset:
            raise IndexError(f"document {d} has no token {n}")
        word = int(self._tokens[offset + n])
        return full_conditional(
            word,
            self._n_dk[d],
            self._n_kw,
            self._n_k,
            self.config.effective_alpha,
            self.config.beta,
            current_topic=int(self._z[offset + n]),
        )

    def to_model(self, vocab: Vocabulary) -> TopicModel:
        if len(vocab) != self.vocab_size:
            raise ValueError("vocabulary size does not match the trained counts")
        return TopicModel(vocab, self._n_kw.copy(), self._n_k.copy(), self.config)


def full_conditional(
    word: int,
    doc_topic_counts: np.ndarray,
    n_kw: np.ndarray,
    n_k: np.ndarray,
    alpha: float,
    beta: float,
    current_topic: int | None = None,
) -> np.ndarray:
    """Normalized Gibbs conditional p(topic | everything else) for one token.

    Proportional to ``(n_dk + alpha) * (n_kw[:, word] + beta) / (n_k + V*beta)``
    with the token itself excluded from all counts.  If ``current_topic`` is
    given, the passed counts are taken to still include the token and it is
    subtracted out here; otherwise the caller must have removed it already.
    Strictly positive everywhere since both priors are positive.
    """
    ndk = doc_topic_counts.astype(np.float64).copy()
    nkw = n_kw[:, word].astype(np.float64).copy()
    nk = n_k.astype(np.float64).copy()
    if current_topic is not None:
        ndk[current_topic] -= 1
        nkw[current_topic] -= 1
        nk[current_topic] -= 1
    p = (ndk + alpha) * (nkw + beta) / (nk + beta * n_kw.shape[1])
    return p / p.sum()


def train(docs: Sequence[EncodedDocument], vocab: Vocabulary, config: LdaConfig) -> TopicModel:
    """Run the collapsed Gibbs sampler for ``config.train_iters`` sweeps.

    Deterministic for a fixed seed.  Raises :class:`ValueError` when every
    document is empty.
    """
    sampler = GibbsSampler(docs, len(vocab), config)
    sampler.run(config.train_iters)
    return sampler.to_model(vocab)


def infer_theta(
    doc: EncodedDocument, model: TopicModel, config: LdaConfig | None = None
) -> np.ndarray:
    """Infer the topic distribution of a held-out document.

    The model's counts are held frozen; only the document's own topic
    assignments are resampled.  The estimate averages the smoothed
    document-topic proportions over the post-burn-in sweeps.  An empty
    document has no evidence and gets the uniform prior mean.
    """
    cfg = model.config if config is None else config
    k = model.n_topics
    if len(doc) == 0:
        return np.full(k, 1.0 / k)
    if int(doc.tokens.max()) >= len(model.vocab) or int(doc.tokens.min()) < 0:
        raise ValueError("document is not encoded against the model vocabulary")
    state = _sampler.new_rng_state(derive_seed("lda-infer", cfg.seed, doc.instance_id))
    return _sampler.infer_doc(
        doc.tokens,
        model.n_kw,
        model.n_k,
        cfg.effective_alpha,
        cfg.beta,
        cfg.infer_iters,
        cfg.infer_burn_in,
        state,
    )


def phi(model: TopicModel) -> np.ndarray:
    """Smoothed topic-word distribution; each row sums to 1."""
    beta = model.config.beta
    v = len(model.vocab)
    return (model.n_kw + beta) / (model.n_k + beta * v)[:, None]


def _config_to_dict(config: LdaConfig) -> dict:
    return {
        "n_topics": config.n_topics,
        "alpha": config.alpha,
        "beta": config.beta,
        "train_iters": config.train_iters,
        "infer_iters": config.infer_iters,
        "infer_burn_in": config.infer_burn_in,
        "seed": config.seed,
    }


def save_model(model: TopicModel, path: str | Path) -> None:
    """Write a model as a single self-describing ``.npz`` file.

    The container stores a JSON header (format name, version, config,
    vocabulary) next to the topic-word counts, saved little-endian so the
    file reads back identically on any platform.
    """
    header = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": _config_to_dict(model.config),
        "vocab": list(model.vocab.words),
    }
    with open(path, "wb") as fh:
        np.savez(
            fh,
            header=np.array(json.dumps(header)),
            n_kw=model.n_kw.astype("<i8"),
        )


def load_model(path: str | Path) -> TopicModel:
    """Inverse of :func:`save_model`; validates format name and version."""
    with np.load(path, allow_pickle=False) as data:
        if "header" not in data or "n_kw" not in data:
            raise ValueError(f"{path}: not a senseforge model file")
        header = json.loads(str(data["header"][()]))
        if header.get("format") != MODEL_FORMAT:
            raise ValueError(f"{path}: unexpected format {header.get('format')!r}")
        if header.get("version") != MODEL_VERSION:
            raise ValueError(f"{path}: unsupported model version {header.get('version')!r}")
        n_kw = data["n_kw"].astype(np.int64)
    config = LdaConfig(**header["config"])
    vocab = Vocabulary(header["vocab"])
    return TopicModel(vocab, n_kw, n_kw.sum(axis=1), config)
