"""Shared fixtures and synthetic-corpus generators.

The generators double as oracles for the statistical tests: they plant a
known sense structure (disjoint topical vocabularies per sense), and the
tests check that training and clustering dig that structure back out.
"""

import json

import numpy as np
import pytest

from senseforge import EncodedDocument, Instance, Target, Vocabulary
from senseforge.lda import GibbsSampler, LdaConfig, infer_theta

_LETTERS = "abcdefghijklmnopqrstuvwxyz"

#: purely alphabetic sense-vocabulary prefixes (digits would not survive the
#: letters-only tokenizer)
SENSE_PREFIXES = ("kal", "mer", "tov", "ryn")
NOISE_PREFIX = "zum"


def make_word(prefix: str, i: int) -> str:
    hi, lo = divmod(i, 26)
    return f"{prefix}{_LETTERS[hi]}{_LETTERS[lo]}"


def two_topic_docs(n_docs=200, doc_len=50, n_words=20, seed=0):
    """Encoded docs drawn from one of two disjoint half-vocabularies.

    Returns (docs, vocab_size, word_topic) where word_topic[w] is the
    generating topic of word id w.
    """
    rng = np.random.default_rng(seed)
    half = n_words // 2
    docs = []
    for d in range(n_docs):
        topic = d % 2
        low = topic * half
        ids = rng.integers(low, low + half, size=doc_len, dtype=np.int64)
        docs.append(EncodedDocument(f"d{d}", ids.astype(np.int32)))
    word_topic = [0] * half + [1] * (n_words - half)
    return docs, n_words, word_topic


def four_sense_instances(
    target_key="crane.n",
    n_per_sense=40,
    doc_len=50,
    words_per_sense=12,
    n_noise=6,
    noise_rate=0.1,
    seed=0,
):
    """Instances of one pseudo-ambiguous word with four planted senses.

    Each sense draws from its own word list; a small shared noise vocabulary
    bleeds across senses at ``noise_rate``.  ``n_per_sense`` may be a single
    count or one count per sense.  Returns (instances, gold) with gold
    mapping instance id -> generating sense label.
    """
    rng = np.random.default_rng(seed)
    target = Target.parse(target_key)
    sense_words = [
        [make_word(prefix, i) for i in range(words_per_sense)]
        for prefix in SENSE_PREFIXES
    ]
    if isinstance(n_per_sense, int):
        n_per_sense = [n_per_sense] * len(sense_words)
    noise_words = [make_word(NOISE_PREFIX, i) for i in range(n_noise)]
    instances: list[Instance] = []
    gold: dict[str, str] = {}
    counter = 0
    for sense, words in enumerate(sense_words):
        for _ in range(n_per_sense[sense]):
            drawn = [
                noise_words[rng.integers(len(noise_words))]
                if rng.random() < noise_rate
                else words[rng.integers(len(words))]
                for _ in range(doc_len)
            ]
            iid = f"{target_key}.{counter}"
            counter += 1
            instances.append(Instance(target, iid, " ".join(drawn)))
            gold[iid] = f"sense{sense}"
    return instances, gold


def write_jsonl_corpus(path, instances):
    """Write instances in the corpus JSONL layout (plain writer, so corpus
    I/O under test is not trusted for its own fixtures)."""
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            rec = {"target": inst.target.key, "id": inst.instance_id, "text": inst.text}
            fh.write(json.dumps(rec) + "\n")


def write_gold_key(path, by_target):
    """Write {target_key: {instance_id: label}} as a key file, plainly."""
    with open(path, "w", encoding="utf-8") as fh:
        for target_key in sorted(by_target):
            for iid in sorted(by_target[target_key]):
                fh.write(f"{target_key} {iid} {by_target[target_key][iid]}\n")


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile (or load from cache) the jitted sampler kernels once, so timed
    tests measure sampling rather than compilation."""
    vocab = Vocabulary(["aa", "bb"])
    docs = [
        EncodedDocument("w0", np.array([0, 1, 0], dtype=np.int32)),
        EncodedDocument("w1", np.array([1, 0], dtype=np.int32)),
    ]
    config = LdaConfig(n_topics=2, train_iters=2, infer_iters=4, infer_burn_in=1, seed=0)
    sampler = GibbsSampler(docs, len(vocab), config)
    sampler.run(2)
    infer_theta(docs[0], sampler.to_model(vocab))
    return True


# Results registered by the acceptance module; echoed after the run so the
# one-line-per-criterion verdicts are visible without -s.
ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num, name, ok, detail in sorted(ACCEPTANCE_RESULTS):
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d} [{name}]: {verdict}{detail}")
