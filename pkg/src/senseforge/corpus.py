"""Corpus ingestion: instances, tokenization, vocabularies and key files.

Two corpus layouts are supported:

* JSONL -- one object per line with exactly the keys ``target`` (e.g.
  ``"promotion.n"``), ``id`` and ``text``, all strings, UTF-8 encoded.
* directory -- ``<root>/<lemma>.<pos>/<instance_id>.txt``, one instance
  per file.

Key files (gold standard and system output share the grammar) hold one
record per line, ``<lemma>.<pos> <instance_id> <label>``, space separated;
lines starting with ``#`` are comments and blank lines are skipped.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

POS_TAGS = ("n", "v")

# Runs of Unicode letters; digits, underscores and punctuation separate
# tokens.  Deliberately knows nothing about any particular language.
_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


class CorpusError(Exception):
    """Base class for corpus and key-file loading failures."""


class ParseError(CorpusError):
    """A file does not match its declared format."""

    def __init__(self, message: str, path: str | Path | None = None, line_no: int | None = None):
        self.path = str(path) if path is not None else None
        self.line_no = line_no
        where = ""
        if self.path is not None:
            where = f"{self.path}:"
            if line_no is not None:
                where += f"{line_no}:"
            where += " "
        super().__init__(where + message)


class IntegrityError(CorpusError):
    """Well-formed input that violates a uniqueness constraint."""


@dataclass(frozen=True)
class Target:
    """A target word: lemma plus coarse part of speech (``n`` or ``v``)."""

    lemma: str
    pos: str

    def __post_init__(self) -> None:
        if not self.lemma:
            raise ValueError("target lemma must be non-empty")
        if self.pos not in POS_TAGS:
            raise ValueError(f"target POS must be one of {POS_TAGS}, got {self.pos!r}")

    @property
    def key(self) -> str:
        return f"{self.lemma}.{self.pos}"

    @classmethod
    def parse(cls, key: str) -> "Target":
        lemma, dot, pos = key.rpartition(".")
        if not dot:
            raise ValueError(f"target key must look like '<lemma>.<pos>', got {key!r}")
        return cls(lemma, pos)


@dataclass(frozen=True)
class Instance:
    """One occurrence context of a target word."""

    target: Target
    instance_id: str
    text: str


class Vocabulary:
    """Immutable word <-> dense-id bijection.

    Ids are assigned in first-occurrence order over the documents the
    vocabulary was built from, so they are dense in ``0..len-1`` and stable
    across runs on the same input.
    """

    __slots__ = ("_words", "_ids")

    def __init__(self, words: Iterable[str]):
        self._words: tuple[str, ...] = tuple(words)
        self._ids: dict[str, int] = {w: i for i, w in enumerate(self._words)}
        if len(self._ids) != len(self._words):
            raise ValueError("vocabulary words must be unique")

    def __len__(self) -> int:
        return len(self._words)

    def __contains__(self, word: object) -> bool:
        return word in self._ids

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self._words == other._words

    def __hash__(self) -> int:
        return hash(self._words)

    def __repr__(self) -> str:
        return f"Vocabulary({len(self)} words)"

    def id_of(self, word: str) -> int:
        return self._ids[word]

    def word_of(self, word_id: int) -> str:
        return self._words[word_id]

    @property
    def words(self) -> tuple[str, ...]:
        return self._words


@dataclass(frozen=True, eq=False)
class EncodedDocument:
    """A tokenized instance as vocabulary ids, out-of-vocabulary tokens removed."""

    instance_id: str
    tokens: np.ndarray  # int32, shape (n,)

    def __len__(self) -> int:
        return int(self.tokens.shape[0])


@dataclass(frozen=True)
class GoldStandard:
    """Single-label sense assignments grouped by target word."""

    by_target: dict[str, dict[str, str]]

    def targets(self) -> tuple[str, ...]:
        return tuple(self.by_target)

    def labels_for(self, target_key: str) -> dict[str, str]:
        return self.by_target.get(target_key, {})

    def n_classes(self, target_key: str) -> int:
        return len(set(self.labels_for(target_key).values()))

    def __len__(self) -> int:
        return sum(len(v) for v in self.by_target.values())


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it into runs of Unicode letters.

    No stopword removal, no stemming, no part-of-speech filtering: the rule
    must hold up for any language with a letter script.  Empty text gives an
    empty list.
    """
    return _WORD_RE.findall(text.lower())


def build_vocabulary(docs: Iterable[Sequence[str]], min_count: int = 1) -> Vocabulary:
    """Collect the words occurring at least ``min_count`` times in ``docs``.

    Ids follow first occurrence order, which makes the result independent of
    hash seeds and stable across re-runs.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    docs = [list(doc) for doc in docs]
    counts: Counter[str] = Counter()
    for doc in docs:
        counts.update(doc)
    words: list[str] = []
    seen: set[str] = set()
    for doc in docs:
        for word in doc:
            if word not in seen and counts[word] >= min_count:
                seen.add(word)
                words.append(word)
    return Vocabulary(words)


def encode_tokens(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Map tokens to vocabulary ids, dropping out-of-vocabulary tokens."""
    ids = [vocab.id_of(t) for t in tokens if t in vocab]
    return np.asarray(ids, dtype=np.int32)


def encode(instance: Instance, vocab: Vocabulary) -> EncodedDocument:
    """Tokenize and encode one instance against a fixed vocabulary.

    Tokens outside the vocabulary are dropped: at inference time the
    vocabulary is pinned by the trained model, so unseen words carry no
    usable signal.  The result may be empty.
    """
    return EncodedDocument(instance.instance_id, encode_tokens(tokenize(instance.text), vocab))


def decode(doc: EncodedDocument, vocab: Vocabulary) -> list[str]:
    """Inverse of :func:`encode` on the in-vocabulary tokens."""
    return [vocab.word_of(int(i)) for i in doc.tokens]


def load_instances(path: str | Path, fmt: str = "jsonl") -> list[Instance]:
    """Load a corpus in the given format (``jsonl`` or ``dir``).

    Instances come back in file order; group them per target word with
    :func:`group_by_target`.  Duplicate instance ids raise
    :class:`IntegrityError`; malformed records raise :class:`ParseError`
    naming the file and line.
    """
    path = Path(path)
    if fmt == "jsonl":
        instances = _load_jsonl(path)
    elif fmt == "dir":
        instances = _load_dir(path)
    else:
        raise ValueError(f"unknown corpus format {fmt!r}; expected 'jsonl' or 'dir'")
    seen: set[str] = set()
    for inst in instances:
        if inst.instance_id in seen:
            raise IntegrityError(f"duplicate instance id {inst.instance_id!r} in {path}")
        seen.add(inst.instance_id)
    return instances


def _load_jsonl(path: Path) -> list[Instance]:
    instances: list[Instance] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path, line_no) from exc
            if not isinstance(record, dict) or set(record) != {"target", "id", "text"}:
                raise ParseError(
                    "record must be an object with exactly the keys 'target', 'id', 'text'",
                    path,
                    line_no,
                )
            if not all(isinstance(record[k], str) for k in ("target", "id", "text")):
                raise ParseError("'target', 'id' and 'text' must all be strings", path, line_no)
            try:
                target = Target.parse(record["target"])
            except ValueError as exc:
                raise ParseError(str(exc), path, line_no) from exc
            instances.append(Instance(target, record["id"], record["text"]))
    return instances


def _load_dir(root: Path) -> list[Instance]:
    if not root.is_dir():
        raise ParseError("not a directory", root)
    instances: list[Instance] = []
    for entry in sorted(root.iterdir()):
        if not entry.is_dir() or entry.name.startswith("."):
            continue
        try:
            target = Target.parse(entry.name)
        except ValueError as exc:
            raise ParseError(f"bad target directory name: {exc}", entry) from exc
        for txt in sorted(entry.glob("*.txt")):
            instances.append(Instance(target, txt.stem, txt.read_text(encoding="utf-8")))
    return instances


def group_by_target(instances: Iterable[Instance]) -> dict[str, list[Instance]]:
    """Group instances by target key, preserving first-seen target order."""
    groups: dict[str, list[Instance]] = {}
    for inst in instances:
        groups.setdefault(inst.target.key, []).append(inst)
    return groups


def load_key_file(path: str | Path) -> GoldStandard:
    """Parse a key file into per-target ``instance_id -> label`` maps."""
    path = Path(path)
    by_target: dict[str, dict[str, str]] = {}
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ParseError(
                    f"expected '<lemma>.<pos> <instance_id> <label>', got {len(fields)} fields",
                    path,
                    line_no,
                )
            target_key, instance_id, label = fields
            try:
                Target.parse(target_key)
            except ValueError as exc:
                raise ParseError(str(exc), path, line_no) from exc
            if instance_id in seen:
                raise IntegrityError(
                    f"duplicate instance id {instance_id!r} at {path}:{line_no}"
                )
            seen.add(instance_id)
            by_target.setdefault(target_key, {})[instance_id] = label
    return GoldStandard(by_target)


def write_key_file(
    assignments: GoldStandard | Mapping[str, Mapping[str, str]], path: str | Path
) -> None:
    """Write assignments as a key file, sorted by (target, instance id).

    The sorted order is the canonical form: ``load_key_file`` inverts it
    exactly, and byte-identical output for equal inputs falls out for free.
    """
    by_target = assignments.by_target if isinstance(assignments, GoldStandard) else assignments
    with open(path, "w", encoding="utf-8") as fh:
        for target_key in sorted(by_target):
            entries = by_target[target_key]
            for instance_id in sorted(entries):
                fh.write(f"{target_key} {instance_id} {entries[instance_id]}\n")
