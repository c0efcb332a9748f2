"""Stable derivation of named random streams from one user seed.

Every stochastic component draws from its own stream, keyed by a label and
the identifiers it works on (target word, instance id, ...).  Streams are
derived by hashing, never by sharing generator state, so results do not
depend on the order in which work happens to be scheduled.
"""

from __future__ import annotations

import hashlib

_SEP = b"\x1f"


def derive_seed(*parts: object) -> int:
    """Hash ``parts`` into a 64-bit seed.

    Parts are joined by their string form; the same parts always yield the
    same seed, in any process, on any platform.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(_SEP)
    return int.from_bytes(h.digest(), "little")
