"""Identity-level corpus splitting."""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..errors import InsufficientData

SPLIT_NAMES = ("train1", "val1", "train2", "val2", "test")
# identity-count shares out of 20
_SHARES = {"train1": 11, "val1": 1, "train2": 6, "val2": 1, "test": 1}


@dataclass(frozen=True)
class CorpusSplit:
    """Disjoint identity sets in an 11:1:6:1:1 proportion."""

    train1: tuple[str, ...]
    val1: tuple[str, ...]
    train2: tuple[str, ...]
    val2: tuple[str, ...]
    test: tuple[str, ...]

    def as_dict(self) -> dict[str, tuple[str, ...]]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def split_of(self, identity: str) -> str:
        for name, ids in self.as_dict().items():
            if identity in ids:
                return name
        raise KeyError(identity)


def split_corpus(identities: list[str], seed: int) -> CorpusSplit:
    """Deterministically partition identities 11:1:6:1:1.

    Each non-train1 split receives floor(n * share / 20) identities; the
    remainder goes to train1. Requires at least 20 identities so that no
    split is empty.
    """
    n = len(identities)
    if n < 20:
        raise InsufficientData(f"need at least 20 identities, got {n}")
    if len(set(identities)) != n:
        raise InsufficientData("identities must be unique")

    order = sorted(identities)
    rng = np.random.default_rng(seed)
    rng.shuffle(order)

    counts = {name: n * share // 20 for name, share in _SHARES.items() if name != "train1"}
    counts["train1"] = n - sum(counts.values())

    parts = {}
    pos = 0
    for name in SPLIT_NAMES:
        parts[name] = tuple(order[pos : pos + counts[name]])
        pos += counts[name]
    return CorpusSplit(**parts)
