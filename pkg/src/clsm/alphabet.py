"""Token alphabet for the melodico-rhythmic encoding.

Data tokens are the 30 pitches "55".."84", the rest "R", and the hold "__"
that continues the previous note. Two extra model-input symbols exist that
never appear in data or in generated output: the positional constraint
token "p" (prior input) and the start token "s" (decoder input).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InvalidToken

PITCH_MIN = 55
PITCH_MAX = 84

REST_TOKEN = "R"
HOLD_TOKEN = "__"
CONSTRAINT_TOKEN = "p"
START_TOKEN = "s"


def _default_index() -> dict[str, int]:
    tokens = [str(p) for p in range(PITCH_MIN, PITCH_MAX + 1)]
    tokens += [REST_TOKEN, HOLD_TOKEN, CONSTRAINT_TOKEN, START_TOKEN]
    return {tok: i for i, tok in enumerate(tokens)}


@dataclass(frozen=True)
class TokenAlphabet:
    """Immutable token-to-index map, stable across save/load."""

    index: dict[str, int] = field(default_factory=_default_index)

    def __post_init__(self):
        if len(self.index) != 34:
            raise InvalidToken(f"alphabet must have 34 entries, got {len(self.index)}")
        object.__setattr__(self, "_tokens", {i: t for t, i in self.index.items()})

    @property
    def data_size(self) -> int:
        """Number of tokens that may appear in data and output (32)."""
        return 32

    @property
    def model_size(self) -> int:
        """Number of embeddable input tokens, including "p" and "s" (34)."""
        return 34

    def encode(self, token: str) -> int:
        try:
            return self.index[token]
        except KeyError:
            raise InvalidToken(f"unknown token {token!r}") from None

    def decode(self, idx: int) -> str:
        try:
            return self._tokens[idx]
        except KeyError:
            raise InvalidToken(f"index {idx} out of alphabet") from None

    def encode_seq(self, tokens: list[str]) -> list[int]:
        return [self.encode(t) for t in tokens]

    def decode_seq(self, ids) -> list[str]:
        return [self.decode(int(i)) for i in ids]

    def is_data_token(self, token: str) -> bool:
        idx = self.index.get(token)
        return idx is not None and idx < self.data_size

    @property
    def constraint_id(self) -> int:
        return self.index[CONSTRAINT_TOKEN]

    @property
    def start_id(self) -> int:
        return self.index[START_TOKEN]

    @property
    def rest_id(self) -> int:
        return self.index[REST_TOKEN]

    @property
    def hold_id(self) -> int:
        return self.index[HOLD_TOKEN]

    def to_json(self) -> str:
        return json.dumps(self.index)

    @classmethod
    def from_json(cls, payload: str) -> "TokenAlphabet":
        return cls(index=json.loads(payload))


ALPHABET = TokenAlphabet()
