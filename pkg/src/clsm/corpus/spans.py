"""Target spans: which contiguous slice of a window is being generated."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidSpan

SPAN_LENGTHS = (16, 32, 48, 64)  # 1 to 4 bars
BAR = 16


@dataclass(frozen=True)
class TargetSpan:
    """Contiguous 0-based index range [start, start + length) of the target."""

    start: int
    length: int

    def __post_init__(self):
        if self.start < 0 or self.length < 1:
            raise InvalidSpan(f"bad span start={self.start} length={self.length}")

    @property
    def stop(self) -> int:
        return self.start + self.length

    def indices(self) -> range:
        return range(self.start, self.stop)

    def check_within(self, seq_len: int) -> None:
        if self.stop > seq_len:
            raise InvalidSpan(
                f"span [{self.start}, {self.stop}) exceeds sequence of length {seq_len}"
            )

    def is_canonical(self, seq_len: int = 128) -> bool:
        """Bar-aligned 1-to-4-bar span inside a standard window."""
        return (
            self.length in SPAN_LENGTHS
            and self.start % BAR == 0
            and self.stop <= seq_len
        )

    def check_canonical(self, seq_len: int = 128) -> None:
        if not self.is_canonical(seq_len):
            raise InvalidSpan(
                f"span start={self.start} length={self.length} is not a bar-aligned "
                f"1-4 bar span within {seq_len} steps"
            )


def sample_target_span(rng) -> TargetSpan:
    """Draw a span: length uniform over 1-4 bars, then start uniform over
    the bar-aligned positions that fit.

    ``rng`` is a :class:`numpy.random.Generator`.
    """
    length = int(rng.choice(SPAN_LENGTHS))
    n_starts = (128 - length) // BAR + 1
    start = int(rng.integers(n_starts)) * BAR
    return TargetSpan(start=start, length=length)
