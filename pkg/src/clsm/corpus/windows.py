"""Sliding-window extraction and the silence filter."""

from __future__ import annotations

from ..alphabet import HOLD_TOKEN, REST_TOKEN

WINDOW_LEN = 128  # 8 bars of 16 steps
WINDOW_STRIDE = 16  # 1 bar
MAX_SILENCE_RUN = 16  # longest tolerated run of non-sounding steps


def max_silence_run(tokens: list[str]) -> int:
    """Length of the longest run of non-sounding steps.

    A step is non-sounding if it is a rest, or a hold that extends a rest
    rather than a note. Holds at the start of a window extend a note that
    began before the window, so they count as sounding.
    """
    run = 0
    longest = 0
    for tok in tokens:
        if tok == REST_TOKEN or (tok == HOLD_TOKEN and run > 0):
            run += 1
            longest = max(longest, run)
        else:
            run = 0
    return longest


def window_ok(tokens: list[str]) -> bool:
    return len(tokens) == WINDOW_LEN and max_silence_run(tokens) <= MAX_SILENCE_RUN


def make_windows(track_tokens: list[str]) -> list[list[str]]:
    """All length-128 windows at a 1-bar stride that pass the silence filter.

    Tracks shorter than one window yield an empty list.
    """
    n = len(track_tokens)
    if n < WINDOW_LEN:
        return []
    windows = []
    for start in range(0, n - WINDOW_LEN + 1, WINDOW_STRIDE):
        cand = track_tokens[start : start + WINDOW_LEN]
        if max_silence_run(cand) <= MAX_SILENCE_RUN:
            windows.append(cand)
    return windows
