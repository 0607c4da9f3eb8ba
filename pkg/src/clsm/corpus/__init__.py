"""Corpus pipeline: tokenization, windowing, augmentation, splits, spans."""

from .build import build_corpus
from .manifest import Corpus, read_token_file, write_token_file
from .spans import SPAN_LENGTHS, TargetSpan, sample_target_span
from .split import CorpusSplit, split_corpus
from .toy import write_toy_corpus
from .tracks import QuantizedTrack, augment_transpose, decode_track, encode_track
from .windows import WINDOW_LEN, make_windows, max_silence_run, window_ok

__all__ = [
    "Corpus",
    "CorpusSplit",
    "QuantizedTrack",
    "SPAN_LENGTHS",
    "TargetSpan",
    "WINDOW_LEN",
    "augment_transpose",
    "build_corpus",
    "decode_track",
    "encode_track",
    "make_windows",
    "max_silence_run",
    "read_token_file",
    "sample_target_span",
    "split_corpus",
    "window_ok",
    "write_token_file",
    "write_toy_corpus",
]
