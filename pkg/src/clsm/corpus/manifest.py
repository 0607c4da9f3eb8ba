"""Corpus interchange formats.

Token text files hold one window per line as 128 space-separated tokens.
A built corpus is a line-delimited manifest, one record per window with its
split name and source identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..alphabet import ALPHABET
from ..errors import InvalidInput
from .split import SPLIT_NAMES
from .windows import WINDOW_LEN

MANIFEST_NAME = "manifest.jsonl"


@dataclass
class Corpus:
    """Windows grouped by split, each tagged with its identity."""

    windows: dict[str, list[tuple[str, list[str]]]] = field(
        default_factory=lambda: {name: [] for name in SPLIT_NAMES}
    )

    def add(self, split: str, identity: str, tokens: list[str]) -> None:
        self.windows[split].append((identity, tokens))

    def split_windows(self, split: str) -> list[list[str]]:
        return [tokens for _, tokens in self.windows[split]]

    def counts(self) -> dict[str, int]:
        return {name: len(items) for name, items in self.windows.items()}

    def identities(self) -> dict[str, list[str]]:
        return {
            name: sorted({identity for identity, _ in items})
            for name, items in self.windows.items()
        }

    def save(self, out_dir: str | Path) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / MANIFEST_NAME
        with path.open("w", encoding="utf-8") as fh:
            for split in SPLIT_NAMES:
                for identity, tokens in self.windows[split]:
                    fh.write(
                        json.dumps({"split": split, "identity": identity, "tokens": tokens})
                        + "\n"
                    )
        return path

    @classmethod
    def load(cls, corpus_dir: str | Path) -> "Corpus":
        path = Path(corpus_dir)
        if path.is_dir():
            path = path / MANIFEST_NAME
        if not path.exists():
            raise InvalidInput(f"no corpus manifest at {path}")
        corpus = cls()
        with path.open(encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec["split"] not in SPLIT_NAMES:
                    raise InvalidInput(f"line {i}: unknown split {rec['split']!r}")
                corpus.add(rec["split"], rec["identity"], rec["tokens"])
        return corpus


def read_token_file(path: str | Path) -> list[list[str]]:
    """Windows from a token text file, one per non-empty line."""
    windows = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != WINDOW_LEN:
            raise InvalidInput(f"{path}:{i + 1}: expected {WINDOW_LEN} tokens, got {len(tokens)}")
        for tok in tokens:
            if not ALPHABET.is_data_token(tok):
                raise InvalidInput(f"{path}:{i + 1}: unknown token {tok!r}")
        windows.append(tokens)
    return windows


def write_token_file(path: str | Path, windows: list[list[str]]) -> None:
    Path(path).write_text(
        "".join(" ".join(w) + "\n" for w in windows), encoding="utf-8"
    )
