"""Versioned checkpoint container for every trainable model in the package."""

from __future__ import annotations

from pathlib import Path

import torch

from ..alphabet import ALPHABET, TokenAlphabet
from ..errors import CheckpointError

FORMAT_VERSION = 1
KINDS = ("clsm", "vae", "lm")


def save_checkpoint(path: str | Path, kind: str, config_dict: dict, model: torch.nn.Module):
    if kind not in KINDS:
        raise CheckpointError(f"unknown checkpoint kind {kind!r}")
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "config": config_dict,
        "alphabet": ALPHABET.to_json(),
        "state_dict": model.state_dict(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(payload, path)


def load_checkpoint(path: str | Path, expect_kind: str | None = None) -> dict:
    """Validated payload dict; use ``restore_into`` to load the weights."""
    try:
        payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    except FileNotFoundError:
        raise
    except Exception as e:
        raise CheckpointError(f"{path}: unreadable checkpoint: {e}") from e
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise CheckpointError(f"{path}: not a model checkpoint")
    if payload["format_version"] != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format version {payload['format_version']} unsupported "
            f"(expected {FORMAT_VERSION})"
        )
    if payload.get("kind") not in KINDS:
        raise CheckpointError(f"{path}: unknown kind {payload.get('kind')!r}")
    if expect_kind is not None and payload["kind"] != expect_kind:
        raise CheckpointError(f"{path}: kind {payload['kind']!r}, expected {expect_kind!r}")
    if TokenAlphabet.from_json(payload["alphabet"]) != ALPHABET:
        raise CheckpointError(f"{path}: alphabet mismatch")
    return payload


def restore_into(model: torch.nn.Module, payload: dict, path="") -> None:
    try:
        model.load_state_dict(payload["state_dict"], strict=True)
    except RuntimeError as e:
        raise CheckpointError(f"{path}: parameter shape/name mismatch: {e}") from e
