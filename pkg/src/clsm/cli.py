"""Command-line entry point.

Subcommands cover the whole workflow: corpus preparation, training the
infilling model / VAE baseline / scoring LM, sampling, evaluation reports,
a gradient self-check, and the HTTP service.

Exit codes: 0 success; 2 bad usage or invalid inputs (argparse errors,
malformed spans, bad config files); 1 runtime failure (unreadable
checkpoints, numeric aborts, not enough data).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from pathlib import Path

import numpy as np
import torch

from .baseline_vae import SequenceVAE, VAEConfig, vae_greedy_decode, vae_interpolate
from .corpus import Corpus, TargetSpan, build_corpus, read_token_file, write_toy_corpus
from .corpus.spans import sample_target_span
from .corpus.split import SPLIT_NAMES
from .errors import (
    CheckpointError,
    ClsmError,
    InvalidConfig,
    InvalidInput,
    InvalidSpan,
    InvalidToken,
)
from .metrics import (
    clsm_interpolation_adapter,
    interpolation_edit_distance_ratio,
    left_contextual_recon_accuracy,
    lm_nll,
    vae_interpolation_adapter,
    vae_left_recon_accuracy,
)
from .model import CLSM, ModelConfig, load_checkpoint, restore_into
from .sampler import (
    MODES,
    assemble_window,
    greedy_decode_target,
    interpolate_contextual,
    sample_from_prior,
    vary_contextual,
)
from .training import TrainConfig, fit, gradient_check, load_config_file, load_eval_lm
from .training.lm import LMConfig, train_eval_lm

# train/val split per model family: the scoring LM gets its own data so the
# likelihoods it reports are not of sequences it trained on
FIT_SPLITS = {"clsm": ("train1", "val1"), "vae": ("train1", "val1"), "lm": ("train2", "val2")}
EVAL_SPLIT = "test"


def _parse_span(text: str) -> TargetSpan:
    m = re.fullmatch(r"(\d+):(\d+)", text)
    if not m:
        raise InvalidSpan(f"--span must be START:LENGTH, got {text!r}")
    span = TargetSpan(start=int(m.group(1)), length=int(m.group(2)))
    span.check_canonical()
    return span


def _parse_j_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise InvalidInput(f"--J must be comma-separated integers, got {text!r}") from None
    if not values or any(j < 1 for j in values):
        raise InvalidInput(f"--J values must be >= 1, got {text!r}")
    return values


def _load_generator_model(path, expect: str | None):
    """(kind, model) from a clsm or vae checkpoint; --model mismatches error."""
    payload = load_checkpoint(path)
    kind = payload["kind"]
    if kind == "lm":
        raise CheckpointError(f"{path} is a scoring-LM checkpoint, not a generative model")
    if expect and expect != kind:
        raise InvalidInput(f"--model {expect} but checkpoint {path} holds a {kind} model")
    if kind == "clsm":
        model = CLSM(ModelConfig.from_dict(payload["config"]["model"]))
    else:
        model = SequenceVAE(VAEConfig.from_dict(payload["config"]["model"]))
    restore_into(model, payload, path)
    model.eval()
    return kind, model


def _eval_contexts(corpus_dir, n: int, rng) -> list[tuple[list[str], list[str], TargetSpan]]:
    windows = Corpus.load(corpus_dir).split_windows(EVAL_SPLIT)
    if not windows:
        raise InvalidInput(f"{corpus_dir}: corpus has no {EVAL_SPLIT} windows")
    picks = rng.integers(len(windows), size=n)
    out = []
    for i in picks:
        w = windows[int(i)]
        span = sample_target_span(rng)
        out.append((w[: span.start], w[span.stop :], span))
    return out


def _print_table(headers: list[str], rows: list[list]) -> None:
    cells = [[str(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    print(line)
    print("  ".join("-" * w for w in widths))
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))


def _write_report(path, records: list[dict]) -> None:
    Path(path).write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    print(f"report written to {path}")


# ---------------------------------------------------------------- corpus


def cmd_corpus_build(args) -> int:
    corpus = build_corpus(args.in_dir, args.out, args.seed)
    counts = corpus.counts()
    identities = corpus.identities()
    _print_table(
        ["split", "windows", "identities"],
        [[s, counts[s], len(identities[s])] for s in SPLIT_NAMES],
    )
    print(f"manifest written to {Path(args.out) / 'manifest.jsonl'}")
    return 0


def cmd_corpus_stats(args) -> int:
    corpus = Corpus.load(args.in_dir)
    counts = corpus.counts()
    identities = corpus.identities()
    _print_table(
        ["split", "windows", "identities"],
        [[s, counts[s], len(identities[s])] for s in SPLIT_NAMES]
        + [["total", sum(counts.values()), sum(len(v) for v in identities.values())]],
    )
    return 0


def cmd_corpus_toy(args) -> int:
    counts = write_toy_corpus(args.out, n_identities=args.n_identities, bars=args.bars, seed=args.seed)
    print(f"{len(counts)} identities, {sum(counts.values())} windows under {args.out}")
    return 0


# ----------------------------------------------------------------- train


def cmd_train(args) -> int:
    specs = {
        "clsm": (ModelConfig, "model"),
        "vae": (VAEConfig, "model"),
        "lm": (LMConfig, "lm"),
    }
    cfg_cls, section = specs[args.model_kind]
    if args.config:
        mcfg, tcfg = load_config_file(args.config, cfg_cls, section)
    else:
        mcfg, tcfg = cfg_cls(), TrainConfig()
    if args.seed is not None:
        tcfg = dataclasses.replace(tcfg, seed=args.seed)

    corpus = Corpus.load(args.corpus)
    train_name, val_name = FIT_SPLITS[args.model_kind]
    train_rows = corpus.split_windows(train_name)
    val_rows = corpus.split_windows(val_name)

    if args.model_kind == "lm":
        best = train_eval_lm(train_rows, val_rows, tcfg, mcfg, args.out)
        print(f"best checkpoint: {best}")
        return 0

    torch.manual_seed(tcfg.seed)
    model = CLSM(mcfg) if args.model_kind == "clsm" else SequenceVAE(mcfg)
    result = fit(model, train_rows, val_rows, mcfg.to_dict(), tcfg, args.out, kind=args.model_kind)
    print(f"best checkpoint:  {result.best_path}")
    print(f"final checkpoint: {result.final_path}")
    print(f"metrics log:      {result.metrics_path}")
    if result.aborted:
        print("error: training aborted on non-finite loss; checkpoints hold the last good weights", file=sys.stderr)
        return 1
    return 0


def cmd_gradcheck(args) -> int:
    report = gradient_check(seed=args.seed, n_params=args.n_params)
    print(json.dumps(report, indent=2))
    if args.out:
        _write_report(args.out, [report])
    if not report["passed"]:
        print("error: gradient check failed", file=sys.stderr)
        return 1
    print("gradient check passed")
    return 0


# -------------------------------------------------------------- generate


def cmd_generate(args) -> int:
    span = _parse_span(args.span)
    windows = read_token_file(args.context)
    if not windows:
        raise InvalidInput(f"{args.context}: no windows found")
    window = windows[0]
    left, right = window[: span.start], window[span.stop :]

    kind, model = _load_generator_model(args.checkpoint, args.model)
    g = torch.Generator().manual_seed(args.seed)

    def prior_draw():
        if kind == "clsm":
            return sample_from_prior(model, left, right, span, g)
        return torch.randn(1, model.cfg.d_z, generator=g)

    def decode(z):
        if kind == "clsm":
            return assemble_window(left, greedy_decode_target(model, z, left, right, span), right)
        return assemble_window(left, vae_greedy_decode(model, z, left, span.length), right)

    if args.mode == "random":
        sequences = [decode(prior_draw())]
    elif args.mode == "interpolate":
        z1, z2 = prior_draw(), prior_draw()
        if kind == "clsm":
            sequences = interpolate_contextual(model, z1, z2, args.J, left, right, span)
        else:
            sequences = vae_interpolate(model, z1, z2, args.J, left, right, span)
    else:  # vary
        z = prior_draw()
        if kind == "clsm":
            sequences = [vary_contextual(model, z, args.delta, left, right, span, g)]
        else:
            eps = torch.randn(1, model.cfg.d_z, generator=g)
            sequences = [decode(z + args.delta * eps)]

    text = "".join(" ".join(s) + "\n" for s in sequences)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"{len(sequences)} sequence(s) written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# ------------------------------------------------------------------ eval


def cmd_eval_iedr(args) -> int:
    kind, model = _load_generator_model(args.checkpoint, args.model)
    rng = np.random.default_rng(args.seed)
    contexts = _eval_contexts(args.corpus, args.n, rng)
    adapter = clsm_interpolation_adapter(model) if kind == "clsm" else vae_interpolation_adapter(model)
    g = torch.Generator().manual_seed(args.seed)

    records = []
    for J in _parse_j_list(args.J):
        r = interpolation_edit_distance_ratio(adapter, contexts, J, g)
        records.append(
            {
                "metric": "iedr",
                "model": kind,
                "J": r.J,
                "ratio": r.ratio,
                "n_paths": r.n_paths,
                "n_excluded_paths": r.n_excluded_paths,
                "n_excluded_pairs": r.n_excluded_pairs,
            }
        )
    _print_table(
        ["J", "ratio", "paths", "excluded paths", "zero pairs"],
        [[r["J"], f"{r['ratio']:.4f}", r["n_paths"], r["n_excluded_paths"], r["n_excluded_pairs"]] for r in records],
    )
    _write_report(args.out, records)
    return 0


def cmd_eval_nll(args) -> int:
    kind, model = _load_generator_model(args.checkpoint, args.model)
    lm = load_eval_lm(args.lm)
    rng = np.random.default_rng(args.seed)
    contexts = _eval_contexts(args.corpus, args.n, rng)
    g = torch.Generator().manual_seed(args.seed)

    samples = []
    for left, right, span in contexts:
        if kind == "clsm":
            z = sample_from_prior(model, left, right, span, g)
            target = greedy_decode_target(model, z, left, right, span)
        else:
            z = torch.randn(1, model.cfg.d_z, generator=g)
            target = vae_greedy_decode(model, z, left, span.length)
        samples.append(assemble_window(left, target, right))
    data_windows = Corpus.load(args.corpus).split_windows(EVAL_SPLIT)
    records = [
        {"metric": "lm_nll", "source": kind, "nll": lm_nll(samples, lm), "n": len(samples)},
        {"metric": "lm_nll", "source": "data", "nll": lm_nll(data_windows, lm), "n": len(data_windows)},
    ]
    _print_table(
        ["source", "nll", "n"],
        [[r["source"], f"{r['nll']:.4f}", r["n"]] for r in records],
    )
    _write_report(args.out, records)
    return 0


def cmd_eval_recon(args) -> int:
    kind, model = _load_generator_model(args.checkpoint, args.model)
    rng = np.random.default_rng(args.seed)
    windows = Corpus.load(args.corpus).split_windows(EVAL_SPLIT)
    if not windows:
        raise InvalidInput(f"{args.corpus}: corpus has no {EVAL_SPLIT} windows")
    picks = [windows[int(i)] for i in rng.integers(len(windows), size=args.n)]
    if kind == "clsm":
        acc = left_contextual_recon_accuracy(model, picks, rng)
    else:
        acc = vae_left_recon_accuracy(model, picks, rng)
    records = [{"metric": "left_recon_accuracy", "model": kind, "accuracy": acc, "n": len(picks)}]
    _print_table(["model", "accuracy", "n"], [[kind, f"{acc:.4f}", len(picks)]])
    _write_report(args.out, records)
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.checkpoint, port=args.port, host=args.host, ttl=args.ttl)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clsm", description="melody infilling toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = sub.add_parser("corpus", help="build and inspect window corpora")
    corpus_sub = corpus.add_subparsers(dest="corpus_command", required=True)
    p = corpus_sub.add_parser("build", help="tokenize a directory of MIDI / token files")
    p.add_argument("--in", dest="in_dir", required=True, help="input directory")
    p.add_argument("--out", required=True, help="output corpus directory")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_corpus_build)
    p = corpus_sub.add_parser("stats", help="summarize a built corpus")
    p.add_argument("--in", dest="in_dir", required=True, help="corpus directory")
    p.set_defaults(fn=cmd_corpus_stats)
    p = corpus_sub.add_parser("toy", help="write a synthetic motif corpus")
    p.add_argument("--out", required=True, help="output directory of token files")
    p.add_argument("--n-identities", type=int, default=24)
    p.add_argument("--bars", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_corpus_toy)

    train = sub.add_parser("train", help="fit a model on a built corpus")
    train_sub = train.add_subparsers(dest="train_command", required=True)
    for kind, blurb in (
        ("clsm", "contextual latent infilling model"),
        ("vae", "sequence VAE baseline"),
        ("lm", "causal LM used for likelihood scoring"),
    ):
        p = train_sub.add_parser(kind, help=blurb)
        p.add_argument("--corpus", required=True, help="built corpus directory")
        p.add_argument("--config", help="YAML config file (defaults if omitted)")
        p.add_argument("--out", required=True, help="run directory for checkpoints and logs")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.set_defaults(fn=cmd_train, model_kind=kind)

    p = sub.add_parser("gradcheck", help="finite-difference gradient self-check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-params", type=int, default=50)
    p.add_argument("--out", help="optional report file")
    p.set_defaults(fn=cmd_gradcheck)

    p = sub.add_parser("generate", help="sample target spans for a context window")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--context", required=True, help="token text file; first window is the context")
    p.add_argument("--span", required=True, help="target as START:LENGTH, bar-aligned")
    p.add_argument("--mode", choices=MODES, default="random")
    p.add_argument("--model", choices=("clsm", "vae"), help="expected checkpoint kind")
    p.add_argument("--J", type=int, default=8, help="interpolation steps (interpolate mode)")
    p.add_argument("--delta", type=float, default=1.0, help="perturbation size (vary mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write sequences here instead of stdout")
    p.set_defaults(fn=cmd_generate)

    evalp = sub.add_parser("eval", help="evaluation reports on the test split")
    eval_sub = evalp.add_subparsers(dest="eval_command", required=True)
    p = eval_sub.add_parser("iedr", help="interpolation smoothness (edit-distance ratio)")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--J", default="2,4,8", help="comma-separated interpolation step counts")
    p.add_argument("--model", choices=("clsm", "vae"))
    p.add_argument("--n", type=int, default=50, help="number of evaluation contexts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="iedr.jsonl")
    p.set_defaults(fn=cmd_eval_iedr)
    p = eval_sub.add_parser("nll", help="sample likelihood under the scoring LM")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--lm", required=True, help="scoring-LM checkpoint")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", choices=("clsm", "vae"))
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="nll.jsonl")
    p.set_defaults(fn=cmd_eval_nll)
    p = eval_sub.add_parser("recon", help="left-context reconstruction accuracy")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", choices=("clsm", "vae"))
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="recon.jsonl")
    p.set_defaults(fn=cmd_eval_recon)

    p = sub.add_parser("serve", help="run the HTTP inference service")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--port", type=int, default=None, help="defaults to $CLSM_PORT or 8321")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ttl", type=float, default=3600.0, help="session idle expiry in seconds")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidSpan, InvalidInput, InvalidConfig, InvalidToken) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ClsmError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
