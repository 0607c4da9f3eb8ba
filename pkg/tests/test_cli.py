import json
from pathlib import Path

import pytest

from clsm.cli import main

TINY_MODEL_YAML = """\
model:
  d_z: 8
  l_z: 2
  token_embed: 16
  hidden: 32
  heads: 4
  dropout: 0.1
  mlp_hidden: 32
  n_transformer_layers: 1
  n_lstm_layers: 1
  n_coupling_layers: 2
  coupling_mlp_hidden: 16
  K: 128
train:
  batch: 64
  epochs: 1
  anneal_epochs: 1
  seed: 0
"""

TINY_VAE_YAML = """\
model:
  d_z: 8
  token_embed: 16
  hidden: 32
  n_lstm_layers: 2
  dropout: 0.0
  K: 128
train:
  batch: 64
  epochs: 1
  anneal_epochs: 1
"""

TINY_LM_YAML = """\
lm:
  token_embed: 16
  hidden: 32
  heads: 4
  n_layers: 1
  dropout: 0.0
  K: 128
train:
  batch: 64
  epochs: 1
  anneal_epochs: 1
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Toy corpus built and three tiny models trained through the CLI."""
    root = tmp_path_factory.mktemp("cli")
    raw = root / "raw"
    corpus = root / "corpus"
    assert main(["corpus", "toy", "--out", str(raw), "--n-identities", "20", "--bars", "8"]) == 0
    assert main(["corpus", "build", "--in", str(raw), "--out", str(corpus), "--seed", "0"]) == 0

    (root / "clsm.yaml").write_text(TINY_MODEL_YAML)
    (root / "vae.yaml").write_text(TINY_VAE_YAML)
    (root / "lm.yaml").write_text(TINY_LM_YAML)
    for kind in ("clsm", "vae", "lm"):
        code = main(
            [
                "train",
                kind,
                "--corpus",
                str(corpus),
                "--config",
                str(root / f"{kind}.yaml"),
                "--out",
                str(root / f"run_{kind}"),
            ]
        )
        assert code == 0, kind

    ctx = root / "context.tokens"
    first = Corpus_first_window(corpus)
    ctx.write_text(" ".join(first) + "\n")
    return root


def Corpus_first_window(corpus_dir):
    from clsm.corpus import Corpus

    return Corpus.load(corpus_dir).split_windows("test")[0]


class TestUsage:
    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["--help"])
        assert e.value.code == 0
        assert "corpus" in capsys.readouterr().out

    def test_unknown_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["generate", "--bogus"])
        assert e.value.code == 2

    def test_bad_span_exits_two(self, capsys):
        code = main(
            ["generate", "--checkpoint", "x.pt", "--context", "x.tokens", "--span", "3:7"]
        )
        assert code == 2
        assert "span" in capsys.readouterr().err

    def test_bad_span_format_exits_two(self, capsys):
        code = main(
            ["generate", "--checkpoint", "x.pt", "--context", "x.tokens", "--span", "banana"]
        )
        assert code == 2

    def test_missing_checkpoint_exits_one(self, tmp_path, capsys):
        ctx = tmp_path / "c.tokens"
        ctx.write_text(" ".join(["60"] * 128) + "\n")
        code = main(
            ["generate", "--checkpoint", str(tmp_path / "no.pt"), "--context", str(ctx), "--span", "0:16"]
        )
        assert code == 1
        assert capsys.readouterr().err

    def test_bad_config_exits_two(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("nonsense:\n  a: 1\n")
        code = main(
            ["train", "clsm", "--corpus", str(tmp_path), "--config", str(cfg), "--out", str(tmp_path / "o")]
        )
        assert code == 2


class TestCorpus:
    def test_stats(self, workspace, capsys):
        assert main(["corpus", "stats", "--in", str(workspace / "corpus")]) == 0
        out = capsys.readouterr().out
        assert "train1" in out and "test" in out and "total" in out

    def test_train_artifacts_exist(self, workspace):
        for kind in ("clsm", "vae", "lm"):
            run = workspace / f"run_{kind}"
            assert (run / "best.pt").exists()
            assert (run / "final.pt").exists()
            assert (run / "metrics.jsonl").exists()


class TestGenerate:
    def run(self, workspace, *extra):
        return main(
            [
                "generate",
                "--checkpoint",
                str(workspace / "run_clsm" / "best.pt"),
                "--context",
                str(workspace / "context.tokens"),
                "--span",
                "32:32",
                *extra,
            ]
        )

    def test_random_one_line(self, workspace, capsys):
        assert self.run(workspace, "--mode", "random", "--seed", "5") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1
        assert len(lines[0].split()) == 128

    def test_deterministic(self, workspace, capsys):
        assert self.run(workspace, "--seed", "9") == 0
        a = capsys.readouterr().out
        assert self.run(workspace, "--seed", "9") == 0
        assert capsys.readouterr().out == a

    def test_interpolate_j_plus_one_lines(self, workspace, capsys):
        assert self.run(workspace, "--mode", "interpolate", "--J", "4") == 0
        assert len(capsys.readouterr().out.strip().splitlines()) == 5

    def test_vary_writes_file(self, workspace, tmp_path):
        out = tmp_path / "gen.tokens"
        assert self.run(workspace, "--mode", "vary", "--delta", "0.5", "--out", str(out)) == 0
        assert len(out.read_text().strip().splitlines()) == 1

    def test_context_preserved(self, workspace, capsys):
        assert self.run(workspace, "--mode", "random") == 0
        tokens = capsys.readouterr().out.split()
        window = Corpus_first_window(workspace / "corpus")
        assert tokens[:32] == window[:32]
        assert tokens[64:] == window[64:]

    def test_vae_checkpoint(self, workspace, capsys):
        code = main(
            [
                "generate",
                "--checkpoint",
                str(workspace / "run_vae" / "best.pt"),
                "--context",
                str(workspace / "context.tokens"),
                "--span",
                "32:32",
                "--model",
                "vae",
            ]
        )
        assert code == 0
        assert len(capsys.readouterr().out.split()) == 128

    def test_model_mismatch_exits_two(self, workspace, capsys):
        code = main(
            [
                "generate",
                "--checkpoint",
                str(workspace / "run_vae" / "best.pt"),
                "--context",
                str(workspace / "context.tokens"),
                "--span",
                "32:32",
                "--model",
                "clsm",
            ]
        )
        assert code == 2

    def test_lm_checkpoint_rejected(self, workspace, capsys):
        code = main(
            [
                "generate",
                "--checkpoint",
                str(workspace / "run_lm" / "best.pt"),
                "--context",
                str(workspace / "context.tokens"),
                "--span",
                "32:32",
            ]
        )
        assert code == 1


class TestEval:
    def test_iedr(self, workspace, tmp_path, capsys):
        out = tmp_path / "iedr.jsonl"
        code = main(
            [
                "eval",
                "iedr",
                "--checkpoint",
                str(workspace / "run_clsm" / "best.pt"),
                "--corpus",
                str(workspace / "corpus"),
                "--J",
                "2,4",
                "--n",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        records = [json.loads(l) for l in out.read_text().splitlines()]
        assert [r["J"] for r in records] == [2, 4]
        for r in records:
            assert r["ratio"] >= 1.0 / r["J"] - 1e-9

    def test_nll(self, workspace, tmp_path):
        out = tmp_path / "nll.jsonl"
        code = main(
            [
                "eval",
                "nll",
                "--checkpoint",
                str(workspace / "run_clsm" / "best.pt"),
                "--lm",
                str(workspace / "run_lm" / "best.pt"),
                "--corpus",
                str(workspace / "corpus"),
                "--n",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        records = [json.loads(l) for l in out.read_text().splitlines()]
        assert {r["source"] for r in records} == {"clsm", "data"}
        for r in records:
            assert r["nll"] > 0

    def test_recon(self, workspace, tmp_path):
        out = tmp_path / "recon.jsonl"
        code = main(
            [
                "eval",
                "recon",
                "--checkpoint",
                str(workspace / "run_clsm" / "best.pt"),
                "--corpus",
                str(workspace / "corpus"),
                "--n",
                "2",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        (rec,) = [json.loads(l) for l in out.read_text().splitlines()]
        assert 0.0 <= rec["accuracy"] <= 1.0

    def test_recon_vae(self, workspace, tmp_path):
        out = tmp_path / "recon_vae.jsonl"
        code = main(
            [
                "eval",
                "recon",
                "--checkpoint",
                str(workspace / "run_vae" / "best.pt"),
                "--corpus",
                str(workspace / "corpus"),
                "--n",
                "2",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        (rec,) = [json.loads(l) for l in out.read_text().splitlines()]
        assert rec["model"] == "vae"


class TestGradcheck:
    def test_passes(self, capsys):
        assert main(["gradcheck", "--n-params", "8"]) == 0
        assert "passed" in capsys.readouterr().out
