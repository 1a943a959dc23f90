"""
End-to-end runs of the salatt command line on a small generated toy task.

Fast tests use a few dozen samples and a handful of iterations; the
learnability runs on the default toy task are marked slow.
"""

from pathlib import Path

import pytest

from salatt.main import main
from salatt.services.visualization_service import read_pgm

pytestmark = pytest.mark.integration

TOY_FILES = ("features.bin", "train.jsonl", "val.jsonl", "questions.txt")

# Shrinks the toy model so that a training run takes well under a second
SMALL_MODEL = ["--set", "d_i=8", "--set", "hidden=6", "--set", "d_c=8", "--set", "batch_size=4", "--set", "eval_every=2"]


def parse_output(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for line in text.splitlines():
        key, sep, value = line.partition("=")
        if sep and " " not in key:
            values[key] = value
    return values


def run_cli(capsys, *argv: str) -> tuple[int, dict[str, str], str]:
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, parse_output(captured.out), captured.err


def gen_toy(capsys, out: Path, seed: int = 3) -> dict[str, str]:
    code, values, _ = run_cli(
        capsys, "gen-toy", "--output-dir", out, "--seed", seed, "--train-size", 40, "--val-size", 12, "--d-i", 8
    )
    assert code == 0
    return values


@pytest.fixture
def toy_dir(tmp_path: Path, capsys) -> Path:
    out = tmp_path / "toy"
    gen_toy(capsys, out)
    return out


def train(capsys, toy_dir: Path, run_dir: Path, *extra: str) -> tuple[int, dict[str, str], str]:
    return run_cli(
        capsys,
        "train",
        "--data-dir",
        toy_dir,
        "--checkpoint",
        run_dir / "best.ckpt",
        "--metrics",
        run_dir / "metrics.csv",
        "--max-iterations",
        4,
        *SMALL_MODEL,
        *extra,
    )


class TestGenToy:
    def test_writes_the_task_files(self, tmp_path: Path, capsys):
        values = gen_toy(capsys, tmp_path / "toy")

        for name in TOY_FILES:
            assert (tmp_path / "toy" / name).exists()
        assert values["train"] == "40"
        assert values["val"] == "12"
        assert values["regions"] == "9"
        assert float(values["majority_baseline"]) <= 0.5

    def test_same_seed_gives_byte_identical_files(self, tmp_path: Path, capsys):
        first = gen_toy(capsys, tmp_path / "a")
        second = gen_toy(capsys, tmp_path / "b")

        for name in TOY_FILES:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        assert {k: v for k, v in first.items() if k != "output_dir"} == {k: v for k, v in second.items() if k != "output_dir"}

    def test_other_seed_other_features(self, tmp_path: Path, capsys):
        gen_toy(capsys, tmp_path / "a", seed=3)
        gen_toy(capsys, tmp_path / "b", seed=4)

        assert (tmp_path / "a" / "features.bin").read_bytes() != (tmp_path / "b" / "features.bin").read_bytes()


class TestTrainAndEval:
    def test_eval_reproduces_the_best_validation_accuracy(self, toy_dir: Path, tmp_path: Path, capsys):
        # Arrange
        code, trained, _ = train(capsys, toy_dir, tmp_path / "run")
        assert code == 0

        # Act
        code, evaluated, _ = run_cli(
            capsys, "eval", "--data-dir", toy_dir, "--checkpoint", tmp_path / "run" / "best.ckpt", *SMALL_MODEL
        )

        # Assert
        assert code == 0
        assert evaluated["vqa_accuracy"] == trained["best_val_vqa_acc"]
        assert evaluated["count"] == "12"
        assert (tmp_path / "run" / "metrics.csv").exists()

    def test_same_seed_same_checkpoint_and_metrics(self, toy_dir: Path, tmp_path: Path, capsys):
        train(capsys, toy_dir, tmp_path / "a")
        train(capsys, toy_dir, tmp_path / "b")

        assert (tmp_path / "a" / "best.ckpt").read_bytes() == (tmp_path / "b" / "best.ckpt").read_bytes()

        def without_seconds(path: Path) -> list[str]:
            return [line.rsplit(",", 1)[0] for line in path.read_text(encoding="utf-8").splitlines()]

        assert without_seconds(tmp_path / "a" / "metrics.csv") == without_seconds(tmp_path / "b" / "metrics.csv")

    def test_zero_iterations_evaluates_the_initial_parameters(self, toy_dir: Path, tmp_path: Path, capsys):
        code, trained, _ = train(capsys, toy_dir, tmp_path / "run", "--max-iterations", "0")

        assert code == 0
        assert trained["iterations"] == "0"
        assert trained["best_iteration"] == "0"
        assert len((tmp_path / "run" / "metrics.csv").read_text(encoding="utf-8").splitlines()) == 2

    @pytest.mark.parametrize("variant", ["SalAtt", "Holistic", "TraAtt", "RegAtt", "ConAtt"])
    def test_every_variant_trains(self, toy_dir: Path, tmp_path: Path, capsys, variant):
        code, trained, _ = train(capsys, toy_dir, tmp_path / variant, "--variant", variant)

        assert code == 0
        assert trained["variant"] == variant

    def test_unknown_variant_is_a_usage_error(self, toy_dir: Path, tmp_path: Path, capsys):
        with pytest.raises(SystemExit) as exc_info:
            train(capsys, toy_dir, tmp_path / "run", "--variant", "Fancy")

        assert exc_info.value.code == 2

    def test_checkpoint_from_another_width_is_rejected(self, toy_dir: Path, tmp_path: Path, capsys):
        # Arrange
        train(capsys, toy_dir, tmp_path / "run")

        # Act
        code, _, err = run_cli(
            capsys,
            "eval",
            "--data-dir",
            toy_dir,
            "--checkpoint",
            tmp_path / "run" / "best.ckpt",
            *SMALL_MODEL,
            "--set",
            "d_c=12",
        )

        # Assert
        assert code == 2
        assert "(12, 8)" in err
        assert "(8, 8)" in err

    def test_missing_data_is_reported_on_one_line(self, tmp_path: Path, capsys):
        code, _, err = train(capsys, tmp_path / "absent", tmp_path / "run")

        assert code == 2
        assert [line for line in err.splitlines() if line.startswith("error:")] == [
            f"error: features_path does not exist: {tmp_path / 'absent' / 'features.bin'}"
        ]


class TestGradcheck:
    def test_one_variant_passes(self, capsys):
        code, values, _ = run_cli(capsys, "gradcheck", "--variant", "SalAtt")

        assert code == 0
        assert values["failed"] == "0"
        assert float(values["worst"]) < 1e-4

    def test_injected_fault_fails(self, capsys):
        code, values, err = run_cli(capsys, "gradcheck", "--variant", "RegAtt", "--inject-fault", "linear")

        assert code == 1
        assert int(values["failed"]) > 0
        assert "exceed tolerance" in err


class TestVisualize:
    def test_writes_three_by_three_maps(self, toy_dir: Path, tmp_path: Path, capsys):
        # Arrange
        train(capsys, toy_dir, tmp_path / "run")

        # Act
        code, values, _ = run_cli(
            capsys,
            "visualize",
            "--sample",
            0,
            "--data-dir",
            toy_dir,
            "--checkpoint",
            tmp_path / "run" / "best.ckpt",
            "--output-dir",
            tmp_path / "maps",
            *SMALL_MODEL,
        )

        # Assert
        assert code == 0
        assert read_pgm(Path(values["attention_map"])).shape == (3, 3)
        assert read_pgm(Path(values["preselect_map"])).shape == (3, 3)
        assert values["region.0"] == "0,0,224,224"
        assert sum(float(w) for w in values["attention_weights"].split(",")) == pytest.approx(1.0)

    def test_sample_out_of_range(self, toy_dir: Path, tmp_path: Path, capsys):
        train(capsys, toy_dir, tmp_path / "run")

        code, _, _ = run_cli(
            capsys,
            "visualize",
            "--sample",
            12,
            "--data-dir",
            toy_dir,
            "--checkpoint",
            tmp_path / "run" / "best.ckpt",
            *SMALL_MODEL,
        )

        assert code == 1


@pytest.mark.slow
class TestLearnability:
    """Default toy task: P=4, Q=2, 2000 train and 200 val samples."""

    @pytest.fixture
    def default_toy(self, tmp_path: Path, capsys) -> Path:
        out = tmp_path / "default"
        code, _, _ = run_cli(capsys, "gen-toy", "--output-dir", out, "--seed", 42)
        assert code == 0
        return out

    @pytest.mark.parametrize("variant", ["SalAtt", "RegAtt"])
    def test_attention_variants_reach_ninety_percent(self, default_toy: Path, tmp_path: Path, capsys, variant):
        code, trained, _ = run_cli(
            capsys,
            "train",
            "--data-dir",
            default_toy,
            "--variant",
            variant,
            "--checkpoint",
            tmp_path / "best.ckpt",
            "--metrics",
            tmp_path / "metrics.csv",
        )

        assert code == 0
        assert float(trained["best_val_vqa_acc"]) >= 0.90

    def test_every_variant_beats_the_majority_baseline(self, default_toy: Path, capsys):
        code = main(["compare", "--data-dir", str(default_toy), "--seeds", "3"])
        lines = [parse_line(line) for line in capsys.readouterr().out.splitlines()]

        assert code == 0
        assert len(lines) == 5
        for line in lines:
            assert float(line["margin"]) >= 0.15, line

    def test_pooling_loses_to_saliency_under_heavy_noise(self, tmp_path: Path, capsys):
        out = tmp_path / "noisy"
        run_cli(capsys, "gen-toy", "--output-dir", out, "--seed", 42, "--noise", 1.5)

        code = main(["compare", "--data-dir", str(out), "--variants", "Holistic,SalAtt", "--seeds", "5"])
        scores = {line["variant"]: float(line["vqa_accuracy"]) for line in map(parse_line, capsys.readouterr().out.splitlines())}

        assert code == 0
        assert scores["Holistic"] < scores["SalAtt"]


def parse_line(line: str) -> dict[str, str]:
    return dict(field.split("=", 1) for field in line.split())
