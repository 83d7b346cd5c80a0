"""
End-to-end toy runs at the toy preset scale (slow; SKETCHREC_RUN_SLOW=1)
"""

import csv

import numpy as np
import pytest
import torch

from sketch_photo_recognition.cli import main
from sketch_photo_recognition.data import load_manifest
from sketch_photo_recognition.evaluation import cosine_distances, encode_records
from sketch_photo_recognition.training import Checkpoint, read_loss_log

pytestmark = pytest.mark.slow

# chance for a 12-mate gallery is 1/12
RANK1_FLOOR = 0.60
# allowed shortfall when one training variant should beat another
SLACK = 0.02


@pytest.fixture(scope="module")
def toy_data(tmp_path_factory):
    root = tmp_path_factory.mktemp("toy")
    sets = {
        "pairs": ["--identities", "32", "--seed", "7"],
        "photos": ["--identities", "200", "--seed", "8", "--identity-offset", "1000", "--photo-only"],
        "target": ["--identities", "32", "--seed", "9", "--identity-offset", "5000"],
    }
    for name, extra in sets.items():
        assert main(["gen-data", "--per-id", "4", "--size", "64", "--output", str(root / name), *extra]) == 0
    return root


def _toy_args(toy_data, output_dir):
    return [
        "--preset", "toy",
        "--set", f"data.paired_manifest={toy_data / 'pairs' / 'manifest.tsv'}",
        "--set", f"data.photo_manifest={toy_data / 'photos' / 'manifest.tsv'}",
        "--set", f"data.target_manifest={toy_data / 'target' / 'manifest.tsv'}",
        "--output-dir", str(output_dir),
    ]


@pytest.fixture(scope="module")
def pretrained(toy_data, tmp_path_factory):
    """Output directory of one toy run of steps 1 and 2."""
    output_dir = tmp_path_factory.mktemp("pretrain")
    assert main(["train", "--step", "1,2", *_toy_args(toy_data, output_dir)]) == 0
    return output_dir


def _rank1_by_value(toy_data, output_dir, param, values):
    args = ["sweep", "--param", param, "--values", values, *_toy_args(toy_data, output_dir)]
    assert main(args) == 0
    with (output_dir / "sweep" / "comparison.csv").open(newline="", encoding="utf-8") as handle:
        return {row["value"]: float(row["rank1_mean"]) for row in csv.DictReader(handle)}


def test_synthesis_losses_fall_during_step1(pretrained):
    rows = read_loss_log(pretrained / "losses_step1.csv")
    per_epoch = len(rows) // 50
    window = 5 * per_epoch
    first = np.median([r["L_s"] for r in rows[:window]])
    last = np.median([r["L_s"] for r in rows[-window:]])
    assert last < first


def test_step1_codes_group_by_identity(toy_data, pretrained):
    model = Checkpoint.load(pretrained / "step1.pt").model
    pairs = load_manifest(str(toy_data / "pairs" / "manifest.tsv")).pairs()
    photos = encode_records([photo for photo, _ in pairs], model)
    sketches = encode_records([sketch for _, sketch in pairs], model)
    labels = np.array([photo.identity for photo, _ in pairs])

    distances = np.stack([cosine_distances(code, photos) for code in sketches])
    same = labels[:, None] == labels[None, :]
    assert distances[same].mean() < distances[~same].mean()


def test_step2_learns_the_photo_identities(toy_data, pretrained):
    model = Checkpoint.load(pretrained / "step2.pt").model
    photos = load_manifest(str(toy_data / "photos" / "manifest.tsv")).photos()
    class_index = {identity: i for i, identity in enumerate(sorted({r.identity for r in photos}))}
    codes = torch.from_numpy(encode_records(photos, model)).float()
    predicted = model.adacos.predict(codes).numpy()
    expected = np.array([class_index[r.identity] for r in photos])
    assert (predicted == expected).mean() > 0.90


def test_three_step_toy_recognition(toy_data, tmp_path):
    assert main(["eval", *_toy_args(toy_data, tmp_path)]) == 0
    with (tmp_path / "eval" / "cmc.csv").open(newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 12
    assert float(rows[0]["mean"]) >= RANK1_FLOOR
    assert float(rows[-1]["mean"]) == 1.0


def test_pretraining_steps_each_help(toy_data, tmp_path):
    rank1 = _rank1_by_value(toy_data, tmp_path, "eval.steps", "[1,2,3];[2,3];[3]")
    assert rank1["1+2+3"] >= rank1["2+3"] - SLACK
    assert rank1["2+3"] >= rank1["3"] - SLACK


def test_collaborative_loss_helps(toy_data, tmp_path):
    rank1 = _rank1_by_value(toy_data, tmp_path, "train.step3.weights.lambda_w", "1,0")
    assert rank1["1"] >= rank1["0"] - SLACK


def test_bidirectional_synthesis_helps(toy_data, tmp_path):
    rank1 = _rank1_by_value(toy_data, tmp_path, "model.synthesis",
                            "bidirectional,photo2sketch,sketch2photo,none")
    for one_way in ("photo2sketch", "sketch2photo"):
        assert rank1["bidirectional"] >= rank1[one_way] - SLACK
        assert rank1[one_way] >= rank1["none"] - SLACK
