"""
Shared fixtures: the tiny preset and small procedural datasets.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))

from sketch_photo_recognition.config.settings import ConfigLoader  # noqa: E402
from sketch_photo_recognition.data.toy_dataset import ToyDatasetSpec, generate_toy_dataset  # noqa: E402

RUN_SLOW = os.getenv("SKETCHREC_RUN_SLOW") == "1"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end toy runs, enabled with SKETCHREC_RUN_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip_slow = pytest.mark.skip(reason="set SKETCHREC_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tiny_config(tmp_path):
    return ConfigLoader.load(preset="tiny", overrides=[f"output_dir={tmp_path / 'runs'}"])


@pytest.fixture(scope="session")
def tiny_pairs(tmp_path_factory):
    """6 identities × 2 views of 32-px photo/sketch pairs."""
    spec = ToyDatasetSpec(n_identities=6, images_per_identity=2, image_size=32, seed=3)
    return generate_toy_dataset(spec, tmp_path_factory.mktemp("pairs"))


@pytest.fixture(scope="session")
def tiny_photos(tmp_path_factory):
    """Photo-only identities disjoint from the pairs."""
    spec = ToyDatasetSpec(n_identities=5, images_per_identity=2, image_size=32, seed=4,
                          identity_offset=100, photo_only=True)
    return generate_toy_dataset(spec, tmp_path_factory.mktemp("photos"))


@pytest.fixture(scope="session")
def tiny_target(tmp_path_factory):
    """8 target identities, one pair each."""
    spec = ToyDatasetSpec(n_identities=8, images_per_identity=1, image_size=32, seed=5, identity_offset=500)
    return generate_toy_dataset(spec, tmp_path_factory.mktemp("target"))
