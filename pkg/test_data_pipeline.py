"""
Tests for manifest ingestion, alignment, cropping and the toy dataset
"""

import filecmp

import numpy as np
import pytest
import torch

from sketch_photo_recognition.config.settings import DataConfig
from sketch_photo_recognition.data import (
    Modality,
    PairedImageDataset,
    RecordImageDataset,
    SampleRecord,
    ToyDatasetSpec,
    align_image,
    center_crop,
    generate_toy_dataset,
    load_manifest,
    make_loader,
    random_crop,
    similarity_transform,
    sketch_transform,
    write_manifest,
)
from sketch_photo_recognition.data.images import apply_transform, buffer_to_uint8, uint8_to_buffer
from sketch_photo_recognition.utils.exception_handler import (
    AlignmentError,
    ConfigError,
    CropSizeError,
    ManifestError,
    PairingError,
    ToyDatasetSpecError,
)


def _write(tmp_path, lines, name="manifest.tsv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _line(identity, modality, path="img.png", left="10,20", right="30,20"):
    return "\t".join([identity, modality, path, left, right])


# manifests

def test_paired_manifest_has_one_pairing_per_identity(tmp_path):
    path = _write(tmp_path, [
        _line("A", "photo", "a_p.png"),
        _line("A", "sketch", "a_s.png"),
        _line("B", "photo", "b_p.png"),
        _line("B", "sketch", "b_s.png"),
    ])
    manifest = load_manifest(str(path))
    assert manifest.is_paired
    assert len(manifest.pairing) == 2
    photo, sketch = manifest.pairing["A"][0]
    assert photo.modality == Modality.PHOTO and sketch.modality == Modality.SKETCH
    assert photo.resolved_path == tmp_path / "a_p.png"


def test_two_photos_one_sketch_is_a_pairing_error(tmp_path):
    path = _write(tmp_path, [
        _line("A", "photo", "a1.png"),
        _line("A", "photo", "a2.png"),
        _line("A", "sketch", "a_s.png"),
    ])
    with pytest.raises(PairingError) as info:
        load_manifest(str(path))
    assert info.value.identity == "A"


def test_strict_mode_rejects_multiple_views(tmp_path):
    path = _write(tmp_path, [
        _line("A", "photo", "a1.png"),
        _line("A", "photo", "a2.png"),
        _line("A", "sketch", "s1.png"),
        _line("A", "sketch", "s2.png"),
    ])
    assert len(load_manifest(str(path)).pairing["A"]) == 2
    with pytest.raises(PairingError):
        load_manifest(str(path), one_to_one=True)


def test_photo_only_manifest_has_empty_pairing(tmp_path):
    path = _write(tmp_path, [_line(f"id{i}", "photo", f"{i}.png") for i in range(10)])
    manifest = load_manifest(str(path))
    assert not manifest.is_paired
    assert len(manifest.records) == 10


def test_malformed_line_names_line_number(tmp_path):
    path = _write(tmp_path, [
        "# comment",
        _line("A", "photo"),
        "A\tphoto\tonly-three-fields",
    ])
    with pytest.raises(ManifestError) as info:
        load_manifest(str(path))
    assert info.value.line_number == 3


def test_unknown_modality_is_rejected(tmp_path):
    path = _write(tmp_path, [_line("A", "painting")])
    with pytest.raises(ManifestError):
        load_manifest(str(path))


def test_eyes_are_ordered_left_to_right(tmp_path):
    path = _write(tmp_path, [_line("A", "photo", left="30,20", right="10,21")])
    record = load_manifest(str(path)).records[0]
    assert record.left_eye == (10.0, 21.0)
    assert record.right_eye == (30.0, 20.0)


def test_directly_built_records_order_their_eyes():
    record = SampleRecord("A", Modality.SKETCH, "a.png", (30.0, 20.0), (10.0, 21.0))
    assert record.left_eye == (10.0, 21.0)
    assert record.right_eye == (30.0, 20.0)
    assert record.left_eye[0] < record.right_eye[0]


def test_write_manifest_is_loadable(tmp_path):
    records = [
        SampleRecord("A", Modality.PHOTO, "a.png", (1.0, 2.0), (3.0, 2.0)),
        SampleRecord("A", Modality.SKETCH, "b.png", (1.0, 2.0), (3.0, 2.0)),
    ]
    path = tmp_path / "out.tsv"
    write_manifest(records, path, header="written by test")
    manifest = load_manifest(str(path))
    assert [r.image_path for r in manifest.records] == ["a.png", "b.png"]
    assert manifest.records[0].left_eye == (1.0, 2.0)


# alignment

def test_eyes_at_canonical_position_give_identity_transform():
    data = DataConfig()
    rng = np.random.default_rng(0)
    image = rng.uniform(-1, 1, size=(272, 272, 3)).astype(np.float32)
    left, right = data.canonical_eyes
    aligned = align_image(image, left, right, data.canonical_eyes, 272)
    np.testing.assert_array_equal(aligned, image)
    np.testing.assert_array_equal(center_crop(aligned, 256), center_crop(image, 256))


def test_swapped_eyes_land_on_canonical_coordinates():
    canonical = ((80.0, 95.0), (192.0, 95.0))
    source = ((180.0, 120.0), (70.0, 120.0))
    matrix = similarity_transform(source, canonical)
    for src, dst in zip(source, canonical):
        x, y = apply_transform(matrix, src)
        assert abs(x - dst[0]) < 1.0 and abs(y - dst[1]) < 1.0


def test_rotated_image_eye_pixels_follow_transform():
    size = 96
    image = np.full((size, size, 1), -1.0, dtype=np.float32)
    left, right = (30.0, 40.0), (60.0, 55.0)
    for x, y in (left, right):
        image[int(y) - 1:int(y) + 2, int(x) - 1:int(x) + 2] = 1.0
    canonical = ((32.0, 40.0), (64.0, 40.0))
    aligned = align_image(image, left, right, canonical, size)
    for x, y in canonical:
        assert aligned[int(round(y)), int(round(x)), 0] > 0.0


def test_zero_interocular_distance_is_an_alignment_error():
    with pytest.raises(AlignmentError):
        similarity_transform(((10.0, 10.0), (10.0, 10.0)), ((1.0, 1.0), (5.0, 1.0)))


def test_eye_outside_image_is_an_alignment_error():
    image = np.zeros((32, 32, 3), dtype=np.float32)
    with pytest.raises(AlignmentError):
        align_image(image, (5.0, 5.0), (40.0, 5.0), ((10.0, 10.0), (20.0, 10.0)), 32)


# cropping

def test_random_crop_is_deterministic_for_a_seed():
    image = np.random.default_rng(1).uniform(-1, 1, size=(272, 272, 3)).astype(np.float32)
    a = random_crop(image, 256, np.random.default_rng(42))
    b = random_crop(image, 256, np.random.default_rng(42))
    assert a.shape == (256, 256, 3)
    np.testing.assert_array_equal(a, b)


def test_full_size_crop_returns_the_input():
    image = np.random.default_rng(2).uniform(-1, 1, size=(272, 272, 1)).astype(np.float32)
    np.testing.assert_array_equal(random_crop(image, 272, np.random.default_rng(0)), image)


def test_oversized_crop_is_a_size_error():
    image = np.zeros((272, 272, 3), dtype=np.float32)
    with pytest.raises(CropSizeError):
        random_crop(image, 300, np.random.default_rng(0))
    with pytest.raises(CropSizeError):
        center_crop(image, 300)


def test_pixel_mapping_round_trips_every_byte():
    pixels = np.arange(256, dtype=np.uint8).reshape(16, 16)
    buffer = uint8_to_buffer(pixels)
    assert buffer.min() == -1.0 and buffer.max() == 1.0
    np.testing.assert_array_equal(buffer_to_uint8(buffer), pixels)


# toy dataset

def test_toy_dataset_counts(tmp_path):
    spec = ToyDatasetSpec(n_identities=32, images_per_identity=4, image_size=64, seed=7)
    manifest = generate_toy_dataset(spec, tmp_path / "toy")
    assert len(manifest.pairing) == 32
    assert len(manifest.records) == 256
    assert len(list((tmp_path / "toy" / "photos").iterdir())) == 128
    assert len(list((tmp_path / "toy" / "sketches").iterdir())) == 128


def test_toy_dataset_is_byte_identical_across_runs(tmp_path):
    spec = ToyDatasetSpec(n_identities=3, images_per_identity=2, image_size=32, seed=7)
    generate_toy_dataset(spec, tmp_path / "a")
    generate_toy_dataset(spec, tmp_path / "b")
    for sub in ("photos", "sketches"):
        comparison = filecmp.dircmp(tmp_path / "a" / sub, tmp_path / "b" / sub)
        assert not comparison.left_only and not comparison.right_only
        _, mismatch, errors = filecmp.cmpfiles(tmp_path / "a" / sub, tmp_path / "b" / sub,
                                               comparison.common_files, shallow=False)
        assert not mismatch and not errors
    assert (tmp_path / "a" / "manifest.tsv").read_bytes() == (tmp_path / "b" / "manifest.tsv").read_bytes()


def test_toy_manifest_loads_with_identical_pairing(tmp_path):
    spec = ToyDatasetSpec(n_identities=3, images_per_identity=2, image_size=32, seed=1)
    generated = generate_toy_dataset(spec, tmp_path / "toy")
    loaded = load_manifest(generated.path)
    assert loaded.identities == generated.identities
    assert [(p.image_path, s.image_path) for p, s in loaded.pairs()] == \
        [(p.image_path, s.image_path) for p, s in generated.pairs()]


def test_constant_photo_gives_edge_free_sketch():
    photo = np.full((32, 32, 3), 0.3, dtype=np.float32)
    sketch = sketch_transform(photo)
    assert sketch.shape == (32, 32, 1)
    np.testing.assert_array_equal(sketch, np.ones_like(sketch))


def test_single_identity_spec_is_rejected(tmp_path):
    with pytest.raises(ToyDatasetSpecError):
        generate_toy_dataset(ToyDatasetSpec(n_identities=1), tmp_path / "one")


def test_nonempty_output_needs_force(tmp_path):
    spec = ToyDatasetSpec(n_identities=2, image_size=32)
    generate_toy_dataset(spec, tmp_path / "toy")
    with pytest.raises(ConfigError):
        generate_toy_dataset(spec, tmp_path / "toy")
    manifest = generate_toy_dataset(spec, tmp_path / "toy", force=True)
    assert len(manifest.records) == 4


def test_identity_offset_and_photo_only(tmp_path):
    spec = ToyDatasetSpec(n_identities=2, image_size=32, identity_offset=40, photo_only=True)
    manifest = generate_toy_dataset(spec, tmp_path / "toy")
    assert manifest.identities == ["id00040", "id00041"]
    assert not manifest.is_paired
    assert not (tmp_path / "toy" / "sketches").exists()


# datasets

def test_paired_items_share_one_crop_window(tiny_pairs, tiny_config):
    dataset = PairedImageDataset(tiny_pairs, tiny_config.data, train=True, seed=0)
    photo, sketch, label = dataset[0]
    assert photo.shape == (3, 32, 32) and sketch.shape == (1, 32, 32)
    full_photo = dataset.cache.get(tiny_pairs.pairs()[0][0])
    full_sketch = dataset.cache.get(tiny_pairs.pairs()[0][1])
    size = tiny_config.data.image_size
    matches = [
        (top, left)
        for top in range(full_photo.shape[0] - size + 1)
        for left in range(full_photo.shape[1] - size + 1)
        if np.array_equal(full_photo[top:top + size, left:left + size].transpose(2, 0, 1), photo.numpy())
        and np.array_equal(full_sketch[top:top + size, left:left + size].transpose(2, 0, 1), sketch.numpy())
    ]
    assert matches
    assert label == dataset.class_index[tiny_pairs.pairs()[0][0].identity]


def test_training_crops_depend_only_on_seed_epoch_and_index(tiny_pairs, tiny_config):
    a = PairedImageDataset(tiny_pairs, tiny_config.data, train=True, seed=5)
    b = PairedImageDataset(tiny_pairs, tiny_config.data, train=True, seed=5)
    a.set_epoch(3)
    b.set_epoch(3)
    _ = b[1]
    torch.testing.assert_close(a[0][0], b[0][0], rtol=0, atol=0)


def test_evaluation_items_are_center_crops(tiny_photos, tiny_config):
    dataset = RecordImageDataset(tiny_photos.photos(), tiny_config.data, train=False)
    record = tiny_photos.photos()[0]
    expected = center_crop(dataset.cache.get(record), tiny_config.data.image_size)
    np.testing.assert_array_equal(dataset[0][0].numpy(), expected.transpose(2, 0, 1))


def test_loader_order_is_a_function_of_seed_and_epoch(tiny_photos, tiny_config):
    dataset = RecordImageDataset(tiny_photos.photos(), tiny_config.data, train=True, seed=1)
    first = [labels.tolist() for _, labels in make_loader(dataset, 3, seed=9, epoch=2)]
    second = [labels.tolist() for _, labels in make_loader(dataset, 3, seed=9, epoch=2)]
    assert first == second
