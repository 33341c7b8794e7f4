import json

import numpy as np
import pytest

from lifted_axle.annotations import (
    AxleCountTable,
    DatasetManifest,
    ManifestEntry,
    axle_counts_from_instances,
    build_training_config,
    emit_training_config,
    parse_detection_labels,
    parse_segmentation_labels,
    split_dataset,
    summarize_dataset,
    write_labels,
)
from lifted_axle.core import GroundTruthInstance
from lifted_axle.geometry import BoundingBox, PolygonMask
from lifted_axle.utils import (
    DatasetError,
    InputNotFoundError,
    LabelParseError,
    LabelSerializationError,
    TrainingConfigError,
)


def test_parse_detection_line():
    (inst,) = parse_detection_labels("0 0.5 0.5 0.2 0.1", 640, 640)
    assert inst.class_id == 0
    assert inst.box.as_tuple() == pytest.approx((256, 288, 384, 352))


def test_empty_text_yields_no_instances():
    assert parse_detection_labels("", 640, 640) == []
    assert parse_segmentation_labels("\n\n", 640, 640) == []


def test_parse_segmentation_line():
    (inst,) = parse_segmentation_labels("0 0.0 0.0 1.0 0.0 1.0 1.0", 100, 100)
    assert inst.mask.vertices == ((0, 0), (100, 0), (100, 100))
    assert inst.box.as_tuple() == (0, 0, 100, 100)


@pytest.mark.parametrize("text,line,fragment", [
    ("0 0.5 0.5 0.2", 1, "wrong field count"),
    ("0 0.5 0.5 0.2 0.1\n1 0.5 abc 0.2 0.1", 2, "non-numeric"),
    ("0 0.5 0.5 1.2 0.1", 1, "outside [0, 1]"),
    ("\n\n7 0.5 0.5 0.2 0.1", 3, "unknown class"),
    ("x 0.5 0.5 0.2 0.1", 1, "not an integer"),
    ("0 0.9 0.5 0.5 0.2", 1, "outside the image"),
    ("0 0.0 0.5 1.0 0.2", 1, "outside the image"),
])
def test_malformed_detection_lines_name_the_line(text, line, fragment):
    with pytest.raises(LabelParseError) as err:
        parse_detection_labels(text, 640, 640)
    assert err.value.line == line
    assert fragment in err.value.reason


@pytest.mark.parametrize("text,fragment", [
    ("0 0.1 0.2 0.3", "odd coordinate count"),
    ("0 0.1 0.2 0.3 0.4", "at least 3 vertices"),
    ("0 0.1 0.2 0.3 0.4 0.5 -0.1", "outside [0, 1]"),
    ("3 0.1 0.2 0.3 0.4 0.5 0.6", "unknown class"),
])
def test_malformed_segmentation_lines(text, fragment):
    with pytest.raises(LabelParseError) as err:
        parse_segmentation_labels(text, 100, 100)
    assert err.value.line == 1
    assert fragment in err.value.reason


def test_box_at_the_image_edge_survives_rounding():
    (inst,) = parse_detection_labels("1 0.000001 0.500000 0.000003 0.200000", 1280, 720)
    assert inst.box.x_min == 0.0
    (back,) = parse_detection_labels(write_labels([inst], 1280, 720), 1280, 720)
    assert back.class_id == 1
    assert back.box.x_min == 0.0
    assert abs(back.box.x_max - inst.box.x_max) <= 1280e-6


def test_write_detection_label():
    inst = GroundTruthInstance(0, BoundingBox(256, 288, 384, 352))
    assert write_labels([inst], 640, 640) == "0 0.500000 0.500000 0.200000 0.100000\n"
    assert write_labels([], 640, 640) == ""


def test_write_rejects_geometry_outside_image():
    with pytest.raises(LabelSerializationError):
        write_labels([GroundTruthInstance(0, BoundingBox(600, 0, 700, 10))], 640, 640)


def test_label_round_trip_random_instances():
    rng = np.random.default_rng(11)
    w, h = 1280, 720
    for _ in range(200):
        x0, x1 = sorted(rng.uniform(0, w, size=2))
        y0, y1 = sorted(rng.uniform(0, h, size=2))
        boxes = [GroundTruthInstance(int(rng.integers(0, 2)), BoundingBox(x0, y0, x1, y1))]
        (back,) = parse_detection_labels(write_labels(boxes, w, h), w, h)
        assert back.class_id == boxes[0].class_id
        for got, want, extent in zip(back.box.as_tuple(), boxes[0].box.as_tuple(), (w, h, w, h)):
            assert abs(got - want) / extent <= 1e-6

        pts = tuple((float(x), float(y)) for x, y in rng.uniform(0, [w, h], size=(int(rng.integers(3, 8)), 2)))
        polys = [GroundTruthInstance(0, PolygonMask(pts))]
        (poly_back,) = parse_segmentation_labels(write_labels(polys, w, h), w, h)
        for (gx, gy), (wx, wy) in zip(poly_back.mask.vertices, pts):
            assert abs(gx - wx) / w <= 1e-6 and abs(gy - wy) / h <= 1e-6


def _manifest(n: int) -> DatasetManifest:
    return DatasetManifest(tuple(ManifestEntry(f"img_{i:04d}", 640, 480, f"labels/img_{i:04d}.txt")
                                 for i in range(n)))


def test_split_counts():
    assert split_dataset(_manifest(10), 0.8, seed=1).split_counts() == {"train": 8, "val": 2, "unassigned": 0}
    assert split_dataset(_manifest(810), 0.8, seed=0).split_counts()["train"] == 648


def test_split_is_deterministic_and_order_independent():
    m = _manifest(50)
    a = split_dataset(m, 0.8, seed=7)
    b = split_dataset(m.with_entries(reversed(m.entries)), 0.8, seed=7)
    tags = lambda manifest: {e.image_id: e.split for e in manifest.entries}
    assert tags(a) == tags(b)
    assert tags(split_dataset(m, 0.8, seed=8)) != tags(a)


def test_split_errors():
    with pytest.raises(DatasetError):
        split_dataset(_manifest(0))
    split = split_dataset(_manifest(5), 0.8)
    with pytest.raises(DatasetError):
        split_dataset(split, 0.8)
    assert split_dataset(split, 0.6, reassign=True).split_counts()["train"] == 3


def test_manifest_json_forms(tmp_path):
    bare = [{"image_id": "a", "width": 10, "height": 10, "label_path": "a.txt", "source": "Brazil"}]
    m = DatasetManifest.from_json(json.dumps(bare))
    assert m.entries[0].source == "Brazil"
    assert m.to_obj() == [{**bare[0], "split": "unassigned"}]

    wrapped = {"class_map": {"0": "lifted_axle"}, "entries": bare}
    m2 = DatasetManifest.from_json(json.dumps(wrapped))
    assert m2.class_map == {0: "lifted_axle"}
    assert json.loads(m2.to_json())["class_map"] == {"0": "lifted_axle"}

    with pytest.raises(DatasetError):
        DatasetManifest.from_json(json.dumps(bare + bare))
    with pytest.raises(DatasetError):
        DatasetManifest.from_json(json.dumps([{"image_id": "a", "width": 0, "height": 1, "label_path": "x"}]))
    with pytest.raises(InputNotFoundError):
        DatasetManifest.load(tmp_path / "missing.json")


def test_load_ground_truth_reports_bad_label_file(tmp_path):
    (tmp_path / "a.txt").write_text("0 0.5 0.5 0.2\n", encoding="utf-8")
    m = DatasetManifest((ManifestEntry("a", 100, 100, "a.txt"),), root=tmp_path)
    with pytest.raises(DatasetError, match="line 1"):
        m.load_ground_truth()


def _truck_with_axles(k: int, image_id: str):
    out = [GroundTruthInstance(0, BoundingBox(0, 0, 100 * k, 100), image_id)]
    out += [GroundTruthInstance(1, BoundingBox(100 * j + 10, 60, 100 * j + 90, 100), image_id) for j in range(k)]
    return out


def test_axle_counts_from_instances():
    instances = _truck_with_axles(5, "x")
    assert axle_counts_from_instances(instances) == [5]


def test_summarize_counts_by_source_and_axles():
    entries, counts = [], {}
    for i in range(30):
        image_id = f"t{i}"
        entries.append(ManifestEntry(image_id, 1000, 200, f"{image_id}.txt", source="synthetic"))
        counts[image_id] = axle_counts_from_instances(_truck_with_axles(3 if i < 20 else 5, image_id))
    table = summarize_dataset(DatasetManifest(tuple(entries)), counts)
    assert table.row("synthetic") == {3: 20, 5: 10}
    assert table.trucks("synthetic") == 30


def test_summary_table_rendering():
    table = AxleCountTable()
    for axles, n in zip(range(3, 10), (20, 8, 10, 11, 2, 0, 1)):
        if n:
            table.add("Brazil", axles, n)
    assert table.row("Brazil") == {3: 20, 4: 8, 5: 10, 6: 11, 7: 2, 9: 1}
    md = table.to_markdown()
    assert "| Brazil (52 trucks) | - | 20 | 8 | 10 | 11 | 2 | - | 1 |" in md
    assert table.to_csv().splitlines()[1] == "Brazil,0,20,8,10,11,2,0,1"


def test_empty_manifest_summary_is_all_zero():
    table = summarize_dataset(DatasetManifest(()), {})
    assert table.total == 0
    assert table.to_dict()["rows"] == {}


def test_training_defaults():
    det = build_training_config("detection").to_dict()
    assert det == {"epochs": 400, "batch": 3, "optimizer": "AdamW", "lr0": 0.01,
                   "scale": 0.5, "fliplr": 0.5, "shear": 0.5}
    seg = build_training_config("segmentation").to_dict()
    assert seg["batch"] == 32 and "shear" not in seg


def test_training_overrides():
    cfg = build_training_config("detection", {"epochs": 1})
    assert cfg.epochs == 1 and cfg.batch_size == 3
    with pytest.raises(TrainingConfigError):
        build_training_config("detection", {"lr0": 0})
    with pytest.raises(TrainingConfigError):
        build_training_config("detection", {"epochs": -5})
    with pytest.raises(TrainingConfigError):
        build_training_config("classification")


def test_emitted_training_text():
    assert emit_training_config("segmentation") == (
        "epochs: 400\nbatch: 32\noptimizer: AdamW\nlr0: 0.01\nscale: 0.5\nfliplr: 0.5\n")


def test_manifest_rebases_label_paths(tmp_path):
    entries = (ManifestEntry("a", 640, 480, "labels/a.txt"), ManifestEntry("b", 640, 480, str(tmp_path / "b.txt")))
    manifest = DatasetManifest(entries, root=tmp_path / "data")
    paths = [e["label_path"] for e in manifest.to_obj(tmp_path / "out")]
    assert paths == ["../data/labels/a.txt", str(tmp_path / "b.txt")]
    assert [e["label_path"] for e in manifest.to_obj(tmp_path / "data")][0] == "labels/a.txt"
    assert DatasetManifest(entries).to_obj(tmp_path / "out")[0]["label_path"] == "labels/a.txt"
