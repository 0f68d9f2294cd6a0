import numpy as np
import pytest

from fuseval.errors import (
    DanglingPath,
    DimensionMismatch,
    DuplicatePairId,
    SchemaViolation,
    UnalignedPair,
)
from fuseval.images import save_image
from fuseval.manifest import (
    DatasetManifest,
    ImagePair,
    ManifestEntry,
    Scenario,
    parse_manifest,
    serialize_manifest,
    write_manifest,
)


def entry_yaml(pair_id, scenario="Daytime", annotation=None, aligned=True):
    lines = [
        f"  - pair_id: \"{pair_id}\"",
        f"    scenario: {scenario}",
        f"    visible: vis/{pair_id}.png",
        f"    infrared: ir/{pair_id}.png",
    ]
    if annotation:
        lines.append(f"    annotation: {annotation}")
    lines.append(f"    aligned: {'true' if aligned else 'false'}")
    return "\n".join(lines)


def write_yaml(tmp_path, body):
    path = tmp_path / "manifest.yaml"
    path.write_text(body)
    return path


def test_scenario_counts_match_dataset_summary(tmp_path):
    # 159 Daytime + 80 Nighttime annotated entries, like the campus dataset
    (tmp_path / "labels").mkdir()
    entries = []
    for i in range(159 + 80):
        pid = f"{i:06d}"
        scenario = "Daytime" if i < 159 else "Nighttime"
        ann = f"labels/{pid}.txt"
        (tmp_path / ann).write_text("0 0.5 0.5 0.5 0.5\n")
        entries.append(entry_yaml(pid, scenario, annotation=ann))
    body = "schema_version: 1\nname: campus\nentries:\n" + "\n".join(entries) + "\n"
    manifest = parse_manifest(write_yaml(tmp_path, body))
    assert manifest.scenario_counts() == {"Daytime": 159, "Nighttime": 80}
    assert len(manifest.annotated_entries()) == 239
    assert len(manifest.annotated_entries(Scenario.DAYTIME)) == 159


def test_empty_entries_valid(tmp_path):
    manifest = parse_manifest(write_yaml(tmp_path, "schema_version: 1\nname: empty\nentries: []\n"))
    assert manifest.entries == []
    assert manifest.scenario_counts() == {}


def test_duplicate_pair_id(tmp_path):
    body = ("schema_version: 1\nname: dup\nentries:\n"
            + entry_yaml("a") + "\n" + entry_yaml("a") + "\n")
    with pytest.raises(DuplicatePairId):
        parse_manifest(write_yaml(tmp_path, body))


def test_unsupported_schema_version(tmp_path):
    with pytest.raises(SchemaViolation):
        parse_manifest(write_yaml(tmp_path, "schema_version: 99\nname: x\nentries: []\n"))


def test_missing_required_key(tmp_path):
    with pytest.raises(SchemaViolation):
        parse_manifest(write_yaml(tmp_path, "name: x\nentries: []\n"))


def test_annotated_entry_requires_annotation_file(tmp_path):
    body = ("schema_version: 1\nname: x\nentries:\n"
            + entry_yaml("a", annotation="labels/a.txt") + "\n")
    with pytest.raises(DanglingPath):
        parse_manifest(write_yaml(tmp_path, body))


def test_unknown_scenario(tmp_path):
    body = "schema_version: 1\nname: x\nentries:\n" + entry_yaml("a", scenario="Foggy") + "\n"
    with pytest.raises(SchemaViolation):
        parse_manifest(write_yaml(tmp_path, body))


def test_roundtrip_is_semantically_equal(tmp_path):
    (tmp_path / "labels").mkdir()
    (tmp_path / "labels/a.txt").write_text("0 0.5 0.5 0.5 0.5\n")
    body = ("schema_version: 1\nname: rt\nentries:\n"
            + entry_yaml("a", annotation="labels/a.txt") + "\n"
            + entry_yaml("b", scenario="Smoke", aligned=False) + "\n"
            + "fused_dirs:\n  algoA: fused/a\n  algoB: fused/b\n")
    manifest = parse_manifest(write_yaml(tmp_path, body))
    write_manifest(manifest, tmp_path / "again.yaml")
    reparsed = parse_manifest(tmp_path / "again.yaml")
    assert reparsed.name == manifest.name
    assert reparsed.entries == manifest.entries
    assert reparsed.fused_dirs == manifest.fused_dirs
    # serializing the reparse reproduces the same text
    assert serialize_manifest(reparsed) == serialize_manifest(manifest)


def test_paths_resolve_relative_to_manifest(tmp_path):
    sub = tmp_path / "data"
    sub.mkdir()
    manifest = parse_manifest(write_yaml(sub, "schema_version: 1\nname: x\nentries: []\n"
                                              "fused_dirs:\n  m: fused/m\n"))
    assert manifest.fused_path("m", "p1") == str(sub / "fused/m/p1.png")
    with pytest.raises(SchemaViolation):
        manifest.fused_path("unknown", "p1")


def test_load_pair_refuses_unaligned(tmp_path, rng):
    save_image(rng.integers(0, 255, (8, 8, 3), dtype=np.uint8), tmp_path / "vis/a.png")
    save_image(rng.integers(0, 255, (8, 8), dtype=np.uint8), tmp_path / "ir/a.png")
    body = "schema_version: 1\nname: x\nentries:\n" + entry_yaml("a", aligned=False) + "\n"
    manifest = parse_manifest(write_yaml(tmp_path, body))
    with pytest.raises(UnalignedPair):
        manifest.load_pair(manifest.entry("a"))
    pair = manifest.load_pair(manifest.entry("a"), require_aligned=False)
    assert pair.visible.shape == (8, 8, 3)
    assert pair.infrared.shape == (8, 8)


def test_image_pair_dimension_check(rng):
    with pytest.raises(DimensionMismatch):
        ImagePair(
            visible=rng.integers(0, 255, (8, 8, 3), dtype=np.uint8),
            infrared=rng.integers(0, 255, (8, 9), dtype=np.uint8),
            pair_id="x",
            scenario=Scenario.OTHER,
        )


def test_manifest_entry_annotated_property():
    e = ManifestEntry("a", Scenario.OTHER, "v.png", "i.png")
    assert not e.annotated
    e2 = ManifestEntry("a", Scenario.OTHER, "v.png", "i.png", annotation_path="a.txt")
    assert e2.annotated


def test_queryable_helpers():
    m = DatasetManifest(name="q", entries=[
        ManifestEntry("a", Scenario.DAYTIME, "v", "i"),
        ManifestEntry("b", Scenario.SMOKE, "v", "i"),
    ])
    assert m.pair_ids() == ["a", "b"]
    assert m.entry("b").scenario is Scenario.SMOKE
    with pytest.raises(KeyError):
        m.entry("zzz")
