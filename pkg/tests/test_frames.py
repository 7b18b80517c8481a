import json
from datetime import datetime
from fractions import Fraction

import pytest

from fraudlens import (
    FrameManifest,
    Window,
    build_manifest,
    load_visualization,
    order_frames,
    save_visualization,
)
from fraudlens.frames import FrameEntry, canonical_digest, rankings_digest


class FakeRanking:
    def __init__(self, client_id, score):
        self.client_id = client_id
        self.score = Fraction(score)


RANKINGS = [FakeRanking("c2", Fraction(5, 3)), FakeRanking("c1", 1), FakeRanking("c3", 1)]
WINDOW = Window(datetime(2014, 1, 1), datetime(2014, 6, 30, 23, 59))


def test_canonical_digest_is_key_order_independent():
    assert canonical_digest({"a": 1, "b": [2, 3]}) == canonical_digest({"b": [2, 3], "a": 1})
    assert canonical_digest({"a": 1}) != canonical_digest({"a": 2})


def test_rankings_digest_tracks_scores_exactly():
    a = rankings_digest(RANKINGS)
    b = rankings_digest([FakeRanking("c2", Fraction(5, 3)), FakeRanking("c1", 1), FakeRanking("c3", 1)])
    assert a == b
    c = rankings_digest([FakeRanking("c2", Fraction(4, 3)), FakeRanking("c1", 1), FakeRanking("c3", 1)])
    assert a != c


def test_order_frames_default_keeps_ranking_order():
    assert [r.client_id for r in order_frames(RANKINGS)] == ["c2", "c1", "c3"]


def test_order_frames_override_prefixes():
    got = order_frames(RANKINGS, ["c3", "c1"])
    assert [r.client_id for r in got] == ["c3", "c1", "c2"]


def test_order_frames_override_errors():
    with pytest.raises(ValueError, match="twice"):
        order_frames(RANKINGS, ["c1", "c1"])
    with pytest.raises(ValueError, match="unknown client"):
        order_frames(RANKINGS, ["c9"])


def test_build_manifest_and_digest_stability():
    manifest = build_manifest(RANKINGS, WINDOW, "cfg123")
    assert [f.client_id for f in manifest.frames] == ["c2", "c1", "c3"]
    assert manifest.digest == build_manifest(RANKINGS, WINDOW, "cfg123").digest
    assert manifest.digest != build_manifest(RANKINGS, WINDOW, "cfg456").digest
    assert manifest.digest != build_manifest(RANKINGS, None, "cfg123").digest
    assert manifest.digest != build_manifest(RANKINGS, WINDOW, "cfg123", ["c1"]).digest


def test_manifest_digest_tracks_paths():
    manifest = build_manifest(RANKINGS, WINDOW, "cfg123")
    with_paths = manifest.with_paths({"c2": "frames/0001_c2.svg"})
    assert with_paths.digest != manifest.digest
    assert with_paths.frames[0].path == "frames/0001_c2.svg"
    assert with_paths.frames[1].path is None


def test_manifest_to_dict_shape():
    manifest = build_manifest(RANKINGS, WINDOW, "cfg123")
    doc = manifest.to_dict()
    assert doc["window"] == {"start": "2014-01-01T00:00", "end": "2014-06-30T23:59"}
    assert doc["config_digest"] == "cfg123"
    assert doc["digest"] == manifest.digest
    assert [f["index"] for f in doc["frames"]] == [0, 1, 2]
    assert doc["frames"][0]["score_exact"] == "5/3"
    assert doc["frames"][0]["score"] == pytest.approx(5 / 3)


def test_manifest_without_window():
    manifest = FrameManifest(None, "cfg", (FrameEntry("c1", Fraction(1)),))
    assert manifest.to_dict()["window"] is None
    assert isinstance(manifest.digest, str) and len(manifest.digest) == 64


def test_save_and_load_visualization(tmp_path):
    manifest = build_manifest(RANKINGS, WINDOW, "cfg123")
    path = tmp_path / "viz.json"
    save_visualization(path, manifest, {"c2": {"spiral": {"nodes": []}}})
    document = load_visualization(path)
    assert document["format"] == "fraudlens-visualization"
    assert document["version"] == 1
    assert document["manifest"]["digest"] == manifest.digest
    assert "c2" in document["layouts"]


def test_load_visualization_rejects_foreign_files(tmp_path):
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"format": "something-else"}), encoding="utf-8")
    with pytest.raises(ValueError, match="not a saved visualization"):
        load_visualization(path)
    path.write_text(json.dumps({"format": "fraudlens-visualization", "manifest": {}}), encoding="utf-8")
    with pytest.raises(ValueError, match="layouts"):
        load_visualization(path)
