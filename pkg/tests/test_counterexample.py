"""非連結な共通部分の反例シーンのテスト"""
import sys
from pathlib import Path

# srcをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np
import pytest
from hikari.core.models import CounterexampleScene
from hikari.geometry.diamonds import counterexample_scene


@pytest.fixture(scope="module")
def reports():
    """k = 0, 1, 3 の既定シーン"""
    return {k: counterexample_scene(CounterexampleScene(k=k)) for k in (0, 1, 3)}


@pytest.mark.parametrize("k", [0, 1, 3])
def test_x_slice_is_annulus(reports, k):
    """{y = z = 0} のスライスは k によらず円環 0.5 < |x| < 1"""
    report = reports[k]
    assert report.x_slice == (0.5, 1.0)
    assert report.x_slice_verified
    assert report.slices_dict()["x_slice_nonempty"]


def test_yz_plane_empty_iff_k_at_least_threshold(reports):
    """(y, z) 平面のスライスは λ⁻ᵏ ≤ r_inner で空"""
    assert not reports[0].yz_plane_empty
    assert reports[0].yz_sampled_points > 0
    for k in (1, 3):
        assert reports[k].yz_plane_empty
        assert reports[k].yz_sampled_points == 0
    assert all(report.threshold_k == 1 for report in reports.values())


def test_component_counts(reports):
    """k = 0 は1成分、k = 3 は2成分"""
    assert reports[0].components == 1
    assert reports[3].components == 2
    assert not reports[3].degenerate


def test_components_split_by_yz_plane(reports):
    """k = 3 の2成分は x の符号で分かれる"""
    report = reports[3]
    points = report.cloud.points
    labels = report.labels
    for label in (0, 1):
        signs = np.sign(points[labels == label, 0])
        assert abs(signs.sum()) == len(signs)


def test_report_dict(reports):
    """report.json の内容"""
    data = reports[3].to_dict()
    assert data["components"] == 2
    assert data["cloud_points"] == len(reports[3].cloud)
    assert data["parameters"]["lambda"] == 2.0
    assert data["threshold_k"] == 1


def test_scene_is_reproducible():
    """同じシードなら同じ点群"""
    scene = CounterexampleScene(k=2, samples=2000, seed=5)
    first = counterexample_scene(scene)
    second = counterexample_scene(scene)
    np.testing.assert_array_equal(first.cloud.points, second.cloud.points)
    assert first.components == second.components


def test_larger_lambda_lowers_threshold():
    """λ = 4, r_inner = 0.2 では閾値 k = 2"""
    report = counterexample_scene(CounterexampleScene(lam=4.0, k=1, r_inner=0.2, samples=500))
    assert report.threshold_k == 2
    assert not report.yz_plane_empty
