"""影・正則領域・過去の再構成・強凸性・因果曲線の終点の単体テスト"""
import json
import math
import sys
from pathlib import Path

# srcをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hikari.core.errors import PreconditionError, SchemaError
from hikari.core.models import (
    BoundaryData,
    ChartPoint,
    Membership,
    NullHyperplaneCoords,
    Orientation,
    RelationTag,
    UniPoint,
)
from hikari.geometry import charts
from hikari.geometry.domains import (
    boundary_data_to_dict,
    causal_endpoint,
    direction_grid,
    exits_to_frame,
    from_graph,
    future_cone,
    is_proper,
    is_regular,
    lambda_minus,
    load_boundary_data,
    margins,
    member,
    misner,
    past_counterpart,
    pip_domain,
    pip_reconstruction_check,
    random_boundary,
    regular_domain,
    shadow,
    shadow_contains,
    strict_convexity_witness,
    support,
)
from hikari.universe.causality import classify
from hikari.universe.cover import deck_sigma, project

E1 = np.array([1.0, 0.0, 0.0])
P = UniPoint(E1, 0.0)
FRAME = charts.frame_for(P)
V_RIGHT = np.array([1.0, 0.0, 1.0])
V_LEFT = np.array([-1.0, 0.0, 1.0])


def _point(*coords) -> ChartPoint:
    return ChartPoint(np.array(coords, dtype=float), FRAME)


def _half_space(v=V_RIGHT, s: float = 0.0):
    return regular_domain(BoundaryData((NullHyperplaneCoords(v, s),), Orientation.FUTURE, FRAME))


def _wedge():
    return misner(V_RIGHT, V_LEFT, 0.0, 0.0, FRAME)


# ---------------------------------------------------------------------------
# 影
# ---------------------------------------------------------------------------

def test_support_examples():
    """支持関数の値"""
    v = charts.null_direction([0.6, 0.8])
    assert support(_point(0, 0, 0), v) == 0.0
    assert support(_point(0, 0, 1), v) == pytest.approx(1.0)
    for alpha in np.linspace(0.0, 2 * math.pi, 7):
        v = np.array([math.cos(alpha), math.sin(alpha), 1.0])
        assert support(_point(1, 0, 0), v) == pytest.approx(-math.cos(alpha), abs=1e-15)
    with pytest.raises(PreconditionError):
        support(_point(0, 0, 0), [1.0, 0.0, 2.0])


def test_shadow_function_values():
    """影の関数はスカラー版と配列版で一致する"""
    phi = shadow(_point(0.3, -0.4, 2.0))
    V = np.array([charts.null_direction(u) for u in direction_grid(3, 8)])
    np.testing.assert_allclose(phi.values(V), [phi(v) for v in V], atol=1e-15)
    assert np.all(shadow(_point(0, 0, 0)).values(V) == 0.0)


@settings(deadline=None)
@given(
    st.lists(st.floats(min_value=-100.0, max_value=100.0), min_size=3, max_size=3),
    st.floats(min_value=0.0, max_value=2 * math.pi),
    st.floats(min_value=-100.0, max_value=100.0),
)
def test_support_shifts_with_time(coords, angle, shift):
    """時間方向に c ずらすと支持関数も c だけ増える"""
    v = charts.null_direction([math.cos(angle), math.sin(angle)])
    q = _point(*coords)
    moved = _point(coords[0], coords[1], coords[2] + shift)
    assert support(moved, v) == pytest.approx(support(q, v) + shift, abs=1e-9)


def test_shadow_contains_examples():
    """原点の影は s = 0 の境界点を含み、1 だけ未来の点の影は含まない"""
    plane = NullHyperplaneCoords(V_RIGHT, 0.0)
    assert shadow_contains(_point(0, 0, 0), plane)
    assert not shadow_contains(_point(0, 0, 1), plane)


def test_shadow_matches_direct_causal_test():
    """影の判定は普遍被覆での因果関係と一致する（10³ 例）"""
    rng = np.random.default_rng(10)
    checked = 0
    for _ in range(1000):
        q = _point(*rng.uniform(-1.0, 1.0, size=3))
        angle = rng.uniform(0.0, 2 * math.pi)
        plane = NullHyperplaneCoords(charts.null_direction([math.cos(angle), math.sin(angle)]),
                                     rng.uniform(-2.0, 2.0))
        if abs(plane.s - support(q, plane.v)) < 1e-3:
            continue
        y = charts.boundary_lift(charts.hyperplane_to_boundary(plane, FRAME), FRAME)
        related = classify(charts.lift_to_chart(q), y).tag.is_future_causal
        assert related == shadow_contains(q, plane)
        checked += 1
    assert checked > 990


# ---------------------------------------------------------------------------
# 正則領域
# ---------------------------------------------------------------------------

def test_member_examples():
    """未来錐とミスナー領域での位置"""
    cone = future_cone(FRAME, 16)
    assert member(cone, _point(0, 0, 1)) is Membership.INTERIOR
    assert member(cone, _point(0, 0, 0)) is Membership.BOUNDARY
    assert member(cone, _point(0, 0, -1)) is Membership.EXTERIOR
    wedge = _wedge()
    assert member(wedge, _point(0, 0, 1)) is Membership.INTERIOR
    assert member(wedge, _point(0, 1, 0)) is Membership.BOUNDARY
    assert member(wedge, _point(0, 0, 2)) is Membership.INTERIOR
    assert member(wedge, _point(2, 0, 1)) is Membership.EXTERIOR


def test_member_is_dual_to_shadows():
    """内部 ⟺ どの平面も影に入らない（10³ 例）"""
    rng = np.random.default_rng(11)
    for _ in range(1000):
        data = random_boundary(FRAME, int(rng.integers(1, 17)), rng)
        domain = regular_domain(data)
        q = _point(*rng.uniform(-2.0, 2.0, size=3))
        interior = member(domain, q) is Membership.INTERIOR
        assert interior == (not any(shadow_contains(q, plane) for plane in data.planes))


def test_interior_is_convex():
    """内部の点の中点は内部（10³ 組）"""
    rng = np.random.default_rng(12)
    domain = regular_domain(random_boundary(FRAME, 8, rng))
    cloud = rng.uniform(-3.0, 3.0, size=(60000, 3))
    inner = cloud[margins(domain, cloud) > 1e-6]
    assert len(inner) > 2000
    a, b = inner[:1000], inner[1000:2000]
    assert np.all(margins(domain, (a + b) / 2.0) > 1e-9)


def test_future_completeness():
    """内部の点を未来に動かしても内部"""
    rng = np.random.default_rng(13)
    domain = regular_domain(random_boundary(FRAME, 8, rng))
    cloud = rng.uniform(-3.0, 3.0, size=(5000, 3))
    inner = cloud[margins(domain, cloud) > 1e-9]
    for step in (0.1, 1.0, 10.0):
        moved = inner.copy()
        moved[:, -1] += step
        assert np.all(margins(domain, moved) > 1e-9)


def test_adding_planes_shrinks_interior():
    """平面を足すと内部は縮むか変わらない（10² 回）"""
    rng = np.random.default_rng(14)
    cloud = rng.uniform(-3.0, 3.0, size=(2000, 3))
    data = random_boundary(FRAME, 1, rng)
    before = margins(regular_domain(data), cloud) > 1e-9
    for _ in range(100):
        extra = random_boundary(FRAME, 1, rng).planes[0]
        data = data.with_plane(extra)
        after = margins(regular_domain(data), cloud) > 1e-9
        assert not np.any(after & ~before)
        before = after


def test_is_regular():
    """正則性の判定と上界"""
    cone = future_cone(FRAME, 8, level=0.5)
    verdict = is_regular(cone.data)
    assert verdict.regular
    assert verdict.bound == pytest.approx(0.5)
    empty = BoundaryData((), Orientation.FUTURE, FRAME)
    assert is_regular(empty).regular
    assert is_regular(empty).bound is None
    assert margins(regular_domain(empty), [[0.0, 0.0, -100.0]])[0] == math.inf
    unbounded = from_graph(lambda u: 0.0, 16, FRAME, unbounded=True)
    assert not is_regular(unbounded).regular
    with pytest.raises(PreconditionError):
        regular_domain(unbounded)


def test_is_proper():
    """真正性の判定"""
    assert is_proper(_wedge().data)
    assert not is_proper(_half_space().data)
    assert is_proper(future_cone(FRAME, 16).data)
    doubled = BoundaryData((NullHyperplaneCoords(V_RIGHT, 0.0), NullHyperplaneCoords(V_RIGHT, 1.0)),
                           Orientation.FUTURE, FRAME)
    assert not is_proper(doubled)


def test_misner_rejects_parallel_planes():
    """平行な2平面のミスナー領域はエラー"""
    with pytest.raises(PreconditionError):
        misner(V_RIGHT, V_RIGHT, 0.0, 1.0, FRAME)
    with pytest.raises(PreconditionError):
        misner(V_RIGHT, [1.0, 0.0, 2.0], 0.0, 0.0, FRAME)


def test_past_counterpart():
    """同じ Λ は Mink_+ で過去正則領域を定め、境界点は変わらない"""
    cone = future_cone(FRAME, 8)
    past = past_counterpart(cone)
    assert past.orientation is Orientation.PAST
    assert past.frame.center.isclose(deck_sigma(P, 1))
    assert past.proper
    for original, flipped in zip(cone.data.planes, past.data.planes):
        assert flipped.sheet == -1
        y = charts.hyperplane_to_boundary(original, FRAME)
        assert charts.hyperplane_to_boundary(flipped, past.frame) == y
    deep = ChartPoint(np.array([0.0, 0.0, -1e3]), past.frame)
    assert member(past, deep) is Membership.INTERIOR
    back = past_counterpart(past)
    assert back.orientation is Orientation.FUTURE
    np.testing.assert_allclose(back.data.normals, cone.data.normals, atol=1e-10)
    np.testing.assert_allclose(back.data.levels, cone.data.levels, atol=1e-10)


# ---------------------------------------------------------------------------
# Λ ファイル
# ---------------------------------------------------------------------------

def test_lambda_file_round_trip(tmp_path):
    """Λ ファイルの書き出しと読み込み"""
    data = random_boundary(FRAME, 5, np.random.default_rng(15))
    path = tmp_path / "lambda.json"
    path.write_text(json.dumps(boundary_data_to_dict(data)), encoding="utf-8")
    loaded = load_boundary_data(path)
    np.testing.assert_allclose(loaded.normals, data.normals)
    np.testing.assert_allclose(loaded.levels, data.levels)
    assert loaded.orientation is Orientation.FUTURE
    assert loaded.frame.center.isclose(P)


def test_lambda_file_with_spatial_directions():
    """v に空間方向 û を書いた Λ"""
    loaded = load_boundary_data({"planes": [{"v": [1.0, 0.0], "s": 0.5}, {"v": [0.0, 1.0], "s": -1.0}]})
    assert loaded.frame.dim == 3
    np.testing.assert_allclose(loaded.normals, [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    np.testing.assert_allclose(loaded.levels, [0.5, -1.0])


@pytest.mark.parametrize("raw", [
    {"planes": [], "extra": 1},
    {"orientation": "sideways", "planes": []},
    {"planes": [{"v": [1.0, 0.0, 0.0, 1.0], "s": 0.0}], "center": {"x": [1, 0, 0], "t": 0}},
    {"planes": [{"v": [1.0, 0.0], "level": 0.0}]},
    {"planes": "none"},
])
def test_lambda_file_schema_errors(raw):
    """不正な Λ は SchemaError"""
    with pytest.raises(SchemaError):
        load_boundary_data(raw)


def test_lambda_file_missing(tmp_path):
    """読めないファイルは SchemaError"""
    with pytest.raises(SchemaError):
        load_boundary_data(tmp_path / "missing.json")


# ---------------------------------------------------------------------------
# 出口点と過去の再構成
# ---------------------------------------------------------------------------

def test_lambda_minus_future_cone():
    """未来錐では全方向の出口パラメータが 1/2"""
    cone = future_cone(FRAME, 16)
    p = _point(0, 0, 1)
    records = lambda_minus(cone, p, directions=16)
    assert len(records) == 16
    for r in records:
        assert not r.unbounded
        assert r.parameter == pytest.approx(0.5, abs=1e-9)
        assert charts.flat_relation(p.X, r.point).tag is RelationTag.NULL_PAST
        assert charts.flat_relation(np.zeros(3), r.point).tag is RelationTag.NULL_FUTURE
        plane = cone.data.planes[r.plane_index]
        assert support(ChartPoint(r.point, FRAME), plane.v) == pytest.approx(plane.s, abs=1e-12)


def test_lambda_minus_unbounded_direction():
    """面に平行な方向は出口がない"""
    domain = _half_space()
    p = _point(0, 0, 1)
    parallel, crossing = lambda_minus(domain, p, directions=np.array([[1.0, 0.0], [-1.0, 0.0]]))
    assert parallel.unbounded
    assert parallel.parameter is None
    far = ChartPoint(p.X + 1e6 * parallel.direction, FRAME)
    assert member(domain, far) is Membership.INTERIOR
    assert crossing.parameter == pytest.approx(0.5)


def test_lambda_minus_requires_interior():
    """内部にない点はエラー"""
    with pytest.raises(PreconditionError):
        lambda_minus(future_cone(FRAME, 16), _point(0, 0, 0))


def test_exits_to_frame_columns():
    """出口点の表"""
    table = exits_to_frame(lambda_minus(_half_space(), _point(0, 0, 1),
                                        directions=np.array([[1.0, 0.0], [-1.0, 0.0]])))
    assert list(table.columns) == ["w1", "w2", "w3", "parameter", "e1", "e2", "e3", "plane", "unbounded"]
    assert table["unbounded"].tolist() == [True, False]


def test_pip_reconstruction_future_cone():
    """未来錐では I⁻(p) ∩ Ω と Λ⁻(p) の領域が一致する"""
    report = pip_reconstruction_check(future_cone(FRAME, 16), _point(0, 0, 1), probes=1000, seed=1)
    assert report.mismatches == 0
    assert report.passed
    assert report.excluded < report.probes
    assert report.to_dict()["mismatchedPoints"] == []


@pytest.mark.parametrize("seed", range(10))
def test_pip_reconstruction_random_boundaries(seed):
    """8 枚の乱数平面と乱数の内部点で不一致がない"""
    rng = np.random.default_rng(seed)
    domain = regular_domain(random_boundary(FRAME, 8, rng))
    spatial = rng.uniform(-0.5, 0.5, size=2)
    height = domain.data.levels.max() + np.linalg.norm(spatial) + rng.uniform(0.2, 2.0)
    p = _point(spatial[0], spatial[1], height)
    report = pip_reconstruction_check(domain, p, probes=1000, seed=seed)
    assert report.mismatches == 0


def test_pip_domain_requires_future_interior():
    """過去正則領域や内部にない点では作れない"""
    cone = future_cone(FRAME, 16)
    with pytest.raises(PreconditionError):
        pip_domain(past_counterpart(cone), _point(0, 0, 1))
    with pytest.raises(PreconditionError):
        pip_domain(cone, _point(0, 0, -1))
    with pytest.raises(PreconditionError):
        pip_reconstruction_check(cone, _point(3, 0, 1))


def test_pip_domain_interior_point():
    """PIP 領域の内部点は余裕が正"""
    pip = pip_domain(future_cone(FRAME, 16), _point(0, 0, 1))
    anchor = pip.interior_point()
    assert pip.margins(anchor)[0] > 0.0
    assert pip.dim == 3


# ---------------------------------------------------------------------------
# 強凸性
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("domain_factory", [_wedge, _half_space])
def test_convexity_witness_for_flat_boundaries(domain_factory):
    """ミスナー領域と半空間の境界は空間的な線分を含む"""
    domain = domain_factory()
    witness = strict_convexity_witness(domain, trials=200, seed=3)
    assert witness is not None
    a, b = witness
    assert charts.q1n(b.X - a.X) > 1e-6
    assert abs(margins(domain, (a.X + b.X) / 2.0)[0]) <= 1e-9


def test_convexity_witness_absent_for_pip_domain():
    """点の過去として実現したダイヤモンドの境界は強凸"""
    pip = pip_domain(future_cone(FRAME, 16), _point(0, 0, 1))
    assert strict_convexity_witness(pip, trials=10000, seed=4) is None


# ---------------------------------------------------------------------------
# 因果曲線の終点
# ---------------------------------------------------------------------------

def test_causal_endpoint_arctan_curve():
    """t ↦ (e₁, arctan t) の終点は (e₁, π/2)（最後の標本の誤差 1e−4 を外挿で詰める）"""
    curve = [UniPoint(E1, math.atan(t)) for t in range(1, 10001)]
    end = causal_endpoint(curve)
    assert end is not None
    expected = project(UniPoint(E1, math.pi / 2)).rep
    assert np.linalg.norm(end.rep - expected) < 1e-8
    assert np.linalg.norm(project(curve[-1]).rep - expected) > 1e-5


def test_causal_endpoint_chart_ray():
    """チャートの未来向きヌル半直線の終点は photon_endpoint と一致する"""
    X0 = np.array([0.3, -0.2, 0.1])
    w = np.array([0.0, 1.0, 1.0])
    s = np.arange(1, 10001, dtype=float)
    xs, ts = charts.lift_to_chart_array(FRAME, X0 + s[:, None] * w)
    end = causal_endpoint([UniPoint(x, t) for x, t in zip(xs, ts)])
    assert end is not None
    expected = charts.photon_endpoint(ChartPoint(X0, FRAME), w)
    assert np.linalg.norm(end.rep - expected.rep) < 1e-8


def test_causal_endpoint_geometric_tail():
    """幾何級数的に収束する列では最後の標本とほぼ同じ点を返す"""
    curve = [UniPoint(E1, math.pi / 2 - 2.0 ** -k) for k in range(1, 61)]
    end = causal_endpoint(curve)
    assert end is not None
    expected = project(UniPoint(E1, math.pi / 2)).rep
    assert np.linalg.norm(end.rep - expected) < 1e-12


def test_causal_endpoint_diverging_curve():
    """時間が伸び続ける曲線は収束しない"""
    curve = [UniPoint(E1, 0.1 * k) for k in range(200)]
    assert causal_endpoint(curve) is None


def test_causal_endpoint_rejects_unordered_samples():
    """順序づいていない標本列と短すぎる列はエラー"""
    curve = [UniPoint(E1, math.atan(t)) for t in range(1, 100)]
    with pytest.raises(PreconditionError):
        causal_endpoint(curve[::-1])
    with pytest.raises(PreconditionError):
        causal_endpoint(curve[:2])
