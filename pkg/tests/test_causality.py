"""普遍被覆の因果関係・光子・ダイヤモンド包含の単体テスト"""
import math
import sys
from pathlib import Path

# srcをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hikari.core.errors import PreconditionError
from hikari.core.models import Diamond, Orientation, PhotonSegment, RelationTag, UniPoint
from hikari.universe.causality import (
    classify,
    diamond_contains,
    diamond_contains_array,
    is_complete_segment,
    photon_point,
    photon_points,
    photon_through,
    sphere_distance,
    time_reverse,
)
from hikari.universe.cover import deck_delta, deck_sigma, is_conjugate, random_unipoints

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])

seeds = st.integers(min_value=0, max_value=2**31 - 1)


def test_sphere_distance_examples():
    """球面距離の例"""
    assert sphere_distance(E1, E1) == 0.0
    assert sphere_distance(E1, -E1) == pytest.approx(math.pi, abs=1e-15)
    assert sphere_distance(E1, E2) == pytest.approx(math.pi / 2, abs=1e-15)
    with pytest.raises(PreconditionError):
        sphere_distance(2 * E1, E2)


def test_classify_examples():
    """因果関係の分類例"""
    p = UniPoint(E1, 0.0)
    assert classify(p, UniPoint(E1, 2.0)).tag is RelationTag.CHRONO_FUTURE
    null = classify(p, UniPoint(-E1, math.pi))
    assert null.tag is RelationTag.NULL_FUTURE
    assert null.boundary
    assert classify(p, UniPoint(E2, 0.3)).tag is RelationTag.SPACELIKE
    assert classify(p, UniPoint(E2, 4.0)).tag is RelationTag.CHRONO_FUTURE
    assert classify(p, p).tag is RelationTag.EQUAL
    assert classify(p, UniPoint(E1, -1.0)).tag is RelationTag.CHRONO_PAST


def test_classify_does_not_clamp_large_time():
    """Δt > π なら任意の x が時間的未来"""
    p = UniPoint(E1, 0.0)
    relation = classify(p, UniPoint(-E1, 3.5))
    assert relation.tag is RelationTag.CHRONO_FUTURE
    assert relation.margin == pytest.approx(3.5 - math.pi)


@settings(deadline=None, max_examples=50)
@given(seeds)
def test_symmetry_and_deck_equivariance(seed):
    """時間反転対称性とデッキ変換での不変性"""
    rng = np.random.default_rng(seed)
    xs, ts = random_unipoints(rng, 40, 3, t_range=(-4.0, 4.0))
    points = [UniPoint(x, t) for x, t in zip(xs, ts)]
    for p, q in zip(points[:20], points[20:]):
        forward = classify(p, q)
        assert classify(q, p).tag is time_reverse(forward.tag)
        assert classify(deck_sigma(p, 1), deck_sigma(q, 1)).tag is forward.tag
        assert classify(deck_delta(p, -1), deck_delta(q, -1)).tag is forward.tag


def test_transitivity_on_random_triples():
    """時間的未来の推移性（10⁴ 組）"""
    rng = np.random.default_rng(3)
    xs, ts = random_unipoints(rng, 30000, 3, t_range=(-3.0, 3.0))
    points = [UniPoint(x, t) for x, t in zip(xs, ts)]
    checked = 0
    for p, q, r in zip(points[0::3], points[1::3], points[2::3]):
        if (classify(p, q).tag is RelationTag.CHRONO_FUTURE
                and classify(q, r).tag is RelationTag.CHRONO_FUTURE):
            checked += 1
            assert classify(p, r).tag is RelationTag.CHRONO_FUTURE
    assert checked > 0


def test_lightcone_equation():
    """|Δt| ≤ π で光円錐上の点はヌル、少しずらすと時間的・空間的"""
    p = UniPoint(E1, 0.0)
    for d in np.linspace(0.1, math.pi - 0.1, 9):
        q = UniPoint(math.cos(d) * E1 + math.sin(d) * E2, d)
        assert classify(p, q).tag is RelationTag.NULL_FUTURE
        assert classify(p, UniPoint(q.x, d + 1e-3)).tag is RelationTag.CHRONO_FUTURE
        assert classify(p, UniPoint(q.x, d - 1e-3)).tag is RelationTag.SPACELIKE
        assert classify(p, UniPoint(q.x, -d)).tag is RelationTag.NULL_PAST


def test_photon_examples():
    """光子上の点"""
    seg = photon_through(UniPoint(E1, 0.0), E2)
    assert photon_point(seg, math.pi / 2).isclose(UniPoint(E2, math.pi / 2), atol=1e-15)
    assert photon_point(seg, math.pi).isclose(deck_sigma(seg.base, 1), atol=1e-15)
    assert photon_point(seg, 2 * math.pi).isclose(deck_delta(seg.base, 1), atol=1e-15)


def test_photon_rejects_bad_tangent():
    """直交しない接ベクトルはエラー"""
    with pytest.raises(PreconditionError):
        photon_through(UniPoint(E1, 0.0), [1.0, 1.0, 0.0] / np.sqrt(2))


def test_photon_points_are_null_related():
    """光子上の点は基点とヌル、s = π で共役"""
    p = UniPoint(E1, 0.0)
    seg = photon_through(p, E2)
    xs, ts = photon_points(seg, np.linspace(0.05, math.pi - 0.05, 50))
    for x, t in zip(xs, ts):
        assert classify(p, UniPoint(x, t)).tag is RelationTag.NULL_FUTURE
    assert is_conjugate(p, photon_point(seg, math.pi)) == 1
    past = photon_through(p, E2, orientation=Orientation.PAST)
    assert classify(p, photon_point(past, 1.0)).tag is RelationTag.NULL_PAST


def test_is_complete_segment():
    """完全な区間の判定"""
    p = UniPoint(E1, 0.0)
    assert is_complete_segment(PhotonSegment(p, E2, (0.0, math.pi)))
    assert not is_complete_segment(PhotonSegment(p, E2, (0.0, math.pi / 2)))
    assert is_complete_segment(PhotonSegment(p, E2, (0.0, math.pi - 1e-12)))


def test_diamond_contains_examples():
    """ダイヤモンドへの包含"""
    D = Diamond(UniPoint(E1, 0.0), UniPoint(E1, math.pi))
    edge = UniPoint(E2, math.pi / 2)
    assert diamond_contains(D, edge, open_flag=False)
    assert not diamond_contains(D, edge, open_flag=True)
    assert diamond_contains(D, UniPoint(E1, math.pi / 2))
    assert not diamond_contains(D, UniPoint(-E1, math.pi / 2), open_flag=False)


def test_diamond_contains_array_matches_scalar():
    """配列版とスカラー版が一致する"""
    D = Diamond(UniPoint(E1, 0.0), UniPoint(E2, 2.5))
    rng = np.random.default_rng(11)
    xs, ts = random_unipoints(rng, 300, 3, t_range=(-0.5, 3.0))
    mask = diamond_contains_array(D, xs, ts)
    expected = [diamond_contains(D, UniPoint(x, t)) for x, t in zip(xs, ts)]
    assert mask.tolist() == expected


def test_diamond_requires_causal_vertices():
    """未来頂点が因果的未来にないダイヤモンドはエラー"""
    with pytest.raises(PreconditionError):
        Diamond(UniPoint(E1, 0.0), UniPoint(E2, 0.5))
