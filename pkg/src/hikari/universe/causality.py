"""普遍被覆の因果関係・光子・ダイヤモンドの包含判定

d を球面距離、Δt = q.t − p.t とすると
    d < Δt  … q は p の時間的未来
    d = |Δt| … ヌル（光円錐上）
    d > |Δt| … 空間的
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np

from hikari.core.config import resolve
from hikari.core.errors import PreconditionError
from hikari.core.models import (
    CausalRelation,
    Diamond,
    Orientation,
    PhotonSegment,
    RelationTag,
    Tolerance,
    UniPoint,
)

logger = logging.getLogger(__name__)

_REVERSED = {
    RelationTag.EQUAL: RelationTag.EQUAL,
    RelationTag.SPACELIKE: RelationTag.SPACELIKE,
    RelationTag.CHRONO_FUTURE: RelationTag.CHRONO_PAST,
    RelationTag.CHRONO_PAST: RelationTag.CHRONO_FUTURE,
    RelationTag.NULL_FUTURE: RelationTag.NULL_PAST,
    RelationTag.NULL_PAST: RelationTag.NULL_FUTURE,
}


def sphere_distance(x, y, tol: Optional[Tolerance] = None) -> float:
    """
    球面 S^{n-1} 上の大円距離

    Args:
        x, y: 単位ベクトル

    Returns:
        float: [0, π] の距離
    """
    tol = resolve(tol)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for v in (x, y):
        if abs(np.linalg.norm(v) - 1.0) > tol.tau:
            raise PreconditionError("球面距離の入力は単位ベクトルでなければなりません")
    # arccos(x·y) は 0 と π の近くで桁落ちするので atan2 形で計算する
    return float(2.0 * math.atan2(np.linalg.norm(x - y), np.linalg.norm(x + y)))


def sphere_distance_array(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """行ごとの球面距離（検査なし、ブロードキャスト可）"""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return 2.0 * np.arctan2(np.linalg.norm(X - Y, axis=-1), np.linalg.norm(X + Y, axis=-1))


def relation_margins(px, pt, qx, qt) -> Tuple[np.ndarray, np.ndarray]:
    """(Δt, margin = |Δt| − d) を配列で返す"""
    dt = np.asarray(qt, dtype=float) - np.asarray(pt, dtype=float)
    d = sphere_distance_array(px, qx)
    return dt, np.abs(dt) - d


def classify(p: UniPoint, q: UniPoint, tol: Optional[Tolerance] = None) -> CausalRelation:
    """
    p から見た q の因果関係

    Args:
        p: 基準点
        q: 判定する点
        tol: 許容誤差（ヌル判定には classification_band を使う）

    Returns:
        CausalRelation: タグと margin = |Δt| − d
    """
    tol = resolve(tol)
    dt = q.t - p.t
    d = sphere_distance(p.x, q.x, tol)
    margin = abs(dt) - d
    if d <= tol.tau and abs(dt) <= tol.tau:
        return CausalRelation(RelationTag.EQUAL, margin)
    if abs(margin) <= tol.band:
        tag = RelationTag.NULL_FUTURE if dt >= 0.0 else RelationTag.NULL_PAST
        return CausalRelation(tag, margin, boundary=True)
    if margin > 0.0:
        tag = RelationTag.CHRONO_FUTURE if dt > 0.0 else RelationTag.CHRONO_PAST
        return CausalRelation(tag, margin)
    return CausalRelation(RelationTag.SPACELIKE, margin)


def time_reverse(tag: RelationTag) -> RelationTag:
    """時間反転したタグ"""
    return _REVERSED[tag]


def photon_through(p: UniPoint, u, orientation: Orientation = Orientation.FUTURE,
                   s_range: Tuple[float, float] = (0.0, math.pi),
                   tol: Optional[Tolerance] = None) -> PhotonSegment:
    """p を通り接方向 u の光子"""
    tol = resolve(tol)
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > tol.tau or abs(float(np.dot(u, p.x))) > tol.tau:
        raise PreconditionError("接ベクトルは単位長で p.x に直交していなければなりません")
    return PhotonSegment(p, u, s_range, Orientation(orientation))


def photon_point(seg: PhotonSegment, s: float) -> UniPoint:
    """光子のパラメータ s の点"""
    x = math.cos(s) * seg.base.x + math.sin(s) * seg.tangent
    return UniPoint(x / np.linalg.norm(x), seg.base.t + seg.orientation.sign * s)


def photon_points(seg: PhotonSegment, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """photon_point の配列版"""
    s = np.asarray(s, dtype=float)
    xs = np.cos(s)[:, None] * seg.base.x + np.sin(s)[:, None] * seg.tangent
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    return xs, seg.base.t + seg.orientation.sign * s


def is_complete_segment(seg: PhotonSegment, tol: Optional[Tolerance] = None) -> bool:
    """共役点を結ぶ完全な区間（長さ π）か"""
    tol = resolve(tol)
    return abs(seg.length - math.pi) <= tol.tau


def diamond_contains(D: Diamond, r: UniPoint, open_flag: bool = True,
                     tol: Optional[Tolerance] = None) -> bool:
    """r がダイヤモンド D に含まれるか（open_flag=False なら閉包）"""
    tol = resolve(tol)
    after_past = classify(D.past, r, tol).tag
    before_future = classify(r, D.future, tol).tag
    if open_flag:
        return after_past is RelationTag.CHRONO_FUTURE and before_future is RelationTag.CHRONO_FUTURE
    return after_past.is_future_causal and before_future.is_future_causal


def diamond_contains_array(D: Diamond, xs: np.ndarray, ts: np.ndarray,
                           tol: Optional[Tolerance] = None) -> np.ndarray:
    """開ダイヤモンドへの包含を配列で判定する"""
    tol = resolve(tol)
    dt1, m1 = relation_margins(D.past.x, D.past.t, xs, ts)
    dt2, m2 = relation_margins(xs, ts, D.future.x, D.future.t)
    return (dt1 > 0.0) & (m1 > tol.band) & (dt2 > 0.0) & (m2 > tol.band)
