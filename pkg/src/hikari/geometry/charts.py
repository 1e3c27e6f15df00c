"""アフィンチャートとペンローズ境界

点 p = (x, t) のチャート Mink_0(p) は p と因果的に無関係な点全体で、
二重被覆では M(ξ∞) = {y : ⟨y, ξ∞⟩ < 0}（ξ∞ = project(p).rep）に一致する。
チャート座標 X（時間座標は最後、η = diag(1, …, 1, −1)）と
二重被覆の点は

    ι(X) = ξ0 + X + q(X)·ξ∞

で対応する。ξ∞ の光円錐の正則部分（ペンローズ境界）の点は
チャートの退化（ヌル）アフィン超平面 {Z : −⟨Z, v⟩ = s} と一対一に対応する。
"""
import logging
import math
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space

from hikari.core.config import resolve
from hikari.core.errors import NotInChartError, PreconditionError
from hikari.core.models import (
    CausalRelation,
    ChartFrame,
    ChartPoint,
    ConformalCheck,
    EinPoint,
    HyperboloidSheet,
    NullHyperplaneCoords,
    RelationTag,
    SpacelikePlane,
    Tolerance,
    UniPoint,
)
from hikari.universe.causality import classify, relation_margins, sphere_distance
from hikari.universe.cover import (
    ambient_metric,
    bilinear2n,
    bilinear2n_rows,
    deck_sigma,
    lift_near,
    lift_near_array,
    normalize_null,
    normalize_null_rows,
    project,
    project_array,
    q2n,
)

logger = logging.getLogger(__name__)

QuadricSlice = Union[SpacelikePlane, HyperboloidSheet]


# ---------------------------------------------------------------------------
# ミンコフスキー形式
# ---------------------------------------------------------------------------

def eta(n: int) -> np.ndarray:
    """チャートの計量 diag(1, …, 1, −1)"""
    return np.diag([1.0] * (n - 1) + [-1.0])


def minkowski(X, Y) -> float:
    """η(X, Y)"""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return float(np.dot(X[:-1], Y[:-1]) - X[-1] * Y[-1])


def q1n(X) -> float:
    """q_{1,n-1}(X) = Σ X_j² − X_n²"""
    return minkowski(X, X)


def q1n_rows(X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    return np.sum(X[:, :-1] ** 2, axis=1) - X[:, -1] ** 2


def flat_relation(X, Y, tol: Optional[Tolerance] = None) -> CausalRelation:
    """平坦計量での X から見た Y の因果関係（margin = |ΔT| − |ΔX̄|）"""
    tol = resolve(tol)
    D = np.asarray(Y, dtype=float) - np.asarray(X, dtype=float)
    dt = float(D[-1])
    margin = abs(dt) - float(np.linalg.norm(D[:-1]))
    if np.linalg.norm(D) <= tol.tau:
        return CausalRelation(RelationTag.EQUAL, margin)
    if abs(margin) <= tol.band:
        tag = RelationTag.NULL_FUTURE if dt >= 0.0 else RelationTag.NULL_PAST
        return CausalRelation(tag, margin, boundary=True)
    if margin > 0.0:
        return CausalRelation(RelationTag.CHRONO_FUTURE if dt > 0 else RelationTag.CHRONO_PAST, margin)
    return CausalRelation(RelationTag.SPACELIKE, margin)


# ---------------------------------------------------------------------------
# チャート座標系
# ---------------------------------------------------------------------------

def _check_frame(frame: ChartFrame, tol: Tolerance) -> None:
    n = frame.dim
    G = ambient_metric(n)
    problems = []
    if abs(q2n(frame.xi_inf)) > tol.tau or abs(q2n(frame.xi_zero)) > tol.tau:
        problems.append("ξ∞, ξ0 がヌルでない")
    if abs(bilinear2n(frame.xi_inf, frame.xi_zero) + 0.5) > tol.tau:
        problems.append("⟨ξ∞, ξ0⟩ ≠ −1/2")
    gram = frame.block_basis @ G @ frame.block_basis.T
    if not np.allclose(gram, eta(n), rtol=0.0, atol=tol.tau):
        problems.append("ブロック基底が正規直交でない")
    cross = frame.block_basis @ G @ np.vstack((frame.xi_inf, frame.xi_zero)).T
    if np.abs(cross).max() > tol.tau:
        problems.append("ブロック基底が ξ∞, ξ0 に直交しない")
    if problems:
        raise PreconditionError("チャート座標系が不正です: " + "、".join(problems))


def frame_for(p: UniPoint, tol: Optional[Tolerance] = None) -> ChartFrame:
    """
    p を中心とするチャート Mink_0(p) の座標系

    ξ∞ = project(p).rep、ξ0 は同時刻の対蹠点 (−x, t) の代表元を
    ⟨ξ∞, ξ0⟩ = −1/2 に縮めたもの。チャート原点は (−x, t) に持ち上がる。

    Args:
        p: チャートの中心
        tol: 許容誤差

    Returns:
        ChartFrame: 座標系
    """
    tol = resolve(tol)
    xi_inf = project(p, tol).rep
    c, s = xi_inf[0], xi_inf[1]
    x = p.x
    n = x.shape[0]
    xi_zero = np.concatenate(([c, s], -x)) / 4.0
    # x の直交補空間（S^{n-1} の接空間）の正規直交基底
    W = null_space(x[None, :])
    spatial = np.hstack((np.zeros((n - 1, 2)), W.T))
    v0 = np.concatenate(([-s, c], np.zeros(n)))
    frame = ChartFrame(xi_inf, xi_zero, np.vstack((spatial, v0)), p)
    _check_frame(frame, tol)
    return frame


def chart_of(p: UniPoint, which: int = 0, tol: Optional[Tolerance] = None) -> ChartFrame:
    """Mink_−(p), Mink_0(p), Mink_+(p)（which = −1, 0, +1）の座標系"""
    if which not in (-1, 0, 1):
        raise PreconditionError("which は −1, 0, +1 のいずれか")
    return frame_for(deck_sigma(p, which), tol)


def frame_to_dict(frame: ChartFrame, tol: Optional[Tolerance] = None) -> Dict[str, Any]:
    """座標系を JSON 用の辞書にする（行優先）"""
    tol = resolve(tol)
    return {
        "center": frame.center.to_dict(),
        "xi_inf": frame.xi_inf.tolist(),
        "xi_zero": frame.xi_zero.tolist(),
        "block_basis": frame.block_basis.tolist(),
        "tolerance": tol.to_dict(),
    }


def frame_from_dict(data: Dict[str, Any], tol: Optional[Tolerance] = None) -> ChartFrame:
    """frame_to_dict の逆。不変条件を検査する"""
    tol = resolve(tol)
    center = UniPoint(data["center"]["x"], data["center"]["t"])
    frame = ChartFrame(
        np.asarray(data["xi_inf"], dtype=float),
        np.asarray(data["xi_zero"], dtype=float),
        np.asarray(data["block_basis"], dtype=float),
        center,
    )
    _check_frame(frame, tol)
    return frame


# ---------------------------------------------------------------------------
# 埋め込み・座標・持ち上げ
# ---------------------------------------------------------------------------

def ambient_of(frame: ChartFrame, X) -> np.ndarray:
    """ブロック座標 X の環境ベクトル Σ X_j b_j（行ごと可）"""
    return np.asarray(X, dtype=float) @ frame.block_basis


def embed_raw(frame: ChartFrame, Xs: np.ndarray) -> np.ndarray:
    """正規化前の ι(X) を行ごとに返す（⟨ι(X), ξ∞⟩ = −1/2）"""
    Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
    return frame.xi_zero + Xs @ frame.block_basis + q1n_rows(Xs)[:, None] * frame.xi_inf


def embed(X: ChartPoint, tol: Optional[Tolerance] = None) -> EinPoint:
    """チャート点を二重被覆へ埋め込む"""
    return normalize_null(embed_raw(X.frame, X.X)[0], tol)


def embed_array(frame: ChartFrame, Xs: np.ndarray) -> np.ndarray:
    """embed の配列版（正規化済みの代表元）"""
    return normalize_null_rows(embed_raw(frame, Xs))


def _coords_rows(frame: ChartFrame, reps: np.ndarray, tau: float) -> Tuple[np.ndarray, np.ndarray]:
    reps = np.atleast_2d(np.asarray(reps, dtype=float))
    pairing = bilinear2n_rows(reps, frame.xi_inf)
    inside = pairing < -tau
    safe = np.where(inside, pairing, -1.0)
    Y = reps * (-0.5 / safe)[:, None]
    G = ambient_metric(frame.dim)
    C = Y @ G @ frame.block_basis.T
    C[:, -1] = -C[:, -1]
    C[~inside] = np.nan
    return C, inside


def chart_coords(e: EinPoint, frame: ChartFrame, tol: Optional[Tolerance] = None) -> ChartPoint:
    """
    二重被覆の点のチャート座標（embed の逆）

    Raises:
        NotInChartError: ⟨e, ξ∞⟩ ≥ −tau（光円錐上または M(−ξ∞) 側）
    """
    tol = resolve(tol)
    coords, inside = _coords_rows(frame, e.rep, tol.tau)
    if not inside[0]:
        raise NotInChartError("点がチャートの外にあります（⟨e, ξ∞⟩ ≥ 0）")
    return ChartPoint(coords[0], frame)


def chart_coords_array(frame: ChartFrame, reps: np.ndarray,
                       tol: Optional[Tolerance] = None) -> Tuple[np.ndarray, np.ndarray]:
    """chart_coords の配列版。(座標, チャート内マスク)、外の点は nan"""
    return _coords_rows(frame, reps, resolve(tol).tau)


def lift_to_chart(X: ChartPoint, tol: Optional[Tolerance] = None) -> UniPoint:
    """
    チャート点の普遍被覆への持ち上げ

    中心 p に対して |t − p.t| < d(x, p.x) を満たす唯一の分枝
    （p と空間的な点、すなわち I(σ(p), σ⁻¹(p)) の点）を返す。
    """
    e = embed(X, tol)
    return lift_near(e, X.frame.center.t)


def lift_to_chart_array(frame: ChartFrame, Xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """lift_to_chart の配列版。(x, t) を返す"""
    reps = embed_array(frame, Xs)
    return lift_near_array(reps, np.full(reps.shape[0], frame.center.t))


def in_chart(u: UniPoint, frame: ChartFrame, tol: Optional[Tolerance] = None) -> bool:
    """u が Mink_0(center) にあるか（中心と空間的）"""
    return classify(frame.center, u, tol).tag is RelationTag.SPACELIKE


def to_chart(u: UniPoint, frame: ChartFrame, tol: Optional[Tolerance] = None) -> ChartPoint:
    """普遍被覆の点のチャート座標"""
    tol = resolve(tol)
    if not in_chart(u, frame, tol):
        raise NotInChartError("点が中心と因果的に関係しているためチャートの外です")
    return chart_coords(project(u, tol), frame, tol)


def to_chart_array(frame: ChartFrame, xs: np.ndarray, ts: np.ndarray,
                   tol: Optional[Tolerance] = None) -> Tuple[np.ndarray, np.ndarray]:
    """to_chart の配列版。中心と空間的（margin < −band）な点だけを有効にする"""
    tol = resolve(tol)
    _, margin = relation_margins(frame.center.x, frame.center.t, xs, ts)
    coords, inside = _coords_rows(frame, project_array(xs, ts), tol.tau)
    inside &= margin < -tol.band
    coords[~inside] = np.nan
    return coords, inside


# ---------------------------------------------------------------------------
# ペンローズ境界と円柱モデル
# ---------------------------------------------------------------------------

def photon_endpoint(X0: ChartPoint, w, tol: Optional[Tolerance] = None) -> EinPoint:
    """
    チャートのヌル半直線 X0 + s·w（s → ∞）の終点

    終点は [w + 2⟨X0, w⟩·ξ∞] で、ξ∞ の光円錐上にある。
    """
    tol = resolve(tol)
    w = np.asarray(w, dtype=float)
    scale = float(np.dot(w, w))
    if scale <= tol.tau or abs(q1n(w)) > tol.tau * scale:
        raise PreconditionError("w は零でないヌルベクトルでなければなりません")
    frame = X0.frame
    y = ambient_of(frame, w) + 2.0 * minkowski(X0.X, w) * frame.xi_inf
    return normalize_null(y, tol)


def _check_null_normal(v: np.ndarray, tol: Tolerance) -> None:
    if abs(q1n(v)) > tol.tau * max(1.0, float(np.dot(v, v))) or abs(v[-1] - 1.0) > tol.tau:
        raise PreconditionError("v は ⟨v, v0⟩ = −1 に正規化された未来向きヌルベクトルでなければなりません")


def null_direction(u_hat) -> np.ndarray:
    """空間単位方向 û からヌルベクトル v = (û, 1)"""
    u_hat = np.asarray(u_hat, dtype=float)
    return np.concatenate((u_hat / np.linalg.norm(u_hat), [1.0]))


def boundary_to_hyperplane(y: EinPoint, frame: ChartFrame,
                           tol: Optional[Tolerance] = None) -> NullHyperplaneCoords:
    """
    ペンローズ境界の点 y に対応する退化超平面 (v, s)

    y = W + β·ξ∞（W はブロック内のヌルベクトル）と分解し、
    v = W/λ（λ = W の時間成分）、s = −β/(2λ) とする。
    光円錐 {⟨·, y⟩ = 0} のチャートでの跡は {Z : −⟨Z, v⟩ = s}。

    Args:
        y: ⟨y, ξ∞⟩ = 0 を満たす点（±[ξ∞] 以外）
        frame: チャート座標系

    Returns:
        NullHyperplaneCoords: sheet は 𝒥⁺ なら +1、𝒥⁻ なら −1
    """
    tol = resolve(tol)
    r = y.rep
    if abs(bilinear2n(r, frame.xi_inf)) > tol.tau:
        raise PreconditionError("y が ξ∞ の光円錐上にありません")
    G = ambient_metric(frame.dim)
    w = frame.block_basis @ G @ r
    w[-1] = -w[-1]
    if np.linalg.norm(w) <= tol.tau:
        raise PreconditionError("y = ±[ξ∞] は特異点です")
    beta = -2.0 * bilinear2n(r, frame.xi_zero)
    lam = float(w[-1])
    return NullHyperplaneCoords(w / lam, -beta / (2.0 * lam), 1 if lam > 0 else -1)


def hyperplane_to_boundary(h: NullHyperplaneCoords, frame: ChartFrame,
                           tol: Optional[Tolerance] = None) -> EinPoint:
    """boundary_to_hyperplane の逆"""
    tol = resolve(tol)
    _check_null_normal(h.v, tol)
    y = h.sheet * (ambient_of(frame, h.v) - 2.0 * h.s * frame.xi_inf)
    return normalize_null(y, tol)


def boundary_lift(y: EinPoint, frame: ChartFrame, tol: Optional[Tolerance] = None) -> UniPoint:
    """境界点の普遍被覆での持ち上げ（∂I^±(center) 上、t = center.t ± d）"""
    tol = resolve(tol)
    center = frame.center
    x = y.rep[2:] / np.linalg.norm(y.rep[2:])
    d = sphere_distance(x, center.x)
    if d <= tol.tau or d >= math.pi - tol.tau:
        raise PreconditionError("y = ±[ξ∞] は特異点です")
    for t in (center.t + d, center.t - d):
        rep = project_array(x[None, :], np.array([t]))[0]
        if np.allclose(rep, y.rep, rtol=0.0, atol=1e3 * tol.tau):
            return UniPoint(x, t)
    raise PreconditionError("y が中心の光円錐上にありません")


def support_rows(Xs: np.ndarray, V: np.ndarray) -> np.ndarray:
    """φ_X(v) = −⟨X, v⟩ を (点, 方向) の表で返す"""
    Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
    V = np.atleast_2d(np.asarray(V, dtype=float))
    return Xs[:, -1:] * V[:, -1] - Xs[:, :-1] @ V[:, :-1].T


def section_to_point(samples: Sequence[Union[NullHyperplaneCoords, Tuple[Any, float]]],
                     frame: ChartFrame, tol: Optional[Tolerance] = None) -> Optional[ChartPoint]:
    """
    円柱モデルの切断 {(v_j, s_j)} を点の光円錐として読む

    s_j = −⟨q, v_j⟩ の最小二乗解を正規方程式で求め、
    最大残差が判定帯以内なら q を返す。

    Raises:
        PreconditionError: 標本が n 個未満、または階数不足
    """
    tol = resolve(tol)
    pairs = [(s.v, s.s) if isinstance(s, NullHyperplaneCoords) else s for s in samples]
    n = frame.dim
    if len(pairs) < n:
        raise PreconditionError(f"標本は少なくとも {n} 個必要です")
    V = np.array([np.asarray(v, dtype=float) for v, _ in pairs])
    s = np.array([float(level) for _, level in pairs])
    A = np.hstack((-V[:, :-1], V[:, -1:]))
    N = A.T @ A
    eig = np.linalg.eigvalsh(N)
    if eig[0] <= tol.tau * max(1.0, eig[-1]):
        raise PreconditionError("標本の方向が張る空間の階数が不足しています")
    q = np.linalg.solve(N, A.T @ s)
    residual = float(np.abs(A @ q - s).max())
    if residual > tol.band:
        logger.debug("切断は点の光円錐ではありません（残差 %.3e）", residual)
        return None
    return ChartPoint(q, frame)


# ---------------------------------------------------------------------------
# 共形球面とチャートの交わり
# ---------------------------------------------------------------------------

def _lorentz_split(B: np.ndarray, tol: Tolerance) -> Tuple[np.ndarray, np.ndarray]:
    """部分空間のグラム行列を対角化し、(時間的単位ベクトル, 空間的正規直交基底) を返す"""
    G = ambient_metric(B.shape[1] - 2)
    gram = B @ G @ B.T
    eig, U = np.linalg.eigh(gram)
    scale = max(1.0, float(np.abs(eig).max()))
    neg = eig < -tol.tau * scale
    pos = eig > tol.tau * scale
    if neg.sum() != 1 or pos.sum() != B.shape[0] - 1:
        raise PreconditionError("部分空間の符号が (1, k) ではありません")
    timelike = (U[:, neg][:, 0] / math.sqrt(-eig[neg][0])) @ B
    spacelike = (U[:, pos] / np.sqrt(eig[pos])).T @ B
    return timelike, spacelike


def sphere_chart_intersection(plane_basis: Iterable[Any], frame: ChartFrame,
                              tol: Optional[Tolerance] = None) -> QuadricSlice:
    """
    共形球面（ローレンツ部分空間 V のヌル直線）とチャートの交わり

    ξ∞ ∈ V なら空間的 (k−1) 平面。そうでなければ ι(Z) ⊥ V^⊥ を展開して

        q(Z − z0) = κ,   normals·Z + offsets = 0

    を得る。二次式は ⟨y, ξ∞⟩ = 1 となる y ∈ V^⊥ から、アフィン拘束は
    ⟨y, ξ∞⟩ = 0 となる y から来る。y は中心 z0 が拘束を満たすように選ぶ
    （ξ∞ の V^⊥ 成分が非ヌルなら y はその定数倍）。κ はどちらの符号も
    とりうる：ξ∞ の V^⊥ 成分 ξ⊥ が非ヌルなら κ = 1/(4 q(ξ⊥)) で、
    ξ⊥ が時間的なら二葉双曲面の一葉、空間的なら一葉双曲面。

    Args:
        plane_basis: V の基底（(k+1) 本の環境ベクトル）
        frame: チャート座標系

    Returns:
        SpacelikePlane | HyperboloidSheet
    """
    tol = resolve(tol)
    B = np.atleast_2d(np.asarray(list(plane_basis), dtype=float))
    _lorentz_split(B, tol)
    n = frame.dim
    G = ambient_metric(n)
    g = eta(n)
    Y = null_space(B @ G).T
    a = Y @ G @ frame.xi_inf
    if np.linalg.norm(a) <= tol.tau:
        return _affine_slice(B, frame, tol)

    # ⟨ι(Z), y_j⟩ = a_j q(Z) + L_j·Z + c_j
    L = Y @ G @ frame.block_basis.T
    c = Y @ G @ frame.xi_zero
    alpha = a / float(a @ a)
    W = null_space(a[None, :]).T
    l, c0 = alpha @ L, float(alpha @ c)
    Lw, cw = W @ L, W @ c
    if len(Lw):
        sizes = np.linalg.norm(Lw, axis=1)
        if sizes.min() <= tol.tau:
            raise PreconditionError("球面がチャートと交わりません（V が ξ∞ に直交）")
        M = Lw @ g @ Lw.T / 2.0
        beta, *_ = np.linalg.lstsq(M, cw - Lw @ g @ l / 2.0, rcond=None)
        l, c0 = l + beta @ Lw, c0 + float(beta @ cw)
        normals, offsets = Lw / sizes[:, None], cw / sizes
    else:
        normals, offsets = np.zeros((0, n)), np.zeros(0)
    center = -(g @ l) / 2.0
    kappa = q1n(l) / 4.0 - c0
    logger.debug("球面の交わり: kappa=%.6g, 拘束 %d 本", kappa, len(offsets))
    return HyperboloidSheet(center, kappa, normals, offsets)


def _affine_slice(B: np.ndarray, frame: ChartFrame, tol: Tolerance) -> SpacelikePlane:
    n = frame.dim
    G = ambient_metric(n)
    a = -2.0 * bilinear2n_rows(B, frame.xi_inf)
    Z = B @ G @ frame.block_basis.T
    Z[:, -1] = -Z[:, -1]
    point = (a / float(a @ a)) @ Z
    D = null_space(a[None, :]).T @ Z
    M = D @ eta(n) @ D.T
    eig, U = np.linalg.eigh(M)
    keep = eig > tol.tau * max(1.0, float(np.abs(eig).max()))
    basis = (U[:, keep] / np.sqrt(eig[keep])).T @ D
    return SpacelikePlane(point, basis)


def sample_conformal_sphere(plane_basis: Iterable[Any], frame: ChartFrame, count: int,
                            seed: int = 0, min_pairing: float = 1e-3,
                            tol: Optional[Tolerance] = None) -> np.ndarray:
    """
    共形球面の点をチャート座標で標本化する

    ±(e0 + w·E)（w は単位球面上の乱数）のうち ⟨·, ξ∞⟩ < −min_pairing
    のものを座標に直して返す。
    """
    tol = resolve(tol)
    B = np.atleast_2d(np.asarray(list(plane_basis), dtype=float))
    timelike, spacelike = _lorentz_split(B, tol)
    rng = np.random.default_rng(seed)
    k = spacelike.shape[0]
    W = rng.normal(size=(count, k))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    U = timelike + W @ spacelike
    U = np.vstack((U, -U))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    pairing = bilinear2n_rows(U, frame.xi_inf)
    coords, _ = _coords_rows(frame, U[pairing < -min_pairing], tol.tau)
    return coords


# ---------------------------------------------------------------------------
# 共形性
# ---------------------------------------------------------------------------

def conformal_factor(X: ChartPoint, h: float = 1e-5) -> ConformalCheck:
    """
    lift_to_chart の引き戻し計量と平坦計量の比例性を差分で調べる

    J を (x, t) ∈ ℝ^{n+1} への中心差分ヤコビアンとして
    Jᵀ diag(1, …, 1, −1) J = Ω²·η を確かめ、Ω² と相対残差を返す。
    """
    frame = X.frame
    n = frame.dim
    steps = np.eye(n) * h
    points = np.vstack((X.X + steps, X.X - steps))
    xs, ts = lift_to_chart_array(frame, points)
    lifted = np.hstack((xs, ts[:, None]))
    J = ((lifted[:n] - lifted[n:]) / (2.0 * h)).T
    G_ein = np.diag([1.0] * n + [-1.0])
    P = J.T @ G_ein @ J
    g = eta(n)
    omega_sq = float(np.trace(P @ g)) / n
    residual = float(np.linalg.norm(P - omega_sq * g) / abs(omega_sq))
    return ConformalCheck(omega_sq, residual)
