"""ダイヤモンドの分類・共形球面からのダイヤモンド・非連結な共通部分の反例

普遍被覆のダイヤモンド I(p, q)（q が過去頂点、p が未来頂点）は
d = d(q.x, p.x)、Δt = p.t − q.t によって

    Δt ≤ d            … EmptyInterior
    d < Δt < 2π − d   … MinkowskiLike
    Δt = 2π − d       … AffineChart (d = 0) / NullHalfSpace (d > 0)
    Δt > 2π − d       … ConjugateCylinder（内部に共役点の対を含む）

に分かれる。この閾値は find_conjugate_pair と contains_complete_photon の
総当たり探索と突き合わせて確認する。
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import null_space

from hikari.core.config import resolve
from hikari.core.errors import EmptyIntersectionError, PreconditionError
from hikari.core.models import (
    ChartFrame,
    ChartPoint,
    CounterexampleReport,
    CounterexampleScene,
    Diamond,
    DiamondKind,
    Orientation,
    PhotonSegment,
    RelationTag,
    SampleCloud,
    Tolerance,
    UniPoint,
)
from hikari.geometry import charts
from hikari.geometry.connectivity import components
from hikari.universe.causality import (
    classify,
    diamond_contains_array,
    relation_margins,
    sphere_distance,
    sphere_distance_array,
)
from hikari.universe.cover import TWO_PI, deck_sigma

logger = logging.getLogger(__name__)

# 光子の完全区間を内部で確かめるときに両端から削る長さ
PHOTON_TRIM = 1e-4
# これより少ない点群は退化とみなす
MIN_CLOUD_POINTS = 100


# ---------------------------------------------------------------------------
# 分類と総当たり探索
# ---------------------------------------------------------------------------

def classify_diamond(D: Diamond, tol: Optional[Tolerance] = None) -> DiamondKind:
    """
    ダイヤモンドを分類する

    Args:
        D: ダイヤモンド
        tol: 許容誤差（閾値の判定に classification_band を使う）

    Returns:
        DiamondKind: 分類

    Examples:
        >>> classify_diamond(Diamond(UniPoint([1, 0, 0], 0), UniPoint([1, 0, 0], 2 * math.pi)))
        <DiamondKind.AFFINE_CHART: 'AffineChart'>
    """
    tol = resolve(tol)
    band = tol.band
    d = sphere_distance(D.past.x, D.future.x, tol)
    dt = D.future.t - D.past.t
    if dt <= d + band:
        return DiamondKind.EMPTY_INTERIOR
    if dt > TWO_PI - d + band:
        return DiamondKind.CONJUGATE_CYLINDER
    if abs(dt - TWO_PI) <= band and d <= band:
        return DiamondKind.AFFINE_CHART
    if abs(dt - (TWO_PI - d)) <= band and d > band:
        return DiamondKind.NULL_HALF_SPACE
    return DiamondKind.MINKOWSKI_LIKE


def great_circle_grid(a: np.ndarray, b: np.ndarray, density: int) -> np.ndarray:
    """a と b を通る大円上の等間隔点（a, b, −a, −b を含む）"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    f = b - np.dot(a, b) * a
    if np.linalg.norm(f) < 1e-9:
        f = null_space(a[None, :])[:, 0]
    f = f / np.linalg.norm(f)
    angles = TWO_PI * np.arange(density) / density
    grid = np.cos(angles)[:, None] * a + np.sin(angles)[:, None] * f
    return np.vstack((grid, b, -a, -b))


def find_conjugate_pair(D: Diamond, grid_density: int = 64,
                        tol: Optional[Tolerance] = None) -> Optional[Tuple[UniPoint, UniPoint]]:
    """
    内部にある共役点の対 (r, σ(r)) を格子探索で探す

    r = (x, t) の x は頂点を通る大円上、t は [q.t, p.t − π] の等分点と
    解析的な可能区間の中点。どちらも開ダイヤモンドに入ることを確かめる。
    """
    tol = resolve(tol)
    past, future = D.past, D.future
    if future.t - past.t <= math.pi:
        return None
    xs = great_circle_grid(past.x, future.x, grid_density)
    lo = past.t + sphere_distance_array(xs, past.x)
    hi = future.t - TWO_PI + sphere_distance_array(xs, future.x)
    base = np.linspace(past.t, future.t - math.pi, grid_density)
    ts = np.hstack((np.tile(base, (len(xs), 1)), ((lo + hi) / 2.0)[:, None]))
    X = np.repeat(xs, ts.shape[1], axis=0)
    T = ts.ravel()
    ok = diamond_contains_array(D, X, T, tol) & diamond_contains_array(D, -X, T + math.pi, tol)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    r = UniPoint(X[hits[0]], T[hits[0]])
    logger.debug("共役点の対を発見: t = %.6f", r.t)
    return r, deck_sigma(r, 1)


def _tangent_grid(x0: np.ndarray, density: int) -> np.ndarray:
    basis = null_space(x0[None, :]).T
    if basis.shape[0] == 1:
        return np.vstack((basis, -basis))
    angles = TWO_PI * np.arange(density) / density
    circle = np.cos(angles)[:, None] * basis[0] + np.sin(angles)[:, None] * basis[1]
    rest = basis[2:]
    return np.vstack((circle, rest, -rest))


def contains_complete_photon(D: Diamond, grid_density: int = 64,
                             tol: Optional[Tolerance] = None) -> Optional[PhotonSegment]:
    """
    開ダイヤモンドに（両端を除いて）含まれる長さ π の光子を探す

    始点 r0 = (x0, t0) は頂点を通る大円上の格子点、t0 は
    [q.t + d(x0, q.x), p.t − 2π + d(x0, p.x)] の中から取り、
    r(ε) ∈ I⁺(q) と r(π − ε) ∈ I⁻(p) を厳密に確かめる（ε = PHOTON_TRIM）。
    """
    tol = resolve(tol)
    past, future = D.past, D.future
    if future.t - past.t <= math.pi:
        return None
    xs = great_circle_grid(past.x, future.x, grid_density)
    early = past.t + sphere_distance_array(xs, past.x)
    late = future.t - TWO_PI + sphere_distance_array(xs, future.x)
    eps = PHOTON_TRIM
    for x0, t_early, t_late in zip(xs, early, late):
        if t_late < t_early - tol.band:
            continue
        t_late = max(t_late, t_early)
        ts = np.unique(np.concatenate(([t_early, t_late], np.linspace(t_early, t_late, 9))))
        us = _tangent_grid(x0, grid_density)
        T0 = np.repeat(ts, len(us))
        U = np.tile(us, (len(ts), 1))
        start_x = math.cos(eps) * x0 + math.sin(eps) * U
        end_x = math.cos(math.pi - eps) * x0 + math.sin(math.pi - eps) * U
        dt1, m1 = relation_margins(past.x, past.t, start_x, T0 + eps)
        dt2, m2 = relation_margins(end_x, T0 + math.pi - eps, future.x, future.t)
        ok = (dt1 > 0) & (m1 > tol.band) & (dt2 > 0) & (m2 > tol.band)
        hits = np.flatnonzero(ok)
        if hits.size:
            i = hits[0]
            logger.debug("完全な光子を発見: t0 = %.6f", T0[i])
            return PhotonSegment(UniPoint(x0, T0[i]), U[i], (0.0, math.pi), Orientation.FUTURE)
    return None


# ---------------------------------------------------------------------------
# 共形球面から作るダイヤモンド
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereDiamonds:
    """チャートの {時刻 0} 内の球 B(0, r) が定める2つのダイヤモンド

    inner は B のコーシー発展 {|w̄| < r − |w_n|}、
    outer は閉球と因果的に無関係な点 {|w̄| > r + |w_n|} の普遍被覆での姿。
    """
    radius: float
    inner: Diamond
    outer: Diamond

    def inner_contains(self, W) -> np.ndarray:
        W = np.atleast_2d(np.asarray(W, dtype=float))
        return np.linalg.norm(W[:, :-1], axis=1) < self.radius - np.abs(W[:, -1])

    def outer_contains(self, W) -> np.ndarray:
        W = np.atleast_2d(np.asarray(W, dtype=float))
        return np.linalg.norm(W[:, :-1], axis=1) > self.radius + np.abs(W[:, -1])


def diamonds_from_sphere(r: float, frame: ChartFrame,
                         tol: Optional[Tolerance] = None) -> SphereDiamonds:
    """
    半径 r の球から内側 D と外側 D′ のダイヤモンドを作る

    D = I(q₊, q₋)（q± は (0, ±r) の持ち上げ）、
    D′ = I(σ(q₋), σ⁻¹(q₊))。
    """
    if not r > 0.0:
        raise PreconditionError("球の半径は正")
    n = frame.dim
    apex = np.zeros(n)
    apex[-1] = r
    q_plus = charts.lift_to_chart(ChartPoint(apex, frame), tol)
    q_minus = charts.lift_to_chart(ChartPoint(-apex, frame), tol)
    inner = Diamond(past=q_minus, future=q_plus)
    outer = Diamond(past=deck_sigma(q_plus, -1), future=deck_sigma(q_minus, 1))
    return SphereDiamonds(float(r), inner, outer)


# ---------------------------------------------------------------------------
# ロクソドロミック変換と反例
# ---------------------------------------------------------------------------

def loxodromic(lam: float, n: int) -> np.ndarray:
    """
    ヌル座標 (x, a, b)、a = y + z、b = y − z で diag(I, λ⁻¹, λ) となる線形写像

    Returns:
        np.ndarray: チャート座標 (x, y, z) に作用する n×n 行列
    """
    if not lam > 1.0:
        raise PreconditionError(f"lambda は 1 より大きくなければなりません: {lam}")
    if n < 2:
        raise PreconditionError("n ≥ 2 が必要です")
    c = (1.0 / lam + lam) / 2.0
    s = (1.0 / lam - lam) / 2.0
    M = np.eye(n)
    M[n - 2:, n - 2:] = [[c, s], [s, c]]
    return M


def null_coordinates(W) -> np.ndarray:
    """(x, y, z) → (x, a, b)"""
    W = np.array(W, dtype=float)
    y, z = W[..., -2].copy(), W[..., -1].copy()
    W[..., -2] = y + z
    W[..., -1] = y - z
    return W


def from_null_coordinates(V) -> np.ndarray:
    """(x, a, b) → (x, y, z)"""
    V = np.array(V, dtype=float)
    a, b = V[..., -2].copy(), V[..., -1].copy()
    V[..., -2] = (a + b) / 2.0
    V[..., -1] = (a - b) / 2.0
    return V


def standard_frame(n: int, tol: Optional[Tolerance] = None) -> ChartFrame:
    """中心 (e₁, 0) のチャート"""
    e1 = np.zeros(n)
    e1[0] = 1.0
    return charts.frame_for(UniPoint(e1, 0.0), tol)


def _sample_inside(rng: np.random.Generator, sphere: SphereDiamonds, count: int, n: int) -> np.ndarray:
    """[−1, 1]^n の棄却法で D の点を count 個集める"""
    chunks = []
    total = 0
    while total < count:
        batch = rng.uniform(-1.0, 1.0, size=(max(4 * (count - total), 1024), n))
        batch = batch[sphere.inner_contains(batch)]
        chunks.append(batch)
        total += len(batch)
    return np.vstack(chunks)[:count]


def _x_slice_matches(gamma: np.ndarray, inner: SphereDiamonds, outer: SphereDiamonds,
                     n: int, r_inner: float) -> bool:
    """{y = z = 0} スライスが円環 r < |x| < 1 に一致するかを半径の格子で確かめる"""
    rho = np.linspace(0.0, 1.5, 3001)
    direction = np.zeros(n)
    direction[0] = 1.0
    W = rho[:, None] * direction
    if not np.allclose(W @ gamma.T, W, rtol=0.0, atol=1e-12):
        return False
    inverse = np.linalg.solve(gamma, W.T).T
    member = inner.inner_contains(inverse) & outer.outer_contains(W)
    expected = (rho > r_inner) & (rho < 1.0)
    away = (np.abs(rho - r_inner) > 1e-12) & (np.abs(rho - 1.0) > 1e-12)
    return bool(np.all(member[away] == expected[away]))


def _yz_sample_count(gamma: np.ndarray, inner: SphereDiamonds, outer: SphereDiamonds,
                     n: int, resolution: int = 401) -> int:
    """(y, z) 平面の D の格子点を γ で送り、D′ に入る点を数える"""
    grid = np.linspace(-1.0, 1.0, resolution)
    a, b = np.meshgrid(grid, grid, indexing="ij")
    V = np.zeros((a.size, n))
    V[:, -2] = a.ravel()
    V[:, -1] = b.ravel()
    W = from_null_coordinates(V)
    W = W[inner.inner_contains(W)]
    return int(np.sum(outer.outer_contains(W @ gamma.T)))


def counterexample_scene(scene: CounterexampleScene,
                         tol: Optional[Tolerance] = None) -> CounterexampleReport:
    """
    γ_k.D ∩ D′ の厳密なスライス判定と標本化による連結成分数

    D は半径 1、D′ は半径 r_inner の球から作る。
    D の中で一様に標本化し、γ_k で送って D′ に入る点を残す。

    Args:
        scene: シーン
        tol: 許容誤差

    Returns:
        CounterexampleReport: スライス判定・成分数・点群
    """
    n = scene.n
    frame = standard_frame(n, tol)
    ball = diamonds_from_sphere(1.0, frame, tol)
    hole = diamonds_from_sphere(scene.r_inner, frame, tol)
    gamma = np.linalg.matrix_power(loxodromic(scene.lam, n), scene.k)

    logger.info("反例の点群を生成中（k=%d, samples=%d）", scene.k, scene.samples)
    rng = np.random.default_rng(scene.seed)
    image = _sample_inside(rng, ball, scene.samples, n) @ gamma.T
    cloud = SampleCloud(image[hole.outer_contains(image)], scene.seed, scene.to_dict())

    degenerate = len(cloud) < MIN_CLOUD_POINTS
    if degenerate:
        logger.warning("点群が %d 点しかありません（%d 点未満）", len(cloud), MIN_CLOUD_POINTS)
    if len(cloud):
        min_size = min(scene.knn + 1, len(cloud))
        count, labels = components(cloud, scene.knn, min_size=min_size, nearest=True)
    else:
        count, labels = 0, np.zeros(0, dtype=int)

    threshold = max(0, math.ceil(math.log(1.0 / scene.r_inner) / math.log(scene.lam) - 1e-12))
    return CounterexampleReport(
        scene=scene,
        x_slice=(scene.r_inner, 1.0),
        x_slice_verified=_x_slice_matches(gamma, ball, hole, n, scene.r_inner),
        yz_plane_empty=scene.lam ** (-scene.k) <= scene.r_inner + 1e-12,
        yz_sampled_points=_yz_sample_count(gamma, ball, hole, n),
        threshold_k=threshold,
        components=count,
        noise_points=int(np.sum(labels < 0)),
        cloud=cloud,
        labels=labels,
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# 過去頂点を共有するダイヤモンドの共通部分
# ---------------------------------------------------------------------------

def shared_vertex_intersection_check(p: UniPoint, q1: UniPoint, q2: UniPoint,
                                     probes: int = 100, seed: int = 0,
                                     tol: Optional[Tolerance] = None) -> bool:
    """
    I(p, q1) ∩ I(p, q2) がチャート座標の中点で閉じているか

    Mink_−(p) では両ダイヤモンドが未来錐になるので、そこで共通部分の点を
    作り、普遍被覆の包含判定で確かめてから中点を調べる。

    Raises:
        EmptyIntersectionError: q1, q2 の一方が I⁻(p) にない、または共通点がない
        PreconditionError: ダイヤモンドが共役点を含む
    """
    tol = resolve(tol)
    for q in (q1, q2):
        if classify(q, p, tol).tag is not RelationTag.CHRONO_FUTURE:
            raise EmptyIntersectionError("頂点が p の時間的過去にないため共通部分は空です")
        if p.t - q.t >= TWO_PI - sphere_distance(q.x, p.x, tol) - tol.band:
            raise PreconditionError("ダイヤモンドが共役点を含みます")

    frame = charts.chart_of(p, -1, tol)
    Q = np.array([charts.to_chart(q, frame, tol).X for q in (q1, q2)])
    n = frame.dim
    rng = np.random.default_rng(seed)
    m = 2 * probes
    spatial = Q[:, :-1].mean(axis=0) + rng.normal(scale=0.5, size=(m, n - 1))
    reach = np.max(Q[:, -1][None, :] + np.linalg.norm(spatial[:, None, :] - Q[None, :, :-1], axis=2), axis=1)
    times = reach + rng.exponential(0.5, size=m) + 1e-3
    Z = np.hstack((spatial, times[:, None]))

    first, second = Diamond(q1, p), Diamond(q2, p)

    def inside(points: np.ndarray) -> np.ndarray:
        xs, ts = charts.lift_to_chart_array(frame, points)
        return diamond_contains_array(first, xs, ts, tol) & diamond_contains_array(second, xs, ts, tol)

    Z = Z[inside(Z)]
    if len(Z) < 2:
        raise EmptyIntersectionError("共通部分の点が見つかりません")
    half = len(Z) // 2
    midpoints = (Z[:half] + Z[half:2 * half]) / 2.0
    closed = bool(np.all(inside(midpoints)))
    if not closed:
        logger.warning("中点が共通部分から外れました")
    return closed
