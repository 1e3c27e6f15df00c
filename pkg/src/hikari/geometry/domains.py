"""影・正則領域・点の過去の再構成

チャート Mink_0(p) のヌル超平面を円柱モデルの座標 (v, s) で表し、
点 q の影を支持関数 φ_q(v) = −⟨q − p0, v⟩ のエピグラフとして扱う
（φ は未来に向かって増える、という向きの約束）。
未来正則領域は強未来半空間 {φ_q(v_i) > s_i} の共通部分で、
過去正則領域は不等号を逆にしたもの。
"""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from hikari.core.config import default_dimension, resolve
from hikari.core.errors import PreconditionError, SchemaError
from hikari.core.models import (
    BoundaryData,
    ChartFrame,
    ChartPoint,
    EinPoint,
    ExitRecord,
    Membership,
    NullHyperplaneCoords,
    Orientation,
    ReconstructionReport,
    RegularDomain,
    RegularityVerdict,
    Tolerance,
    UniPoint,
)
from hikari.geometry import charts
from hikari.universe.causality import classify, sphere_distance_array
from hikari.universe.cover import normalize_null, project_array

logger = logging.getLogger(__name__)

# strict_convexity_witness の二分法の精度と探索半径
BISECTION_TOL = 1e-12
RAY_LENGTH = 50.0
# 因果曲線の終点の外挿に使う 1/k の次数
EXTRAPOLATION_DEGREE = 2


# ---------------------------------------------------------------------------
# 方向の格子
# ---------------------------------------------------------------------------

def direction_grid(n: int, count: int) -> np.ndarray:
    """
    チャートの空間方向（S^{n-2}）の格子

    n−1 = 1 なら ±1、2 なら等角度、3 ならフィボナッチ格子、
    それ以上は固定シードの正規乱数を単位化したもの。
    """
    m = n - 1
    if m < 1:
        raise PreconditionError("n ≥ 2 が必要です")
    if m == 1:
        return np.array([[1.0], [-1.0]])
    if count < 1:
        raise PreconditionError("方向の数は 1 以上")
    if m == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        return np.column_stack((np.cos(angles), np.sin(angles)))
    if m == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        r = np.sqrt(1.0 - z * z)
        return np.column_stack((r * np.cos(phi), r * np.sin(phi), z))
    grid = np.random.default_rng(0).normal(size=(count, m))
    return grid / np.linalg.norm(grid, axis=1, keepdims=True)


def _directions(n: int, directions: Union[int, np.ndarray]) -> np.ndarray:
    if isinstance(directions, (int, np.integer)):
        return direction_grid(n, int(directions))
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    if U.shape[1] != n - 1:
        raise PreconditionError(f"方向は {n - 1} 次元でなければなりません")
    return U / np.linalg.norm(U, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# 影
# ---------------------------------------------------------------------------

def support(q: ChartPoint, v, tol: Optional[Tolerance] = None) -> float:
    """
    支持関数 φ_q(v) = −⟨q − p0, v⟩（p0 はチャート原点）

    Args:
        q: チャート点
        v: ⟨v, v0⟩ = −1 に正規化されたヌルベクトル

    Returns:
        float: 方向 v での q の超平面の高さ
    """
    tol = resolve(tol)
    v = np.asarray(v, dtype=float)
    charts._check_null_normal(v, tol)
    return -charts.minkowski(q.X, v)


@dataclass(frozen=True)
class ShadowFunction:
    """点 q の影を表す支持関数 v ↦ φ_q(v)"""
    q: ChartPoint

    def __call__(self, v) -> float:
        return support(self.q, v)

    def values(self, V) -> np.ndarray:
        """方向を並べた (m, n) 配列での値"""
        return charts.support_rows(self.q.X, V)[0]


def shadow(q: ChartPoint) -> ShadowFunction:
    """q の影"""
    return ShadowFunction(q)


def shadow_contains(q: ChartPoint, plane: NullHyperplaneCoords,
                    orientation: Orientation = Orientation.FUTURE,
                    tol: Optional[Tolerance] = None) -> bool:
    """
    境界点 (v, s) が q の影に入るか（s ≥ φ_q(v) − tau）

    過去向きでは不等号が逆になる。member とちょうど双対になるよう
    同じ余裕 sign·(φ − s) で判定する。
    """
    tol = resolve(tol)
    sign = Orientation(orientation).sign
    return sign * (support(q, plane.v, tol) - plane.s) <= tol.tau


# ---------------------------------------------------------------------------
# 正則領域
# ---------------------------------------------------------------------------

def margins(domain: RegularDomain, Xs) -> np.ndarray:
    """各点の最小余裕 min_i sign·(φ_X(v_i) − s_i)（Λ が空なら +∞）"""
    Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
    data = domain.data
    if not data.planes:
        return np.full(Xs.shape[0], np.inf)
    phi = charts.support_rows(Xs, data.normals)
    return np.min(data.orientation.sign * (phi - data.levels), axis=1)


def member(domain: RegularDomain, q: ChartPoint, tol: Optional[Tolerance] = None) -> Membership:
    """
    点の位置（Interior / Boundary / Exterior）

    Examples:
        >>> member(future_cone(frame), ChartPoint([0, 0, 1], frame))
        <Membership.INTERIOR: 'Interior'>
    """
    tol = resolve(tol)
    margin = float(margins(domain, q.X)[0])
    if margin > tol.tau:
        return Membership.INTERIOR
    if abs(margin) <= tol.tau:
        return Membership.BOUNDARY
    return Membership.EXTERIOR


def _validate_planes(data: BoundaryData, tol: Tolerance) -> None:
    for plane in data.planes:
        if plane.v.shape != (data.frame.dim,):
            raise PreconditionError("平面の次元がチャートと一致しません")
        charts._check_null_normal(plane.v, tol)


def is_regular(data: BoundaryData, tol: Optional[Tolerance] = None) -> RegularityVerdict:
    """
    正則性の判定

    有限の Λ では常に真で、上界 C = max s_i（過去正則なら min s_i）を返す。
    非有界と宣言された族は偽。
    """
    tol = resolve(tol)
    _validate_planes(data, tol)
    if data.unbounded:
        return RegularityVerdict(False, None)
    if not data.planes:
        return RegularityVerdict(True, None)
    levels = data.levels
    bound = float(levels.max() if data.orientation is Orientation.FUTURE else levels.min())
    return RegularityVerdict(True, bound)


def is_proper(data: BoundaryData, tol: Optional[Tolerance] = None) -> bool:
    """互いに平行でない v_i が2つ以上あるか"""
    tol = resolve(tol)
    if len(data.planes) < 2:
        return False
    U = data.normals[:, :-1]
    gaps = sphere_distance_array(U[:, None, :], U[None, :, :])
    return bool(np.any(gaps > tol.band))


def regular_domain(data: BoundaryData, tol: Optional[Tolerance] = None) -> RegularDomain:
    """境界データから正則領域を作る"""
    tol = resolve(tol)
    verdict = is_regular(data, tol)
    if not verdict.regular:
        raise PreconditionError("境界データが非有界のため正則領域になりません")
    return RegularDomain(data, proper=is_proper(data, tol))


def misner(v1, v2, s1: float, s2: float, frame: ChartFrame,
           tol: Optional[Tolerance] = None) -> RegularDomain:
    """2枚の平行でないヌル超平面で切り取るミスナー領域"""
    tol = resolve(tol)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if np.linalg.norm(v1 - v2) <= tol.band:
        raise PreconditionError("ミスナー領域の2平面は平行であってはなりません")
    planes = (NullHyperplaneCoords(v1, s1), NullHyperplaneCoords(v2, s2))
    data = BoundaryData(planes, Orientation.FUTURE, frame)
    _validate_planes(data, tol)
    return RegularDomain(data, proper=True)


def future_cone(frame: ChartFrame, directions: Union[int, np.ndarray] = 16,
                level: float = 0.0) -> RegularDomain:
    """Λ = {((û_j, 1), level)}：原点の未来錐を外接する多面錐"""
    U = _directions(frame.dim, directions)
    planes = tuple(NullHyperplaneCoords(charts.null_direction(u), level) for u in U)
    return regular_domain(BoundaryData(planes, Orientation.FUTURE, frame))


def from_graph(func: Callable[[np.ndarray], float], count: int, frame: ChartFrame,
               orientation: Orientation = Orientation.FUTURE, unbounded: bool = False) -> BoundaryData:
    """方向球面上の関数 û ↦ s を格子で標本化した境界データ"""
    U = direction_grid(frame.dim, count)
    planes = tuple(NullHyperplaneCoords(charts.null_direction(u), float(func(u))) for u in U)
    return BoundaryData(planes, orientation, frame, unbounded)


def random_boundary(frame: ChartFrame, count: int, rng: np.random.Generator,
                    spread: float = 1.0) -> BoundaryData:
    """ランダムな方向と高さの未来正則な境界データ"""
    n = frame.dim
    U = rng.normal(size=(count, n - 1))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    levels = rng.uniform(-spread, spread, size=count)
    planes = tuple(NullHyperplaneCoords(charts.null_direction(u), s) for u, s in zip(U, levels))
    return BoundaryData(planes, Orientation.FUTURE, frame)


def past_counterpart(domain: RegularDomain, tol: Optional[Tolerance] = None) -> RegularDomain:
    """
    同じ Λ が隣のチャートに定める逆向きの正則領域

    未来正則な Ω ⊂ Mink_0(p) の Λ ⊂ 𝒥⁺(p) は Mink_+(p) では過去境界にあり、
    Λ のどの点とも因果的に関係しない点全体として過去正則領域 Ω⁻(Λ) を定める。
    """
    tol = resolve(tol)
    frame = domain.frame
    sign = domain.orientation.sign
    other = charts.chart_of(frame.center, sign, tol)
    planes = []
    for plane in domain.data.planes:
        oriented = NullHyperplaneCoords(plane.v, plane.s, sign)
        y = charts.hyperplane_to_boundary(oriented, frame, tol)
        planes.append(charts.boundary_to_hyperplane(y, other, tol))
    flipped = Orientation.PAST if sign > 0 else Orientation.FUTURE
    data = BoundaryData(tuple(planes), flipped, other, domain.data.unbounded)
    return RegularDomain(data, proper=domain.proper)


# ---------------------------------------------------------------------------
# Λ ファイル
# ---------------------------------------------------------------------------

_LAMBDA_KEYS = {"orientation", "planes", "center", "unbounded"}


def boundary_data_to_dict(data: BoundaryData) -> Dict[str, Any]:
    """Λ を JSON 用の辞書にする"""
    return data.to_dict()


def load_boundary_data(source: Union[str, Path, Dict[str, Any]],
                       tol: Optional[Tolerance] = None) -> BoundaryData:
    """
    Λ ファイル（またはその辞書）を読む

    形式:
        {"orientation": "future", "planes": [{"v": [...], "s": 0.0}, ...],
         "center": {"x": [...], "t": 0.0}, "unbounded": false}

    v は n 次元のヌルベクトルか、n−1 次元の空間方向 û（v = (û, 1) とする）。
    center を省略すると (e₁, 0)、次元は planes から決める。
    """
    tol = resolve(tol)
    if isinstance(source, dict):
        raw = source
    else:
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise SchemaError(f"Λ ファイルを読めません: {e}") from e
    if not isinstance(raw, dict):
        raise SchemaError("Λ はオブジェクトでなければなりません")
    unknown = sorted(set(raw) - _LAMBDA_KEYS)
    if unknown:
        raise SchemaError(f"未知のキー: {', '.join(unknown)}")
    try:
        orientation = Orientation(raw.get("orientation", "future"))
    except ValueError as e:
        raise SchemaError(f"orientation が不正です: {raw.get('orientation')!r}") from e
    entries = raw.get("planes", [])
    if not isinstance(entries, list):
        raise SchemaError("planes はリストでなければなりません")

    center_raw = raw.get("center")
    try:
        if center_raw is None:
            n = _infer_dimension(entries)
            center = UniPoint(np.eye(n)[0], 0.0)
        else:
            center = UniPoint(center_raw["x"], center_raw["t"])
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"center が不正です: {e}") from e
    frame = charts.frame_for(center, tol)
    n = frame.dim

    planes = []
    for entry in entries:
        if not isinstance(entry, dict) or set(entry) - {"v", "s"} or "v" not in entry or "s" not in entry:
            raise SchemaError("各平面は {v: [...], s: 数値} でなければなりません")
        v = np.asarray(entry["v"], dtype=float)
        if v.shape == (n - 1,):
            v = charts.null_direction(v)
        elif v.shape != (n,):
            raise SchemaError(f"v の長さは {n - 1} か {n} です")
        planes.append(NullHyperplaneCoords(v, float(entry["s"]), orientation.sign))
    data = BoundaryData(tuple(planes), orientation, frame, bool(raw.get("unbounded", False)))
    _validate_planes(data, tol)
    return data


def _infer_dimension(entries: List[Dict[str, Any]]) -> int:
    if not entries:
        return default_dimension()
    v = np.asarray(entries[0]["v"], dtype=float)
    # 単位長なら空間方向 û（n−1 次元）、そうでなければヌルベクトル
    if abs(np.linalg.norm(v) - 1.0) < 1e-9:
        return len(v) + 1
    return len(v)


# ---------------------------------------------------------------------------
# 出口点と過去の再構成
# ---------------------------------------------------------------------------

def _exit_parameters(domain: RegularDomain, P: np.ndarray, W: np.ndarray,
                     tau: float) -> Tuple[np.ndarray, np.ndarray]:
    """P + s·W_k が最初に Λ の平面に達する s と平面番号（なければ inf, −1）"""
    data = domain.data
    k = W.shape[0]
    if not data.planes:
        return np.full(k, np.inf), np.full(k, -1)
    phi_p = charts.support_rows(P, data.normals)[0]
    slope = charts.support_rows(W, data.normals)
    gap = data.levels - phi_p
    valid = np.abs(slope) > tau
    roots = np.full(slope.shape, np.inf)
    np.divide(gap, slope, out=roots, where=valid)
    roots[~valid | (roots <= 0.0)] = np.inf
    index = np.argmin(roots, axis=1)
    best = roots[np.arange(k), index]
    return best, np.where(np.isfinite(best), index, -1)


def lambda_minus(domain: RegularDomain, p: ChartPoint, directions: Union[int, np.ndarray] = 64,
                 tol: Optional[Tolerance] = None) -> List[ExitRecord]:
    """
    p を通るヌル半直線の出口点 Λ⁻(p)

    未来正則領域では過去向き w = −(û, 1) に沿って、φ_{p+s·w}(v_i) = s_i の
    正の根の最小値 s* を求める（φ は s について一次式なので根は厳密）。
    どの平面にも達しない方向は非有界として記録する。

    Args:
        domain: 正則領域
        p: 内部の点
        directions: 方向の数（格子）または (k, n−1) の方向配列

    Returns:
        List[ExitRecord]: 方向ごとの出口
    """
    tol = resolve(tol)
    if member(domain, p, tol) is not Membership.INTERIOR:
        raise PreconditionError("p は領域の内部になければなりません")
    U = _directions(domain.frame.dim, directions)
    sign = domain.orientation.sign
    W = -sign * np.hstack((U, np.ones((len(U), 1))))
    params, index = _exit_parameters(domain, p.X, W, tol.tau)
    records = []
    for w, s, i in zip(W, params, index):
        if np.isfinite(s):
            records.append(ExitRecord(w, float(s), p.X + s * w, int(i)))
        else:
            records.append(ExitRecord(w))
    unbounded = sum(r.unbounded for r in records)
    if unbounded:
        logger.info("%d 方向で出口がありません（非有界）", unbounded)
    return records


def exits_to_frame(records: Sequence[ExitRecord]) -> pd.DataFrame:
    """出口点の一覧を DataFrame にする"""
    rows = []
    for r in records:
        row = {f"w{j + 1}": float(c) for j, c in enumerate(r.direction)}
        row["parameter"] = r.parameter
        n = len(r.direction)
        for j in range(n):
            row[f"e{j + 1}"] = None if r.point is None else float(r.point[j])
        row["plane"] = r.plane_index
        row["unbounded"] = r.unbounded
        rows.append(row)
    return pd.DataFrame(rows)


def _require_future_interior(domain: RegularDomain, p: ChartPoint, tol: Tolerance) -> None:
    if domain.orientation is not Orientation.FUTURE:
        raise PreconditionError("点の過去の再構成は未来正則領域で行います")
    if member(domain, p, tol) is not Membership.INTERIOR:
        raise PreconditionError("p は領域の内部になければなりません")


def pip_reconstruction_check(domain: RegularDomain, p: ChartPoint, probes: int = 1000,
                             seed: int = 0, directions: Union[int, np.ndarray] = 64,
                             tol: Optional[Tolerance] = None) -> ReconstructionReport:
    """
    I⁻(p) ∩ Ω と Λ⁻(p) が定める領域が一致するかを標本点で確かめる

    判定 A: q ≪ p かつ q が Ω の内部。
    判定 B: q ≪ p かつ q がどの出口点とも因果的に関係しない。
    出口点は方向格子に加え、各平面 i について q から v_i 方向のヌル母線が
    p の過去光円錐と交わる方向でも求める。いずれかの余裕が判定帯に入る
    標本点は除外する。
    """
    tol = resolve(tol)
    _require_future_interior(domain, p, tol)
    band = tol.band
    n = domain.frame.dim
    rng = np.random.default_rng(seed)

    depth = min(float(margins(domain, p.X)[0]), 10.0)
    reach = 1.5 * depth + 0.5
    offsets = rng.uniform(-reach, reach, size=(probes, n))
    offsets[:, -1] = -rng.uniform(0.0, reach, size=probes)
    Q = p.X + offsets

    U = _directions(n, directions)
    W_grid = -np.hstack((U, np.ones((len(U), 1))))
    grid_params, _ = _exit_parameters(domain, p.X, W_grid, tol.tau)
    finite = np.isfinite(grid_params)
    grid_exits = p.X + grid_params[finite, None] * W_grid[finite]

    normals = domain.data.normals
    domain_margin = margins(domain, Q)
    mismatches = 0
    excluded = 0
    mismatched_points = []
    for q, m_dom in zip(Q, domain_margin):
        d = p.X - q
        m_chrono = d[-1] - np.linalg.norm(d[:-1])
        if abs(m_chrono) <= band or abs(m_dom) <= band:
            excluded += 1
            continue
        chrono = m_chrono > 0.0
        verdict_a = chrono and m_dom > 0.0
        verdict_b = False
        if chrono:
            exits = grid_exits
            if len(normals):
                dd = charts.minkowski(d, d)
                dv = d[:-1] @ normals[:, :-1].T - d[-1] * normals[:, -1]
                t = dd / (2.0 * dv)
                C = q + t[:, None] * normals
                W = C - p.X
                W = W / (-W[:, -1:])
                params, _ = _exit_parameters(domain, p.X, W, tol.tau)
                ok = np.isfinite(params)
                exits = np.vstack((exits, p.X + params[ok, None] * W[ok]))
            delta = exits - q
            related = delta[:, -1] - np.linalg.norm(delta[:, :-1], axis=1)
            if np.any(np.abs(related) <= band):
                excluded += 1
                continue
            verdict_b = not bool(np.any(related > 0.0))
        if verdict_a != verdict_b:
            mismatches += 1
            mismatched_points.append([float(c) for c in q])
    if mismatches:
        logger.warning("再構成の不一致が %d 件あります", mismatches)
    return ReconstructionReport(
        probes=probes,
        mismatches=mismatches,
        excluded=excluded,
        seed=seed,
        directions=len(U),
        mismatched_points=mismatched_points,
    )


# ---------------------------------------------------------------------------
# 点の過去を Mink_−(p) で見た領域
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PastOfPointDomain:
    """I⁻(p) ∩ Ω を Mink_−(p) の座標で表した領域

    帰属は Mink_−(p) → 普遍被覆 → Mink_0 の座標変換を通して判定する。
    """
    domain: RegularDomain
    apex: ChartPoint
    frame: ChartFrame
    tol: Tolerance

    @property
    def dim(self) -> int:
        return self.frame.dim

    def margins(self, Ys) -> np.ndarray:
        """余裕（正なら内部、チャート0 の外は −1）"""
        Ys = np.atleast_2d(np.asarray(Ys, dtype=float))
        xs, ts = charts.lift_to_chart_array(self.frame, Ys)
        X, inside = charts.to_chart_array(self.domain.frame, xs, ts, self.tol)
        out = np.full(len(Ys), -1.0)
        if np.any(inside):
            Xi = X[inside]
            d = self.apex.X - Xi
            past = d[:, -1] - np.linalg.norm(d[:, :-1], axis=1)
            out[inside] = np.minimum(margins(self.domain, Xi), past)
        return out

    def interior_point(self) -> np.ndarray:
        """Ω ∩ I⁻(p) の点（p から時間方向に少し戻った点）の座標"""
        depth = min(float(margins(self.domain, self.apex.X)[0]), 1.0)
        X = self.apex.X.copy()
        X[-1] -= depth / 2.0
        u = charts.lift_to_chart(ChartPoint(X, self.domain.frame), self.tol)
        return charts.to_chart(u, self.frame, self.tol).X


def pip_domain(domain: RegularDomain, p: ChartPoint,
               tol: Optional[Tolerance] = None) -> PastOfPointDomain:
    """点 p の過去 I⁻(p) ∩ Ω を Mink_−(p) の領域として返す"""
    tol = resolve(tol)
    _require_future_interior(domain, p, tol)
    lifted = charts.lift_to_chart(p, tol)
    return PastOfPointDomain(domain, p, charts.chart_of(lifted, -1, tol), tol)


# ---------------------------------------------------------------------------
# 強凸性の検査
# ---------------------------------------------------------------------------

def _margin_and_anchor(domain: Union[RegularDomain, PastOfPointDomain]
                       ) -> Tuple[Callable[[np.ndarray], np.ndarray], np.ndarray, ChartFrame]:
    if isinstance(domain, PastOfPointDomain):
        return domain.margins, domain.interior_point(), domain.frame
    n = domain.frame.dim
    seed_point = np.zeros(n)
    if domain.data.planes:
        levels = domain.data.levels
        if domain.orientation is Orientation.FUTURE:
            seed_point[-1] = levels.max() + 1.0
        else:
            seed_point[-1] = levels.min() - 1.0
    return (lambda Xs: margins(domain, Xs)), seed_point, domain.frame


def strict_convexity_witness(domain: Union[RegularDomain, PastOfPointDomain], trials: int = 10000,
                             seed: int = 0, tol: Optional[Tolerance] = None
                             ) -> Optional[Tuple[ChartPoint, ChartPoint]]:
    """
    境界に空間的な線分を含むかを探す

    内部のアンカー（箱の中の内部点の平均）から乱数方向の半直線を伸ばし、
    境界との交点を 1e-12 まで二分法で求める。2点の弦が空間的で
    中点も境界（余裕 ±tau 以内）なら、その2点を違反の証拠として返す。

    Returns:
        (ChartPoint, ChartPoint) または None
    """
    tol = resolve(tol)
    margin_of, seed_point, frame = _margin_and_anchor(domain)
    n = frame.dim
    rng = np.random.default_rng(seed)

    box = seed_point + rng.uniform(-0.5, 0.5, size=(256, n))
    box = box[margin_of(box) > tol.band]
    anchor = np.vstack((box, seed_point)).mean(axis=0)
    if margin_of(anchor)[0] <= tol.band:
        anchor = seed_point

    dirs = rng.normal(size=(2 * trials, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    usable = margin_of(anchor + RAY_LENGTH * dirs) <= 0.0
    lo = np.zeros(len(dirs))
    hi = np.full(len(dirs), RAY_LENGTH)
    steps = int(math.ceil(math.log2(RAY_LENGTH / BISECTION_TOL)))
    for _ in range(steps):
        mid = (lo + hi) / 2.0
        inside = margin_of(anchor + mid[:, None] * dirs) > 0.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    B = anchor + ((lo + hi) / 2.0)[:, None] * dirs

    first, second = B[0::2], B[1::2]
    both = usable[0::2] & usable[1::2]
    chords = second - first
    spacelike = charts.q1n_rows(chords) > tol.band
    candidates = np.flatnonzero(both & spacelike)
    if candidates.size == 0:
        return None
    mid_margin = margin_of((first[candidates] + second[candidates]) / 2.0)
    hits = candidates[np.abs(mid_margin) <= tol.tau]
    if hits.size == 0:
        logger.debug("空間的な境界線分は見つかりませんでした（%d 試行）", trials)
        return None
    i = hits[0]
    return ChartPoint(first[i], frame), ChartPoint(second[i], frame)


# ---------------------------------------------------------------------------
# 因果曲線の終点
# ---------------------------------------------------------------------------

def _ray_gaps(reps: np.ndarray) -> np.ndarray:
    a, b = reps[:-1], reps[1:]
    return 2.0 * np.arctan2(np.linalg.norm(a - b, axis=1), np.linalg.norm(a + b, axis=1))


def _richardson_limit(tail: np.ndarray, last_index: int) -> np.ndarray:
    """番号 k の標本が L + a/k + b/k² + O(k⁻³) で近づくとみなして L を最小二乗で求める"""
    k = np.arange(last_index - len(tail) + 1, last_index + 1, dtype=float)
    h = k[-1] / k
    V = np.vander(h, EXTRAPOLATION_DEGREE + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, tail, rcond=None)
    return coef[0]


def causal_endpoint(curve: Sequence[UniPoint], tol: Optional[Tolerance] = None) -> Optional[EinPoint]:
    """
    単調な因果曲線の標本列の終点

    射影した列の末尾で隣り合う角距離が減少し判定帯より小さければ
    収束とみなす。末尾の窓の代表元を 1/k（k は 1 始まりの標本番号）の
    2 次式で当てはめ、k → ∞ へ外挿した点を返す。誤差が 1/k で減る曲線
    （パラメータが等間隔の arctan 型など）でも外挿後の誤差は O(k⁻³)。
    幾何級数的に収束する列では末尾がほぼ定数なので最後の標本とほぼ同じ点になる。

    Raises:
        PreconditionError: 標本が3個未満、または因果的に順序づいていない
    """
    tol = resolve(tol)
    if len(curve) < 3:
        raise PreconditionError("標本は3個以上必要です")
    for a, b in zip(curve[:-1], curve[1:]):
        if not classify(a, b, tol).tag.is_future_causal:
            raise PreconditionError("標本列が因果的に順序づいていません")

    xs = np.array([u.x for u in curve])
    ts = np.array([u.t for u in curve])
    reps = project_array(xs, ts)
    gaps = _ray_gaps(reps)
    window = max(3, len(gaps) // 10)
    tail = gaps[-window:]
    shrinking = np.all(np.diff(tail) <= tol.tau * tail[:-1] + 1e-15)
    if not (shrinking and tail[-1] <= tol.band):
        logger.debug("標本列の末尾が収束していません（最後の間隔 %.3e）", tail[-1])
        return None

    limit = _richardson_limit(reps[-(len(tail) + 1):], len(reps))
    if not np.all(np.isfinite(limit)):
        limit = reps[-1]
    return normalize_null(limit, Tolerance(tau=tol.band / 10.0, classification_band=tol.band))
