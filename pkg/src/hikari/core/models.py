"""共通データモデル

普遍被覆 S^{n-1}×ℝ の点、二重被覆（零光線の球面）の点、チャート、
退化超平面、正則領域の境界データなど、各モジュールが受け渡す値を定義する。
値はすべて不変（frozen）で、保持する numpy 配列は読み取り専用のコピー。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

# EinPoint の同値判定に使う絶対誤差（二重被覆の代表元は正規化済み）
EIN_EQUALITY_ATOL = 1e-12


def _frozen(values: Any) -> np.ndarray:
    """float 配列の読み取り専用コピーを作る"""
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


def _plain(values: np.ndarray) -> List[float]:
    return [float(v) for v in np.ravel(values)]


@dataclass(frozen=True)
class Tolerance:
    """許容誤差

    tau は等号判定、classification_band は因果関係の境界判定に使う。
    """
    tau: float = 1e-9
    classification_band: float = 1e-6

    def __post_init__(self):
        if not (0.0 < self.tau < self.classification_band < 1.0):
            raise ValueError(
                f"許容誤差は 0 < tau < classification_band < 1 が必要: "
                f"tau={self.tau}, band={self.classification_band}"
            )

    @property
    def band(self) -> float:
        return self.classification_band

    def to_dict(self) -> Dict[str, float]:
        """辞書形式に変換"""
        return {"tau": self.tau, "classificationBand": self.classification_band}


@dataclass(frozen=True, eq=False)
class EinPoint:
    """二重被覆 Ein_{1,n-1} の点（正規化された零ベクトル）

    rep = (u, v, x_1..x_n) で u²+v² = 1, Σx² = 1。
    符号は区別する（射影空間での同一視は same_projective で行う）。
    """
    rep: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rep", _frozen(self.rep))

    @property
    def dim(self) -> int:
        """空間次元 n"""
        return self.rep.shape[0] - 2

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EinPoint):
            return NotImplemented
        if other.rep.shape != self.rep.shape:
            return False
        return bool(np.allclose(self.rep, other.rep, rtol=0.0, atol=EIN_EQUALITY_ATOL))

    __hash__ = None

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {"rep": _plain(self.rep)}


@dataclass(frozen=True, eq=False)
class UniPoint:
    """普遍被覆 S^{n-1}×ℝ の点 (x, t)"""
    x: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x))
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def normalized(cls, x: Any, t: float) -> "UniPoint":
        """x を単位化して作る"""
        x = np.asarray(x, dtype=float)
        return cls(x / np.linalg.norm(x), t)

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def isclose(self, other: "UniPoint", atol: float = 1e-12) -> bool:
        """座標ごとの近さで比較"""
        return bool(
            np.allclose(self.x, other.x, rtol=0.0, atol=atol)
            and abs(self.t - other.t) <= atol
        )

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {"x": _plain(self.x), "t": self.t}


class RelationTag(str, Enum):
    """因果関係のタグ"""
    EQUAL = "Equal"
    CHRONO_FUTURE = "ChronoFuture"
    CHRONO_PAST = "ChronoPast"
    NULL_FUTURE = "NullFuture"
    NULL_PAST = "NullPast"
    SPACELIKE = "Spacelike"

    @property
    def is_future_causal(self) -> bool:
        """等号を含む未来向き因果関係か"""
        return self in (RelationTag.EQUAL, RelationTag.CHRONO_FUTURE, RelationTag.NULL_FUTURE)

    @property
    def is_past_causal(self) -> bool:
        return self in (RelationTag.EQUAL, RelationTag.CHRONO_PAST, RelationTag.NULL_PAST)


@dataclass(frozen=True)
class CausalRelation:
    """2点の因果関係

    margin = |Δt| − d（正なら時間的、負なら空間的）。
    boundary は判定帯の中でヌルと判定されたことを示す。
    """
    tag: RelationTag
    margin: float
    boundary: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {"tag": self.tag.value, "margin": self.margin, "boundary": self.boundary}


class Orientation(str, Enum):
    """時間の向き（正則領域・光子の向き）"""
    FUTURE = "future"
    PAST = "past"

    @property
    def sign(self) -> int:
        return 1 if self is Orientation.FUTURE else -1


@dataclass(frozen=True, eq=False)
class PhotonSegment:
    """光子（大円に沿うヌル曲線）の区間

    曲線は (cos s·x + sin s·u, t ± s)、s ∈ s_range。
    """
    base: UniPoint
    tangent: np.ndarray
    s_range: Tuple[float, float] = (0.0, np.pi)
    orientation: Orientation = Orientation.FUTURE

    def __post_init__(self):
        object.__setattr__(self, "tangent", _frozen(self.tangent))
        lo, hi = self.s_range
        object.__setattr__(self, "s_range", (float(lo), float(hi)))

    @property
    def length(self) -> float:
        return self.s_range[1] - self.s_range[0]

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {
            "base": self.base.to_dict(),
            "tangent": _plain(self.tangent),
            "sRange": list(self.s_range),
            "orientation": self.orientation.value,
        }


@dataclass(frozen=True, eq=False)
class Diamond:
    """ダイヤモンド I(future, past) の頂点対

    future は past の因果的未来（または等しい）でなければならない。
    """
    past: UniPoint
    future: UniPoint
    band: float = 1e-6

    def __post_init__(self):
        from hikari.core.errors import PreconditionError
        from hikari.universe.causality import sphere_distance

        d = sphere_distance(self.past.x, self.future.x)
        if self.future.t - self.past.t < d - self.band:
            raise PreconditionError("ダイヤモンドの未来頂点が過去頂点の因果的未来にありません")

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {"past": self.past.to_dict(), "future": self.future.to_dict()}


class DiamondKind(str, Enum):
    """ダイヤモンドの分類"""
    EMPTY_INTERIOR = "EmptyInterior"
    MINKOWSKI_LIKE = "MinkowskiLike"
    NULL_HALF_SPACE = "NullHalfSpace"
    AFFINE_CHART = "AffineChart"
    CONJUGATE_CYLINDER = "ConjugateCylinder"


@dataclass(frozen=True, eq=False)
class SampleCloud:
    """チャート座標の点群"""
    points: np.ndarray
    seed: int
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 2:
            points = points.reshape(len(points), -1)
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class CounterexampleScene:
    """非連結な共通部分を作る反例のシーン"""
    n: int = 3
    lam: float = 2.0
    k: int = 3
    r_inner: float = 0.5
    samples: int = 20000
    seed: int = 42
    knn: int = 10

    # JSON のキー名 → フィールド名
    KEYS = {
        "n": "n", "lambda": "lam", "k": "k", "r_inner": "r_inner",
        "samples": "samples", "seed": "seed", "knn": "knn",
    }

    def __post_init__(self):
        from hikari.core.errors import PreconditionError

        if self.n < 3:
            raise PreconditionError(f"反例には n ≥ 3 が必要です: n={self.n}")
        if not self.lam > 1.0:
            raise PreconditionError(f"lambda は 1 より大きくなければなりません: {self.lam}")
        if not 0.0 < self.r_inner < 1.0:
            raise PreconditionError(f"r_inner は (0, 1) の範囲: {self.r_inner}")
        if self.k < 0 or self.samples < 1 or self.knn < 1:
            raise PreconditionError("k ≥ 0, samples ≥ 1, knn ≥ 1 が必要です")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CounterexampleScene":
        """JSON 由来の辞書から作る（未知のキーは拒否）"""
        from hikari.core.errors import SchemaError

        unknown = sorted(set(data) - set(cls.KEYS))
        if unknown:
            raise SchemaError(f"未知のキー: {', '.join(unknown)}")
        kwargs = {}
        for key, name in cls.KEYS.items():
            if key not in data:
                continue
            value = data[key]
            expected = float if name in ("lam", "r_inner") else int
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SchemaError(f"{key} は数値でなければなりません")
            if expected is int and float(value) != int(value):
                raise SchemaError(f"{key} は整数でなければなりません")
            kwargs[name] = expected(value)
        return cls(**kwargs)

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換（JSON のキー名）"""
        return {key: getattr(self, name) for key, name in self.KEYS.items()}


@dataclass(frozen=True, eq=False)
class ChartFrame:
    """アフィンチャート Mink_0(center) の座標系

    block_basis の行は xi_inf, xi_zero の直交補空間の正規直交基底で、
    空間方向を先に、時間方向 v0 を最後に並べる。
    """
    xi_inf: np.ndarray
    xi_zero: np.ndarray
    block_basis: np.ndarray
    center: UniPoint

    def __post_init__(self):
        object.__setattr__(self, "xi_inf", _frozen(self.xi_inf))
        object.__setattr__(self, "xi_zero", _frozen(self.xi_zero))
        object.__setattr__(self, "block_basis", _frozen(self.block_basis))

    @property
    def v0(self) -> np.ndarray:
        """未来向きの単位時間的ベクトル"""
        return self.block_basis[-1]

    @property
    def dim(self) -> int:
        """チャートの次元 n（時間座標を含む）"""
        return self.block_basis.shape[0]


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """チャートのミンコフスキー座標（時間座標は最後）"""
    X: np.ndarray
    frame: ChartFrame

    def __post_init__(self):
        object.__setattr__(self, "X", _frozen(self.X))

    def to_dict(self) -> Dict[str, Any]:
        return {"X": _plain(self.X)}


@dataclass(frozen=True, eq=False)
class NullHyperplaneCoords:
    """円柱モデルでの退化超平面 {Z : −⟨Z − p0, v⟩ = s}

    v は ⟨v, v0⟩ = −1 に正規化された未来向きヌルベクトル。
    sheet は対応する境界点が 𝒥⁺ (+1) か 𝒥⁻ (−1) か。
    """
    v: np.ndarray
    s: float
    sheet: int = 1

    def __post_init__(self):
        object.__setattr__(self, "v", _frozen(self.v))
        object.__setattr__(self, "s", float(self.s))

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {"v": _plain(self.v), "s": self.s}


@dataclass(frozen=True, eq=False)
class SpacelikePlane:
    """球面とチャートの交わり（xi_inf を含む場合）：空間的アフィン平面"""
    point: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", _frozen(self.point))
        object.__setattr__(self, "basis", _frozen(self.basis))


@dataclass(frozen=True, eq=False)
class HyperboloidSheet:
    """球面とチャートの交わり：二次曲面とアフィン部分空間の共通部分

    交点 Z は q(Z − center) = kappa と normals·Z + offsets = 0 を満たす。
    kappa < 0 なら二葉双曲面の一葉、kappa > 0 なら一葉双曲面。
    center はアフィン部分空間の中にとる。
    """
    center: np.ndarray
    kappa: float
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(self.center))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "normals", _frozen(np.reshape(self.normals, (-1, self.center.size))))
        object.__setattr__(self, "offsets", _frozen(np.ravel(self.offsets)))

    @property
    def two_sheeted(self) -> bool:
        return self.kappa < 0.0

    @property
    def radius_sq(self) -> float:
        return abs(self.kappa)

    def _norm(self, Z: Any) -> np.ndarray:
        D = np.atleast_2d(np.asarray(Z, dtype=float)) - self.center
        return np.sum(D[:, :-1] ** 2, axis=1) - D[:, -1] ** 2

    def residual(self, Z: Any) -> np.ndarray:
        """q(Z − center) − kappa"""
        return self._norm(Z) - self.kappa

    def normalized_norm(self, Z: Any) -> np.ndarray:
        """q(Z − center)/|kappa|（交点では kappa の符号）"""
        return self._norm(Z) / self.radius_sq

    def constraint_residual(self, Z: Any) -> np.ndarray:
        """各点のアフィン拘束の最大残差（拘束がなければ 0）"""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if not len(self.offsets):
            return np.zeros(len(Z))
        return np.abs(Z @ self.normals.T + self.offsets).max(axis=1)


@dataclass(frozen=True)
class ConformalCheck:
    """共形性の数値チェック結果"""
    omega_sq: float
    residual: float


class Membership(str, Enum):
    """正則領域に対する点の位置"""
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """正則領域を定める境界データ Λ（ヌル超平面の有限族）"""
    planes: Tuple[NullHyperplaneCoords, ...]
    orientation: Orientation
    frame: ChartFrame
    unbounded: bool = False

    def __post_init__(self):
        object.__setattr__(self, "planes", tuple(self.planes))
        object.__setattr__(self, "orientation", Orientation(self.orientation))

    def __len__(self) -> int:
        return len(self.planes)

    @property
    def normals(self) -> np.ndarray:
        """v_i を並べた (m, n) 配列"""
        if not self.planes:
            return np.zeros((0, self.frame.dim))
        return np.array([plane.v for plane in self.planes])

    @property
    def levels(self) -> np.ndarray:
        return np.array([plane.s for plane in self.planes], dtype=float)

    def with_plane(self, plane: NullHyperplaneCoords) -> "BoundaryData":
        """平面を1枚追加した境界データ"""
        return BoundaryData(self.planes + (plane,), self.orientation, self.frame, self.unbounded)

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換（Λファイル形式）"""
        return {
            "orientation": self.orientation.value,
            "planes": [plane.to_dict() for plane in self.planes],
            "center": self.frame.center.to_dict(),
            "unbounded": self.unbounded,
        }


@dataclass(frozen=True, eq=False)
class RegularDomain:
    """正則領域（強未来/強過去半空間の共通部分）"""
    data: BoundaryData
    proper: bool = False

    @property
    def frame(self) -> ChartFrame:
        return self.data.frame

    @property
    def orientation(self) -> Orientation:
        return self.data.orientation


@dataclass(frozen=True)
class RegularityVerdict:
    """正則性判定：regular と上界 C（空のΛでは None）"""
    regular: bool
    bound: Optional[float] = None


@dataclass(frozen=True, eq=False)
class ExitRecord:
    """p から過去向きヌル方向 w に沿った出口点（非有界なら point = None）"""
    direction: np.ndarray
    parameter: Optional[float] = None
    point: Optional[np.ndarray] = None
    plane_index: Optional[int] = None

    @property
    def unbounded(self) -> bool:
        return self.point is None

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {
            "direction": _plain(self.direction),
            "parameter": self.parameter,
            "point": None if self.point is None else _plain(self.point),
            "planeIndex": self.plane_index,
            "unbounded": self.unbounded,
        }


@dataclass
class ReconstructionReport:
    """過去 I⁻(p) の再構成チェック結果"""
    probes: int
    mismatches: int
    excluded: int
    seed: int
    directions: int
    mismatched_points: List[List[float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換"""
        return {
            "probes": self.probes,
            "mismatches": self.mismatches,
            "excluded": self.excluded,
            "seed": self.seed,
            "directions": self.directions,
            "mismatchedPoints": self.mismatched_points,
            "passed": self.passed,
        }


@dataclass
class CounterexampleReport:
    """反例シーンの結果"""
    scene: CounterexampleScene
    x_slice: Tuple[float, float]
    x_slice_verified: bool
    yz_plane_empty: bool
    yz_sampled_points: int
    threshold_k: int
    components: int
    noise_points: int
    cloud: SampleCloud
    labels: np.ndarray
    degenerate: bool = False

    def slices_dict(self) -> Dict[str, Any]:
        """スライスの厳密判定（slices.json の中身）"""
        return {
            "x_slice_annulus": list(self.x_slice),
            "x_slice_nonempty": self.x_slice[0] < self.x_slice[1],
            "x_slice_verified": self.x_slice_verified,
            "yz_plane_empty": self.yz_plane_empty,
            "yz_sampled_points": self.yz_sampled_points,
        }

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式に変換（report.json の中身）"""
        return {
            "components": self.components,
            "noise_points": self.noise_points,
            "cloud_points": len(self.cloud),
            "degenerate": self.degenerate,
            "threshold_k": self.threshold_k,
            "parameters": self.scene.to_dict(),
        }
