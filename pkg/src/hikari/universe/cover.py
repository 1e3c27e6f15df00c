"""二次形式・二重被覆・普遍被覆

符号 (2, n) の二次形式 q(u, v, x) = −u² − v² + Σx² と、
その零光線の球面 Ein（二重被覆）、普遍被覆 S^{n-1}×ℝ の間の
射影・持ち上げ・デッキ変換を扱う。
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np

from hikari.core.config import resolve
from hikari.core.errors import PreconditionError
from hikari.core.models import EinPoint, Tolerance, UniPoint

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
# 持ち上げで単位化を省く |x| − 1 の幅
UNIT_SLACK = 1e-12


def ambient_metric(n: int) -> np.ndarray:
    """(n+2)×(n+2) のグラム行列 diag(−1, −1, 1, …, 1)"""
    return np.diag([-1.0, -1.0] + [1.0] * n)


def q2n(v) -> float:
    """二次形式 q_{2,n}(v)"""
    v = np.asarray(v, dtype=float)
    return float(-v[0] ** 2 - v[1] ** 2 + np.dot(v[2:], v[2:]))


def bilinear2n(a, b) -> float:
    """q_{2,n} の極形式 ⟨a, b⟩"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(-a[0] * b[0] - a[1] * b[1] + np.dot(a[2:], b[2:]))


def bilinear2n_rows(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """行ごとの ⟨A_i, b⟩"""
    A = np.atleast_2d(A)
    return -A[:, 0] * b[0] - A[:, 1] * b[1] + A[:, 2:] @ b[2:]


def normalize_null(vec, tol: Optional[Tolerance] = None) -> EinPoint:
    """零ベクトルを (u,v) 部分と x 部分それぞれ単位化して EinPoint にする"""
    tol = resolve(tol)
    vec = np.asarray(vec, dtype=float)
    uv = np.linalg.norm(vec[:2])
    xs = np.linalg.norm(vec[2:])
    scale = max(uv, xs)
    if scale == 0.0 or not np.all(np.isfinite(vec)):
        raise PreconditionError("零ベクトルまたは非有限の成分は正規化できません")
    if abs(uv * uv - xs * xs) > tol.tau * scale * scale * 1e3 or min(uv, xs) <= tol.tau * scale:
        raise PreconditionError(f"ヌルベクトルではありません: q = {q2n(vec):.3e}")
    return EinPoint(np.concatenate((vec[:2] / uv, vec[2:] / xs)))


def normalize_null_rows(V: np.ndarray) -> np.ndarray:
    """normalize_null の配列版（検査なし）"""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    uv = np.linalg.norm(V[:, :2], axis=1, keepdims=True)
    xs = np.linalg.norm(V[:, 2:], axis=1, keepdims=True)
    return np.hstack((V[:, :2] / uv, V[:, 2:] / xs))


def project(p: UniPoint, tol: Optional[Tolerance] = None) -> EinPoint:
    """
    普遍被覆の点を二重被覆へ射影する

    Args:
        p: 普遍被覆の点 (x, t)
        tol: 許容誤差

    Returns:
        EinPoint: rep = (cos t, sin t, x)

    Examples:
        >>> project(UniPoint([1, 0, 0], 0.0)).rep
        array([1., 0., 1., 0., 0.])
    """
    tol = resolve(tol)
    norm = float(np.linalg.norm(p.x))
    if abs(norm - 1.0) > tol.tau:
        raise PreconditionError(f"x は単位ベクトルでなければなりません: |x| = {norm}")
    # 2π の整数倍は厳密に同じ代表元になるよう先に剰余を取る
    theta = math.remainder(p.t, TWO_PI)
    return EinPoint(np.concatenate(([math.cos(theta), math.sin(theta)], p.x)))


def _wrapped_angles(ts: np.ndarray) -> np.ndarray:
    return np.remainder(np.asarray(ts, dtype=float) + math.pi, TWO_PI) - math.pi


def project_array(xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """project の配列版。(m, n) と (m,) から (m, n+2) の代表元"""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    theta = _wrapped_angles(ts)
    return np.hstack((np.cos(theta)[:, None], np.sin(theta)[:, None], xs))


def _unit_rows(X: np.ndarray) -> np.ndarray:
    """行を単位化する（すでに UNIT_SLACK 以内で単位長の行はそのまま）"""
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    return np.where(np.abs(norms - 1.0) <= UNIT_SLACK, X, X / norms)


def lift_near(e: EinPoint, t_hint: float) -> UniPoint:
    """
    t_hint に最も近い分枝への持ち上げ

    分枝は (t_hint − π, t_hint + π] の中の唯一の t = θ + 2πk。
    e の (u, v) が project の t_hint での値とビット単位で同じなら t_hint を
    そのまま返すので、lift_near(project(p), p.t) は p に厳密に戻る。
    """
    theta_hint = math.remainder(t_hint, TWO_PI)
    if e.rep[0] == math.cos(theta_hint) and e.rep[1] == math.sin(theta_hint):
        t = float(t_hint)
    else:
        theta = math.atan2(e.rep[1], e.rep[0])
        k = math.floor((t_hint + math.pi - theta) / TWO_PI)
        t = theta + TWO_PI * k
    return UniPoint(_unit_rows(e.rep[None, 2:])[0], t)


def lift_near_array(reps: np.ndarray, t_hints) -> Tuple[np.ndarray, np.ndarray]:
    """lift_near の配列版。(x, t) を返す（project_array との往復で厳密に戻る）"""
    reps = np.atleast_2d(np.asarray(reps, dtype=float))
    t_hints = np.broadcast_to(np.asarray(t_hints, dtype=float), reps.shape[:1])
    theta = np.arctan2(reps[:, 1], reps[:, 0])
    k = np.floor((t_hints + math.pi - theta) / TWO_PI)
    hinted = _wrapped_angles(t_hints)
    same = (reps[:, 0] == np.cos(hinted)) & (reps[:, 1] == np.sin(hinted))
    ts = np.where(same, t_hints, theta + TWO_PI * k)
    return _unit_rows(reps[:, 2:]), ts


def deck_sigma(p: UniPoint, k: int = 1) -> UniPoint:
    """σ^k(x, t) = ((−1)^k x, t + kπ)"""
    sign = -1.0 if k % 2 else 1.0
    return UniPoint(sign * p.x, p.t + k * math.pi)


def deck_delta(p: UniPoint, k: int = 1) -> UniPoint:
    """δ^k(x, t) = (x, t + 2πk)"""
    return UniPoint(p.x, p.t + k * TWO_PI)


def is_conjugate(p: UniPoint, q: UniPoint, tol: Optional[Tolerance] = None) -> Optional[int]:
    """q = σ^k(p) となる k ≠ 0 を返す（なければ None）"""
    tol = resolve(tol)
    k = round((q.t - p.t) / math.pi)
    if k == 0:
        return None
    if abs(q.t - p.t - k * math.pi) > tol.tau * max(1.0, abs(k)):
        return None
    sign = -1.0 if k % 2 else 1.0
    if np.linalg.norm(q.x - sign * p.x) > tol.tau:
        return None
    return k


def same_projective(e: EinPoint, f: EinPoint, tol: Optional[Tolerance] = None) -> bool:
    """射影空間 𝖤in で同じ点か（符号を無視した比較）"""
    tol = resolve(tol)
    return bool(
        np.allclose(e.rep, f.rep, rtol=0.0, atol=tol.tau)
        or np.allclose(e.rep, -f.rep, rtol=0.0, atol=tol.tau)
    )


def random_unipoints(rng: np.random.Generator, count: int, n: int,
                     t_range: Tuple[float, float] = (-10.0, 10.0)) -> Tuple[np.ndarray, np.ndarray]:
    """一様な球面点と一様な時刻を (x, t) 配列で返す"""
    xs = rng.normal(size=(count, n))
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    ts = rng.uniform(t_range[0], t_range[1], size=count)
    return xs, ts
