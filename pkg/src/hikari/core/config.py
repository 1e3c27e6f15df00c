"""設定の読み込み

.env または環境変数から既定の許容誤差と次元を読む。

    HIKARI_TAU=1e-9
    HIKARI_BAND=1e-6
    HIKARI_DIMENSION=3
"""
import logging
import os
from typing import Optional

from dotenv import load_dotenv

from hikari.core.models import Tolerance

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_TAU = 1e-9
DEFAULT_BAND = 1e-6
DEFAULT_DIMENSION = 3


def _read_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning("%s の値 %r を数値として読めません。既定値 %s を使います", name, raw, default)
        return default


def default_tolerance() -> Tolerance:
    """環境変数から既定の許容誤差を作る"""
    return Tolerance(
        tau=_read_float("HIKARI_TAU", DEFAULT_TAU),
        classification_band=_read_float("HIKARI_BAND", DEFAULT_BAND),
    )


def resolve(tol: Optional[Tolerance]) -> Tolerance:
    """None なら既定の許容誤差を返す"""
    return default_tolerance() if tol is None else tol


def default_dimension() -> int:
    """空間次元 n の既定値（n ≥ 2）"""
    value = int(_read_float("HIKARI_DIMENSION", DEFAULT_DIMENSION))
    if value < 2:
        logger.warning("HIKARI_DIMENSION=%d は小さすぎます。%d を使います", value, DEFAULT_DIMENSION)
        return DEFAULT_DIMENSION
    return value
