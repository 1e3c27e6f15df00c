"""データモデル・設定・例外の単体テスト"""
import os
import sys
from pathlib import Path

# srcをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from unittest.mock import patch

import numpy as np
import pytest
from hikari.core import config
from hikari.core.errors import HikariError, NotInChartError, PreconditionError, SchemaError
from hikari.core.models import (
    CounterexampleScene,
    EinPoint,
    Orientation,
    RelationTag,
    Tolerance,
    UniPoint,
)


def test_tolerance_defaults():
    """既定の許容誤差"""
    tol = Tolerance()
    assert tol.tau == 1e-9
    assert tol.band == 1e-6
    assert tol.to_dict() == {"tau": 1e-9, "classificationBand": 1e-6}


def test_tolerance_rejects_bad_order():
    """tau < classification_band でなければエラー"""
    with pytest.raises(ValueError):
        Tolerance(tau=1e-3, classification_band=1e-6)
    with pytest.raises(ValueError):
        Tolerance(tau=0.0)


def test_values_are_immutable():
    """保持する配列は読み取り専用のコピー"""
    x = np.array([1.0, 0.0, 0.0])
    p = UniPoint(x, 0.0)
    x[0] = 5.0
    assert p.x[0] == 1.0
    with pytest.raises(ValueError):
        p.x[0] = 2.0


def test_einpoint_equality_keeps_sign():
    """EinPoint は符号を区別する"""
    e = EinPoint([1.0, 0.0, 1.0, 0.0, 0.0])
    assert e == EinPoint([1.0, 0.0, 1.0, 0.0, 0.0])
    assert e != EinPoint([-1.0, 0.0, -1.0, 0.0, 0.0])
    assert e.dim == 3


def test_relation_tag_helpers():
    """未来・過去の因果関係の判定"""
    assert RelationTag.NULL_FUTURE.is_future_causal
    assert RelationTag.EQUAL.is_past_causal
    assert not RelationTag.SPACELIKE.is_future_causal
    assert Orientation.PAST.sign == -1


def test_scene_from_dict():
    """シーンの読み込みと既定値"""
    scene = CounterexampleScene.from_dict({"lambda": 3, "k": 2})
    assert scene.lam == 3.0
    assert scene.k == 2
    assert scene.r_inner == 0.5
    assert scene.to_dict()["lambda"] == 3.0


def test_scene_rejects_unknown_and_invalid():
    """未知のキーは SchemaError、範囲外は PreconditionError"""
    with pytest.raises(SchemaError):
        CounterexampleScene.from_dict({"lam": 2.0})
    with pytest.raises(SchemaError):
        CounterexampleScene.from_dict({"k": "3"})
    with pytest.raises(SchemaError):
        CounterexampleScene.from_dict({"k": 1.5})
    with pytest.raises(PreconditionError):
        CounterexampleScene.from_dict({"lambda": 1.0})
    with pytest.raises(PreconditionError):
        CounterexampleScene(r_inner=1.2)


def test_error_hierarchy():
    """例外の継承関係"""
    assert issubclass(NotInChartError, PreconditionError)
    assert issubclass(PreconditionError, ValueError)
    assert issubclass(SchemaError, HikariError)


def test_config_reads_environment():
    """環境変数から許容誤差と次元を読む"""
    env = {"HIKARI_TAU": "1e-10", "HIKARI_BAND": "1e-7", "HIKARI_DIMENSION": "4"}
    with patch.dict(os.environ, env):
        tol = config.default_tolerance()
        assert tol.tau == 1e-10
        assert tol.band == 1e-7
        assert config.default_dimension() == 4


def test_config_falls_back_on_bad_values():
    """読めない値は既定値に戻す"""
    with patch.dict(os.environ, {"HIKARI_TAU": "abc", "HIKARI_DIMENSION": "1"}):
        assert config.default_tolerance().tau == config.DEFAULT_TAU
        assert config.default_dimension() == config.DEFAULT_DIMENSION


def test_resolve_passes_explicit_tolerance():
    """明示した許容誤差はそのまま使う"""
    tol = Tolerance(tau=1e-8, classification_band=1e-5)
    assert config.resolve(tol) is tol
