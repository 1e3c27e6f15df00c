"""共通モジュール（データモデル・設定・例外）"""
from hikari.core import config, errors, models

__all__ = ["config", "errors", "models"]
