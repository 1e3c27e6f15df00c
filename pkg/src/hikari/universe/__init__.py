"""アインシュタイン宇宙（二重被覆・普遍被覆）と因果関係"""
from hikari.universe import causality, cover

__all__ = ["cover", "causality"]
