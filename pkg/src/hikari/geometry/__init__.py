"""チャート・ダイヤモンド・正則領域"""
from hikari.geometry import charts, connectivity, diamonds, domains

__all__ = ["charts", "connectivity", "diamonds", "domains"]
