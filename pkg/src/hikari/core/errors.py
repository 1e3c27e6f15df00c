"""hikari の例外クラス

CLI はこの階層を終了コードに対応付ける
（SchemaError → 2、前提条件・サンプリング系 → 3）。
"""


class HikariError(Exception):
    """hikari の基底例外"""


class PreconditionError(HikariError, ValueError):
    """演算の前提条件を満たさない入力"""


class NotInChartError(PreconditionError):
    """点がアフィンチャートの外（光円錐上を含む）にある"""


class SchemaError(HikariError):
    """シーンファイル・Λファイルの形式エラー"""


class SamplingError(HikariError):
    """サンプリングが退化した（点群が少なすぎる等）"""


class EmptyIntersectionError(HikariError):
    """ダイヤモンドの共通部分が空"""
