"""hikari のコマンドライン

    hikari counterexample --scene scene.json --out result/
    hikari classify --past "1,0,0@0" --future "1,0,0@6.283185307179586" --oracle
    hikari domain reconstruct --lambda cone.json --scene probe.json
    hikari chart conformality --seed 7

終了コード: 0 成功、2 シーン形式エラー、3 前提条件違反・サンプリング失敗、
4 性質の検査に失敗。
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from hikari import __version__
from hikari.core.config import DEFAULT_BAND, default_dimension, default_tolerance
from hikari.core.errors import (
    EmptyIntersectionError,
    HikariError,
    PreconditionError,
    SamplingError,
    SchemaError,
)
from hikari.core.models import (
    ChartPoint,
    CounterexampleScene,
    Diamond,
    DiamondKind,
    Tolerance,
    UniPoint,
)
from hikari.geometry import charts, diamonds, domains

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_PRECONDITION = 3
EXIT_CHECK_FAILED = 4

# シーンファイルで受け付けるキー（コマンドごと）
DOMAIN_KEYS = {"point", "probes", "directions", "trials", "pip"}
CHART_KEYS = {"points", "which", "step", "residual", "point", "direction", "parameter", "gap", "dimension"}
CLASSIFY_KEYS = {"past", "future", "grid_density"}


# ---------------------------------------------------------------------------
# 入出力の補助
# ---------------------------------------------------------------------------

def _load_scene(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"シーンファイルを読めません: {e}") from e
    if not isinstance(data, dict):
        raise SchemaError("シーンはオブジェクトでなければなりません")
    return data


def _check_keys(scene: Dict[str, Any], allowed: set) -> None:
    unknown = sorted(set(scene) - allowed - {"seed"})
    if unknown:
        raise SchemaError(f"未知のキー: {', '.join(unknown)}")


def _tolerance(args: argparse.Namespace) -> Tolerance:
    base = default_tolerance()
    if args.tol is None:
        return base
    if not args.tol > 0.0:
        raise SchemaError("--tol は正の数")
    return Tolerance(tau=args.tol, classification_band=max(base.band, DEFAULT_BAND, 10.0 * args.tol))


def _seed(args: argparse.Namespace, scene: Dict[str, Any], default: int = 0) -> int:
    if args.seed is not None:
        return args.seed
    value = scene.get("seed", default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError("seed は整数")
    return value


def _parse_unipoint(text: str) -> UniPoint:
    """'x1,…,xn@t' を UniPoint にする（x は単位化する）"""
    try:
        spatial, time = text.split("@")
        x = [float(c) for c in spatial.split(",")]
        t = float(time)
    except ValueError as e:
        raise SchemaError(f"点の形式は x1,…,xn@t です: {text!r}") from e
    if len(x) < 2 or not np.linalg.norm(x) > 0.0:
        raise SchemaError(f"空間成分が不正です: {text!r}")
    return UniPoint.normalized(x, t)


def _unipoint_from(value: Any) -> UniPoint:
    if isinstance(value, str):
        return _parse_unipoint(value)
    try:
        return UniPoint.normalized(value["x"], value["t"])
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"点は {{x: [...], t: 数値}} か 'x@t' です: {value!r}") from e


def _vector(value: Any, name: str, length: Optional[int] = None) -> np.ndarray:
    if isinstance(value, str):
        value = value.split(",")
    try:
        vec = np.asarray([float(c) for c in value], dtype=float)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{name} は数値の並びです: {value!r}") from e
    if length is not None and vec.shape != (length,):
        raise SchemaError(f"{name} の長さは {length} です")
    return vec


def _header(scene: Dict[str, Any], tol: Tolerance) -> Dict[str, Any]:
    return {"tool": "hikari", "version": __version__, "tolerance": tol.to_dict(), "scene": scene}


def _dump(data: Dict[str, Any]) -> str:
    return json.dumps(data, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def _emit(report: Dict[str, Any], out: Optional[str], name: str = "report.json") -> None:
    text = _dump(report)
    if out is not None:
        path = Path(f"{out}{name}")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("%s を書き出しました", path)
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# counterexample
# ---------------------------------------------------------------------------

def cmd_counterexample(args: argparse.Namespace, tol: Tolerance) -> int:
    """γ_k.D ∩ D′ の点群・スライス判定・成分数を書き出す"""
    raw = _load_scene(args.scene)
    if args.seed is not None:
        raw = {**raw, "seed": args.seed}
    scene = CounterexampleScene.from_dict(raw)
    report = diamonds.counterexample_scene(scene, tol)
    if report.degenerate:
        raise SamplingError(f"点群が退化しています（{len(report.cloud)} 点）")

    out = args.out if args.out is not None else ""
    n = scene.n
    frame = pd.DataFrame(report.cloud.points, columns=[f"x{j + 1}" for j in range(n)])
    frame["label"] = report.labels
    cloud_path = Path(f"{out}cloud.csv")
    cloud_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(cloud_path, index=False)

    header = _header(scene.to_dict(), tol)
    Path(f"{out}slices.json").write_text(_dump({**header, **report.slices_dict()}), encoding="utf-8")
    Path(f"{out}report.json").write_text(_dump({**header, **report.to_dict()}), encoding="utf-8")
    logger.info("成分数 %d、点群 %d 点を %s に書き出しました", report.components, len(report.cloud), cloud_path)

    sampled_empty = report.yz_sampled_points == 0
    consistent = report.x_slice_verified and (sampled_empty or not report.yz_plane_empty)
    return EXIT_OK if consistent else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def _oracle_verdict(D: Diamond, density: int, tol: Tolerance) -> Dict[str, Any]:
    pair = diamonds.find_conjugate_pair(D, density, tol)
    photon = diamonds.contains_complete_photon(D, density, tol)
    return {
        "conjugatePair": None if pair is None else [pair[0].to_dict(), pair[1].to_dict()],
        "completePhoton": None if photon is None else photon.to_dict(),
    }


def _oracle_agrees(kind: DiamondKind, oracle: Dict[str, Any]) -> bool:
    has_pair = oracle["conjugatePair"] is not None
    has_photon = oracle["completePhoton"] is not None
    if kind is DiamondKind.CONJUGATE_CYLINDER:
        return has_pair
    if kind in (DiamondKind.NULL_HALF_SPACE, DiamondKind.AFFINE_CHART):
        return has_photon and not has_pair
    return not has_pair and not has_photon


def cmd_classify(args: argparse.Namespace, tol: Tolerance) -> int:
    """2点を頂点とするダイヤモンドを分類する"""
    scene = _load_scene(args.scene)
    _check_keys(scene, CLASSIFY_KEYS)
    past_raw = args.past if args.past is not None else scene.get("past")
    future_raw = args.future if args.future is not None else scene.get("future")
    if past_raw is None or future_raw is None:
        raise SchemaError("past と future の両方が必要です")
    past, future = _unipoint_from(past_raw), _unipoint_from(future_raw)
    D = Diamond(past, future)
    kind = diamonds.classify_diamond(D, tol)
    resolved = {"past": past.to_dict(), "future": future.to_dict()}
    report: Dict[str, Any] = {**_header(resolved, tol), "kind": kind.value}
    code = EXIT_OK
    if args.oracle:
        density = int(scene.get("grid_density", 64))
        oracle = _oracle_verdict(D, density, tol)
        agrees = _oracle_agrees(kind, oracle)
        report["oracle"] = {**oracle, "agrees": agrees}
        if not agrees:
            logger.warning("分類 %s と総当たり探索が一致しません", kind.value)
            code = EXIT_CHECK_FAILED
    _emit(report, args.out)
    return code


# ---------------------------------------------------------------------------
# domain
# ---------------------------------------------------------------------------

def _domain_point(args: argparse.Namespace, scene: Dict[str, Any], n: int) -> np.ndarray:
    raw = args.point if args.point is not None else scene.get("point")
    if raw is None:
        raise SchemaError("point が必要です")
    return _vector(raw, "point", n)


def cmd_domain(args: argparse.Namespace, tol: Tolerance) -> int:
    """正則領域の帰属・正則性・過去の再構成・強凸性を調べる"""
    scene = _load_scene(args.scene)
    _check_keys(scene, DOMAIN_KEYS)
    if args.boundary is None:
        raise SchemaError("--lambda で Λ ファイルを指定してください")
    data = domains.load_boundary_data(args.boundary, tol)
    frame = data.frame
    resolved = {**scene, "lambda": domains.boundary_data_to_dict(data)}
    action = args.action

    if action == "regular":
        verdict = domains.is_regular(data, tol)
        report = {
            **_header(resolved, tol),
            "regular": verdict.regular,
            "bound": verdict.bound,
            "proper": domains.is_proper(data, tol),
        }
        _emit(report, args.out)
        return EXIT_OK if verdict.regular else EXIT_CHECK_FAILED

    domain = domains.regular_domain(data, tol)
    if action == "member":
        q = ChartPoint(_domain_point(args, scene, frame.dim), frame)
        report = {
            **_header(resolved, tol),
            "membership": domains.member(domain, q, tol).value,
            "margin": float(domains.margins(domain, q.X)[0]),
        }
        _emit(report, args.out)
        return EXIT_OK

    seed = _seed(args, scene)
    resolved["seed"] = seed
    if action == "reconstruct":
        p = ChartPoint(_domain_point(args, scene, frame.dim), frame)
        probes = int(scene.get("probes", 1000))
        directions = int(scene.get("directions", 64))
        result = domains.pip_reconstruction_check(domain, p, probes, seed, directions, tol)
        _emit({**_header(resolved, tol), **result.to_dict()}, args.out)
        if args.out is not None:
            exits = domains.lambda_minus(domain, p, directions, tol)
            domains.exits_to_frame(exits).to_csv(Path(f"{args.out}exits.csv"), index=False)
        return EXIT_OK if result.passed else EXIT_CHECK_FAILED

    # convexity
    trials = int(scene.get("trials", 10000))
    target: Any = domain
    if scene.get("pip", False):
        p = ChartPoint(_domain_point(args, scene, frame.dim), frame)
        target = domains.pip_domain(domain, p, tol)
    witness = domains.strict_convexity_witness(target, trials, seed, tol)
    report = {
        **_header(resolved, tol),
        "trials": trials,
        "witness": None if witness is None else [witness[0].X.tolist(), witness[1].X.tolist()],
    }
    _emit(report, args.out)
    return EXIT_OK if witness is None else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# chart
# ---------------------------------------------------------------------------

def _chart_conformality(scene: Dict[str, Any], seed: int, tol: Tolerance) -> Tuple[Dict[str, Any], bool]:
    n = int(scene.get("dimension", default_dimension()))
    count = int(scene.get("points", 100))
    step = float(scene.get("step", 1e-5))
    limit = float(scene.get("residual", 1e-5))
    which = scene.get("which", [-1, 0, 1])
    rng = np.random.default_rng(seed)
    e1 = np.eye(n)[0]
    results = {}
    passed = True
    for w in which:
        frame = charts.chart_of(UniPoint(e1, 0.0), int(w), tol)
        residuals = [
            charts.conformal_factor(ChartPoint(X, frame), step).residual
            for X in rng.uniform(-1.0, 1.0, size=(count, n))
        ]
        worst = float(max(residuals))
        results[str(w)] = worst
        passed &= worst < limit
    return {"maxResidual": results, "limit": limit, "passed": passed}, passed


def _chart_endpoint(scene: Dict[str, Any], tol: Tolerance) -> Tuple[Dict[str, Any], bool]:
    n = int(scene.get("dimension", default_dimension()))
    frame = diamonds.standard_frame(n, tol)
    X0 = _vector(scene.get("point", [0.0] * n), "point", n)
    w = _vector(scene.get("direction", [1.0] + [0.0] * (n - 2) + [1.0]), "direction", n)
    s = float(scene.get("parameter", 1e6))
    limit = float(scene.get("gap", 1e-5))
    endpoint = charts.photon_endpoint(ChartPoint(X0, frame), w, tol)
    far = charts.embed(ChartPoint(X0 + s * w, frame), tol)
    gap = float(min(
        np.arccos(np.clip(np.dot(endpoint.rep, far.rep) / 2.0, -1.0, 1.0)),
        np.arccos(np.clip(-np.dot(endpoint.rep, far.rep) / 2.0, -1.0, 1.0)),
    ))
    return {"endpoint": endpoint.rep.tolist(), "gap": gap, "limit": limit, "passed": gap < limit}, gap < limit


def cmd_chart(args: argparse.Namespace, tol: Tolerance) -> int:
    """チャートの共形性・光子の終点を確かめる"""
    scene = _load_scene(args.scene)
    _check_keys(scene, CHART_KEYS)
    if args.action == "conformality":
        seed = _seed(args, scene)
        body, passed = _chart_conformality(scene, seed, tol)
        resolved = {**scene, "seed": seed}
    else:
        body, passed = _chart_endpoint(scene, tol)
        resolved = scene
    _emit({**_header(resolved, tol), **body}, args.out)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# エントリポイント
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    """引数パーサを作る"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", help="シーンファイル（JSON）")
    common.add_argument("--seed", type=int, help="乱数シード（シーンの seed を上書き）")
    common.add_argument("--tol", type=float, help="許容誤差 tau")
    common.add_argument("--out", help="出力ファイルの接頭辞")
    common.add_argument("--oracle", action="store_true", help="総当たり探索で結果を突き合わせる")

    parser = argparse.ArgumentParser(prog="hikari", description="アインシュタイン宇宙の因果幾何")
    parser.add_argument("-v", "--verbose", action="store_true", help="DEBUG ログを出す")
    parser.add_argument("--version", action="version", version=f"hikari {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counterexample", parents=[common], help="非連結なダイヤモンドの共通部分")
    p.set_defaults(handler=cmd_counterexample)

    p = sub.add_parser("classify", parents=[common], help="ダイヤモンドの分類")
    p.add_argument("--past", help="過去頂点 x1,…,xn@t")
    p.add_argument("--future", help="未来頂点 x1,…,xn@t")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("domain", parents=[common], help="正則領域")
    p.add_argument("action", choices=["member", "regular", "reconstruct", "convexity"])
    p.add_argument("--lambda", dest="boundary", help="Λ ファイル（JSON）")
    p.add_argument("--point", help="チャート座標 X1,…,Xn")
    p.set_defaults(handler=cmd_domain)

    p = sub.add_parser("chart", parents=[common], help="アフィンチャート")
    p.add_argument("action", choices=["conformality", "endpoint"])
    p.set_defaults(handler=cmd_chart)
    return parser


_EXIT_CODES: List[Tuple[type, int]] = [
    (SchemaError, EXIT_SCHEMA),
    (PreconditionError, EXIT_PRECONDITION),
    (SamplingError, EXIT_PRECONDITION),
    (EmptyIntersectionError, EXIT_PRECONDITION),
]


def exit_code_for(error: HikariError) -> int:
    """例外を終了コードに対応付ける"""
    for cls, code in _EXIT_CODES:
        if isinstance(error, cls):
            return code
    return EXIT_PRECONDITION


def main(argv: Optional[Sequence[str]] = None) -> int:
    """コマンドラインのエントリポイント"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    handler: Callable[[argparse.Namespace, Tolerance], int] = args.handler
    try:
        return handler(args, _tolerance(args))
    except HikariError as e:
        logger.error("%s", e)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
