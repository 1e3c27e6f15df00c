"""点群の連結成分（相互 k 近傍グラフ + union-find）"""
import logging
from typing import Tuple

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from hikari.core.errors import PreconditionError
from hikari.core.models import SampleCloud

logger = logging.getLogger(__name__)

NOISE_LABEL = -1


def knn_edges(points: np.ndarray, knn: int, nearest: bool = False) -> np.ndarray:
    """
    相互 k 近傍の辺を (i, j), i < j の配列で返す

    nearest=True なら各点から最近傍への辺も足す（異方的な点群の端で
    孤立点が出るのを防ぐ）。
    """
    m = points.shape[0]
    k = min(knn, m - 1)
    if k < 1:
        return np.zeros((0, 2), dtype=int)
    _, idx = cKDTree(points).query(points, k=k + 1)
    neighbours = idx[:, 1:]
    rows = np.repeat(np.arange(m), k)
    cols = neighbours.ravel()
    directed = set(zip(rows.tolist(), cols.tolist()))
    edges = {(min(i, j), max(i, j)) for i, j in directed if (j, i) in directed}
    if nearest:
        edges.update((min(i, j), max(i, j)) for i, j in enumerate(neighbours[:, 0].tolist()))
    return np.array(sorted(edges), dtype=int).reshape(-1, 2)


def components(cloud: SampleCloud, knn: int = 10, min_size: int = 1,
               nearest: bool = False) -> Tuple[int, np.ndarray]:
    """
    点群の相互 k 近傍グラフの連結成分を数える

    Args:
        cloud: 点群
        knn: 近傍数
        min_size: これより小さい成分はノイズ（ラベル −1）として数えない
        nearest: 最近傍への辺も足すか

    Returns:
        (成分数, ラベル配列)。ラベルは最小の点番号の順に 0, 1, … と振る
    """
    if knn < 1:
        raise PreconditionError("knn は 1 以上")
    if min_size < 1:
        raise PreconditionError("min_size は 1 以上")
    m = len(cloud)
    if m == 0:
        raise PreconditionError("点群が空です")

    sets = DisjointSet(range(m))
    for i, j in knn_edges(cloud.points, knn, nearest):
        sets.merge(int(i), int(j))

    labels = np.full(m, NOISE_LABEL, dtype=int)
    count = 0
    # subsets() の順序に依存しないよう、代表の最小番号で並べる
    for members in sorted((sorted(s) for s in sets.subsets()), key=lambda s: s[0]):
        if len(members) < min_size:
            continue
        labels[members] = count
        count += 1
    noise = int(np.sum(labels == NOISE_LABEL))
    logger.debug("成分数 %d（ノイズ点 %d）", count, noise)
    return count, labels
