"""
ZoneGraph Metrics
Ground-truth recovery and atlas stability measures.

- Zone level: max-overlap precision and recall, F1
- Node level: precision and recall of the covered node union
- Hungarian matching on 1 - Jaccard as a diagnostic
- Churn / stability between atlases and the false-collapse rate
"""

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from common.errors import EmptyFamilyError


@dataclass(frozen=True)
class Recovery:
    """Precision / recall / F1; `defined` is False when nothing was reported."""
    precision: float
    recall: float
    f1: float
    defined: bool = True


@dataclass(frozen=True)
class Matching:
    pairs: Tuple[Tuple[int, int], ...]
    mean_jaccard: float


def _as_sets(family: Iterable) -> List[frozenset]:
    sets = []
    for item in family:
        members = getattr(item, 'member_set', None)
        sets.append(members if members is not None else frozenset(int(v) for v in item))
    return sets


def _jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def f1_score(precision: float, recall: float) -> float:
    if precision + recall <= 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def family_metrics(reported: Iterable, truth: Iterable) -> Recovery:
    """Zone-level max-overlap precision, recall and F1.

    Args:
        reported: Reported zones (Zone objects or node sets)
        truth: Planted node sets

    Returns:
        Recovery (precision 0 with defined=False for an empty report)
    """
    reported, truth = _as_sets(reported), _as_sets(truth)
    if not truth:
        raise EmptyFamilyError("ground truth family is empty")
    reported = [z for z in reported if z]
    if not reported:
        return Recovery(0.0, 0.0, 0.0, defined=False)
    precision = float(np.mean([max(len(z & t) for t in truth) / len(z) for z in reported]))
    recall = float(np.mean([max(len(z & t) for z in reported) / len(t) for t in truth]))
    return Recovery(precision, recall, f1_score(precision, recall))


def node_metrics(reported: Iterable, truth: Iterable) -> Recovery:
    """Precision and recall of the union of reported nodes against the planted union."""
    reported, truth = _as_sets(reported), _as_sets(truth)
    planted = frozenset().union(*truth) if truth else frozenset()
    if not planted:
        raise EmptyFamilyError("ground truth family is empty")
    covered = frozenset().union(*reported) if reported else frozenset()
    if not covered:
        return Recovery(0.0, 0.0, 0.0, defined=False)
    hit = len(covered & planted)
    precision = hit / len(covered)
    recall = hit / len(planted)
    return Recovery(precision, recall, f1_score(precision, recall))


def hungarian_match(reported: Iterable, truth: Iterable) -> Matching:
    """Optimal one-to-one matching minimizing total 1 - Jaccard.

    The cost matrix is padded to square with cost 1; padded pairs are
    dropped and the mean Jaccard is taken over real pairs.
    """
    reported, truth = _as_sets(reported), _as_sets(truth)
    if not reported or not truth:
        raise EmptyFamilyError("matching needs two nonempty families")
    size = max(len(reported), len(truth))
    cost = np.ones((size, size), dtype=np.float64)
    for i, z in enumerate(reported):
        for j, t in enumerate(truth):
            cost[i, j] = 1.0 - _jaccard(z, t)
    rows, cols = linear_sum_assignment(cost)
    pairs = tuple((int(i), int(j)) for i, j in zip(rows, cols) if i < len(reported) and j < len(truth))
    mean = float(np.mean([1.0 - cost[i, j] for i, j in pairs])) if pairs else 0.0
    return Matching(pairs, mean)


def stability(prev: Iterable, post: Iterable) -> float:
    """S_J: mean over previous zones of their best Jaccard in the new atlas."""
    prev, post = _as_sets(prev), _as_sets(post)
    if not prev:
        raise EmptyFamilyError("stability needs a nonempty previous atlas")
    if not post:
        return 0.0
    return float(np.mean([max(_jaccard(z, w) for w in post) for z in prev]))


def churn(prev: Iterable, post: Iterable) -> float:
    """chi = 1 - S_J."""
    return 1.0 - stability(prev, post)


def tau_churn(prev: Iterable, post: Iterable, tau: float) -> float:
    """Fraction of previous zones with no new zone at Jaccard >= tau."""
    prev, post = _as_sets(prev), _as_sets(post)
    if not prev:
        raise EmptyFamilyError("churn needs a nonempty previous atlas")
    lost = sum(1 for z in prev if not any(_jaccard(z, w) >= tau for w in post))
    return lost / len(prev)


def false_collapse_rate(
    truth: Iterable,
    post: Iterable,
    post_phi: np.ndarray,
    theta: float,
    tau: float = 0.3,
    retention: float = 0.7,
) -> Tuple[float, bool]:
    """Share of retained planted blocks that no post-update zone matches.

    A block is retained when at least `retention` of its members still have
    phi >= theta; it collapsed falsely when no zone overlaps it at J >= tau.

    Returns:
        (rate, defined): rate 0 with defined=False when no block is retained
    """
    truth, post = _as_sets(truth), _as_sets(post)
    if not truth:
        raise EmptyFamilyError("ground truth family is empty")
    phi = np.asarray(post_phi, dtype=np.float64)
    retained = collapsed = 0
    for block in truth:
        kept = np.count_nonzero(phi[sorted(block)] >= theta)
        if kept < retention * len(block):
            continue
        retained += 1
        if not any(_jaccard(block, zone) >= tau for zone in post):
            collapsed += 1
    if retained == 0:
        return 0.0, False
    return collapsed / retained, True


def confidence_interval(values: Sequence[float]) -> Tuple[float, float, float]:
    """(mean, sd, 1.96 sd / sqrt(n)) with the sample standard deviation."""
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise EmptyFamilyError("no values to summarize")
    mean = float(data.mean())
    if data.size < 2:
        return mean, 0.0, 0.0
    sd = float(data.std(ddof=1))
    return mean, sd, 1.96 * sd / float(np.sqrt(data.size))
