"""
ZoneGraph Synthetic Generators
Seeded signed graph families for the evaluation protocols.

- G1: every node picks d distinct out-neighbors; each edge negative w.p. rho_minus
- G2: k disjoint planted blocks with positive-only interiors (p_in); every
  other ordered pair draws one uniform u and is positive if u < p_out_pos,
  negative if p_out_pos <= u < p_out_pos + p_out_neg (marginals as stated,
  never both)
- G3: the G1 backbone plus C vertex-disjoint directed negative 3-cycles

Randomness: numpy PCG64 seeded with SeedSequence([seed, family code]).
G3 draws its backbone from the G1 stream so C=0 reproduces G1 exactly.
Weights are TruncNormal(1, 0.2; w > 0) by rejection unless configured.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from beliefs.graph import CONTRADICTION_TYPE, SUPPORT_TYPE, BeliefGraph, BeliefNode, TypedEdge
from common.errors import ConfigError
from common.logs import get_logger

logger = get_logger('evaluation.generators')


class Family(Enum):
    G1 = "g1"
    G2 = "g2"
    G3 = "g3"


FAMILY_CODES = {Family.G1: 1, Family.G2: 2, Family.G3: 3}
CYCLE_STREAM = 33

WEIGHT_DISTRIBUTIONS = ('truncnormal', 'lognormal')
PSI_DISTRIBUTIONS = ('uniform', 'pareto')


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of one synthetic graph."""
    family: str = Family.G1.value
    n: int = 2000
    seed: int = 0
    d: int = 8
    rho_minus: float = 0.3
    k_zones: int = 3
    block_size: Optional[int] = None
    p_in: float = 0.22
    p_out_pos: float = 0.01
    p_out_neg: float = 0.01
    cycles: Optional[int] = None
    weight_dist: str = 'truncnormal'
    weight_mu: float = 1.0
    weight_sigma: float = 0.2
    psi_dist: str = 'uniform'
    pareto_shape: float = 2.5
    block_boost: float = 0.0

    def __post_init__(self):
        try:
            Family(self.family)
        except ValueError:
            raise ConfigError(f"unknown family '{self.family}'") from None
        if int(self.n) < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        for name in ('rho_minus', 'p_in', 'p_out_pos', 'p_out_neg', 'block_boost'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0,1], got {value}")
        if self.p_out_pos + self.p_out_neg > 1.0:
            raise ConfigError("p_out_pos + p_out_neg must be <= 1")
        if self.weight_dist not in WEIGHT_DISTRIBUTIONS:
            raise ConfigError(f"unknown weight_dist '{self.weight_dist}'")
        if self.psi_dist not in PSI_DISTRIBUTIONS:
            raise ConfigError(f"unknown psi_dist '{self.psi_dist}'")
        if self.weight_sigma <= 0 or self.pareto_shape <= 0:
            raise ConfigError("distribution scales must be > 0")
        family = Family(self.family)
        if family in (Family.G1, Family.G3) and not 1 <= self.d < self.n:
            raise ConfigError(f"out-degree d must satisfy 1 <= d < n, got d={self.d}, n={self.n}")
        if family is Family.G2:
            if int(self.k_zones) < 1 or self.zone_size < 1:
                raise ConfigError("k_zones and block_size must be positive")
            if self.k_zones * self.zone_size > self.n:
                raise ConfigError(f"{self.k_zones} blocks of {self.zone_size} do not fit in n={self.n}")
        if family is Family.G3:
            if self.cycle_count < 0 or 3 * self.cycle_count > self.n:
                raise ConfigError(f"{self.cycle_count} disjoint 3-cycles do not fit in n={self.n}")

    @property
    def zone_size(self) -> int:
        return int(self.block_size) if self.block_size is not None else max(120, self.n // 10)

    @property
    def cycle_count(self) -> int:
        return int(self.cycles) if self.cycles is not None else max(50, self.n // 20)


@dataclass(frozen=True)
class GroundTruth:
    """Planted blocks (pairwise disjoint, sorted members)."""
    blocks: Tuple[Tuple[int, ...], ...]

    @property
    def member_sets(self) -> List[frozenset]:
        return [frozenset(block) for block in self.blocks]


def family_rng(seed: int, code: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(code)]))


def node_labels(n: int) -> List[str]:
    """Zero-padded ids so string order equals index order."""
    width = max(4, len(str(max(n - 1, 0))))
    return [f"v{i:0{width}d}" for i in range(n)]


def draw_weights(rng: np.random.Generator, size: int, config: GeneratorConfig) -> np.ndarray:
    """Positive i.i.d. weights (TruncNormal by rejection, or LogNormal)."""
    if config.weight_dist == 'lognormal':
        return rng.lognormal(mean=0.0, sigma=0.5, size=size)
    weights = rng.normal(config.weight_mu, config.weight_sigma, size=size)
    bad = weights <= 0.0
    while bad.any():
        weights[bad] = rng.normal(config.weight_mu, config.weight_sigma, size=int(bad.sum()))
        bad = weights <= 0.0
    return weights


def draw_credibility(rng: np.random.Generator, n: int, config: GeneratorConfig) -> np.ndarray:
    if config.psi_dist == 'pareto':
        tail = rng.pareto(config.pareto_shape, size=n)
        span = tail.max() - tail.min()
        return (tail - tail.min()) / span if span > 0 else np.ones(n)
    return rng.random(n)


def _assemble(psi: np.ndarray, src, dst, signs, weights) -> BeliefGraph:
    n = len(psi)
    nodes = [BeliefNode(i, float(p)) for i, p in enumerate(psi)]
    edges = [
        TypedEdge(int(s), int(t), SUPPORT_TYPE if sign > 0 else CONTRADICTION_TYPE, int(sign), float(w))
        for s, t, sign, w in zip(src, dst, signs, weights)
    ]
    return BeliefGraph(nodes, edges, node_labels(n))


def _g1_arrays(rng: np.random.Generator, config: GeneratorConfig):
    n, d = config.n, config.d
    psi = draw_credibility(rng, n, config)
    src = np.repeat(np.arange(n, dtype=np.int64), d)
    dst = np.empty(n * d, dtype=np.int64)
    for u in range(n):
        picks = rng.choice(n - 1, size=d, replace=False)
        dst[u * d:(u + 1) * d] = np.sort(np.where(picks >= u, picks + 1, picks))
    signs = np.where(rng.random(n * d) < config.rho_minus, -1, 1)
    weights = draw_weights(rng, n * d, config)
    return psi, src, dst, signs, weights


def gen_g1(config: GeneratorConfig) -> BeliefGraph:
    """Signed random graph with fixed out-degree d."""
    rng = family_rng(config.seed, FAMILY_CODES[Family.G1])
    graph = _assemble(*_g1_arrays(rng, config))
    logger.debug("G1 n=%d d=%d seed=%d: %d edges", config.n, config.d, config.seed, len(graph.edges))
    return graph


def gen_g2(config: GeneratorConfig) -> Tuple[BeliefGraph, GroundTruth]:
    """Planted balanced blocks over a sparse signed background."""
    rng = family_rng(config.seed, FAMILY_CODES[Family.G2])
    n, s, k = config.n, config.zone_size, config.k_zones
    psi = draw_credibility(rng, n, config)
    perm = rng.permutation(n)
    blocks = tuple(tuple(sorted(int(v) for v in perm[j * s:(j + 1) * s])) for j in range(k))

    block_of = np.full(n, -1, dtype=np.int64)
    for j, block in enumerate(blocks):
        block_of[list(block)] = j
    if config.block_boost > 0.0:
        inside = block_of >= 0
        psi[inside] = np.minimum(1.0, psi[inside] + config.block_boost)

    draws = rng.random((n, n))
    same = (block_of[:, None] == block_of[None, :]) & (block_of[:, None] >= 0)
    np.fill_diagonal(same, False)
    positive = np.where(same, draws < config.p_in, draws < config.p_out_pos)
    negative = ~same & (draws >= config.p_out_pos) & (draws < config.p_out_pos + config.p_out_neg)
    np.fill_diagonal(positive, False)
    np.fill_diagonal(negative, False)

    pos_src, pos_dst = np.nonzero(positive)
    neg_src, neg_dst = np.nonzero(negative)
    src = np.concatenate([pos_src, neg_src])
    dst = np.concatenate([pos_dst, neg_dst])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    signs = np.concatenate([np.ones(len(pos_src), dtype=np.int64),
                            -np.ones(len(neg_src), dtype=np.int64)])[order]
    weights = draw_weights(rng, len(src), config)

    graph = _assemble(psi, src, dst, signs, weights)
    logger.debug("G2 n=%d blocks=%dx%d seed=%d: %d edges", n, k, s, config.seed, len(graph.edges))
    return graph, GroundTruth(blocks)


def gen_g3(config: GeneratorConfig) -> BeliefGraph:
    """G1 backbone with C vertex-disjoint negative 3-cycles."""
    rng = family_rng(config.seed, FAMILY_CODES[Family.G1])
    psi, src, dst, signs, weights = _g1_arrays(rng, config)
    c = config.cycle_count
    if c > 0:
        cycle_rng = family_rng(config.seed, CYCLE_STREAM)
        triples = cycle_rng.permutation(config.n)[:3 * c].reshape(c, 3)
        cyc_src = triples.ravel()
        cyc_dst = np.roll(triples, -1, axis=1).ravel()
        src = np.concatenate([src, cyc_src])
        dst = np.concatenate([dst, cyc_dst])
        signs = np.concatenate([signs, -np.ones(3 * c, dtype=np.int64)])
        weights = np.concatenate([weights, draw_weights(cycle_rng, 3 * c, config)])
    graph = _assemble(psi, src, dst, signs, weights)
    logger.debug("G3 n=%d cycles=%d seed=%d: %d edges", config.n, c, config.seed, len(graph.edges))
    return graph


def cycle_triples(config: GeneratorConfig) -> np.ndarray:
    """The (C, 3) node triples G3 embeds for this config."""
    c = config.cycle_count
    if c == 0:
        return np.zeros((0, 3), dtype=np.int64)
    return family_rng(config.seed, CYCLE_STREAM).permutation(config.n)[:3 * c].reshape(c, 3)


def generate(config: GeneratorConfig) -> Tuple[BeliefGraph, Optional[GroundTruth]]:
    """Dispatch on the family; only G2 carries ground truth."""
    family = Family(config.family)
    if family is Family.G2:
        return gen_g2(config)
    if family is Family.G3:
        return gen_g3(config), None
    return gen_g1(config), None
