"""
ZoneGraph Protocols
Seeded evaluation protocols P1-P4 and their across-seed summaries.

- P1 (G1): contraction factor and iterations over an (alpha, eta) grid
- P2 (G2): zone recovery over a quantile-threshold sweep for the signed
  pipeline and both unsigned baselines; q* maximizes node-level F1
- P3 (G2): atlas churn under multiplicative weight jitter, per tau
- P4 (G3 by default): atlas stability under batch shocks of mass m

Each seed is one cell; cells run in a process pool and rows come back in
seed order, so results do not depend on the worker count.
"""

import time
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from atlas.governance import Atlas, GovernanceParams, atlas_refresh, atlas_update, coverage, mean_jaccard
from beliefs.graph import BeliefGraph, unsigned_view
from beliefs.projection import signed_projection
from common.errors import ConfigError, ShockRejected
from common.logs import get_logger
from dynamics.shocks import ShockSpec, apply_shock
from propagation.solver import PropagationParams, propagate_graph
from zones.extract import extract_zones, quantile_threshold, threshold_nodes
from zones.quality import count_unbalanced

from .baselines import baseline_unsign_cl, baseline_unsign_pro
from .generators import GeneratorConfig, generate
from .metrics import (churn, confidence_interval, false_collapse_rate, family_metrics,
                      hungarian_match, node_metrics, stability, tau_churn)
from .results import METRIC_COLUMNS, MetricRow, SummaryRow

logger = get_logger('evaluation')

PROTOCOLS = ('p1', 'p2', 'p3', 'p4')
DEFAULT_FAMILY = {'p1': 'g1', 'p2': 'g2', 'p3': 'g2', 'p4': 'g3'}
ALLOWED_FAMILIES = {'p1': {'g1'}, 'p2': {'g2'}, 'p3': {'g2'}, 'p4': {'g1', 'g2', 'g3'}}

METHODS = ('zonegraph', 'unsign_cl', 'unsign_pro')

JITTER_STREAM = 4
SHOCK_STREAM = 5
REFERENCE_TAU = 0.30


def default_q_grid() -> Tuple[float, ...]:
    return tuple(round(0.30 + 0.05 * i, 2) for i in range(13))


@dataclass(frozen=True)
class EvalConfig:
    """Everything one protocol run needs."""
    protocol: str
    seeds: Tuple[int, ...] = tuple(range(30))
    family: Optional[str] = None
    generator: Mapping[str, object] = field(default_factory=dict)
    propagation: PropagationParams = PropagationParams(alpha=0.6, eta=1.0)
    governance: GovernanceParams = GovernanceParams()
    alphas: Tuple[float, ...] = (0.2, 0.4, 0.6, 0.8)
    etas: Tuple[float, ...] = (0.0, 0.5, 1.0)
    q_grid: Tuple[float, ...] = field(default_factory=default_q_grid)
    jitters: Tuple[float, ...] = (0.05,)
    jitter_q: float = 0.75
    taus: Tuple[float, ...] = (0.30,)
    masses: Tuple[float, ...] = (0.1, 0.2, 0.3, 0.4)
    shock_nodes: int = 40
    shock_q: float = 0.75
    kappa: float = 0.5
    rho_shock: float = 1.0
    workers: int = 1
    record_timing: bool = False

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol '{self.protocol}'")
        if self.resolved_family not in ALLOWED_FAMILIES[self.protocol]:
            raise ConfigError(f"protocol {self.protocol} cannot run on family {self.resolved_family}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if 'family' in self.generator or 'seed' in self.generator:
            raise ConfigError("generator overrides cannot set family or seed")
        for q in tuple(self.q_grid) + (self.jitter_q, self.shock_q):
            if not 0.0 <= q <= 1.0:
                raise ConfigError(f"quantile {q} outside [0,1]")
        if any(scale < 0 for scale in self.jitters):
            raise ConfigError("jitter scales must be >= 0")
        if int(self.shock_nodes) < 1:
            raise ConfigError("shock_nodes must be >= 1")
        for m in self.masses:
            if not 0.0 <= m <= self.shock_nodes:
                raise ConfigError(f"shock mass {m} gives strengths outside [0,1]")
        if int(self.workers) < 1:
            raise ConfigError("workers must be >= 1")
        for alpha in self.alphas:
            replace(self.propagation, alpha=alpha)
        for eta in self.etas:
            replace(self.propagation, eta=eta)
        for tau in self.taus:
            governance_for_tau(self.governance, tau)
        ShockSpec({}, self.kappa, self.rho_shock)
        self.generator_config(self.seeds[0])

    @property
    def resolved_family(self) -> str:
        return self.family or DEFAULT_FAMILY[self.protocol]

    def generator_config(self, seed: int) -> GeneratorConfig:
        return GeneratorConfig(family=self.resolved_family, seed=int(seed), **dict(self.generator))


def zone_atlas(graph: BeliefGraph, phi: np.ndarray, theta: float, gov: GovernanceParams,
               prev: Optional[Atlas] = None) -> Atlas:
    """Threshold, extract and govern (refresh against prev when given)."""
    v_theta = threshold_nodes(phi, theta)
    zones = extract_zones(signed_projection(graph, v_theta), phi)
    if prev is None:
        return atlas_update(zones, phi, graph, gov)
    return atlas_refresh(prev, zones, phi, graph, gov)


def _fmt(value: float) -> str:
    return f"{value:g}"


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.start = time.perf_counter()

    def elapsed_ms(self) -> Optional[float]:
        if not self.enabled:
            return None
        return (time.perf_counter() - self.start) * 1000.0


# ---------------------------------------------------------------- P1

def _run_p1(config: EvalConfig, seed: int) -> List[MetricRow]:
    graph, _ = generate(config.generator_config(seed))
    rows = []
    for alpha in config.alphas:
        for eta in config.etas:
            params = replace(config.propagation, alpha=alpha, eta=eta)
            clock = _Clock(config.record_timing)
            state = propagate_graph(graph, params)
            rows.append(MetricRow(
                protocol='p1', family=config.resolved_family, seed=seed,
                grid=f"alpha={_fmt(alpha)};eta={_fmt(eta)}", alpha=alpha, eta=eta,
                r=state.contraction_factor, t_star=state.iterations, converged=state.converged,
                wall_clock_ms=clock.elapsed_ms(),
            ))
    return rows


# ---------------------------------------------------------------- P2

def _recovery_row(base: MetricRow, atlas: Atlas, truth, signed_graph: BeliefGraph, phi, theta) -> MetricRow:
    zones = list(atlas.zones)
    zone_level = family_metrics(zones, truth.member_sets)
    node_level = node_metrics(zones, truth.member_sets)
    matched = hungarian_match(zones, truth.member_sets).mean_jaccard if zones else None
    projection = signed_projection(signed_graph, threshold_nodes(phi, theta))
    return replace(
        base,
        precision=zone_level.precision, recall=zone_level.recall, f1=zone_level.f1,
        node_precision=node_level.precision, node_recall=node_level.recall, node_f1=node_level.f1,
        hungarian_jaccard=matched, atlas_size=len(atlas),
        unbalanced_zones=count_unbalanced(zones, projection) if zones else 0,
        scoring_mode=atlas.scoring_mode,
    )


def _run_p2(config: EvalConfig, seed: int) -> List[MetricRow]:
    graph, truth = generate(config.generator_config(seed))
    gov = config.governance
    signed_state = propagate_graph(graph, config.propagation)
    unsigned_graph = unsigned_view(graph)
    unsigned_state = baseline_unsign_pro(graph, config.propagation)

    rows: List[MetricRow] = []
    for method in METHODS:
        method_rows = []
        for q in config.q_grid:
            clock = _Clock(config.record_timing)
            if method == 'unsign_pro':
                phi = unsigned_state.phi
                theta = quantile_threshold(phi, q)
                atlas = zone_atlas(unsigned_graph, phi, theta, gov)
                state = unsigned_state
            else:
                phi = signed_state.phi
                theta = quantile_threshold(phi, q)
                state = signed_state
                if method == 'unsign_cl':
                    atlas = baseline_unsign_cl(graph, phi, theta, gov, seed=seed)
                else:
                    atlas = zone_atlas(graph, phi, theta, gov)
            base = MetricRow(
                protocol='p2', family=config.resolved_family, seed=seed, grid=f"q={q:.2f}",
                method=method, alpha=config.propagation.alpha, eta=config.propagation.eta,
                q=q, theta=theta, r=state.contraction_factor, t_star=state.iterations,
                converged=state.converged,
            )
            row = _recovery_row(base, atlas, truth, graph, phi, theta)
            row.wall_clock_ms = clock.elapsed_ms()
            method_rows.append(row)
        best = max(range(len(method_rows)), key=lambda i: (method_rows[i].node_f1, -i))
        for i, row in enumerate(method_rows):
            row.selected = i == best
        rows.extend(method_rows)
    return rows


# ---------------------------------------------------------------- P3

def jitter_weights(graph: BeliefGraph, scale: float, seed: int) -> BeliefGraph:
    """w -> max(0, w (1 + scale N(0,1))), no renormalization of raw weights."""
    if scale == 0.0:
        return graph
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), JITTER_STREAM, int(round(scale * 1e6))]))
    return graph.with_weights(
        lambda w: np.clip(w * (1.0 + scale * rng.standard_normal(w.shape)), 0.0, None))


def governance_for_tau(gov: GovernanceParams, tau: float) -> GovernanceParams:
    """Copy of gov at overlap threshold tau, lifting tau_keep above it if needed."""
    tau_keep = gov.tau_keep if gov.tau_keep > tau else (1.0 + tau) / 2.0
    return replace(gov, tau=tau, tau_keep=tau_keep)


def _run_p3(config: EvalConfig, seed: int) -> List[MetricRow]:
    graph, _ = generate(config.generator_config(seed))
    state = propagate_graph(graph, config.propagation)
    theta_pre = quantile_threshold(state.phi, config.jitter_q)
    taus = list(config.taus)
    if REFERENCE_TAU not in taus:
        taus.append(REFERENCE_TAU)
    governance = {tau: governance_for_tau(config.governance, tau) for tau in taus}
    pre = {tau: zone_atlas(graph, state.phi, theta_pre, gov) for tau, gov in governance.items()}

    rows = []
    for scale in config.jitters:
        clock = _Clock(config.record_timing)
        jittered = jitter_weights(graph, scale, seed)
        post_state = state if jittered is graph else propagate_graph(jittered, config.propagation)
        theta_post = quantile_threshold(post_state.phi, config.jitter_q)
        v_post = threshold_nodes(post_state.phi, theta_post)
        post = {tau: zone_atlas(jittered, post_state.phi, theta_post, gov, prev=pre[tau])
                for tau, gov in governance.items()}
        reference = post[REFERENCE_TAU]
        elapsed = clock.elapsed_ms()
        for tau in config.taus:
            before, after = pre[tau], post[tau]
            has_pre = len(before) > 0
            rows.append(MetricRow(
                protocol='p3', family=config.resolved_family, seed=seed,
                grid=f"jitter={_fmt(scale)};tau={_fmt(tau)}",
                alpha=config.propagation.alpha, eta=config.propagation.eta,
                q=config.jitter_q, theta=theta_post, jitter=scale, tau=tau,
                scoring_mode=after.scoring_mode,
                r=post_state.contraction_factor, t_star=post_state.iterations,
                converged=post_state.converged, wall_clock_ms=elapsed,
                atlas_size=len(after), coverage=coverage(after, v_post), mean_jaccard=mean_jaccard(after),
                churn=churn(before.zones, after.zones) if has_pre else None,
                tau_churn=tau_churn(before.zones, after.zones, tau) if has_pre else None,
                stability=stability(reference.zones, after.zones) if len(reference) else None,
            ))
    return rows


# ---------------------------------------------------------------- P4

def shock_targets(n: int, count: int, seed: int) -> np.ndarray:
    """Sorted uniformly drawn shock targets for a seed."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), SHOCK_STREAM]))
    return np.sort(rng.choice(n, size=min(count, n), replace=False))


def _run_p4(config: EvalConfig, seed: int) -> List[MetricRow]:
    graph, truth = generate(config.generator_config(seed))
    params = config.propagation
    gov = config.governance
    state = propagate_graph(graph, params)
    theta = quantile_threshold(state.phi, config.shock_q)
    pre = zone_atlas(graph, state.phi, theta, gov)
    targets = shock_targets(graph.n, config.shock_nodes, seed)

    rows = []
    for m in config.masses:
        clock = _Clock(config.record_timing)
        strength = m / config.shock_nodes
        spec = ShockSpec({int(u): strength for u in targets}, config.kappa, config.rho_shock)
        row = MetricRow(
            protocol='p4', family=config.resolved_family, seed=seed, grid=f"m={_fmt(m)}",
            alpha=params.alpha, eta=params.eta, q=config.shock_q, theta=theta, m=m,
            r=state.contraction_factor,
        )
        try:
            result = apply_shock(graph, spec, params, state)
        except ShockRejected as e:
            logger.warning("seed %d, m=%s: %s", seed, m, e)
            row.shock_accepted = False
            rows.append(row)
            continue
        post = zone_atlas(result.graph, result.state.phi, theta, gov, prev=pre)
        row.shock_accepted = True
        row.shock_factor = result.factor
        row.r_post = result.state.contraction_factor
        row.t_star = result.state.iterations
        row.converged = result.state.converged
        row.atlas_size = len(post)
        row.scoring_mode = post.scoring_mode
        row.stability = stability(pre.zones, post.zones) if len(pre) else None
        if truth is not None:
            rate, defined = false_collapse_rate(truth.member_sets, post.zones, result.state.phi, theta)
            row.false_collapse_rate = rate if defined else None
        row.wall_clock_ms = clock.elapsed_ms()
        logger.info("seed %d, m=%s: applied strengths %s", seed, m, result.strengths)
        rows.append(row)
    return rows


RUNNERS = {'p1': _run_p1, 'p2': _run_p2, 'p3': _run_p3, 'p4': _run_p4}


def run_cell(config: EvalConfig, seed: int) -> List[MetricRow]:
    """Run one seed of a protocol."""
    rows = RUNNERS[config.protocol](config, int(seed))
    logger.info("%s seed %d: %d rows", config.protocol, seed, len(rows))
    return rows


def _run_cell_args(args):
    return run_cell(*args)


def run_protocol(config: EvalConfig, seeds: Optional[Sequence[int]] = None) -> List[MetricRow]:
    """Run every seed and return rows in seed order.

    Args:
        config: EvalConfig
        seeds: Optional seed override

    Returns:
        Metric rows (seed order, then grid order within a seed)
    """
    seeds = [int(s) for s in (seeds if seeds is not None else config.seeds)]
    jobs = [(config, seed) for seed in seeds]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(_run_cell_args, jobs))
    else:
        chunks = [run_cell(*job) for job in jobs]
    return [row for chunk in chunks for row in chunk]


def aggregate(rows: Sequence[MetricRow]) -> List[SummaryRow]:
    """Mean, sample sd and 1.96 sd / sqrt(n) per (grid, method, metric).

    P2 rows at their seed's q* are also summarized under grid 'q=best';
    P4 summaries use accepted shocks only.
    """
    groups: "OrderedDict[Tuple[str, str, str], List[MetricRow]]" = OrderedDict()
    for row in rows:
        if row.shock_accepted is False:
            continue
        groups.setdefault((row.protocol, row.grid, row.method), []).append(row)
        if row.selected:
            groups.setdefault((row.protocol, 'q=best', row.method), []).append(row)

    summary = []
    for (protocol, grid, method), members in groups.items():
        for metric in METRIC_COLUMNS:
            values = [getattr(row, metric) for row in members if getattr(row, metric) is not None]
            if not values:
                continue
            mean, sd, ci = confidence_interval([float(v) for v in values])
            summary.append(SummaryRow(protocol, grid, method, metric, len(values), mean, sd, ci))
    return summary
