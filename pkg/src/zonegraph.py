#!/usr/bin/env python3
"""
# ================================================================
#   ZoneGraph - contradiction-tolerant belief graphs
# ================================================================
# Version: 1.0.0
# ================================================================

Usage:
    python src/zonegraph.py [--config FILE] [--log-file FILE] [--verbose] <command> [args]

Commands:
    generate   Write a synthetic G1/G2/G3 graph (plus planted blocks for G2)
    propagate  Solve for confidence and write node_id,phi,converged,t_star,r
    zones      Threshold, project and extract balanced zones
    atlas      Govern zones into an atlas and write the atlas report
    shock      Apply a contractivity-guarded shock
    eval       Run protocol p1..p4 over seeds, write results and summary
    plot       Render a figure (p1, p2-node, p2-zone, p3, p4) as SVG

Exit codes:
    0  success (also when propagation did not converge; the CSV says so)
    2  usage, validation or unreadable input
    3  domain rejection (contractivity or isolation)

Examples:
    zonegraph generate --family g2 --n 2000 --seed 7 --out g2.json
    zonegraph propagate g2.json --out phi.csv
    zonegraph atlas g2.json --q 0.75 --tau 0.3 --out atlas.csv
    zonegraph eval p1 --seeds 5 --out-dir runs/
    zonegraph plot runs/p1_results.csv --figure p1 --out p1.svg
"""

VERSION = "1.0.0"

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

# Project root on the path so the packages import when run as a script
sys.path.insert(0, str(Path(os.path.dirname(os.path.abspath(__file__))).parent))

from atlas.governance import GovernanceParams
from atlas.report import write_atlas_report, zone_report
from beliefs.graph import BeliefGraph
from beliefs.graph_io import dumps_graph, load_graph
from beliefs.projection import signed_projection
from common.config import build_params, load_config
from common.errors import ConfigError, DomainRejection, GraphValidationError, ZoneGraphError
from common.files import dumps_json, read_csv, render_csv, write_csv, write_json, write_text_group
from common.logs import get_logger, setup_logging
from dynamics.shocks import ShockSpec, apply_shock
from evaluation.generators import GeneratorConfig, generate
from evaluation.protocols import PROTOCOLS, EvalConfig, aggregate, run_protocol, zone_atlas
from evaluation.results import write_results, write_summary
from propagation.solver import PropagationParams, propagate_graph
from zones.extract import extract_zones, quantile_threshold, threshold_nodes

logger = get_logger('cli')

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REJECTED = 3

CONFIDENCE_COLUMNS = ['node_id', 'phi', 'converged', 't_star', 'r']
ZONE_COLUMNS = ['zone', 'size', 'mean_phi', 'min_phi', 'members']


# ============ HELPERS ============

def _overrides(args, section: str, names: List[str]) -> Dict[str, Any]:
    return {section: {name: getattr(args, name, None) for name in names}}


def _merge(*parts: Dict[str, Any]) -> Dict[str, Any]:
    merged: Dict[str, Any] = {}
    for part in parts:
        for section, values in part.items():
            merged.setdefault(section, {}).update(values)
    return merged


def _propagation(config: dict) -> PropagationParams:
    return build_params(PropagationParams, config['propagation'])


def _governance(config: dict) -> GovernanceParams:
    return build_params(GovernanceParams, config['governance'])


def read_confidence(path, graph: BeliefGraph) -> np.ndarray:
    """Phi vector from a confidence CSV written by `propagate`."""
    rows = read_csv(path)
    values = {row['node_id']: float(row['phi']) for row in rows}
    missing = [label for label in graph.labels if label not in values]
    if missing:
        raise GraphValidationError(f"confidence file lacks node {missing[0]!r}")
    return np.array([values[label] for label in graph.labels], dtype=np.float64)


def _confidence(args, graph: BeliefGraph, config: dict) -> np.ndarray:
    if getattr(args, 'confidence', None):
        return read_confidence(args.confidence, graph)
    return propagate_graph(graph, _propagation(config)).phi


def _theta(phi: np.ndarray, config: dict) -> float:
    theta = config['zones']['theta']
    if theta is not None:
        return float(theta)
    return quantile_threshold(phi, float(config['zones']['q']))


def _confidence_rows(graph: BeliefGraph, state):
    return [(graph.labels[i], float(state.phi[i]), state.converged, state.iterations,
             state.contraction_factor) for i in range(graph.n)]


# ============ COMMANDS ============

def cmd_generate(args, config: dict) -> int:
    """Write a generated graph, and the planted blocks when the family has them."""
    gen = build_params(GeneratorConfig, config['generator'])
    graph, truth = generate(gen)
    outputs = {args.out: dumps_graph(graph)}
    if truth is not None:
        truth_path = Path(args.truth) if args.truth else Path(args.out).with_suffix('.truth.json')
        outputs[truth_path] = dumps_json({
            'family': gen.family,
            'seed': gen.seed,
            'blocks': [[graph.labels[i] for i in block] for block in truth.blocks],
        })
    write_text_group(outputs)
    if truth is not None:
        logger.info("wrote planted blocks to %s", truth_path)
    logger.info("generated %s graph: %d nodes, %d edges", gen.family, graph.n, len(graph.edges))
    return EXIT_OK


def cmd_propagate(args, config: dict) -> int:
    graph = load_graph(args.graph)
    state = propagate_graph(graph, _propagation(config))
    if not state.converged:
        logger.warning("propagation did not converge (r=%.4f); reporting the last iterate",
                       state.contraction_factor)
    write_csv(args.out, CONFIDENCE_COLUMNS, _confidence_rows(graph, state))
    return EXIT_OK


def cmd_zones(args, config: dict) -> int:
    """Balanced zones at the configured threshold, before governance."""
    graph = load_graph(args.graph)
    phi = _confidence(args, graph, config)
    theta = _theta(phi, config) if graph.n else 0.0
    zones = extract_zones(signed_projection(graph, threshold_nodes(phi, theta)), phi)
    rows = [(i + 1, zone.size, zone.mean_phi, zone.min_phi,
             ' '.join(graph.labels[m] for m in zone.members)) for i, zone in enumerate(zones)]
    write_csv(args.out, ZONE_COLUMNS, rows)
    logger.info("theta=%.6g: %d zones", theta, len(zones))
    return EXIT_OK


def cmd_atlas(args, config: dict) -> int:
    graph = load_graph(args.graph)
    phi = _confidence(args, graph, config)
    theta = _theta(phi, config) if graph.n else 0.0
    atlas = zone_atlas(graph, phi, theta, _governance(config))
    write_atlas_report(zone_report(atlas, phi, graph), args.out)
    logger.info("atlas at theta=%.6g holds %d zones", theta, len(atlas))
    return EXIT_OK


def load_shock_spec(path, graph: BeliefGraph, config: dict) -> ShockSpec:
    """Shock file: {"targets": {"<node id>": s}, "kappa": f, "rho_shock": f}."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"shock file line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict) or not isinstance(data.get('targets', {}), dict):
        raise ConfigError("shock file must be an object with a 'targets' object")
    unknown = sorted(set(data) - {'targets', 'kappa', 'rho_shock', 'delta_margin'})
    if unknown:
        raise ConfigError(f"unknown shock keys: {', '.join(unknown)}")
    index = graph.label_index
    targets = {}
    for label, strength in data.get('targets', {}).items():
        if label not in index:
            raise ConfigError(f"shock target {label!r} is not a node")
        targets[index[label]] = strength
    section = dict(config['shock'])
    section.update({key: data[key] for key in ('kappa', 'rho_shock', 'delta_margin') if key in data})
    return build_params(ShockSpec, section, targets=targets)


def cmd_shock(args, config: dict) -> int:
    """Shocked graph, its confidence CSV and the applied-strength log."""
    graph = load_graph(args.graph)
    spec = load_shock_spec(args.spec, graph, config)
    result = apply_shock(graph, spec, _propagation(config))
    out = Path(args.out)
    confidence_path = Path(args.confidence_out) if args.confidence_out else out.with_suffix('.phi.csv')
    log_path = Path(args.strengths_out) if args.strengths_out else out.with_suffix('.strengths.json')
    write_text_group({
        out: dumps_graph(result.graph),
        confidence_path: render_csv(CONFIDENCE_COLUMNS, _confidence_rows(result.graph, result.state)),
        log_path: dumps_json({
            'factor': result.factor,
            'halvings': result.halvings,
            'r_pre': result.r_pre,
            'r_post': result.state.contraction_factor,
            'strengths': {graph.labels[u]: s for u, s in sorted(result.strengths.items())},
        }),
    })
    return EXIT_OK


def build_eval_config(protocol: str, config: dict) -> EvalConfig:
    section = config['eval']
    seeds = section['seeds']
    seeds = tuple(range(int(seeds))) if isinstance(seeds, int) else tuple(int(s) for s in seeds)
    try:
        return EvalConfig(
            protocol=protocol,
            seeds=seeds,
            family=section['family'],
            generator=dict(section['generator']),
            propagation=_propagation(config),
            governance=_governance(config),
            alphas=tuple(section['alphas']),
            etas=tuple(section['etas']),
            q_grid=tuple(section['q_grid']),
            jitters=tuple(section['jitters']),
            jitter_q=section['jitter_q'],
            taus=tuple(section['taus']),
            masses=tuple(section['masses']),
            shock_nodes=section['shock_nodes'],
            shock_q=section['shock_q'],
            kappa=config['shock']['kappa'],
            rho_shock=config['shock']['rho_shock'],
            workers=section['workers'],
            record_timing=section['record_timing'],
        )
    except TypeError as e:
        raise ConfigError(f"bad eval settings: {e}") from e


def run_id(eval_config: EvalConfig) -> str:
    """Short SHA-1 of the canonical configuration (workers excluded)."""
    payload = asdict(eval_config)
    payload.pop('workers')
    canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
    return hashlib.sha1(canonical.encode('utf-8')).hexdigest()[:12]


def cmd_eval(args, config: dict) -> int:
    eval_config = build_eval_config(args.protocol, config)
    rows = run_protocol(eval_config)
    out_dir = Path(args.out_dir)
    write_results(rows, out_dir / f"{args.protocol}_results.csv")
    write_summary(aggregate(rows), out_dir / f"{args.protocol}_summary.csv")
    payload = asdict(eval_config)
    payload.pop('workers')
    write_json(out_dir / f"{args.protocol}_run.json", {
        'run_id': run_id(eval_config),
        'version': VERSION,
        'config': payload,
    })
    logger.info("%s: %d rows over %d seeds", args.protocol, len(rows), len(eval_config.seeds))
    return EXIT_OK


def cmd_plot(args, config: dict) -> int:
    from evaluation.plots import plot_results
    plot_results(args.results, args.figure, args.out)
    return EXIT_OK


# ============ ARGUMENTS ============

def _add_propagation_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--alpha', type=float)
    parser.add_argument('--eta', type=float)
    parser.add_argument('--eps', type=float)
    parser.add_argument('--t-max', type=int, dest='t_max')
    parser.add_argument('--prior-mode', choices=['credibility', 'structure'], dest='prior_mode')
    parser.add_argument('--lam', type=float)


def _add_zone_flags(parser: argparse.ArgumentParser):
    parser.add_argument('graph', help='graph JSON file')
    parser.add_argument('--confidence', help='confidence CSV from `propagate` (solved when omitted)')
    parser.add_argument('--theta', type=float, help='absolute threshold')
    parser.add_argument('--q', type=float, help='quantile threshold (used when --theta is absent)')
    parser.add_argument('--out', required=True)
    _add_propagation_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='zonegraph', description='Contradiction-tolerant belief graphs')
    parser.add_argument('--config', help='JSON file merged over config/config.json')
    parser.add_argument('--log-file', dest='log_file')
    parser.add_argument('--verbose', action='store_true', default=None)
    parser.add_argument('--version', action='version', version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', help='write a synthetic graph')
    gen.add_argument('--family', choices=['g1', 'g2', 'g3'])
    gen.add_argument('--n', type=int)
    gen.add_argument('--seed', type=int)
    gen.add_argument('--d', type=int)
    gen.add_argument('--rho-minus', type=float, dest='rho_minus')
    gen.add_argument('--k-zones', type=int, dest='k_zones')
    gen.add_argument('--block-size', type=int, dest='block_size')
    gen.add_argument('--p-in', type=float, dest='p_in')
    gen.add_argument('--p-out-pos', type=float, dest='p_out_pos')
    gen.add_argument('--p-out-neg', type=float, dest='p_out_neg')
    gen.add_argument('--cycles', type=int)
    gen.add_argument('--out', required=True)
    gen.add_argument('--truth', help='planted-block file for G2 (default <out>.truth.json)')

    prop = sub.add_parser('propagate', help='solve for confidence')
    prop.add_argument('graph')
    prop.add_argument('--out', required=True)
    _add_propagation_flags(prop)

    _add_zone_flags(sub.add_parser('zones', help='extract balanced zones'))

    atlas = sub.add_parser('atlas', help='govern zones and write the atlas report')
    _add_zone_flags(atlas)
    atlas.add_argument('--tau', type=float)
    atlas.add_argument('--k', type=int)
    atlas.add_argument('--lambda-gov', type=float, dest='lambda_gov')
    atlas.add_argument('--rho-gov', type=float, dest='rho_gov')
    atlas.add_argument('--scoring-mode', choices=['raw', 'normalized', 'quality'], dest='scoring_mode')

    shock = sub.add_parser('shock', help='apply a guarded shock')
    shock.add_argument('graph')
    shock.add_argument('--spec', required=True, help='shock JSON file')
    shock.add_argument('--out', required=True, help='post-shock graph file')
    shock.add_argument('--confidence-out', dest='confidence_out')
    shock.add_argument('--strengths-out', dest='strengths_out')
    _add_propagation_flags(shock)

    ev = sub.add_parser('eval', help='run an evaluation protocol')
    ev.add_argument('protocol', choices=PROTOCOLS)
    ev.add_argument('--seeds', type=int, help='run seeds 0..N-1')
    ev.add_argument('--family', choices=['g1', 'g2', 'g3'])
    ev.add_argument('--n', type=int, help='graph size override')
    ev.add_argument('--m', type=float, nargs='+', dest='masses', help='P4 shock masses')
    ev.add_argument('--tau', type=float, nargs='+', dest='taus', help='P3 overlap thresholds')
    ev.add_argument('--jitter', type=float, nargs='+', dest='jitters', help='P3 jitter scales')
    ev.add_argument('--workers', type=int)
    ev.add_argument('--record-timing', action='store_true', default=None, dest='record_timing')
    ev.add_argument('--out-dir', default='.', dest='out_dir')

    plot = sub.add_parser('plot', help='render a results figure as SVG')
    plot.add_argument('results')
    plot.add_argument('--figure', required=True, choices=['p1', 'p2-node', 'p2-zone', 'p3', 'p4'])
    plot.add_argument('--out', required=True)
    return parser


def config_overrides(args) -> Dict[str, Any]:
    """Nested overrides from the flags a command defines (unset flags are None)."""
    parts = [{'logging': {'log_file': args.log_file, 'verbose': args.verbose}}]
    parts.append(_overrides(args, 'propagation', ['alpha', 'eta', 'eps', 't_max', 'prior_mode', 'lam']))
    if args.command == 'generate':
        parts.append(_overrides(args, 'generator', ['family', 'n', 'seed', 'd', 'rho_minus', 'k_zones', 'block_size',
                                                    'p_in', 'p_out_pos', 'p_out_neg', 'cycles']))
    if args.command in ('zones', 'atlas'):
        parts.append(_overrides(args, 'zones', ['theta', 'q']))
        parts.append(_overrides(args, 'governance', ['tau', 'k', 'lambda_gov', 'rho_gov', 'scoring_mode']))
    if args.command == 'eval':
        parts.append(_overrides(args, 'eval', ['seeds', 'family', 'masses', 'taus', 'jitters',
                                               'workers', 'record_timing']))
    return _merge(*parts)


# Command dispatch table
COMMANDS = {
    'generate': cmd_generate,
    'propagate': cmd_propagate,
    'zones': cmd_zones,
    'atlas': cmd_atlas,
    'shock': cmd_shock,
    'eval': cmd_eval,
    'plot': cmd_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, configure, dispatch; map errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = load_config(args.config, config_overrides(args))
        if args.command == 'eval' and args.n is not None:
            config['eval']['generator'] = dict(config['eval']['generator'], n=args.n)
        setup_logging(config['logging']['log_file'], bool(config['logging']['verbose']))
        logger.debug("zonegraph %s: %s", VERSION, args.command)
        return COMMANDS[args.command](args, config)
    except DomainRejection as e:
        logger.error("rejected: %s", e)
        print(f"[!] rejected: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except (ZoneGraphError, ValueError, OSError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"[!] {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
