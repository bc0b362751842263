"""
ZoneGraph Evaluation Module

Synthetic graph families, metrics, baselines and the P1-P4 protocols.
Figures live in evaluation.plots (imports matplotlib).
"""

from .generators import (
    Family,
    GeneratorConfig,
    GroundTruth,
    family_rng,
    node_labels,
    gen_g1,
    gen_g2,
    gen_g3,
    generate,
)

from .metrics import (
    Recovery,
    Matching,
    family_metrics,
    node_metrics,
    hungarian_match,
    stability,
    churn,
    tau_churn,
    false_collapse_rate,
    confidence_interval,
)

from .baselines import (
    baseline_unsign_cl,
    baseline_unsign_pro,
)

from .results import (
    MetricRow,
    SummaryRow,
    RESULT_COLUMNS,
    SUMMARY_COLUMNS,
    write_results,
    write_summary,
    read_results,
)

from .protocols import (
    PROTOCOLS,
    METHODS,
    EvalConfig,
    run_cell,
    run_protocol,
    aggregate,
)

__all__ = [
    # Generators
    'Family',
    'GeneratorConfig',
    'GroundTruth',
    'family_rng',
    'node_labels',
    'gen_g1',
    'gen_g2',
    'gen_g3',
    'generate',
    # Metrics
    'Recovery',
    'Matching',
    'family_metrics',
    'node_metrics',
    'hungarian_match',
    'stability',
    'churn',
    'tau_churn',
    'false_collapse_rate',
    'confidence_interval',
    # Baselines
    'baseline_unsign_cl',
    'baseline_unsign_pro',
    # Results
    'MetricRow',
    'SummaryRow',
    'RESULT_COLUMNS',
    'SUMMARY_COLUMNS',
    'write_results',
    'write_summary',
    'read_results',
    # Protocols
    'PROTOCOLS',
    'METHODS',
    'EvalConfig',
    'run_cell',
    'run_protocol',
    'aggregate',
]
