"""
ZoneGraph Dynamics Module

Shocks, edits, the update-and-refresh loop and zone reasoning handback.
"""

from .shocks import (
    SHOCK_TYPE,
    ShockSpec,
    ShockResult,
    shocked_graph,
    apply_shock,
    batch_shocks,
    window_batches,
)

from .edits import (
    EditKind,
    NewNode,
    EdgeChange,
    EditDelta,
    apply_edit,
    index_map,
)

from .update import (
    UpdateOutcome,
    damped_graph,
    update_and_refresh,
)

from .reasoning import (
    ZoneScope,
    ReasonerProposal,
    Reasoner,
    EchoReasoner,
    FixedCredibilityReasoner,
    zone_scopes,
    run_reasoning,
)

from .strategies import (
    suppress,
    steer_prior,
)

__all__ = [
    # Shocks
    'SHOCK_TYPE',
    'ShockSpec',
    'ShockResult',
    'shocked_graph',
    'apply_shock',
    'batch_shocks',
    'window_batches',
    # Edits
    'EditKind',
    'NewNode',
    'EdgeChange',
    'EditDelta',
    'apply_edit',
    'index_map',
    # Update loop
    'UpdateOutcome',
    'damped_graph',
    'update_and_refresh',
    # Reasoning
    'ZoneScope',
    'ReasonerProposal',
    'Reasoner',
    'EchoReasoner',
    'FixedCredibilityReasoner',
    'zone_scopes',
    'run_reasoning',
    # Strategies
    'suppress',
    'steer_prior',
]
