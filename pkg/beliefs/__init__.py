"""
ZoneGraph Beliefs Module

Belief-graph data model, signed aggregation, signed projection and graph files.
"""

from .graph import (
    BeliefNode,
    TypedEdge,
    BeliefGraph,
    unsigned_view,
    make_graph,
    SUPPORT_TYPE,
    CONTRADICTION_TYPE,
)

from .matrices import (
    SignedMatrices,
    row_normalize,
    build_signed_matrices,
    from_raw,
)

from .projection import (
    SignedProjection,
    signed_projection,
)

from .graph_io import (
    load_graph,
    save_graph,
    dumps_graph,
    loads_graph,
    graph_from_dict,
    graph_to_dict,
)

__all__ = [
    # Graph
    'BeliefNode',
    'TypedEdge',
    'BeliefGraph',
    'unsigned_view',
    'make_graph',
    'SUPPORT_TYPE',
    'CONTRADICTION_TYPE',
    # Matrices
    'SignedMatrices',
    'row_normalize',
    'build_signed_matrices',
    'from_raw',
    # Projection
    'SignedProjection',
    'signed_projection',
    # Files
    'load_graph',
    'save_graph',
    'dumps_graph',
    'loads_graph',
    'graph_from_dict',
    'graph_to_dict',
]
