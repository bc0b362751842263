"""
ZoneGraph Graph I/O
Load and save belief graphs in the canonical JSON format.

- Nodes are sorted by string id on load; dense ids follow that order
- Canonical output sorts nodes by id and edges by (src, dst, type)
- Floats are written as shortest round-trip decimals, so save/load is exact
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Union

from common.errors import GraphFormatError, GraphValidationError
from common.files import atomic_write_text, dumps_json
from common.logs import get_logger

from .graph import VALID_SIGNS, BeliefGraph, BeliefNode, TypedEdge

logger = get_logger('beliefs.io')


def _require(record: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(record, dict):
        raise GraphFormatError("expected an object", field=where)
    if key not in record:
        raise GraphFormatError("missing value", field=f"{where}.{key}")
    return record[key]


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise GraphFormatError(f"expected a number, got {value!r}", field=field)
    value = float(value)
    if not math.isfinite(value):
        raise GraphFormatError("value must be finite", field=field)
    return value


def graph_from_dict(data: Any) -> BeliefGraph:
    """Build a graph from the parsed JSON document.

    Args:
        data: Parsed JSON object with `nodes` and `edges`

    Returns:
        BeliefGraph with dense ids in sorted-id order

    Raises:
        GraphFormatError: Missing or mistyped fields
        GraphValidationError: Unknown signs, dangling endpoints, self-loops
    """
    if not isinstance(data, dict):
        raise GraphFormatError("top level must be an object")
    raw_nodes = data.get('nodes', [])
    raw_edges = data.get('edges', [])
    if not isinstance(raw_nodes, list):
        raise GraphFormatError("expected a list", field='nodes')
    if not isinstance(raw_edges, list):
        raise GraphFormatError("expected a list", field='edges')

    parsed = []
    for i, record in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        node_id = _require(record, 'id', where)
        if not isinstance(node_id, str):
            raise GraphFormatError("node id must be a string", field=f"{where}.id")
        psi = _number(_require(record, 'psi', where), f"{where}.psi")
        authority = record.get('authority')
        if authority is not None:
            authority = _number(authority, f"{where}.authority")
        parsed.append((node_id, psi, authority))

    parsed.sort(key=lambda item: item[0])
    labels = [item[0] for item in parsed]
    if len(set(labels)) != len(labels):
        raise GraphValidationError("duplicate node ids")
    index = {label: i for i, label in enumerate(labels)}
    nodes = [BeliefNode(i, psi, authority) for i, (_, psi, authority) in enumerate(parsed)]

    edges: List[TypedEdge] = []
    for i, record in enumerate(raw_edges):
        where = f"edges[{i}]"
        src = _require(record, 'src', where)
        dst = _require(record, 'dst', where)
        edge_type = _require(record, 'type', where)
        sign = _require(record, 'sign', where)
        weight = _number(_require(record, 'weight', where), f"{where}.weight")
        if not isinstance(edge_type, str):
            raise GraphFormatError("edge type must be a string", field=f"{where}.type")
        if isinstance(sign, bool) or sign not in VALID_SIGNS:
            raise GraphValidationError(f"{where}: unknown sign {sign!r}")
        for end, key in ((src, 'src'), (dst, 'dst')):
            if end not in index:
                raise GraphValidationError(f"{where}.{key}: unknown node id {end!r}")
        edges.append(TypedEdge(index[src], index[dst], edge_type, int(sign), weight))

    return BeliefGraph(nodes, edges, labels)


def graph_to_dict(graph: BeliefGraph) -> Dict[str, Any]:
    """Canonical JSON-ready structure for a graph."""
    order = sorted(range(graph.n), key=lambda i: graph.labels[i])
    nodes = [
        {'id': graph.labels[i], 'psi': graph.nodes[i].psi, 'authority': graph.nodes[i].authority}
        for i in order
    ]
    labelled = sorted(
        (graph.labels[e.src], graph.labels[e.dst], e.edge_type, e.sign, e.weight)
        for e in graph.edges
    )
    edges = [
        {'src': src, 'dst': dst, 'type': edge_type, 'sign': sign, 'weight': weight}
        for src, dst, edge_type, sign, weight in labelled
    ]
    return {'nodes': nodes, 'edges': edges}


def dumps_graph(graph: BeliefGraph) -> str:
    """Serialize to canonical JSON text (json uses repr for floats)."""
    return dumps_json(graph_to_dict(graph))


def loads_graph(text: str) -> BeliefGraph:
    """Parse graph JSON text.

    Raises:
        GraphFormatError: Malformed JSON, naming the offending line
    """
    if not text.strip():
        return BeliefGraph([], [])
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(e.msg, line=e.lineno) from e
    return graph_from_dict(data)


def load_graph(path: Union[str, Path]) -> BeliefGraph:
    """Load a graph file.

    Args:
        path: JSON graph file

    Returns:
        BeliefGraph
    """
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    graph = loads_graph(text)
    logger.debug("loaded %s: %d nodes, %d edges", path, graph.n, len(graph.edges))
    return graph


def save_graph(graph: BeliefGraph, path: Union[str, Path]) -> Path:
    """Write a graph file atomically in canonical form."""
    written = atomic_write_text(path, dumps_graph(graph))
    logger.debug("saved %s: %d nodes, %d edges", written, graph.n, len(graph.edges))
    return written
