"""Reading graph documents (JSON or whitespace edge lists).

See ``docs/formats.md`` for the schemas.  Input is validated, never repaired:
an asymmetric weight table is an error, not something to symmetrize.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .graph import GraphError, WeightedGraph


def _as_weight(value: Any, where: str) -> float:
    try:
        w = float(value)
    except (TypeError, ValueError):
        raise GraphError(f"{where}: weight {value!r} is not a number") from None
    if not math.isfinite(w) or w < 0:
        raise GraphError(f"{where}: weight must be finite and nonnegative, got {w}")
    return w


def graph_from_edges(
    edges,
    vertices=None,
    measure: str | Mapping[str, float] = "unit",
) -> WeightedGraph:
    """Build a graph from ``(u, v, w)`` triples.

    Each unordered pair may be listed once or in both orientations; listing it
    twice with different weights is rejected as asymmetric.  A positive
    self-loop is rejected; a zero-weight self-loop is accepted and ignored.
    """
    names: list[str] = [str(v) for v in vertices] if vertices is not None else []
    index = {v: i for i, v in enumerate(names)}
    if len(index) != len(names):
        raise GraphError("duplicate vertex names")
    fixed = vertices is not None
    table: dict[tuple[str, str], float] = {}

    for k, e in enumerate(edges):
        if len(e) not in (2, 3):
            raise GraphError(f"edge {k}: expected [u, v, w], got {e!r}")
        u, v = str(e[0]), str(e[1])
        w = _as_weight(e[2] if len(e) == 3 else 1.0, f"edge {k} ({u},{v})")
        for x in (u, v):
            if x not in index:
                if fixed:
                    raise GraphError(f"edge {k}: unknown vertex {x!r}")
                index[x] = len(names)
                names.append(x)
        if u == v:
            if w > 0:
                raise GraphError(f"edge {k}: self-loop at {u!r} with positive weight {w}")
            continue
        if (u, v) in table and table[u, v] != w:
            raise GraphError(f"edge {k}: conflicting weights {table[u, v]} and {w} for ({u},{v})")
        table[u, v] = w

    N = len(names)
    W = np.zeros((N, N))
    for (u, v), w in table.items():
        back = table.get((v, u))
        if back is not None and back != w:
            raise GraphError(f"asymmetric weight: w({u},{v})={w} but w({v},{u})={back}")
        W[index[u], index[v]] = W[index[v], index[u]] = w

    return WeightedGraph(names, W, _measure(names, W, measure))


def _measure(names: list[str], W: np.ndarray, spec: str | Mapping[str, float]) -> np.ndarray:
    if spec == "unit":
        return np.ones(len(names))
    if spec == "degree":
        deg = W.sum(axis=1)
        if np.any(deg <= 0):
            bad = names[int(np.flatnonzero(deg <= 0)[0])]
            raise GraphError(f"degree measure undefined at isolated vertex {bad!r}")
        return deg
    if isinstance(spec, Mapping):
        missing = [v for v in names if v not in spec]
        if missing:
            raise GraphError(f"measure missing for vertices {missing}")
        extra = sorted(set(spec) - set(names))
        if extra:
            raise GraphError(f"measure given for unknown vertices {extra}")
        m = np.array([float(spec[v]) for v in names])
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise GraphError("measure must be finite and positive")
        return m
    raise GraphError(f"measure must be 'unit', 'degree' or a mapping, got {spec!r}")


def graph_from_document(doc: Mapping[str, Any]) -> WeightedGraph:
    if not isinstance(doc, Mapping):
        raise GraphError("graph document must be a JSON object")
    if "edges" not in doc:
        raise GraphError("graph document has no 'edges' field")
    return graph_from_edges(doc["edges"], doc.get("vertices"), doc.get("measure", "unit"))


def parse_edge_list(text: str, measure="unit") -> WeightedGraph:
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphError(f"line {lineno}: expected 'u v w', got {raw!r}")
        edges.append(parts)
    return graph_from_edges(edges, measure=measure)


def load_measure(path: str | Path) -> dict[str, float]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphError(f"cannot read measure file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise GraphError("measure file must hold a JSON object {vertex: measure}")
    return data


def load_graph(source: str | Path | Mapping[str, Any], measure=None) -> WeightedGraph:
    """Load a graph from a JSON document, a ``.json`` file or an edge-list file.

    ``measure`` overrides the document's measure field when given.
    """
    if isinstance(source, Mapping):
        doc = dict(source)
        if measure is not None:
            doc["measure"] = measure
        return graph_from_document(doc)

    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc}") from None

    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: invalid JSON: {exc}") from None
        if measure is not None:
            doc["measure"] = measure
        return graph_from_document(doc)
    return parse_edge_list(text, measure if measure is not None else "unit")


def graph_to_document(G: WeightedGraph) -> dict[str, Any]:
    return {
        "vertices": list(G.vertices),
        "edges": [[G.vertices[i], G.vertices[j], w] for i, j, w in G.edges()],
        "measure": {v: float(m) for v, m in zip(G.vertices, G.measure)},
    }
