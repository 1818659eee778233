"""Finite weighted graphs, the graph Laplacian, degree ratios and hop distances.

Every graph handled here is finite, so local finiteness, non-degeneracy of the
vertex measure and (stochastic) completeness hold automatically.  Vertex names
are strings; internally vertices are dense indices ``0..N-1`` in the order of
``WeightedGraph.vertices``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed or invalid graph input."""


class DisconnectedGraphError(GraphError):
    """Raised by distance operations on a disconnected graph."""

    def __init__(self, components: list[list[str]]):
        self.components = components
        sizes = ", ".join(str(len(c)) for c in components)
        super().__init__(f"graph is disconnected: {len(components)} components (sizes {sizes})")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Weighted, measured graph ``(V, w, m)``.

    Parameters
    ----------
    vertices : sequence of str
        Vertex names; position in the sequence is the dense index.
    weight : (N, N) array
        Symmetric, nonnegative, zero diagonal.
    measure : (N,) array
        Strictly positive vertex measure.

    The arrays are copied and made read-only, so instances can be shared
    freely between threads.
    """

    vertices: tuple[str, ...]
    weight: np.ndarray
    measure: np.ndarray

    def __init__(self, vertices: Sequence[str], weight, measure):
        names = tuple(str(v) for v in vertices)
        w = _frozen(weight)
        m = _frozen(measure)
        n = len(names)
        if len(set(names)) != n:
            raise GraphError("duplicate vertex names")
        if w.shape != (n, n):
            raise GraphError(f"weight matrix has shape {w.shape}, expected {(n, n)}")
        if m.shape != (n,):
            raise GraphError(f"measure has shape {m.shape}, expected {(n,)}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(m))):
            raise GraphError("weights and measures must be finite")
        if np.any(w < 0):
            raise GraphError("negative edge weight")
        if np.any(np.diag(w) != 0):
            i = int(np.flatnonzero(np.diag(w))[0])
            raise GraphError(f"self-loop with positive weight at {names[i]!r}")
        if not np.array_equal(w, w.T):
            i, j = np.argwhere(w != w.T)[0]
            raise GraphError(
                f"asymmetric weight: w({names[i]},{names[j]})={w[i, j]} "
                f"but w({names[j]},{names[i]})={w[j, i]}"
            )
        if np.any(m <= 0):
            i = int(np.flatnonzero(m <= 0)[0])
            raise GraphError(f"nonpositive measure at {names[i]!r}: {m[i]}")
        object.__setattr__(self, "vertices", names)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "measure", m)

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"WeightedGraph(N={len(self)}, edges={len(self.edges())})"

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def vertex_index(self, v: str | int) -> int:
        if isinstance(v, (int, np.integer)):
            if not 0 <= v < len(self):
                raise GraphError(f"vertex index {v} out of range")
            return int(v)
        try:
            return self.index[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    @cached_property
    def degree(self) -> np.ndarray:
        """``deg(x) = sum_y w(x, y)``."""
        d = self.weight.sum(axis=1)
        d.setflags(write=False)
        return d

    @cached_property
    def neighbors(self) -> tuple[np.ndarray, ...]:
        return tuple(np.flatnonzero(row > 0) for row in self.weight)

    def edges(self) -> list[tuple[int, int, float]]:
        i, j = np.nonzero(np.triu(self.weight))
        return [(int(a), int(b), float(self.weight[a, b])) for a, b in zip(i, j)]

    @cached_property
    def components(self) -> list[list[int]]:
        seen = np.zeros(len(self), dtype=bool)
        comps = []
        for s in range(len(self)):
            if seen[s]:
                continue
            comp = []
            seen[s] = True
            queue = deque([s])
            while queue:
                x = queue.popleft()
                comp.append(x)
                for y in self.neighbors[x]:
                    if not seen[y]:
                        seen[y] = True
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1

    def require_connected(self) -> None:
        if not self.is_connected:
            raise DisconnectedGraphError(
                [[self.vertices[i] for i in c] for c in self.components]
            )

    def field(self, values) -> np.ndarray:
        """Validate ``values`` as a scalar field on this graph and return it as an array."""
        f = np.asarray(values, dtype=float)
        if f.shape != (len(self),):
            raise GraphError(f"field has shape {f.shape}, expected {(len(self),)}")
        if not np.all(np.isfinite(f)):
            raise GraphError("field has non-finite entries")
        return f

    def scaled(self, lam: float) -> "WeightedGraph":
        """Graph with ``(lam*w, lam*m)``; the Laplacian is unchanged."""
        return WeightedGraph(self.vertices, lam * self.weight, lam * self.measure)

    def with_weight(self, x, y, w: float) -> "WeightedGraph":
        i, j = self.vertex_index(x), self.vertex_index(y)
        W = np.array(self.weight)
        W[i, j] = W[j, i] = w
        return WeightedGraph(self.vertices, W, self.measure)


def laplacian_apply(G: WeightedGraph, f) -> np.ndarray:
    """``(Δf)(x) = (1/m(x)) Σ_y w(x,y) (f(y) - f(x))``."""
    f = G.field(f)
    return (G.weight @ f - G.degree * f) / G.measure


def laplacian_matrix(G: WeightedGraph) -> np.ndarray:
    return (G.weight - np.diag(G.degree)) / G.measure[:, None]


@dataclass(frozen=True)
class DegreeProfile:
    values: np.ndarray
    maximum: float
    isolated: tuple[str, ...]

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])


def degree_ratio(G: WeightedGraph) -> DegreeProfile:
    """Per-vertex ``Deg(x) = deg(x)/m(x)`` and its maximum.

    Isolated vertices have ``Deg = 0`` and are listed in ``isolated``.
    """
    values = G.degree / G.measure
    isolated = tuple(G.vertices[i] for i in np.flatnonzero(G.degree == 0))
    return DegreeProfile(values=values, maximum=float(values.max(initial=0.0)), isolated=isolated)


@dataclass(frozen=True)
class DistanceMatrix:
    """Hop-count distances; ``entries[i, j]`` is ``d(vertices[i], vertices[j])``."""

    vertices: tuple[str, ...]
    entries: np.ndarray

    @property
    def diameter(self) -> int:
        return int(self.entries.max(initial=0))

    def __call__(self, x: int, y: int) -> int:
        return int(self.entries[x, y])


def bfs_distances(G: WeightedGraph, source: int) -> np.ndarray:
    """Hop counts from ``source``; unreachable vertices get -1."""
    dist = np.full(len(G), -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in G.neighbors[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def combinatorial_distances(G: WeightedGraph) -> DistanceMatrix:
    """All-pairs BFS hop distances.  Weights only decide adjacency."""
    G.require_connected()
    D = np.vstack([bfs_distances(G, s) for s in range(len(G))])
    D.setflags(write=False)
    return DistanceMatrix(G.vertices, D)
