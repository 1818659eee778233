"""Standard graph families and the default verification corpus."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .graph import GraphError, WeightedGraph

FAMILIES = ("complete", "cycle", "path", "hypercube", "star", "erdos_renyi")
MEASURE_RULES = ("unit", "degree")


def _build(names, W, measure_rule: str) -> WeightedGraph:
    if measure_rule == "unit":
        m = np.ones(len(names))
    elif measure_rule == "degree":
        m = W.sum(axis=1)
        if np.any(m == 0):
            raise GraphError("degree measure needs a graph without isolated vertices")
    else:
        raise GraphError(f"unknown measure rule {measure_rule!r}")
    return WeightedGraph(names, W, m)


def generate_family(
    family: str,
    size: int,
    measure_rule: str = "unit",
    p: float | None = None,
    seed: int | None = None,
) -> WeightedGraph:
    """Unit-weight graph from a named family.

    ``size`` is the vertex count for complete/cycle/path/erdos_renyi, the
    dimension for hypercube and the number of leaves for star.
    """
    if not isinstance(size, (int, np.integer)) or size < 1:
        raise GraphError(f"size must be a positive integer, got {size!r}")
    size = int(size)

    if family == "complete":
        W = np.ones((size, size)) - np.eye(size)
        names = [str(i) for i in range(size)]
    elif family == "path":
        W = np.zeros((size, size))
        for i in range(size - 1):
            W[i, i + 1] = W[i + 1, i] = 1.0
        names = [str(i) for i in range(size)]
    elif family == "cycle":
        if size < 3:
            raise GraphError("cycle needs at least 3 vertices")
        W = np.zeros((size, size))
        for i in range(size):
            j = (i + 1) % size
            W[i, j] = W[j, i] = 1.0
        names = [str(i) for i in range(size)]
    elif family == "hypercube":
        if size > 11:
            raise GraphError("hypercube dimension above 11 is beyond desk scale")
        N = 1 << size
        W = np.zeros((N, N))
        for x in range(N):
            for b in range(size):
                W[x, x ^ (1 << b)] = 1.0
        names = [format(x, f"0{size}b") for x in range(N)]
    elif family == "star":
        W = np.zeros((size + 1, size + 1))
        W[0, 1:] = W[1:, 0] = 1.0
        names = ["c"] + [f"l{i}" for i in range(size)]
    elif family == "erdos_renyi":
        if p is None or not 0.0 <= p <= 1.0:
            raise GraphError(f"erdos_renyi needs an edge probability in [0, 1], got {p!r}")
        if seed is None:
            raise GraphError("erdos_renyi needs a seed")
        rng = np.random.default_rng(seed)
        upper = np.triu(rng.random((size, size)) < p, k=1)
        W = (upper | upper.T).astype(float)
        names = [str(i) for i in range(size)]
    else:
        raise GraphError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    return _build(names, W, measure_rule)


def random_connected_graph(
    size: int,
    p: float,
    seed: int,
    weighted: bool = False,
    measure_rule: str = "unit",
) -> WeightedGraph:
    """Erdős–Rényi graph forced connected by adding a random spanning path.

    With ``weighted=True`` edge weights are drawn from [0.5, 2] and, unless
    ``measure_rule='degree'``, the measure from [0.5, 2] as well.
    """
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((size, size)) < p, k=1)
    A = (upper | upper.T)
    order = rng.permutation(size)
    for a, b in zip(order[:-1], order[1:]):
        A[a, b] = A[b, a] = True
    W = A.astype(float)
    names = [str(i) for i in range(size)]
    if not weighted:
        return _build(names, W, measure_rule)
    R = np.triu(rng.uniform(0.5, 2.0, (size, size)), k=1)
    W = W * (R + R.T)
    if measure_rule == "degree":
        return _build(names, W, "degree")
    return WeightedGraph(names, W, rng.uniform(0.5, 2.0, size))


def default_corpus(seed: int = 0, random_count: int = 6) -> dict[str, WeightedGraph]:
    """Named, connected desk-scale graphs used by the verification suite."""
    corpus: dict[str, WeightedGraph] = {}
    for N in (2, 3, 4, 5, 6):
        corpus[f"K{N}"] = generate_family("complete", N)
    for N in (3, 4, 5, 6, 8):
        corpus[f"C{N}"] = generate_family("cycle", N)
    for N in (3, 4, 5):
        corpus[f"P{N}"] = generate_family("path", N)
    for N in (2, 3, 4):
        corpus[f"S{N}"] = generate_family("star", N)
    for d in (2, 3):
        corpus[f"Q{d}"] = generate_family("hypercube", d)
    corpus["K4_deg"] = generate_family("complete", 4, "degree")
    corpus["P4_deg"] = generate_family("path", 4, "degree")
    corpus["Q3_deg"] = generate_family("hypercube", 3, "degree")
    rng = np.random.default_rng(seed)
    for k in range(random_count):
        size = int(rng.integers(4, 9))
        p = float(rng.uniform(0.3, 0.8))
        s = int(rng.integers(2**31))
        corpus[f"ER{k}"] = random_connected_graph(size, p, s, weighted=bool(k % 2))
    return corpus


def pairs(N: int):
    return combinations(range(N), 2)
