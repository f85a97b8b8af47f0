"""Weighted digraphs, their matrices, connectivity, and time-varying schedules.

Vertices are indexed 0..n-1 internally.  The JSON interchange format uses
1-indexed vertices (see :func:`graph_to_json` / :func:`graph_from_json`).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

# Absolute tolerance for balance / symmetry checks on user-supplied weights.
WEIGHT_TOL = 1e-12


class ConnectivityKind(Enum):
    STRONGLY_CONNECTED = "strongly_connected"
    ROOT_CONNECTED = "root_connected"
    WEAKLY_CONNECTED = "weakly_connected"
    DISCONNECTED = "disconnected"


@dataclass(frozen=True)
class Connectivity:
    """Strongest connectivity class of a digraph, with a root when applicable."""

    kind: ConnectivityKind
    root: int | None = None


class WeightedDigraph:
    """Directed graph on n vertices with a dense nonnegative weight matrix.

    Entry (j, k) is the weight of edge j -> k; a positive entry means the
    edge exists.  The diagonal is identically zero (no self-loops).
    Instances are immutable after construction.
    """

    def __init__(self, weights) -> None:
        w = np.array(weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        if w.shape[0] < 1:
            raise ValueError("graph needs at least one vertex")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.abs(np.diagonal(w)) > 0):
            raise ValueError("self-loops are not allowed (nonzero diagonal)")
        w.flags.writeable = False
        self._w = w

    @property
    def n(self) -> int:
        return self._w.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return self._w

    def _check_vertex(self, k: int) -> None:
        if not (0 <= k < self.n):
            raise ValueError(f"vertex {k} out of range for n={self.n}")

    def in_degree(self, k: int) -> float:
        """Sum of weights on edges into vertex k."""
        self._check_vertex(k)
        return float(self._w[:, k].sum())

    def out_degree(self, k: int) -> float:
        self._check_vertex(k)
        return float(self._w[k, :].sum())

    def in_degrees(self) -> np.ndarray:
        return self._w.sum(axis=0)

    def out_degrees(self) -> np.ndarray:
        return self._w.sum(axis=1)

    def is_balanced(self, tol: float = WEIGHT_TOL) -> bool:
        """True iff in-degree equals out-degree at every vertex."""
        return bool(np.all(np.abs(self.in_degrees() - self.out_degrees()) <= tol))

    def is_undirected(self, tol: float = WEIGHT_TOL) -> bool:
        return bool(np.all(np.abs(self._w - self._w.T) <= tol))

    def is_unweighted(self, tol: float = WEIGHT_TOL) -> bool:
        """True iff every positive weight equals 1."""
        pos = self._w[self._w > 0]
        return bool(np.all(np.abs(pos - 1.0) <= tol))

    def edges(self) -> list[tuple[int, int, float]]:
        """Directed edges (j, k, weight) in row-major order."""
        js, ks = np.nonzero(self._w)
        return [(int(j), int(k), float(self._w[j, k])) for j, k in zip(js, ks)]

    def laplacian(self, kind: str = "in") -> np.ndarray:
        """In- or out-Laplacian D - A.

        The in-Laplacian is annihilated by the all-ones row vector on the
        left; the out-Laplacian by the all-ones column on the right.
        """
        if kind == "in":
            d = self.in_degrees()
        elif kind == "out":
            d = self.out_degrees()
        else:
            raise ValueError(f"kind must be 'in' or 'out', got {kind!r}")
        return np.diag(d) - self._w

    def incidence(self) -> np.ndarray:
        """Incidence matrix with one column per edge, entries in {-1, 0, 1}.

        The column for edge (j, k) has -1 at row j and +1 at row k.  For an
        undirected graph one column is emitted per unordered pair, oriented
        from the smaller to the larger vertex index; B @ B.T then equals the
        Laplacian when the graph is unweighted.
        """
        if self.is_undirected():
            pairs = [(j, k) for j in range(self.n) for k in range(j + 1, self.n)
                     if self._w[j, k] > 0]
        else:
            pairs = [(j, k) for j, k, _ in self.edges()]
        b = np.zeros((self.n, len(pairs)))
        for m, (j, k) in enumerate(pairs):
            b[j, m] = -1.0
            b[k, m] = 1.0
        return b

    def adjacency_bool(self) -> np.ndarray:
        return self._w > 0

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n}, edges={int(np.count_nonzero(self._w))})"


def _reachable_from(adj: np.ndarray, start: int) -> np.ndarray:
    """Boolean mask of vertices reachable from start (including itself)."""
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        v = stack.pop()
        for u in np.nonzero(adj[v] & ~seen)[0]:
            seen[u] = True
            stack.append(int(u))
    return seen


def roots_of(g: WeightedDigraph) -> list[int]:
    """Vertices from which every other vertex is reachable."""
    adj = g.adjacency_bool()
    return [k for k in range(g.n) if _reachable_from(adj, k).all()]


def undirected_components(g: WeightedDigraph) -> list[list[int]]:
    """Connected components of the underlying undirected graph."""
    adj = g.adjacency_bool() | g.adjacency_bool().T
    remaining = set(range(g.n))
    comps = []
    while remaining:
        start = min(remaining)
        mask = _reachable_from(adj, start)
        comp = [int(v) for v in np.nonzero(mask)[0]]
        comps.append(comp)
        remaining -= set(comp)
    return comps


def classify_connectivity(g: WeightedDigraph) -> Connectivity:
    """Strongest applicable connectivity class, via reachability search."""
    adj = g.adjacency_bool()
    roots = [k for k in range(g.n) if _reachable_from(adj, k).all()]
    if len(roots) == g.n:
        return Connectivity(ConnectivityKind.STRONGLY_CONNECTED)
    if roots:
        return Connectivity(ConnectivityKind.ROOT_CONNECTED, root=roots[0])
    if len(undirected_components(g)) == 1:
        return Connectivity(ConnectivityKind.WEAKLY_CONNECTED)
    return Connectivity(ConnectivityKind.DISCONNECTED)


class GraphSequence:
    """Time-indexed sequence of digraphs over a common vertex set.

    Discrete mode (``durations=None``): entry t is the graph at step t.
    Continuous mode: ``durations[i]`` is how long ``graphs[i]`` is active;
    the schedule is piecewise constant.  A periodic schedule wraps around;
    an aperiodic one holds its last graph forever.

    Every positive weight of every member graph must be >= ``delta`` (and
    is bounded above by the recorded ``weight_bound``).
    """

    def __init__(self, graphs, delta: float, durations=None, periodic: bool = True):
        graphs = list(graphs)
        if not graphs:
            raise ValueError("schedule needs at least one graph")
        n = graphs[0].n
        if any(g.n != n for g in graphs):
            raise ValueError("all graphs in a schedule must share the vertex count")
        if delta <= 0:
            raise ValueError("delta must be positive")
        top = 0.0
        for g in graphs:
            pos = g.weights[g.weights > 0]
            if pos.size:
                if pos.min() < delta - WEIGHT_TOL:
                    raise ValueError(
                        f"positive weight {pos.min()} below the delta threshold {delta}")
                top = max(top, float(pos.max()))
        self.graphs = graphs
        self.delta = float(delta)
        self.weight_bound = top
        self.periodic = bool(periodic)
        if durations is None:
            self.durations = None
        else:
            durations = [float(d) for d in durations]
            if len(durations) != len(graphs):
                raise ValueError("need one duration per graph")
            if any(d <= 0 for d in durations):
                raise ValueError("durations must be positive")
            self.durations = durations

    @classmethod
    def constant(cls, g: WeightedDigraph, delta: float | None = None) -> "GraphSequence":
        """Single-graph schedule; delta defaults to the minimum positive weight."""
        if delta is None:
            pos = g.weights[g.weights > 0]
            delta = float(pos.min()) if pos.size else 1.0
        return cls([g], delta=delta)

    @property
    def n(self) -> int:
        return self.graphs[0].n

    @property
    def is_continuous(self) -> bool:
        return self.durations is not None

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def period(self) -> float:
        if not self.is_continuous:
            return float(len(self.graphs))
        return float(sum(self.durations))

    def graph_at_step(self, t: int) -> WeightedDigraph:
        """Graph active at discrete step t (wraps if periodic, else holds last)."""
        m = len(self.graphs)
        i = t % m if self.periodic else min(t, m - 1)
        return self.graphs[i]

    def graph_at_time(self, tau: float) -> WeightedDigraph:
        """Graph active at continuous time tau."""
        if not self.is_continuous:
            return self.graph_at_step(int(np.floor(tau)))
        total = self.period
        if self.periodic:
            tau = tau % total
        elif tau >= total:
            return self.graphs[-1]
        acc = 0.0
        for g, d in zip(self.graphs, self.durations):
            acc += d
            if tau < acc:
                return g
        return self.graphs[-1]

    def switch_times(self) -> list[float]:
        """Times within one period at which the active graph changes."""
        if not self.is_continuous:
            return [float(i) for i in range(len(self.graphs))]
        times, acc = [0.0], 0.0
        for d in self.durations[:-1]:
            acc += d
            times.append(acc)
        return times

    def integrated_weights(self, t: float, horizon: float) -> np.ndarray:
        """Exact integral of the weight matrix over [t, t+horizon]."""
        total = self.period
        durations = self.durations if self.is_continuous else [1.0] * len(self.graphs)
        out = np.zeros((self.n, self.n))
        remaining = float(horizon)
        tau = float(t)
        while remaining > 1e-15:
            if self.periodic:
                local = tau % total
            else:
                if tau >= total:
                    out += self.graphs[-1].weights * remaining
                    break
                local = tau
            # locate the active segment and how much of it is left
            acc = 0.0
            for g, d in zip(self.graphs, durations):
                if local < acc + d:
                    seg_left = acc + d - local
                    step = min(seg_left, remaining)
                    out += g.weights * step
                    tau += step
                    remaining -= step
                    break
                acc += d
            else:  # fell past the end due to rounding: treat as last segment
                out += self.graphs[-1].weights * remaining
                break
        return out

    def aggregate(self, t, horizon) -> WeightedDigraph:
        """Window-aggregated graph over [t, t+horizon].

        Discrete mode sums the weight matrices over steps t..t+horizon
        (inclusive).  Continuous mode integrates the weights and zeroes any
        entry whose integral falls below delta.
        """
        if not self.is_continuous:
            t = int(t)
            horizon = int(horizon)
            acc = np.zeros((self.n, self.n))
            for tau in range(t, t + horizon + 1):
                acc += self.graph_at_step(tau).weights
            return WeightedDigraph(acc)
        acc = self.integrated_weights(float(t), float(horizon))
        acc[acc < self.delta] = 0.0
        return WeightedDigraph(acc)


def is_uniformly_connected(seq: GraphSequence, horizon) -> bool:
    """True iff some vertex roots every window-aggregated graph of the schedule.

    A window starting at t aggregates the schedule over [t, t+horizon]; the
    sequence is uniformly connected when a single root vertex works for all
    window starts.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    candidates = set(range(seq.n))

    if not seq.is_continuous:
        horizon = int(horizon)
        for t in range(len(seq)):
            candidates &= set(roots_of(seq.aggregate(t, horizon)))
            if not candidates:
                return False
        return True

    # Piecewise-constant schedule: each integrated weight is piecewise linear
    # in the window start, with kinks only where either window edge crosses a
    # switch time.  Between consecutive kinks an edge holds throughout the
    # segment iff its integral clears delta at both endpoints.
    total = seq.period
    horizon = float(horizon)
    points = set()
    for s in seq.switch_times():
        points.add(s % total)
        points.add((s - horizon) % total)
    starts = sorted(points)
    if not seq.periodic:
        starts = sorted({p for p in points if 0.0 <= p <= total} | {0.0, total})
    segs = list(zip(starts, starts[1:] + [starts[0] + total])) if seq.periodic \
        else list(zip(starts[:-1], starts[1:]))
    for lo, hi in segs:
        w = np.minimum(seq.integrated_weights(lo, horizon),
                       seq.integrated_weights(hi, horizon))
        w[w < seq.delta - WEIGHT_TOL] = 0.0
        candidates &= set(roots_of(WeightedDigraph(w)))
        if not candidates:
            return False
    if not seq.periodic:
        # tail: the schedule holds its last graph forever
        w = seq.graphs[-1].weights * horizon
        w = np.where(w < seq.delta - WEIGHT_TOL, 0.0, w)
        candidates &= set(roots_of(WeightedDigraph(w)))
    return bool(candidates)


def complete_graph(n: int) -> WeightedDigraph:
    if n < 1:
        raise ValueError("n must be >= 1")
    return WeightedDigraph(np.ones((n, n)) - np.eye(n))


def ring_directed(n: int) -> WeightedDigraph:
    """Directed cycle 0 -> 1 -> ... -> n-1 -> 0."""
    if n < 2:
        raise ValueError("a ring needs n >= 2")
    w = np.zeros((n, n))
    for k in range(n):
        w[k, (k + 1) % n] = 1.0
    return WeightedDigraph(w)


def ring_undirected(n: int) -> WeightedDigraph:
    if n < 2:
        raise ValueError("a ring needs n >= 2")
    w = np.zeros((n, n))
    for k in range(n):
        w[k, (k + 1) % n] = 1.0
        w[(k + 1) % n, k] = 1.0
    return WeightedDigraph(w)


def path_graph(n: int) -> WeightedDigraph:
    """Undirected path 0 - 1 - ... - n-1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    w = np.zeros((n, n))
    for k in range(n - 1):
        w[k, k + 1] = 1.0
        w[k + 1, k] = 1.0
    return WeightedDigraph(w)


def directed_tree(n: int, root: int = 0, parents=None) -> WeightedDigraph:
    """Directed tree with edges parent -> child.

    Without ``parents`` the root is connected directly to every other vertex
    (a star).  Otherwise ``parents[i]`` names the parent of vertex i and must
    be None (or i itself) exactly at the root.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0 <= root < n):
        raise ValueError("root out of range")
    w = np.zeros((n, n))
    if parents is None:
        for k in range(n):
            if k != root:
                w[root, k] = 1.0
    else:
        if len(parents) != n:
            raise ValueError("parents must list one entry per vertex")
        for k, p in enumerate(parents):
            if k == root:
                if p not in (None, root):
                    raise ValueError("root must not have a parent")
                continue
            if p is None or not (0 <= p < n):
                raise ValueError(f"vertex {k} needs a valid parent")
            w[p, k] = 1.0
        g = WeightedDigraph(w)
        if classify_connectivity(g).kind not in (
                ConnectivityKind.ROOT_CONNECTED, ConnectivityKind.STRONGLY_CONNECTED):
            raise ValueError("parents do not describe a tree rooted at the root")
        return g
    return WeightedDigraph(w)


def vertex_interconnection(g1: WeightedDigraph, g2: WeightedDigraph,
                           shared: tuple[int, int]) -> WeightedDigraph:
    """Glue two graphs at one shared vertex.

    ``shared=(k1, k2)`` identifies vertex k1 of g1 with vertex k2 of g2; the
    result has g1's vertices at their original indices and g2's remaining
    vertices appended, so n = n1 + n2 - 1.
    """
    k1, k2 = shared
    g1._check_vertex(k1)
    g2._check_vertex(k2)
    n = g1.n + g2.n - 1
    w = np.zeros((n, n))
    w[:g1.n, :g1.n] = g1.weights
    # map g2 vertices: k2 -> k1, others -> fresh indices after g1's block
    mapping = {}
    nxt = g1.n
    for v in range(g2.n):
        if v == k2:
            mapping[v] = k1
        else:
            mapping[v] = nxt
            nxt += 1
    for j, k, wt in g2.edges():
        w[mapping[j], mapping[k]] += wt
    return WeightedDigraph(w)


_STANDARD_KINDS = {
    "complete": complete_graph,
    "ring_directed": ring_directed,
    "ring_undirected": ring_undirected,
    "path": path_graph,
    "directed_tree": directed_tree,
}


def make_standard(kind: str, **params) -> WeightedDigraph:
    """Construct one of the standard graphs by name.

    Kinds: complete, ring_directed, ring_undirected, path, directed_tree,
    vertex_interconnection (the latter takes graphs=(g1, g2), shared=(k1, k2)).
    """
    if kind == "vertex_interconnection":
        graphs = params.pop("graphs")
        shared = params.pop("shared")
        if params:
            raise ValueError(f"unexpected params {sorted(params)}")
        return vertex_interconnection(graphs[0], graphs[1], shared)
    try:
        ctor = _STANDARD_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown graph kind {kind!r}") from None
    return ctor(**params)


def graph_to_json(g: WeightedDigraph) -> dict:
    """JSON-ready dict with 1-indexed edge list [[j, k, weight], ...]."""
    return {
        "n": g.n,
        "edges": [[j + 1, k + 1, w] for j, k, w in g.edges()],
    }


def graph_from_json(data: dict) -> WeightedDigraph:
    """Build a graph from the JSON interchange format.

    Accepts either {"n": ..., "edges": [[j, k, weight], ...]} with 1-indexed
    vertices, or {"kind": ..., "params": {...}} invoking make_standard.
    """
    if "kind" in data:
        return make_standard(data["kind"], **data.get("params", {}))
    n = int(data["n"])
    w = np.zeros((n, n))
    for edge in data.get("edges", []):
        if len(edge) == 2:
            j, k = edge
            wt = 1.0
        else:
            j, k, wt = edge
        if not (1 <= j <= n and 1 <= k <= n):
            raise ValueError(f"edge {edge} out of range for n={n} (vertices are 1-indexed)")
        w[int(j) - 1, int(k) - 1] = float(wt)
    return WeightedDigraph(w)
