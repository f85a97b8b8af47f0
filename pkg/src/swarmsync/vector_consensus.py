"""Linear consensus on R^n in continuous and discrete time.

Swarm states are arrays of shape (N, n): one row per agent.  Batched inputs
of shape (..., N, n) are accepted by the pure functions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .graphs import GraphSequence, WeightedDigraph
from .integrators import rk4_path
from . import output


def _as_states(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim < 2:
        raise ValueError("states must have shape (..., N, n)")
    return x


def ct_rhs(x, g: WeightedDigraph, alpha: float = 1.0) -> np.ndarray:
    """Continuous-time coupling: agent k moves at alpha * sum_j a_jk (x_j - x_k).

    For an undirected graph this equals -alpha * (L kron I_n) x.
    """
    x = _as_states(x)
    if x.shape[-2] != g.n:
        raise ValueError(f"state has {x.shape[-2]} agents but graph has {g.n} vertices")
    a = g.weights
    din = g.in_degrees()
    pulled = np.einsum("jk,...jd->...kd", a, x)
    return alpha * (pulled - din[:, None] * x)


def dt_step(x, g: WeightedDigraph, alpha: float, b: float | None = None) -> np.ndarray:
    """One discrete-time update x_k + alpha * sum_j a_jk (x_j - x_k).

    Requires alpha * in_degree_k <= b < 1 for every agent, so each new point
    is a convex combination of the agent and its in-neighbors.
    """
    x = _as_states(x)
    if x.shape[-2] != g.n:
        raise ValueError(f"state has {x.shape[-2]} agents but graph has {g.n} vertices")
    bound = 1.0 if b is None else float(b)
    if b is not None and not (0.0 < b < 1.0):
        raise ValueError("contraction bound b must lie in (0, 1)")
    loads = alpha * g.in_degrees()
    bad = np.nonzero(loads > bound + 1e-15)[0]
    if bad.size:
        k = int(bad[0])
        raise ValueError(
            f"gain condition violated at vertex {k}: alpha*in_degree = {loads[k]:.6g} "
            f"exceeds the bound {bound:.6g}")
    if b is None and np.any(loads >= 1.0):
        k = int(np.nonzero(loads >= 1.0)[0][0])
        raise ValueError(
            f"gain condition violated at vertex {k}: alpha*in_degree = {loads[k]:.6g} >= 1")
    return x + ct_rhs(x, g, alpha)


def disagreement_cost(x, g: WeightedDigraph) -> float:
    """Quadratic disagreement 0.5 * sum_jk a_jk ||x_j - x_k||^2.

    Meaningful as a Lyapunov function for undirected graphs; a warning is
    issued for directed input.
    """
    x = _as_states(x)
    if not g.is_undirected():
        warnings.warn("disagreement cost is intended for undirected graphs",
                      stacklevel=2)
    diff = x[..., :, None, :] - x[..., None, :, :]
    sq = np.einsum("...jkd,...jkd->...jk", diff, diff)
    val = 0.5 * np.einsum("jk,...jk->...", g.weights, sq)
    return float(val) if np.ndim(val) == 0 else val


@dataclass
class VectorTrajectory:
    """Sampled consensus run: times (S,), states (S, N, n), run metadata."""

    times: np.ndarray
    states: np.ndarray
    meta: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        output.write_vector_csv(self.times, self.states, path)

    def mean_drift(self) -> float:
        """Largest deviation of the swarm mean from its initial value."""
        means = self.states.mean(axis=1)
        return float(np.abs(means - means[0]).max())


def _as_schedule(graph_or_schedule) -> GraphSequence:
    if isinstance(graph_or_schedule, WeightedDigraph):
        return GraphSequence.constant(graph_or_schedule)
    return graph_or_schedule


def simulate(x0, schedule, alpha: float = 1.0, mode: str = "ct",
             t_end: float | None = None, h: float = 0.01,
             steps: int | None = None, b: float | None = None,
             sample_every: int = 1, meta: dict | None = None) -> VectorTrajectory:
    """Run linear consensus under a (possibly switching) graph schedule.

    mode="ct" integrates the coupling with fixed-step RK4 over t_end;
    mode="dt" applies ``steps`` discrete updates.  A balanced schedule keeps
    the swarm mean constant along the run (up to roundoff).
    """
    x0 = _as_states(np.array(x0, dtype=float))
    sched = _as_schedule(schedule)
    info = dict(meta or {})
    info.setdefault("algorithm", f"vector_consensus_{mode}")
    info.setdefault("alpha", alpha)
    if mode == "ct":
        if t_end is None:
            raise ValueError("continuous mode needs t_end")

        def rhs(t, y):
            return ct_rhs(y, sched.graph_at_time(t), alpha)

        times, states = rk4_path(rhs, x0, t_end, h, sample_every)
        info.setdefault("h", h)
        return VectorTrajectory(times, states, info)
    if mode == "dt":
        if steps is None:
            raise ValueError("discrete mode needs steps")
        xs = [x0]
        x = x0
        for t in range(steps):
            x = dt_step(x, sched.graph_at_step(t), alpha, b)
            xs.append(x)
        times = np.arange(steps + 1, dtype=float)
        keep = np.arange(0, steps + 1, sample_every)
        if keep[-1] != steps:
            keep = np.append(keep, steps)
        return VectorTrajectory(times[keep], np.array(xs)[keep], info)
    raise ValueError(f"mode must be 'ct' or 'dt', got {mode!r}")
