"""Randomized neighbor-selection synchronization and its expected hitting times.

At every step each agent independently either keeps its state (weight beta)
or selects one in-neighbor j with probability proportional to the edge
weight, then jumps to j's state ("jump" variant) or averages toward it
("moderate" variant).  All selections read the time-t states, so the update
is simultaneous.

Reproducibility contract: randomness comes from numpy's PCG64.  The draw for
step t of trial r under master seed s uses the substream seeded by
SeedSequence((s, r, t, 0)); entry k of that substream's uniform vector
belongs to agent k.  Random initial angles use SeedSequence((s, r, 0, 1)).
Replays are therefore bit-stable across platforms and independent of how
trials are batched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import (ConnectivityKind, GraphSequence, WeightedDigraph,
                     classify_connectivity)
from .metrics import pairwise_arc_spread
from .circle import wrap

_STATE_CAP = 10**6
_NNZ_CAP = 5 * 10**7


@dataclass(frozen=True)
class GossipConfig:
    """Parameters of a randomized-selection run.

    beta weights the "choose no agent" outcome; the moderate variant keeps
    inertia alpha on the agent's own phasor.  sync_tol is the arc-spread
    threshold declaring a moderate run synchronized (the jump variant
    requires exact single-state occupancy, which it reaches in finite time).
    """

    beta: float = 1.0
    variant: str = "jump"
    alpha: float = 1.0
    seed: int = 0
    max_steps: int = 100_000
    sync_tol: float = 1e-6

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.variant not in ("jump", "moderate"):
            raise ValueError("variant must be 'jump' or 'moderate'")
        if self.variant == "moderate" and self.alpha <= 0:
            raise ValueError("the moderate variant needs alpha > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


def step_rng(seed: int, trial: int, t: int) -> np.random.Generator:
    """Substream for step t of a trial (see the module reproducibility contract)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, trial, t, 0))))


def init_rng(seed: int, trial: int) -> np.random.Generator:
    """Substream for a trial's random initial state."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, trial, 0, 1))))


class _SelectionTable:
    """Per-agent cumulative selection thresholds for one graph."""

    def __init__(self, g: WeightedDigraph, beta: float):
        self.neighbors = []
        self.cums = []
        self.totals = np.empty(g.n)
        for k in range(g.n):
            col = g.weights[:, k]
            nbr = np.nonzero(col)[0]
            self.neighbors.append(nbr)
            self.cums.append(np.cumsum(col[nbr]))
            self.totals[k] = beta + col[nbr].sum()

    def choose(self, u: np.ndarray) -> list:
        """Map uniforms in [0,1) to selections: neighbor index or None (stay).

        Agent k selects neighbor j when u_k * (beta + d_k) falls inside j's
        weight slot; the remaining probability mass beta/(beta + d_k) means
        staying, so the per-agent probabilities sum to one exactly.
        """
        picks = []
        for k in range(len(self.neighbors)):
            scaled = u[k] * self.totals[k]
            cum = self.cums[k]
            if cum.size and scaled < cum[-1]:
                picks.append(int(self.neighbors[k][np.searchsorted(cum, scaled, side="right")]))
            else:
                picks.append(None)
        return picks


def gossip_step(state, g: WeightedDigraph, cfg: GossipConfig,
                rng: np.random.Generator) -> np.ndarray:
    """One simultaneous randomized-selection update.

    Works on angles (floats) for both variants and on abstract symbol ids
    (ints) for the jump variant.
    """
    state = np.asarray(state)
    if state.shape[-1] != g.n:
        raise ValueError(f"state has {state.shape[-1]} agents but graph has {g.n} vertices")
    table = _SelectionTable(g, cfg.beta)
    return _apply_step(state, table, cfg, rng.random(g.n))


def _apply_step(state, table: _SelectionTable, cfg: GossipConfig,
                u: np.ndarray) -> np.ndarray:
    picks = table.choose(u)
    new = state.copy()
    if cfg.variant == "jump":
        for k, j in enumerate(picks):
            if j is not None:
                new[k] = state[j]
        return new
    for k, j in enumerate(picks):
        if j is not None:
            p = cfg.alpha * np.exp(1j * state[k]) + np.exp(1j * state[j])
            if abs(p) > 0.0:
                new[k] = wrap(float(np.angle(p)))
    return new


def _is_synced(state, cfg: GossipConfig) -> bool:
    if cfg.variant == "jump":
        return bool(np.all(state == state[..., :1]))
    return pairwise_arc_spread(state) < cfg.sync_tol


@dataclass
class GossipRun:
    """Outcome of one trial: steps taken (max_steps on timeout), final state."""

    steps: int
    state: np.ndarray
    synced: bool
    occupied_counts: np.ndarray | None = None


def _tables_for(schedule: GraphSequence, cfg: GossipConfig, cache: dict,
                t: int) -> _SelectionTable:
    g = schedule.graph_at_step(t)
    key = id(g)
    if key not in cache:
        cache[key] = _SelectionTable(g, cfg.beta)
    return cache[key]


def run_until_sync(state0, graph_or_schedule, cfg: GossipConfig,
                   trial: int = 0, track_occupancy: bool = False) -> GossipRun:
    """Iterate randomized selection until synchronization or max_steps.

    The jump variant declares synchronization at exact single-state
    occupancy; the moderate variant when the arc spread drops below
    cfg.sync_tol.  Deterministic given (cfg.seed, trial).
    """
    schedule = (GraphSequence.constant(graph_or_schedule)
                if isinstance(graph_or_schedule, WeightedDigraph) else graph_or_schedule)
    state = np.asarray(state0).copy()
    cache: dict = {}
    occupied = [] if track_occupancy else None
    for t in range(cfg.max_steps + 1):
        if track_occupancy:
            occupied.append(len(np.unique(state)))
        if _is_synced(state, cfg):
            return GossipRun(t, state, True,
                             np.array(occupied) if track_occupancy else None)
        if t == cfg.max_steps:
            break
        table = _tables_for(schedule, cfg, cache, t)
        u = step_rng(cfg.seed, trial, t).random(schedule.n)
        state = _apply_step(state, table, cfg, u)
    return GossipRun(cfg.max_steps, state, False,
                     np.array(occupied) if track_occupancy else None)


def _enumerate_assignments(n_agents: int, n_symbols: int):
    """All vertex->symbol assignments in mixed-radix order."""
    idx = np.indices([n_symbols] * n_agents).reshape(n_agents, -1).T
    return idx


def expected_sync_time(g: WeightedDigraph, cfg: GossipConfig,
                       n_symbols: int | None = None) -> float:
    """Exact mean steps to single-symbol occupancy for the jump variant.

    Builds the absorbing chain over vertex->symbol assignments and solves
    the fundamental-matrix linear system from the fully-distinct start.
    The value does not depend on which symbols label the positions.  Only
    fixed graphs are supported, and the graph must be root-connected (else
    the expectation is infinite).
    """
    if cfg.variant != "jump":
        raise ValueError("the exact chain applies to the jump variant only")
    n = g.n
    if n_symbols is None:
        n_symbols = n
    if n_symbols < 1 or n_symbols > n:
        raise ValueError("n_symbols must lie in 1..N")
    if n_symbols == 1 or n == 1:
        return 0.0
    n_states = n_symbols**n
    if n_states > _STATE_CAP:
        raise ValueError(
            f"{n_symbols}^{n} = {n_states} assignments exceed the enumeration "
            f"capacity {_STATE_CAP}; use monte_carlo_sync_time instead")
    if classify_connectivity(g).kind not in (ConnectivityKind.STRONGLY_CONNECTED,
                                             ConnectivityKind.ROOT_CONNECTED):
        raise ValueError("expected synchronization time is infinite for a graph "
                         "that is not root-connected")

    beta = cfg.beta
    totals = beta + g.in_degrees()
    stay = beta / totals
    # per-agent incoming probabilities p[j, k] = a_jk / (beta + d_k)
    p_in = g.weights / totals[None, :]

    assignments = _enumerate_assignments(n, n_symbols)
    radix = n_symbols ** np.arange(n - 1, -1, -1)
    absorbing = np.all(assignments == assignments[:, :1], axis=1)

    trans_idx = np.nonzero(~absorbing)[0]
    pos_of = -np.ones(n_states, dtype=int)
    pos_of[trans_idx] = np.arange(trans_idx.size)

    rows, cols, vals = [], [], []
    rhs_ones = np.ones(trans_idx.size)
    nnz = 0
    for row_pos, s_idx in enumerate(trans_idx):
        x = assignments[s_idx]
        # per-agent distribution over its next symbol
        dists = []
        for k in range(n):
            d: dict[int, float] = {int(x[k]): stay[k]}
            for j in np.nonzero(p_in[:, k])[0]:
                sym = int(x[j])
                d[sym] = d.get(sym, 0.0) + p_in[j, k]
            dists.append(list(d.items()))
        # joint products over agents
        combos = [(0, 1.0)]
        for k in range(n):
            combos = [(code * n_symbols + sym, pr * q)
                      for code, pr in combos for sym, q in dists[k]]
        nnz += len(combos)
        if nnz > _NNZ_CAP:
            raise ValueError("transition matrix too dense to enumerate; "
                             "use monte_carlo_sync_time instead")
        for code, pr in combos:
            tgt = pos_of[code]
            if tgt >= 0:  # transitions into absorbing states fall out of Q
                rows.append(row_pos)
                cols.append(int(tgt))
                vals.append(pr)

    m = trans_idx.size
    start_code = int(np.dot(np.arange(n) % n_symbols, radix))
    start_pos = pos_of[start_code]
    if start_pos < 0:
        return 0.0
    if m <= 2000:
        q = np.zeros((m, m))
        np.add.at(q, (np.array(rows), np.array(cols)), np.array(vals))
        tau = np.linalg.solve(np.eye(m) - q, rhs_ones)
    else:
        from scipy import sparse
        from scipy.sparse.linalg import spsolve
        q = sparse.coo_matrix((vals, (rows, cols)), shape=(m, m)).tocsr()
        tau = spsolve(sparse.identity(m, format="csr") - q, rhs_ones)
    return float(tau[start_pos])


@dataclass
class MonteCarloResult:
    """Seeded trial statistics for the time to synchronization."""

    steps: np.ndarray
    timeouts: int
    stall_fraction: float
    histogram: tuple[np.ndarray, np.ndarray]
    meta: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(self.steps.mean())

    @property
    def stderr(self) -> float:
        if self.steps.size < 2:
            return 0.0
        return float(self.steps.std(ddof=1) / math.sqrt(self.steps.size))


def monte_carlo_sync_time(graph_or_schedule, cfg: GossipConfig, trials: int,
                          initial=None) -> MonteCarloResult:
    """Sample the synchronization time over seeded independent trials.

    Each trial is deterministic given (cfg.seed, trial index), so results do
    not depend on execution order.  The jump variant starts from distinct
    symbols 0..N-1 unless ``initial`` overrides it; the moderate variant
    draws uniform initial angles from the trial's init substream.  The stall
    fraction reports trials whose occupied-symbol count sat at exactly two
    for more than half of the run (the characteristic two-cluster
    oscillation); it is computed for the jump variant only.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    schedule = (GraphSequence.constant(graph_or_schedule)
                if isinstance(graph_or_schedule, WeightedDigraph) else graph_or_schedule)
    n = schedule.n
    track = cfg.variant == "jump"
    steps = np.empty(trials, dtype=int)
    timeouts = 0
    stalled = 0
    for r in range(trials):
        if initial is not None:
            state0 = np.asarray(initial).copy()
        elif cfg.variant == "jump":
            state0 = np.arange(n)
        else:
            state0 = wrap(init_rng(cfg.seed, r).uniform(-np.pi, np.pi, size=n))
        run = run_until_sync(state0, schedule, cfg, trial=r, track_occupancy=track)
        steps[r] = run.steps
        if not run.synced:
            timeouts += 1
        if track and run.steps > 0:
            frac_two = float(np.sum(run.occupied_counts == 2)) / run.occupied_counts.size
            if frac_two > 0.5:
                stalled += 1
    hist = np.histogram(steps, bins="auto")
    return MonteCarloResult(
        steps=steps,
        timeouts=timeouts,
        stall_fraction=stalled / trials,
        histogram=hist,
        meta={"seed": cfg.seed, "variant": cfg.variant, "beta": cfg.beta,
              "trials": trials},
    )
