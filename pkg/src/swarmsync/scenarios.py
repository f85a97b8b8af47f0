"""Canned constructions: flocking with a proximity graph, named pursuit and
reversal setups, and the two-state spin analog.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import circle
from .circle import CouplingProfile, dt_step, wrap
from .graphs import GraphSequence, WeightedDigraph, ring_directed, ring_undirected


# ---------------------------------------------------------------------------
# flocking with heading averaging over a sensing-radius proximity graph

@dataclass(frozen=True)
class VicsekState:
    """Planar particles with unit speed: positions (N, 2), headings (N,), sensing radius."""

    positions: np.ndarray
    headings: np.ndarray
    radius: float

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        h = np.asarray(self.headings, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2 or h.shape != (p.shape[0],):
            raise ValueError("need positions (N, 2) and headings (N,)")
        if self.radius <= 0:
            raise ValueError("sensing radius must be positive")
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "headings", h)


def proximity_graph(positions, radius: float) -> WeightedDigraph:
    """Unit-weight edges between distinct agents within the sensing radius."""
    positions = np.asarray(positions, dtype=float)
    d = np.linalg.norm(positions[:, None, :] - positions[None, :, :], axis=-1)
    w = (d <= radius).astype(float)
    np.fill_diagonal(w, 0.0)
    return WeightedDigraph(w)


def vicsek_step(s: VicsekState) -> VicsekState:
    """One flocking update.

    Headings average over the time-t proximity graph (the discrete circle
    step with inertia beta = 1); positions then advance one unit along the
    old headings.
    """
    g = proximity_graph(s.positions, s.radius)
    new_headings = dt_step(s.headings, g, beta=1.0)
    step = np.stack([np.cos(s.headings), np.sin(s.headings)], axis=-1)
    return VicsekState(s.positions + step, new_headings, s.radius)


def divergence_radius_interval(n_agents: int, sensing_radius: float = 1.0):
    """Ring radii for which each agent senses exactly its two ring neighbors."""
    lo = sensing_radius / (2.0 * np.sin(2.0 * np.pi / n_agents))
    hi = sensing_radius / (2.0 * np.sin(np.pi / n_agents))
    return lo, hi


def vicsek_divergence_setup(n_agents: int, ring_radius: float,
                            sensing_radius: float = 1.0) -> VicsekState:
    """Radially-pointing regular ring that locks headings and then disperses.

    Positions are regularly spaced on a circle sized so each agent senses
    exactly its immediate left and right neighbors; headings point radially
    outward.  The heading configuration is a stable equilibrium of the ring
    interconnection, every communication link drops at a common later step,
    and the agents then move forever on fixed diverging rays.  Requires
    N >= 5 (smaller rings have no stable spacing other than synchronization).
    """
    if n_agents < 5:
        raise ValueError("the diverging ring construction requires N >= 5")
    lo, hi = divergence_radius_interval(n_agents, sensing_radius)
    if not (lo < ring_radius <= hi):
        raise ValueError(
            f"ring_radius {ring_radius:.6g} infeasible: second neighbors must stay "
            f"out of range; choose ring_radius in ({lo:.6g}, {hi:.6g}]")
    phase = 2.0 * np.pi * np.arange(n_agents) / n_agents
    positions = ring_radius * np.stack([np.cos(phase), np.sin(phase)], axis=-1)
    return VicsekState(positions, wrap(phase), sensing_radius)


# ---------------------------------------------------------------------------
# named continuous-time setups

@dataclass
class Scenario:
    """Ready-to-integrate setup: schedule, initial angles, profile, gain."""

    schedule: GraphSequence
    angles0: np.ndarray
    profile: CouplingProfile | None
    alpha: float
    meta: dict = field(default_factory=dict)

    def integrate(self, t_end: float, h: float = 0.01, sample_every: int = 1):
        return circle.integrate(self.angles0, self.schedule, self.alpha,
                                self.profile, t_end, h, sample_every,
                                meta=dict(self.meta))


def _splay(n: int) -> np.ndarray:
    return wrap(2.0 * np.pi * np.arange(n) / n)


def _block(weights_list) -> np.ndarray:
    """Block-diagonal weight matrix from a list of square blocks."""
    n = sum(w.shape[0] for w in weights_list)
    out = np.zeros((n, n))
    at = 0
    for w in weights_list:
        m = w.shape[0]
        out[at:at + m, at:at + m] = w
        at += m
    return out


def scenario_splay_ring(n_agents: int = 5) -> Scenario:
    """Undirected ring resting in its uniform-spacing configuration."""
    g = ring_undirected(n_agents)
    return Scenario(GraphSequence.constant(g), _splay(n_agents), None, 1.0,
                    {"scenario": "splay_ring", "n": n_agents})


def scenario_cyclic_pursuit(n_agents: int = 6) -> Scenario:
    """Directed ring with spacing 2*pi/N: a rigid rotation at 2*sin(2*pi/N).

    Six agents turn at sqrt(3), twelve at exactly 1.
    """
    g = ring_directed(n_agents)
    meta = {"scenario": "cyclic_pursuit", "n": n_agents,
            "velocity": 2.0 * np.sin(2.0 * np.pi / n_agents)}
    # agent k's in-neighbor is k-1; descending labels put it ahead on the circle
    angles = wrap(-2.0 * np.pi * np.arange(n_agents) / n_agents)
    return Scenario(GraphSequence.constant(g), angles, None, 1.0, meta)


def scenario_two_ring_periodic(n_first: int = 6, n_second: int = 12) -> Scenario:
    """Two pursuit rings at different speeds, fully cross-coupled.

    Each agent of one ring also listens to every agent of the other; a
    regularly spaced set contributes a vanishing phasor sum, so the cross
    links leave the motion unchanged while making the graph strongly
    connected.  Relative positions recur with period 2*pi/|v1 - v2|.
    """
    if n_first == n_second:
        raise ValueError("the two rings must have different sizes")
    w = _block([ring_directed(n_first).weights, ring_directed(n_second).weights])
    w[:n_first, n_first:] = 1.0
    w[n_first:, :n_first] = 1.0
    angles = np.concatenate([wrap(-2.0 * np.pi * np.arange(n_first) / n_first),
                             wrap(-2.0 * np.pi * np.arange(n_second) / n_second)])
    v1 = 2.0 * np.sin(2.0 * np.pi / n_first)
    v2 = 2.0 * np.sin(2.0 * np.pi / n_second)
    meta = {"scenario": "two_ring_periodic", "n": (n_first, n_second),
            "velocities": (v1, v2), "relative_period": 2.0 * np.pi / abs(v1 - v2)}
    return Scenario(GraphSequence.constant(WeightedDigraph(w)), angles, None, 1.0, meta)


def _three_sets(n_splay: int):
    """Still splay ring + 6-ring and 12-ring pursuit blocks (velocities 0, sqrt(3), 1)."""
    blocks = [ring_undirected(n_splay).weights,
              ring_directed(6).weights, ring_directed(12).weights]
    w = _block(blocks)
    angles = np.concatenate([_splay(n_splay),
                             wrap(-2.0 * np.pi * np.arange(6) / 6),
                             wrap(-2.0 * np.pi * np.arange(12) / 12)])
    return w, angles


def scenario_quasiperiodic_three_sets(n_splay: int = 5) -> Scenario:
    """Three decoupled sets turning at 0, sqrt(3), and 1: irrational ratios."""
    w, angles = _three_sets(n_splay)
    meta = {"scenario": "quasiperiodic_three_sets", "n_splay": n_splay,
            "velocities": (0.0, 2.0 * np.sin(np.pi / 3.0), 1.0),
            "set_slices": [(0, n_splay), (n_splay, n_splay + 6),
                           (n_splay + 6, n_splay + 18)]}
    return Scenario(GraphSequence.constant(WeightedDigraph(w)), angles, None, 1.0, meta)


def scenario_disorderly_agent(n_splay: int = 5) -> Scenario:
    """One extra agent driven by a member of each of the three sets.

    The driven agent moves at sum of sin(theta_j - theta_k) over its three
    sources (realized with weight 1/2 under the coupling's factor two), so
    its motion superposes three incommensurate rotations.
    """
    w3, angles3 = _three_sets(n_splay)
    n3 = w3.shape[0]
    w = np.zeros((n3 + 1, n3 + 1))
    w[:n3, :n3] = w3
    for src in (0, n_splay, n_splay + 6):  # one agent from each set
        w[src, n3] = 0.5
    angles = np.concatenate([angles3, [0.3]])
    meta = {"scenario": "disorderly_agent", "n_splay": n_splay, "driven": n3}
    return Scenario(GraphSequence.constant(WeightedDigraph(w)), angles, None, 1.0, meta)


def scenario_direction_reversal() -> Scenario:
    """Two cross-coupled 9-rings whose agents periodically reverse direction.

    Set A sits at spacing 2*pi/9; set B is the same ring rotated by pi/18
    (clockwise).  Each A-agent follows its ring predecessor with gain 0.04
    and the B-agent initially offset by 7*pi/18 with gain 0.05; each B-agent
    follows its ring successor with gain 0.07 and the A-agent initially
    offset by 5*pi/18 with gain 0.05.  The cross partners are frozen from
    the initial offsets into a fixed graph.
    """
    n = 9
    base = 2.0 * np.pi * np.arange(n) / n
    angles = wrap(np.concatenate([base, base - np.pi / 18.0]))
    w = np.zeros((2 * n, 2 * n))
    # weights are half the stated gains: the coupling applies a factor two
    for k in range(n):
        w[(k - 1) % n, k] = 0.02             # A follows A at -2*pi/9
        w[n + (k + 1) % n, n + k] = 0.035    # B follows B at +2*pi/9
        w[n + (k + 2) % n, k] = 0.025        # B partner at +7*pi/18 into A
        w[(k + 1) % n, n + k] = 0.025        # A partner at +5*pi/18 into B
    meta = {"scenario": "direction_reversal", "set_slices": [(0, n), (n, 2 * n)]}
    return Scenario(GraphSequence.constant(WeightedDigraph(w)), angles, None, 1.0, meta)


SCENARIO_KINDS = {
    "splay_ring": scenario_splay_ring,
    "cyclic_pursuit": scenario_cyclic_pursuit,
    "two_ring_periodic": scenario_two_ring_periodic,
    "quasiperiodic_three_sets": scenario_quasiperiodic_three_sets,
    "disorderly_agent": scenario_disorderly_agent,
    "direction_reversal": scenario_direction_reversal,
}


def make_scenario(kind: str, **params) -> Scenario:
    """Build a named scenario; see SCENARIO_KINDS for the registry."""
    try:
        ctor = SCENARIO_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown scenario {kind!r}; "
                         f"choose from {sorted(SCENARIO_KINDS)}") from None
    return ctor(**params)


# ---------------------------------------------------------------------------
# two-state spin analog

def hopfield_step(spins, g: WeightedDigraph, subset=None, thresholds=None) -> np.ndarray:
    """Threshold update x_k <- sign(sum_j a_jk x_j + xi_k) over the subset.

    sign(0) keeps the current spin, mirroring the circle step's convention
    for a vanishing complex sum.  Agents outside the subset are unchanged;
    subset=None updates all agents synchronously.
    """
    spins = np.asarray(spins, dtype=float)
    if not np.all(np.abs(spins) == 1.0):
        raise ValueError("spins must be exactly +-1")
    xi = np.zeros(g.n) if thresholds is None else np.asarray(thresholds, dtype=float)
    drive = g.weights.T @ spins + xi
    new = np.where(drive > 0, 1.0, np.where(drive < 0, -1.0, spins))
    if subset is None:
        return new
    out = spins.copy()
    idx = np.asarray(subset, dtype=int)
    out[idx] = new[idx]
    return out


def hopfield_energy(spins, g: WeightedDigraph, thresholds=None) -> float:
    """Quadratic spin energy -(1/2) sum_jk a_jk x_j x_k - sum_k xi_k x_k.

    Non-increasing under single-agent (or independent-set) asynchronous
    updates on undirected graphs.
    """
    if not g.is_undirected():
        raise ValueError("the spin energy needs an undirected graph")
    spins = np.asarray(spins, dtype=float)
    xi = np.zeros(g.n) if thresholds is None else np.asarray(thresholds, dtype=float)
    return float(-0.5 * spins @ g.weights @ spins - xi @ spins)
