"""Critical points of the swarm potential, stability analysis, and descent bounds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import circle
from .circle import CouplingProfile, SINE, wrap
from .graphs import WeightedDigraph

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"

# Eigenvalue magnitude below tol*(1 + largest eigenvalue) counts as the
# uniform-rotation zero mode.
ZERO_MODE_RTOL = 1e-8


def _require_undirected(g: WeightedDigraph) -> None:
    if not g.is_undirected():
        raise ValueError("this analysis needs an undirected (symmetric-weight) graph")


def swarm_potential(angles, g: WeightedDigraph,
                    profile: CouplingProfile | None = None):
    """Pair potential 0.5 * sum_jk a_jk * potential(theta_j - theta_k)."""
    prof = SINE if profile is None else profile
    d = circle._angle_diffs(angles)
    val = 0.5 * np.einsum("jk,...jk->...", g.weights, prof.potential(d))
    return float(val) if np.ndim(val) == 0 else val


def potential_gradient(angles, g: WeightedDigraph,
                       profile: CouplingProfile | None = None) -> np.ndarray:
    """Analytic gradient of swarm_potential with respect to each angle."""
    prof = SINE if profile is None else profile
    d = circle._angle_diffs(angles)
    sym = g.weights + g.weights.T
    return -(prof.grad_scale / 2.0) * np.einsum("jk,...jk->...k", sym, prof.f(d))


def hessian_v_circ(angles, g: WeightedDigraph,
                   profile: CouplingProfile | None = None) -> np.ndarray:
    """Hessian of the swarm potential at a state (undirected graphs only).

    Off-diagonal (k, j) entry is -(a_jk + a_kj)/2 * grad_scale *
    f'(theta_j - theta_k); rows sum to zero, reflecting invariance under
    uniform rotation.
    """
    _require_undirected(g)
    prof = SINE if profile is None else profile
    angles = np.asarray(angles, dtype=float)
    if angles.ndim != 1:
        raise ValueError("hessian expects a single swarm (N,)")
    d = circle._angle_diffs(angles)
    sym = g.weights + g.weights.T
    off = -(prof.grad_scale / 2.0) * sym * prof.fprime(d)
    h = off.copy()
    np.fill_diagonal(h, 0.0)
    np.fill_diagonal(h, -h.sum(axis=0))
    return h


def classify_eigenvalues(eigs) -> str:
    """Stability tag from Hessian eigenvalues with the one-zero-mode rule.

    Stable needs every eigenvalue positive except exactly one in the
    rotation-mode band; any eigenvalue below the band means unstable;
    extra zero modes are marginal.
    """
    eigs = np.sort(np.asarray(eigs, dtype=float))
    tol = ZERO_MODE_RTOL * (1.0 + max(eigs.max(), 0.0))
    if eigs[0] < -tol:
        return UNSTABLE
    n_zero = int(np.sum(np.abs(eigs) <= tol))
    return STABLE if n_zero == 1 else MARGINAL


@dataclass
class EquilibriumReport:
    """A located critical point with its curvature-based classification."""

    angles: np.ndarray
    gradient_norm: float
    hessian_eigenvalues: np.ndarray
    classification: str
    converged: bool = True
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "angles": [float(t) for t in self.angles],
            "gradient_norm": float(self.gradient_norm),
            "hessian_eigenvalues": [float(e) for e in self.hessian_eigenvalues],
            "classification": self.classification,
            "converged": bool(self.converged),
        }


def _report(angles, g, profile, converged=True, meta=None) -> EquilibriumReport:
    grad = potential_gradient(angles, g, profile)
    eigs = np.sort(np.linalg.eigvalsh(hessian_v_circ(angles, g, profile)))
    return EquilibriumReport(
        angles=wrap(np.asarray(angles, dtype=float)),
        gradient_norm=float(np.linalg.norm(grad)),
        hessian_eigenvalues=eigs,
        classification=classify_eigenvalues(eigs),
        converged=converged,
        meta=meta or {},
    )


@dataclass(frozen=True)
class SplayState:
    """Uniform ring spacing theta_0 = 2*a*pi/N, tagged by the |theta_0| < pi/2 rule."""

    angles: np.ndarray
    spacing: float
    stable: bool


def enumerate_ring_splay_states(n_agents: int) -> list[SplayState]:
    """All uniform-spacing ring configurations, stability-tagged.

    Spacings are theta_0 = 2*a*pi/N for a = 0..N-1; a configuration is
    stable exactly when its wrapped spacing satisfies |theta_0| < pi/2
    (a = 0 is synchronization).  Spacings other than zero can be stable only
    for N >= 5.
    """
    if n_agents < 2:
        raise ValueError("need at least 2 agents")
    states = []
    for a in range(n_agents):
        theta0 = 2.0 * a * np.pi / n_agents
        angles = wrap(theta0 * np.arange(n_agents))
        stable = abs(wrap(theta0)) < np.pi / 2
        states.append(SplayState(angles=angles, spacing=wrap(theta0), stable=stable))
    return states


def enumerate_ring_critical_points(n_agents: int,
                                   g: WeightedDigraph | None = None) -> list[EquilibriumReport]:
    """Isolated ring critical points with mixed gap patterns, N <= 8.

    Consecutive ring gaps all share the same sine, so each gap is either phi
    or pi - phi for a common phi, constrained so the gaps sum to a multiple
    of 2*pi.  Patterns are
    enumerated exhaustively and classified numerically; the continuum
    families arising when exactly half the gaps are flipped are skipped
    (they are not isolated).
    """
    if n_agents > 8:
        raise ValueError("exhaustive pattern enumeration is limited to N <= 8")
    from .graphs import ring_undirected
    if g is None:
        g = ring_undirected(n_agents)
    seen = set()
    reports = []
    for m in range(n_agents + 1):
        if n_agents == 2 * m:
            continue
        for a in range(-n_agents, n_agents + 1):
            phi = (2 * a - m) * np.pi / (n_agents - 2 * m)
            if not (-np.pi / 2 <= phi <= np.pi / 2):
                continue
            for flips in itertools.combinations(range(n_agents), m):
                gaps = np.full(n_agents, phi)
                gaps[list(flips)] = np.pi - phi
                angles = wrap(np.concatenate([[0.0], np.cumsum(gaps[:-1])]))
                key = tuple(np.round(wrap(angles - angles[0]), 9))
                if key in seen:
                    continue
                seen.add(key)
                rep = _report(angles, g, None, meta={"phi": float(phi), "flips": m})
                if rep.gradient_norm < 1e-9:
                    reports.append(rep)
    return reports


def critical_point_search(g: WeightedDigraph, profile: CouplingProfile | None = None,
                          seeds=(), grad_tol: float = 1e-10,
                          max_iter: int = 200) -> list[EquilibriumReport]:
    """Locate critical points of the swarm potential from the given seeds.

    Damped-Newton descent on the gradient norm; a seed is accepted when the
    gradient norm falls below grad_tol, otherwise it is reported with
    converged=False rather than raising.
    """
    _require_undirected(g)
    reports = []
    for seed in seeds:
        theta = np.array(wrap(np.asarray(seed, dtype=float)))
        lam = 1e-6
        ok = False
        for _ in range(max_iter):
            grad = potential_gradient(theta, g, profile)
            gnorm = float(np.linalg.norm(grad))
            if gnorm < grad_tol:
                ok = True
                break
            h = hessian_v_circ(theta, g, profile)
            step = None
            for _ in range(60):
                try:
                    step = np.linalg.solve(h + lam * np.eye(g.n), -grad)
                except np.linalg.LinAlgError:
                    lam = max(lam * 10.0, 1e-12)
                    continue
                trial = theta + step
                if np.linalg.norm(potential_gradient(trial, g, profile)) < gnorm:
                    theta = trial
                    lam = max(lam / 3.0, 1e-12)
                    break
                lam *= 10.0
                if lam > 1e12:
                    break
            else:
                break
            if lam > 1e12:
                break
        reports.append(_report(theta, g, profile, converged=ok))
    return reports


def beta_bound(g: WeightedDigraph) -> float:
    """Inertia bound d_max * (2/M + 1) ensuring synchronous descent.

    M > 0 solves (e^M - 1)/M = 1 + d_max/d_sum (bisection to 1e-12), with
    d_sum the total in-degree and d_max the largest.  Only unweighted
    undirected graphs are admitted; the bound always exceeds d_max.
    """
    _require_undirected(g)
    if not g.is_unweighted():
        raise ValueError("the inertia bound is stated for unweighted graphs only")
    din = g.in_degrees()
    d_max = float(din.max())
    d_sum = float(din.sum())
    if d_max == 0:
        raise ValueError("edgeless graph: the bound is undefined (d_max = 0)")
    target = 1.0 + d_max / d_sum

    def gap(m):
        return np.expm1(m) / m - target

    lo, hi = 1e-12, 1.0
    while gap(hi) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    m_star = 0.5 * (lo + hi)
    return d_max * (2.0 / m_star + 1.0)


def is_independent_set(g: WeightedDigraph, subset) -> bool:
    """True iff no two members of subset are connected (in either direction)."""
    idx = np.asarray(subset, dtype=int)
    if idx.size <= 1:
        return True
    sub = g.weights[np.ix_(idx, idx)]
    return not np.any(sub + sub.T > 0)


def async_decrement(angles, g: WeightedDigraph, beta: float, sigma) -> float:
    """Exact potential drop of one locally-asynchronous discrete step.

    With rho_k e^{i u_k} = sum_j a_jk e^{i(theta_j - theta_k)} + beta, the
    step over an independent update set sigma changes the disagreement by
    -2 * sum_{k in sigma} (rho_k + beta) sin^2(u_k / 2), which is never
    positive.  Matches v_circ(after) - v_circ(before) on undirected graphs.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not is_independent_set(g, sigma):
        raise ValueError("update subset must be an independent set of the graph")
    idx = np.asarray(sigma, dtype=int)
    if idx.size == 0:
        return 0.0
    angles = np.asarray(angles, dtype=float)
    z = np.exp(1j * angles)
    p = (g.weights.astype(complex).T @ z) * np.conj(z) + beta
    rho = np.abs(p[idx])
    u = np.angle(p[idx])
    return float(-2.0 * np.sum((rho + beta) * np.sin(u / 2.0) ** 2))


def stabilizing_weights(angles, base_weight: float = 1.0) -> WeightedDigraph:
    """Build a strongly connected digraph that makes the given state an equilibrium.

    Each agent listens only to neighbors strictly closer than pi/2 on the
    circle; one incoming weight per agent is adjusted above the base weight
    so the pulled displacement is radially aligned (zero tangential
    component).  Requires N >= 5 and, for every agent, at least one other
    agent strictly within pi/2 on each side.
    """
    angles = np.asarray(angles, dtype=float)
    n = angles.size
    if n < 5:
        raise ValueError("a sufficiently spread configuration requires N >= 5")
    w = np.zeros((n, n))
    for k in range(n):
        deltas = wrap(angles - angles[k])
        left = [j for j in range(n) if j != k and -np.pi / 2 < deltas[j] < 0]
        right = [j for j in range(n) if j != k and 0 < deltas[j] < np.pi / 2]
        if not left or not right:
            raise ValueError(
                f"agent {k} lacks a neighbor strictly within pi/2 on each side")
        eligible = [j for j in range(n) if j != k and abs(deltas[j]) < np.pi / 2]
        w[eligible, k] = base_weight
        sins = np.sin(deltas)
        tangent = float(base_weight * sins[eligible].sum())
        if tangent != 0.0:
            pool = right if tangent < 0 else left
            j_star = max(pool, key=lambda j: abs(sins[j]))
            w[j_star, k] = base_weight - tangent / sins[j_star]
    return WeightedDigraph(w)


@dataclass
class UpdateSchedule:
    """Sequence of update subsets with a revisit horizon.

    Locally-asynchronous schedules must use independent sets, and every
    vertex must appear within each window of ``horizon`` consecutive steps
    (the stored sequence is treated as one period).
    """

    subsets: list
    locally_asynchronous: bool
    horizon: int

    def validate(self, g: WeightedDigraph) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.locally_asynchronous:
            for i, sub in enumerate(self.subsets):
                if not is_independent_set(g, sub):
                    raise ValueError(f"subset {i} is not an independent set")
        m = len(self.subsets)
        if m == 0:
            raise ValueError("schedule needs at least one subset")
        for start in range(m):
            seen = set()
            for off in range(min(self.horizon, m)):
                seen.update(int(v) for v in self.subsets[(start + off) % m])
            if seen != set(range(g.n)):
                raise ValueError(
                    f"window starting at step {start} misses vertices "
                    f"{sorted(set(range(g.n)) - seen)}")
