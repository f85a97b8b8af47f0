"""Synchronization of phase swarms on the circle.

Angles are radians, canonically wrapped to (-pi, pi] with wrap(-pi) = pi.
Swarm states are arrays of shape (N,); the pure functions also accept
batches of shape (..., N) and act on the trailing axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import GraphSequence, WeightedDigraph
from .integrators import rk4_path
from . import output

TWO_PI = 2.0 * np.pi


def wrap(theta):
    """Wrap angles to the canonical interval (-pi, pi]; wrap(-pi) = pi.

    Idempotent, and exact under shifts by (floating-point) multiples of 2*pi
    whenever the shifted sum is itself exact.
    """
    arr = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("angles must be finite")
    w = np.mod(arr, TWO_PI)
    w = np.where(w > np.pi, w - TWO_PI, w)
    return float(w) if w.ndim == 0 else w


def order_parameter(angles) -> float:
    """Magnitude of the mean phasor, in [0, 1]: 1 at synchronization, 0 when balanced."""
    angles = np.asarray(angles, dtype=float)
    z = np.exp(1j * angles)
    r = np.abs(z.mean(axis=-1))
    return float(r) if r.ndim == 0 else r


def _angle_diffs(angles) -> np.ndarray:
    """D[..., j, k] = theta_j - theta_k."""
    angles = np.asarray(angles, dtype=float)
    return angles[..., :, None] - angles[..., None, :]


def v_circ(angles, g: WeightedDigraph):
    """Chordal disagreement 0.5 * sum_jk a_jk (2 sin((theta_j - theta_k)/2))^2.

    For the complete graph this equals N^2 - |sum_k e^{i theta_k}|^2.
    """
    d = _angle_diffs(angles)
    val = 0.5 * np.einsum("jk,...jk->...", g.weights, (2.0 * np.sin(d / 2.0)) ** 2)
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class CouplingProfile:
    """Odd 2*pi-periodic coupling f with its even pair potential.

    The potential satisfies d(potential)/dtheta = grad_scale * f, and
    grad_scale is also the factor applied by the continuous-time coupling,
    which keeps the dynamics an exact gradient descent of the swarm
    potential on undirected graphs.
    """

    name: str
    f: callable
    fprime: callable
    potential: callable
    grad_scale: float
    params: dict = field(default_factory=dict)


def _sine_profile() -> CouplingProfile:
    return CouplingProfile(
        name="sine",
        f=np.sin,
        fprime=np.cos,
        potential=lambda t: (2.0 * np.sin(np.asarray(t) / 2.0)) ** 2,
        grad_scale=2.0,
    )


def _g_profile(a: float, n_agents: int, smoothing: float | None) -> CouplingProfile:
    if n_agents < 2:
        raise ValueError("the piecewise-linear profile needs at least 2 agents")
    if a <= 0:
        raise ValueError("slope a must be positive")
    joint = np.pi / n_agents
    eps = joint / 20.0 if smoothing is None else float(smoothing)
    if not (0.0 <= eps < np.pi / (2 * n_agents)):
        raise ValueError(f"smoothing half-width must lie in [0, {np.pi / (2 * n_agents):.6g})")
    s_left = a                      # slope on |theta| < pi/N
    s_right = -a / (n_agents - 1)   # slope on pi/N < |theta| < pi

    def raw(u):
        # piecewise-linear branch values for u in [0, pi]
        return np.where(u <= joint, a * u, (a / (n_agents - 1)) * (np.pi - u))

    def f(theta):
        theta = np.asarray(theta, dtype=float)
        u = np.mod(theta + np.pi, TWO_PI) - np.pi  # (-pi, pi]
        sign = np.sign(u)
        u = np.abs(u)
        if eps == 0.0:
            return sign * raw(u)
        v = raw(u)
        lo, hi = joint - eps, joint + eps
        blend = (u >= lo) & (u <= hi)
        du = u - lo
        v = np.where(blend,
                     a * lo + s_left * du + (s_right - s_left) / (4 * eps) * du**2,
                     v)
        return sign * v

    def fprime(theta):
        theta = np.asarray(theta, dtype=float)
        u = np.abs(np.mod(theta + np.pi, TWO_PI) - np.pi)
        if eps == 0.0:
            return np.where(u <= joint, s_left, s_right)
        lo, hi = joint - eps, joint + eps
        slope = np.where(u < lo, s_left, s_right)
        blend = (u >= lo) & (u <= hi)
        return np.where(blend, s_left + (s_right - s_left) * (u - lo) / (2 * eps), slope)

    # closed-form antiderivative pieces; constants stitch the branches
    # continuously so the potential is a genuine C^1 pair potential
    lo, hi = joint - eps, joint + eps
    p_lo = 0.5 * a * lo**2
    if eps > 0.0:
        p_hi = (p_lo + a * lo * (2 * eps) + 0.5 * s_left * (2 * eps) ** 2
                + (s_right - s_left) / (12 * eps) * (2 * eps) ** 3)
    else:
        p_hi = p_lo
    c_outer = p_hi - (a / (n_agents - 1)) * (np.pi * hi - 0.5 * hi**2)

    def potential(theta):
        theta = np.asarray(theta, dtype=float)
        u = np.abs(np.mod(theta + np.pi, TWO_PI) - np.pi)
        inner = 0.5 * a * u**2
        outer = c_outer + (a / (n_agents - 1)) * (np.pi * u - 0.5 * u**2)
        v = np.where(u <= lo, inner, outer)
        if eps > 0.0:
            du = u - lo
            mid = (p_lo + a * lo * du + 0.5 * s_left * du**2
                   + (s_right - s_left) / (12 * eps) * du**3)
            v = np.where((u > lo) & (u < hi), mid, v)
        return v

    return CouplingProfile(
        name="g_profile", f=f, fprime=fprime, potential=potential, grad_scale=1.0,
        params={"a": float(a), "n_agents": int(n_agents), "smoothing": eps},
    )


def make_profile(kind: str, a: float = 1.0, n_agents: int | None = None,
                 smoothing: float | None = None) -> CouplingProfile:
    """Build a coupling profile: "sine" or the piecewise-linear "g_profile".

    The g profile rises with slope a up to pi/N, falls with slope -a/(N-1)
    out to pi (peak value a*pi/N), is odd, and is extended 2*pi-periodically.
    A positive smoothing half-width replaces the two kinks at +-pi/N by
    quadratic blends (default pi/(20*N)); pass smoothing=0 for the pure
    piecewise-linear shape.
    """
    if kind == "sine":
        return _sine_profile()
    if kind == "g_profile":
        if n_agents is None:
            raise ValueError("g_profile needs the swarm size n_agents")
        return _g_profile(a, n_agents, smoothing)
    raise ValueError(f"unknown profile kind {kind!r}")


SINE = _sine_profile()


def ct_rhs(angles, g: WeightedDigraph, alpha: float = 1.0,
           profile: CouplingProfile | None = None) -> np.ndarray:
    """Angular velocities of the continuous-time coupling.

    With the sine profile (the default) agent k moves at
    2 * alpha * sum_j a_jk sin(theta_j - theta_k); a general profile f is
    applied with its own grad_scale factor, so on undirected graphs the flow
    is exactly -alpha times the gradient of the matching swarm potential.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    prof = SINE if profile is None else profile
    d = _angle_diffs(angles)
    return prof.grad_scale * alpha * np.einsum("jk,...jk->...k", g.weights, prof.f(d))


def ct_rhs_projection_form(angles, g: WeightedDigraph, alpha: float = 1.0) -> np.ndarray:
    """Equivalent update as tangent vectors in the plane.

    Returns 2*alpha*Proj_{x_k}(sum_j a_jk (x_j - x_k)) with x_k the unit
    phasor of agent k and Proj the orthogonal projection onto the tangent
    line at x_k.  The scalar tangential magnitude reproduces the sine form.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    angles = np.asarray(angles, dtype=float)
    if angles.ndim != 1:
        raise ValueError("projection form expects a single swarm (N,)")
    x = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    pulled = np.einsum("jk,jd->kd", g.weights, x) - g.in_degrees()[:, None] * x
    radial = np.einsum("kd,kd->k", x, pulled)
    return 2.0 * alpha * (pulled - radial[:, None] * x)


def dt_step(angles, g: WeightedDigraph, beta: float = 1.0, subset=None) -> np.ndarray:
    """One discrete synchronization step.

    Each updated agent k moves to arg(sum_j a_jk e^{i theta_j} + beta
    e^{i theta_k}).  When that complex sum is exactly zero the agent keeps
    its current angle, which makes the step total and deterministic.
    Agents outside ``subset`` (an index array; None means all) are left
    unchanged.  Input angles are canonicalized first, so shifting any single
    angle by an exact multiple of 2*pi cannot change the outcome.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    angles = wrap(np.asarray(angles, dtype=float))
    angles = np.atleast_1d(angles)
    z = np.exp(1j * angles)
    p = np.einsum("jk,...j->...k", g.weights.astype(complex), z) + beta * z
    new = np.where(np.abs(p) == 0.0, angles, wrap(np.angle(p)))
    if subset is None:
        return new
    out = angles.copy()
    out[..., np.asarray(subset, dtype=int)] = new[..., np.asarray(subset, dtype=int)]
    return out


@dataclass
class Trajectory:
    """Sampled phase trajectory: strictly increasing times, wrapped angles.

    ``velocities`` holds the instantaneous angular velocities at the sample
    times when the producer recorded them; ``aux`` holds planar auxiliary
    variables of shape (S, N, 2) for augmented runs.
    """

    times: np.ndarray
    angles: np.ndarray
    velocities: np.ndarray | None = None
    aux: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        if self.aux is not None:
            output.write_aux_csv(self.times, self.angles, self.aux, path)
        else:
            output.write_circle_csv(self.times, self.angles, path)

    def write_plot_data(self, sin_path, velocity_path=None) -> None:
        """Emit sin(theta_k) traces and, when recorded, velocity traces."""
        output.write_sin_csv(self.times, self.angles, sin_path)
        if velocity_path is not None:
            if self.velocities is None:
                raise ValueError("this trajectory has no recorded velocities")
            output.write_velocity_csv(self.times, self.velocities, velocity_path)

    def final(self) -> np.ndarray:
        return self.angles[-1]


def _as_schedule(graph_or_schedule) -> GraphSequence:
    if isinstance(graph_or_schedule, WeightedDigraph):
        return GraphSequence.constant(graph_or_schedule)
    return graph_or_schedule


def integrate(angles0, schedule, alpha: float = 1.0,
              profile: CouplingProfile | None = None,
              t_end: float = 10.0, h: float = 0.01, sample_every: int = 1,
              record_velocities: bool = True,
              meta: dict | None = None) -> Trajectory:
    """Fixed-step RK4 integration of the continuous-time coupling.

    The initial state is canonicalized once, then the integration runs on an
    unwrapped lift so RK4 stages never straddle a wrap discontinuity; angles
    are wrapped only at sample emission.  Deterministic for given inputs.
    Batched initial states (..., N) integrate all swarms in lockstep.
    """
    sched = _as_schedule(schedule)
    lift0 = np.atleast_1d(wrap(np.asarray(angles0, dtype=float)))

    def rhs(t, y):
        return ct_rhs(y, sched.graph_at_time(t), alpha, profile)

    times, lifts = rk4_path(rhs, lift0, t_end, h, sample_every)
    vel = None
    if record_velocities:
        vel = np.array([rhs(t, y) for t, y in zip(times, lifts)])
    info = dict(meta or {})
    info.setdefault("algorithm", "circle_ct")
    info.setdefault("alpha", alpha)
    info.setdefault("profile", (profile or SINE).name)
    info.setdefault("h", h)
    return Trajectory(times, wrap(lifts), velocities=vel, meta=info)


def run_discrete(angles0, schedule, beta: float = 1.0, steps: int = 100,
                 subsets=None, sample_every: int = 1,
                 meta: dict | None = None) -> Trajectory:
    """Iterate the discrete step under a graph schedule.

    ``subsets`` optionally names the update subset per step (a list of index
    arrays, cycled); None updates all agents synchronously.
    """
    sched = _as_schedule(schedule)
    x = np.atleast_1d(wrap(np.asarray(angles0, dtype=float)))
    states = [x]
    for t in range(steps):
        sub = None if subsets is None else subsets[t % len(subsets)]
        x = dt_step(x, sched.graph_at_step(t), beta, subset=sub)
        states.append(x)
    times = np.arange(steps + 1, dtype=float)
    keep = np.arange(0, steps + 1, sample_every)
    if keep[-1] != steps:
        keep = np.append(keep, steps)
    info = dict(meta or {})
    info.setdefault("algorithm", "circle_dt")
    info.setdefault("beta", beta)
    return Trajectory(times[keep], np.array(states)[keep], meta=info)
