"""Synchronization via consensus on planar auxiliary variables.

Each agent carries an auxiliary point w_k in R^2 evolving under plain linear
consensus, and steers its own angle toward the direction of w_k.  For a
uniformly connected schedule the auxiliary variables agree on a reference
point in the plane, and the angles synchronize for almost every initial
condition (failures require the reference point to hit the origin).
"""

from __future__ import annotations

import numpy as np

from . import vector_consensus
from .circle import Trajectory, wrap
from .graphs import GraphSequence, WeightedDigraph
from .integrators import rk4_path

# Auxiliary vectors shorter than this give no usable direction; the agent's
# angle holds still for that evaluation and the agent is flagged degenerate.
DEGENERATE_NORM = 1e-9


def aux_rhs(angles, aux, g: WeightedDigraph, alpha: float = 1.0,
            tracking_gain: float | None = None):
    """Velocities of the augmented system.

    The auxiliary block is exact linear consensus on the w_k; each angle
    moves at K * sin(arg(w_k) - theta_k), tracking the auxiliary direction.
    Returns (dtheta, daux).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    k_gain = 5.0 * alpha if tracking_gain is None else float(tracking_gain)
    if k_gain <= 0:
        raise ValueError("tracking gain must be positive")
    angles = np.asarray(angles, dtype=float)
    aux = np.asarray(aux, dtype=float)
    daux = vector_consensus.ct_rhs(aux, g, alpha)
    norms = np.linalg.norm(aux, axis=-1)
    headings = np.arctan2(aux[..., 1], aux[..., 0])
    dtheta = k_gain * np.sin(headings - angles)
    dtheta = np.where(norms < DEGENERATE_NORM, 0.0, dtheta)
    return dtheta, daux


def simulate_aux(angles0, schedule, alpha: float = 1.0,
                 tracking_gain: float | None = None, t_end: float = 10.0,
                 h: float = 0.01, aux0=None, sample_every: int = 1,
                 meta: dict | None = None) -> Trajectory:
    """RK4 integration of the augmented dynamics.

    The auxiliary variables default to the agents' own unit phasors, which
    needs no information beyond each agent's state and keeps the whole
    construction rotationally equivariant.  Agents whose auxiliary vector
    ever dips below the degeneracy threshold at a sample time are flagged in
    meta["degenerate_agents"].
    """
    sched = (GraphSequence.constant(schedule)
             if isinstance(schedule, WeightedDigraph) else schedule)
    theta0 = np.atleast_1d(wrap(np.asarray(angles0, dtype=float)))
    n = theta0.shape[-1]
    if aux0 is None:
        aux0 = np.stack([np.cos(theta0), np.sin(theta0)], axis=-1)
    aux0 = np.asarray(aux0, dtype=float)
    if aux0.shape != (n, 2):
        raise ValueError("auxiliary state must have shape (N, 2)")
    y0 = np.concatenate([theta0, aux0.reshape(-1)])

    k_gain = 5.0 * alpha if tracking_gain is None else float(tracking_gain)

    def rhs(t, y):
        th, w = y[:n], y[n:].reshape(n, 2)
        dth, dw = aux_rhs(th, w, sched.graph_at_time(t), alpha, k_gain)
        return np.concatenate([dth, dw.reshape(-1)])

    times, ys = rk4_path(rhs, y0, t_end, h, sample_every)
    angles = wrap(ys[:, :n])
    aux = ys[:, n:].reshape(len(times), n, 2)
    degenerate = np.any(np.linalg.norm(aux, axis=-1) < DEGENERATE_NORM, axis=0)
    info = dict(meta or {})
    info.setdefault("algorithm", "aux_consensus")
    info.setdefault("alpha", alpha)
    info.setdefault("tracking_gain", k_gain)
    info.setdefault("h", h)
    info["degenerate_agents"] = [int(k) for k in np.nonzero(degenerate)[0]]
    return Trajectory(times, angles, aux=aux, meta=info)
