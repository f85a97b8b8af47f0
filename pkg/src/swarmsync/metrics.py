"""Distance measures and rate-fitting helpers shared across the toolkit."""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def arc_distance(a, b):
    """Shortest arc |a - b| on the circle, elementwise."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def pairwise_arc_spread(angles) -> np.ndarray | float:
    """Maximum pairwise arc distance of a swarm (batched over leading axes)."""
    angles = np.asarray(angles, dtype=float)
    d = arc_distance(angles[..., :, None], angles[..., None, :])
    out = d.max(axis=(-2, -1))
    return float(out) if out.ndim == 0 else out


def pairwise_euclidean_spread(x) -> float:
    """Maximum pairwise Euclidean distance between rows of x (N, n)."""
    x = np.asarray(x, dtype=float)
    d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)
    return float(d.max())


def in_open_semicircle(angles, center: float, width: float = np.pi) -> bool:
    """True iff every angle lies within the open arc of given width at center."""
    return bool(np.all(arc_distance(angles, center) < width / 2))


def configuration_distance(angles, reference) -> float:
    """Distance between swarm shapes, minimized over a common rotation.

    Computes min over a of max_k arc(theta_k - ref_k - a): the deviations
    theta_k - ref_k are covered by a smallest arc, whose half-width is the
    distance.
    """
    angles = np.asarray(angles, dtype=float)
    reference = np.asarray(reference, dtype=float)
    deltas = np.sort(np.mod(angles - reference, TWO_PI))
    gaps = np.diff(np.concatenate([deltas, [deltas[0] + TWO_PI]]))
    return float((TWO_PI - gaps.max()) / 2)


def fit_log_linear(times, values, min_value: float = 1e-300):
    """Least-squares fit of log(values) vs times.

    Non-positive values are dropped.  Returns (slope, intercept, r_squared);
    r_squared is 1.0 for a degenerate (constant-time) fit.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > min_value
    t, v = times[keep], np.log(values[keep])
    if t.size < 2:
        raise ValueError("need at least two positive samples to fit a rate")
    slope, intercept = np.polyfit(t, v, 1)
    resid = v - (slope * t + intercept)
    ss_tot = np.sum((v - v.mean()) ** 2)
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2) / ss_tot)
    return float(slope), float(intercept), r2
