"""Deterministic fixed-step Runge-Kutta integration."""

from __future__ import annotations

import numpy as np


def rk4_path(rhs, y0: np.ndarray, t_end: float, h: float, sample_every: int = 1):
    """Integrate dy/dt = rhs(t, y) with classical 4th-order Runge-Kutta.

    Fixed step h; the number of steps is round(t_end / h), so the effective
    horizon is that multiple of h.  Returns (times, states) sampled every
    ``sample_every`` steps, always including the initial and final states.
    Sample times are computed as i*h (not accumulated) for reproducibility.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    n_steps = int(round(t_end / h))
    y = np.array(y0, dtype=float)
    times = [0.0]
    states = [y.copy()]
    for i in range(n_steps):
        t = i * h
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + (h / 2) * k1)
        k3 = rhs(t + h / 2, y + (h / 2) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (i + 1) % sample_every == 0 or i == n_steps - 1:
            times.append((i + 1) * h)
            states.append(y.copy())
    return np.array(times), np.array(states)
