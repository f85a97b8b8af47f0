"""Deterministic file emission: trajectory CSVs, reports, atomic writes."""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np


def fmt(x) -> str:
    """Full double precision (17 significant digits)."""
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> None:
    """Write text to path via a temp file and rename, so readers never see partial files."""
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(obj, path) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def write_circle_csv(times, angles, path) -> None:
    """Trajectory CSV: header t,theta_1,...,theta_N; angles in (-pi, pi]."""
    angles = np.asarray(angles)
    if angles.ndim != 2:
        raise ValueError("CSV emission needs a single swarm trajectory (S, N)")
    header = ["t"] + [f"theta_{k + 1}" for k in range(angles.shape[1])]
    rows = (np.concatenate([[t], row]) for t, row in zip(times, angles))
    atomic_write_text(path, _csv(header, rows))


def write_vector_csv(times, states, path) -> None:
    """Trajectory CSV: header t,x_1_1,...,x_N_n (agent-major columns)."""
    states = np.asarray(states)
    if states.ndim != 3:
        raise ValueError("CSV emission needs a trajectory of shape (S, N, n)")
    s, n_agents, dim = states.shape
    header = ["t"] + [f"x_{k + 1}_{i + 1}" for k in range(n_agents) for i in range(dim)]
    rows = (np.concatenate([[t], st.reshape(-1)]) for t, st in zip(times, states))
    atomic_write_text(path, _csv(header, rows))


def write_aux_csv(times, angles, aux, path) -> None:
    """Angles plus planar auxiliary variables: t,theta_1..theta_N,w_1_x,w_1_y,..."""
    angles = np.asarray(angles)
    aux = np.asarray(aux)
    n = angles.shape[1]
    header = ["t"] + [f"theta_{k + 1}" for k in range(n)]
    for k in range(n):
        header += [f"w_{k + 1}_x", f"w_{k + 1}_y"]
    rows = (np.concatenate([[t], a, w.reshape(-1)])
            for t, a, w in zip(times, angles, aux))
    atomic_write_text(path, _csv(header, rows))


def write_sin_csv(times, angles, path) -> None:
    """Per-agent sin(theta_k) traces: t,sin_theta_1,...,sin_theta_N."""
    angles = np.asarray(angles)
    header = ["t"] + [f"sin_theta_{k + 1}" for k in range(angles.shape[1])]
    rows = (np.concatenate([[t], np.sin(row)]) for t, row in zip(times, angles))
    atomic_write_text(path, _csv(header, rows))


def write_velocity_csv(times, velocities, path) -> None:
    """Per-agent angular velocities: t,dtheta_1,...,dtheta_N."""
    velocities = np.asarray(velocities)
    header = ["t"] + [f"dtheta_{k + 1}" for k in range(velocities.shape[1])]
    rows = (np.concatenate([[t], row]) for t, row in zip(times, velocities))
    atomic_write_text(path, _csv(header, rows))


def write_trials_csv(steps, path) -> None:
    """Per-trial gossip step counts: trial,steps."""
    lines = ["trial,steps"]
    for i, s in enumerate(steps):
        lines.append(f"{i},{int(s)}")
    atomic_write_text(path, "\n".join(lines) + "\n")
