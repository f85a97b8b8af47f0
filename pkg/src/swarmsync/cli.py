"""Config-driven command-line front end.

Commands: simulate, equilibria, gossip, scenario, vicsek, aux.  Each reads a
JSON config (--config), with --seed/--out/--quiet overrides, resolves
defaults, validates, runs deterministically, and writes its outputs plus a
run manifest (the fully resolved config, which reproduces the run when fed
back).  Exit codes: 0 success, 2 config error, 3 precondition error,
4 timeout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import aux_consensus, circle, equilibria, gossip, output, scenarios
from . import vector_consensus
from .graphs import GraphSequence, WeightedDigraph, graph_from_json, graph_to_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_TIMEOUT = 4

COMMANDS = ("simulate", "equilibria", "gossip", "scenario", "vicsek", "aux")

_STOCHASTIC = {"gossip"}  # commands that always draw randomness


@dataclass
class Diagnostic:
    severity: str  # "error" | "warning"
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.field}: {self.message}"


def _load_graph_spec(spec, diags: list, where: str):
    """Graph or schedule from a config fragment (inline dict, file, or schedule)."""
    if isinstance(spec, str):
        spec = {"file": spec}
    if "file" in spec:
        path = spec["file"]
        if not os.path.exists(path):
            diags.append(Diagnostic("error", where, f"graph file not found: {path}"))
            return None
        with open(path) as f:
            spec = json.load(f)
    try:
        if "schedule" in spec:
            graphs = [graph_from_json(g) for g in spec["schedule"]]
            return GraphSequence(graphs, delta=spec.get("delta", 1.0),
                                 durations=spec.get("durations"),
                                 periodic=spec.get("periodic", True))
        return graph_from_json(spec)
    except (KeyError, ValueError, TypeError) as e:
        diags.append(Diagnostic("error", where, str(e)))
        return None


def _resolve(config: dict) -> dict:
    """Fill documented defaults so the manifest reproduces the run exactly."""
    cfg = json.loads(json.dumps(config))  # deep copy, JSON-clean
    cfg.setdefault("params", {})
    p = cfg["params"]
    cmd = cfg.get("command")
    if cmd in ("simulate", "scenario", "aux"):
        p.setdefault("alpha", 1.0)
        p.setdefault("h", 0.01)
        p.setdefault("sample_every", 1)
    if cmd == "simulate":
        p.setdefault("space", "circle")
        p.setdefault("mode", "ct")
        if p["mode"] == "ct":
            p.setdefault("t_end", 10.0)
        else:
            p.setdefault("steps", 100)
            p.setdefault("beta", 1.0)
    if cmd == "scenario":
        p.setdefault("t_end", 10.0)
    if cmd == "aux":
        p.setdefault("t_end", 10.0)
        p.setdefault("tracking_gain", 5.0 * p.get("alpha", 1.0))
    if cmd == "gossip":
        p.setdefault("variant", "jump")
        p.setdefault("beta", 1.0)
        p.setdefault("alpha", 1.0)
        p.setdefault("trials", 1000)
        p.setdefault("max_steps", 100000)
        p.setdefault("sync_tol", 1e-6)
        p.setdefault("per_trial_csv", False)
    if cmd == "vicsek":
        p.setdefault("steps", 50)
        p.setdefault("sensing_radius", 1.0)
    if cmd == "equilibria":
        p.setdefault("grad_tol", 1e-10)
    cfg.setdefault("sync_tol", 1e-6)
    return cfg


def validate(config: dict) -> list[Diagnostic]:
    """Non-mutating checks; returns every violated precondition or advisory."""
    diags: list[Diagnostic] = []
    cmd = config.get("command")
    if cmd not in COMMANDS:
        diags.append(Diagnostic("error", "command",
                                f"must be one of {COMMANDS}, got {cmd!r}"))
        return diags
    cfg = _resolve(config)
    p = cfg["params"]

    needs_seed = cmd in _STOCHASTIC or (
        isinstance(cfg.get("initial"), dict) and cfg["initial"].get("random_uniform"))
    if needs_seed and cfg.get("seed") is None:
        diags.append(Diagnostic("error", "seed",
                                "a seed is mandatory for stochastic commands"))

    graph = None
    if cmd == "scenario":
        kind = cfg.get("scenario")
        if kind not in scenarios.SCENARIO_KINDS:
            diags.append(Diagnostic("error", "scenario",
                                    f"unknown scenario {kind!r}"))
    elif cmd == "vicsek":
        v = cfg.get("vicsek", {})
        if "divergence" in v:
            n = v["divergence"].get("n", 0)
            if n < 5:
                diags.append(Diagnostic("error", "vicsek.divergence.n",
                                        "the diverging ring construction requires N >= 5"))
        elif not ("positions" in v and "headings" in v):
            diags.append(Diagnostic("error", "vicsek",
                                    "need either a divergence block or positions+headings"))
    else:
        if "graph" not in cfg:
            diags.append(Diagnostic("error", "graph", "missing graph specification"))
        else:
            graph = _load_graph_spec(cfg["graph"], diags, "graph")

    for key in ("alpha", "beta", "h", "t_end"):
        if key in p and not (isinstance(p[key], (int, float)) and p[key] > 0):
            diags.append(Diagnostic("error", f"params.{key}", "must be a positive number"))

    if cmd == "simulate" and graph is not None:
        g0 = graph.graphs[0] if isinstance(graph, GraphSequence) else graph
        if p.get("space") == "vector" and p.get("mode") == "dt":
            load = p["alpha"] * float(g0.in_degrees().max())
            if load >= 1.0:
                diags.append(Diagnostic(
                    "error", "params.alpha",
                    f"alpha*max_in_degree = {load:.6g} >= 1 violates the "
                    f"discrete-time contraction bound"))
        if p.get("space") == "circle" and p.get("mode") == "dt":
            if g0.is_undirected() and g0.is_unweighted() and g0.in_degrees().max() > 0:
                bound = equilibria.beta_bound(g0)
                if p.get("beta", 1.0) < bound:
                    diags.append(Diagnostic(
                        "warning", "params.beta",
                        f"beta = {p.get('beta', 1.0):.6g} is below the synchronous "
                        f"descent bound {bound:.6g}; descent of the disagreement "
                        f"is no longer guaranteed (the bound is conservative)"))
    return diags


def _initial_angles(cfg: dict, n: int) -> np.ndarray:
    init = cfg.get("initial", {})
    if "angles" in init:
        angles = np.asarray(init["angles"], dtype=float)
        if angles.size != n:
            raise ValueError(f"initial angles have size {angles.size}, expected {n}")
        return circle.wrap(angles)
    if init.get("random_uniform"):
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence((int(cfg["seed"]), 0, 0, 1))))
        return circle.wrap(rng.uniform(-np.pi, np.pi, size=n))
    raise ValueError("initial state needs either 'angles' or 'random_uniform'")


def _profile_from(p: dict, n: int):
    spec = p.get("profile", {"kind": "sine"})
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = spec.get("kind", "sine")
    if kind == "sine":
        return None
    return circle.make_profile(kind, a=spec.get("a", 1.0),
                               n_agents=spec.get("n_agents", n),
                               smoothing=spec.get("smoothing"))


def _run_simulate(cfg, out_dir):
    p = cfg["params"]
    graph = _load_graph_spec(cfg["graph"], [], "graph")
    n = graph.n
    files = []
    if p["space"] == "vector":
        x0 = np.asarray(cfg["initial"]["states"], dtype=float)
        traj = vector_consensus.simulate(
            x0, graph, alpha=p["alpha"], mode=p["mode"], t_end=p.get("t_end"),
            h=p.get("h", 0.01), steps=p.get("steps"), b=p.get("b"),
            sample_every=p.get("sample_every", 1))
        path = os.path.join(out_dir, "trajectory.csv")
        traj.to_csv(path)
        files.append(path)
    else:
        angles0 = _initial_angles(cfg, n)
        profile = _profile_from(p, n)
        if p["mode"] == "ct":
            traj = circle.integrate(angles0, graph, alpha=p["alpha"],
                                    profile=profile, t_end=p["t_end"],
                                    h=p["h"], sample_every=p["sample_every"])
        else:
            traj = circle.run_discrete(angles0, graph, beta=p["beta"],
                                       steps=p["steps"],
                                       sample_every=p["sample_every"])
        path = os.path.join(out_dir, "trajectory.csv")
        traj.to_csv(path)
        files.append(path)
        sin_path = os.path.join(out_dir, "sin_traces.csv")
        vel_path = None
        if traj.velocities is not None:
            vel_path = os.path.join(out_dir, "velocities.csv")
        traj.write_plot_data(sin_path, vel_path)
        files.append(sin_path)
        if vel_path:
            files.append(vel_path)
    return EXIT_OK, files


def _run_equilibria(cfg, out_dir):
    p = cfg["params"]
    graph = _load_graph_spec(cfg["graph"], [], "graph")
    profile = _profile_from(p, graph.n)
    seeds = []
    if "seeds" in cfg:
        seeds = [np.asarray(s, dtype=float) for s in cfg["seeds"]]
    elif isinstance(cfg.get("initial"), dict):
        seeds = [_initial_angles(cfg, graph.n)]
    reports = equilibria.critical_point_search(
        graph, profile, seeds, grad_tol=p["grad_tol"])
    if cfg.get("include_ring_splay"):
        for s in equilibria.enumerate_ring_splay_states(graph.n):
            reports.extend(equilibria.critical_point_search(graph, profile, [s.angles],
                                                            grad_tol=p["grad_tol"]))
    path = os.path.join(out_dir, "equilibria.json")
    output.write_json([r.to_json() for r in reports], path)
    return EXIT_OK, [path]


def _run_gossip(cfg, out_dir):
    p = cfg["params"]
    graph = _load_graph_spec(cfg["graph"], [], "graph")
    gcfg = gossip.GossipConfig(beta=p["beta"], variant=p["variant"],
                               alpha=p["alpha"], seed=int(cfg["seed"]),
                               max_steps=int(p["max_steps"]),
                               sync_tol=p["sync_tol"])
    result = gossip.monte_carlo_sync_time(graph, gcfg, trials=int(p["trials"]))
    counts, edges = result.histogram
    report = {
        "mean": result.mean,
        "stderr": result.stderr,
        "trials": int(p["trials"]),
        "timeouts": result.timeouts,
        "stall_fraction": result.stall_fraction,
        "histogram": {"counts": [int(c) for c in counts],
                      "bin_edges": [float(e) for e in edges]},
    }
    path = os.path.join(out_dir, "gossip_report.json")
    output.write_json(report, path)
    files = [path]
    if p.get("per_trial_csv"):
        trials_path = os.path.join(out_dir, "trials.csv")
        output.write_trials_csv(result.steps, trials_path)
        files.append(trials_path)
    code = EXIT_TIMEOUT if result.timeouts else EXIT_OK
    return code, files


def _run_scenario(cfg, out_dir):
    p = cfg["params"]
    sc = scenarios.make_scenario(cfg["scenario"], **cfg.get("scenario_params", {}))
    traj = sc.integrate(t_end=p["t_end"], h=p["h"],
                        sample_every=p["sample_every"])
    files = []
    for name, writer in (("trajectory.csv", traj.to_csv),):
        path = os.path.join(out_dir, name)
        writer(path)
        files.append(path)
    sin_path = os.path.join(out_dir, "sin_traces.csv")
    vel_path = os.path.join(out_dir, "velocities.csv")
    traj.write_plot_data(sin_path, vel_path)
    files += [sin_path, vel_path]
    return EXIT_OK, files


def _run_vicsek(cfg, out_dir):
    p = cfg["params"]
    v = cfg.get("vicsek", {})
    if "divergence" in v:
        d = v["divergence"]
        state = scenarios.vicsek_divergence_setup(
            int(d["n"]), float(d["ring_radius"]),
            float(p.get("sensing_radius", 1.0)))
    else:
        state = scenarios.VicsekState(np.asarray(v["positions"], dtype=float),
                                      np.asarray(v["headings"], dtype=float),
                                      float(p.get("sensing_radius", 1.0)))
    headings = [state.headings]
    positions = [state.positions]
    for _ in range(int(p["steps"])):
        state = scenarios.vicsek_step(state)
        headings.append(state.headings)
        positions.append(state.positions)
    times = np.arange(len(headings), dtype=float)
    traj_path = os.path.join(out_dir, "headings.csv")
    output.write_circle_csv(times, np.array(headings), traj_path)
    pos_path = os.path.join(out_dir, "positions.csv")
    output.write_vector_csv(times, np.array(positions), pos_path)
    return EXIT_OK, [traj_path, pos_path]


def _run_aux(cfg, out_dir):
    p = cfg["params"]
    graph = _load_graph_spec(cfg["graph"], [], "graph")
    angles0 = _initial_angles(cfg, graph.n)
    traj = aux_consensus.simulate_aux(
        angles0, graph, alpha=p["alpha"], tracking_gain=p["tracking_gain"],
        t_end=p["t_end"], h=p["h"], sample_every=p["sample_every"])
    path = os.path.join(out_dir, "trajectory.csv")
    traj.to_csv(path)
    return EXIT_OK, [path]


_RUNNERS = {
    "simulate": _run_simulate,
    "equilibria": _run_equilibria,
    "gossip": _run_gossip,
    "scenario": _run_scenario,
    "vicsek": _run_vicsek,
    "aux": _run_aux,
}


def run(config: dict, out_dir: str, quiet: bool = False) -> int:
    """Validate, execute, and emit the manifest; returns the exit code."""
    diags = validate(config)
    errors = [d for d in diags if d.severity == "error"]
    if not quiet:
        for d in diags:
            print(d, file=sys.stderr)
    if errors:
        return EXIT_CONFIG
    cfg = _resolve(config)
    os.makedirs(out_dir, exist_ok=True)
    try:
        code, files = _RUNNERS[cfg["command"]](cfg, out_dir)
    except ValueError as e:
        if not quiet:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    output.write_json(cfg, os.path.join(out_dir, "manifest.json"))
    if not quiet:
        for f in files:
            print(f)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="swarmsync",
        description="Deterministic multi-agent synchronization runs from JSON configs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} command")
        p.add_argument("--config", required=(name != "gossip"),
                       help="JSON config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--quiet", action="store_true")
        if name == "gossip":
            p.add_argument("--variant", choices=("jump", "moderate"))
            p.add_argument("--beta", type=float)
            p.add_argument("--alpha", type=float)
            p.add_argument("--trials", type=int)
            p.add_argument("--max-steps", type=int, dest="max_steps")
            p.add_argument("--n", type=int,
                           help="agents on a complete graph (shortcut when no config)")
    args = parser.parse_args(argv)

    config: dict = {}
    if args.config:
        if not os.path.exists(args.config):
            print(f"error: config: file not found: {args.config}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            with open(args.config) as f:
                config = json.load(f)
        except json.JSONDecodeError as e:
            print(f"error: config: line {e.lineno}, column {e.colno}: {e.msg}",
                  file=sys.stderr)
            return EXIT_CONFIG
    config.setdefault("command", args.command)
    if config["command"] != args.command:
        print(f"error: command: config says {config['command']!r} but the "
              f"subcommand is {args.command!r}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        config["seed"] = args.seed
    if args.command == "gossip":
        p = config.setdefault("params", {})
        for key in ("variant", "beta", "alpha", "trials", "max_steps"):
            val = getattr(args, key, None)
            if val is not None:
                p[key] = val
        if getattr(args, "n", None):
            from .graphs import complete_graph
            config["graph"] = graph_to_json(complete_graph(args.n))
    return run(config, args.out, args.quiet)


if __name__ == "__main__":
    sys.exit(main())
