"""Command-line front end.

    ptlattice lock --model chain --n 6 --gain-site 2 --gamma 3 --tmax 12 --seed 7

Settings come from built-in defaults, then an optional flat JSON file given
with ``--config``, then explicit flags.  The first line of every output
records the resolved settings, and feeding that JSON back through
``--config`` reproduces the output byte for byte.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from .analysis import detect_locking, pt_threshold
from .errors import NumericalFailureError, SpecError
from .evolve import TimeGrid, invariant_digits, phases, propagate, random_state
from .invariants import find_intertwiners, invariant_series
from .io import (
    write_eigenvalues_csv,
    write_intertwiners_csv,
    write_json_lines,
    write_trajectory_csv,
)
from .linalg import eig
from .models import LatticeSpec, build_hamiltonian, check_pt_symmetry, parity_matrix

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

MODEL_KEYS = {
    "model": None,
    "n": None,
    "J": 1.0,
    "gamma": 0.0,
    "gain_site": 1,
    "delta": 0.0,
    "profile": [],
    "jprime": 0.0,
}
RUN_KEYS = {"seed": 0, "tmax": 20.0, "dt": 0.05}
LOCK_KEYS = {"window": 0.2, "lock_tol": 0.02, "snap_tol": 0.05}

COMMAND_KEYS = {
    "spectrum": dict(MODEL_KEYS),
    "evolve": {**MODEL_KEYS, **RUN_KEYS, "digits": None},
    "threshold": {**MODEL_KEYS, "gamma_max": 3.0, "tol": 1e-6, "points": 200},
    "lock": {**MODEL_KEYS, **RUN_KEYS, **LOCK_KEYS},
    "intertwiners": {**MODEL_KEYS, **RUN_KEYS, "digits": None},
    "sweep": {**MODEL_KEYS, **RUN_KEYS, **LOCK_KEYS, "seeds": [0], "gammas": []},
}


class ConfigError(SpecError):
    pass


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _add_model_args(p):
    p.add_argument("--config", help="flat JSON file of settings; flags override it")
    p.add_argument("--model", choices=["dimer", "trimer", "chain", "ssh", "aah", "pst", "ring"])
    p.add_argument("--n", type=int, help="number of sites")
    p.add_argument("--J", type=float, help="tunneling (unit of energy)")
    p.add_argument("--gamma", type=float, help="gain-loss strength in units of J")
    p.add_argument("--gain-site", dest="gain_site", type=int, help="gain site m0 (1-based)")
    p.add_argument("--delta", type=float, help="SSH tunneling differential")
    p.add_argument("--profile", type=_float_list, help="AAH tunnelings, comma separated, in units of J")
    p.add_argument("--jprime", type=float, help="second tunneling of the ring")
    p.add_argument("--out", help="output file (default: stdout)")


def _add_run_args(p):
    p.add_argument("--seed", type=int)
    p.add_argument("--tmax", type=float, help="final time in units of 1/J")
    p.add_argument("--dt", type=float, help="output step in units of 1/J")


def _add_lock_args(p):
    p.add_argument("--window", type=float, help="trailing window fraction")
    p.add_argument("--lock-tol", dest="lock_tol", type=float, help="saturation spread, units of pi")
    p.add_argument("--snap-tol", dest="snap_tol", type=float, help="snapping distance, units of pi")


def build_parser():
    parser = argparse.ArgumentParser(prog="ptlattice", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues as CSV", argument_default=argparse.SUPPRESS)
    _add_model_args(p)

    p = sub.add_parser("evolve", help="trajectory CSV", argument_default=argparse.SUPPRESS)
    _add_model_args(p)
    _add_run_args(p)
    p.add_argument("--digits", type=int, help="evolve at this many decimal digits")

    p = sub.add_parser("threshold", help="PT threshold JSON", argument_default=argparse.SUPPRESS)
    _add_model_args(p)
    p.add_argument("--gamma-max", dest="gamma_max", type=float)
    p.add_argument("--tol", type=float, help="bisection bracket width")
    p.add_argument("--points", type=int, help="scan points")

    p = sub.add_parser("lock", help="evolve and report phase locking", argument_default=argparse.SUPPRESS)
    _add_model_args(p)
    _add_run_args(p)
    _add_lock_args(p)
    p.add_argument("--trajectory", help="also write the trajectory CSV here")

    p = sub.add_parser("intertwiners", help="intertwiner basis CSV + certification", argument_default=argparse.SUPPRESS)
    _add_model_args(p)
    _add_run_args(p)
    p.add_argument("--digits", type=int, help="working precision (default: chosen from the growth rate)")
    p.add_argument("--report", help="certification JSON path (default: OUT.json, or stdout)")

    p = sub.add_parser("sweep", help="lock over seed and gamma lists", argument_default=argparse.SUPPRESS)
    _add_model_args(p)
    _add_run_args(p)
    _add_lock_args(p)
    p.add_argument("--seeds", type=_int_list, help="comma-separated seeds")
    p.add_argument("--gammas", type=_float_list, help="comma-separated gamma values")
    return parser


# LatticeSpec field names as spelled in configs and flags
FIELD_NAMES = {"N": "n", "m0": "gain_site", "period_profile": "profile", "variant": "model"}

IO_KEYS = ("config", "out", "trajectory", "report", "command")


def resolve_config(args):
    """Merge defaults, the ``--config`` file and explicit flags."""
    known = COMMAND_KEYS[args.command]
    config = dict(known)
    flags = vars(args)
    if flags.get("config"):
        try:
            with open(flags["config"], encoding="utf-8") as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}", field="config") from None
        if not isinstance(from_file, dict):
            raise ConfigError("config file must hold a flat JSON object", field="config")
        unknown = sorted(set(from_file) - set(known))
        if unknown:
            raise ConfigError(f"unknown config key(s) for {args.command}: {', '.join(unknown)}", field=unknown[0])
        config.update(from_file)
    config.update({k: v for k, v in flags.items() if k not in IO_KEYS})
    if config["model"] is None:
        raise ConfigError("no model given (use --model or the config file)", field="model")
    return config


def spec_from_config(config, gamma=None):
    return LatticeSpec(
        config["model"],
        config["n"],
        config["J"],
        config["gamma"] if gamma is None else gamma,
        config["gain_site"],
        config["delta"],
        tuple(config["profile"] or ()),
        config["jprime"],
    )


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _evolve(spec, config, digits=None):
    H = build_hamiltonian(spec)
    grid = TimeGrid(float(config["tmax"]), float(config["dt"]))
    return H, propagate(H, random_state(spec.N, config["seed"]), grid, digits)


def _lock(spec, config):
    H, traj = _evolve(spec, config)
    report = detect_locking(phases(traj), config["window"], config["lock_tol"], config["snap_tol"])
    return traj, report


def cmd_spectrum(args, config):
    spec = spec_from_config(config)
    values = eig(build_hamiltonian(spec), vectors=False).values
    with _output(args.out) as fh:
        write_eigenvalues_csv(fh, values, config)


def cmd_evolve(args, config):
    spec = spec_from_config(config)
    _, traj = _evolve(spec, config, config["digits"])
    with _output(args.out) as fh:
        write_trajectory_csv(fh, traj, parity_matrix(spec.N), config)


def cmd_threshold(args, config):
    spec = spec_from_config(config)
    result = pt_threshold(spec, config["gamma_max"], config["tol"], config["points"])
    with _output(args.out) as fh:
        write_json_lines(fh, [result.to_dict()], config)


def cmd_lock(args, config):
    spec = spec_from_config(config)
    traj, report = _lock(spec, config)
    if getattr(args, "trajectory", None):
        with _output(args.trajectory) as fh:
            write_trajectory_csv(fh, traj, parity_matrix(spec.N), config)
    with _output(args.out) as fh:
        write_json_lines(fh, [report.to_dict()], config)


def cmd_intertwiners(args, config):
    spec = spec_from_config(config)
    H = build_hamiltonian(spec)
    digits = config["digits"]
    if digits is None:
        digits = invariant_digits(H, float(config["tmax"]))
    basis = find_intertwiners(H, digits=digits or None)
    _, traj = _evolve(spec, config, digits or None)
    operators = basis.exact_basis if basis.exact_basis is not None else basis.basis
    drifts = [invariant_series(traj, eta).max_relative_drift for eta in operators]
    P = parity_matrix(spec.N)
    certification = {
        "dimension": basis.dimension,
        "residuals": basis.residuals,
        "invariant_drifts": drifts,
        "digits": digits,
        "pt_symmetry_residual": check_pt_symmetry(H, P),
        "parity_projection_residual": basis.projection_residual(P) if basis.dimension else 1.0,
    }
    report_path = getattr(args, "report", None)
    if report_path is None and args.out is not None:
        report_path = os.path.splitext(args.out)[0] + ".json"
    with _output(args.out) as fh:
        write_intertwiners_csv(fh, basis, config)
    with _output(report_path) as fh:
        write_json_lines(fh, [certification], config)


def _thread_count():
    raw = os.environ.get("PT_LATTICE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"PT_LATTICE_THREADS must be an integer, got {raw!r}", field="PT_LATTICE_THREADS") from None
    return os.cpu_count() or 1


def cmd_sweep(args, config):
    gammas = config["gammas"] or [config["gamma"]]
    jobs = [(g, s) for g in gammas for s in config["seeds"]]
    specs = {g: spec_from_config(config, gamma=g) for g in gammas}

    def run(job):
        g, seed = job
        _, report = _lock(specs[g], {**config, "seed": seed})
        return {"gamma": g, "seed": seed, **report.to_dict()}

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        results = list(pool.map(run, jobs))
    with _output(args.out) as fh:
        write_json_lines(fh, [results], config)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "threshold": cmd_threshold,
    "lock": cmd_lock,
    "intertwiners": cmd_intertwiners,
    "sweep": cmd_sweep,
}


def run(argv=None):
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    for key in ("out", "config"):
        if not hasattr(args, key):
            setattr(args, key, None)
    try:
        config = resolve_config(args)
        COMMANDS[args.command](args, config)
    except SpecError as exc:
        name = FIELD_NAMES.get(exc.field, exc.field)
        field = f" (field '{name}')" if name else ""
        print(f"ptlattice: invalid config{field}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailureError, FloatingPointError, np.linalg.LinAlgError) as exc:
        where = ""
        if isinstance(exc, NumericalFailureError):
            where = f" in {exc.operation or 'computation'}" + (f" at step {exc.step}" if exc.step is not None else "")
        print(f"ptlattice: numerical failure{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
