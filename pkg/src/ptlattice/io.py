"""CSV and JSON-lines writers for trajectories, spectra, intertwiners and reports.

Every file starts with one ``#`` comment line recording the library version
and the resolved configuration that produced it.
"""

import csv
import json

import numpy as np

from . import __version__
from .evolve import phases
from .invariants import invariant_series


def fmt(x):
    return f"{x:.12g}"


def header_line(config):
    return f"# ptlattice {__version__} config={json.dumps(config, sort_keys=True)}\n"


def trajectory_columns(N):
    return ["t", "log_norm", "re_pt", "im_pt"] + [f"theta_{k}" for k in range(2, N + 1)]


def write_trajectory_csv(fh, traj, P, config):
    """Write ``t, log_norm, re_pt, im_pt, theta_2, ..., theta_N``.

    ``re_pt``/``im_pt`` are the PT product at physical scale, thetas are in
    units of pi and invalid (masked) phases are left empty.
    """
    fh.write(header_line(config))
    ps = phases(traj)
    pt = invariant_series(traj, P).values
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(trajectory_columns(traj.dim))
    for n, t in enumerate(traj.times):
        row = [fmt(t), fmt(traj.log_scale[n]), fmt(pt[n].real), fmt(pt[n].imag)]
        row += [fmt(th) if ok else "" for th, ok in zip(ps.theta[n], ps.valid[n])]
        writer.writerow(row)


def read_trajectory_csv(path):
    """Parse a trajectory CSV back into a dict of float arrays (NaN for empty fields)."""
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    columns = next(reader)
    rows = [[float(x) if x else np.nan for x in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return {name: data[:, i] for i, name in enumerate(columns)}


def write_eigenvalues_csv(fh, values, config):
    fh.write(header_line(config))
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["index", "re", "im"])
    for i, lam in enumerate(values):
        writer.writerow([i, fmt(lam.real), fmt(lam.imag)])


def write_intertwiners_csv(fh, basis, config):
    """One block per operator: a ``# eta i residual=...`` line, then ``row,col,re,im``."""
    fh.write(header_line(config))
    writer = csv.writer(fh, lineterminator="\n")
    for i, (eta, res) in enumerate(zip(basis.basis, basis.residuals)):
        fh.write(f"# eta {i} residual={res:.6e}\n")
        writer.writerow(["row", "col", "re", "im"])
        for (r, c), x in np.ndenumerate(eta):
            writer.writerow([r + 1, c + 1, fmt(x.real), fmt(x.imag)])


def read_intertwiners_csv(path):
    """Parse an intertwiner CSV into ``(matrices, residuals)``."""
    blocks, residuals = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# eta"):
                residuals.append(float(line.split("residual=")[1]))
                blocks.append([])
            elif line.startswith("#") or line.startswith("row"):
                continue
            elif line.strip():
                r, c, re, im = line.strip().split(",")
                blocks[-1].append((int(r), int(c), float(re) + 1j * float(im)))
    matrices = []
    for entries in blocks:
        n = max(r for r, _, _ in entries)
        m = np.zeros((n, n), dtype=complex)
        for r, c, x in entries:
            m[r - 1, c - 1] = x
        matrices.append(m)
    return matrices, residuals


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json_lines(fh, objects, config):
    fh.write(header_line(config))
    for obj in objects:
        fh.write(json.dumps(_clean(obj), sort_keys=True) + "\n")


def read_json_lines(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip() and not line.startswith("#")]
