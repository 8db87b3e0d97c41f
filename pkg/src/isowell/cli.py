"""Command-line front end.

Usage::

    isowell potential --preset fig1a --out out/
    isowell spectrum  --config run.json
    isowell evolve    --preset evolve-sym --out out/
    isowell perturb   --preset table1-row1 --out out/
    isowell floquet   --preset table3-sym --config overrides.json --out out/

``--config`` is a JSON file (see `isowell.config` for the schema and
defaults); it overrides the preset, which overrides the defaults.

Output is byte-reproducible.  Every float is written in fixed 12
significant digit scientific notation (``%.11e``) in both CSV and JSON.
Each CSV starts with ``#`` comment lines holding the command and the full
resolved configuration; each JSON carries the same under ``"config"``.

Exit codes: 0 success, 2 configuration error, 3 numerical error.
``ISOWELL_THREADS`` caps the BLAS/OpenMP thread pools.
"""

import argparse
import json
import math
import os
import sys
import warnings
from contextlib import contextmanager
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .config import COMMANDS, PRESETS, resolve_config
from .dynamics import PacketConfig, density_surface, project, well_probability
from .exceptions import ConfigError, DomainError, IsowellError
from .floquet import (DriveParams, ctd_amplitude, ctd_frequency, dipole_matrix, floquet_spectrum,
                      stroboscopic_evolution, sweep_quasi_energies)
from .model import DeformationParams, build_basis, classify_wells, potential, spectrum
from .numerics import QuadratureSpec
from .perturb import (DisturbanceParams, bump, diagonalize_perturbed, localization_report,
                      reconstruct_potential, suggested_size)
from .validation import check_positive_int

__all__ = ["main", "run"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
FLOAT_FMT = "{:.11e}"
MIN_BASIS, MAX_BASIS = 3, 40


@contextmanager
def _as_config():
    """Report out-of-domain parameters as configuration errors."""
    try:
        yield
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


class _Setup:
    """Physical objects built from a resolved configuration."""

    def __init__(self, cfg, default_size=10):
        self.cfg = cfg
        tol = cfg["tolerances"]
        with _as_config():
            self.params = DeformationParams(**cfg["model"])
            self.qspec = QuadratureSpec(abs_tol=tol["abs_tol"], rel_tol=tol["rel_tol"],
                                        halfwidth=cfg["halfwidth"])
            size = cfg["basis_size"] if cfg["basis_size"] is not None else default_size
            self.size = check_positive_int(size, "basis_size", MIN_BASIS, MAX_BASIS)
        self.ode_tol = tol["ode_tol"]
        self.halfwidth = cfg["halfwidth"]

    def basis(self):
        return build_basis(self.params, self.size, self.halfwidth, self.qspec)


def _grid(g, name):
    if g["num"] < 1:
        raise ConfigError(f"{name} grid is empty (num={g['num']})")
    if g["num"] > 1 and not g["stop"] > g["start"]:
        raise ConfigError(f"{name} grid needs stop > start")
    return np.linspace(g["start"], g["stop"], g["num"])


def _fmt(x):
    if isinstance(x, (bool, np.bool_)) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    # round-trip through the fixed format so JSON and CSV agree digit for digit
    return float(FLOAT_FMT.format(x))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    return _fmt(obj)


def _csv_cell(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    return FLOAT_FMT.format(x) if math.isfinite(x) else "nan"


def _header(command, cfg):
    return [f"# isowell {__version__} {command}",
            "# config " + json.dumps(cfg, sort_keys=True, separators=(",", ":"))]


def write_csv(path, command, cfg, columns, rows):
    lines = _header(command, cfg) + [",".join(columns)]
    lines += [",".join(_csv_cell(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, command, cfg, payload):
    doc = {"command": command, "version": __version__, "config": cfg}
    doc.update(_jsonable(payload))
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def _wells_payload(wells):
    return {"minima": [p for p, _ in wells.minima], "barrier_tops": [p for p, _ in wells.barrier_tops],
            "well_count": wells.well_count}


def _region_names(n):
    return ["left", "center", "right"] if n == 3 else (["left", "right"] if n == 2 else
                                                        [f"well{k}" for k in range(n)])


def cmd_potential(cfg, out):
    s = _Setup(cfg)
    xi = _grid(cfg["grid"], "potential")
    U = potential(s.params, xi)
    wells = classify_wells(s.params, s.halfwidth)
    write_csv(out / "potential.csv", "potential", cfg, ["xi", "U"], zip(xi, np.atleast_1d(U)))
    write_json(out / "potential.json", "potential", cfg, {"wells": _wells_payload(wells)})
    return ["potential.csv", "potential.json"]


def cmd_spectrum(cfg, out):
    s = _Setup(cfg)
    size = s.size
    with _as_config():
        sweep = [s.params.replace(lambda1=lam) for lam in cfg["lambda_sweep"]]
    basis = s.basis()
    gram = basis.gram(spec=s.qspec)
    payload = {
        "energies": basis.energies,
        "construction": basis.construction,
        "gram_residual": np.abs(gram - np.eye(size)).max(),
        "hamiltonian_residual": np.max(basis.hamiltonian_residuals()),
        "lambda_sweep": [{"lambda1": p.lambda1, "energies": spectrum(p, size)} for p in sweep],
    }
    write_json(out / "spectrum.json", "spectrum", cfg, payload)
    return ["spectrum.json"]


def cmd_evolve(cfg, out):
    s = _Setup(cfg)
    basis = s.basis()
    wells = classify_wells(s.params, s.halfwidth)
    pk = cfg["packet"]
    xi0 = pk["xi0"] if pk["xi0"] is not None else wells.minima[-1][0]
    max_energy = wells.barrier_height if cfg["under_barrier"] else None
    with _as_config():
        packet = PacketConfig(pk["R"], xi0)
        n_states = cfg["n_states"]
        if n_states is not None:
            check_positive_int(n_states, "n_states", 1, s.size)
    state = project(packet, basis, n_states, s.qspec, max_energy)
    tau = _grid(cfg["tau"], "tau")
    regions = wells.regions(basis.halfwidth)
    probs = [np.atleast_1d(well_probability(state, r, tau, s.qspec)) for r in regions]
    names = ["P_" + n for n in _region_names(len(regions))]
    write_csv(out / "evolve.csv", "evolve", cfg, ["tau"] + names, zip(tau, *probs))
    files = ["evolve.csv"]
    if cfg["density"] is not None:
        xg = _grid(cfg["density"]["xi"], "density xi")
        tg = _grid(cfg["density"]["tau"], "density tau")
        surf = density_surface(state, xg, tg)
        rows = ((x, t, surf[j, i]) for i, x in enumerate(xg) for j, t in enumerate(tg))
        write_csv(out / "density.csv", "evolve", cfg, ["xi", "tau", "abs_phi"], rows)
        files.append("density.csv")
    return files


def cmd_perturb(cfg, out):
    with _as_config():
        d = DisturbanceParams(**cfg["disturbance"])
    s = _Setup(cfg, suggested_size(d))
    basis = s.basis()
    wells = classify_wells(s.params, s.halfwidth)
    spec = diagonalize_perturbed(basis, d, spec=s.qspec)
    rep = localization_report(spec, wells, states=[0, 1], qspec=s.qspec)
    names = _region_names(len(rep.regions))
    payload = {
        "energies": spec.energies,
        "splitting": spec.splitting,
        "coefficients": {"basis": spec.coeff_matrix,
                         "analytic": [spec.coefficients(n, "analytic") for n in range(spec.basis_size)]},
        "localization": {f"state{n}": dict(zip(names, rep.weights[n])) for n in range(2)},
        "regions": rep.regions,
    }
    write_json(out / "perturb.json", "perturb", cfg, payload)
    xi = _grid(cfg["grid"], "reconstruction")
    actual = np.atleast_1d(potential(s.params, xi)) + np.atleast_1d(bump(d, xi))
    rec = np.atleast_1d(reconstruct_potential(spec, None, xi))
    write_csv(out / "reconstruction.csv", "perturb", cfg, ["xi", "U_actual", "U_reconstructed"],
              zip(xi, actual, rec))
    return ["perturb.json", "reconstruction.csv"]


def cmd_floquet(cfg, out):
    s = _Setup(cfg)
    size = s.size
    basis = s.basis()
    dr = cfg["drive"]
    with _as_config():
        drive = DriveParams(dr["S"], dr["w"], dr["phi0"])
    res = floquet_spectrum(basis, drive, size, s.ode_tol, s.qspec)
    r = dipole_matrix(basis, size, s.qspec)[0, 1]
    payload = {
        "quasi_energies": res.quasi_energies,
        "doublet": {"i": res.doublet[0], "j": res.doublet[1], "splitting": res.doublet[2]},
        "closest_pair": {"i": res.closest_pair[0], "j": res.closest_pair[1], "gap": res.closest_pair[2]},
        "ambiguous": res.ambiguous,
        "r": r,
        "ctd_frequency": ctd_frequency(dr["S"], r) if dr["S"] > 0 else None,
        "ctd_amplitude": ctd_amplitude(dr["w"], r),
    }
    files = ["floquet.json"]
    if cfg["sweep"] is not None:
        S_grid = _grid(cfg["sweep"], "sweep")
        if S_grid[0] < 0 or S_grid[-1] > 1:
            raise ConfigError("sweep amplitudes must lie in [0, 1]")
        table = sweep_quasi_energies(basis, dr["w"], S_grid, size, dr["phi0"], s.ode_tol, s.qspec)
        write_csv(out / "sweep.csv", "floquet", cfg, ["S", "level_id", "epsilon"], table.rows())
        payload["sweep_gap_minimum"] = table.gap_minimum()
        files.append("sweep.csv")
    st = cfg["stroboscopic"]
    if st is not None:
        pk = dict({"R": 0.75, "xi0": None}, **st.get("packet", {}))
        wells = classify_wells(s.params, s.halfwidth)
        xi0 = pk["xi0"] if pk["xi0"] is not None else wells.minima[-1][0]
        xg = _grid(st.get("grid", {"start": -5.0, "stop": 5.0, "num": 201}), "stroboscopic")
        n_periods = st.get("n_periods", 43)
        if n_periods < 1:
            raise ConfigError("stroboscopic n_periods must be at least 1")
        with _as_config():
            packet = PacketConfig(pk["R"], xi0)
        sr = stroboscopic_evolution(packet, basis, drive, n_periods, xg, size,
                                    s.ode_tol, s.qspec)
        regions = wells.regions(basis.halfwidth)
        probs = [sr.probability(r, s.qspec) for r in regions]
        names = ["P_" + n for n in _region_names(len(regions))]
        rows = ((n, t, *(p[n] for p in probs)) for n, t in enumerate(sr.taus))
        write_csv(out / "stroboscopic.csv", "floquet", cfg, ["period", "tau"] + names, rows)
        rows = ((x, t, sr.density[n, i]) for i, x in enumerate(xg) for n, t in enumerate(sr.taus))
        write_csv(out / "stroboscopic_density.csv", "floquet", cfg, ["xi", "tau", "abs_phi"], rows)
        payload["stroboscopic_max"] = dict(zip(names, (p.max() for p in probs)))
        files += ["stroboscopic.csv", "stroboscopic_density.csv"]
    write_json(out / "floquet.json", "floquet", cfg, payload)
    return files


COMMAND_FUNCS = {"potential": cmd_potential, "spectrum": cmd_spectrum, "evolve": cmd_evolve,
                 "perturb": cmd_perturb, "floquet": cmd_floquet}


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None


def run(command, config=None, preset=None, out=None):
    """Resolve, dispatch and write; returns the list of files written.

    Raises ConfigError for configuration problems and IsowellError for
    numerical failures.
    """
    cfg = resolve_config(command, config, preset)
    out = Path(out or cfg["output_path"] or ".")
    out.mkdir(parents=True, exist_ok=True)
    return COMMAND_FUNCS[command](cfg, out)


def _parser():
    p = argparse.ArgumentParser(prog="isowell", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"isowell {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory (default: config output_path or .)")
    p.add_argument("--preset", help=f"named preset: {', '.join(sorted(PRESETS))}")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.config is None and args.preset is None:
        print("isowell: error: give --config, --preset or both", file=sys.stderr)
        return EXIT_CONFIG
    threads = os.environ.get("ISOWELL_THREADS")
    try:
        limit = int(threads) if threads else None
        if limit is not None and limit < 1:
            raise ValueError
    except ValueError:
        print(f"isowell: error: ISOWELL_THREADS must be a positive integer, got {threads!r}",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        user = _load_json(args.config) if args.config else None
        with threadpool_limits(limits=limit), warnings.catch_warnings():
            warnings.simplefilter("default")
            files = run(args.command, user, args.preset, args.out)
    except ConfigError as exc:
        print(f"isowell: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IsowellError as exc:
        print(f"isowell: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
