"""Command line entry point: validate | connect | fredholm | parametrix | sweep.

Exit codes: 0 success, 2 configuration or structure rejection, 3 numerical
divergence, 4 a result outside its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .asympt import EPS_MAX, predict_entry
from .config import RunConfig, load_config, parse_grid
from .errors import (ConfigError, DomainError, NCPIIError, StiffnessError, StructureError)
from .fredholm import build_system
from .pii import integrate_coupling, integrate_matrix, trace_integral
from .structure import HM, RayConfig, validate_coupling

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_TOLERANCE = 4

HM_CERTIFIED_S = -4.0      # product-one entries are compared only for S >= this
HM_THRESHOLD = 0.03
OSC_SCALE = 0.4            # oscillatory threshold is OSC_SCALE / |S|
FREDHOLM_THRESHOLD = 1e-6
HM_TOL = 1e-12             # separatrix orbits amplify integration error

CONNECT_COLUMNS = ["S", "k", "l", "regime", "traj_re", "traj_im", "pred_re", "pred_im",
                   "envelope", "deviation", "threshold", "status"]
FREDHOLM_COLUMNS = ["s", "det_re", "det_im", "pii_re", "pii_im", "residual", "threshold",
                    "status"]

_REGIME_LABEL = {"HM": "HM", "ZeroProduct": "ZeroProduct", "AblowitzSegur": "AblowitzSegur"}


def fmt(x) -> str:
    """17 significant digits, so that output is byte-stable."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _write_csv(columns, rows, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    _emit(buf.getvalue(), out)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj, out):
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


# validate

def structure_report(cfg: RunConfig) -> dict:
    c = validate_coupling(cfg.C)
    nus = {}
    for j in sorted(c.J2):
        nu = c.nu(j)
        nus[str(j + 1)] = [nu.real, nu.imag]
    return {
        "version": __version__,
        "config": cfg.echo(),
        "cycles": [[i + 1 for i in orb] for orb in c.orbits()],
        "sigma": [s + 1 for s in c.sigma],
        "I": sorted(i + 1 for i in c.I),
        "J1": sorted(i + 1 for i in c.J1),
        "J2": sorted(i + 1 for i in c.J2),
        "nu": nus,
    }


def cmd_validate(cfg: RunConfig, args) -> int:
    checked_coupling(cfg)
    rep = structure_report(cfg)
    _json(rep, args.out)
    return EXIT_OK


# connect / sweep

def _threshold(regime, S):
    return HM_THRESHOLD if regime == "HM" else OSC_SCALE / abs(S)


def _entries(coupling):
    """Populated pattern entries (k, sigma(k)), 0-based."""
    return [(k, coupling.sigma[k]) for k in range(coupling.n)]


def connect_rows_at(coupling, eps, S, B, reliable):
    """Rows for one grid point given the trajectory matrix B at t = S.

    ``reliable`` is the n x n array of last trustworthy t per entry.
    """
    ray = RayConfig(S, eps)
    rows = []
    for k, l in _entries(coupling):
        is_hm = coupling.regime[k] == HM and coupling.C[k, l] != 0
        if is_hm and S < HM_CERTIFIED_S:
            continue
        pr = predict_entry(k, l, ray, coupling)
        if pr is None:
            regime, pred, env = "ZeroProduct", 0j, 0.0
        else:
            regime, pred, env = _REGIME_LABEL[pr.regime], -pr.value, pr.envelope
        thr = _threshold(regime, S)
        row = {"S": S, "k": k + 1, "l": l + 1, "regime": regime, "pred_re": pred.real,
               "pred_im": pred.imag, "envelope": env, "threshold": thr}
        if S < reliable[k, l] - 1e-12 * max(1.0, abs(S)):
            row.update(traj_re=math.nan, traj_im=math.nan, deviation=math.nan,
                       status="diverged")
            rows.append(row)
            continue
        v = complex(B[k, l])
        diff = abs(v - pred)
        if regime == "HM":
            dev = diff / abs(pred)
        elif env > 0:
            dev = diff / env
        else:
            dev = 0.0 if diff == 0 else math.inf
        row.update(traj_re=v.real, traj_im=v.imag, deviation=dev,
                   status="ok" if dev <= thr else "fail")
        rows.append(row)
    return rows


def _check_grid(grid):
    if not grid:
        raise ConfigError("no S grid: set s_grid in the config or pass --s-grid")
    for S in grid:
        if not S < 0:
            raise ConfigError(f"S = {S} must be negative for the connection check",
                              line=None)


def connect_point(C, eps, S, tol, t0):
    """Integrate along the ray through S(1 + eps) and tabulate one grid point."""
    coupling = validate_coupling(C)
    delta = np.asarray(eps, dtype=float) * S
    tr = integrate_coupling(coupling, S, tol, delta=delta, t0=t0)
    B, _ = tr(S)
    return connect_rows_at(coupling, eps, S, B, tr.last_reliable())


def connect_grid(C, eps, grid, tol, t0, jobs=1):
    grid = sorted(grid, reverse=True)
    if not any(eps):
        # one integration serves the whole grid when the offsets vanish
        coupling = validate_coupling(C)
        tr = integrate_coupling(coupling, min(grid), tol, t0=t0)
        reliable = tr.last_reliable()
        rows = []
        for S in grid:
            B, _ = tr(S)
            rows.extend(connect_rows_at(coupling, eps, S, B, reliable))
        return rows
    return sweep_grid(C, eps, grid, tol, t0, jobs)


def sweep_grid(C, eps, grid, tol, t0, jobs=1):
    """One independent integration per grid point, spread over ``jobs`` workers."""
    grid = sorted(grid, reverse=True)
    C = np.asarray(C)
    if jobs <= 1:
        parts = [connect_point(C, eps, S, tol, t0) for S in grid]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(connect_point, C, eps, S, tol, t0) for S in grid]
            parts = [f.result() for f in futs]
    rows = [r for part in parts for r in part]
    rows.sort(key=lambda r: (-r["S"], r["k"], r["l"]))
    return rows


def _connect_exit(rows):
    if any(r["status"] == "diverged" for r in rows):
        return EXIT_DIVERGED
    if any(r["status"] == "fail" for r in rows):
        return EXIT_TOLERANCE
    return EXIT_OK


def checked_coupling(cfg: RunConfig):
    """validate_coupling with the diagnostic anchored at the first pair line."""
    try:
        return validate_coupling(cfg.C)
    except StructureError as exc:
        raise ConfigError(f"coupling rejected: {exc}", line=cfg.lines.get("pair", 1))


def _ray_inputs(cfg, args):
    checked_coupling(cfg)
    eps = cfg.eps_or_zero()
    line = cfg.lines.get("eps")
    try:
        RayConfig(-1.0, eps)
    except StructureError as exc:
        raise ConfigError(str(exc), line=line)
    if any(abs(e) > EPS_MAX for e in eps):
        raise ConfigError(f"offsets must satisfy |eps| <= {EPS_MAX}", line=line)
    grid = parse_grid(args.s_grid) if args.s_grid else cfg.s_grid
    _check_grid(grid)
    tol = args.tol if args.tol is not None else cfg.tol
    t0 = args.t0 if args.t0 is not None else cfg.t0
    return eps, grid, effective_tol(cfg.C, tol), t0


def effective_tol(C, tol):
    """tol, tightened to HM_TOL when some orbit has product one."""
    if validate_coupling(C).I and tol > HM_TOL:
        print(f"note: product-one orbit present, integrating at tol = {HM_TOL:g}",
              file=sys.stderr)
        return HM_TOL
    return tol


def cmd_connect(cfg: RunConfig, args) -> int:
    eps, grid, tol, t0 = _ray_inputs(cfg, args)
    rows = connect_grid(cfg.C, eps, grid, tol, t0, args.jobs)
    _write_csv(CONNECT_COLUMNS, rows, args.out)
    return _connect_exit(rows)


def cmd_sweep(cfg: RunConfig, args) -> int:
    eps, grid, tol, t0 = _ray_inputs(cfg, args)
    rows = sweep_grid(cfg.C, eps, grid, tol, t0, args.jobs)
    _write_csv(CONNECT_COLUMNS, rows, args.out)
    return _connect_exit(rows)


# fredholm

def fredholm_rows(C, delta, grid, tol, m, t0=None):
    C = np.asarray(C, dtype=complex)
    delta = np.asarray(delta, dtype=float)
    tr = integrate_matrix(C, min(grid), tol, delta=delta, t0=t0)
    rows = []
    for s in sorted(grid):
        sy = build_system(s, C, m, delta=delta)
        det = sy.det_minus_square()
        row = {"s": s, "det_re": det.real, "det_im": det.imag,
               "threshold": FREDHOLM_THRESHOLD}
        if tr.diverged and s < tr.last_reliable_t:
            row.update(pii_re=math.nan, pii_im=math.nan, residual=math.nan,
                       status="diverged")
        else:
            rhs = complex(np.exp(trace_integral(tr, s)))
            res = abs(det - rhs)
            row.update(pii_re=rhs.real, pii_im=rhs.imag, residual=res,
                       status="ok" if res < FREDHOLM_THRESHOLD else "fail")
        rows.append(row)
    return rows


def cmd_fredholm(cfg: RunConfig, args) -> int:
    grid = parse_grid(args.s_grid) if args.s_grid else cfg.s_grid
    if not grid:
        raise ConfigError("no s grid: set s_grid in the config or pass --s-grid")
    tol = args.tol if args.tol is not None else cfg.tol
    m = args.nodes if args.nodes is not None else cfg.nodes
    if m < 20:
        raise ConfigError(f"nodes = {m} is below the minimum of 20")
    t0 = args.t0 if args.t0 is not None else cfg.t0
    rows = fredholm_rows(cfg.C, cfg.delta_or_zero(), grid, tol, m, t0)
    _write_csv(FREDHOLM_COLUMNS, rows, args.out)
    if any(r["status"] == "diverged" for r in rows):
        return EXIT_DIVERGED
    return EXIT_TOLERANCE if any(r["status"] == "fail" for r in rows) else EXIT_OK


# parametrix

AIRY_LIMITS = {"jump": 1e-8, "det": 1e-10, "exponent": -1.5, "exponent_slack": 0.1}
PC_LIMITS = {"identity": 1e-12, "cyclic": 1e-10, "coefficient": 1e-3, "jump": 1e-8,
             "det": 1e-10, "exponent": -2.0, "exponent_slack": 0.2}


def parametrix_report(which, nu=0j) -> tuple[dict, bool]:
    from .parametrix import airy_report, pc_report
    if which == "airy":
        rep = airy_report()
        lim = AIRY_LIMITS
        ok = (max(rep["jump_residuals"].values()) < lim["jump"]
              and rep["det_error"] < lim["det"]
              and all(abs(s - lim["exponent"]) <= lim["exponent_slack"]
                      for s in rep["decay_exponents"].values()))
    else:
        rep = pc_report(nu)
        lim = PC_LIMITS
        # the remainder must decay at least like z^-2 (faster when its
        # leading coefficient vanishes, as it does at nu = 0)
        ok = (rep["identity_error"] < lim["identity"]
              and rep["cyclic_error"] < lim["cyclic"]
              and rep["first_coefficient_error"] < lim["coefficient"]
              and max(rep["jump_residuals"].values()) < lim["jump"]
              and rep["det_error"] < lim["det"]
              and all(s <= lim["exponent"] + lim["exponent_slack"]
                      for s in rep["decay_exponents"].values()))
    rep["limits"] = lim
    rep["passed"] = bool(ok)
    return rep, ok


def _parse_nu(text):
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"--nu expects 're' or 're,im', got {text!r}")
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise ConfigError(f"--nu expects 're' or 're,im', got {text!r}")


def cmd_parametrix(args) -> int:
    nu = _parse_nu(args.nu) if args.nu else 0j
    rep, ok = parametrix_report(args.which, nu)
    rep["version"] = __version__
    rep["config"] = {"which": args.which, "nu": [nu.real, nu.imag]}
    _json(rep, args.out)
    return EXIT_OK if ok else EXIT_TOLERANCE


# entry point

def build_parser():
    p = argparse.ArgumentParser(prog="ncpii", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="run configuration file")
        sp.add_argument("--out", help="output file (default: stdout)")
        return sp

    common(sub.add_parser("validate", help="report the structure of the coupling"))
    for name, text in (("connect", "compare trajectories with the closed-form asymptotics"),
                       ("sweep", "like connect, one integration per grid point")):
        sp = common(sub.add_parser(name, help=text))
        sp.add_argument("--tol", type=float)
        sp.add_argument("--t0", type=float)
        sp.add_argument("--s-grid", dest="s_grid")
        sp.add_argument("--jobs", type=int, default=1)
    sp = common(sub.add_parser("fredholm", help="determinant identity residuals"))
    sp.add_argument("--tol", type=float)
    sp.add_argument("--t0", type=float)
    sp.add_argument("--nodes", type=int)
    sp.add_argument("--s-grid", dest="s_grid")
    sp = common(sub.add_parser("parametrix", help="model problem residual report"),
                config_required=False)
    sp.add_argument("--which", choices=["airy", "pc"], default="airy")
    sp.add_argument("--nu", help="order for the pc check, 're' or 're,im'")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "parametrix":
            return cmd_parametrix(args)
        cfg = load_config(args.config)
        if getattr(args, "jobs", 1) < 1:
            raise ConfigError("--jobs must be at least 1")
        handler = {"validate": cmd_validate, "connect": cmd_connect,
                   "sweep": cmd_sweep, "fredholm": cmd_fredholm}[args.command]
        return handler(cfg, args)
    except (ConfigError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StiffnessError, DomainError) as exc:
        # a failed solve or an evaluation outside the certified domain
        code = EXIT_DIVERGED if isinstance(exc, StiffnessError) else EXIT_CONFIG
        print(f"error: {exc}", file=sys.stderr)
        return code
    except NCPIIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
