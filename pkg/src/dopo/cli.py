"""Command line front end.

Subcommands ``steady``, ``sweep``, ``compare``, ``dynamics`` and ``wigner``
share one set of flags; an INI file given with ``--config`` supplies
defaults (section ``[dopo]``, keys spelled like the long flags) and flags
win.  Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 truncation failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from importlib import metadata

import numpy as np

from .errors import (ConfigError, DopoError, IllPosedFrameError, SolverError, TruncationError,
                     UndefinedG2Error)
from .params import DopoParams

log = logging.getLogger(__name__)

METHODS = ("full", "cmop", "meanfield", "adiabatic", "std-lin", "gsa-full", "gsa-cmop")
DYNAMIC_METHODS = ("full", "cmop", "meanfield", "adiabatic", "gsa-full", "gsa-cmop")
MODES = ("steady", "dynamics", "sweep", "wigner", "compare")
FULL_CAP = 250_000  # (dim_p * dim_s)^2 above this needs --allow-large
DEFAULT_DIMS = {"dp": 8, "ds": 30}

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_TRUNCATION = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    """Validated run description."""

    mode: str
    params: DopoParams
    methods: tuple
    sigmas: tuple
    dim_p: int = DEFAULT_DIMS["dp"]
    dim_s: int = DEFAULT_DIMS["ds"]
    auto_trunc: float = None
    out: str = None
    fmt: str = "csv"
    jobs: int = 1
    tmax: float = 40.0
    nt: int = 81
    points: int = 201
    extent: float = None
    backend: str = "moments"
    seed_from: str = None
    allow_large: bool = False
    tolerances: dict = field(default_factory=dict)


# --- parsing ----------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="dopo", description="DOPO steady states, dynamics and "
                                     "Wigner functions by several methods.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="INI file with defaults (section [dopo])")
        p.add_argument("--gamma-s", type=float)
        p.add_argument("--gamma-p", type=float)
        p.add_argument("--chi", type=float)
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--sigma", help="value, comma list or start:step:stop")
        grp.add_argument("--eps-p", type=float)
        p.add_argument("--ds", type=int, help="signal truncation")
        p.add_argument("--dp", type=int, help="pump truncation (full model, matrix backend)")
        p.add_argument("--auto-trunc", type=float, metavar="TOL",
                       help="grow truncations until observables change by < TOL")
        p.add_argument("--method", "--methods", dest="methods", help="comma separated")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json", "bin"))
        p.add_argument("--jobs", type=int)
        p.add_argument("--seed-from", help="previous JSON/CSV output used as warm start")
        p.add_argument("--allow-large", action="store_true", default=None,
                       help="lift the full-model size cap")
        p.add_argument("--backend", choices=("moments", "matrix"))
        p.add_argument("--tmax", type=float)
        p.add_argument("--nt", type=int)
        p.add_argument("--points", type=int)
        p.add_argument("--extent", type=float)
        p.add_argument("--tol-steady", type=float)
        p.add_argument("--tol-rtol", type=float)
        p.add_argument("--tol-atol", type=float)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


_KEYS = ("gamma_s", "gamma_p", "chi", "sigma", "eps_p", "ds", "dp", "auto_trunc", "methods",
         "out", "fmt", "jobs", "seed_from", "allow_large", "backend", "tmax", "nt", "points",
         "extent", "tol_steady", "tol_rtol", "tol_atol")


def _read_ini(path):
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ConfigError(f"cannot read config file {path}")
    section = cp["dopo"] if cp.has_section("dopo") else cp.defaults()
    out = {}
    for key, value in section.items():
        k = key.replace("-", "_")
        if k in ("method", "format"):
            k = {"method": "methods", "format": "fmt"}[k]
        if k not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        out[k] = value
    return out


def parse_sigmas(text):
    """``"1"``, ``"0.5,1,2"`` or ``"0:0.1:3"`` (inclusive stop)."""
    text = str(text).strip()
    try:
        if ":" in text:
            start, step, stop = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ConfigError(f"bad sigma range {text!r}")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + i * step, 12) for i in range(n))
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad sigma value {text!r}") from exc


def _coerce(raw, key, typ):
    value = raw.get(key)
    if value is None:
        return None
    try:
        if typ is bool:
            return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
        return typ(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {value!r}") from exc


def validate(raw):
    """Merge defaults, resolve sigma and eps_p and check limits.

    ``raw`` is a mapping with the keys of the command line flags
    (underscored).  Returns a :class:`RunConfig`; raises
    :class:`ConfigError` listing every problem found.
    """
    errors = []
    mode = raw.get("mode")
    if mode not in MODES:
        errors.append(f"mode must be one of {MODES}")
    gs = _coerce(raw, "gamma_s", float) or 1.0
    gp = _coerce(raw, "gamma_p", float) or 1.0
    chi = _coerce(raw, "chi", float)
    if chi is None:
        errors.append("--chi is required")
        chi = 1.0
    eps = _coerce(raw, "eps_p", float)
    sig_text = raw.get("sigma")
    sigmas = ()
    if sig_text is not None:
        try:
            sigmas = parse_sigmas(sig_text)
        except ConfigError as exc:
            errors.append(str(exc))
    if eps is not None and sigmas:
        implied = chi * eps / (gs * gp)
        if len(sigmas) != 1 or not math.isclose(implied, sigmas[0], rel_tol=1e-9, abs_tol=1e-12):
            errors.append(f"sigma {sig_text} contradicts eps_p={eps} (implies sigma={implied:g})")
    if eps is not None and not sigmas:
        sigmas = (chi * eps / (gs * gp),)
    if not sigmas:
        errors.append("one of --sigma or --eps-p is required")
    if any(s < 0 for s in sigmas):
        errors.append("sigma must be non-negative")
    methods_text = raw.get("methods")
    methods = ()
    if not methods_text:
        errors.append("missing method list (--method)")
    else:
        methods = tuple(m.strip() for m in str(methods_text).split(",") if m.strip())
        bad = [m for m in methods if m not in METHODS]
        if bad:
            errors.append(f"unknown methods {bad}; choose from {METHODS}")
        if len(set(methods)) != len(methods):
            errors.append("duplicate methods")
    if mode == "compare" and len(methods) < 2:
        errors.append("compare needs at least two methods")
    if mode in ("steady", "compare", "wigner", "dynamics") and len(sigmas) > 1:
        errors.append(f"{mode} takes a single sigma; use sweep for grids")
    if mode == "wigner" and len(methods) != 1:
        errors.append("wigner takes exactly one method")
    if mode == "dynamics":
        bad = [m for m in methods if m not in DYNAMIC_METHODS]
        if bad:
            errors.append(f"no dynamics for {bad}")
    dp = _coerce(raw, "dp", int) or DEFAULT_DIMS["dp"]
    ds = _coerce(raw, "ds", int) or DEFAULT_DIMS["ds"]
    if dp < 2 or ds < 2:
        errors.append("truncations must be at least 2")
    auto = _coerce(raw, "auto_trunc", float)
    if auto is not None and auto <= 0:
        errors.append("--auto-trunc must be positive")
    allow_large = bool(_coerce(raw, "allow_large", bool))
    if "full" in methods and not allow_large and (dp * ds) ** 2 > FULL_CAP:
        errors.append(
            f"full model at dp={dp}, ds={ds} has (dp*ds)^2 = {(dp * ds) ** 2:,} unknowns "
            f"(cap {FULL_CAP:,}); memory and time grow as (dp*ds)^2. Pass --allow-large to run it")
    fmt = raw.get("fmt") or "csv"
    if fmt == "bin" and mode != "wigner":
        errors.append("binary output is only available for wigner")
    jobs = _coerce(raw, "jobs", int) or (os.cpu_count() or 1)
    if jobs < 1:
        errors.append("--jobs must be >= 1")
    tol = {k: _coerce(raw, k, float) for k in ("tol_steady", "tol_rtol", "tol_atol")}
    if any(v is not None and v <= 0 for v in tol.values()):
        errors.append("tolerances must be positive")
    params = None
    if not errors:
        try:
            params = DopoParams.from_sigma(sigmas[0], chi, gs, gp)
        except DopoError as exc:
            errors.append(str(exc))
    if errors:
        raise ConfigError("; ".join(errors))
    return RunConfig(
        mode=mode, params=params, methods=methods, sigmas=sigmas, dim_p=dp, dim_s=ds,
        auto_trunc=auto, out=raw.get("out"), fmt=fmt, jobs=jobs,
        tmax=_coerce(raw, "tmax", float) or 40.0, nt=_coerce(raw, "nt", int) or 81,
        points=_coerce(raw, "points", int) or 201, extent=_coerce(raw, "extent", float),
        backend=raw.get("backend") or "moments", seed_from=raw.get("seed_from"),
        allow_large=allow_large, tolerances={k: v for k, v in tol.items() if v is not None},
    )


# --- method dispatch --------------------------------------------------------


def _cfg(config):
    from .liouville import EvolveConfig

    t = config.tolerances
    kw = {}
    if "tol_rtol" in t:
        kw["rtol"] = t["tol_rtol"]
    if "tol_atol" in t:
        kw["atol"] = t["tol_atol"]
    if "tol_steady" in t:
        kw["steady_residual"] = t["tol_steady"]
    return EvolveConfig(**kw)


def _safe_g2(fn):
    try:
        return float(fn())
    except UndefinedG2Error:
        return float("nan")


def _grow_until_stable(solve, start, tol, cap=600):
    """Grow ``ds`` by 25 % until photon number and g2 change by < tol."""
    ds = start
    prev = solve(ds)
    while True:
        nxt = max(ds + 2, int(math.ceil(ds * 1.25)))
        if nxt > cap:
            raise TruncationError(f"signal truncation did not converge below {cap}",
                                  "photon_number")
        cur = solve(nxt)
        ok = all(abs(cur[k] - prev[k]) <= tol * max(abs(prev[k]), 1e-12)
                 for k in ("photon_number", "g2") if np.isfinite(prev[k]))
        if ok:
            return cur
        ds, prev = nxt, cur


def _a2(rho):
    from . import fock

    a = fock.annihilation(rho.shape[0])
    return complex(fock.expect(a @ a, rho))


def _steady_cmop(params, config, ds, seed=None):
    from .cmop import cmop_steady

    r = cmop_steady(params, ds, seed=seed)
    st = r.state
    return {"photon_number": st.photon_number, "g2": _safe_g2(lambda: st.g2),
            "chi_alpha_p": r.chi_alpha_p, "min_eig": st.min_eigenvalue(), "dim_p": 0,
            "dim_s": ds, "n_p": float(st.pump.n_p), "m_p": float(np.real(st.pump.m_p)),
            "a_s2": _a2(st.rho_s).real, "top_population": st.top_population()}


def _steady_full(params, config, dims):
    from .full import full_steady

    dp, ds = dims
    model, rho, o = full_steady(params, dp, ds)
    from .full import reduced_states

    _, rho_s = reduced_states(model, rho)
    return {"photon_number": o.photon_number,
            "g2": o.g2 if np.isfinite(o.g2) else float("nan"),
            "chi_alpha_p": params.chi * float(np.real(o.alpha_p)),
            "min_eig": float(np.linalg.eigvalsh(rho_s)[0]), "dim_p": dp, "dim_s": ds,
            "top_population": max(o.top_pop_p, o.top_pop_s)}


def _steady_adiabatic(params, config, ds):
    from .cmop import adiabatic_steady
    from .observables import g2, photon_number

    rho = adiabatic_steady(params, ds)
    alpha_p = (params.eps_p - 0.5 * params.chi * _a2(rho).real) / params.gamma_p
    return {"photon_number": photon_number(rho), "g2": _safe_g2(lambda: g2(rho)),
            "chi_alpha_p": params.chi * float(alpha_p),
            "min_eig": float(np.linalg.eigvalsh(rho)[0]), "dim_p": 0, "dim_s": ds,
            "top_population": float(np.real(np.diag(rho)[-2:]).sum())}


def _gaussian_row(params, state, alpha_p):
    return {"photon_number": float(state.photon_number), "g2": _safe_g2(lambda: state.g2),
            "chi_alpha_p": params.chi * float(np.real(alpha_p)), "min_eig": float("nan"),
            "dim_p": 0, "dim_s": 0}


def steady_point(method, params, config, seed=None):
    """One steady-state row for ``method`` at ``params``."""
    if method == "meanfield":
        from .meanfield import meanfield_steady
        from .observables import GaussianMoments

        mf = meanfield_steady(params)
        return _gaussian_row(params, GaussianMoments(0j, mf.n_s, mf.m_s), mf.alpha_p)
    if method in ("std-lin", "gsa-full", "gsa-cmop"):
        from .gsa import gsa_cmop, gsa_full, headline_state, std_linearization

        solver = {"std-lin": std_linearization, "gsa-full": gsa_full, "gsa-cmop": gsa_cmop}[method]
        branches = solver(params)
        if branches and all(b.diverged for b in branches):
            return {"photon_number": float("inf"), "g2": float("nan"),
                    "chi_alpha_p": params.chi * float(np.real(branches[0].alpha_p)),
                    "min_eig": float("nan"), "dim_p": 0, "dim_s": 0, "branches": "diverged"}
        if not branches or not any(b.converged for b in branches):
            raise SolverError(f"{method}: no converged branch at sigma={params.sigma:g}")
        state = headline_state([b for b in branches if b.converged])
        alpha_p = next(b.alpha_p for b in branches if b.converged)
        row = _gaussian_row(params, state, alpha_p)
        row["branches"] = ",".join(b.branch for b in branches if b.converged)
        return row
    if method == "cmop":
        if config.auto_trunc:
            return _grow_until_stable(lambda d: _steady_cmop(params, config, d, seed),
                                      config.dim_s, config.auto_trunc)
        return _steady_cmop(params, config, config.dim_s, seed)
    if method == "adiabatic":
        if config.auto_trunc:
            return _grow_until_stable(lambda d: _steady_adiabatic(params, config, d),
                                      config.dim_s, config.auto_trunc)
        return _steady_adiabatic(params, config, config.dim_s)
    if method == "full":
        dims = (config.dim_p, config.dim_s)
        if config.auto_trunc:
            from .full import auto_truncate

            dims = auto_truncate(params, tol=config.auto_trunc)
            if (dims[0] * dims[1]) ** 2 > FULL_CAP and not config.allow_large:
                raise ConfigError(f"auto truncation needs full model at {dims}; "
                                  "pass --allow-large")
        return _steady_full(params, config, dims)
    raise ConfigError(f"unknown method {method}")


def _sweep_task(args):
    method, params, config, seed = args
    return steady_point(method, params, config, seed)


# --- warm start -------------------------------------------------------------


def load_seeds(path):
    """``{sigma: (n_p, m_p, a_s2)}`` from a previous cmop steady/sweep output."""
    with open(path) as fh:
        text = fh.read()
    rows = []
    if text.lstrip().startswith("{"):
        rows = json.loads(text)["rows"]
    else:
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        rows = list(csv.DictReader(lines))
    seeds = {}
    for r in rows:
        prefix = "" if r.get("method", "cmop") == "cmop" and "n_p" in r else "cmop_"
        try:
            seeds[float(r["sigma"])] = (float(r[prefix + "n_p"]), float(r[prefix + "m_p"]),
                                        float(r[prefix + "a_s2"]))
        except (KeyError, ValueError):
            continue
    return seeds


def _nearest_seed(seeds, sigma):
    if not seeds:
        return None
    key = min(seeds, key=lambda s: abs(s - sigma))
    return seeds[key]


# --- modes ------------------------------------------------------------------


def _reldiff(a, b):
    if not (np.isfinite(a) and np.isfinite(b)):
        return float("nan")
    return abs(a - b) / max(abs(b), 1e-300)


def _reference(methods):
    return "full" if "full" in methods else methods[0]


def run_steady(config, compare=False):
    seeds = load_seeds(config.seed_from) if config.seed_from else {}
    rows = []
    for m in config.methods:
        seed = _nearest_seed(seeds, config.params.sigma) if m == "cmop" else None
        row = {"method": m, "sigma": config.params.sigma}
        row.update(steady_point(m, config.params, config, seed))
        rows.append(row)
    if compare:
        ref = next(r for r in rows if r["method"] == _reference(config.methods))
        for r in rows:
            for k in ("photon_number", "g2", "chi_alpha_p"):
                r[f"reldiff_{k}"] = _reldiff(r[k], ref[k])
    return rows


def run_sweep(config):
    seeds = load_seeds(config.seed_from) if config.seed_from else {}
    tasks = []
    for s in config.sigmas:
        p = config.params.with_sigma(s)
        for m in config.methods:
            seed = _nearest_seed(seeds, s) if m == "cmop" else None
            tasks.append((m, p, config, seed))
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    rows = []
    k = 0
    ref = _reference(config.methods)
    for s in config.sigmas:
        row = {"sigma": s}
        per = {}
        for m in config.methods:
            per[m] = results[k]
            k += 1
            for key, val in per[m].items():
                row[f"{m}_{key}"] = val
        for m in config.methods:
            if m == ref:
                continue
            for key in ("photon_number", "g2", "chi_alpha_p"):
                row[f"reldiff_{m}_vs_{ref}_{key}"] = _reldiff(per[m][key], per[ref][key])
        rows.append(row)
    return rows


def _dynamics_series(method, params, config, t):
    cfg = _cfg(config)
    if method == "meanfield":
        from .meanfield import meanfield_dynamics, vacuum_state
        from .observables import GaussianMoments

        states = meanfield_dynamics(params, vacuum_state(), t, cfg)
        gm = [GaussianMoments(0j, s.n_s, s.m_s) for s in states]
        return [s.n_s for s in states], [_safe_g2(lambda g=g: g.g2) for g in gm]
    if method == "cmop":
        from .cmop import cmop_integrate

        tr = cmop_integrate(params, config.dim_s, t, cfg, backend=config.backend,
                            dim_p=config.dim_p)
        return ([s.photon_number for s in tr.states],
                [_safe_g2(lambda s=s: s.g2) for s in tr.states])
    if method in ("gsa-cmop", "gsa-full"):
        from .gsa import gsa_cmop_dynamics, gsa_full_dynamics

        fn = gsa_cmop_dynamics if method == "gsa-cmop" else gsa_full_dynamics
        snaps = fn(params, t, cfg)
        return ([b.photon_number for b in snaps],
                [_safe_g2(lambda b=b: b.g2) for b in snaps])
    if method == "full":
        from . import fock
        from .full import evolve_full
        from .observables import g2, photon_number

        states, _ = evolve_full(params, config.dim_p, config.dim_s, t, cfg)
        rs = [fock.partial_trace(r, (config.dim_p, config.dim_s), fock.SIGNAL) for r in states]
        return [photon_number(r) for r in rs], [_safe_g2(lambda r=r: g2(r)) for r in rs]
    if method == "adiabatic":
        from . import fock
        from .cmop import adiabatic_liouvillian
        from .liouville import evolve
        from .observables import g2, photon_number

        L = adiabatic_liouvillian(params, config.dim_s)
        rs = evolve(fock.fock_dm(config.dim_s, 0), L, t, cfg)
        return [photon_number(r) for r in rs], [_safe_g2(lambda r=r: g2(r)) for r in rs]
    raise ConfigError(f"no dynamics for {method}")


def run_dynamics(config):
    t = np.linspace(0.0, config.tmax, config.nt)
    cols = {}
    for m in config.methods:
        n, g = _dynamics_series(m, config.params, config, t)
        cols[f"{m}_photon_number"] = n
        cols[f"{m}_g2"] = g
    return [{"t": float(ti), **{k: float(v[i]) for k, v in cols.items()}}
            for i, ti in enumerate(t)]


def run_wigner(config):
    from .observables import default_grid, wigner_from_gaussian, wigner_from_rho

    method = config.methods[0]
    params = config.params
    if method in ("cmop", "full", "adiabatic"):
        if method == "cmop":
            from .cmop import cmop_steady

            rho = cmop_steady(params, config.dim_s).state.rho_s
        elif method == "adiabatic":
            from .cmop import adiabatic_steady

            rho = adiabatic_steady(params, config.dim_s)
        else:
            from .full import full_steady, reduced_states

            model, joint, _ = full_steady(params, config.dim_p, config.dim_s)
            rho = reduced_states(model, joint)[1]
        x, p = _grid(config, rho, default_grid)
        return wigner_from_rho(rho, x, p)
    if method == "meanfield":
        from .meanfield import meanfield_steady
        from .observables import GaussianMoments

        mf = meanfield_steady(params)
        state = GaussianMoments(0j, mf.n_s, mf.m_s)
    else:
        from .gsa import gsa_cmop, gsa_full, headline_state, std_linearization

        solver = {"std-lin": std_linearization, "gsa-full": gsa_full, "gsa-cmop": gsa_cmop}[method]
        state = headline_state([b for b in solver(params) if b.converged])
    x, p = _grid(config, state, default_grid)
    return wigner_from_gaussian(state, x, p)


def _grid(config, state, default_grid):
    if config.extent:
        axis = np.linspace(-config.extent, config.extent, config.points)
        return axis, axis
    return default_grid(state, config.points)


# --- output -----------------------------------------------------------------


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _metadata(config):
    meta = {"mode": config.mode, "methods": ",".join(config.methods)}
    meta.update({k: v for k, v in asdict(config.params).items()})
    meta["sigma"] = ",".join(f"{s:.12g}" for s in config.sigmas)
    if len(config.sigmas) > 1:
        # eps_p follows sigma row by row
        meta["eps_p"] = ",".join(f"{config.params.with_sigma(s).eps_p:.12g}" for s in config.sigmas)
    meta.update({"dim_p": config.dim_p, "dim_s": config.dim_s, "auto_trunc": config.auto_trunc,
                 "backend": config.backend, "tolerances": repr(asdict(_cfg(config))),
                 "version": _version()})
    if config.mode == "dynamics":
        meta.update({"tmax": config.tmax, "nt": config.nt})
    return meta


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def render(rows, config, wall_time):
    meta = _metadata(config)
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    if config.fmt == "json":
        return json.dumps({"metadata": meta, "run": {"timestamp": stamp, "wall_time_s": wall_time},
                           "rows": rows}, indent=1, default=_fmt) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    buf.write(f"# run: timestamp={stamp} wall_time_s={wall_time:.3f}\n")
    keys = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for r in rows:
        writer.writerow([_fmt(r.get(k, "")) for k in keys])
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(config):
    """Execute a validated configuration; returns the exit status."""
    t0 = time.perf_counter()
    try:
        if config.mode == "wigner":
            grid = run_wigner(config)
            if config.fmt == "bin":
                if not config.out:
                    raise ConfigError("binary Wigner output needs --out")
                grid.to_binary(config.out)
            elif config.fmt == "json":
                _emit(json.dumps({"metadata": _metadata(config), "x": grid.x.tolist(),
                                  "p": grid.p.tolist(), "W": grid.values.tolist()}) + "\n",
                      config.out)
            else:
                if config.out:
                    grid.to_csv(config.out)
                else:
                    buf = io.StringIO()
                    X, P = np.meshgrid(grid.x, grid.p, indexing="ij")
                    np.savetxt(buf, np.column_stack([X.ravel(), P.ravel(), grid.values.ravel()]),
                               delimiter=",", header="x,p,W", comments="", fmt="%.10g")
                    _emit(buf.getvalue(), None)
            return EXIT_OK
        if config.mode == "sweep":
            rows = run_sweep(config)
        elif config.mode == "dynamics":
            rows = run_dynamics(config)
        else:
            rows = run_steady(config, compare=config.mode == "compare")
    except ConfigError as exc:
        print(f"dopo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"dopo: truncation failure: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (SolverError, IllPosedFrameError) as exc:
        print(f"dopo: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(render(rows, config, time.perf_counter() - t0), config.out)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    raw = {}
    try:
        if args.config:
            raw.update(_read_ini(args.config))
        raw.update({k: v for k, v in vars(args).items() if v is not None and k in _KEYS})
        raw["mode"] = args.mode
        config = validate(raw)
    except ConfigError as exc:
        print(f"dopo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
