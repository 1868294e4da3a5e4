"""titchmarsh command line: JSON configs in, CSV/JSON artifacts out.

Config files are JSON objects with ``"schema": 1``; unknown fields are
errors.  Values are layered file < environment (``TITCHMARSH_GRID_J``,
``TITCHMARSH_TOL``, ``TITCHMARSH_T_MAX``, ``TITCHMARSH_OUT``) < flags.
"""

import copy
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import equivalence as eq
from . import functionals as fn
from . import modulus as mod
from . import spaces
from .errors import ConfigError, InapplicableError, TitchmarshError
from .profiles import profile_from_dict

SCHEMA_VERSION = 1
ENV_PREFIX = "TITCHMARSH_"
TOP_KEYS = {"schema", "recipe", "space", "profile", "modulus", "grid", "out"}
GRID_KEYS = {"t_max", "J", "cutoff", "tol"}
GRID_DEFAULTS = {"J": 20, "tol": 1e-11}

RECIPES = {
    "corollary-power": {
        "space": {"kind": "euclidean", "n": 3},
        "profile": {"spectral": "power", "alpha": 0.5, "cut": "hard"},
        "modulus": {"family": "power", "gamma": 0.5, "k": 2, "delta0": 1.0},
        "grid": {"t_max": 0.5, "J": 20, "tol": 1e-11},
    },
    "titchmarsh-n1": {
        "space": {"kind": "euclidean", "n": 1},
        "profile": {"spectral": "power", "alpha": 0.5, "cut": "hard"},
        "modulus": {"family": "power", "gamma": 0.5, "k": 2, "delta0": 1.0},
        "grid": {"t_max": 0.5, "J": 20, "tol": 1e-11},
    },
    "hyperbolic-h3": {
        "space": {"kind": "hyperbolic", "n": 3},
        "profile": {"spectral": "power", "alpha": 1.0, "cut": "hard"},
        "modulus": {"family": "power", "gamma": 1.0, "k": 2, "delta0": 1.0},
        "grid": {"t_max": 0.5, "J": 20, "tol": 1e-11},
    },
}

EXIT_CONFIG = 2
EXIT_LIBRARY = 3
EXIT_NOT_EQUIVALENT = 1


# -- config ----------------------------------------------------------------------

def _read_config(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    if "schema" not in data:
        raise ConfigError("schema: missing required field")
    if data["schema"] != SCHEMA_VERSION:
        raise ConfigError(f"schema: unsupported version {data['schema']!r}")
    extra = set(data) - TOP_KEYS
    if extra:
        raise ConfigError(f"{sorted(extra)[0]}: unknown field")
    return data


def _recipe(name):
    if name not in RECIPES:
        raise ConfigError(f"recipe: unknown recipe {name!r} (known: {', '.join(sorted(RECIPES))})")
    return copy.deepcopy(RECIPES[name])


def _env_overrides(environ):
    out = {}
    for key, field, conv in (("GRID_J", "J", int), ("TOL", "tol", float), ("T_MAX", "t_max", float)):
        raw = environ.get(ENV_PREFIX + key)
        if raw is not None:
            try:
                out[field] = conv(raw)
            except ValueError:
                raise ConfigError(f"{ENV_PREFIX}{key}: cannot parse {raw!r}") from None
    return out


def load_config(config_path=None, recipe=None, grid_J=None, tol=None, out=None, environ=None):
    """Merge recipe, file, environment and flags into one validated config."""
    environ = os.environ if environ is None else environ
    cfg = {}
    file_cfg = _read_config(config_path) if config_path else {}
    recipe = recipe or file_cfg.get("recipe")
    if recipe:
        cfg = _recipe(recipe)
        cfg["recipe"] = recipe
    for key, value in file_cfg.items():
        if key == "grid" and isinstance(value, dict):
            cfg.setdefault("grid", {}).update(value)
        elif key != "schema":
            cfg[key] = value
    grid = cfg.setdefault("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("grid: expected an object")
    extra = set(grid) - GRID_KEYS
    if extra:
        raise ConfigError(f"grid.{sorted(extra)[0]}: unknown field")
    grid.update(_env_overrides(environ))
    if ENV_PREFIX + "OUT" in environ:
        cfg["out"] = environ[ENV_PREFIX + "OUT"]
    if grid_J is not None:
        grid["J"] = grid_J
    if tol is not None:
        grid["tol"] = tol
    if out is not None:
        cfg["out"] = out
    for key, value in GRID_DEFAULTS.items():
        grid.setdefault(key, value)
    cfg.setdefault("out", "out")
    _validate_grid(grid)
    return cfg


def _validate_grid(grid):
    J = grid["J"]
    if not isinstance(J, int) or isinstance(J, bool) or not 8 <= J <= 40:
        raise ConfigError("grid.J: must be an integer in [8, 40]")
    for key in ("tol", "t_max", "cutoff"):
        if key in grid:
            v = grid[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"grid.{key}: must be a positive number")
    if "cutoff" in grid and "t_max" in grid:
        t_min = grid["t_max"] * 2.0 ** -J
        if grid["cutoff"] < 2.0 / t_min:
            raise ConfigError("grid.cutoff: must be at least 2 / t_min")


def _need(cfg, key):
    if key not in cfg:
        raise ConfigError(f"{key}: missing required field")
    return cfg[key]


def _space(cfg):
    return spaces.SpectralSpace.from_dict(_need(cfg, "space"))


def _modulus(cfg):
    return mod.Modulus.from_dict(_need(cfg, "modulus"))


def _t_max(cfg, m=None):
    if "t_max" in cfg["grid"]:
        return float(cfg["grid"]["t_max"])
    return m.delta0 / 2.0 if m is not None else 0.5


# -- output ----------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(eq._plain(obj), indent=2, sort_keys=True) + "\n"


def _write(out_dir, name, text):
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / name, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- commands --------------------------------------------------------------------

def run_modulus(cfg):
    m = _modulus(cfg)
    out = Path(cfg["out"])
    idx = mod.mo_indices(m)
    z0 = mod.zygmund_check(m, mod.ZygmundKind.Z0)
    zk = mod.zygmund_check(m, mod.ZygmundKind.ZK)
    mono = mod.check_monotonicity(m)
    try:
        tail = mod.tail_assumptions_check(m)
        tail_d = tail.to_dict()
    except TitchmarshError as exc:
        tail_d = {"holds": False, "error": f"{exc.code}: {exc}"}
    report = {
        "modulus": m.to_dict(),
        "mo_indices": idx.to_dict(),
        "zygmund": {
            "Z0": z0.to_dict(),
            "Zk": zk.to_dict(),
        },
        "bary_stechkin": z0.holds is True and zk.holds is True,
        "monotonicity": mono.to_dict(),
        "tail_assumptions": tail_d,
    }
    _write(out, "modulus_report.json", _json_text(report))
    t = np.asarray(z0.t_values)
    rows = zip(t, m(t), z0.ratios, zk.ratios)
    _write(out, "modulus_grid.csv", csv_text(["t", "omega", "z0_ratio", "zk_ratio"], rows))
    return report


def run_plancherel(cfg):
    space = _space(cfg)
    profile = profile_from_dict(space, _need(cfg, "profile"))
    if profile.physical is None:
        raise InapplicableError("plancherel needs a profile with a physical side")
    out = Path(cfg["out"])
    rep = spaces.plancherel_check(space, profile)
    cutoff = float(cfg["grid"].get("cutoff", rep.cutoff))
    T = spaces.truncation_radius(space, profile.physical, 1e-6)
    lam, w = spaces.gl_lambda_grid(cutoff, min(0.5, math.pi / (2.0 * T)))
    tr = spaces.spherical_transform(space, profile, lam)
    t = np.linspace(0.0, min(4.0, T), 41)
    back = spaces.inverse_transform(space, lam, tr.values, t, weights=w, tol=math.inf)
    f = profile.physical(t)
    rt_abs = float(np.max(np.abs(back - f)))
    report = {
        "space": space.to_dict(),
        "profile": profile.describe(),
        "plancherel_normalization": space.plancherel_normalization,
        "norm_physical": rep.physical,
        "norm_spectral": rep.spectral,
        "norm_rel_error": rep.rel_error,
        "norm_analytic": rep.analytic,
        "norm_analytic_rel_error": rep.rel_error_analytic,
        "cutoff": cutoff,
        "roundtrip_max_abs_error": rt_abs,
        "roundtrip_rel_error": rt_abs / float(np.max(np.abs(f))),
    }
    _write(out, "plancherel_report.json", _json_text(report))
    _write(out, "transform.csv", csv_text(["lambda", "value", "est_error"], tr.rows()))
    return report


def _curves(cfg, space, profile, grid):
    tol = float(cfg["grid"]["tol"])
    return fn.lipschitz_curve(space, profile, grid, tol), fn.tail_curve(space, profile, grid, tol)


def run_functionals(cfg):
    space = _space(cfg)
    profile = profile_from_dict(space, _need(cfg, "profile"))
    if profile.spectral is None:
        profile = spaces.with_numeric_spectrum(space, profile)
    m = _modulus(cfg) if "modulus" in cfg else None
    J = cfg["grid"]["J"]
    tol = float(cfg["grid"]["tol"])
    grid = fn.dyadic_grid(_t_max(cfg, m), J)
    out = Path(cfg["out"])
    L, T = _curves(cfg, space, profile, grid)
    W = fn.weighted_tail_curve(space, profile, grid, tol)
    _write(out, "lipschitz.csv", L.to_csv())
    _write(out, "tail.csv", T.to_csv())
    _write(out, "weighted_tail.csv", W.to_csv())
    records = []
    for t in grid:
        js = fn.j_split(space, profile, t, tol)
        ks = fn.k_split(space, profile, t, tol)
        ibp = fn.aux_ibp_check(space, profile, t, tol)
        records.append({"t": t, "J1": js.J1, "J2": js.J2, "K1": ks.K1, "K2": ks.K2,
                        "ibp_direct": ibp.direct, "ibp_by_parts": ibp.by_parts,
                        "ibp_rel_error": ibp.rel_error})
    diag = {"space": space.to_dict(), "profile": profile.describe(), "splits": records}
    if profile.physical is not None and not space.is_hyperbolic and space.n <= 3:
        P = fn.physical_lipschitz_curve(space, profile, grid)
        _write(out, "physical_lipschitz.csv", P.to_csv())
        diag["route_rel_error"] = float(np.max(np.abs(L.values - P.values) /
                                               np.maximum(P.values, 1e-300)))
    else:
        diag["route_rel_error"] = "not applicable"
    if m is not None:
        try:
            d = fn.dyadic_sum_check(m, _t_max(cfg, m), max(J, 8))
            diag["dyadic_sum"] = {"sum": d.sum, "bound_constant": d.bound_constant}
        except InapplicableError as exc:
            diag["dyadic_sum"] = f"not applicable: {exc}"
    _write(out, "diagnostics.json", _json_text(diag))
    return diag


def run_equivalence(cfg):
    space = _space(cfg)
    profile = profile_from_dict(space, _need(cfg, "profile"))
    if profile.spectral is None:
        profile = spaces.with_numeric_spectrum(space, profile)
    m = _modulus(cfg)
    J = cfg["grid"]["J"]
    rep = eq.equivalence_report(space, profile, m, J, _t_max(cfg, m),
                                rtol=float(cfg["grid"]["tol"]))
    out = Path(cfg["out"])
    _write(out, "equivalence_report.json", rep.to_json())
    _write(out, "lipschitz.csv", rep.direction_backward.curve.to_csv())
    _write(out, "tail.csv", rep.direction_forward.curve.to_csv())
    _write(out, "summary.csv", rep.summary_csv())
    _write(out, "summary.txt", summary_text(rep))
    return rep


def summary_text(rep):
    fe = rep.fitted_exponents
    lines = [
        f"verdict: {rep.verdict.value}",
        f"forward  sup T/(w^2 t^(n-1)) = {rep.direction_forward.ratio_sup:.10g}"
        f" (refined {rep.direction_forward.ratio_sup_refined:.10g}, stable={rep.direction_forward.stable})",
        f"backward sup L/w             = {rep.direction_backward.ratio_sup:.10g}"
        f" (refined {rep.direction_backward.ratio_sup_refined:.10g}, stable={rep.direction_backward.stable})",
        f"L slope {fe.L.slope:.6f} +- {fe.L.half_width:.2g}; T slope {fe.T.slope:.6f} +- {fe.T.half_width:.2g}",
        f"hypotheses passed: {rep.hypothesis_audit.passed}",
    ]
    lines += [f"note: {n}" for n in rep.notes]
    return "\n".join(lines) + "\n"


# -- click wiring ----------------------------------------------------------------

def _common(f):
    f = click.option("--tol", type=float, default=None, help="Quadrature relative tolerance.")(f)
    f = click.option("--grid-J", "grid_J", type=int, default=None,
                     help="Dyadic grid depth J (t_j = t_max 2^-j, j = 0..J).")(f)
    f = click.option("--recipe", type=click.Choice(sorted(RECIPES)), default=None,
                     help="Named experiment with pinned defaults.")(f)
    f = click.option("--out", type=click.Path(file_okay=False), default=None,
                     help="Output directory (default: out).")(f)
    f = click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                     help="JSON config file.")(f)
    return f


def _run(action, config_path, recipe, grid_J, tol, out):
    try:
        cfg = load_config(config_path, recipe, grid_J, tol, out)
        return action(cfg)
    except ConfigError as exc:
        click.echo(f"error[{exc.code}]: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except TitchmarshError as exc:
        click.echo(f"error[{exc.code}]: {exc}", err=True)
        sys.exit(EXIT_LIBRARY)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Moduli of continuity, spherical transforms and Lipschitz/Fourier-tail equivalence.

    Exit status: 0 success, 1 equivalence verdict other than
    EquivalentWithinConstants, 2 configuration error, 3 library error.
    Errors print one line "error[<code>]: <message>" on stderr.
    """


@main.command("modulus")
@_common
def modulus_cmd(config_path, recipe, grid_J, tol, out):
    """Indices, Zygmund verdicts and Bary-Stechkin flag of a modulus.

    \b
    Writes modulus_report.json and modulus_grid.csv
    (columns: t, omega, z0_ratio, zk_ratio).
    """
    rep = _run(run_modulus, config_path, recipe, grid_J, tol, out)
    click.echo(f"bary_stechkin={_fmt(rep['bary_stechkin'])} "
               f"m={rep['mo_indices']['m_lower']:.6g} M={rep['mo_indices']['M_upper']:.6g}")


@main.command("plancherel")
@_common
def plancherel_cmd(config_path, recipe, grid_J, tol, out):
    """Norm equality and inversion round trip for a physical profile.

    \b
    Writes plancherel_report.json and transform.csv
    (columns: lambda, value, est_error).
    """
    rep = _run(run_plancherel, config_path, recipe, grid_J, tol, out)
    click.echo(f"norm_rel_error={rep['norm_rel_error']:.3g} "
               f"roundtrip_rel_error={rep['roundtrip_rel_error']:.3g}")


@main.command("functionals")
@_common
def functionals_cmd(config_path, recipe, grid_J, tol, out):
    """L(t), T(t), the weighted tail and the proof diagnostics on the dyadic grid.

    \b
    Writes lipschitz.csv, tail.csv, weighted_tail.csv
    (columns: j, t, value, est_error, kind), physical_lipschitz.csv when a
    physical route exists, and diagnostics.json.
    """
    diag = _run(run_functionals, config_path, recipe, grid_J, tol, out)
    click.echo(f"route_rel_error={_fmt(diag['route_rel_error'])}")


@main.command("equivalence")
@_common
def equivalence_cmd(config_path, recipe, grid_J, tol, out):
    """Forward and backward checks, hypothesis audit, exponent fits and verdict.

    \b
    Writes equivalence_report.json, lipschitz.csv and tail.csv
    (columns: j, t, value, est_error, kind), summary.csv (verdict,
    forward_ratio_sup, backward_ratio_sup, L_slope, L_half_width, T_slope,
    T_half_width) and summary.txt.
    """
    rep = _run(run_equivalence, config_path, recipe, grid_J, tol, out)
    click.echo(summary_text(rep), nl=False)
    if rep.verdict is not eq.Verdict.EQUIVALENT:
        sys.exit(EXIT_NOT_EQUIVALENT)


if __name__ == "__main__":
    main()
