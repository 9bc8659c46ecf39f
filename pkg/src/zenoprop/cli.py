"""Command-line surface: reproducible CSV/JSON tables for every experiment.

Subcommands: ``fv`` (absorbing envelope), ``fp`` (model + numeric saw-tooth
envelopes and their oscillation ratio), ``exact`` (closed-form boundary
values and chain-integral identities), ``lattice`` (walk refinement sweep),
``pdx`` (wave-packet perturbation scan), ``compare`` (peak/trough summary).

Output is deterministic for a fixed configuration: floats are written with
17 significant digits, comma separated, LF line endings.  Exit codes:
0 success, 2 usage error, 3 numerical failure.  Every flag can also be set
through a ``ZENOPROP_<SUBCOMMAND>_<FLAG>`` environment variable, and a JSON
config file supplies values at lower precedence than flags.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import exact, lattice, recursion, sawtooth, wavepacket
from .core import NumericalFailure

CONTEXT_SETTINGS = {"auto_envvar_prefix": "ZENOPROP", "help_option_names": ["-h", "--help"]}


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def _write_table(path: str, fmt: str, command: str, params: dict, columns, rows) -> None:
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        payload = "\n".join(lines) + "\n"
    else:
        doc = {
            "meta": {"command": command, "params": params},
            "columns": list(columns),
            "rows": [[v if isinstance(v, str) else float(v) for v in row] for row in rows],
        }
        payload = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(payload)
    except OSError as err:
        raise click.UsageError(f"cannot write {path}: {err}") from err


def _load_config(ctx: click.Context, config_path: str | None) -> None:
    """Apply config-file values beneath flag/env values (flags win)."""
    if not config_path:
        return
    try:
        with open(config_path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise click.UsageError(f"cannot read config file {config_path}: {err}")
    if not isinstance(data, dict):
        raise click.UsageError("config file must hold a JSON object")
    from click.core import ParameterSource

    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in ctx.params:
            raise click.UsageError(f"unknown config key {key!r}")
        source = ctx.get_parameter_source(name)
        if source in (ParameterSource.DEFAULT, ParameterSource.DEFAULT_MAP):
            ctx.params[name] = value


def _numerical_guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (NumericalFailure, FloatingPointError) as err:
        click.echo(f"numerical failure: {err}", err=True)
        sys.exit(3)


common_options = [
    click.option("--m", type=float, default=1.0, show_default=True, help="Particle mass."),
    click.option("--eps", type=float, default=1.0, show_default=True, help="Projection spacing."),
    click.option("--v0", type=float, default=None, help="Absorption strength (default 4/(3 eps))."),
    click.option("--out", required=True, type=click.Path(dir_okay=False, writable=False),
                 help="Output file path."),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                 show_default=True, help="Output format."),
    click.option("--config", "config_path", type=click.Path(exists=False), default=None,
                 help="JSON config file (flags take precedence)."),
]


def _with_common(fn):
    for opt in reversed(common_options):
        fn = opt(fn)
    return fn


def _resolve_v0(v0: float | None, eps: float) -> float:
    if v0 is None:
        return sawtooth.calibrate_absorption(eps)
    if v0 <= 0:
        raise click.UsageError("--v0 must be positive")
    return v0


def _check_positive(**named) -> None:
    for name, value in named.items():
        if value is not None and value <= 0:
            raise click.UsageError(f"--{name.replace('_', '-')} must be positive")


@click.group(context_settings=CONTEXT_SETTINGS)
def main() -> None:
    """Boundary propagators for pulsed position measurements."""


@main.command()
@_with_common
@click.pass_context
def fv(ctx, m, eps, v0, out, fmt, config_path) -> None:
    """Absorbing-potential boundary envelope on a fine time grid."""
    _load_config(ctx, config_path)
    m, eps, v0 = ctx.params["m"], ctx.params["eps"], ctx.params["v0"]
    out, fmt = ctx.params["out"], ctx.params["fmt"]
    _check_positive(m=m, eps=eps)
    v0 = _resolve_v0(v0, eps)
    t = np.arange(1, 2101) * (0.01 * eps)
    vals = _numerical_guard(exact.absorbing_envelope, v0, t)
    rows = [(tt, vv) for tt, vv in zip(t, vals)]
    _write_table(out, fmt, "fv", {"m": m, "eps": eps, "v0": v0}, ["t", "f_v"], rows)


def _recursion_tables(m, eps, v0, n_max, grid_points, samples_per_interval):
    cfg = recursion.default_config(m=m, eps=eps, n_max=n_max,
                                   samples_per_interval=samples_per_interval)
    if grid_points is not None:
        if grid_points < 2:
            raise click.UsageError("--grid-points must be >= 2")
        grid = recursion.Grid1D(0.0, cfg.grid.x_max, grid_points)
        cfg = recursion.RecursionConfig(m, eps, n_max, grid, samples_per_interval)
    curve = recursion.run_recursion(cfg)
    schedule = sawtooth.ProjectionSchedule(eps0=eps, eps=eps, eps_n=eps, n=n_max)
    model = np.atleast_1d(sawtooth.sawtooth_envelope(schedule, curve.times))
    # model is right-continuous; report the peak branch on '-' rows
    minus = curve.sides == "-"
    if minus.any():
        k = np.rint((curve.times[minus] - eps) / eps).astype(int)
        model[minus] = [sawtooth.peak_value(int(kk)) for kk in k]
    fvv = exact.absorbing_envelope(v0, curve.times)
    s = sawtooth.oscillation_ratio(curve.values, fvv)
    return curve, model, fvv, s


@main.command()
@_with_common
@click.option("--n-max", type=int, default=20, show_default=True, help="Number of projections.")
@click.option("--grid-points", type=int, default=None, help="Override slice-grid size.")
@click.option("--samples-per-interval", type=int, default=16, show_default=True,
              help="Envelope samples per projection interval.")
@click.pass_context
def fp(ctx, m, eps, v0, out, fmt, config_path, n_max, grid_points, samples_per_interval) -> None:
    """Numeric + model saw-tooth envelopes with the oscillation ratio."""
    _load_config(ctx, config_path)
    p = ctx.params
    m, eps, v0, out, fmt = p["m"], p["eps"], p["v0"], p["out"], p["fmt"]
    n_max, grid_points = p["n_max"], p["grid_points"]
    samples_per_interval = p["samples_per_interval"]
    _check_positive(m=m, eps=eps)
    if n_max < 1:
        raise click.UsageError("--n-max must be >= 1")
    if samples_per_interval < 2:
        raise click.UsageError("--samples-per-interval must be >= 2")
    v0 = _resolve_v0(v0, eps)
    curve, model, fvv, s = _numerical_guard(
        _recursion_tables, m, eps, v0, n_max, grid_points, samples_per_interval
    )
    sides = ["minus" if sd == "-" else "plus" if sd == "+" else "" for sd in curve.sides]
    rows = [
        (t, fm, fn, fv_, sv, sd)
        for t, fm, fn, fv_, sv, sd in zip(curve.times, model, curve.values, fvv, s, sides)
    ]
    params = {
        "m": m, "eps": eps, "v0": v0, "n_max": n_max,
        "grid_points": grid_points or 0, "samples_per_interval": samples_per_interval,
    }
    _write_table(out, fmt, "fp", params,
                 ["t", "f_p_model", "f_p_numeric", "f_v", "s", "side"], rows)


@main.command(name="exact")
@_with_common
@click.pass_context
def exact_cmd(ctx, m, eps, v0, out, fmt, config_path) -> None:
    """Closed-form boundary values and chain-integral identities."""
    _load_config(ctx, config_path)
    p = ctx.params
    m, eps, v0, out, fmt = p["m"], p["eps"], p["v0"], p["out"], p["fmt"]
    _check_positive(m=m, eps=eps)
    v0 = _resolve_v0(v0, eps)

    def build():
        rows = [
            ("envelope_no_projection", exact.projected_envelope_exact(eps, 0.5 * eps, 0)),
            ("envelope_one_projection", exact.projected_envelope_exact(eps, 1.5 * eps, 1)),
            ("envelope_two_projection_peak", exact.projected_envelope_exact(eps, 3 * eps, 2)),
            ("envelope_three_projection", exact.projected_envelope_exact(eps, 4 * eps, 3)),
            ("chain_pp_equal", exact.chain_plus_plus(eps, eps, eps)),
            ("chain_pm_equal", exact.chain_plus_minus(eps, eps, eps)),
            ("chain_ppp_reconstructed", exact.reconstructed_triple_plus(eps)),
            ("time_averaged_one", exact.time_averaged_envelope(1, 3 * eps)),
            ("time_averaged_two", exact.time_averaged_envelope(2, 3 * eps)),
            ("absorbing_envelope_at_eps", exact.absorbing_envelope(v0, eps)),
        ]
        return rows

    rows = _numerical_guard(build)
    _write_table(out, fmt, "exact", {"m": m, "eps": eps, "v0": v0},
                 ["name", "value"], rows)


@main.command(name="lattice")
@_with_common
@click.option("--tau", type=float, default=4.0, show_default=True,
              help="Total walk duration (multiple of eps).")
@click.option("--levels", type=int, default=4, show_default=True,
              help="Number of refinement levels (quadrupling).")
@click.pass_context
def lattice_cmd(ctx, m, eps, v0, out, fmt, config_path, tau, levels) -> None:
    """Constrained-walk refinement sweep toward the continuum peak law."""
    _load_config(ctx, config_path)
    p = ctx.params
    m, eps, out, fmt = p["m"], p["eps"], p["out"], p["fmt"]
    tau, levels = p["tau"], p["levels"]
    _check_positive(m=m, eps=eps, tau=tau)
    if levels < 1:
        raise click.UsageError("--levels must be >= 1")
    level_list = tuple(4**j for j in range(1, levels + 1))

    def build():
        sweep = lattice.continuum_peak_estimate(tau, eps, m=m, levels=level_list)
        rows = [
            (float(r), e, eps / float(r), ratio)
            for r, e, ratio in zip(sweep.steps_per_projection, sweep.etas, sweep.ratios)
        ]
        rows.append((0.0, 0.0, 0.0, sweep.extrapolated))
        return rows

    rows = _numerical_guard(build)
    _write_table(out, fmt, "lattice", {"m": m, "eps": eps, "tau": tau, "levels": levels},
                 ["steps_per_projection", "eta", "dtau", "ratio"], rows)


@main.command()
@_with_common
@click.option("--p-sigma", type=float, default=10.0, show_default=True,
              help="Dimensionless packet momentum p*sigma.")
@click.pass_context
def pdx(ctx, m, eps, v0, out, fmt, config_path, p_sigma) -> None:
    """Wave-packet perturbation scan against the suppression predictor."""
    _load_config(ctx, config_path)
    p = ctx.params
    m, out, fmt, p_sigma = p["m"], p["out"], p["fmt"], p["p_sigma"]
    if p["v0"] is not None:
        raise click.UsageError("pdx calibrates v0 from each scan eps; --v0 is not accepted")
    _check_positive(m=m, p_sigma=p_sigma)
    sigma = 1.0
    mom = p_sigma / sigma
    wp = wavepacket.WavePacket(q=-10 * sigma, p=mom, sigma=sigma, m=m)
    energy = wp.energy
    tau = 1.8 * abs(wp.q) * wp.m / wp.p + 0.8 * wp.zeno_time
    scan = np.array([0.125, 0.2, 0.3, 0.4, 0.5, 0.7, 0.85, 1.0, 1.25])
    eps_values = scan / energy
    x_grid = np.linspace(0.05 * sigma, abs(wp.q) + wp.p * tau / wp.m + 6 * sigma, 400)

    def build():
        norms, _ = wavepacket.delta_norm_scan(wp, eps_values, tau, x_grid)
        rows = []
        for ev, ee, nn in zip(eps_values, scan, norms):
            rows.append((ev, ee, wavepacket.suppression_factor(wp, ev), nn))
        return rows

    rows = _numerical_guard(build)
    _write_table(out, fmt, "pdx", {"m": m, "p_sigma": p_sigma, "tau": tau},
                 ["eps", "E_eps", "predictor", "delta_norm"], rows)


@main.command()
@_with_common
@click.option("--n-max", type=int, default=20, show_default=True, help="Number of projections.")
@click.option("--grid-points", type=int, default=None, help="Override slice-grid size.")
@click.option("--samples-per-interval", type=int, default=16, show_default=True,
              help="Envelope samples per projection interval.")
@click.pass_context
def compare(ctx, m, eps, v0, out, fmt, config_path, n_max, grid_points, samples_per_interval) -> None:
    """Peak/trough summary: numeric recursion vs model vs absorbing envelope."""
    _load_config(ctx, config_path)
    p = ctx.params
    m, eps, v0, out, fmt = p["m"], p["eps"], p["v0"], p["out"], p["fmt"]
    n_max, grid_points = p["n_max"], p["grid_points"]
    samples_per_interval = p["samples_per_interval"]
    _check_positive(m=m, eps=eps)
    if n_max < 1:
        raise click.UsageError("--n-max must be >= 1")
    v0 = _resolve_v0(v0, eps)
    curve, _, _, _ = _numerical_guard(
        _recursion_tables, m, eps, v0, n_max, grid_points, samples_per_interval
    )

    rows = []
    for k in range(1, n_max + 1):
        t_k = (k + 1) * eps
        peak_n = curve.values[(np.isclose(curve.times, t_k)) & (curve.sides == "-")][0]
        trough_n = curve.values[(np.isclose(curve.times, k * eps)) & (curve.sides == "+")][0]
        fv_k = exact.absorbing_envelope(v0, t_k)
        rows.append(
            (float(k), t_k, peak_n, sawtooth.peak_value(k),
             trough_n, sawtooth.trough_value(k - 1), fv_k, peak_n / fv_k - 1.0)
        )
    params = {"m": m, "eps": eps, "v0": v0, "n_max": n_max,
              "grid_points": grid_points or 0, "samples_per_interval": samples_per_interval}
    _write_table(out, fmt, "compare", params,
                 ["k", "t_peak", "peak_numeric", "peak_model",
                  "trough_numeric", "trough_model", "f_v_peak", "s_peak"], rows)


if __name__ == "__main__":
    main()
