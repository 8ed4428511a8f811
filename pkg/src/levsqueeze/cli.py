"""Command-line interface.

Subcommands emit CSV tables and JSON sidecars for recoil sweeps, radiation
patterns, sensitivity curves, beam optimization and Wigner-function data.
Every option can also come from a JSON config file (flag beats file); each
run echoes its fully resolved settings so reruns are reproducible.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import importlib.resources
import json
import math
import os
import re
import sys

import click
import numpy as np

from . import detect, physics, scatter, squeeze
from .angular import (
    QuadratureRule,
    make_gaussian_beam,
    make_libration_distribution,
    make_motion_distribution,
)
from .errors import ConfigError, NumericalFailure
from .io import write_csv, write_json
from .optimize import OptimizationProblem, optimize as run_optimize

CONFIG_DIR_ENV = "LEVSQUEEZE_CONFIG_DIR"

AXIS_TOKENS = {
    "x": [1.0, 0.0, 0.0],
    "+x": [1.0, 0.0, 0.0],
    "-x": [-1.0, 0.0, 0.0],
    "y": [0.0, 1.0, 0.0],
    "+y": [0.0, 1.0, 0.0],
    "-y": [0.0, -1.0, 0.0],
    "z": [0.0, 0.0, 1.0],
    "+z": [0.0, 0.0, 1.0],
    "-z": [0.0, 0.0, -1.0],
}

_PI_PATTERN = re.compile(r"^([+-]?)(\d+(?:\.\d+)?)?pi(?:/(\d+(?:\.\d+)?))?$")


def parse_phase(text) -> float:
    """Parse a phase: plain float or exact pi-literal like `3pi/2`."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().replace(" ", "")
    match = _PI_PATTERN.match(s)
    if match:
        sign = -1.0 if match.group(1) == "-" else 1.0
        coeff = float(match.group(2)) if match.group(2) else 1.0
        div = float(match.group(3)) if match.group(3) else 1.0
        return sign * coeff * math.pi / div
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot parse phase {text!r}") from None


def parse_quad(text) -> QuadratureRule:
    try:
        n_theta, n_phi = (int(p) for p in str(text).lower().split("x"))
    except ValueError:
        raise ConfigError(f"quadrature spec must look like 64x128, got {text!r}") from None
    return QuadratureRule(n_theta=n_theta, n_phi=n_phi)


def parse_db_range(text):
    """A dB value or start:stop:step range (stop inclusive within step/2)."""
    parts = str(text).split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ConfigError(f"dB range must be value or start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ConfigError("dB range requires step > 0 and stop >= start")
    n = int(round((stop - start) / step))
    return [start + i * step for i in range(n + 1)]


def parse_beam_spec(text) -> dict:
    """Parse `na=0.9,axis=-z,pol=0` into beam parameters."""
    params = {"na": None, "axis": [0.0, 0.0, -1.0], "polarization_angle": 0.0}
    label_axis = "-z"
    for item in str(text).split(","):
        if "=" not in item:
            raise ConfigError(f"beam spec item {item!r} is not key=value")
        key, value = (p.strip() for p in item.split("=", 1))
        if key == "na":
            try:
                params["na"] = float(value)
            except ValueError:
                raise ConfigError(f"beam na must be a number, got {value!r}") from None
        elif key == "axis":
            if value not in AXIS_TOKENS:
                raise ConfigError(f"beam axis must be one of {sorted(AXIS_TOKENS)}")
            params["axis"] = AXIS_TOKENS[value]
            label_axis = value
        elif key == "pol":
            params["polarization_angle"] = parse_phase(value)
        else:
            raise ConfigError(f"unknown beam parameter {key!r}")
    if params["na"] is None:
        raise ConfigError("beam spec requires na=")
    params["label"] = f"na{params['na']:g}_{label_axis.lstrip('+')}"
    return params


def load_config(path):
    if path is None:
        directory = os.environ.get(CONFIG_DIR_ENV)
        if directory:
            default = os.path.join(directory, "config.json")
            if os.path.exists(default):
                path = default
    if path is None:
        return {}
    try:
        with open(path) as handle:
            config = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    _validate_config(config)
    return config


def _validate_config(config):
    try:
        import jsonschema
    except ImportError:
        return
    schema = json.loads(
        importlib.resources.files("levsqueeze").joinpath("config_schema.json").read_text()
    )
    try:
        jsonschema.validate(config, schema)
    except jsonschema.ValidationError as exc:
        field = "/".join(str(p) for p in exc.absolute_path) or "(top level)"
        raise ConfigError(f"config field {field}: {exc.message}") from None


def _effective(ctx, section, name, value):
    """Flag > config file > click default."""
    source = ctx.get_parameter_source(name)
    if source is not None and source.name == "COMMANDLINE":
        return value
    if name in section:
        return section[name]
    return value


class _Common:
    def __init__(self, config_path, out, quad, threads, seed):
        self.config = load_config(config_path)
        self.out = out
        self.quad_spec = quad
        self.rule = parse_quad(quad)
        self.threads = threads
        self.seed = seed

    def section(self, name):
        return self.config.get(name, {})

    def resolve_common(self, ctx, section):
        """Let a config section supply quad/threads/seed when the top-level
        flags were not given explicitly."""
        parent = ctx.parent or ctx
        for name in ("quad", "threads", "seed"):
            source = parent.get_parameter_source(name)
            explicit = source is not None and source.name == "COMMANDLINE"
            if not explicit and name in section:
                if name == "quad":
                    self.quad_spec = section[name]
                    self.rule = parse_quad(self.quad_spec)
                elif name == "threads":
                    self.threads = int(section[name])
                else:
                    self.seed = int(section[name])

    def path(self, name):
        return os.path.join(self.out, name)

    def common_echo(self):
        return {
            "quad": self.quad_spec,
            "threads": self.threads,
            "seed": self.seed,
        }


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.option("--out", type=click.Path(), default=".", help="Output directory.")
@click.option("--quad", default="64x128", help="Quadrature NTHETAxNPHI.")
@click.option("--threads", type=int, default=1, help="Worker threads.")
@click.option("--seed", type=int, default=0, help="Random seed for stochastic stages.")
@click.pass_context
def cli(ctx, config_path, out, quad, threads, seed):
    """Squeezed-light recoil, scattering and detection calculator."""
    ctx.obj = _Common(config_path, out, quad, threads, seed)


def _mode_distribution(kind, axis, rule):
    if kind == "motion":
        return make_motion_distribution(axis, rule=rule)
    if kind == "libration":
        return make_libration_distribution(axis, rule=rule)
    raise ConfigError(f"kind must be motion or libration, got {kind!r}")


def _echo_config(common, section_name, resolved):
    payload = {section_name: resolved}
    for extra in ("laser", "particle", "rotor"):
        if extra in common.config:
            payload[extra] = common.config[extra]
    write_json(common.path(f"{section_name}_config.json"), payload)


def _derived_report(common):
    cfg = common.config
    if "laser" not in cfg:
        return None
    laser = physics.Laser(**cfg["laser"])
    particle = physics.Particle(**cfg["particle"]) if "particle" in cfg else None
    rotor = physics.Rotor(**cfg["rotor"]) if "rotor" in cfg else None
    return physics.derived_report(laser, particle=particle, rotor=rotor)


@cli.command()
@click.option("--axis", default="z", help="Mechanical axis (x, y or z).")
@click.option("--kind", default="motion", help="motion or libration.")
@click.option("--beam", "beams", multiple=True, help="Beam spec na=...,axis=...,pol=... (repeatable).")
@click.option("--perfect-overlap", is_flag=True, default=False, help="Include the |xi|=1 column.")
@click.option("--db", default="0:20:0.5", help="Squeezing in dB: value or start:stop:step.")
@click.option("--phase", default="0", help="Squeezing phase (pi-literals allowed).")
@click.option("--absolute-phase", is_flag=True, default=False, help="Treat --phase as absolute phi_s instead of the offset phi_s - 2 arg(xi).")
@click.pass_obj
@click.pass_context
def recoil(ctx, common, axis, kind, beams, perfect_overlap, db, phase, absolute_phase):
    """Recoil-heating ratio versus squeezing degree."""
    section = common.section("recoil")
    common.resolve_common(ctx, section)
    axis = _effective(ctx, section, "axis", axis)
    kind = _effective(ctx, section, "kind", kind)
    db = _effective(ctx, section, "db", db)
    phase = _effective(ctx, section, "phase", phase)
    absolute_phase = bool(_effective(ctx, section, "absolute_phase", absolute_phase))
    if ctx.get_parameter_source("beams").name != "COMMANDLINE" and "beams" in section:
        beams = tuple(section["beams"])
    perfect_overlap = bool(_effective(ctx, section, "perfect_overlap", perfect_overlap))
    if not beams and not perfect_overlap:
        perfect_overlap = True

    beam_params = {}
    for spec in beams:
        parsed = parse_beam_spec(spec)
        beam_params[parsed.pop("label")] = parsed
    db_values = parse_db_range(db)
    phi = parse_phase(phase)
    header, rows, overlaps = squeeze.recoil_sweep(
        beam_params,
        axis,
        [squeeze.db_to_r(v) for v in db_values],
        phi=phi,
        kind=kind,
        include_perfect=perfect_overlap,
        rule=common.rule,
        absolute_phase=absolute_phase,
    )
    header[0] = "r_db"
    for row, dbv in zip(rows, db_values):
        row[0] = dbv
    write_csv(common.path("recoil.csv"), header, rows)

    meta = {
        "overlaps": {
            label: {"re": xi.real, "im": xi.imag, "modulus": abs(xi)}
            for label, xi in overlaps.items()
        },
    }
    derived = _derived_report(common)
    if derived is not None:
        meta["derived"] = derived
    write_json(common.path("recoil_params.json"), meta)
    resolved = {
        "axis": axis,
        "kind": kind,
        "beams": list(beams),
        "perfect_overlap": perfect_overlap,
        "db": db,
        "phase": str(phase),
        "absolute_phase": absolute_phase,
        **common.common_echo(),
    }
    _echo_config(common, "recoil", resolved)


@cli.command()
@click.option("--axis", default="z")
@click.option("--kind", default="motion")
@click.option("--beam", default="na=0.9,axis=-z", help="Beam spec na=...,axis=...,pol=...")
@click.option("--db", default="15", help="Squeezing in dB (single value).")
@click.option("--phase", default="0", help="Phase offset phi_s - 2 arg(xi).")
@click.option("--grid", default="181x360", help="Export grid NTHETAxNPHI.")
@click.pass_obj
@click.pass_context
def irp(ctx, common, axis, kind, beam, db, phase, grid):
    """Differential cross section and information radiation pattern."""
    section = common.section("irp")
    common.resolve_common(ctx, section)
    axis = _effective(ctx, section, "axis", axis)
    kind = _effective(ctx, section, "kind", kind)
    beam = _effective(ctx, section, "beam", beam)
    db = _effective(ctx, section, "db", db)
    phase = _effective(ctx, section, "phase", phase)
    grid = _effective(ctx, section, "grid", grid)

    params = parse_beam_spec(beam)
    params.pop("label")
    beam_dist = make_gaussian_beam(
        na=params["na"],
        propagation_axis=np.asarray(params["axis"]),
        polarization_angle=params["polarization_angle"],
        rule=common.rule,
    )
    mode = _mode_distribution(kind, axis, common.rule)
    r_s = squeeze.db_to_r(float(db))
    cfg = scatter.ScatterConfig(
        mode=mode,
        beam=beam_dist,
        sq=squeeze.SqueezeParams(r_s=r_s, phi_s=parse_phase(phase)),
        absolute_phase=False,
        rule=common.rule,
    )
    try:
        n_theta, n_phi = (int(p) for p in str(grid).lower().split("x"))
    except ValueError:
        raise ConfigError(f"grid spec must look like 181x360, got {grid!r}") from None
    result = scatter.irp_grid(cfg, n_theta=n_theta, n_phi=n_phi)

    rows = []
    for i, theta in enumerate(result.theta):
        for j, phi_v in enumerate(result.phi):
            rows.append(
                [
                    theta,
                    phi_v,
                    result.dsigma[i, j],
                    result.irp[i, j],
                    result.f_plus_sq[i, j],
                    result.f_minus_sq[i, j],
                ]
            )
    write_csv(
        common.path("irp.csv"),
        ["theta", "phi", "dsigma", "irp", "f_plus_sq", "f_minus_sq"],
        rows,
    )
    write_json(
        common.path("irp_meta.json"),
        {"normalization": result.normalization, **result.metadata},
    )
    resolved = {
        "axis": axis,
        "kind": kind,
        "beam": beam,
        "db": str(db),
        "phase": str(phase),
        "grid": grid,
        **common.common_echo(),
    }
    _echo_config(common, "irp", resolved)


@cli.command()
@click.option("--xi", default=1.0, type=float, help="Overlap modulus |xi|.")
@click.option("--db", default="15", help="Squeezing in dB.")
@click.option("--phase", default="3pi/2", help="Phase offset phi_s - 2 arg(xi).")
@click.option("--omega-ratio", default=1e-3, type=float, help="omega / mode frequency.")
@click.option("--gamma-ratio", default=1e-6, type=float, help="damping / mode frequency.")
@click.option("--u", "u_range", default="1e-4:1e4:200", help="Log grid lo:hi:n for the measurement strength.")
@click.option("--heatmap", is_flag=True, default=False, help="Emit the (e^2r, |xi|^2) optimal-sensitivity table instead of a u-curve.")
@click.option("--heatmap-grid", default="25x26", help="Heatmap resolution N_E2RxN_XI2.")
@click.pass_obj
@click.pass_context
def sensitivity(ctx, common, xi, db, phase, omega_ratio, gamma_ratio, u_range, heatmap, heatmap_grid):
    """Minimum detectable signal relative to the standard quantum limit."""
    section = common.section("sensitivity")
    common.resolve_common(ctx, section)
    xi = float(_effective(ctx, section, "xi", xi))
    db = _effective(ctx, section, "db", db)
    phase = _effective(ctx, section, "phase", phase)
    omega_ratio = float(_effective(ctx, section, "omega_ratio", omega_ratio))
    gamma_ratio = float(_effective(ctx, section, "gamma_ratio", gamma_ratio))
    u_range = _effective(ctx, section, "u_range", u_range)
    heatmap = bool(_effective(ctx, section, "heatmap", heatmap))
    heatmap_grid = _effective(ctx, section, "heatmap_grid", heatmap_grid)

    r_s = squeeze.db_to_r(float(db))
    chi = detect.Susceptibility(
        omega=omega_ratio, mode_frequency=1.0, damping=gamma_ratio
    )
    if heatmap:
        try:
            n_e2r, n_xi2 = (int(p) for p in str(heatmap_grid).lower().split("x"))
        except ValueError:
            raise ConfigError(f"heatmap grid must look like 25x26, got {heatmap_grid!r}") from None
        e2r_values = np.linspace(1.0, math.exp(2.0 * r_s), n_e2r)
        xi2_values = np.linspace(0.0, 1.0, n_xi2)
        header, rows = detect.sensitivity_heatmap(e2r_values, xi2_values, chi)
        write_csv(common.path("sensitivity.csv"), header, rows)
    else:
        parts = str(u_range).split(":")
        if len(parts) != 3:
            raise ConfigError(f"u grid must be lo:hi:n, got {u_range!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if lo <= 0 or hi <= lo or n < 2:
            raise ConfigError("u grid requires 0 < lo < hi and n >= 2")
        spectra = detect.input_spectra(
            squeeze.OverlapResult(xi=xi),
            squeeze.SqueezeParams(r_s=r_s, phi_s=parse_phase(phase)),
            absolute_phase=False,
        )
        u_values = np.geomspace(lo, hi, n)
        rows = detect.sensitivity_curve(spectra, chi, u_values)
        write_csv(common.path("sensitivity.csv"), ["u", "s_min_over_sql"], rows)
        u_opt, value = detect.s_min_opt_u(spectra, chi)
        write_json(
            common.path("sensitivity_meta.json"),
            {
                "u_opt": u_opt,
                "s_min_opt": value,
                "sxx": spectra.sxx,
                "syy": spectra.syy,
                "scross": spectra.scross,
            },
        )
    resolved = {
        "xi": xi,
        "db": str(db),
        "phase": str(phase),
        "omega_ratio": omega_ratio,
        "gamma_ratio": gamma_ratio,
        "u_range": u_range,
        "heatmap": heatmap,
        "heatmap_grid": heatmap_grid,
        **common.common_echo(),
    }
    _echo_config(common, "sensitivity", resolved)


@cli.command("optimize")
@click.option("--objective", default="recoil_ratio", help="recoil_ratio or s_min_opt.")
@click.option("--kind", default="motion")
@click.option("--axis", default="z")
@click.option("--db", default="15")
@click.option("--free", "free_specs", multiple=True, help="Free parameter name=lo:hi (repeatable).")
@click.option("--fixed", "fixed_specs", multiple=True, help="Fixed parameter name=value (repeatable).")
@click.option("--budget", default=200, type=int, help="Max objective evaluations.")
@click.pass_obj
@click.pass_context
def optimize_cmd(ctx, common, objective, kind, axis, db, free_specs, fixed_specs, budget):
    """Search beam parameters minimizing recoil or optimized sensitivity."""
    section = common.section("optimize")
    common.resolve_common(ctx, section)
    objective = _effective(ctx, section, "objective", objective)
    kind = _effective(ctx, section, "kind", kind)
    axis = _effective(ctx, section, "axis", axis)
    db = _effective(ctx, section, "db", db)
    budget = int(_effective(ctx, section, "budget", budget))
    if ctx.get_parameter_source("free_specs").name != "COMMANDLINE" and "free" in section:
        free_specs = tuple(section["free"])
    if ctx.get_parameter_source("fixed_specs").name != "COMMANDLINE" and "fixed" in section:
        fixed_specs = tuple(section["fixed"])

    free = {}
    for spec in free_specs:
        if "=" not in spec:
            raise ConfigError(f"free spec {spec!r} is not name=lo:hi")
        name, bounds = spec.split("=", 1)
        parts = bounds.split(":")
        if len(parts) != 2:
            raise ConfigError(f"free bounds {bounds!r} must be lo:hi")
        free[name.strip()] = (parse_phase(parts[0]), parse_phase(parts[1]))
    fixed = {}
    for spec in fixed_specs:
        if "=" not in spec:
            raise ConfigError(f"fixed spec {spec!r} is not name=value")
        name, value = spec.split("=", 1)
        fixed[name.strip()] = parse_phase(value)
    if not free:
        raise ConfigError("at least one --free parameter is required")

    problem = OptimizationProblem(
        objective=objective,
        mode_kind=kind,
        mode_axis=axis,
        r_s=squeeze.db_to_r(float(db)),
        free=free,
        fixed=fixed,
        rule=common.rule,
    )
    result = run_optimize(problem, budget=budget, seed=common.seed)
    write_json(
        common.path("optimize_result.json"),
        {
            "best_params": result.best_params,
            "best_value": result.best_value,
            "xi_modulus": result.xi_modulus,
            "evaluations": result.evaluations,
        },
    )
    write_csv(
        common.path("optimize_trace.csv"),
        ["evaluation", "objective"],
        [[i, v] for i, v in enumerate(result.trace)],
    )
    resolved = {
        "objective": objective,
        "kind": kind,
        "axis": axis,
        "db": str(db),
        "free": list(free_specs),
        "fixed": list(fixed_specs),
        "budget": budget,
        **common.common_echo(),
    }
    _echo_config(common, "optimize", resolved)


@cli.command()
@click.option("--source", default="bare", help="bare (squeezed mode) or input (interacting mode).")
@click.option("--db", default="15")
@click.option("--phase", default="0", help="Squeeze phase (bare) or offset phi_s - 2 arg(xi) (input).")
@click.option("--xi", default=1.0, type=float, help="Overlap modulus (input source only).")
@click.option("--grid-n", default=101, type=int, help="Grid points per quadrature axis.")
@click.pass_obj
@click.pass_context
def wigner(ctx, common, source, db, phase, xi, grid_n):
    """Gaussian Wigner function of the squeezed input light."""
    section = common.section("wigner")
    common.resolve_common(ctx, section)
    source = _effective(ctx, section, "source", source)
    db = _effective(ctx, section, "db", db)
    phase = _effective(ctx, section, "phase", phase)
    xi = float(_effective(ctx, section, "xi", xi))
    grid_n = int(_effective(ctx, section, "grid_n", grid_n))

    r_s = squeeze.db_to_r(float(db))
    phi = parse_phase(phase)
    if source == "bare":
        cov = detect.wigner_covariance("bare-squeezed-mode", r=r_s, phi=phi)
    elif source == "input":
        spectra = detect.input_spectra(
            squeeze.OverlapResult(xi=xi),
            squeeze.SqueezeParams(r_s=r_s, phi_s=phi),
            absolute_phase=False,
        )
        cov = detect.wigner_covariance("interacting-input", spectra=spectra)
    else:
        raise ConfigError(f"wigner source must be bare or input, got {source!r}")
    x, y, w = detect.wigner_grid(cov, n=grid_n)
    rows = []
    for i, xv in enumerate(x):
        for j, yv in enumerate(y):
            rows.append([xv, yv, w[i, j]])
    write_csv(common.path("wigner.csv"), ["x", "y", "w"], rows)
    write_json(
        common.path("wigner_covariance.json"),
        {
            "covariance": [[cov[0, 0], cov[0, 1]], [cov[1, 0], cov[1, 1]]],
            "determinant": float(np.linalg.det(cov)),
            "source": source,
        },
    )
    resolved = {
        "source": source,
        "db": str(db),
        "phase": str(phase),
        "xi": xi,
        "grid_n": grid_n,
        **common.common_echo(),
    }
    _echo_config(common, "wigner", resolved)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return 2
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 2
    except click.ClickException as exc:
        exc.show()
        return 2
    except (ConfigError, ValueError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return 2
    except NumericalFailure as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
