"""Command-line front end for Casimir-Polder levitation calculations.

Every subcommand resolves a :class:`~pmclev.config.RunConfig` (defaults,
then an optional ``--config`` file, then ``--set`` pairs, then dedicated
flags) and writes one CSV or JSON file whose header carries the resolved
configuration and its SHA-256. Exit status: 0 success, 1 other library
error or failed validation, 2 configuration error, 3 domain error, 4
convergence failure.
"""
import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from multiprocessing import get_context

import numpy as np

from . import config as cfgmod
from .errors import ConfigError, PmclevError
from .force import (Conductor, MatsubaraForce, NonEquilibriumForce, PMCForce, ThermalState,
                    WindowedForce)
from .levitation import find_equilibrium, potential, simulate_trajectory
from .materials import Constant, Drude, Lorentz, NanoparticleSpec, preset
from .surface import (GradientIndex, IdealPEC, IdealPMC, MagneticComposite, WindowedPMC,
                      reflectance_map)

WORKERS_ENV = "PMCLEV_WORKERS"

# flag -> config key
FLAGS = {
    "--material": "material",
    "--radius": "radius",
    "--density": "material.density",
    "--surface": "surface",
    "--omega-min": "surface.omega_min",
    "--omega-max": "surface.omega_max",
    "--kpar-min": "surface.kpar_min",
    "--kpar-max": "surface.kpar_max",
    "--method": "surface.method",
    "--eps1": "surface.eps1",
    "--profile-b": "surface.b",
    "--profile-L": "surface.L",
    "--mu1": "surface.mu1",
    "--pmc-duality": "surface.pmc_duality",
    "--convention": "surface.convention",
    "--t-em": "thermal.t_em",
    "--t-np": "thermal.t_np",
    "--t-s": "thermal.t_s",
    "--z-min": "grid.z_min",
    "--z-max": "grid.z_max",
    "--points": "grid.points",
    "--grid-omega-min": "grid.omega_min",
    "--grid-omega-max": "grid.omega_max",
    "--grid-omega-points": "grid.omega_points",
    "--grid-kpar-min": "grid.kpar_min",
    "--grid-kpar-max": "grid.kpar_max",
    "--grid-kpar-points": "grid.kpar_points",
    "--z-lo": "equilibrium.z_lo",
    "--z-hi": "equilibrium.z_hi",
    "--z-init": "trajectory.z_init",
    "--v-init": "trajectory.v_init",
    "--t-end": "trajectory.t_end",
    "--dt": "trajectory.dt",
    "--temperatures": "sweep.temperatures",
    "--sweep-omega-max": "sweep.omega_max",
    "--output": "output",
}


# ---------------------------------------------------------------------------
# config -> objects


def build_particle(cfg):
    name = cfg["material"]
    density = cfg["material.density"]
    if name == "custom":
        kind = cfg["material.kind"]
        try:
            if kind == "lorentz":
                model = Lorentz(cfg["material.eps_inf"], cfg["material.omega_L"],
                                cfg["material.omega_T"], cfg["material.gamma"])
            elif kind == "drude":
                model = Drude(cfg["material.eps_inf"], cfg["material.omega_P"], cfg["material.gamma"])
            else:
                model = Constant(cfg["material.eps"])
        except TypeError:
            raise ConfigError(f"custom {kind} material is missing parameters") from None
        if density is None:
            raise ConfigError("custom material needs material.density")
    else:
        model, rho = preset(name)
        density = rho if density is None else density
    return NanoparticleSpec(radius=cfg["radius"], density=density, material=model)


def build_surface(cfg):
    kind = cfg["surface"]
    if kind == "pmc":
        return IdealPMC()
    if kind == "pec":
        return IdealPEC()
    if kind == "windowed":
        return WindowedPMC(cfg["surface.omega_min"], cfg["surface.omega_max"],
                           cfg["surface.kpar_min"], cfg["surface.kpar_max"])
    if kind == "gradient":
        return GradientIndex(cfg["surface.eps1"], cfg["surface.b"], cfg["surface.L"],
                             pmc_duality=cfg["surface.pmc_duality"], convention=cfg["surface.convention"])
    return MagneticComposite(cfg["surface.mu1"], cfg["surface.eps1"])


def thermal_state(cfg):
    """``None`` for zero temperature; an unset particle temperature follows the field."""
    t_em, t_np = cfg["thermal.t_em"], cfg["thermal.t_np"]
    if t_em is None and t_np is None:
        return None
    t_em = 0.0 if t_em is None else t_em
    t_np = t_em if t_np is None else t_np
    return ThermalState(t_em, t_np, cfg["thermal.t_s"])


def build_force_model(cfg, temperature=None, omega_max=None):
    surface = build_surface(cfg)
    if omega_max is not None:
        if not isinstance(surface, WindowedPMC):
            raise ConfigError("sweep.omega_max needs surface = windowed")
        surface = WindowedPMC(surface.omega_min, omega_max, surface.kpar_min, surface.kpar_max)
    thermal = thermal_state(cfg)
    if temperature is not None:
        thermal = ThermalState(temperature, temperature) if temperature > 0.0 else None
    if isinstance(surface, WindowedPMC):
        if thermal is not None:
            raise ConfigError("windowed surfaces support zero temperature only")
        return WindowedForce(surface, cfg["surface.method"])
    if not isinstance(surface, (IdealPMC, IdealPEC)):
        raise ConfigError(f"no force model for surface {cfg['surface']!r}; use reflectance")
    sign = Conductor.PMC if isinstance(surface, IdealPMC) else Conductor.PEC
    if thermal is None:
        return PMCForce(sign)
    if thermal.t_em == thermal.t_np:
        return MatsubaraForce(thermal.t_em, sign)
    return NonEquilibriumForce(thermal, sign)


def _z_grid(cfg):
    n = cfg["grid.points"]
    if n < 1:
        raise ConfigError("grid.points must be >= 1")
    if not 0.0 < cfg["grid.z_min"] <= cfg["grid.z_max"]:
        raise ConfigError("need 0 < grid.z_min <= grid.z_max")
    return np.linspace(cfg["grid.z_min"], cfg["grid.z_max"], n)


# ---------------------------------------------------------------------------
# commands: each returns (text, exit_status)


def _csv(cfg, columns, rows, extra=()):
    lines = cfg.header_lines()
    lines += [f"## {k} = {v}" for k, v in extra]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(r if isinstance(r, str) else repr(float(r)) for r in row))
    return "\n".join(lines) + "\n"


def _json(cfg, payload):
    doc = dict(payload)
    doc["provenance"] = {
        "config_sha256": cfg.sha256(),
        "config": {k: cfgmod.format_value(k, v) for k, v in cfg.values if k not in cfgmod.LOCAL_KEYS},
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_reflectance(cfg):
    surface = build_surface(cfg)
    om = np.linspace(cfg["grid.omega_min"], cfg["grid.omega_max"], cfg["grid.omega_points"])
    kp = np.linspace(cfg["grid.kpar_min"], cfg["grid.kpar_max"], cfg["grid.kpar_points"])
    m = reflectance_map(surface, om, kp)
    rows = ((w, k, rs.real, rs.imag, rp.real, rp.imag, st) for w, k, rs, rp, st in m.rows())
    return _csv(cfg, ("omega_rad_s", "kpar_rad_m", "re_rs", "im_rs", "re_rp", "im_rp", "status"), rows), 0


def cmd_force(cfg):
    particle = build_particle(cfg)
    model = build_force_model(cfg)
    zs = _z_grid(cfg)
    return _csv(cfg, ("z_m", "F_N"), ((z, model.force(particle, float(z))) for z in zs)), 0


def cmd_potential(cfg):
    particle = build_particle(cfg)
    model = build_force_model(cfg)
    zs = _z_grid(cfg)
    return _csv(cfg, ("z_m", "U_J"), ((z, potential(particle, model, float(z))) for z in zs)), 0


def _equilibrium(cfg):
    particle = build_particle(cfg)
    model = build_force_model(cfg)
    sol = find_equilibrium(particle, model, (cfg["equilibrium.z_lo"], cfg["equilibrium.z_hi"]))
    return particle, model, sol


def cmd_equilibrium(cfg):
    _, _, sol = _equilibrium(cfg)
    out = sol.to_dict()
    out["force_model"] = sol.force_model_id
    return _json(cfg, out), 0


def cmd_trajectory(cfg):
    particle, model, sol = _equilibrium(cfg)
    tr = simulate_trajectory(particle, model, cfg["trajectory.z_init"], cfg["trajectory.v_init"],
                             cfg["trajectory.t_end"], cfg["trajectory.dt"], solution=sol)
    period = "none" if tr.period_estimate is None else repr(tr.period_estimate)
    extra = (("status", tr.status), ("period_s", period), ("z0_m", repr(sol.z0)),
             ("energy_drift", repr(tr.energy_drift())))
    rows = zip(tr.times, tr.positions, tr.velocities, tr.energies)
    return _csv(cfg, ("t_s", "z_m", "v_m_s", "E_J"), rows, extra), 0


def cmd_validate(cfg):
    from .validation import run_all

    report = run_all()
    return _json(cfg, report), 0 if report["all_passed"] else 1


def _sweep_point(task):
    text, z, temp, omega_max = task
    cfg = cfgmod.RunConfig.from_dict(cfgmod.parse_text(text))
    particle = build_particle(cfg)
    model = build_force_model(cfg, temperature=temp, omega_max=omega_max)
    return model.force(particle, z)


def workers_from_env():
    raw = os.environ.get(WORKERS_ENV, "")
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def cmd_sweep(cfg):
    zs = _z_grid(cfg)
    temps = cfg["sweep.temperatures"] or (0.0,)
    windows = cfg["sweep.omega_max"] or (None,)
    for t in temps:
        if t < 0.0:
            raise ConfigError("sweep temperatures must be >= 0")
    text = cfg.canonical_text()
    points = [(float(z), float(t), w) for z in zs for t in temps for w in windows]
    # validate the configuration once in-process before fanning out
    build_particle(cfg)
    build_force_model(cfg, temperature=points[0][1], omega_max=points[0][2])
    tasks = [(text, z, t, w) for z, t, w in points]
    n = min(workers_from_env(), len(tasks))
    if n <= 1:
        values = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n, mp_context=get_context("spawn")) as ex:
            values = list(ex.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * n))))
    rows = ((z, t, "none" if w is None else repr(float(w)), f) for (z, t, w), f in zip(points, values))
    return _csv(cfg, ("z_m", "T_K", "omega_max_rad_s", "F_N"), rows), 0


COMMANDS = {
    "reflectance": cmd_reflectance,
    "force": cmd_force,
    "equilibrium": cmd_equilibrium,
    "potential": cmd_potential,
    "trajectory": cmd_trajectory,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    parser = argparse.ArgumentParser(prog="pmclev", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in cfgmod.COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat 'key = value' config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
        for flag, key in FLAGS.items():
            kw = {"dest": "opt_" + key.replace(".", "__"), "default": argparse.SUPPRESS}
            flags = (flag, "-o") if flag == "--output" else (flag,)
            if flag == "--pmc-duality":
                p.add_argument(*flags, action="store_const", const="true", help=key, **kw)
            else:
                p.add_argument(*flags, metavar=key.split(".")[-1].upper(), help=key, **kw)
    return parser


def resolve_config(args):
    """Defaults < config file < ``--set`` < dedicated flags."""
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        overrides[k] = v
    for dest, val in vars(args).items():
        if dest.startswith("opt_"):
            overrides[dest[4:].replace("__", ".")] = val
    overrides["command"] = args.command
    return cfgmod.load(args.config, overrides)


def run(cfg):
    """Execute a resolved configuration; returns the exit status."""
    text, status = COMMANDS[cfg["command"]](cfg)
    out = cfg["output"]
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    return status


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(resolve_config(args))
    except PmclevError as exc:
        print(f"pmclev: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
