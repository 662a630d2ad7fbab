"""Command-line entry point: ``eikonal-lab <subcommand> [flags]``.

Parameters resolve as dataclass defaults, then a JSON ``--config`` file, then
explicit flags. Each run writes its data files plus ``manifest.json`` (the
resolved config, file hashes and a timestamp) into ``--out-dir``.

Exit codes: 0 success, 2 usage/config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from . import bell as bl
from . import diffraction as df
from . import io
from . import kinematics as km
from . import phase_space as ps
from . import spectrum as sp
from . import spin as sn
from . import svg
from .errors import FittingError, IntegrationError, InvariantViolation, StabilityError, UnsupportedPotential
from .numerics import Grid1D, Grid2D, RngStream

OUT_ENV = "EIKONAL_LAB_OUT"
DEFAULT_OUT = "eikonal_out"
FORMATS = ("csv", "json", "svg")
NUMERIC_ERRORS = (FittingError, IntegrationError, InvariantViolation, StabilityError, UnsupportedPotential, ArithmeticError)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- parameter blocks


@dataclass
class BlackbodyParams:
    omega: list = field(default_factory=lambda: [1.0])
    T: list = field(default_factory=lambda: [1.0])
    hbar: float = 1.0
    kappa: float = 1.0
    tol: float = 1e-8


@dataclass
class ModulateParams:
    beta: list = field(default_factory=lambda: [0.1, 0.5, 0.9])
    omega0: float = 1.0
    c: float = 1.0
    hbar: float = 1.0
    field_points: int = 0
    field_span: float = 50.0
    field_t: float = 0.0


@dataclass
class DiffractParams:
    wavelength: float = 1.0
    slits: int = 2
    separation: float = 20.0
    width: float = 2.0
    distance: float = 2000.0
    half_width: float = 300.0
    points: int = 1201


@dataclass
class GuideParams(DiffractParams):
    walkers: int = 100_000
    bins: int = 200
    workers: int = 1
    concentration: float = 8.0
    launch: str = "window"


@dataclass
class EvolveParams:
    engine: str = "both"
    potential: str = "harmonic"
    omega: float = 1.0
    force: float = 0.0
    x0: float = 2.0
    p0: float = 0.5
    sigma: float = 0.0
    t: float = 0.0
    dt: float = 0.0
    mass: float = 1.0
    hbar: float = 1.0
    points: int = 256


@dataclass
class WignerParams:
    state: str = "coherent"
    level: int = 1
    kT: float = 1.0
    omega: float = 1.0
    x0: float = 0.0
    p0: float = 0.0
    mass: float = 1.0
    hbar: float = 1.0
    points: int = 256


@dataclass
class SpinParams:
    B: list = field(default_factory=lambda: [0.0, 0.0, 1.0])
    spin: list = field(default_factory=lambda: [1.0, 0.0, 0.0])
    t: float = 20.0
    dt: float = 0.01
    axis: list = field(default_factory=lambda: [0.0, 0.0, 1.0])
    trials: int = 0
    mass: float = 1.0
    hbar: float = 1.0
    e: float = 1.0
    c: float = 1.0


@dataclass
class BellParams:
    model: str = "qm"
    angles: list = field(default_factory=lambda: [0.0, 60.0, 120.0])
    trials: int = 1_000_000
    scan_resolution: float = 0.0


CHOICES = {
    "engine": ("liouville", "schrodinger", "both"),
    "potential": ("harmonic", "free", "linear"),
    "state": ("coherent", "eigen", "thermal"),
    "model": ("qm", "sign", "antiparallel", "projection"),
    "launch": ("window", "shadow"),
}


@dataclass
class RunConfig:
    subcommand: str
    params: object
    seed: int = 0
    out_dir: str = DEFAULT_OUT
    format: str = "csv"

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "params": dataclasses.asdict(self.params),
            "seed": self.seed,
            "out_dir": self.out_dir,
            "format": self.format,
        }


# ---------------------------------------------------------------- pipelines


class Run:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: list[Path] = []
        self.summary: dict = {}

    def table(self, stem, header, rows):
        self.files.append(io.write_table(self.out / stem, header, rows, self.cfg.format))

    def json(self, name, obj):
        self.files.append(io.write_json(self.out / name, obj))

    def state(self, path: Path):
        self.files.append(path)

    def plot(self, fn: Callable, name: str, *args, **kw):
        if self.cfg.format == "svg":
            self.files.append(fn(self.out / name, *args, **kw))


def run_blackbody(r: Run, p: BlackbodyParams):
    rows = []
    for omega in p.omega:
        mode = sp.SpectralMode(omega, p.hbar, p.kappa)
        ode = sp.solve_thermal_ode(mode, p.T, p.tol)
        E_B = sp.background_energy(mode)
        for T, E in zip(p.T, ode):
            closed = sp.planck_energy(mode, T)
            wave, particle = sp.fluctuation_decomposition(E, E_B)
            rows.append([omega, T, E, closed, abs(E - closed) / closed, wave, particle])
    r.table("blackbody", ["omega", "T", "E_T_ode", "E_T_closed", "rel_err", "wave_term", "particle_term"], rows)
    r.summary = {"max_rel_err": max(row[4] for row in rows), "rows": len(rows)}
    if len(p.T) > 1:
        order = np.argsort(p.T)
        ys = [np.array([row[2] for row in rows[i * len(p.T):(i + 1) * len(p.T)]])[order] for i in range(len(p.omega))]
        r.plot(svg.line_plot, "blackbody.svg", np.asarray(p.T)[order], ys, [f"omega={o}" for o in p.omega], "thermal mean energy", "T", "E_T")


def run_modulate(r: Run, p: ModulateParams):
    osc = km.RestFrameOscillator.from_omega(p.omega0, p.c, p.hbar)
    rows = []
    for beta in p.beta:
        boost = sp.BoostParams(beta)
        w = km.boost_standing_wave(osc, boost)
        rows.append([beta, boost.gamma, w.carrier_wavevector, w.carrier_speed, w.modulation_wavevector, w.modulation_speed, km.de_broglie_wavevector(osc, boost)])
    r.table("modulate", ["beta", "gamma", "k_carrier", "v_carrier", "k_mod", "v_mod", "k_deBroglie"], rows)
    if p.field_points > 0:
        x = np.linspace(0.0, p.field_span, p.field_points)
        cols = [x] + [km.boost_standing_wave(osc, sp.BoostParams(b))(x, p.field_t) for b in p.beta]
        r.table("field", ["x"] + [f"A_beta_{b}" for b in p.beta], zip(*cols))
        r.plot(svg.line_plot, "field.svg", x, cols[1:], [f"beta={b}" for b in p.beta], "boosted standing wave", "x", "A")
    r.summary = {"rows": len(rows)}


def _geometry(p: DiffractParams):
    k = 2 * math.pi / p.wavelength
    if p.slits == 1:
        ap = df.Aperture1D.single_slit(p.width)
    elif p.slits == 2:
        ap = df.Aperture1D.double_slit(p.separation, p.width)
    else:
        raise ConfigError("slits must be 1 or 2")
    det = Grid1D.from_bounds(-p.half_width, p.half_width, p.points)
    return k, ap, det


def run_diffract(r: Run, p: DiffractParams):
    k, ap, det = _geometry(p)
    pat = df.diffract(k, ap, p.distance, det)
    energy = df.energy_density_field(pat)
    y = det.coords
    r.table("pattern", ["y", "amp_re", "amp_im", "intensity", "energy"], zip(y, pat.amplitude.real, pat.amplitude.imag, pat.intensity, energy.values))
    r.summary = {"paraxial_ok": pat.paraxial_ok, "k": k}
    if p.slits == 2:
        rep = df.compare_to_schrodinger(ap, k, p.distance, det)
        r.summary["comparison"] = rep.to_dict()
        qm = df.schrodinger_screen_intensity(k, ap, p.distance, det)
        r.plot(svg.line_plot, "pattern.svg", y, [energy.values, qm], ["modulation energy", "|psi|^2"], "screen pattern", "y", "density")
    else:
        r.plot(svg.line_plot, "pattern.svg", y, [energy.values], ["modulation energy"], "screen pattern", "y", "density")


def run_guide(r: Run, p: GuideParams):
    k, ap, det = _geometry(p)
    energy = df.energy_density_field(df.diffract(k, ap, p.distance, det))
    launch = df.slit_shadow(ap) if p.launch == "shadow" else None
    gcfg = df.default_guidance_config(energy, RngStream(r.cfg.seed), concentration=p.concentration, launch=launch)
    hist = df.simulate_guidance(energy, p.walkers, gcfg, p.bins, p.workers)
    prob = df.bin_probabilities(df.boltzmann_density(energy, gcfg), det, hist.bin_edges)
    r.table("histogram", ["bin_center", "count", "boltzmann_prob"], zip(hist.centers, hist.counts, prob))
    peaks = df.histogram_peaks(hist)
    nodes = df.local_minima(energy.values, det)
    r.summary = {
        "pearson": float(np.corrcoef(hist.counts, prob)[0, 1]),
        "peaks": peaks,
        "energy_nodes": nodes,
        "bin_width": hist.width,
        "guidance": {"mobility": gcfg.mobility, "noise": gcfg.noise, "dt": gcfg.dt, "steps": gcfg.steps},
    }
    r.plot(svg.line_plot, "histogram.svg", hist.centers, [hist.counts / hist.total, prob], ["walkers", "Boltzmann"], "impact histogram", "y", "fraction")


def _potential(p, sys_):
    if p.potential == "harmonic":
        return ps.QuadraticPotential.harmonic(sys_, p.omega)
    if p.potential == "linear":
        return ps.QuadraticPotential.linear(p.force)
    return ps.QuadraticPotential()


def run_evolve(r: Run, p: EvolveParams):
    sys_ = ps.SystemParams(p.mass, p.hbar)
    V = _potential(p, sys_)
    harmonic = p.potential == "harmonic"
    sigma = p.sigma if p.sigma > 0 else math.sqrt(p.hbar / (2 * p.mass * (p.omega if harmonic else 1.0)))
    t = p.t if p.t > 0 else (2 * math.pi / p.omega if harmonic else 1.0)
    sig_p = p.hbar / (2 * sigma)
    # pad around the classical excursion
    if harmonic:
        amp = math.hypot(p.x0, p.p0 / (p.mass * p.omega))
        lo, hi = -amp, amp
        sig_t = sigma
    else:
        v, a = p.p0 / p.mass, p.force / p.mass
        ends = [p.x0, p.x0 + v * t + 0.5 * a * t * t]
        lo, hi = min(ends), max(ends)
        sig_t = math.sqrt(sigma**2 + (p.hbar * t / (2 * p.mass * sigma)) ** 2)
    grid = ps.grid_for_state(lo, hi, max(sigma, sig_t), p.points)
    psi0 = ps.WaveFunction.gaussian(grid, p.x0, p.p0, sigma, sys_)
    dt = p.dt if p.dt > 0 else None
    report = {"t": t, "potential": V.to_dict()}
    if p.engine in ("schrodinger", "both"):
        psi_t = ps.schrodinger_evolve(psi0, V, sys_, t, dt)
        r.state(io.save_wavefunction(r.out / "wavefunction.csv", psi_t, sys_))
        report["schrodinger"] = {o: ps.expectation(psi_t, o, V, sys_) for o in ps.OBSERVABLES}
    if p.engine == "liouville":
        pg = Grid1D.from_bounds(p.p0 - 8 * sig_p - abs(p.force) * t, p.p0 + 8 * sig_p + abs(p.force) * t, p.points)
        if harmonic:
            pm = p.mass * p.omega * amp
            pg = Grid1D.from_bounds(-pm - 8 * sig_p, pm + 8 * sig_p, p.points)
        rho = ps.liouville_evolve(ps.wigner_from_wavefunction(psi0, sys_, pg), V, sys_, t)
        r.state(io.save_density(r.out / "density.csv", rho, sys_))
        report["liouville"] = {o: ps.expectation(rho, o, V, sys_) for o in ps.OBSERVABLES}
    if p.engine == "both":
        rep, rho, _ = ps.correspondence_check(psi0, V, sys_, t, dt)
        r.state(io.save_density(r.out / "density.csv", rho, sys_))
        report["liouville"] = {o: ps.expectation(rho, o, V, sys_) for o in ps.OBSERVABLES}
        report["correspondence"] = rep.to_dict()
        r.plot(svg.heatmap, "density.svg", rho.values, (grid.x0, grid.x_max), (rho.grid.gp.x0, rho.grid.gp.x_max), "Liouville density", "x", "p")
    r.json("report.json", report)
    r.summary = report


def run_wigner(r: Run, p: WignerParams):
    sys_ = ps.SystemParams(p.mass, p.hbar)
    s0 = math.sqrt(p.hbar / (2 * p.mass * p.omega))
    if p.state == "thermal":
        spread = s0 * math.sqrt(1.0 / math.tanh(p.hbar * p.omega / (2 * p.kT)))
    elif p.state == "eigen":
        spread = s0 * math.sqrt(2 * p.level + 1)
    else:
        spread = s0
    gx = ps.grid_for_state(p.x0, p.x0, spread, p.points)
    sp_ = p.hbar / (2 * s0) * spread / s0
    gp = Grid1D.from_bounds(p.p0 - 10 * sp_, p.p0 + 10 * sp_, p.points)
    if p.state == "coherent":
        rho = ps.wigner_from_wavefunction(ps.WaveFunction.coherent(gx, p.x0, p.p0, sys_, p.omega), sys_, gp)
    elif p.state == "eigen":
        rho = ps.wigner_from_wavefunction(ps.WaveFunction.harmonic_eigenstate(gx, p.level, sys_, p.omega, p.x0), sys_, gp)
    else:
        rho = ps.thermal_density(Grid2D(gx, gp), sys_, p.omega, p.kT, p.x0)
    r.state(io.save_density(r.out / "density.csv", rho, sys_))
    r.summary = {"min": rho.minimum, "admissible": rho.admissible, "norm": rho.norm}
    r.json("summary.json", r.summary)
    r.plot(svg.heatmap, "density.svg", rho.values, (gx.x0, gx.x_max), (gp.x0, gp.x_max), f"{p.state} state", "x", "p")


def run_spin(r: Run, p: SpinParams):
    sys_ = ps.SystemParams(p.mass, p.hbar)
    B = np.asarray(p.B, dtype=float)
    em = sn.EMField(B_uniform=tuple(B), e=p.e, c=p.c)
    spin_dir = np.asarray(p.spin, dtype=float)
    s0 = sn.SpinorField.along(spin_dir / np.linalg.norm(spin_dir))
    hist = sn.spin_history(s0, em, sys_, p.t, p.dt)
    r.table("spin", ["t", "sigma_x", "sigma_y", "sigma_z", "norm"], hist.rows())
    Bmag = float(np.linalg.norm(B))
    summary = {"larmor_expected": sn.larmor_frequency(Bmag, sys_, p.e, p.c), "zeeman_gap": sn.zeeman_splitting(Bmag, sys_, p.e, p.c)}
    if Bmag > 0:
        summary["larmor_fitted"] = sn.fit_precession(hist, B / Bmag)
    if p.trials > 0:
        ax = np.asarray(p.axis, dtype=float)
        axis = sn.MeasurementAxis(tuple(ax / np.linalg.norm(ax)))
        final = sn.pauli_evolve(s0, em, sys_, p.t, p.dt)
        plus, minus = sn.stern_gerlach_sample(final, axis, p.trials, RngStream(r.cfg.seed))
        summary["stern_gerlach"] = {"axis": list(axis.n), "plus": plus, "minus": minus, "p_plus": sn.spin_probability(final, axis)}
    r.json("summary.json", summary)
    r.summary = summary
    r.plot(svg.line_plot, "spin.svg", hist.t, list(hist.sigma.T), ["<sx>", "<sy>", "<sz>"], "spin expectation", "t", "")


def _bell_P(p: BellParams, seed: int):
    if p.model == "qm":
        return bl.qm_correlation, None
    if p.model == "projection":
        cache: dict = {}

        def P(a, b):
            key = (tuple(np.round(a, 15)), tuple(np.round(b, 15)))
            if key not in cache:
                cache[key] = bl.projection_correlation(a, b, p.trials, RngStream(seed, len(cache) + 1))
            return cache[key].value

        def err(a, b):
            P(a, b)
            return cache[(tuple(np.round(a, 15)), tuple(np.round(b, 15)))].std_error

        P.std_error = err
        return P, err
    mc = bl.MonteCarloCorrelation(bl.MODELS[p.model], p.trials, RngStream(seed))
    return mc, mc.std_error


def run_bell(r: Run, p: BellParams):
    if len(p.angles) != 3:
        raise ConfigError("--angles needs three values (degrees)")
    P, err = _bell_P(p, r.cfg.seed)
    th = [math.radians(a) for a in p.angles]
    axes = bl.AnalyzerAxes.coplanar(*th)
    lhs, rhs, ok = bl.bell_inequality(axes, P)
    pairs = {"ab": (axes.a, axes.b), "ac": (axes.a, axes.c), "bc": (axes.b, axes.c)}
    corr = {}
    for k, (x, y) in pairs.items():
        x, y = np.array(x), np.array(y)
        corr[k] = {"value": float(P(x, y)), "std_error": float(err(x, y)) if err else 0.0, "qm": bl.qm_correlation(x, y)}
    summary = {"model": p.model, "angles_deg": p.angles, "lhs": lhs, "rhs": rhs, "satisfied": ok, "violated": not ok, "margin": rhs - lhs, "correlations": corr}
    if p.scan_resolution > 0:
        scan = bl.violation_scan(P, math.radians(p.scan_resolution))
        deg = math.degrees
        r.table("scan", ["theta_ab", "theta_ac", "theta_bc", "lhs", "rhs", "satisfied", "sigma"],
                ([deg(w.theta_ab), deg(w.theta_ac), deg(w.theta_bc), w.lhs, w.rhs, w.satisfied, w.sigma] for w in scan.rows))
        w = scan.worst
        summary["scan"] = {
            "resolution_deg": p.scan_resolution,
            "rows": len(scan.rows),
            "violations": scan.n_violations,
            "max_violation": {"theta_ab": deg(w.theta_ab), "theta_ac": deg(w.theta_ac), "theta_bc": deg(w.theta_bc), "margin": w.margin},
        }
    r.json("summary.json", summary)
    r.summary = summary


SUBCOMMANDS: dict[str, tuple[type, Callable, str]] = {
    "blackbody": (BlackbodyParams, run_blackbody, "thermal mean energy from the fluctuation ODE vs the closed form"),
    "modulate": (ModulateParams, run_modulate, "carrier/modulation parameters of a boosted standing wave"),
    "diffract": (DiffractParams, run_diffract, "slit diffraction of the modulation wave"),
    "guide": (GuideParams, run_guide, "Langevin walkers in the diffracted energy landscape"),
    "evolve": (EvolveParams, run_evolve, "Liouville and/or Schrodinger evolution in a quadratic potential"),
    "wigner": (WignerParams, run_wigner, "phase-space density of a harmonic state"),
    "spin": (SpinParams, run_spin, "Pauli spin precession and Stern-Gerlach sampling"),
    "bell": (BellParams, run_bell, "Bell inequality for quantum and local hidden-variable correlations"),
}


# ---------------------------------------------------------------- parsing


def _floats(s: str) -> list:
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _coerce(name: str, value, default):
    """Validate a config-file value against the type of the default."""
    if isinstance(default, list):
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = [value]
        if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{name} must be a list of numbers")
        return [float(v) for v in value]
    if isinstance(default, bool) or isinstance(value, bool):
        raise ConfigError(f"{name}: unexpected boolean")
    if isinstance(default, int):
        if not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer")
        return value
    if isinstance(default, float):
        if not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{name} must be a string")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eikonal-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for name, (cls, _, help_) in SUBCOMMANDS.items():
        sp_ = subs.add_parser(name, help=help_, description=help_)
        sp_.add_argument("--config", help="JSON file of parameters (explicit flags win)")
        sp_.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit RNG seed (default 0)")
        sp_.add_argument("--out-dir", dest="out_dir", default=argparse.SUPPRESS, help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        sp_.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS, help="table format; svg adds plots")
        for f in dataclasses.fields(cls):
            default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
            flag = "--" + f.name.replace("_", "-")
            kw = {"dest": f.name, "default": argparse.SUPPRESS}
            if isinstance(default, list):
                kw.update(type=_floats, metavar="V[,V...]", help=f"default {','.join(repr(v) for v in default)}")
            elif f.name in CHOICES:
                kw.update(choices=CHOICES[f.name], help=f"default {default}")
            else:
                kw.update(type=type(default), help=f"default {default!r}")
            sp_.add_argument(flag, **kw)
    return parser


def resolve_config(ns: argparse.Namespace, environ=os.environ) -> RunConfig:
    cls = SUBCOMMANDS[ns.subcommand][0]
    names = {f.name for f in dataclasses.fields(cls)}
    defaults = cls()
    values: dict = {}
    top: dict = {}
    if getattr(ns, "config", None):
        try:
            data = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        # a manifest's resolved config can be fed straight back in
        if "params" in data and isinstance(data["params"], dict):
            if data.get("subcommand", ns.subcommand) != ns.subcommand:
                raise ConfigError(f"config is for {data['subcommand']!r}, not {ns.subcommand!r}")
            data = {**{k: v for k, v in data.items() if k not in ("params", "subcommand")}, **data["params"]}
        for k, v in data.items():
            if k in ("seed", "out_dir", "format"):
                top[k] = v
            elif k in names:
                values[k] = _coerce(k, v, getattr(defaults, k))
            else:
                raise ConfigError(f"unknown config key {k!r} for {ns.subcommand}")
    for k in names:
        if hasattr(ns, k):
            values[k] = getattr(ns, k)
    for k in ("seed", "out_dir", "format"):
        if hasattr(ns, k):
            top[k] = getattr(ns, k)
    for k, choices in CHOICES.items():
        if k in values and values[k] not in choices:
            raise ConfigError(f"{k} must be one of {choices}")
    params = dataclasses.replace(defaults, **values)
    seed = top.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not (0 <= seed < 2**64):
        raise ConfigError("seed must be an unsigned 64-bit integer")
    fmt = top.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    out_dir = top.get("out_dir") or environ.get(OUT_ENV) or DEFAULT_OUT
    return RunConfig(ns.subcommand, params, seed, str(out_dir), fmt)


def write_manifest(r: Run) -> Path:
    files = {p.name: io.sha256(p) for p in sorted(set(r.files))}
    manifest = {
        "tool": "eikonal-lab",
        "version": __version__,
        "config": r.cfg.to_dict(),
        "files": files,
        "summary": r.summary,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return io.write_json(r.out / "manifest.json", manifest)


def run(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if ns.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = resolve_config(ns)
    except ConfigError as exc:
        print(f"eikonal-lab: config error: {exc}", file=sys.stderr)
        return 2
    _, fn, _ = SUBCOMMANDS[cfg.subcommand]
    r = Run(cfg)
    try:
        fn(r, cfg.params)
    except ConfigError as exc:
        print(f"eikonal-lab: config error: {exc}", file=sys.stderr)
        return 2
    except NUMERIC_ERRORS as exc:
        print(f"eikonal-lab {cfg.subcommand}: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"eikonal-lab {cfg.subcommand}: invalid parameter: {exc}", file=sys.stderr)
        return 2
    write_manifest(r)
    print(io.dumps(r.summary), end="")
    return 0


def main() -> None:
    sys.exit(run())
