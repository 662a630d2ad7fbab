"""Thermal mean energy from the fluctuation ODE against the closed form over hbar*omega/kT in [0.1, 20]."""

import argparse
import time
from pathlib import Path

import numpy as np

from eikonal_lab import io, svg
from eikonal_lab.spectrum import SpectralMode, fluctuation_decomposition, planck_energy, solve_thermal_ode


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=50)
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--out", default="results/planck")
    args = ap.parse_args()

    mode = SpectralMode(1.0)
    xs = np.geomspace(0.1, 20, args.points)
    Ts = mode.quantum / (mode.kappa * xs)
    t0 = time.perf_counter()
    ode = solve_thermal_ode(mode, Ts, args.tol)
    elapsed = time.perf_counter() - t0
    closed = [planck_energy(mode, T) for T in Ts]
    rows = []
    for x, T, e, c in zip(xs, Ts, ode, closed):
        wave, particle = fluctuation_decomposition(e, 0.5 * mode.quantum)
        rows.append([x, T, e, c, abs(e / c - 1), wave, particle])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_csv(out / "planck.csv", ["x", "T", "E_ode", "E_closed", "rel_err", "wave_term", "particle_term"], rows)
    svg.line_plot(out / "planck.svg", np.log10(xs), [np.log10(ode), np.log10(closed)], ["ODE", "closed form"], "thermal mean energy", "log10 x", "log10 E")
    print(f"max rel err {max(r[4] for r in rows):.2e} in {elapsed:.3f} s -> {out}")


if __name__ == "__main__":
    main()
