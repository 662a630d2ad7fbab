"""Liouville flow of a coherent-state density vs the phase-space density of the Schrodinger-evolved state."""

import argparse
import math
from pathlib import Path

import numpy as np

from eikonal_lab import io, svg
from eikonal_lab import phase_space as ps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=256)
    ap.add_argument("--periods", type=float, default=1.0)
    ap.add_argument("--samples", type=int, default=16)
    ap.add_argument("--out", default="results/correspondence")
    args = ap.parse_args()

    sys_ = ps.SystemParams()
    V = ps.QuadraticPotential.harmonic(sys_, 1.0)
    x0, p0 = 2.0, 0.5
    amp = math.hypot(x0, p0)
    psi0 = ps.WaveFunction.coherent(ps.grid_for_state(-amp, amp, math.sqrt(0.5), args.points), x0, p0, sys_, 1.0)
    T = 2 * math.pi * args.periods

    rows = []
    for t in np.linspace(0, T, args.samples + 1):
        rep, rho, w = ps.correspondence_check(psi0, V, sys_, float(t))
        rows.append([rep.t, rep.l1, rep.x_gap, rep.p_gap, ps.expectation(rho, "x", V, sys_), ps.expectation(rho, "p", V, sys_)])
    ehr = ps.ehrenfest_check(psi0, V, sys_, (0.0, T))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_csv(out / "correspondence.csv", ["t", "l1", "x_gap", "p_gap", "x_mean", "p_mean"], rows)
    io.save_density(out / "density_final.csv", rho, sys_)
    g = rho.grid
    svg.heatmap(out / "density_final.svg", rho.values, (g.gx.x0, g.gx.x_max), (g.gp.x0, g.gp.x_max), "Liouville density", "x", "p")
    print(f"max L1 {max(r[1] for r in rows):.1e}, max |dx| {max(r[2] for r in rows):.1e}, max |dp| {max(r[3] for r in rows):.1e}, Ehrenfest {ehr:.1e}")


if __name__ == "__main__":
    main()
