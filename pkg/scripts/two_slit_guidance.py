"""Two-slit modulation energy landscape, its node spacing and Langevin walkers relaxing onto it."""

import argparse
import math
from pathlib import Path

import numpy as np

from eikonal_lab import diffraction as df
from eikonal_lab import io, svg
from eikonal_lab.numerics import Grid1D, RngStream


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--walkers", type=int, default=100_000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--launch", choices=("window", "shadow"), default="window")
    ap.add_argument("--out", default="results/two_slit")
    args = ap.parse_args()

    lam = 1.0
    k = 2 * math.pi / lam
    ap_ = df.Aperture1D.double_slit(20 * lam, 2 * lam)
    det = Grid1D.from_bounds(-300, 300, 1201)
    rep = df.compare_to_schrodinger(ap_, k, 2000 * lam, det)
    energy = df.energy_density_field(df.diffract(k, ap_, 2000 * lam, det))
    launch = df.slit_shadow(ap_) if args.launch == "shadow" else None
    cfg = df.default_guidance_config(energy, RngStream(args.seed), launch=launch)
    hist = df.simulate_guidance(energy, args.walkers, cfg, workers=args.workers)
    prob = df.bin_probabilities(df.boltzmann_density(energy, cfg), det, hist.bin_edges)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    qm = df.schrodinger_screen_intensity(k, ap_, 2000 * lam, det)
    io.write_csv(out / "landscape.csv", ["y", "energy", "schrodinger"], zip(det.coords, energy.values, qm))
    io.write_csv(out / "histogram.csv", ["bin_center", "count", "boltzmann_prob"], zip(hist.centers, hist.counts, prob))
    io.write_json(out / "comparison.json", rep.to_dict())
    svg.line_plot(out / "landscape.svg", det.coords, [energy.values / energy.values.max(), qm / qm.max()], ["modulation energy", "|psi|^2"], "screen", "y", "normalized")
    svg.line_plot(out / "histogram.svg", hist.centers, [hist.counts / hist.total, prob], ["walkers", "Boltzmann"], "impacts", "y", "fraction")
    print(f"node spacing {rep.energy_node_spacing:.4f}, fringe spacing {rep.schrodinger_fringe_spacing:.4f}, rel diff {rep.rel_diff:.1e}")
    print(f"Pearson(histogram, Boltzmann) = {np.corrcoef(hist.counts, prob)[0, 1]:.4f}; peaks at {np.round(df.histogram_peaks(hist), 1)}")


if __name__ == "__main__":
    main()
