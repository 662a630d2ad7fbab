"""Coplanar Bell scan for the quantum correlation and the local sign model."""

import argparse
import math
from pathlib import Path

from eikonal_lab import bell as bl
from eikonal_lab import io
from eikonal_lab.numerics import RngStream


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--resolution", type=float, default=5.0, help="degrees; must divide 180")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/bell")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mc = bl.MonteCarloCorrelation(bl.SIGN_MODEL, args.trials, RngStream(args.seed))
    summary = {}
    for name, P in (("qm", bl.qm_correlation), ("sign_exact", bl.sign_correlation), ("sign_mc", mc)):
        scan = bl.violation_scan(P, math.radians(args.resolution))
        io.write_csv(
            out / f"scan_{name}.csv",
            ["theta_ab", "theta_ac", "lhs", "rhs", "satisfied", "sigma"],
            ([math.degrees(r.theta_ab), math.degrees(r.theta_ac), r.lhs, r.rhs, r.satisfied, r.sigma] for r in scan.rows),
        )
        w = scan.worst
        summary[name] = {"violations": scan.n_violations, "rows": len(scan.rows), "worst": [math.degrees(w.theta_ab), math.degrees(w.theta_ac), w.margin]}
        print(f"{name:10s} {scan.n_violations:5d}/{len(scan.rows)} rows violated; worst margin {w.margin:+.4f} at ({math.degrees(w.theta_ab):.0f}, {math.degrees(w.theta_ac):.0f}) deg")
    z = bl.coplanar_axis(0.0)
    summary["angles"] = []
    for deg in range(0, 181, 15):
        th = math.radians(deg)
        b = bl.coplanar_axis(th)
        est = mc.estimate(z, b)
        proj = bl.projection_correlation(z, b, args.trials, RngStream(args.seed, 1 + deg))
        summary["angles"].append({"deg": deg, "qm": bl.qm_correlation(z, b), "sign_exact": bl.sign_correlation(z, b), "sign_mc": est.to_dict(), "projection": proj.to_dict()})
    io.write_json(out / "summary.json", summary)


if __name__ == "__main__":
    main()
