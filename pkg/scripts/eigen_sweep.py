"""Sweep alpha and truncation depth: power-iteration eigenvalue, residual and its bound.

    python scripts/eigen_sweep.py --field golden --theta 0,0.693147 --out eigen.csv
"""
import argparse
import csv
import sys

from randombeta.pipeline import golden, quartic
from randombeta.thermo import PotentialSpec, depth_for_tolerance, eigen_residual, power_lambda, residual_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--field", choices=["golden", "quartic"], default="golden")
    ap.add_argument("--theta", default=None, help="comma-separated digit potential")
    ap.add_argument("--alphas", default="1.5,2,3,4")
    ap.add_argument("--tol", type=float, default=1e-8, help="variation-tail target for the largest depth")
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args()
    pipe = golden() if args.field == "golden" else quartic()
    nd = pipe.sft.n_digits
    theta = tuple(float(x) for x in args.theta.split(",")) if args.theta else tuple(0.1 * i for i in range(nd))
    rows = []
    for alpha in (float(a) for a in args.alphas.split(",")):
        spec = PotentialSpec(theta, alpha)
        spec.check(pipe.sft)
        top = depth_for_tolerance(spec, args.tol)
        for n in sorted({2, 4, 8, top // 2, top} - {0, 1}):
            res = power_lambda(pipe.sft, spec, n)
            rows.append([alpha, n, spec.lam, res.lambda_est, abs(res.lambda_est - spec.lam),
                         eigen_residual(pipe.sft, spec, n), residual_bound(spec, n), res.method])
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    wr = csv.writer(fh)
    wr.writerow(["alpha", "depth", "lambda_closed", "lambda_power", "abs_error", "residual", "residual_bound",
                 "method"])
    wr.writerows(rows)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
