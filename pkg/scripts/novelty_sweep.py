"""Compare g-measures along a line of potentials with the Lebesgue chains.

For golden beta and theta = (0, t), print the top-digit weight, the scalar
test w_1 = 1/beta and the edge-table verdict for each coin bias p.

    python scripts/novelty_sweep.py --points 21
"""
import argparse
import math
from fractions import Fraction

import numpy as np

from randombeta.measures import build_lebesgue_chain, build_measure, novelty_check
from randombeta.pipeline import golden


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--span", type=float, default=2.0, help="t ranges over [-span, span]")
    ap.add_argument("--ps", default="1/4,1/2,3/4")
    args = ap.parse_args()
    pipe = golden()
    chains = [build_lebesgue_chain(pipe.partition, pipe.sft, Fraction(p)) for p in args.ps.split(",")]
    ts = list(np.linspace(-args.span, args.span, args.points)) + [math.log(pipe.ctx.beta_float)]
    print(f"{'t':>10} {'w_1':>10} {'w_1=1/beta':>11} " + " ".join(f"p={c.p!s:>5}" for c in chains))
    for t in ts:
        rep = build_measure(pipe.sft, [0.0, float(t)])
        res = [novelty_check(rep, c) for c in chains]
        verdicts = " ".join(f"{'distinct' if r.distinct else 'same':>7}" for r in res)
        print(f"{t:10.5f} {rep.weights[1]:10.6f} {str(res[0].scalar_condition):>11} {verdicts}")


if __name__ == "__main__":
    main()
