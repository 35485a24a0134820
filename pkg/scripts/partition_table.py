"""Print the Markov partition, SFT and orbit set for a list of fields.

    python scripts/partition_table.py
    python scripts/partition_table.py --minpoly -1,-1,-1,1 --interval 1 2
"""
import argparse
from fractions import Fraction

from randombeta.partition import check_partition
from randombeta.pipeline import GOLDEN, QUARTIC, build_pipeline
from randombeta.sft import check_primitive


def show(minpoly, interval, budget):
    pipe = build_pipeline(minpoly, interval, budget)
    part, sft = pipe.partition, pipe.sft
    print(f"minpoly {minpoly} on {interval[0]}..{interval[1]}: beta = {pipe.ctx.beta_float:.12f}, "
          f"|F| = {len(pipe.certificate.orbit.points)}, K = {part.K}")
    for j, (cell, lab) in enumerate(zip(part.cells, part.labels)):
        lo, hi = cell.approx()
        kind = f"S_{lab.value}" if lab.kind == "switch" else f"E_{lab.value}"
        succ = " ".join(str(i) for i in range(sft.n_states) if sft.adjacency[j, i])
        print(f"  C{j:<3} {'[' if cell.lo_closed else '('}{lo:.6f}, {hi:.6f}{']' if cell.hi_closed else ')'}"
              f"  {kind:<5} -> {succ}")
    print(f"  primitive exponent {check_primitive(sft)}, incoming digit bijection "
          f"{sft.has_incoming_digit_bijection()}, problems {check_partition(part)}")
    print()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--minpoly", default=None, help="ascending integer coefficients")
    ap.add_argument("--interval", nargs=2, default=None)
    ap.add_argument("--budget", type=int, default=100_000)
    args = ap.parse_args()
    if args.minpoly:
        fields = [([int(c) for c in args.minpoly.split(",")], [Fraction(x) for x in args.interval or (1, 2)])]
    else:
        fields = [GOLDEN, QUARTIC, ([-1, -1, -1, 1], (1, 2)), ([-1, -2, 1], (2, 3))]
    for minpoly, interval in fields:
        show(list(minpoly), [Fraction(x) for x in interval], args.budget)


if __name__ == "__main__":
    main()
