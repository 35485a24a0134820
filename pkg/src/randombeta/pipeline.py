"""One-call construction of field, class-B certificate, partition and SFT."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .field import FieldContext, make_field
from .partition import ClassBResult, NotClassB, PartitionC, build_partition, is_class_B
from .sft import SftCoding, build_sft

GOLDEN = ((-1, -1, 1), (Fraction(1), Fraction(2)))
# beta^4 - 3 beta^3 - beta^2 - 2 beta - 3 = 0, beta ~ 3.5155
QUARTIC = ((-3, -2, -1, -3, 1), (Fraction(7, 2), Fraction(18, 5)))


class ClassBUnknown(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Pipeline:
    ctx: FieldContext
    certificate: ClassBResult
    partition: PartitionC
    sft: SftCoding


def build_pipeline(minpoly: Sequence[int], interval: Sequence, budget: int = 10_000) -> Pipeline:
    """Raises NotClassB for a 'no' verdict and ClassBUnknown when the budget runs out."""
    ctx = make_field(minpoly, interval)
    cert = is_class_B(ctx, budget)
    if cert.verdict == "unknown":
        raise ClassBUnknown(f"orbit closure exceeded budget {budget}")
    if cert.verdict == "no":
        raise NotClassB(f"critical orbit enters a switch interior at {float(cert.witness):.12g}")
    part = build_partition(ctx, cert.orbit)
    return Pipeline(ctx, cert, part, build_sft(part))


def golden(budget: int = 10_000) -> Pipeline:
    return build_pipeline(*GOLDEN, budget=budget)


def quartic(budget: int = 10_000) -> Pipeline:
    return build_pipeline(*QUARTIC, budget=budget)
