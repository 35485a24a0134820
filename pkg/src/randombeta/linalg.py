"""Dense Gaussian elimination over any exact field (Fraction, FieldElement)."""
from __future__ import annotations

from typing import Sequence


class SingularSolve(ValueError):
    pass


def nullspace_vector(rows: Sequence[Sequence], one) -> list:
    """Unique (up to scale) null vector of a square matrix with 1-dim kernel.

    Entries must support +, -, *, / and ``== 0``.  The result is scaled so its
    entries sum to ``one``.
    """
    M = [list(r) for r in rows]
    n = len(M)
    zero = one - one
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if not M[i][c] == 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = one / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(n):
            if i != r and not M[i][c] == 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        raise SingularSolve(f"kernel dimension {len(free)}, expected 1")
    fc = free[0]
    v = [zero] * n
    v[fc] = one
    for row, c in enumerate(pivots):
        v[c] = zero - M[row][fc]
    total = zero
    for x in v:
        total = total + x
    if total == 0:
        raise SingularSolve("null vector sums to zero")
    return [x / total for x in v]
