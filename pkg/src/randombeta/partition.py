"""Switch regions, critical orbits, class-B certification and the Markov
partition of the random beta-transformation.

Regions on I = [0, b/(beta-1)] with b = floor(beta)::

    E_0 = [0, 1/beta)
    E_k = (c + (k-1)/beta, (k+1)/beta)      1 <= k <= b-1
    E_b = (c + (b-1)/beta, b/(beta-1)]
    S_k = [k/beta, c + (k-1)/beta]          1 <= k <= b

where c = b / (beta (beta - 1)).  On E_k the map is T_k(x) = beta x - k; on
S_k a coin chooses T_{k-1} or T_k.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .field import FieldContext, FieldElement

log = logging.getLogger(__name__)


class PartitionError(ValueError):
    pass


class NotClassB(PartitionError):
    pass


# -- regions ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Regions:
    """Exact endpoints of the E_k / S_k regions for one field."""

    ctx: FieldContext
    b: int
    right: FieldElement                 # b / (beta - 1)
    s_lo: tuple[FieldElement, ...]      # k / beta, k = 1..b
    s_hi: tuple[FieldElement, ...]      # c + (k-1)/beta, k = 1..b

    @classmethod
    def of(cls, ctx: FieldContext) -> "Regions":
        hit = ctx._cache.get("regions")
        if hit is not None:
            return hit
        beta, b = ctx.beta, ctx.floor_beta
        inv = 1 / beta
        right = b / (beta - 1)
        c = right * inv
        s_lo = tuple(inv * k for k in range(1, b + 1))
        s_hi = tuple(c + inv * (k - 1) for k in range(1, b + 1))
        reg = cls(ctx, b, right, s_lo, s_hi)
        ctx._cache["regions"] = reg
        return reg

    def classify(self, x: FieldElement) -> tuple[str, int]:
        """("S", k) if x lies in the closed switch region S_k, else ("E", k)."""
        if x < 0 or x > self.right:
            raise PartitionError(f"{float(x)} lies outside I_beta")
        for k in range(1, self.b + 1):
            if x < self.s_lo[k - 1]:
                return ("E", k - 1)
            if x <= self.s_hi[k - 1]:
                return ("S", k)
        return ("E", self.b)

    def in_switch_interior(self, x: FieldElement) -> Optional[int]:
        for k in range(1, self.b + 1):
            if self.s_lo[k - 1] < x < self.s_hi[k - 1]:
                return k
        return None

    def step(self, x: FieldElement) -> tuple[FieldElement, ...]:
        """Set-valued image of x under all branches of K_beta."""
        kind, k = self.classify(x)
        beta = self.ctx.beta
        if kind == "E":
            return (beta * x - k,)
        return (beta * x - (k - 1), beta * x - k)

    def greedy(self, x: FieldElement) -> FieldElement:
        kind, k = self.classify(x)
        return self.ctx.beta * x - k


def critical_points(ctx: FieldContext) -> list[FieldElement]:
    """k/beta and b/(beta(beta-1)) + k/beta for 0 <= k <= b, sorted, deduplicated."""
    reg = Regions.of(ctx)
    inv = 1 / ctx.beta
    c = reg.right * inv
    pts = {inv * k for k in range(reg.b + 1)} | {c + inv * k for k in range(reg.b + 1)}
    return sorted(pts)


# -- orbit closure ----------------------------------------------------------

@dataclass
class OrbitSetF:
    points: set
    edges: dict
    truncated: bool

    def sorted_points(self) -> list[FieldElement]:
        return sorted(self.points)


def orbit_closure(ctx: FieldContext, budget: int = 100_000, stop_on=None) -> OrbitSetF:
    """Breadth-first closure of the critical points under the set-valued map.

    Stops with ``truncated=True`` once more than ``budget`` points are known.
    ``stop_on(x)`` may return True to abort early (used by :func:`is_class_B`).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    reg = Regions.of(ctx)
    start = critical_points(ctx)
    points = set(start)
    edges: dict = {}
    if len(points) > budget:
        return OrbitSetF(points, edges, True)
    queue = deque(start)
    while queue:
        x = queue.popleft()
        if stop_on is not None and stop_on(x):
            return OrbitSetF(points, edges, True)
        succ = reg.step(x)
        edges[x] = set(succ)
        for y in succ:
            if y not in points:
                points.add(y)
                if len(points) > budget:
                    return OrbitSetF(points, edges, True)
                queue.append(y)
    return OrbitSetF(points, edges, False)


class ClassBResult(NamedTuple):
    verdict: str                       # "yes" | "no" | "unknown"
    witness: Optional[FieldElement]
    orbit: OrbitSetF

    @property
    def is_yes(self) -> bool:
        return self.verdict == "yes"


def is_class_B(ctx: FieldContext, budget: int = 100_000) -> ClassBResult:
    reg = Regions.of(ctx)
    found: list = []

    def violates(x):
        if reg.in_switch_interior(x) is not None:
            found.append(x)
            return True
        return False

    orbit = orbit_closure(ctx, budget, stop_on=violates)
    if found:
        return ClassBResult("no", found[0], orbit)
    # points added after the last dequeue still need the interior test
    for x in orbit.points:
        if reg.in_switch_interior(x) is not None:
            return ClassBResult("no", x, orbit)
    if orbit.truncated:
        return ClassBResult("unknown", None, orbit)
    return ClassBResult("yes", None, orbit)


# -- partition --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IntervalQB:
    lo: FieldElement
    hi: FieldElement
    lo_closed: bool
    hi_closed: bool

    def __post_init__(self):
        if not self.lo < self.hi:
            raise PartitionError("degenerate or reversed interval")

    def contains(self, x: FieldElement) -> bool:
        left = x > self.lo or (self.lo_closed and x == self.lo)
        right = x < self.hi or (self.hi_closed and x == self.hi)
        return left and right

    def hull_contains(self, lo: FieldElement, hi: FieldElement) -> bool:
        return self.lo <= lo and hi <= self.hi

    def image(self, k: int) -> "IntervalQB":
        beta = self.lo.ctx.beta
        return IntervalQB(beta * self.lo - k, beta * self.hi - k, self.lo_closed, self.hi_closed)

    @property
    def length(self) -> FieldElement:
        return self.hi - self.lo

    @property
    def midpoint(self) -> FieldElement:
        return (self.lo + self.hi) / 2

    def approx(self) -> tuple[float, float]:
        return (float(self.lo), float(self.hi))

    def to_json(self) -> dict:
        return {
            "lo": self.lo.to_json(),
            "hi": self.hi.to_json(),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
            "approx": list(self.approx()),
        }

    def __repr__(self):
        l = "[" if self.lo_closed else "("
        r = "]" if self.hi_closed else ")"
        return f"{l}{float(self.lo):.6f}, {float(self.hi):.6f}{r}"


class CellLabel(NamedTuple):
    kind: str   # "digit" or "switch"
    value: int

    def to_json(self) -> dict:
        return {self.kind: self.value}


def greedy_family(ctx: FieldContext, start: FieldElement, limit: int = 100_000) -> list[FieldElement]:
    """The start point followed by its greedy iterates while they stay in the
    equality regions (the closing switch-region point is not included)."""
    reg = Regions.of(ctx)
    out = [start]
    seen = {start}
    x = start
    while reg.classify(x)[0] == "E":
        x = reg.greedy(x)
        if x in seen or reg.classify(x)[0] == "S":
            break
        out.append(x)
        seen.add(x)
        if len(out) > limit:
            raise PartitionError("greedy orbit did not close")
    return out


@dataclass(frozen=True, eq=False)
class PartitionC:
    ctx: FieldContext
    cells: tuple[IntervalQB, ...]
    labels: tuple[CellLabel, ...]
    M_sets: tuple[tuple[int, ...], ...]
    switch_indices: tuple[int, ...]        # cell index of s_1..s_b
    family_one: tuple[FieldElement, ...]
    family_right: tuple[FieldElement, ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def K(self) -> int:
        return len(self.cells) - 1

    @property
    def floor_beta(self) -> int:
        return self.ctx.floor_beta

    def is_switch(self, j: int) -> bool:
        return self.labels[j].kind == "switch"

    def cell_index(self, x: FieldElement) -> list[int]:
        """Indices of every cell containing x (two at a shared closed endpoint)."""
        return [j for j, c in enumerate(self.cells) if c.contains(x)]

    def image_cells(self, j: int, digit: int) -> tuple[list[int], list[str]]:
        """Cells composing T_digit(C_j), plus any exactness problems."""
        img = self.cells[j].image(digit)
        problems = []
        lo_idx = hi_idx = None
        for i, c in enumerate(self.cells):
            if c.lo == img.lo:
                lo_idx = i
            if c.hi == img.hi:
                hi_idx = i
        if lo_idx is None or hi_idx is None or lo_idx > hi_idx:
            raise PartitionError(f"image of cell {j} under T_{digit} is not a union of cells")
        if self.cells[lo_idx].lo_closed != img.lo_closed:
            problems.append(f"T_{digit}(C_{j}) left endpoint openness differs from C_{lo_idx}")
        if self.cells[hi_idx].hi_closed != img.hi_closed:
            problems.append(f"T_{digit}(C_{j}) right endpoint openness differs from C_{hi_idx}")
        return list(range(lo_idx, hi_idx + 1)), problems

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "cells": [dict(c.to_json(), label=l.to_json()) for c, l in zip(self.cells, self.labels)],
            "M_sets": [list(m) for m in self.M_sets],
            "switch_indices": list(self.switch_indices),
            "notes": list(self.notes),
        }


def build_partition(ctx: FieldContext, F: Optional[OrbitSetF] = None, budget: int = 100_000) -> PartitionC:
    """Refine the E/S partition by the finite critical-orbit set ``F``."""
    if F is None:
        res = is_class_B(ctx, budget)
        if not res.is_yes:
            raise NotClassB(f"class-B verdict is {res.verdict!r}")
        F = res.orbit
    if F.truncated:
        raise NotClassB("orbit set is truncated")
    reg = Regions.of(ctx)
    for x in F.points:
        k = reg.in_switch_interior(x)
        if k is not None:
            raise NotClassB(f"orbit point {float(x)} lies inside S_{k}")

    pts = F.sorted_points()
    one = ctx.one
    fam1 = greedy_family(ctx, one)
    famR = greedy_family(ctx, reg.right - 1)
    missing = [x for x in fam1 + famR if x not in F.points]
    if missing:
        raise PartitionError("greedy orbit points missing from F")
    in1, inR = set(fam1), set(famR)
    notes = []

    spans = list(zip(pts[:-1], pts[1:]))
    kinds = [reg.classify((lo + hi) / 2) for lo, hi in spans]
    switch = [k[0] == "S" for k in kinds]
    lo_closed = [False] * len(spans)
    hi_closed = [False] * len(spans)
    lo_closed[0] = True
    hi_closed[-1] = True
    for j in range(1, len(spans)):
        p = pts[j]
        left_sw, right_sw = switch[j - 1], switch[j]
        a, r = p in in1, p in inR
        if a and r:
            notes.append(f"point {float(p):.9f} is in both orbit families; closed on the left")
        if (a or r) and (left_sw or right_sw):
            notes.append(f"orbit point {float(p):.9f} is also a switch-region endpoint")
        lo_closed[j] = right_sw or a
        hi_closed[j - 1] = left_sw or (r and not a)
        if not (lo_closed[j] or hi_closed[j - 1]):
            notes.append(f"point {float(p):.9f} belongs to no orbit family; assigned to the right cell")
            lo_closed[j] = True
    for n in notes:
        log.info(n)

    cells = tuple(IntervalQB(lo, hi, lc, hc) for (lo, hi), lc, hc in zip(spans, lo_closed, hi_closed))
    labels = []
    b = reg.b
    M = [[] for _ in range(b + 1)]
    sw = [None] * b
    for j, (kind, k) in enumerate(kinds):
        if kind == "S":
            if not (cells[j].lo == reg.s_lo[k - 1] and cells[j].hi == reg.s_hi[k - 1]):
                raise PartitionError(f"switch region S_{k} is split across cells")
            labels.append(CellLabel("switch", k))
            sw[k - 1] = j
        else:
            labels.append(CellLabel("digit", k))
            M[k].append(j)
    part = PartitionC(ctx, cells, tuple(labels), tuple(tuple(m) for m in M), tuple(sw),
                      tuple(fam1), tuple(famR), tuple(notes))
    problems = check_partition(part)
    hard = [p for p in problems if not p.startswith("openness:")]
    if hard:
        raise PartitionError("; ".join(hard))
    if problems:
        object.__setattr__(part, "notes", part.notes + tuple(problems))
    return part


def check_partition(part: PartitionC) -> list[str]:
    """Check the structural properties of the partition exactly.

    Returns a list of problems; entries starting with ``"openness:"`` concern
    only which cell a shared endpoint belongs to.
    """
    ctx = part.ctx
    reg = Regions.of(ctx)
    cells, K, b = part.cells, part.K, reg.b
    out = []
    zero, one = ctx.zero, ctx.one

    # (i) outer cells
    c0, cK = cells[0], cells[K]
    if not (c0.lo == zero and c0.hi == reg.right - 1 and c0.lo_closed and c0.hi_closed):
        out.append("C_0 is not [0, b/(beta-1) - 1]")
    if not (cK.lo == one and cK.hi == reg.right and cK.lo_closed and cK.hi_closed):
        out.append("C_K is not [1, b/(beta-1)]")

    # cover: consecutive, each shared endpoint owned by at least one side
    if cells[0].lo != zero or cells[-1].hi != reg.right:
        out.append("cells do not span I_beta")
    for j in range(K):
        if cells[j].hi != cells[j + 1].lo:
            out.append(f"gap or overlap between C_{j} and C_{j+1}")
        elif not (cells[j].hi_closed or cells[j + 1].lo_closed):
            out.append(f"point between C_{j} and C_{j+1} is uncovered")
        elif cells[j].hi_closed and cells[j + 1].lo_closed and not (part.is_switch(j) or part.is_switch(j + 1)):
            out.append(f"C_{j} and C_{j+1} overlap outside a switch endpoint")

    # (ii) equality regions are unions of their cells
    for k, idx in enumerate(part.M_sets):
        if not idx:
            out.append(f"M_{k} is empty")
            continue
        if list(idx) != list(range(idx[0], idx[-1] + 1)):
            out.append(f"M_{k} is not contiguous")
        lo = zero if k == 0 else reg.s_hi[k - 1]
        hi = reg.right if k == b else reg.s_lo[k]
        if cells[idx[0]].lo != lo or cells[idx[-1]].hi != hi:
            out.append(f"E_{k} is not the union of the cells in M_{k}")
    for k in range(b + 1):
        if len(part.M_sets[k]) != len(part.M_sets[b - k]):
            out.append(f"|M_{k}| != |M_{b-k}|")

    # (iii) switch regions are single cells
    if any(s is None for s in part.switch_indices):
        out.append("some switch region has no cell")

    # (iv) images of equality cells
    for j, lab in enumerate(part.labels):
        if lab.kind == "digit":
            try:
                _, probs = part.image_cells(j, lab.value)
            except PartitionError as e:
                out.append(str(e))
                continue
            out.extend("openness: " + p for p in probs)

    # (v) switch cells map onto the outer cells
    for i, j in enumerate(part.switch_indices, start=1):
        if j is None:
            continue
        s = cells[j]
        g, l = s.image(i), s.image(i - 1)
        if not (g.lo == c0.lo and g.hi == c0.hi):
            out.append(f"T_{i}(S_{i}) != C_0")
        if not (l.lo == cK.lo and l.hi == cK.hi):
            out.append(f"T_{i-1}(S_{i}) != C_K")
    return out
