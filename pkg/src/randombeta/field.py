"""Exact arithmetic and ordering in a real algebraic number field Q(beta).

Elements live in the power basis 1, beta, ..., beta^(d-1) with rational
coefficients.  Ordering is decided without floating point: the designated
root is bracketed by dyadic rationals and elements are evaluated with
integer interval arithmetic, refining until the sign is certain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import sympy

Number = Union[int, Fraction]


class FieldError(ValueError):
    pass


class NoRootInInterval(FieldError):
    pass


class MultipleRootsInInterval(FieldError):
    pass


class IntegerRoot(FieldError):
    pass


class RootNotAboveOne(FieldError):
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and strings such as ``"7/2"`` exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def _fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# -- rational polynomial helpers (ascending coefficient lists) -------------

def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] -= c * bc
        a.pop()
        _trim(a)
    return _trim(q), a


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _trim(out)


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim([Fraction(c) for c in out])


def _inverse_mod(a: list, f: list) -> list:
    """Inverse of ``a`` modulo ``f`` by the extended Euclidean algorithm."""
    r0, r1 = _trim([Fraction(c) for c in f]), _trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if len(r0) != 1:
        raise DivisionByZero("element shares a factor with the minimal polynomial")
    g = r0[0]
    return [c / g for c in s0]


def _int_sign_at_dyadic(coeffs: Sequence[int], m: int, k: int) -> int:
    """Sign of sum c_i (m / 2^k)^i, scaled by 2^(k * deg)."""
    deg = len(coeffs) - 1
    total = 0
    for i, c in enumerate(coeffs):
        if c:
            total += c * m**i * (1 << (k * (deg - i)))
    return (total > 0) - (total < 0)


def _rational_sign(coeffs: Sequence[int], x: Fraction) -> int:
    value = sum(Fraction(c) * x**i for i, c in enumerate(coeffs))
    return (value > 0) - (value < 0)


# -- field context ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldContext:
    """The field Q(beta) for one designated real root beta > 1.

    ``minpoly`` is the irreducible factor (integer coefficients, ascending
    degree) of the user polynomial that vanishes at beta; ``input_minpoly``
    keeps what the user supplied.  ``lo < beta < hi`` with no integer in
    ``[lo, hi]``.
    """

    minpoly: tuple[int, ...]
    lo: Fraction
    hi: Fraction
    input_minpoly: tuple[int, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        d = self.degree
        lead = Fraction(self.minpoly[-1])
        # canonical vectors of beta^d .. beta^(2d-2)
        red = []
        cur = [-Fraction(c) / lead for c in self.minpoly[:-1]]
        for _ in range(max(d - 1, 0)):
            red.append(tuple(cur))
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            cur = [cur[i] + top * red[0][i] for i in range(d)]
        object.__setattr__(self, "_reduction", tuple(red))

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def floor_beta(self) -> int:
        return math.floor(self.lo)

    @property
    def beta(self) -> "FieldElement":
        if self.degree == 1:
            return self.element([Fraction(-self.minpoly[0], self.minpoly[1])])
        return self.element([0, 1])

    @property
    def zero(self) -> "FieldElement":
        return self.element([0])

    @property
    def one(self) -> "FieldElement":
        return self.element([1])

    def element(self, coeffs: Iterable[Number]) -> "FieldElement":
        """Element from power-basis coefficients (reduced if too long)."""
        c = [as_fraction(x) for x in coeffs]
        d = self.degree
        if len(c) <= d:
            return FieldElement(self, tuple(c + [Fraction(0)] * (d - len(c))))
        _, r = _poly_divmod(c, [Fraction(x) for x in self.minpoly])
        return FieldElement(self, tuple(r + [Fraction(0)] * (d - len(r))))

    def const(self, q: Number) -> "FieldElement":
        return self.element([q])

    # -- ordering machinery -------------------------------------------------

    def _bracket(self, k: int) -> tuple[int, int]:
        """Integers L, H = L + 1 with L / 2^k < beta < H / 2^k."""
        hit = self._cache.get(("bracket", k))
        if hit is not None:
            return hit
        coarser = [key[1] for key in self._cache
                   if isinstance(key, tuple) and key[0] == "bracket" and key[1] < k]
        if coarser:
            k0 = max(coarser)
            L0, H0 = self._cache[("bracket", k0)]
            L, H = L0 << (k - k0), H0 << (k - k0)
        else:
            L = math.floor(self.lo * (1 << k))
            H = math.ceil(self.hi * (1 << k))
        f = self.minpoly
        sL = _int_sign_at_dyadic(f, L, k)
        while H - L > 1:
            mid = (L + H) // 2
            if _int_sign_at_dyadic(f, mid, k) == sL:
                L = mid
            else:
                H = mid
        self._cache[("bracket", k)] = (L, H)
        return L, H

    def _powers(self, k: int) -> tuple[list[int], list[int]]:
        hit = self._cache.get(("powers", k))
        if hit is not None:
            return hit
        L, H = self._bracket(k)
        d = self.degree
        Lp = [L**i << (k * (d - 1 - i)) for i in range(d)]
        Hp = [H**i << (k * (d - 1 - i)) for i in range(d)]
        self._cache[("powers", k)] = (Lp, Hp)
        return Lp, Hp

    def sign_of(self, coeffs: Sequence[Fraction]) -> int:
        if not any(coeffs):
            return 0
        if self.degree == 1:
            return (coeffs[0] > 0) - (coeffs[0] < 0)
        den = 1
        for c in coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [c.numerator * (den // c.denominator) for c in coeffs]
        k = 64
        while True:
            Lp, Hp = self._powers(k)
            lower = upper = 0
            for i, n in enumerate(nums):
                if n > 0:
                    lower += n * Lp[i]
                    upper += n * Hp[i]
                elif n < 0:
                    lower += n * Hp[i]
                    upper += n * Lp[i]
            if lower > 0:
                return 1
            if upper < 0:
                return -1
            k *= 2

    def to_float(self, a: "FieldElement", rel_width: float = 2.0**-64) -> float:
        if self.degree == 1:
            return float(a.coeffs[0])
        width = float(self.hi - self.lo) * rel_width
        k = 64
        while 2.0**-k > width:
            k *= 2
        L, _ = self._bracket(k)
        mid = Fraction(2 * L + 1, 1 << (k + 1))
        return float(sum(c * mid**i for i, c in enumerate(a.coeffs) if c))

    @property
    def beta_float(self) -> float:
        return self.to_float(self.beta)

    def refine(self, steps: int) -> "FieldContext":
        """New context whose isolating interval is bisected ``steps`` times."""
        lo, hi = self.lo, self.hi
        if self.degree == 1:
            return self
        s_lo = _rational_sign(self.minpoly, lo)
        for _ in range(steps):
            mid = (lo + hi) / 2
            if _rational_sign(self.minpoly, mid) == s_lo:
                lo = mid
            else:
                hi = mid
        return FieldContext(self.minpoly, lo, hi, self.input_minpoly)

    def to_json(self) -> dict:
        return {
            "minpoly": list(self.minpoly),
            "interval": [_fraction_str(self.lo), _fraction_str(self.hi)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FieldContext":
        return make_field(data["minpoly"], data["interval"])

    def __repr__(self):
        return (f"FieldContext(minpoly={list(self.minpoly)}, "
                f"beta~{self.beta_float:.12g})")


def make_field(minpoly: Sequence[int], root_interval: Sequence) -> FieldContext:
    """Validate ``minpoly`` on ``root_interval`` and build the field context.

    ``minpoly`` is ascending-degree integer coefficients.  The root in the
    closed interval must be unique, above one, and not an integer.
    """
    coeffs = [int(c) for c in minpoly]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise FieldError("minimal polynomial must be non-constant")
    lo, hi = (as_fraction(v) for v in root_interval)
    if not lo < hi:
        raise FieldError(f"empty root interval ({lo}, {hi})")

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x)
    s_lo, s_hi = sympy.Rational(lo.numerator, lo.denominator), sympy.Rational(hi.numerator, hi.denominator)
    n_roots = poly.count_roots(s_lo, s_hi)
    if n_roots == 0:
        raise NoRootInInterval(f"no real root of {poly.as_expr()} in [{lo}, {hi}]")
    if n_roots > 1:
        raise MultipleRootsInInterval(f"{n_roots} real roots of {poly.as_expr()} in [{lo}, {hi}]")

    factor = None
    for fac, _mult in poly.factor_list()[1]:
        if fac.count_roots(s_lo, s_hi) == 1:
            factor = fac
            break
    assert factor is not None
    fc = [int(c) for c in reversed(factor.all_coeffs())]
    if fc[-1] < 0:
        fc = [-c for c in fc]

    if len(fc) == 2:
        root = Fraction(-fc[0], fc[1])
        if root.denominator == 1:
            raise IntegerRoot(f"root {root} is an integer")
        if root <= 1:
            raise RootNotAboveOne(f"root {root} is not > 1")
        return FieldContext(tuple(fc), root, root, tuple(coeffs))

    s_left = _rational_sign(fc, lo)
    while math.floor(hi) >= math.ceil(lo):
        mid = (lo + hi) / 2
        if _rational_sign(fc, mid) == s_left:
            lo = mid
        else:
            hi = mid
    if lo < 1:
        raise RootNotAboveOne(f"root lies in ({lo}, {hi}), not above 1")
    return FieldContext(tuple(fc), lo, hi, tuple(coeffs))


# -- elements --------------------------------------------------------------

class FieldElement:
    """Canonical element of Q(beta); immutable and hashable."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: FieldContext, coeffs: tuple[Fraction, ...]):
        self.ctx = ctx
        self.coeffs = coeffs
        self._hash = None

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx and other.ctx.minpoly != self.ctx.minpoly:
                raise FieldError("elements from different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.ctx, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.ctx, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.ctx, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.ctx, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.ctx.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        res = prod[:d]
        for m, row in enumerate(self.ctx._reduction):
            c = prod[d + m]
            if c:
                for i in range(d):
                    res[i] += c * row[i]
        return FieldElement(self.ctx, tuple(res))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("division by zero in Q(beta)")
        if self.ctx.degree == 1:
            return FieldElement(self.ctx, (1 / self.coeffs[0],))
        inv = _inverse_mod(_trim(list(self.coeffs)), [Fraction(c) for c in self.ctx.minpoly])
        return self.ctx.element(inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return FieldElement(self.ctx, tuple(a / other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.ctx.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def sign(self) -> int:
        return self.ctx.sign_of(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.coeffs == other.coeffs and self.ctx.minpoly == other.ctx.minpoly

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return self.ctx.to_float(self)

    def to_json(self) -> list[str]:
        return [_fraction_str(c) for c in self.coeffs]

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*b^{i}")
        return "(" + (" + ".join(terms) or "0") + ")"


def arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Binary operation ``op`` in {"add", "sub", "mul", "div"}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def sign(a: FieldElement) -> int:
    return a.sign()
