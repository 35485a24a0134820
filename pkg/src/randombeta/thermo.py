"""Potentials phi_{theta,alpha}, transfer operators on cylinder functions,
power iteration and eigen-residual checks.

Two interchangeable representations of depth-n functions are provided:

* :class:`CylinderFunction` tabulates values over every admissible word of
  length n.  Exact but exponential in n.
* :class:`DigitProductFunction` stores f(y) = exp(s + sum_j g_j(e_j(y))) for
  digit positions j = 0..n-2.  The transfer operator maps this family into
  itself (every state has exactly one predecessor per digit), so power
  iteration and eigen-residual bounds run at any depth in O(n b) time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .sft import SftCoding, WordTooShort


class DepthMismatch(ValueError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, iters: int):
        super().__init__(f"power iteration did not converge in {iters} iterations")
        self.iters = iters


MAX_TABULATED_WORDS = 4_000_000


@dataclass(frozen=True)
class PotentialSpec:
    theta: tuple[float, ...]
    alpha: float

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError("alpha must exceed 1")
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))

    @property
    def ratio(self) -> float:
        return (self.alpha - 1) / self.alpha

    @property
    def theta_norm(self) -> float:
        return max(abs(t) for t in self.theta)

    @property
    def lam(self) -> float:
        """Closed-form eigenvalue sum_i exp(theta(i))."""
        return float(np.exp(np.asarray(self.theta)).sum())

    def position_weights(self, m: int) -> np.ndarray:
        """Coefficients (alpha-1)^j / alpha^(j+1) for digit positions j < m."""
        return self.ratio ** np.arange(m) / self.alpha

    def check(self, sft: SftCoding) -> None:
        if len(self.theta) != sft.n_digits:
            raise ValueError(f"theta needs {sft.n_digits} entries, got {len(self.theta)}")


def variation_tail(spec: PotentialSpec, n: int) -> float:
    """Upper bound 2 ||theta|| ((alpha-1)/alpha)^n for var_n(phi_{theta,alpha})."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2 * spec.theta_norm * spec.ratio**n


def depth_for_tolerance(spec: PotentialSpec, tol: float) -> int:
    """Smallest depth n >= 2 with variation_tail(spec, n - 1) < tol."""
    n = 2
    while variation_tail(spec, n - 1) >= tol:
        n += 1
    return n


def potential_truncated(sft: SftCoding, spec: PotentialSpec, word: Sequence[int]) -> tuple[float, float]:
    """phi summed over the digits the word determines, and the tail bound."""
    n = len(word)
    if n < 2:
        raise WordTooShort("potential needs at least one digit")
    spec.check(sft)
    sft.check_admissible(word)
    d = sft.word_digits(word)
    theta = np.asarray(spec.theta)
    value = float(theta[d] @ spec.position_weights(n - 1))
    return value, spec.theta_norm * spec.ratio ** (n - 1)


# -- tabulated cylinder functions -------------------------------------------

class WordIndex:
    """Admissible words of one length with O(log N) lookup by code."""

    def __init__(self, sft: SftCoding, depth: int):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.sft = sft
        self.depth = depth
        self.base = sft.n_states
        if self.base ** depth >= 2**62:
            raise ValueError("depth too large for tabulation")
        self.words = sft.words(depth)
        if len(self.words) > MAX_TABULATED_WORDS:
            raise ValueError(f"{len(self.words)} words exceed the tabulation limit")
        self.codes = self.encode(self.words)

    def encode(self, words: np.ndarray) -> np.ndarray:
        place = self.base ** np.arange(words.shape[1] - 1, -1, -1, dtype=np.int64)
        return words.astype(np.int64) @ place

    def lookup(self, codes: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.codes, codes)
        if np.any(idx >= len(self.codes)) or np.any(self.codes[np.minimum(idx, len(self.codes) - 1)] != codes):
            raise KeyError("inadmissible word")
        return idx

    def __len__(self):
        return len(self.words)


@dataclass
class CylinderFunction:
    index: WordIndex
    values: np.ndarray

    @property
    def depth(self) -> int:
        return self.index.depth

    @property
    def words(self) -> np.ndarray:
        return self.index.words

    def __call__(self, word: Sequence[int]) -> float:
        code = self.index.encode(np.asarray([word]))
        return float(self.values[self.index.lookup(code)[0]])

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values: np.ndarray) -> "CylinderFunction":
        return CylinderFunction(self.index, values)

    @classmethod
    def from_callable(cls, sft: SftCoding, depth: int, fn: Callable[[np.ndarray], np.ndarray],
                      index: Optional[WordIndex] = None) -> "CylinderFunction":
        """``fn`` receives the (N, depth) word array and returns N values."""
        index = index or WordIndex(sft, depth)
        return cls(index, np.asarray(fn(index.words), dtype=float))

    @classmethod
    def constant(cls, sft: SftCoding, depth: int, value: float = 1.0, index=None) -> "CylinderFunction":
        return cls.from_callable(sft, depth, lambda w: np.full(len(w), value), index)

    @classmethod
    def indicator(cls, sft: SftCoding, depth: int, state: int, index=None) -> "CylinderFunction":
        return cls.from_callable(sft, depth, lambda w: (w[:, 0] == state).astype(float), index)


class TransferOperator:
    """L f(y) = sum over predecessors z = (i, y_0..y_{n-2}) of e^{phi_n(z)} f(z)."""

    def __init__(self, sft: SftCoding, spec: PotentialSpec, depth: int, index: Optional[WordIndex] = None):
        if depth < 2:
            raise WordTooShort("transfer operator needs depth >= 2")
        spec.check(sft)
        self.sft, self.spec, self.depth = sft, spec, depth
        self.index = index or WordIndex(sft, depth)
        if self.index.depth != depth:
            raise DepthMismatch("word index depth differs from operator depth")
        words = self.index.words
        theta = np.asarray(spec.theta)
        digits = sft.digits[words[:, :-1], words[:, 1:]]
        self.phi = theta[digits] @ spec.position_weights(depth - 1)

        # predecessor of state j carrying digit d
        nd = sft.n_digits
        pred = np.full((sft.n_states, nd), -1, dtype=np.int64)
        for (i, j), d in sft.digit_label.items():
            pred[j, d] = i
        if np.any(pred < 0):
            raise ValueError("SFT lacks the incoming digit bijection")
        base = self.index.base
        head = self.index.codes // base                       # code of y_0..y_{n-2}
        lead = pred[words[:, 0]]                              # (N, nd)
        zcodes = lead * base ** (depth - 1) + head[:, None]
        self.pre = self.index.lookup(zcodes.ravel()).reshape(zcodes.shape)
        self.weights = np.exp(self.phi[self.pre])

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        return (self.weights * values[self.pre]).sum(axis=1)

    def __call__(self, f: CylinderFunction) -> CylinderFunction:
        if f.depth != self.depth or f.index.sft is not self.sft:
            raise DepthMismatch(f"function depth {f.depth} vs operator depth {self.depth}")
        return f.with_values(self.apply_values(f.values))


def transfer_apply(sft: SftCoding, spec: PotentialSpec, f: CylinderFunction) -> CylinderFunction:
    if f.depth < 2:
        raise WordTooShort("transfer operator needs depth >= 2")
    return TransferOperator(sft, spec, f.depth, f.index)(f)


def eigenfunction_H(sft: SftCoding, spec: PotentialSpec, depth: int, index=None) -> CylinderFunction:
    """H^(n) = exp((alpha - 1) phi_n) tabulated on depth-n words."""
    theta = np.asarray(spec.theta)
    w = spec.ratio ** np.arange(1, depth)

    def fn(words):
        return np.exp(theta[sft.digits[words[:, :-1], words[:, 1:]]] @ w)

    return CylinderFunction.from_callable(sft, depth, fn, index)


# -- product-form digit functions --------------------------------------------

@dataclass(frozen=True)
class DigitProductFunction:
    """f(y) = exp(log_scale + sum_j tables[j, e_j(y)]), j = 0..depth-2."""

    tables: np.ndarray      # (depth - 1, n_digits)
    log_scale: float = 0.0

    @property
    def depth(self) -> int:
        return self.tables.shape[0] + 1

    def log_sup(self) -> float:
        return self.log_scale + float(self.tables.max(axis=1).sum())

    def log_inf(self) -> float:
        return self.log_scale + float(self.tables.min(axis=1).sum())

    def evaluate(self, sft: SftCoding, words: np.ndarray) -> np.ndarray:
        d = sft.digits[words[:, :-1], words[:, 1:]]
        m = self.tables.shape[0]
        return np.exp(self.log_scale + self.tables[np.arange(m), d].sum(axis=1))

    def normalized(self) -> "DigitProductFunction":
        return DigitProductFunction(self.tables, self.log_scale - self.log_sup())

    @classmethod
    def constant(cls, depth: int, n_digits: int, value: float = 1.0) -> "DigitProductFunction":
        return cls(np.zeros((depth - 1, n_digits)), math.log(value))

    @classmethod
    def eigen_H(cls, spec: PotentialSpec, depth: int) -> "DigitProductFunction":
        theta = np.asarray(spec.theta)
        return cls(np.outer(spec.ratio ** np.arange(1, depth), theta), 0.0)


def transfer_product(spec: PotentialSpec, f: DigitProductFunction) -> DigitProductFunction:
    """Exact image of a digit product function under the depth-n operator."""
    theta = np.asarray(spec.theta)
    m = f.tables.shape[0]
    a = spec.position_weights(m)
    head = theta * a[0] + f.tables[0]
    top = head.max()
    new_scale = f.log_scale + top + math.log(np.exp(head - top).sum())
    new = np.zeros_like(f.tables)
    if m > 1:
        new[:-1] = np.outer(a[1:], theta) + f.tables[1:]
    return DigitProductFunction(new, new_scale)


def _ratio_range(f: DigitProductFunction, g: DigitProductFunction) -> tuple[float, float]:
    """Range of g / f over all digit words."""
    delta = g.tables - f.tables
    ds = g.log_scale - f.log_scale
    return math.exp(ds + delta.min(axis=1).sum()), math.exp(ds + delta.max(axis=1).sum())


# -- power iteration -------------------------------------------------------

@dataclass(frozen=True)
class PowerResult:
    lambda_est: float
    residual: float
    iterations: int
    method: str


def _tabulated_words(sft: SftCoding, depth: int) -> int:
    # dominant growth rate of the word count is b + 1 (incoming digit bijection)
    return sft.n_states * sft.n_digits ** (depth - 1)


def _choose(method: str, sft: SftCoding, depth: int) -> str:
    if method == "auto":
        return "tabulated" if _tabulated_words(sft, depth) <= 200_000 else "product"
    if method not in ("tabulated", "product"):
        raise ValueError(f"unknown method {method!r}")
    return method


def power_lambda(sft: SftCoding, spec: PotentialSpec, depth: int, iters: int = 10_000,
                 tol: float = 1e-13, method: str = "auto") -> PowerResult:
    """Leading eigenvalue of the depth-n transfer operator by power iteration from f = 1.

    ``lambda_est`` is the sup-norm ratio ||L f|| / ||f|| at convergence and
    ``residual`` bounds ||L f - lambda f|| / ||f|| (exact when tabulated).
    """
    if depth < 2:
        raise WordTooShort("depth must be >= 2")
    spec.check(sft)
    method = _choose(method, sft, depth)
    if method == "product":
        f = DigitProductFunction.constant(depth, sft.n_digits)
        prev = None
        for k in range(1, iters + 1):
            g = transfer_product(spec, f)
            lam = math.exp(g.log_sup() - f.log_sup())
            lo, hi = _ratio_range(f, g)
            res = max(abs(hi - lam), abs(lo - lam))
            if prev is not None and abs(lam - prev) <= tol * lam and res <= tol * lam:
                return PowerResult(lam, res, k, method)
            prev = lam
            f = g.normalized()
        raise NoConvergence(iters)

    op = TransferOperator(sft, spec, depth)
    v = np.ones(len(op.index))
    prev = None
    for k in range(1, iters + 1):
        Lv = op.apply_values(v)
        lam = float(np.abs(Lv).max() / np.abs(v).max())
        res = float(np.abs(Lv - lam * v).max() / np.abs(v).max())
        if prev is not None and abs(lam - prev) <= tol * lam and res <= max(tol * lam, 1e-14 * lam):
            return PowerResult(lam, res, k, method)
        prev = lam
        v = Lv / np.abs(Lv).max()
    raise NoConvergence(iters)


def residual_bound(spec: PotentialSpec, depth: int) -> float:
    """lambda (exp(alpha ||theta|| ((alpha-1)/alpha)^(n-1)) - 1)."""
    return spec.lam * math.expm1(spec.alpha * spec.theta_norm * spec.ratio ** (depth - 1))


def eigen_residual(sft: SftCoding, spec: PotentialSpec, depth: int, method: str = "auto") -> float:
    """||L H^(n) - lambda H^(n)|| / ||H^(n)|| with lambda = sum exp(theta(i)).

    The tabulated method computes the sup norms exactly; the product method
    returns sup |L H / H - lambda|, an upper bound for the same quantity.
    """
    if depth < 2:
        raise WordTooShort("depth must be >= 2")
    spec.check(sft)
    lam = spec.lam
    method = _choose(method, sft, depth)
    if method == "product":
        H = DigitProductFunction.eigen_H(spec, depth)
        lo, hi = _ratio_range(H, transfer_product(spec, H))
        return max(abs(hi - lam), abs(lo - lam))
    op = TransferOperator(sft, spec, depth)
    H = eigenfunction_H(sft, spec, depth, op.index)
    LH = op.apply_values(H.values)
    return float(np.abs(LH - lam * H.values).max() / np.abs(H.values).max())


# -- Ruelle convergence -----------------------------------------------------

@dataclass(frozen=True)
class RuelleReport:
    spreads: np.ndarray        # max - min of v_k / H, k = 0..k_max
    rel_spreads: np.ndarray    # (max - min) / max of v_k / H
    ratio_mean: np.ndarray     # mean of v_k / H over words
    final_ratio: np.ndarray    # v_{k_max} / H per word


def ruelle_floor(spec: PotentialSpec, depth: int) -> float:
    """Limit of the relative spread of v_k / H at this depth.

    The depth-n fixed direction of L is H exp(-r^(n-1) sum_j theta(e_j)),
    j = 0..n-2, so (max - min) / max of v_k / H tends to
    1 - exp(-(n-1) r^(n-1) (max theta - min theta)).
    """
    spread = max(spec.theta) - min(spec.theta)
    return -math.expm1(-(depth - 1) * spec.ratio ** (depth - 1) * spread)


def ruelle_limit_check(sft: SftCoding, spec: PotentialSpec, f: CylinderFunction, k_max: int) -> RuelleReport:
    """Track v_k = L^k f / lambda^k against H^(n) for k = 0..k_max."""
    if np.any(f.values < 0) or not np.any(f.values > 0):
        raise ValueError("f must be non-negative and not identically zero")
    op = TransferOperator(sft, spec, f.depth, f.index)
    H = eigenfunction_H(sft, spec, f.depth, f.index).values
    lam = spec.lam
    v = f.values.copy()
    spreads, rel, means = [], [], []
    for k in range(k_max + 1):
        r = v / H
        spreads.append(float(r.max() - r.min()))
        rel.append(spreads[-1] / float(r.max()))
        means.append(float(r.mean()))
        if k < k_max:
            v = op.apply_values(v) / lam
    return RuelleReport(np.array(spreads), np.array(rel), np.array(means), r)
