"""Markov realizations of the g-measures mu_theta, the Lebesgue chain,
entropy/pressure identities and the novelty comparison.

mu_theta is the stationary Markov measure whose backward weights are the digit
weights w_{e(i,j)}.  With rational weights every quantity here is exact
(``fractions.Fraction``); the Lebesgue chain is exact over Q(beta).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .field import FieldElement
from .linalg import SingularSolve, nullspace_vector
from .partition import PartitionC
from .sft import InadmissibleWord, SftCoding

__all__ = [
    "BadP", "InadmissibleWord", "LebesgueChain", "MeasureRep", "SingularSolve", "ZeroStationaryMass",
    "build_lebesgue_chain", "build_measure", "cylinder_measure", "cylinder_table", "digit_marginal",
    "digit_weights", "entropy_pressure", "g_from_markov", "novelty_check",
]


class BadP(ValueError):
    pass


class ZeroStationaryMass(ValueError):
    pass


class InadmissibleWordWarning(UserWarning):
    pass


def digit_weights(theta: Sequence[float]) -> np.ndarray:
    """Softmax w_i = e^{theta(i)} / sum_j e^{theta(j)}."""
    t = np.asarray(theta, dtype=float)
    e = np.exp(t - t.max())
    return e / e.sum()


@dataclass(frozen=True, eq=False)
class MeasureRep:
    sft: SftCoding
    weights: np.ndarray          # w, shape (b+1,)
    m: np.ndarray                # state masses
    P: np.ndarray                # forward transition matrix
    theta: Optional[tuple] = None
    exact: Optional[dict] = None  # {"w", "m", "P"} as Fractions when weights are rational

    @property
    def W(self) -> np.ndarray:
        return _weight_matrix(self.sft, self.weights)

    def to_json(self) -> dict:
        out = {
            "weights": self.weights.tolist(),
            "m": self.m.tolist(),
            "P": self.P.tolist(),
        }
        if self.exact is not None:
            out["exact"] = {
                "weights": [str(x) for x in self.exact["w"]],
                "m": [str(x) for x in self.exact["m"]],
            }
        return out


def _weight_matrix(sft: SftCoding, w) -> np.ndarray:
    A = sft.adjacency.astype(bool)
    W = np.zeros(A.shape)
    W[A] = np.asarray(w, dtype=float)[sft.digits[A]]
    return W


def _markov_from_masses(sft: SftCoding, w, m):
    n = sft.n_states
    return [[(w[sft.digits[i, j]] * m[j] / m[i]) if sft.adjacency[i, j] else w[0] * 0
             for j in range(n)] for i in range(n)]


def build_measure(sft: SftCoding, theta: Optional[Sequence[float]] = None,
                  weights: Optional[Sequence] = None) -> MeasureRep:
    """Markov representation of mu_theta.

    Pass ``theta`` (floats) or ``weights`` directly.  Rational weights
    (``Fraction``) make m and P exact as well.
    """
    if (theta is None) == (weights is None):
        raise ValueError("give exactly one of theta or weights")
    exact = None
    if theta is not None:
        if len(theta) != sft.n_digits:
            raise ValueError(f"theta needs {sft.n_digits} entries")
        w = digit_weights(theta)
    else:
        if len(weights) != sft.n_digits:
            raise ValueError(f"weights need {sft.n_digits} entries")
        if all(isinstance(x, (int, Fraction)) for x in weights):
            wq = [Fraction(x) for x in weights]
            if sum(wq) != 1 or min(wq) <= 0:
                raise ValueError("weights must be positive and sum to 1")
            n = sft.n_states
            rows = [[(wq[sft.digits[i, j]] if sft.adjacency[i, j] else Fraction(0)) - (1 if i == j else 0)
                     for j in range(n)] for i in range(n)]
            mq = nullspace_vector(rows, Fraction(1))
            if min(mq) <= 0:
                raise SingularSolve("stationary masses are not strictly positive")
            Pq = _markov_from_masses(sft, wq, mq)
            exact = {"w": tuple(wq), "m": tuple(mq), "P": tuple(tuple(r) for r in Pq)}
            w = np.array([float(x) for x in wq])
        else:
            w = np.asarray(weights, dtype=float)
            if abs(w.sum() - 1) > 1e-12 or w.min() <= 0:
                raise ValueError("weights must be positive and sum to 1")

    if exact is not None:
        m = np.array([float(x) for x in exact["m"]])
        P = np.array([[float(x) for x in r] for r in exact["P"]])
    else:
        W = _weight_matrix(sft, w)
        n = sft.n_states
        M = W - np.eye(n)
        M[-1, :] = 1.0
        rhs = np.zeros(n)
        rhs[-1] = 1.0
        try:
            m = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError as e:
            raise SingularSolve(str(e)) from e
        if m.min() <= 0 or np.abs(W @ m - m).max() > 1e-10:
            raise SingularSolve("no strictly positive fixed vector for W")
        P = np.where(sft.adjacency.astype(bool), W * m[None, :] / m[:, None], 0.0)
    return MeasureRep(sft, w, m, P, None if theta is None else tuple(float(t) for t in theta), exact)


def cylinder_measure(rep: MeasureRep, word: Sequence[int], strict: bool = False) -> Union[float, Fraction]:
    """mu([y_0..y_{n-1}]) = m_{y_0} prod P_{y_i y_{i+1}}.

    This equals (prod w_{e(y_i, y_{i+1})}) m_{y_{n-1}}.  Inadmissible words
    have measure 0; a warning is issued, or InadmissibleWord raised when
    ``strict``.
    """
    if len(word) < 1:
        raise ValueError("word must be non-empty")
    if not rep.sft.is_admissible(word):
        if strict:
            raise InadmissibleWord(f"word {tuple(word)} is not admissible")
        warnings.warn(f"inadmissible word {tuple(word)} has measure 0", InadmissibleWordWarning, stacklevel=2)
        return Fraction(0) if rep.exact is not None else 0.0
    if rep.exact is not None:
        m, P = rep.exact["m"], rep.exact["P"]
    else:
        m, P = rep.m, rep.P
    val = m[word[0]]
    for a, c in zip(word[:-1], word[1:]):
        val = val * P[a][c]
    return val if rep.exact is not None else float(val)


def cylinder_table(rep: MeasureRep, depth: int) -> list[tuple[tuple[int, ...], Union[float, Fraction]]]:
    """(word, measure) for every admissible word of the given length."""
    return [(tuple(int(x) for x in w), cylinder_measure(rep, w)) for w in rep.sft.words(depth)]


def digit_marginal(rep: MeasureRep, i: int) -> Union[float, Fraction]:
    """mu(e_0 = i) summed over the edges carrying digit i."""
    total = None
    for (a, c), d in rep.sft.digit_label.items():
        if d == i:
            v = cylinder_measure(rep, (a, c))
            total = v if total is None else total + v
    return total if total is not None else 0.0


def entropy_pressure(rep: MeasureRep, theta: Optional[Sequence[float]] = None) -> dict:
    theta = rep.theta if theta is None else tuple(theta)
    if theta is None:
        raise ValueError("theta required")
    A = rep.sft.adjacency.astype(bool)
    P = rep.P
    logP = np.zeros_like(P)
    logP[A] = np.log(P[A])
    h = float(-(rep.m[:, None] * P * logP)[A].sum())
    t = np.asarray(theta, dtype=float)
    top = t.max()
    log_sum = top + math.log(np.exp(t - top).sum())
    return {"entropy": h, "pressure_check": float(h + float(rep.weights @ t) - log_sum)}


# -- Lebesgue chain -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LebesgueChain:
    sft: SftCoding
    p: Fraction
    P_exact: tuple[tuple, ...]       # FieldElement or Fraction entries
    pi_exact: tuple
    P: np.ndarray
    pi: np.ndarray
    switch_identity_residuals: tuple[float, float]
    switch_identities_exact: tuple[bool, bool]

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "P": self.P.tolist(),
            "pi": self.pi.tolist(),
            "P_exact": [[_exact_json(x) for x in row] for row in self.P_exact],
            "pi_exact": [_exact_json(x) for x in self.pi_exact],
            "switch_identity_residuals": list(self.switch_identity_residuals),
            "switch_identities_exact": list(self.switch_identities_exact),
        }


def _exact_json(x):
    if isinstance(x, FieldElement):
        return x.to_json()
    return str(x)


def _overlap(a_lo, a_hi, b_lo, b_hi, zero):
    lo = a_lo if a_lo >= b_lo else b_lo
    hi = a_hi if a_hi <= b_hi else b_hi
    return hi - lo if hi > lo else zero


def build_lebesgue_chain(partition: PartitionC, sft: SftCoding, p) -> LebesgueChain:
    """Markov chain induced on the partition by coin(p) x Lebesgue.

    Non-switch row i with digit k: entry j is |C_i cap T_k^{-1} C_j| / |C_i|.
    Switch rows send mass p to state 0 and 1 - p to state K.
    """
    try:
        p = Fraction(p)
    except (TypeError, ValueError) as e:
        raise BadP(f"p must be rational: {p!r}") from e
    if not 0 < p < 1:
        raise BadP("p must lie strictly between 0 and 1")
    ctx = partition.ctx
    zero, one, beta = ctx.zero, ctx.one, ctx.beta
    K = partition.K
    n = K + 1
    rows = []
    for i, (cell, lab) in enumerate(zip(partition.cells, partition.labels)):
        row = [zero] * n
        if lab.kind == "switch":
            row[0] = row[0] + ctx.const(p)
            row[K] = row[K] + ctx.const(1 - p)
        else:
            k = lab.value
            length = cell.length
            for j in np.nonzero(sft.adjacency[i])[0]:
                cj = partition.cells[j]
                pre_lo, pre_hi = (cj.lo + k) / beta, (cj.hi + k) / beta
                row[j] = _overlap(cell.lo, cell.hi, pre_lo, pre_hi, zero) / length
        total = zero
        for x in row:
            total = total + x
        if total != one:
            raise ValueError(f"row {i} of the Lebesgue chain does not sum to 1")
        rows.append(row)

    # pi P = pi  <=>  (P^T - I) pi = 0
    M = [[rows[j][i] - (one if i == j else zero) for j in range(n)] for i in range(n)]
    pi = nullspace_vector(M, one)
    if not all(x > 0 for x in pi):
        raise ZeroStationaryMass("Lebesgue chain has a state of zero stationary mass")

    switch_sum = zero
    for s in partition.switch_indices:
        switch_sum = switch_sum + pi[s]
    lhs0 = (beta - 1) / (ctx.const(p) * beta) * pi[0]
    lhsK = (beta - 1) / (ctx.const(1 - p) * beta) * pi[K]
    exact_ok = (switch_sum == lhs0, switch_sum == lhsK)
    s_f = float(switch_sum)
    residuals = (abs(s_f - float(lhs0)), abs(s_f - float(lhsK)))

    P_f = np.array([[float(x) for x in r] for r in rows])
    pi_f = np.array([float(x) for x in pi])
    return LebesgueChain(sft, p, tuple(tuple(r) for r in rows), tuple(pi), P_f, pi_f, residuals, exact_ok)


# -- g-functions and novelty ---------------------------------------------------

def g_from_markov(obj, exact: bool = False) -> dict[tuple[int, int], object]:
    """Backward weights G(i, j) = pi_i P_ij / pi_j on every edge (i, j).

    ``obj`` is a MeasureRep, a LebesgueChain, or a (P, pi) pair of arrays.
    With ``exact`` the exact tables of the object are used.
    """
    if isinstance(obj, MeasureRep):
        if exact and obj.exact is not None:
            P, pi = obj.exact["P"], obj.exact["m"]
        else:
            P, pi = obj.P, obj.m
        edges = obj.sft.digit_label.keys()
    elif isinstance(obj, LebesgueChain):
        P, pi = (obj.P_exact, obj.pi_exact) if exact else (obj.P, obj.pi)
        edges = obj.sft.digit_label.keys()
    else:
        P, pi = obj
        P = np.asarray(P, dtype=float)
        edges = [(int(i), int(j)) for i, j in zip(*np.nonzero(P))]
    if not all(x > 0 for x in pi):
        raise ZeroStationaryMass("stationary vector must be strictly positive")
    return {(i, j): pi[i] * P[i][j] / pi[j] for (i, j) in edges}


@dataclass(frozen=True)
class NoveltyResult:
    distinct: bool
    witness: Optional[tuple[int, int]]
    witness_values: Optional[tuple[float, float]]
    max_difference: float
    scalar_condition: bool        # w_b == 1/beta within 1e-12
    w_top: float
    inv_beta: float

    def to_json(self) -> dict:
        return {
            "distinct": self.distinct,
            "witness": None if self.witness is None else list(self.witness),
            "witness_values": None if self.witness_values is None else list(self.witness_values),
            "max_difference": self.max_difference,
            "scalar_condition": self.scalar_condition,
            "w_top": self.w_top,
            "inv_beta": self.inv_beta,
        }


def novelty_check(rep: MeasureRep, other, tol: float = 1e-12) -> NoveltyResult:
    """Decide whether the g-measure of ``rep`` differs from that of ``other``.

    The verdict comes from an edge-by-edge comparison of g-tables.  The scalar
    necessary condition w_b = 1/beta is reported alongside but never decides.
    """
    if other.sft.n_states != rep.sft.n_states or not np.array_equal(other.sft.adjacency, rep.sft.adjacency):
        raise ValueError("objects live on different SFTs")
    g1 = g_from_markov(rep)
    g2 = g_from_markov(other)
    worst, witness = 0.0, None
    for e in sorted(g1):
        d = abs(float(g1[e]) - float(g2[e]))
        if d > worst:
            worst, witness = d, e
    distinct = worst > tol
    part = rep.sft.partition
    inv_beta = 1.0 / part.ctx.beta_float if part is not None else float("nan")
    w_top = float(rep.weights[-1])
    return NoveltyResult(
        distinct,
        witness if distinct else None,
        (float(g1[witness]), float(g2[witness])) if distinct else None,
        worst,
        abs(w_top - inv_beta) <= 1e-12,
        w_top,
        inv_beta,
    )
