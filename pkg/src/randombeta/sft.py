"""Vertex subshift of finite type coding the random beta-transformation.

States are the partition cells 0..K in spatial order.  The digit emitted on
the move i -> j is ``digit_label[(i, j)]``; sequences are indexed from 0, so
e_i(y) = label(y_i, y_{i+1}).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .field import FieldElement
from .partition import PartitionC


class SftError(ValueError):
    pass


class ImageNotCellUnion(SftError):
    pass


class NotPrimitive(SftError):
    pass


class WordTooShort(SftError):
    pass


class InadmissibleWord(SftError):
    pass


@dataclass(frozen=True, eq=False)
class SftCoding:
    adjacency: np.ndarray              # (K+1, K+1) 0/1
    digits: np.ndarray                 # (K+1, K+1) digit on edges, -1 elsewhere
    switch_states: tuple[int, ...]     # state index of s_1..s_b
    n_digits: int                      # b + 1
    partition: Optional[PartitionC] = None

    @property
    def n_states(self) -> int:
        return self.adjacency.shape[0]

    @property
    def K(self) -> int:
        return self.n_states - 1

    @property
    def digit_label(self) -> dict[tuple[int, int], int]:
        i, j = np.nonzero(self.adjacency)
        return {(int(a), int(c)): int(self.digits[a, c]) for a, c in zip(i, j)}

    def predecessors(self, j: int) -> list[int]:
        return [int(i) for i in np.nonzero(self.adjacency[:, j])[0]]

    def is_admissible(self, word: Sequence[int]) -> bool:
        w = np.asarray(word)
        if w.size == 0 or w.min() < 0 or w.max() > self.K:
            return False
        return bool(np.all(self.adjacency[w[:-1], w[1:]]))

    def check_admissible(self, word: Sequence[int]) -> None:
        if not self.is_admissible(word):
            raise InadmissibleWord(f"word {tuple(word)} is not admissible")

    def word_digits(self, word: Sequence[int]) -> np.ndarray:
        w = np.asarray(word)
        return self.digits[w[:-1], w[1:]]

    def incoming_digits(self, j: int) -> list[int]:
        return sorted(int(self.digits[i, j]) for i in self.predecessors(j))

    def has_incoming_digit_bijection(self) -> bool:
        full = list(range(self.n_digits))
        return all(self.incoming_digits(j) == full for j in range(self.n_states))

    def words(self, n: int) -> np.ndarray:
        """All admissible words of length n, lexicographically ordered, shape (N, n)."""
        if n < 1:
            raise ValueError("word length must be >= 1")
        out = np.arange(self.n_states, dtype=np.int64)[:, None]
        succ = [np.nonzero(self.adjacency[i])[0] for i in range(self.n_states)]
        for _ in range(n - 1):
            last = out[:, -1]
            counts = np.array([len(succ[s]) for s in range(self.n_states)])[last]
            rows = np.repeat(out, counts, axis=0)
            nxt = np.concatenate([succ[s] for s in last]) if len(last) else np.zeros(0, np.int64)
            out = np.column_stack([rows, nxt])
        return out

    def to_json(self) -> dict:
        labels = [{"from": i, "to": j, "digit": d} for (i, j), d in sorted(self.digit_label.items())]
        return {
            "adjacency": self.adjacency.astype(int).tolist(),
            "digit_labels": labels,
            "switch_states": list(self.switch_states),
        }


def build_sft(partition: PartitionC) -> SftCoding:
    K = partition.K
    A = np.zeros((K + 1, K + 1), dtype=np.int8)
    D = np.full((K + 1, K + 1), -1, dtype=np.int64)
    for i, lab in enumerate(partition.labels):
        if lab.kind == "digit":
            try:
                cols, _ = partition.image_cells(i, lab.value)
            except ValueError as e:
                raise ImageNotCellUnion(str(e)) from e
            A[i, cols] = 1
            D[i, cols] = lab.value
        else:
            m = lab.value
            A[i, 0] = A[i, K] = 1
            D[i, 0] = m
            D[i, K] = m - 1
    sft = SftCoding(A, D, tuple(partition.switch_indices), partition.floor_beta + 1, partition)
    if not (A[0, 0] and A[K, K]):
        raise SftError("outer states lack self-loops")
    if not sft.has_incoming_digit_bijection():
        raise SftError("incoming digits are not a bijection onto {0..b}")
    check_primitive(sft)
    return sft


def full_two_shift() -> SftCoding:
    """Complete 2-state shift; state 0 is spin -1, state 1 is spin +1.

    The digit on a move i -> j is i, so e_n(y) is the spin index of y_n and
    theta = (-2, 2), alpha = 2 reproduces phi(x) = sum x_n / 2^n.
    """
    A = np.ones((2, 2), dtype=np.int8)
    D = np.array([[0, 0], [1, 1]], dtype=np.int64)
    return SftCoding(A, D, (), 2, None)


def check_primitive(sft_or_matrix) -> int:
    """Smallest m <= n^2 with A^m > 0; raises NotPrimitive otherwise."""
    A = sft_or_matrix.adjacency if isinstance(sft_or_matrix, SftCoding) else np.asarray(sft_or_matrix)
    B = (A > 0).astype(np.int64)
    n = B.shape[0]
    P = B.copy()
    for m in range(1, n * n + 1):
        if np.all(P > 0):
            return m
        P = ((P @ B) > 0).astype(np.int64)
    raise NotPrimitive("no positive power up to n^2")


# -- coding maps ------------------------------------------------------------

def _inv_beta_powers(sft: SftCoding, n: int) -> list[FieldElement]:
    ctx = sft.partition.ctx
    cache = ctx._cache.setdefault("inv_beta_powers", [ctx.one])
    inv = 1 / ctx.beta
    while len(cache) <= n:
        cache.append(cache[-1] * inv)
    return cache


def _digit_basis(sft: SftCoding, n: int) -> tuple[list[list[int]], int]:
    """Numerators of beta^-1 .. beta^-(n-1) over one common denominator."""
    ctx = sft.partition.ctx
    key = ("digit_basis", n)
    hit = ctx._cache.get(key)
    if hit is None:
        pw = _inv_beta_powers(sft, n)[1:n]
        den = math.lcm(*(c.denominator for e in pw for c in e.coeffs))
        rows = [[int(c * den) for c in e.coeffs] for e in pw]
        hit = ctx._cache[key] = (rows, den)
    return hit


def _tail_bounds(sft: SftCoding, n: int, state: Optional[int]):
    ctx = sft.partition.ctx
    key = ("tail_bounds", n, state)
    hit = ctx._cache.get(key)
    if hit is None:
        scale = _inv_beta_powers(sft, n)[n - 1]
        if state is None:
            from .partition import Regions
            hit = (ctx.zero, scale * Regions.of(ctx).right)
        else:
            cell = sft.partition.cells[state]
            hit = (scale * cell.lo, scale * cell.hi)
        ctx._cache[key] = hit
    return hit


def decode_point(sft: SftCoding, word: Sequence[int], tight: bool = False) -> tuple[FieldElement, FieldElement]:
    """Exact enclosure of x_y for every y in the cylinder [word].

    The lower end is sum_{i<=n-2} e_i / beta^(i+1).  The tail beta^-(n-1) x'
    is bounded with x' in [0, b/(beta-1)], or with x' in the hull of the last
    state's cell when ``tight`` is set.
    """
    if sft.partition is None:
        raise SftError("decoding requires a partition-backed SFT")
    n = len(word)
    if n < 2:
        raise WordTooShort("need at least two states to read a digit")
    sft.check_admissible(word)
    digits = sft.word_digits(word).tolist()
    rows, den = _digit_basis(sft, n)
    ctx = sft.partition.ctx
    acc = [0] * ctx.degree
    for d, row in zip(digits, rows):
        if d:
            for k, c in enumerate(row):
                acc[k] += d * c
    s = FieldElement(ctx, tuple(Fraction(a, den) for a in acc))
    lo, hi = _tail_bounds(sft, n, int(word[-1]) if tight else None)
    return s + lo, s + hi


def decode_omega(sft: SftCoding, word: Sequence[int]) -> tuple[int, ...]:
    """Coin flips recorded in the word: 1 after s_m -> 0, 0 after s_m -> K."""
    sft.check_admissible(word)
    sw = set(sft.switch_states)
    out = []
    for a, c in zip(word[:-1], word[1:]):
        if a in sw:
            out.append(1 if c == 0 else 0)
    return tuple(out)
