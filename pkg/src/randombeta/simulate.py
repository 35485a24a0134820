"""Sample paths of the symbolic Markov chains, exact conjugacy checks against
the random beta-transformation, and empirical statistics.

Random numbers come from numpy's PCG64 seeded through
``SeedSequence(seed, spawn_key=(stream_id,))``, so every (seed, stream_id)
pair names an independent, reproducible stream.
"""
from __future__ import annotations

import csv
import json
from bisect import bisect_right
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .measures import LebesgueChain, MeasureRep
from .partition import PartitionC, Regions
from .sft import SftCoding, decode_omega, decode_point

RNG_ALGORITHM = "numpy.random.PCG64"


class PathTooShort(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    seed: int
    steps: int
    burn_in: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")


def make_rng(config: SimConfig) -> np.random.Generator:
    ss = np.random.SeedSequence(config.seed, spawn_key=(config.stream_id,))
    return np.random.Generator(np.random.PCG64(ss))


def rng_header() -> dict:
    return {"algorithm": RNG_ALGORITHM, "numpy_version": np.__version__}


def _chain_arrays(obj) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(obj, MeasureRep):
        return obj.P, obj.m
    if isinstance(obj, LebesgueChain):
        return obj.P, obj.pi
    P, pi = obj
    return np.asarray(P, dtype=float), np.asarray(pi, dtype=float)


def sample_chain(obj: Union[MeasureRep, LebesgueChain, tuple], config: SimConfig) -> np.ndarray:
    """State path of length ``config.steps`` started from the stationary vector."""
    P, pi = _chain_arrays(obj)
    rng = make_rng(config)
    total = config.burn_in + config.steps
    u = rng.random(total).tolist()
    cum = [np.cumsum(row).tolist() for row in P]
    last = [max(np.nonzero(row)[0]) for row in P]
    start_cum = np.cumsum(pi).tolist()
    s = min(bisect_right(start_cum, u[0] * start_cum[-1]), len(pi) - 1)
    out = np.empty(total, dtype=np.int64)
    out[0] = s
    for t in range(1, total):
        row = cum[s]
        s = min(bisect_right(row, u[t] * row[-1]), last[s])
        out[t] = s
    return out[config.burn_in:]


# -- conjugacy ---------------------------------------------------------------

@dataclass(frozen=True)
class OrbitCheckReport:
    windows: int
    distinct_windows: int
    violations: int
    first_violation: Optional[tuple[int, str]] = None


def map_digit(partition: PartitionC, x_mid, omega_bit: Optional[int]) -> int:
    """Digit K_beta uses at x: forced on E_k, coin-chosen on S_k (1 -> k, 0 -> k-1)."""
    kind, k = Regions.of(partition.ctx).classify(x_mid)
    if kind == "E":
        return k
    if omega_bit is None:
        raise ValueError("switch region needs a coin flip")
    return k if omega_bit == 1 else k - 1


def _check_window(partition: PartitionC, sft: SftCoding, w: tuple[int, ...]) -> Optional[str]:
    n = len(w) - 1
    head, tail_short, tail_long = w[:n], w[1:n], w[1:]
    lo, hi = decode_point(sft, head, tight=True)
    cell = partition.cells[head[0]]
    if not cell.hull_contains(lo, hi):
        return "enclosure leaves the cell of the first state"
    omega = decode_omega(sft, head)
    bit = omega[0] if head[0] in sft.switch_states else None
    d = map_digit(partition, (lo + hi) / 2, bit)
    expected = int(sft.digits[head[0], head[1]])
    if d != expected:
        return f"map digit {d} != coded digit {expected}"
    beta = partition.ctx.beta
    img_lo, img_hi = beta * lo - d, beta * hi - d
    if len(tail_short) >= 2:
        s_lo, s_hi = decode_point(sft, tail_short, tight=True)
    else:
        c = partition.cells[tail_short[0]]
        s_lo, s_hi = c.lo, c.hi
    if not (img_lo == s_lo and img_hi == s_hi):
        return "image enclosure differs from the shifted window"
    l_lo, l_hi = decode_point(sft, tail_long, tight=True)
    if not (img_lo <= l_lo and l_hi <= img_hi):
        return "longer shifted window escapes the image enclosure"
    return None


def orbit_check(partition: PartitionC, sft: SftCoding, path: Sequence[int], precision_depth: int = 12,
                max_windows: Optional[int] = None) -> OrbitCheckReport:
    """Verify psi(sigma y) = K_beta(psi(y)) on every window of the path.

    Each window y_i..y_{i+n} (n = precision_depth) is decoded to an exact
    enclosure of x and its coin flip.  One application of K_beta must emit the
    coded digit and land exactly on the enclosure of y_{i+1}..y_{i+n-1}, which
    in turn must contain the enclosure of y_{i+1}..y_{i+n}.
    """
    if precision_depth < 2:
        raise ValueError("precision_depth must be >= 2")
    path = np.asarray(path)
    sft.check_admissible(path.tolist())
    n = precision_depth
    count = max(0, len(path) - n)
    if max_windows is not None:
        count = min(count, max_windows)
    if count == 0:
        return OrbitCheckReport(0, 0, 0)
    windows = Counter(tuple(int(x) for x in path[i:i + n + 1]) for i in range(count))
    violations, first = 0, None
    for w, mult in windows.items():
        msg = _check_window(partition, sft, w)
        if msg is not None:
            violations += mult
            if first is None:
                first = (int(np.nonzero([tuple(path[i:i + n + 1]) == w for i in range(count)])[0][0]), msg)
    return OrbitCheckReport(count, len(windows), violations, first)


# -- statistics ----------------------------------------------------------------

@dataclass
class SimReport:
    steps: int
    digit_freq: list[float]
    state_freq: list[float]
    switch_visit_rate: float
    cylinder_freqs: dict[tuple[int, ...], float]
    correlation: list[float]
    conjugacy_violations: int = 0
    config: Optional[dict] = None
    rng: dict = field(default_factory=rng_header)

    def to_json(self) -> dict:
        d = asdict(self)
        d["cylinder_freqs"] = {",".join(map(str, k)): v for k, v in sorted(self.cylinder_freqs.items())}
        return d


def _autocorrelation(x: np.ndarray, k_max: int) -> list[float]:
    x = x - x.mean()
    var = float(x @ x) / len(x)
    if var == 0:
        return [1.0] + [0.0] * k_max
    return [1.0] + [float(x[:-k] @ x[k:]) / (len(x) - k) / var for k in range(1, k_max + 1)]


def empirical_stats(path: Sequence[int], sft: SftCoding, rep: Optional[MeasureRep] = None, k_max: int = 20,
                    cylinder_depth: int = 3, config: Optional[SimConfig] = None) -> SimReport:
    """Digit, state and cylinder frequencies plus the autocorrelation of 1[state 0].

    ``rep`` is accepted for symmetry with the exact quantities it is compared
    against; frequencies themselves depend only on the path.
    """
    path = np.asarray(path, dtype=np.int64)
    N = len(path)
    if N < max(10 * (k_max + 1), cylinder_depth + 1):
        raise PathTooShort(f"path of length {N} too short for k_max={k_max}")
    n = sft.n_states
    digits = sft.digits[path[:-1], path[1:]]
    if np.any(digits < 0):
        raise ValueError("path is not admissible")
    digit_freq = np.bincount(digits, minlength=sft.n_digits) / len(digits)
    state_freq = np.bincount(path, minlength=n) / N
    switch_rate = float(state_freq[list(sft.switch_states)].sum()) if sft.switch_states else 0.0
    codes = np.zeros(N - cylinder_depth + 1, dtype=np.int64)
    for t in range(cylinder_depth):
        codes = codes * n + path[t:N - cylinder_depth + 1 + t]
    uniq, cnt = np.unique(codes, return_counts=True)
    cyl = {}
    for c, k in zip(uniq.tolist(), cnt.tolist()):
        word = []
        for _ in range(cylinder_depth):
            c, r = divmod(c, n)
            word.append(r)
        cyl[tuple(reversed(word))] = k / len(codes)
    corr = _autocorrelation((path == 0).astype(float), k_max)
    return SimReport(N, digit_freq.tolist(), state_freq.tolist(), switch_rate, cyl, corr,
                     config=None if config is None else asdict(config))


def merge_reports(reports: Sequence[SimReport]) -> SimReport:
    """Average reports weighted by path length."""
    if not reports:
        raise ValueError("nothing to merge")
    w = np.array([r.steps for r in reports], dtype=float)
    w = w / w.sum()

    def avg(attr):
        return (np.array([getattr(r, attr) for r in reports]) * w[:, None]).sum(axis=0).tolist()

    keys = set().union(*(r.cylinder_freqs for r in reports))
    cyl = {k: float(sum(wi * r.cylinder_freqs.get(k, 0.0) for wi, r in zip(w, reports))) for k in keys}
    return SimReport(
        int(sum(r.steps for r in reports)),
        avg("digit_freq"),
        avg("state_freq"),
        float(sum(wi * r.switch_visit_rate for wi, r in zip(w, reports))),
        cyl,
        avg("correlation"),
        int(sum(r.conjugacy_violations for r in reports)),
        {"streams": [r.config for r in reports]},
    )


# -- CLT error bars ------------------------------------------------------------

def asymptotic_variance(P: np.ndarray, pi: np.ndarray, f: np.ndarray) -> float:
    """lim N Var(mean of f(X_t)) for a stationary ergodic chain, via the
    fundamental matrix Z = (I - P + 1 pi)^{-1}."""
    n = len(pi)
    fbar = f - pi @ f
    Z = np.linalg.inv(np.eye(n) - P + np.outer(np.ones(n), pi))
    return float(2 * (pi * fbar) @ (Z @ fbar) - (pi * fbar) @ fbar)


def edge_chain(P: np.ndarray, pi: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[tuple[int, int]]]:
    """Chain on edges (X_t, X_{t+1}) with its stationary vector."""
    edges = [(int(i), int(j)) for i, j in zip(*np.nonzero(P))]
    idx = {e: k for k, e in enumerate(edges)}
    Q = np.zeros((len(edges), len(edges)))
    for (i, j), a in idx.items():
        for k in np.nonzero(P[j])[0]:
            Q[a, idx[(j, int(k))]] = P[j, k]
    mu = np.array([pi[i] * P[i, j] for i, j in edges])
    return Q, mu, edges


def frequency_sigmas(obj, sft: SftCoding, N: int) -> dict:
    """CLT standard deviations of digit, state and switch-visit frequencies."""
    P, pi = _chain_arrays(obj)
    Q, mu, edges = edge_chain(P, pi)
    digit_sigma = []
    for d in range(sft.n_digits):
        f = np.array([1.0 if sft.digits[i, j] == d else 0.0 for i, j in edges])
        digit_sigma.append(float(np.sqrt(max(asymptotic_variance(Q, mu, f), 0.0) / N)))
    state_sigma = [float(np.sqrt(max(asymptotic_variance(P, pi, (np.arange(len(pi)) == s).astype(float)), 0) / N))
                   for s in range(len(pi))]
    sw = np.isin(np.arange(len(pi)), sft.switch_states).astype(float)
    return {
        "digit": digit_sigma,
        "state": state_sigma,
        "switch": float(np.sqrt(max(asymptotic_variance(P, pi, sw), 0.0) / N)),
    }


# -- output --------------------------------------------------------------------

def write_report(report: SimReport, out_dir: Union[str, Path], manifest: Optional[dict] = None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = report.to_json()
    if manifest is not None:
        payload["manifest"] = manifest
    (out / "simulate.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    with open(out / "correlation.csv", "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["lag", "rho"])
        for k, r in enumerate(report.correlation):
            wr.writerow([k, repr(r)])
    with open(out / "cylinders.csv", "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["word", "frequency"])
        for k, v in sorted(report.cylinder_freqs.items()):
            wr.writerow([" ".join(map(str, k)), repr(v)])
