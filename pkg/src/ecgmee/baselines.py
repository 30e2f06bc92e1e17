"""Classical entropy baselines: permutation, approximate, sample, fuzzy.

All four operate on a 1-D sequence. AE/SE/FE use Chebyshev (max-abs)
distance between embedding vectors and, unless an explicit tolerance is
passed, r = tolerance_factor * population std of the full input sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NonpositiveTolerance, SequenceTooShort, UndefinedEntropy


@dataclass
class BaselineConfig:
    """Tunables for the four baseline metrics.

    pe_order_n: ordinal pattern length (>= 2)
    pe_step: delay between the samples forming a pattern (>= 1)
    embed_m: embedding dimension for AE/SE/FE
    tolerance_factor: r = factor * std(x)
    fe_weight_n: fuzzy membership exponent, 2 or 3
    """

    pe_order_n: int = 4
    pe_step: int = 1
    embed_m: int = 2
    tolerance_factor: float = 0.2
    fe_weight_n: int = 2

    def __post_init__(self):
        if self.pe_order_n < 2:
            raise ValueError("pe_order_n must be >= 2")
        if self.pe_step < 1:
            raise ValueError("pe_step must be >= 1")
        if self.embed_m < 1:
            raise ValueError("embed_m must be >= 1")
        if self.tolerance_factor <= 0:
            raise ValueError("tolerance_factor must be positive")
        if self.fe_weight_n not in (2, 3):
            raise ValueError("fe_weight_n must be 2 or 3")


def _as_array(x: Sequence[float]) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def _tolerance(x: np.ndarray, cfg: BaselineConfig, r: Optional[float]) -> float:
    return float(r) if r is not None else cfg.tolerance_factor * float(x.std())


def permutation_entropy(x: Sequence[float], cfg: BaselineConfig) -> float:
    """Shannon entropy of ordinal patterns of length pe_order_n.

    Ties rank by index order (the earlier sample ranks lower), so constant
    stretches map to the identity pattern.
    """
    x = _as_array(x)
    n, tau = cfg.pe_order_n, cfg.pe_step
    span = (n - 1) * tau
    if x.size < n or x.size <= span:
        raise SequenceTooShort(f"need more than {span} samples for order {n}, step {tau}")
    windows = np.lib.stride_tricks.sliding_window_view(x, span + 1)[:, ::tau]
    patterns = np.argsort(windows, axis=1, kind="stable")
    _, counts = np.unique(patterns, axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log(p)))


def _embed(x: np.ndarray, length: int, count: int, center: bool) -> np.ndarray:
    emb = np.lib.stride_tricks.sliding_window_view(x, length)[:count]
    if center:
        emb = emb - emb.mean(axis=1, keepdims=True)
    return np.ascontiguousarray(emb)


def approximate_entropy(
    x: Sequence[float], cfg: BaselineConfig, r: Optional[float] = None
) -> float:
    """phi^m(r) - phi^(m+1)(r) with self-matches included.

    A zero-variance input gives r = 0; matches are distance <= r, so a
    constant sequence yields exactly 0.
    """
    x = _as_array(x)
    m = cfg.embed_m
    if x.size < m + 2:
        raise SequenceTooShort(f"need at least {m + 2} samples, got {x.size}")
    r = _tolerance(x, cfg, r)
    phis = []
    for ell in (m, m + 1):
        count = x.size - ell + 1
        emb = _embed(x, ell, count, center=False)
        log_sum = 0.0
        for i in range(count):
            d = np.abs(emb - emb[i]).max(axis=1)
            c = np.count_nonzero(d <= r) / count
            log_sum += math.log(c)
        phis.append(log_sum / count)
    return phis[0] - phis[1]


def sample_entropy(
    x: Sequence[float], cfg: BaselineConfig, r: Optional[float] = None
) -> float:
    """ln B^m(r) - ln B^(m+1)(r), self-matches excluded.

    Both template sets use the first N-m windows (the standard truncation,
    so the m- and (m+1)-length comparisons cover the same vectors). A zero
    match count at either length raises UndefinedEntropy rather than
    returning infinity.
    """
    x = _as_array(x)
    m = cfg.embed_m
    if x.size < m + 2:
        raise SequenceTooShort(f"need at least {m + 2} samples, got {x.size}")
    r = _tolerance(x, cfg, r)
    count = x.size - m
    sums = []
    for ell in (m, m + 1):
        emb = _embed(x, ell, count, center=False)
        total = 0
        for i in range(count):
            d = np.abs(emb - emb[i]).max(axis=1)
            total += np.count_nonzero(d <= r) - 1  # drop the self-match
        if total == 0:
            raise UndefinedEntropy(
                f"no length-{ell} matches within tolerance {r:g}"
            )
        sums.append(total / (count * (count - 1)))
    return math.log(sums[0]) - math.log(sums[1])


def fuzzy_entropy(
    x: Sequence[float], cfg: BaselineConfig, r: Optional[float] = None
) -> float:
    """ln A^m(n,r) - ln A^(m+1)(n,r) with mean-removed embedding vectors and
    membership exp(-(d^n)/r). Always finite for r > 0."""
    x = _as_array(x)
    m, n = cfg.embed_m, cfg.fe_weight_n
    if x.size < m + 2:
        raise SequenceTooShort(f"need at least {m + 2} samples, got {x.size}")
    r = _tolerance(x, cfg, r)
    if r <= 0:
        raise NonpositiveTolerance("fuzzy entropy needs r > 0")
    count = x.size - m
    avgs = []
    for ell in (m, m + 1):
        emb = _embed(x, ell, count, center=True)
        total = 0.0
        for i in range(count):
            d = np.abs(emb - emb[i]).max(axis=1)
            total += float(np.exp(-(d ** n) / r).sum()) - 1.0  # drop self-term
        avgs.append(total / (count * (count - 1)))
    return math.log(avgs[0]) - math.log(avgs[1])
