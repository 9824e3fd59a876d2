"""Distribution of the rank-ordered squared channel gains.

The unsorted squared magnitude of a unit-variance circularly-symmetric
complex Gaussian gain is a unit-mean exponential.  Sorting L such draws
in descending order and keeping rank ``l`` (1 = largest) gives the law
implemented here: closed-form PDF, CDF and MGF, plus a sampling oracle
used by the Monte Carlo engine and the statistical tests.

The PDF has two algebraically equal forms: an alternating exponential
mixture and a Beta-kernel product.  The mixture coefficients alternate
in sign and grow combinatorially, so for large L the product form is
used instead of fighting the cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

import numpy as np

__all__ = [
    "OrderedGainLaw",
    "ordered_pdf",
    "ordered_cdf",
    "ordered_mgf",
    "sample_sorted_gains",
    "unsorted_pdf",
]

# Above this L the alternating-sum PDF loses too many digits to
# cancellation; switch to the Beta-kernel product form.
_SUM_FORM_MAX_L = 20


@dataclass(frozen=True)
class OrderedGainLaw:
    """Law of the l-th largest of ``l_total`` unit-mean exponentials."""

    l: int
    l_total: int

    def __post_init__(self) -> None:
        if self.l_total < 1:
            raise ValueError(f"l_total must be >= 1, got {self.l_total}")
        if not 1 <= self.l <= self.l_total:
            raise ValueError(f"rank l must be in 1..{self.l_total}, got {self.l}")


@cache
def _mixture_coefficients(l: int, l_total: int) -> list[tuple[int, Fraction]]:
    """Exact (rate, weight) pairs of the alternating exponential mixture.

    pdf(x) = sum_k weight_k * exp(-rate_k * x) with rate_k = k + l.
    """
    lead = Fraction(math.factorial(l_total), math.factorial(l - 1))
    out = []
    for k in range(l_total - l + 1):
        weight = lead * Fraction((-1) ** k, math.factorial(k) * math.factorial(l_total - l - k))
        out.append((k + l, weight))
    return out


def ordered_pdf(law: OrderedGainLaw, x):
    """Density of the rank-``law.l`` squared gain at ``x`` (scalar or array)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("ordered_pdf is supported on x >= 0 only")
    l, L = law.l, law.l_total
    if L <= _SUM_FORM_MAX_L:
        terms = [float(w) * np.exp(-rate * x_arr) for rate, w in _mixture_coefficients(l, L)]
        if np.ndim(x) == 0:
            return math.fsum(t.item() for t in terms)
        return np.sum(terms, axis=0)
    # Product form: C(L,l) * l * (1 - e^-x)^(L-l) * e^(-l x), in logs.
    log_c = math.lgamma(L + 1) - math.lgamma(L - l + 1) - math.lgamma(l)
    with np.errstate(divide="ignore"):
        log_pdf = log_c + (L - l) * np.log1p(-np.exp(-x_arr)) - l * x_arr
    out = np.where(np.isneginf(log_pdf), 0.0, np.exp(log_pdf))
    return out.item() if np.ndim(x) == 0 else out


def ordered_cdf(law: OrderedGainLaw, x):
    """P(rank-``law.l`` squared gain <= x)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("ordered_cdf is supported on x >= 0 only")
    l, L = law.l, law.l_total
    if L <= _SUM_FORM_MAX_L:
        terms = [
            (float(w) / rate) * (-np.expm1(-rate * x_arr))
            for rate, w in _mixture_coefficients(l, L)
        ]
        if np.ndim(x) == 0:
            return math.fsum(t.item() for t in terms)
        return np.sum(terms, axis=0)
    from scipy.special import betainc

    # Rank l descending = rank L-l+1 ascending of L iid exponentials.
    out = betainc(L - l + 1, l, -np.expm1(-x_arr))
    return out.item() if np.ndim(x) == 0 else np.asarray(out)


def ordered_mgf(law: OrderedGainLaw, s: float) -> float:
    """E[exp(s X)] for the rank-``law.l`` squared gain; requires s < l.

    Closed form: prod_{xi=l}^{L} xi / (xi - s).
    """
    if s >= law.l:
        raise ValueError(f"MGF has poles at s = {law.l}..{law.l_total}; got s = {s}")
    out = 1.0
    for xi in range(law.l, law.l_total + 1):
        out *= xi / (xi - s)
    return out


def sample_sorted_gains(l_total: int, rng: np.random.Generator, trials: int | None = None):
    """Squared gains of ``l_total`` CN(0,1) draws, sorted descending.

    Returns shape ``(l_total,)``, or ``(trials, l_total)`` when ``trials``
    is given.  Sorting is by squared magnitude; ties (a probability-zero
    event for continuous draws) keep draw order.
    """
    if l_total < 1:
        raise ValueError(f"l_total must be >= 1, got {l_total}")
    n = 1 if trials is None else trials
    h = (rng.standard_normal((n, l_total)) + 1j * rng.standard_normal((n, l_total))) / math.sqrt(2.0)
    power = np.abs(h) ** 2
    order = np.argsort(-power, axis=1, kind="stable")
    power = np.take_along_axis(power, order, axis=1)
    return power[0] if trials is None else power


def unsorted_pdf(x):
    """Density exp(-x) of a squared gain without rank ordering."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("unsorted_pdf is supported on x >= 0 only")
    out = np.exp(-x_arr)
    return out.item() if np.ndim(x) == 0 else out
