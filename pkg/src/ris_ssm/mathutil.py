"""Scalar special functions shared by the analytic error-rate expressions.

Three evaluations of the Gaussian Q-function are exposed:

* :func:`q_function` -- exact, via the complementary error function,
  ``Q(x) = erfc(x / sqrt(2)) / 2``.  This is the canonical form.
* :func:`q_function_two_exp` -- the two-exponential approximation
  ``Q(x) ~= exp(-x^2/2)/12 + exp(-2x^2/3)/4``, used to build the
  approximate pairwise error probabilities.
* :func:`q_function_integral` -- the finite-range integral form
  ``Q(x) = (1/pi) int_0^{pi/2} exp(-x^2 / (2 sin^2 t)) dt`` (x >= 0),
  kept as an independent numerical cross-check.

Integer combinatorics (factorial, double factorial, binomial, integer
Beta) are exact.  Ratios of large factorials inside the error-rate
formulas should go through :func:`log_gamma_int` to stay in the log
domain.
"""

from __future__ import annotations

import math
from fractions import Fraction

from scipy.integrate import quad
from scipy.special import erfc

__all__ = [
    "q_function",
    "q_function_two_exp",
    "q_function_integral",
    "gamma_int",
    "log_gamma_int",
    "double_factorial",
    "binomial",
    "beta_int",
    "db_to_linear",
    "linear_to_db",
    "rational_sqrt",
]


def q_function(x: float) -> float:
    """Exact Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    if not math.isfinite(x):
        raise ValueError(f"q_function requires a finite argument, got {x!r}")
    return 0.5 * float(erfc(x / math.sqrt(2.0)))


def q_function_two_exp(x: float) -> float:
    """Two-exponential approximation of Q(x).

    Accurate to about 1.3e-2 absolute for x >= 0; it does not satisfy
    the reflection identity Q(-x) = 1 - Q(x).
    """
    if not math.isfinite(x):
        raise ValueError(f"q_function_two_exp requires a finite argument, got {x!r}")
    xx = x * x
    return math.exp(-xx / 2.0) / 12.0 + math.exp(-2.0 * xx / 3.0) / 4.0


def q_function_integral(x: float) -> float:
    """Q(x) for x >= 0 via the finite-range integral representation.

    Numerical-quadrature cross-check for :func:`q_function`; not meant
    for hot paths.
    """
    if not math.isfinite(x):
        raise ValueError(f"q_function_integral requires a finite argument, got {x!r}")
    if x < 0.0:
        raise ValueError("the integral form of Q is only valid for x >= 0")
    value, _ = quad(
        lambda t: math.exp(-x * x / (2.0 * math.sin(t) ** 2)), 0.0, math.pi / 2.0
    )
    return value / math.pi


def gamma_int(k: int) -> int:
    """Gamma(k+1) = k! as an exact integer."""
    if k < 0:
        raise ValueError(f"gamma_int requires k >= 0, got {k}")
    return math.factorial(k)


def log_gamma_int(k: int) -> float:
    """ln(k!), for overflow-free evaluation of factorial ratios."""
    if k < 0:
        raise ValueError(f"log_gamma_int requires k >= 0, got {k}")
    return math.lgamma(k + 1)


def double_factorial(k: int) -> int:
    """k!! with the empty-product conventions 0!! = (-1)!! = 1."""
    if k < -1:
        raise ValueError(f"double_factorial requires k >= -1, got {k}")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def binomial(n: int, k: int) -> int:
    """Binomial coefficient C(n, k) for 0 <= k <= n."""
    if n < 0 or k < 0:
        raise ValueError(f"binomial requires nonnegative arguments, got ({n}, {k})")
    if k > n:
        raise ValueError(f"binomial requires k <= n, got ({n}, {k})")
    return math.comb(n, k)


def beta_int(a: int, b: int) -> Fraction:
    """Integer-argument Beta function B(a, b) as an exact rational.

    B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b) = (a-1)!(b-1)!/(a+b-1)!.
    """
    if a < 1 or b < 1:
        raise ValueError(f"beta_int requires positive integers, got ({a}, {b})")
    return Fraction(math.factorial(a - 1) * math.factorial(b - 1), math.factorial(a + b - 1))


def db_to_linear(x_db: float) -> float:
    """Convert a decibel value to linear scale."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a positive linear value to decibels."""
    if x <= 0.0:
        raise ValueError(f"linear_to_db requires a positive argument, got {x!r}")
    return 10.0 * math.log10(x)


def rational_sqrt(value: Fraction, digits: int = 80) -> Fraction:
    """Square root of a nonnegative rational, accurate to ``digits`` decimals.

    Uses integer isqrt so alternating sums built from these roots keep
    enough precision to survive heavy cancellation, without any
    floating-point rounding along the way.
    """
    if value < 0:
        raise ValueError("rational_sqrt requires a nonnegative argument")
    scale = 10**digits
    root = math.isqrt(value.numerator * value.denominator * scale * scale)
    return Fraction(root, value.denominator * scale)
