"""Small numeric helpers: saturating exponentials, deterministic reductions.

Exponentials that exceed e^700 in magnitude are reported as +/-inf with a
saturation flag; tables then fall back to the log-magnitude, which stays
finite and comparable far beyond the float range.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

LOG_SATURATION = 700.0
THREADS_ENV = "CATTANEO4_THREADS"


def exp_term(coeff: float, rate: float, t: float) -> tuple[float, bool]:
    """Evaluate coeff * exp(rate * t) with overflow saturation.

    Returns ``(value, saturated)``.  When the log-magnitude exceeds
    ``LOG_SATURATION`` the value is +/-inf (sign of ``coeff``) and the flag is
    set; otherwise the product is exact to rounding.  Underflow quietly gives
    0.0, which is the honest limit.
    """
    if coeff == 0.0:
        return 0.0, False
    x = rate * t
    logmag = math.log(abs(coeff)) + x
    if logmag > LOG_SATURATION:
        return math.copysign(math.inf, coeff), True
    if x > 709.0:
        # exp(x) alone would overflow but the product is representable
        return math.copysign(math.exp(logmag), coeff), False
    return coeff * math.exp(x), False


def log_abs_exp_sum(terms) -> tuple[float, float]:
    """Log-magnitude and sign of ``sum_i s_i * exp(l_i)``.

    ``terms`` is an iterable of ``(sign, log_magnitude)`` pairs; zero terms are
    passed as ``(0.0, -inf)``.  Works far outside the float range.  Returns
    ``(sign, log|sum|)`` with ``(0.0, -inf)`` for an exactly cancelled sum.
    """
    terms = [(math.copysign(1.0, s), l) for s, l in terms
             if s != 0.0 and l != -math.inf]
    if not terms:
        return 0.0, -math.inf
    lmax = max(l for _, l in terms)
    acc = math.fsum(s * math.exp(l - lmax) for s, l in terms)
    if acc == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, acc), lmax + math.log(abs(acc))


def fit_slope(xs, ys) -> float:
    """Least-squares slope of ys against xs, accumulated with fsum."""
    n = len(xs)
    if n < 2 or n != len(ys):
        raise ValueError("need at least two paired points for a slope fit")
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    if sxx == 0.0:
        raise ValueError("degenerate abscissae in slope fit")
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    return sxy / sxx


def thread_count(explicit: int | None = None) -> int:
    """Worker count: explicit argument, else CATTANEO4_THREADS, else 1."""
    if explicit is not None:
        if explicit < 1:
            raise ValueError("thread count must be >= 1")
        return explicit
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


def parallel_map(fn, items, threads: int | None = None) -> list:
    """Map ``fn`` over ``items`` preserving order.

    Results are identical to the sequential map regardless of worker count:
    each item is independent and the output list is assembled by index.
    """
    items = list(items)
    n = thread_count(threads)
    if n == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt_float(x: float) -> str:
    """CSV float format: up to 17 significant digits, round-trip exact."""
    return format(x, ".17g")
