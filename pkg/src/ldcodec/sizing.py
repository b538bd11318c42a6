"""Exact tail bounds and the finite-n parameter search.

The search runs in floating point for speed, then every chosen capacity is
re-certified with exact integer arithmetic: for a rational ``r > 1``,

    P[Bin(k, q) >= a] <= (1 - q + q*r)**k / r**a

(the Chernoff bound with ``e**t = r``).  Only certified parameters leave
this module.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom


def atypical_probability(b0: int, w0: int, p: Fraction) -> Fraction:
    """Exact P[weight of a Bernoulli(p) b0-vector exceeds w0]."""
    p = Fraction(p)
    a, d = p.numerator, p.denominator
    typical = sum(math.comb(b0, w) * a**w * (d - a) ** (b0 - w) for w in range(w0 + 1))
    return 1 - Fraction(typical, d**b0)


def chernoff_holds(k: int, q: Fraction, a: int, target: Fraction) -> bool:
    """Certify P[Bin(k, q) >= a] <= target exactly."""
    q, target = Fraction(q), Fraction(target)
    if a > k or q == 0:
        return True
    if a <= 0:
        return target >= 1
    if a == k:
        return q**k <= target
    if a <= k * q:
        return target >= 1
    qf = float(q)
    if qf > 0.0:
        r_opt = a * (1 - qf) / (qf * (k - a))
    else:
        r_opt = 2.0**60
    candidates = {Fraction(2)}
    if math.isfinite(r_opt) and r_opt > 1:
        candidates.add(Fraction(r_opt).limit_denominator(1 << 20))
        candidates.add(Fraction(math.floor(r_opt * 1024), 1024) or Fraction(2))
    qn, qd = q.numerator, q.denominator
    tn, td = target.numerator, target.denominator
    for r in candidates:
        if r <= 1:
            continue
        rn, rd = r.numerator, r.denominator
        mgf_num = rd * (qd - qn) + qn * rn
        lhs = mgf_num**k * rd**a * td
        rhs = tn * (qd * rd) ** k * rn**a
        if lhs <= rhs:
            return True
    return False


def certified_capacity(k: int, q: Fraction, target: Fraction, start: int = 0) -> int:
    """Smallest beta >= start with P[Bin(k, q) > beta] <= target (certified)."""
    beta = max(0, start)
    while not chernoff_holds(k, q, beta + 1, target):
        beta += 1
    return beta


def log2_chernoff(k: np.ndarray, q: float, a: np.ndarray) -> np.ndarray:
    """Optimised Chernoff bound on log2 P[Bin(k, q) >= a], vectorised."""
    k = k.astype(float)
    a = a.astype(float)
    out = np.zeros_like(a)
    if q <= 0.0:
        return np.where(a > 0, -np.inf, 0.0)
    lq = math.log2(q)
    full = a >= k
    inner = (a > k * q) & ~full
    with np.errstate(divide="ignore", invalid="ignore"):
        r = a * (1 - q) / (q * (k - a))
        val = k * np.log2(1 - q + q * r) - a * np.log2(r)
    out = np.where(inner, val, out)
    out = np.where(full, np.where(a > k, -np.inf, k * lq), out)
    return out


def float_capacity(k: np.ndarray, q: float, log2_target: float) -> np.ndarray:
    """Vectorised estimate of the smallest beta with bound <= target."""
    lo = np.minimum(np.floor(k * q).astype(np.int64), k)  # bound fails at a = lo
    hi = k + 1  # a = k + 1 is always fine
    lo = np.maximum(lo, 0)
    while True:
        active = hi - lo > 1
        if not active.any():
            break
        mid = (lo + hi) // 2
        ok = log2_chernoff(k, q, mid) <= log2_target
        hi = np.where(active & ok, mid, hi)
        lo = np.where(active & ~ok, mid, lo)
    return hi - 1  # beta = a - 1


def sparse_widths(k: np.ndarray, beta: np.ndarray, b0: int) -> dict:
    beta = np.maximum(beta, 1)
    b_p = np.maximum(1, np.ceil(np.log2(beta)).astype(np.int64))
    b_r = np.maximum(1, np.ceil(np.log2(np.maximum(k, 1))).astype(np.int64))
    c_w = np.floor(np.log2(beta)).astype(np.int64) + 1
    total = k + beta * (b0 + b_r) + k * b_p + c_w
    return {"b_p": b_p, "b_r": b_r, "c_w": c_w, "total": total}


def float_tail(b0: int, w0: int, p: float) -> float:
    return float(binom.sf(w0, b0, p))


def log2_typical_counts(b0: int) -> np.ndarray:
    """``out[w]`` = log2 of the number of b0-bit strings with weight <= w."""
    w = np.arange(b0 + 1)
    log_comb = gammaln(b0 + 1) - gammaln(w + 1) - gammaln(b0 - w + 1)
    return np.logaddexp.accumulate(log_comb) / math.log(2)
