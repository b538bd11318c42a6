"""Fixed-length lossy coding of short subblocks.

A subblock of ``b0`` bits is *typical* when its Hamming weight is at most
``w0``.  Typical subblocks are enumerated in lexicographic order and sent as
their 1-based rank in ``L = ceil(log2(N_typ + 1))`` bits; rank 0 is
reserved for every atypical input, which decodes to the all-zero subblock.
The caller keeps the atypical subblock itself as an error vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import InvalidParams, LengthError, NotTypical


@lru_cache(maxsize=64)
def _tail_table(b0: int, w0: int) -> tuple[tuple[int, ...], ...]:
    """``T[r][s]`` = number of length-r strings with weight <= s, s in 0..w0."""
    rows = [tuple([1] * (w0 + 1))]
    for r in range(1, b0 + 1):
        prev = rows[-1]
        rows.append(tuple(prev[s] + (prev[s - 1] if s else 0) for s in range(w0 + 1)))
    return tuple(rows)


@dataclass(frozen=True)
class SubblockParams:
    b0: int
    w0: int

    def __post_init__(self) -> None:
        if self.b0 < 1:
            raise InvalidParams("b0 must be positive")
        if not 0 <= self.w0 <= self.b0:
            raise InvalidParams(f"w0={self.w0} outside [0, {self.b0}]")

    @property
    def n_typical(self) -> int:
        return sum(math.comb(self.b0, w) for w in range(self.w0 + 1))

    @property
    def L(self) -> int:
        return self.n_typical.bit_length()

    @property
    def rate(self) -> Fraction:
        return Fraction(self.L, self.b0)


def _check(x: Sequence[int], params: SubblockParams) -> None:
    if len(x) != params.b0:
        raise LengthError(f"expected {params.b0} bits, got {len(x)}")


def is_typical(x: Sequence[int], params: SubblockParams) -> bool:
    _check(x, params)
    return sum(x) <= params.w0


def rank(x: Sequence[int], params: SubblockParams) -> int:
    """1-based lexicographic index of ``x`` within the typical set."""
    _check(x, params)
    w0 = params.w0
    if sum(x) > w0:
        raise NotTypical(f"weight {sum(x)} exceeds w0={w0}")
    table = _tail_table(params.b0, w0)
    idx, ones = 0, 0
    b0 = params.b0
    for t, bit in enumerate(x):
        if bit:
            # all typical strings with a 0 here sort first
            idx += table[b0 - t - 1][w0 - ones]
            ones += 1
    return idx + 1


def unrank(idx: int, params: SubblockParams) -> list[int]:
    """Inverse of :func:`rank`; index 0 maps to the all-zero subblock."""
    b0, w0 = params.b0, params.w0
    if not 0 <= idx <= params.n_typical:
        raise ValueError(f"index {idx} outside [0, {params.n_typical}]")
    out = [0] * b0
    if idx == 0:
        return out
    table = _tail_table(b0, w0)
    rem, ones = idx - 1, 0
    for t in range(b0):
        zeros_here = table[b0 - t - 1][w0 - ones]
        if rem >= zeros_here:
            out[t] = 1
            rem -= zeros_here
            ones += 1
    return out


def _to_bits(value: int, width: int) -> list[int]:
    return [(value >> (width - 1 - k)) & 1 for k in range(width)]


def _from_bits(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value


def encode_subblock(x: Sequence[int], params: SubblockParams) -> list[int]:
    idx = rank(x, params) if is_typical(x, params) else 0
    return _to_bits(idx, params.L)


def decode_subblock(c: Sequence[int], params: SubblockParams) -> list[int]:
    if len(c) != params.L:
        raise LengthError(f"expected {params.L} codeword bits, got {len(c)}")
    return unrank(_from_bits(c), params)


def error_vector(x: Sequence[int], params: SubblockParams) -> list[int]:
    return [0] * params.b0 if is_typical(x, params) else list(x)


def reconstruct(c: Sequence[int], e: Sequence[int], params: SubblockParams) -> list[int]:
    """Decoder rule: a nonzero error vector wins, otherwise decode ``c``."""
    return list(e) if any(e) else decode_subblock(c, params)


def binary_entropy(p: float) -> float:
    p = float(p)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def threshold_for(b0: int, p, eps) -> int:
    """Weight threshold ceil(b0 * (p + eps/4)), clipped to b0."""
    return min(b0, math.ceil(b0 * (Fraction(p) + Fraction(eps) / 4)))


def min_subblock_length(p, eps, limit: int = 4096) -> SubblockParams:
    """Smallest ``b0`` whose threshold code has rate at most H(p) + eps."""
    target = binary_entropy(p) + float(eps)
    for b0 in range(1, limit + 1):
        params = SubblockParams(b0, threshold_for(b0, p, eps))
        if params.L / b0 <= target:
            return params
    raise InvalidParams(f"no b0 <= {limit} reaches rate {target:.4f}")
