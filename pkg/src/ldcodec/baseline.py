"""Naive blocking compressor used as a locality baseline.

The message is cut into blocks of ``b`` bits and each block is coded on its
own with the threshold code of :mod:`ldcodec.subblock`.  A block whose
weight exceeds the threshold is lost (decodes to zeros).  Sizing asks for
the same rate target as the main scheme, ``H(p) + 2*epsilon``, and block
error at most ``1/n**2``, which forces ``b`` to grow like ``log n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import subblock
from .bitstore import BitStore
from .errors import AddressError, Infeasible, LengthError
from .scheme import as_rational
from .sizing import atypical_probability, float_tail
from .subblock import SubblockParams, binary_entropy


@dataclass(frozen=True)
class BlockingParams:
    n: int
    b: int
    w: int

    @cached_property
    def code(self) -> SubblockParams:
        return SubblockParams(self.b, self.w)

    @property
    def L(self) -> int:
        return self.code.L

    @property
    def n_blocks(self) -> int:
        return -(-self.n // self.b)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.n_blocks * self.L, self.n)


def derive_blocking(n: int, p, epsilon, max_b: int = 1 << 14) -> BlockingParams:
    """Smallest block length meeting rate H(p)+2*eps and block error 1/n**2."""
    p, eps = as_rational(p), as_rational(epsilon)
    target_rate = binary_entropy(p) + 2 * float(eps)
    target_err = Fraction(1, n * n)
    for b in range(1, max_b + 1):
        n_typ, w = 0, -1
        for cand in range(b + 1):
            n_typ += math.comb(b, cand)
            if n_typ.bit_length() / b > target_rate:
                break
            w = cand
        if w < 0:
            continue
        if float_tail(b, w, float(p)) > 2 * float(target_err):
            continue
        if atypical_probability(b, w, p) <= target_err:
            return BlockingParams(n, b, w)
    raise Infeasible(f"no block length <= {max_b} for n={n}")


class BlockingCodec:
    def __init__(self, params: BlockingParams, store: BitStore | None = None) -> None:
        self.params = params
        self.store = store or BitStore(params.n_blocks * params.L)

    def encode(self, x: Sequence[int]) -> None:
        pr = self.params
        if len(x) != pr.n:
            raise LengthError(f"expected {pr.n} bits, got {len(x)}")
        bits = list(x) + [0] * (pr.n_blocks * pr.b - pr.n)
        for blk in range(pr.n_blocks):
            chunk = bits[blk * pr.b:(blk + 1) * pr.b]
            self.store.write_bits(blk * pr.L, subblock.encode_subblock(chunk, pr.code))

    def _locate(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.params.n:
            raise AddressError(f"position {i} outside [0, {self.params.n})")
        return divmod(i, self.params.b)

    def local_decode(self, i: int) -> int:
        pr = self.params
        blk, off = self._locate(i)
        code = self.store.read_bits(blk * pr.L, pr.L)
        return subblock.decode_subblock(code, pr.code)[off]

    def local_update(self, i: int, v: int) -> None:
        pr = self.params
        blk, off = self._locate(i)
        x = subblock.decode_subblock(self.store.read_bits(blk * pr.L, pr.L), pr.code)
        x[off] = 1 if v else 0
        self.store.write_bits(blk * pr.L, subblock.encode_subblock(x, pr.code))
