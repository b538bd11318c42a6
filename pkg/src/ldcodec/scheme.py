"""Locally decodable and updatable compressor for Bernoulli(p) messages.

The message is cut into blocks of ``b1`` bits, each block into subblocks of
``b0`` bits.  Every subblock gets an ``L``-bit fixed-length codeword
(:mod:`ldcodec.subblock`); subblocks outside the typical set are kept
verbatim in a per-block sparse structure (:mod:`ldcodec.sparse`) whose
internal block length is ``b0``, so status bit ``j`` of block ``i`` says
whether subblock ``(i, j)`` is atypical.

Payload region of block ``i`` (``W + 1`` bits)::

    [failure flag][c(i,0) ... c(i,k-1)][sparse structure over e(i)]

Every offset is a function of :class:`SchemeParams` alone.
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import binom

from . import sparse, subblock
from .bitstore import BitStore
from .errors import (
    AddressError,
    BlockFailed,
    CapacityExceeded,
    Infeasible,
    InvalidParams,
    LengthError,
    MalformedContainer,
)
from .sizing import (
    atypical_probability,
    certified_capacity,
    float_capacity,
    float_tail,
    log2_typical_counts,
    sparse_widths,
)
from .sparse import SparseParams
from .subblock import SubblockParams, binary_entropy

MAGIC = b"LDC1"
VERSION = 1
_HEADER = struct.Struct(">4sBQ4I4IQ")
HEADER_BITS = 8 * _HEADER.size

#: Subblocks per block considered by the sizing search.
MAX_SUBBLOCKS = 1 << 16


def as_rational(x) -> Fraction:
    """Exact rational from a Fraction, int, or decimal string.

    Floats go through their shortest repr, so ``0.05`` becomes ``1/20``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class SchemeParams:
    n: int
    p: Fraction
    epsilon: Fraction
    b0: int
    w0: int
    b1: int
    beta: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", as_rational(self.p))
        object.__setattr__(self, "epsilon", as_rational(self.epsilon))
        if self.n < 1:
            raise InvalidParams("n must be positive")
        if self.b1 % self.b0:
            raise InvalidParams(f"b0={self.b0} does not divide b1={self.b1}")
        # validates beta against the subblock count
        SubblockParams(self.b0, self.w0)
        SparseParams(self.b1, self.b0, self.beta)

    @cached_property
    def sub(self) -> SubblockParams:
        return SubblockParams(self.b0, self.w0)

    @cached_property
    def sparse(self) -> SparseParams:
        return SparseParams(self.b1, self.b0, self.beta)

    @cached_property
    def L(self) -> int:
        return self.sub.L

    @property
    def k(self) -> int:
        """Subblocks per block."""
        return self.b1 // self.b0

    @property
    def W(self) -> int:
        return self.k * self.L + self.sparse.layout.total_bits

    @property
    def region_bits(self) -> int:
        return self.W + 1

    @property
    def n_blocks(self) -> int:
        return -(-self.n // self.b1)

    @property
    def padded_n(self) -> int:
        return self.n_blocks * self.b1

    @property
    def payload_bits(self) -> int:
        return self.n_blocks * self.region_bits

    @property
    def decode_bound(self) -> int:
        """Worst-case probes of :func:`local_decode`."""
        return 2 + max(self.L, self.sparse.b_p + 1)

    @property
    def update_bound(self) -> int:
        """Worst-case probes of :func:`local_update`."""
        sp = self.sparse
        insert = 2 + 2 * self.L + 2 * sp.c_w + 1 + sp.b_p + sp.b_m
        delete = 2 + 2 * sp.b_p + self.b0 + self.L + 1 + 2 * sp.c_w + 2 * sp.b_m
        return max(insert, delete)

    # addresses

    def flag_addr(self, block: int) -> int:
        return block * self.region_bits

    def code_addr(self, block: int, j: int) -> int:
        return block * self.region_bits + 1 + j * self.L

    def sparse_base(self, block: int) -> int:
        return block * self.region_bits + 1 + self.k * self.L

    def locate(self, i: int) -> tuple[int, int, int]:
        """(block, subblock-in-block, offset-in-subblock) of message bit i."""
        if not 0 <= i < self.n:
            raise AddressError(f"position {i} outside [0, {self.n})")
        block, within = divmod(i, self.b1)
        j, off = divmod(within, self.b0)
        return block, j, off


class Container:
    """A compressed message: parameters plus the bit-packed payload."""

    def __init__(self, params: SchemeParams, store: BitStore | None = None) -> None:
        self.params = params
        if store is None:
            store = BitStore(params.payload_bits)
        if store.capacity != params.payload_bits:
            raise MalformedContainer(
                f"payload has {store.capacity} bits, expected {params.payload_bits}"
            )
        self.store = store

    def copy(self) -> "Container":
        return Container(self.params, self.store.copy())

    def failed_blocks(self) -> list[int]:
        pr = self.params
        return [b for b in range(pr.n_blocks) if self.store.peek(pr.flag_addr(b))]

    def region(self, block: int) -> bytes:
        pr = self.params
        start = block * pr.region_bits
        return self.store.snapshot()[start:start + pr.region_bits]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Container):
            return NotImplemented
        return self.params == other.params and self.store == other.store

    # serialization

    def header_bytes(self) -> bytes:
        pr = self.params
        return _HEADER.pack(
            MAGIC, VERSION, pr.n,
            pr.p.numerator, pr.p.denominator,
            pr.epsilon.numerator, pr.epsilon.denominator,
            pr.b0, pr.w0, pr.b1, pr.beta,
            pr.payload_bits,
        )

    def to_bytes(self) -> bytes:
        bits = np.frombuffer(self.store.snapshot(), dtype=np.uint8)
        return self.header_bytes() + np.packbits(bits, bitorder="big").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Container":
        if len(data) < _HEADER.size:
            raise MalformedContainer("truncated header")
        fields = _HEADER.unpack_from(data)
        magic, version, n, pn, pd, en, ed, b0, w0, b1, beta, nbits = fields
        if magic != MAGIC:
            raise MalformedContainer(f"bad magic {magic!r}")
        if version != VERSION:
            raise MalformedContainer(f"unsupported version {version}")
        if pd == 0 or ed == 0:
            raise MalformedContainer("zero denominator")
        try:
            params = SchemeParams(n, Fraction(pn, pd), Fraction(en, ed), b0, w0, b1, beta)
        except InvalidParams as exc:
            raise MalformedContainer(str(exc)) from exc
        if nbits != params.payload_bits:
            raise MalformedContainer(
                f"payload length {nbits} disagrees with parameters ({params.payload_bits})"
            )
        body = data[_HEADER.size:]
        if len(body) != -(-nbits // 8):
            raise MalformedContainer("payload byte length mismatch")
        bits = np.unpackbits(np.frombuffer(body, dtype=np.uint8), bitorder="big")
        return cls(params, BitStore(nbits, bits[:nbits].tolist()))

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "Container":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


# parameter sizing


def _candidates(n: int, p: Fraction, eps: Fraction, max_b0: int | None):
    """Float-feasible (t_bound, r_bound, rate, b0, w0, b1, beta) tuples, best first."""
    h = binary_entropy(p)
    pf, ef = float(p), float(eps)
    budget = 1.25 * ef
    log2_target = -2.0 * math.log2(n)
    best_t = math.inf
    out = []
    # the sparse region holds at least one b0-bit chunk, so b1 >= b0 / budget
    top = int(budget * n / (1 - budget)) + 1 if budget < 1 else n
    top = min(n, top, max_b0 or n)
    for b0 in range(1, top + 1):
        if 3 * b0 > best_t:
            break
        # status bit plus at least one pointer bit per subblock
        if 2 / b0 > budget:
            continue
        w_lo = int(binom.isf(budget - 2 / b0, b0, pf))
        log2_typ = log2_typical_counts(b0)
        for w0 in range(max(0, w_lo), b0 + 1):
            L = int(math.floor(log2_typ[w0])) + 1
            if L / b0 > h + ef:
                break
            q = float_tail(b0, w0, pf)
            if q + 2 / b0 > budget:
                continue
            ks = np.arange(1, min(-(-n // b0), MAX_SUBBLOCKS) + 1, dtype=np.int64)
            beta = np.maximum(float_capacity(ks, q, log2_target), 1)
            w = sparse_widths(ks, beta, b0)
            blocks = -(-n // (ks * b0))
            rate = blocks * (ks * L + w["total"] + 1) / n
            ok = (beta <= ks) & (rate <= h + 2 * ef) & (w["total"] <= budget * ks * b0)
            if not ok.any():
                continue
            b_m = b0 + w["b_r"]
            t_ins = 2 + 2 * L + 2 * w["c_w"] + 1 + w["b_p"] + b_m
            t_del = 2 + 2 * w["b_p"] + b0 + L + 1 + 2 * w["c_w"] + 2 * b_m
            t = np.maximum(t_ins, t_del)
            r = 2 + np.maximum(L, w["b_p"] + 1)
            for idx in np.nonzero(ok)[0]:
                cand = (int(t[idx]), int(r[idx]), float(rate[idx]), b0, w0,
                        int(ks[idx]) * b0, int(beta[idx]))
                out.append(cand)
                best_t = min(best_t, cand[0])
    out.sort()
    return out


def _certify(n: int, p: Fraction, eps: Fraction, cand) -> SchemeParams | None:
    _, _, _, b0, w0, b1, beta_f = cand
    k = b1 // b0
    q = atypical_probability(b0, w0, p)
    beta = certified_capacity(k, q, Fraction(1, n * n), start=max(0, beta_f - 1))
    beta = max(beta, 1)
    if beta > k:
        return None
    params = SchemeParams(n, p, eps, b0, w0, b1, beta)
    h = binary_entropy(p)
    if params.L / params.b0 > h + float(eps):
        return None
    if params.sparse.layout.total_bits > Fraction(5, 4) * eps * b1:
        return None
    if float(payload_rate(params)) > h + 2 * float(eps):
        return None
    return params


def _search(n, p, eps, max_b0):
    for cand in _candidates(n, p, eps, max_b0)[:50]:
        params = _certify(n, p, eps, cand)
        if params is not None:
            return params
    return None


def derive_params(n: int, p, epsilon, max_b0: int | None = None) -> SchemeParams:
    """Choose (b0, w0, b1, beta) for an n-bit Bernoulli(p) message.

    The returned parameters satisfy, with exact arithmetic where it matters:

    * subblock code rate ``L/b0 <= H(p) + epsilon``;
    * per block, P[#atypical subblocks > beta] <= 1/n**2 (certified
      Chernoff bound);
    * sparse structure width <= 1.25 * epsilon * b1;
    * payload rate <= H(p) + 2 * epsilon.

    Among feasible choices the one with the smallest worst-case update cost
    is returned (ties: decode cost, then rate).

    Raises
    ------
    Infeasible
        If nothing fits; ``min_feasible_n`` carries the smallest power of two
        for which the search succeeds, when one exists below 2**40.
    """
    p, eps = as_rational(p), as_rational(epsilon)
    if not 0 < p < Fraction(1, 2):
        raise Infeasible(f"p={p} outside (0, 1/2)")
    if eps <= 0:
        raise Infeasible("epsilon must be positive to absorb any overhead")
    if n < 2:
        raise Infeasible("n must be at least 2")
    params = _search(n, p, eps, max_b0)
    if params is not None:
        return params
    min_n = None
    for e in range(max(1, math.ceil(math.log2(n))) + 1, 41):
        if _search(2**e, p, eps, max_b0) is not None:
            min_n = 2**e
            break
    raise Infeasible(
        f"no parameters for n={n}, p={p}, epsilon={eps}"
        + (f"; smallest feasible power of two is n={min_n}" if min_n else ""),
        min_feasible_n=min_n,
    )


def payload_rate(params: SchemeParams) -> Fraction:
    return Fraction(params.payload_bits, params.n)


def rate(params: SchemeParams) -> Fraction:
    """Container bits per message bit, header included."""
    return Fraction(params.payload_bits + HEADER_BITS, params.n)


# global encoding and decoding


def _padded(x: Sequence[int], params: SchemeParams) -> list[int]:
    if len(x) != params.n:
        raise LengthError(f"expected {params.n} message bits, got {len(x)}")
    bits = [1 if b else 0 for b in x]
    return bits + [0] * (params.padded_n - params.n)


def _encode_block(store: BitStore, params: SchemeParams, block: int, bits) -> None:
    sub = params.sub
    b0, b1 = params.b0, params.b1
    errors = [0] * b1
    atypical = 0
    for j in range(params.k):
        x = bits[j * b0:(j + 1) * b0]
        store.write_bits(params.code_addr(block, j), subblock.encode_subblock(x, sub))
        if not subblock.is_typical(x, sub):
            atypical += 1
            errors[j * b0:(j + 1) * b0] = x
    sparse.encode_into(store, params.sparse, errors, params.sparse_base(block), truncate=True)
    store.write_bit(params.flag_addr(block), int(atypical > params.beta))


def global_encode(x: Sequence[int], params: SchemeParams) -> Container:
    bits = _padded(x, params)
    container = Container(params)
    b1 = params.b1
    for block in range(params.n_blocks):
        _encode_block(container.store, params, block, bits[block * b1:(block + 1) * b1])
    return container


class DecodeResult(NamedTuple):
    bits: list[int]
    failed_blocks: list[int]


def global_decode(container: Container) -> DecodeResult:
    pr = container.params
    store = container.store
    if store.capacity != pr.payload_bits:
        raise MalformedContainer("payload size mismatch")
    out: list[int] = []
    failed = []
    for block in range(pr.n_blocks):
        if store.read_bit(pr.flag_addr(block)):
            failed.append(block)
        base = pr.sparse_base(block)
        for j in range(pr.k):
            if sparse.read_status(store, pr.sparse, j, base):
                cj = sparse.chunk_of(store, pr.sparse, j, base)
                if cj >= pr.beta:
                    raise MalformedContainer(f"block {block} points past the memory table")
                out.extend(store.read_bits(sparse._chunk(pr.sparse, base, cj), pr.b0))
            else:
                code = store.read_bits(pr.code_addr(block, j), pr.L)
                try:
                    out.extend(subblock.decode_subblock(code, pr.sub))
                except ValueError as exc:
                    raise MalformedContainer(str(exc)) from exc
    return DecodeResult(out[: pr.n], failed)


# local operations


def local_decode(container: Container, i: int) -> int:
    """Recover message bit ``i`` by probing only its block's region."""
    pr = container.params
    store = container.store
    block, j, off = pr.locate(i)
    if store.read_bit(pr.flag_addr(block)):
        raise BlockFailed(f"block {block} is flagged as failed")
    base = pr.sparse_base(block)
    if sparse.read_status(store, pr.sparse, j, base):
        cj = sparse.chunk_of(store, pr.sparse, j, base)
        return store.read_bit(sparse._chunk(pr.sparse, base, cj) + off)
    code = store.read_bits(pr.code_addr(block, j), pr.L)
    return subblock.decode_subblock(code, pr.sub)[off]


def local_update(container: Container, i: int, v: int) -> None:
    """Set message bit ``i`` to ``v`` in place.

    Leaves the container equal to a fresh :func:`global_encode` of the
    updated message up to the order of chunks in the sparse memory table.
    """
    pr = container.params
    store = container.store
    sub, sp = pr.sub, pr.sparse
    v = 1 if v else 0
    block, j, off = pr.locate(i)
    flag = pr.flag_addr(block)
    if store.read_bit(flag):
        raise BlockFailed(f"block {block} is flagged as failed")
    base = pr.sparse_base(block)
    code_addr = pr.code_addr(block, j)

    if sparse.read_status(store, sp, j, base):
        # atypical: the subblock lives verbatim in the memory table
        cj = sparse.chunk_of(store, sp, j, base)
        data_addr = sparse._chunk(sp, base, cj)
        x = store.read_bits(data_addr, pr.b0)
        if x[off] == v:
            return
        x[off] = v
        if not subblock.is_typical(x, sub):
            store.write_bit(data_addr + off, v)
            return
        store.write_bits(code_addr, subblock.encode_subblock(x, sub))
        sparse.remove_block(store, sp, j, cj, base)
        return

    x = subblock.decode_subblock(store.read_bits(code_addr, pr.L), sub)
    if x[off] == v:
        return
    x[off] = v
    if subblock.is_typical(x, sub):
        store.write_bits(code_addr, subblock.encode_subblock(x, sub))
        return
    try:
        sparse.insert_block(store, sp, j, x, base)
    except CapacityExceeded:
        store.write_bit(flag, 1)
        raise
    store.write_bits(code_addr, [0] * pr.L)


def canonical_copy(container: Container) -> Container:
    """Copy with every healthy block's sparse region rewritten canonically.

    Chunk order in the memory table depends on update history; this puts
    chunks back in block order and clears don't-care fields, which is what
    :func:`global_encode` would have produced.
    """
    pr = container.params
    out = container.copy()
    for block in range(pr.n_blocks):
        if out.store.peek(pr.flag_addr(block)):
            continue
        base = pr.sparse_base(block)
        vec = sparse.peek_vector(out.store, pr.sparse, base)
        sparse.encode_into(out.store, pr.sparse, vec, base)
    return out


# Monte Carlo


class ErrorEstimate(NamedTuple):
    trials: int
    runs_with_failure: int
    failed_blocks: int
    block_failure_rate: float


def sample_atypical_counts(params: SchemeParams, rng: np.random.Generator, p=None) -> np.ndarray:
    """Atypical-subblock count per block for one Bernoulli(p) message."""
    p = float(params.p if p is None else p)
    b0 = params.b0
    full, rem = divmod(params.n, b0)
    weights = rng.binomial(b0, p, size=full)
    if rem:
        weights = np.append(weights, rng.binomial(rem, p))
    atyp = np.zeros(params.n_blocks * params.k, dtype=np.int64)
    atyp[: weights.size] = weights > params.w0
    return atyp.reshape(params.n_blocks, params.k).sum(axis=1)


def estimate_error(params: SchemeParams, trials: int, seed: int | None = 0, p=None) -> ErrorEstimate:
    """Empirical block-failure frequency over ``trials`` random messages."""
    rng = np.random.default_rng(seed)
    runs = failed = 0
    for _ in range(trials):
        bad = int((sample_atypical_counts(params, rng, p) > params.beta).sum())
        failed += bad
        runs += bad > 0
    total = trials * params.n_blocks
    return ErrorEstimate(trials, runs, failed, failed / total if total else 0.0)


def random_message(n: int, p, rng: np.random.Generator) -> list[int]:
    return (rng.random(n) < float(p)).astype(np.uint8).tolist()


def dump_container(container: Container) -> str:
    """Human-readable summary of every region."""
    pr = container.params
    buf = io.StringIO()
    for block in range(pr.n_blocks):
        flag = container.store.peek(pr.flag_addr(block))
        buf.write(f"block {block} flag {flag}\n")
        buf.write(sparse.dump(container.store, pr.sparse, pr.sparse_base(block)) + "\n")
    return buf.getvalue()
