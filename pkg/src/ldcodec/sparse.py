"""Dynamic succinct structure for sparse fixed-length bit vectors.

A length-``b`` vector is cut into ``n_blocks = b // b1`` blocks.  Only the
nonzero blocks are stored, in a memory table of ``beta`` chunks.  Four
regions are laid out back to back:

====================  ================================  ====================
region                width                             purpose
====================  ================================  ====================
status bits           ``n_blocks``                      block is nonzero
memory table          ``beta * (b1 + b_r)``             data + reverse pointer
memory pointers       ``n_blocks * b_p``                chunk index per block
counter               ``c_w``                           occupied chunks
====================  ================================  ====================

The occupied chunks are always ``0 .. counter-1``.  Deleting a block moves
the last occupied chunk into the freed slot and repoints its owner, which
keeps both decode and update within a small number of bit probes.

Every function accepts a ``base`` bit offset so the structure can live
inside a larger :class:`~ldcodec.bitstore.BitStore`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .bitstore import BitStore
from .errors import AddressError, CapacityExceeded, InvalidParams, LengthError


def ceil_log2(x: int) -> int:
    """Smallest ``w`` with ``2**w >= x`` (0 for x <= 1)."""
    return max(0, (x - 1).bit_length())


@dataclass(frozen=True)
class SparseParams:
    b: int
    b1: int
    beta: int

    def __post_init__(self) -> None:
        if self.b < 1 or self.b1 < 1:
            raise InvalidParams("b and b1 must be positive")
        if self.b % self.b1:
            raise InvalidParams(f"b1={self.b1} does not divide b={self.b}")
        if not 1 <= self.beta <= self.b // self.b1:
            raise InvalidParams(f"beta={self.beta} outside [1, {self.b // self.b1}]")

    @property
    def n_blocks(self) -> int:
        return self.b // self.b1

    @property
    def b_p(self) -> int:
        return max(1, ceil_log2(self.beta))

    @property
    def b_r(self) -> int:
        return max(1, ceil_log2(self.n_blocks))

    @property
    def b_m(self) -> int:
        return self.b1 + self.b_r

    @property
    def c_w(self) -> int:
        # counter ranges over 0..beta inclusive
        return ceil_log2(self.beta + 1)

    @property
    def decode_bound(self) -> int:
        return 2 + self.b_p

    @property
    def update_bound(self) -> int:
        """Worst-case probes of :func:`update_bit` (delete with chunk move)."""
        return 2 + 2 * self.b_p + 2 * self.c_w + self.b1 + 2 * self.b_m

    @cached_property
    def layout(self) -> "SparseLayout":
        return layout(self)


@dataclass(frozen=True)
class SparseLayout:
    status: int
    table: int
    pointers: int
    counter: int
    total_bits: int


def layout(params: SparseParams) -> SparseLayout:
    nb = params.n_blocks
    status = 0
    table = status + nb
    pointers = table + params.beta * params.b_m
    counter = pointers + nb * params.b_p
    return SparseLayout(status, table, pointers, counter, counter + params.c_w)


def nominal_space(params: SparseParams) -> float:
    """The unrounded space formula: status + table + pointers + counter."""
    nb = params.n_blocks
    lb = math.log2(params.beta)
    return nb + params.beta * (params.b1 + math.log2(nb)) + nb * lb + lb


def nominal_space_ceiled(params: SparseParams) -> int:
    """Same formula with every logarithm rounded up to a usable width."""
    nb = params.n_blocks
    return nb + params.beta * params.b_m + nb * params.b_p + params.b_p


# address helpers


def _status(params: SparseParams, base: int, block: int) -> int:
    return base + params.layout.status + block


def _pointer(params: SparseParams, base: int, block: int) -> int:
    return base + params.layout.pointers + block * params.b_p


def _chunk(params: SparseParams, base: int, j: int) -> int:
    return base + params.layout.table + j * params.b_m


def _counter(params: SparseParams, base: int) -> int:
    return base + params.layout.counter


def _split(params: SparseParams, i: int) -> tuple[int, int]:
    if not 0 <= i < params.b:
        raise AddressError(f"position {i} outside [0, {params.b})")
    return divmod(i, params.b1)


def _check_block(params: SparseParams, block: int) -> None:
    if not 0 <= block < params.n_blocks:
        raise AddressError(f"block {block} outside [0, {params.n_blocks})")


# encoding


def encode_into(
    store: BitStore,
    params: SparseParams,
    x: Sequence[int],
    base: int = 0,
    truncate: bool = False,
) -> int:
    """Write the canonical encoding of ``x`` at ``base``; return chunks used.

    Nonzero blocks take chunks in increasing block order.  With
    ``truncate=True`` blocks beyond capacity are dropped instead of raising.
    The whole region is written, so stale content is overwritten.
    """
    if len(x) != params.b:
        raise LengthError(f"expected {params.b} bits, got {len(x)}")
    b1, nb = params.b1, params.n_blocks
    nonzero = [k for k in range(nb) if any(x[k * b1:(k + 1) * b1])]
    if len(nonzero) > params.beta:
        if not truncate:
            raise CapacityExceeded(
                f"{len(nonzero)} nonzero blocks exceed capacity {params.beta}"
            )
        nonzero = nonzero[: params.beta]
    lay = params.layout
    store.write_bits(base, [0] * lay.total_bits)
    for j, k in enumerate(nonzero):
        store.write_bit(_status(params, base, k), 1)
        store.write_field(_pointer(params, base, k), params.b_p, j)
        addr = _chunk(params, base, j)
        store.write_bits(addr, x[k * b1:(k + 1) * b1])
        store.write_field(addr + b1, params.b_r, k)
    store.write_field(_counter(params, base), params.c_w, len(nonzero))
    return len(nonzero)


def init_encode(x: Sequence[int], params: SparseParams) -> BitStore:
    store = BitStore(params.layout.total_bits)
    encode_into(store, params, x)
    return store


# local decoding


def decode_bit(store: BitStore, params: SparseParams, i: int, base: int = 0) -> int:
    block, off = _split(params, i)
    if not store.read_bit(_status(params, base, block)):
        return 0
    j = store.read_field(_pointer(params, base, block), params.b_p)
    return store.read_bit(_chunk(params, base, j) + off)


def decode_block(
    store: BitStore, params: SparseParams, block: int, base: int = 0
) -> list[int]:
    _check_block(params, block)
    if not store.read_bit(_status(params, base, block)):
        return [0] * params.b1
    j = store.read_field(_pointer(params, base, block), params.b_p)
    return store.read_bits(_chunk(params, base, j), params.b1)


# block-level primitives; callers must already know the block's status


def insert_block(
    store: BitStore,
    params: SparseParams,
    block: int,
    data: Sequence[int],
    base: int = 0,
) -> int:
    """Claim the next free chunk for a currently-zero ``block``.

    Returns the chunk index.  Raises CapacityExceeded, before any write, if
    all ``beta`` chunks are occupied.
    """
    _check_block(params, block)
    if len(data) != params.b1:
        raise LengthError(f"expected {params.b1} data bits, got {len(data)}")
    c_addr = _counter(params, base)
    c = store.read_field(c_addr, params.c_w)
    if c >= params.beta:
        raise CapacityExceeded(f"all {params.beta} chunks occupied")
    store.write_bit(_status(params, base, block), 1)
    store.write_field(c_addr, params.c_w, c + 1)
    store.write_field(_pointer(params, base, block), params.b_p, c)
    addr = _chunk(params, base, c)
    store.write_bits(addr, data)
    store.write_field(addr + params.b1, params.b_r, block)
    return c


def remove_block(
    store: BitStore, params: SparseParams, block: int, j: int, base: int = 0
) -> None:
    """Release chunk ``j`` held by ``block`` (swap-with-last)."""
    _check_block(params, block)
    store.write_bit(_status(params, base, block), 0)
    c_addr = _counter(params, base)
    c = store.read_field(c_addr, params.c_w)
    if c == 0:
        raise CapacityExceeded("counter already zero")
    last = c - 1
    store.write_field(c_addr, params.c_w, last)
    if j != last:
        src = _chunk(params, base, last)
        moved = store.read_bits(src, params.b_m)
        store.write_bits(_chunk(params, base, j), moved)
        owner = 0
        for bit in moved[params.b1:]:
            owner = (owner << 1) | bit
        store.write_field(_pointer(params, base, owner), params.b_p, j)


def write_chunk_data(
    store: BitStore, params: SparseParams, j: int, data: Sequence[int], base: int = 0
) -> None:
    store.write_bits(_chunk(params, base, j), data)


def chunk_of(store: BitStore, params: SparseParams, block: int, base: int = 0) -> int:
    """Read a block's memory pointer (meaningful only when its status is 1)."""
    return store.read_field(_pointer(params, base, block), params.b_p)


def read_status(store: BitStore, params: SparseParams, block: int, base: int = 0) -> int:
    return store.read_bit(_status(params, base, block))


# local update


def update_bit(
    store: BitStore, params: SparseParams, i: int, v: int, base: int = 0
) -> None:
    """Set position ``i`` to ``v`` while keeping the canonical form."""
    block, off = _split(params, i)
    v = 1 if v else 0
    if not store.read_bit(_status(params, base, block)):
        if v == 0:
            return
        data = [0] * params.b1
        data[off] = 1
        insert_block(store, params, block, data, base)
        return
    j = store.read_field(_pointer(params, base, block), params.b_p)
    addr = _chunk(params, base, j)
    if v == 1:
        # idempotent when the bit is already set
        store.write_bit(addr + off, 1)
        return
    data = store.read_bits(addr, params.b1)
    if not data[off]:
        return
    if sum(data) > 1:
        store.write_bit(addr + off, 0)
        return
    remove_block(store, params, block, j, base)


# unmetered inspection


def _peek_field(store: BitStore, offset: int, width: int) -> int:
    value = 0
    for a in range(offset, offset + width):
        value = (value << 1) | store.peek(a)
    return value


def peek_state(store: BitStore, params: SparseParams, base: int = 0) -> dict:
    """Interpret the region without recording probes."""
    nb, b1 = params.n_blocks, params.b1
    status = [store.peek(_status(params, base, k)) for k in range(nb)]
    pointers = [_peek_field(store, _pointer(params, base, k), params.b_p) for k in range(nb)]
    chunks = []
    for j in range(params.beta):
        addr = _chunk(params, base, j)
        data = [store.peek(a) for a in range(addr, addr + b1)]
        chunks.append((data, _peek_field(store, addr + b1, params.b_r)))
    counter = _peek_field(store, _counter(params, base), params.c_w)
    return {"status": status, "pointers": pointers, "chunks": chunks, "counter": counter}


def peek_vector(store: BitStore, params: SparseParams, base: int = 0) -> list[int]:
    st = peek_state(store, params, base)
    out = [0] * params.b
    for k, s in enumerate(st["status"]):
        if s:
            p = st["pointers"][k]
            if p < len(st["chunks"]):
                out[k * params.b1:(k + 1) * params.b1] = st["chunks"][p][0]
    return out


def canonical_violations(store: BitStore, params: SparseParams, base: int = 0) -> list[str]:
    """Full scan of the canonical-form invariant; empty list when it holds."""
    st = peek_state(store, params, base)
    c = st["counter"]
    problems = []
    owners = [k for k, s in enumerate(st["status"]) if s]
    if c != len(owners):
        problems.append(f"counter {c} != {len(owners)} nonzero blocks")
    if c > params.beta:
        problems.append(f"counter {c} exceeds beta {params.beta}")
    seen = set()
    for k in owners:
        p = st["pointers"][k]
        if p >= c or p >= params.beta:
            problems.append(f"block {k} points to unoccupied chunk {p}")
            continue
        if p in seen:
            problems.append(f"chunk {p} shared")
        seen.add(p)
        data, rev = st["chunks"][p]
        if rev != k:
            problems.append(f"chunk {p} reverse pointer {rev} != {k}")
        if not any(data):
            problems.append(f"block {k} stored as all-zero chunk {p}")
    return problems


def dump(store: BitStore, params: SparseParams, base: int = 0) -> str:
    """Text dump, one region per line, for golden tests and debugging."""
    st = peek_state(store, params, base)
    bits = lambda seq: "".join(map(str, seq))  # noqa: E731
    table = " ".join(
        f"{bits(d)}:{r:0{params.b_r}b}" for d, r in st["chunks"]
    )
    ptrs = " ".join(f"{p:0{params.b_p}b}" for p in st["pointers"])
    return "\n".join(
        [
            f"status {bits(st['status'])}",
            f"table {table}",
            f"pointers {ptrs}",
            f"counter {st['counter']:0{params.c_w}b}",
        ]
    )
