"""Probe measurements for the sparse structure, the scheme and the baseline."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import scheme, sparse
from .baseline import BlockingCodec, BlockingParams
from .bitstore import BitStore
from .errors import CapacityExceeded
from .scheme import Container, SchemeParams
from .sparse import SparseParams


@dataclass
class ProbeStats:
    counts: list[int] = field(default_factory=list)

    def add(self, n: int) -> None:
        self.counts.append(n)

    @property
    def max(self) -> int:
        return max(self.counts, default=0)

    @property
    def mean(self) -> float:
        return sum(self.counts) / len(self.counts) if self.counts else 0.0


def probes(store: BitStore, fn, *args) -> int:
    with store.ledger() as led:
        fn(*args)
    return led.probe_count


# sparse structure


def nominal_costs(params: SparseParams) -> dict[str, float]:
    """Nominal decode/update costs with exact logarithms, for comparison only."""
    lb = math.log2(params.beta)
    lr = math.log2(params.n_blocks)
    b_m = params.b1 + lr
    return {
        "decode": 2 + lb,
        "update_itemized": 2 + lb + 2 * lb + 2 * b_m + lb,
        "update_simplified": 2 + params.b1 + 4 * lb + lr,
    }


def sparse_delete_swap_probes(params: SparseParams) -> int:
    """Cost of emptying a block whose chunk is not the last occupied one."""
    if params.n_blocks < 2 or params.beta < 2:
        raise ValueError("need two blocks and two chunks for a chunk move")
    x = [0] * params.b
    x[0] = 1
    x[params.b1] = 1
    store = sparse.init_encode(x, params)
    return probes(store, sparse.update_bit, store, params, 0, 0)


def sparse_decode_sweep(store: BitStore, params: SparseParams) -> ProbeStats:
    stats = ProbeStats()
    for i in range(params.b):
        stats.add(probes(store, sparse.decode_bit, store, params, i))
    return stats


# scheme


def decode_positions(params: SchemeParams, exhaustive: bool = False):
    """Every position, or one per subblock (cost depends only on the subblock)."""
    if exhaustive:
        return range(params.n)
    return range(0, params.n, params.b0)


def scheme_decode_stats(container: Container, exhaustive: bool = False) -> ProbeStats:
    stats = ProbeStats()
    store = container.store
    failed = set(container.failed_blocks())
    for i in decode_positions(container.params, exhaustive):
        if i // container.params.b1 in failed:
            continue
        stats.add(probes(store, scheme.local_decode, container, i))
    return stats


def _adversarial_updates(container: Container, rng: np.random.Generator) -> list[int]:
    """Drive one block through an insert and a delete-with-move; return costs."""
    pr = container.params
    store = container.store
    if pr.k < 2 or pr.beta < 2:
        return []
    healthy = [b for b in range(pr.n_blocks) if not store.peek(pr.flag_addr(b))]
    if not healthy:
        return []
    block = int(rng.choice(healthy))
    decoded = scheme.global_decode(container).bits
    base = block * pr.b1
    costs = []
    # find two typical subblocks in this block that lie fully inside the message
    typical = []
    for j in range(pr.k):
        lo = base + j * pr.b0
        if lo + pr.b0 <= pr.n and sum(decoded[lo:lo + pr.b0]) <= pr.w0:
            typical.append(j)
    if len(typical) < 2:
        return []
    counter_addr = pr.sparse_base(block) + pr.sparse.layout.counter
    occupied = sum(store.peek(counter_addr + t) << (pr.sparse.c_w - 1 - t)
                   for t in range(pr.sparse.c_w))
    if occupied + 2 > pr.beta:
        return []
    first, second = typical[:2]
    for j in (first, second):
        lo = base + j * pr.b0
        zeros = [lo + t for t in range(pr.b0) if not decoded[lo + t]]
        # raise weight to w0, then one more bit makes it atypical
        need = pr.w0 - sum(decoded[lo:lo + pr.b0])
        for pos in zeros[:need]:
            scheme.local_update(container, pos, 1)
            decoded[pos] = 1
        pos = zeros[need]
        costs.append(probes(store, scheme.local_update, container, pos, 1))
        decoded[pos] = 1
    # first now owns an earlier chunk than second: emptying it moves a chunk
    lo = base + first * pr.b0
    one = next(lo + t for t in range(pr.b0) if decoded[lo + t])
    costs.append(probes(store, scheme.local_update, container, one, 0))
    decoded[one] = 0
    return costs


def scheme_update_stats(
    container: Container, rng: np.random.Generator, n_random: int = 500
) -> ProbeStats:
    """Random Bernoulli(p) updates plus adversarial insert/delete paths."""
    pr = container.params
    stats = ProbeStats()
    failed = set(container.failed_blocks())
    for _ in range(n_random):
        i = int(rng.integers(0, pr.n))
        if i // pr.b1 in failed:
            continue
        v = int(rng.random() < float(pr.p))
        try:
            stats.add(probes(container.store, scheme.local_update, container, i, v))
        except CapacityExceeded:  # the block is now flagged failed
            failed.add(i // pr.b1)
    for cost in _adversarial_updates(container, rng):
        stats.add(cost)
    return stats


@dataclass
class LocalityRow:
    n: int
    r_wc: int
    r_mean: float
    t_wc: int
    t_mean: float
    r_bound: int
    t_bound: int
    failed_blocks: int


def measure_scheme(
    params: SchemeParams, seed: int = 0, n_random: int = 500, exhaustive: bool = False
) -> LocalityRow:
    rng = np.random.default_rng(seed)
    x = scheme.random_message(params.n, params.p, rng)
    container = scheme.global_encode(x, params)
    dec = scheme_decode_stats(container, exhaustive)
    upd = scheme_update_stats(container, rng, n_random)
    return LocalityRow(params.n, dec.max, dec.mean, upd.max, upd.mean,
                       params.decode_bound, params.update_bound,
                       len(container.failed_blocks()))


def measure_baseline(params: BlockingParams, p, seed: int = 0, n_updates: int = 200) -> LocalityRow:
    rng = np.random.default_rng(seed)
    codec = BlockingCodec(params)
    codec.encode(scheme.random_message(params.n, p, rng))
    dec = ProbeStats()
    for i in range(0, params.n, params.b):
        dec.add(probes(codec.store, codec.local_decode, i))
    upd = ProbeStats()
    for _ in range(n_updates):
        i = int(rng.integers(0, params.n))
        upd.add(probes(codec.store, codec.local_update, i, int(rng.random() < float(p))))
    return LocalityRow(params.n, dec.max, dec.mean, upd.max, upd.mean,
                       params.L, 2 * params.L, 0)


def throughput(fn, reps: int) -> float:
    """Calls per second of ``fn(k)`` for k in range(reps)."""
    start = time.perf_counter()
    for k in range(reps):
        fn(k)
    elapsed = time.perf_counter() - start
    return reps / elapsed if elapsed > 0 else float("inf")
