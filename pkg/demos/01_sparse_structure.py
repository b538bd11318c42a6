"""Walk through the sparse bit-vector structure on a small and a mid-sized case."""

import numpy as np

from ldcodec import sparse
from ldcodec.audit import nominal_costs, sparse_delete_swap_probes
from ldcodec.sparse import SparseParams

# 8 bits in blocks of 2, room for two nonzero blocks
small = SparseParams(8, 2, 2)
x = [0, 0, 1, 0, 0, 0, 0, 1]
store = sparse.init_encode(x, small)
print(sparse.dump(store, small))

with store.ledger() as led:
    bit = sparse.decode_bit(store, small, 2)
print("x[2] =", bit, "probes", led.probe_count, "reads", list(led.reads))

# clearing x[2] empties block 1, so block 3's chunk moves down into slot 0
sparse.update_bit(store, small, 2, 0)
print(sparse.dump(store, small))
print("canonical:", not sparse.canonical_violations(store, small))

# the reference geometry: 1024 bits, 32-bit blocks, 8 chunks
mid = SparseParams(1024, 32, 8)
print("\nwidths b_p b_r b_m c_w:", mid.b_p, mid.b_r, mid.b_m, mid.c_w)
print("layout bits:", mid.layout.total_bits, "formula:", sparse.nominal_space(mid))
print("decode bound:", mid.decode_bound, "update bound:", mid.update_bound)
print("measured delete-with-move:", sparse_delete_swap_probes(mid))
for name, value in nominal_costs(mid).items():
    print(f"  nominal {name}: {value:.0f}")

# random workload: decode and update probe counts stay under the bounds
rng = np.random.default_rng(0)
ref = [0] * mid.b
store = sparse.init_encode(ref, mid)
dec, upd = [], []
for _ in range(5000):
    i = int(rng.integers(mid.b))
    blk = i // mid.b1
    busy = sum(any(ref[k * 32:(k + 1) * 32]) for k in range(mid.n_blocks))
    v = int(rng.random() < 0.5)
    if v and not any(ref[blk * 32:(blk + 1) * 32]) and busy >= mid.beta:
        v = 0
    with store.ledger() as led:
        sparse.update_bit(store, mid, i, v)
    upd.append(led.probe_count)
    ref[i] = v
    with store.ledger() as led:
        assert sparse.decode_bit(store, mid, i) == v
    dec.append(led.probe_count)
print(f"\nworkload: decode max {max(dec)} mean {np.mean(dec):.2f}; "
      f"update max {max(upd)} mean {np.mean(upd):.2f}")
