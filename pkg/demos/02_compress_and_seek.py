"""Compress a Bernoulli(0.05) message, then read and edit single bits in place."""

import tempfile
from pathlib import Path

import numpy as np

from ldcodec import scheme
from ldcodec.scheme import Container
from ldcodec.subblock import binary_entropy

n, p, eps = 2**16, "0.05", "0.1"
params = scheme.derive_params(n, p, eps)
print(params)
print(f"subblock code L={params.L} for b0={params.b0} bits; "
      f"{params.k} subblocks per block; region width {params.region_bits} bits")
print(f"rate {float(scheme.rate(params)):.4f} (payload {float(scheme.payload_rate(params)):.4f}), "
      f"H(p)+2eps = {binary_entropy(0.05) + 0.2:.4f}")

rng = np.random.default_rng(42)
x = scheme.random_message(n, params.p, rng)
container = scheme.global_encode(x, params)
assert scheme.global_decode(container).bits == x

# single-bit reads touch one region only
costs = []
for i in rng.integers(0, n, size=2000):
    with container.store.ledger() as led:
        assert scheme.local_decode(container, int(i)) == x[i]
    costs.append(led.probe_count)
print(f"local decode: max {max(costs)} mean {np.mean(costs):.1f} bound {params.decode_bound}")

# edits keep the container consistent with a fresh encoding
costs = []
for _ in range(500):
    i = int(rng.integers(n))
    v = int(rng.random() < 0.05)
    with container.store.ledger() as led:
        scheme.local_update(container, i, v)
    costs.append(led.probe_count)
    x[i] = v
print(f"local update: max {max(costs)} mean {np.mean(costs):.1f} bound {params.update_bound}")
print("matches fresh encoding:",
      scheme.canonical_copy(container) == scheme.global_encode(x, params))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "msg.ldc"
    container.save(path)
    print(f"file: {path.stat().st_size} bytes for {n // 8} raw bytes")
    assert Container.load(path) == container

# Monte Carlo: how often would a block overflow its sparse capacity?
print(scheme.estimate_error(params, 200, seed=1))
