import math
from fractions import Fraction

import numpy as np
import pytest

from ldcodec import scheme
from ldcodec.baseline import BlockingCodec, BlockingParams, derive_blocking
from ldcodec.errors import AddressError, Infeasible
from ldcodec.sizing import atypical_probability
from ldcodec.subblock import binary_entropy


@pytest.mark.parametrize("n,b", [(2**14, 615), (2**16, 718)])
def test_derived_block_length(n, b):
    bp = derive_blocking(n, "0.05", "0.1")
    assert bp.b == b
    assert bp.L / bp.b <= binary_entropy(0.05) + 0.2
    assert atypical_probability(bp.b, bp.w, Fraction(1, 20)) <= Fraction(1, n * n)
    assert derive_blocking(n, "0.05", "0.1", max_b=b).b == b
    with pytest.raises(Infeasible):
        derive_blocking(n, "0.05", "0.1", max_b=b - 1)


def test_codec_roundtrip_and_probes():
    bp = BlockingParams(200, 20, 4)
    codec = BlockingCodec(bp)
    rng = np.random.default_rng(5)
    x = scheme.random_message(bp.n, Fraction(1, 20), rng)
    codec.encode(x)
    for i in range(bp.n):
        blk = x[i // 20 * 20:(i // 20 + 1) * 20]
        with codec.store.ledger() as led:
            v = codec.local_decode(i)
        assert v == (x[i] if sum(blk) <= 4 else 0)
        assert led.probe_count == bp.L
    with codec.store.ledger() as led:
        codec.local_update(3, 1)
    assert led.probe_count == 2 * bp.L
    assert codec.local_decode(3) == 1
    with pytest.raises(AddressError):
        codec.local_decode(200)


def test_rate():
    bp = BlockingParams(100, 20, 4)
    assert bp.rate == Fraction(5 * bp.L, 100)
    assert bp.L == sum(math.comb(20, w) for w in range(5)).bit_length()
