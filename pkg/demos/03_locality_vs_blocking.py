"""Probe counts of the scheme against naive blocking as n grows.

Takes about half a minute; sizing for n = 2**14 is the slow step.
"""

import math

from ldcodec import audit, scheme
from ldcodec.baseline import derive_blocking

p, eps = "0.05", "0.1"
print("n\tr_wc\tt_wc\tr/lglg\tt*eps/lglg\tbase_b\tbase_r\tbase_r/lg")
for e in (14, 16, 20):
    n = 2**e
    params = scheme.derive_params(n, p, eps)
    row = audit.measure_scheme(params, seed=0, n_random=300)
    base = derive_blocking(n, p, eps)
    brow = audit.measure_baseline(base, p, seed=0, n_updates=50)
    lln = math.log2(math.log2(n))
    print(f"2^{e}\t{row.r_wc}\t{row.t_wc}\t{row.r_wc / lln:.1f}\t{row.t_wc * 0.1 / lln:.1f}"
          f"\t{base.b}\t{brow.r_wc}\t{brow.r_wc / e:.2f}")

# the baseline must make blocks long enough that a whole block is typical
# with probability 1 - 1/n**2, so its decode cost grows like log n; the
# scheme only ever reads one short subblock codeword or one memory chunk
