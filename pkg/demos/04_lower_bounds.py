"""Exact error probabilities of tiny local schemes."""

import random
from fractions import Fraction

from ldcodec import bounds

p = Fraction(1, 10)

# two message bits, one codeword bit holding the first; both decode from it
pair = bounds.repeat_first_scheme()
print(bounds.format_description(pair))
for rep in bounds.check_error_floor(pair, p):
    print(f"i={rep.i} P_e={rep.p_error} floor={rep.floor} ok={rep.ok} "
          f"(uncorrected floor {rep.naive_floor}: ok={rep.naive_ok})")

# three disjoint copies: errors at the greedy positions are independent
copies = bounds.disjoint_union(pair, pair, pair)
rep = bounds.block_error_bound(copies, p)
print("greedy set", rep.greedy_set, "exact", rep.exact, "bound", rep.bound)
print("factorizes:", bounds.factorizes(copies, rep.greedy_set, p))

# joint coding of 4-bit blocks, the naive baseline in miniature
blocking = bounds.blocking_scheme(8, 4, 1)
for key, value in bounds.degree_report(blocking).rows()[:4]:
    print(key, value)
print("block error", bounds.exact_block_error(blocking, p))

# random schemes with fewer codeword bits than message bits always err somewhere
r = random.Random(3)
worst = Fraction(1)
for _ in range(500):
    n = r.randint(2, 9)
    desc = bounds.random_scheme(r, n, r.randint(1, n - 1))
    for rep in bounds.check_error_floor(desc, p):
        assert rep.ok
        if rep.p_error:
            worst = min(worst, rep.p_error / rep.floor)
    assert bounds.has_positive_error(desc, p)
print("smallest P_e / floor over 500 random schemes:", float(worst))
