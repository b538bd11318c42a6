"""Exact analysis of small nonadaptive local schemes.

A :class:`SchemeDescription` lists, for every codeword bit ``j``, the message
positions it reads (``N_e(j)``) and a truth table ``f_j``; and for every
message bit ``i`` the codeword positions its decoder reads (``N_d(i)``) and
a truth table ``g_i``.  Truth tables are indexed by the neighbourhood's
bits read as a big-endian integer, lowest neighbour index first.

All probabilities are exact :class:`fractions.Fraction` values obtained by
enumeration, so descriptions are limited to small ``n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import subblock
from .errors import InvalidParams
from .subblock import SubblockParams

MAX_ENUM_N = 24


@dataclass(frozen=True)
class LocalFunction:
    neighbors: tuple[int, ...]
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if tuple(sorted(set(self.neighbors))) != self.neighbors:
            raise InvalidParams(f"neighbourhood {self.neighbors} must be sorted and distinct")
        if len(self.table) != 1 << len(self.neighbors):
            raise InvalidParams(
                f"truth table has {len(self.table)} rows, expected {1 << len(self.neighbors)}"
            )

    def __call__(self, values: Sequence[int]) -> int:
        idx = 0
        for a in self.neighbors:
            idx = (idx << 1) | values[a]
        return self.table[idx]


def _fn(neighbors: Iterable[int], table: Iterable[int]) -> LocalFunction:
    return LocalFunction(tuple(neighbors), tuple(int(t) for t in table))


@dataclass(frozen=True)
class SchemeDescription:
    n: int
    m: int
    enc: tuple[LocalFunction, ...]
    dec: tuple[LocalFunction, ...]

    def __post_init__(self) -> None:
        if len(self.enc) != self.m or len(self.dec) != self.n:
            raise InvalidParams("need exactly m encoders and n decoders")
        for f in self.enc:
            if any(not 0 <= a < self.n for a in f.neighbors):
                raise InvalidParams("encoder neighbour outside [0, n)")
        for g in self.dec:
            if any(not 0 <= a < self.m for a in g.neighbors):
                raise InvalidParams("decoder neighbour outside [0, m)")

    @property
    def rate(self) -> Fraction:
        return Fraction(self.m, self.n)

    def encode(self, x: Sequence[int]) -> list[int]:
        return [f(x) for f in self.enc]

    def decode(self, c: Sequence[int]) -> list[int]:
        return [g(c) for g in self.dec]


# text format


def parse_description(text: str) -> SchemeDescription:
    """Parse ``n``/``m``/``enc``/``dec`` lines; ``#`` starts a comment."""
    n = m = None
    enc: dict[int, LocalFunction] = {}
    dec: dict[int, LocalFunction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        key = line[0]
        try:
            if key == "n":
                n = int(line[1])
            elif key == "m":
                m = int(line[1])
            elif key in ("enc", "dec"):
                idx = int(line[1])
                *nbrs, table = line[2:]
                if set(table) - {"0", "1"}:
                    raise ValueError(f"truth table {table!r} is not a bit string")
                fn = _fn(map(int, nbrs), table)
                (enc if key == "enc" else dec)[idx] = fn
            else:
                raise ValueError(f"unknown directive {key!r}")
        except (IndexError, ValueError, InvalidParams) as exc:
            raise InvalidParams(f"line {lineno}: {exc}") from exc
    if n is None or m is None:
        raise InvalidParams("missing n or m line")
    if sorted(enc) != list(range(m)) or sorted(dec) != list(range(n)):
        raise InvalidParams("enc/dec lines must cover every index exactly once")
    return SchemeDescription(n, m, tuple(enc[j] for j in range(m)), tuple(dec[i] for i in range(n)))


def format_description(desc: SchemeDescription) -> str:
    lines = [f"n {desc.n}", f"m {desc.m}"]
    for tag, fns in (("enc", desc.enc), ("dec", desc.dec)):
        for idx, f in enumerate(fns):
            parts = [tag, str(idx), *map(str, f.neighbors), "".join(map(str, f.table))]
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


# neighbourhoods


def effective_neighborhood(desc: SchemeDescription, i: int) -> frozenset[int]:
    out: set[int] = set()
    for j in desc.dec[i].neighbors:
        out.update(desc.enc[j].neighbors)
    return frozenset(out)


def augmented_neighborhood(desc: SchemeDescription, i: int) -> frozenset[int]:
    return effective_neighborhood(desc, i) | {i}


def _weight(ones: int, zeros: int, p: Fraction) -> Fraction:
    return p**ones * (1 - p) ** zeros


def exact_bit_error(desc: SchemeDescription, i: int, p) -> Fraction:
    """P[decoded bit i != X_i], enumerating only N_eff(i) and i."""
    p = Fraction(p)
    vars_ = sorted(augmented_neighborhood(desc, i))
    js = desc.dec[i].neighbors
    x = [0] * desc.n
    c = [0] * desc.m
    total = Fraction(0)
    for assignment in itertools.product((0, 1), repeat=len(vars_)):
        for a, v in zip(vars_, assignment):
            x[a] = v
        for j in js:
            c[j] = desc.enc[j](x)
        if desc.dec[i](c) != x[i]:
            ones = sum(assignment)
            total += _weight(ones, len(vars_) - ones, p)
    return total


def _configurations(n: int):
    if n > MAX_ENUM_N:
        raise InvalidParams(f"n={n} too large for full enumeration (max {MAX_ENUM_N})")
    return itertools.product((0, 1), repeat=n)


def brute_force_bit_errors(desc: SchemeDescription, p) -> list[Fraction]:
    """Oracle: every P_e^(i) from all 2**n message configurations."""
    p = Fraction(p)
    errs = [Fraction(0)] * desc.n
    for x in _configurations(desc.n):
        w = _weight(sum(x), desc.n - sum(x), p)
        xh = desc.decode(desc.encode(x))
        for i in range(desc.n):
            if xh[i] != x[i]:
                errs[i] += w
    return errs


@dataclass
class FloorReport:
    i: int
    p_error: Fraction
    neighborhood_size: int
    floor: Fraction
    naive_floor: Fraction

    @property
    def ok(self) -> bool:
        return self.p_error == 0 or self.p_error >= self.floor

    @property
    def naive_ok(self) -> bool:
        return self.p_error == 0 or self.p_error >= self.naive_floor


def check_error_floor(desc: SchemeDescription, p) -> list[FloorReport]:
    """Nonzero bit errors are at least min(p, 1-p)**|N_eff(i) + {i}|.

    ``naive_floor`` is ``(1-p)**|N_eff(i)|``, which does not hold in general
    and is only reported.
    """
    p = Fraction(p)
    lo = min(p, 1 - p)
    out = []
    for i in range(desc.n):
        pe = exact_bit_error(desc, i, p)
        size = len(augmented_neighborhood(desc, i))
        out.append(
            FloorReport(i, pe, size, lo**size, (1 - p) ** len(effective_neighborhood(desc, i)))
        )
    return out


def greedy_disjoint_set(desc: SchemeDescription, p=Fraction(1, 10)) -> list[int]:
    """Positions with nonzero error whose augmented neighbourhoods are disjoint.

    Scans positions in index order; ``p`` only matters for deciding which
    errors are nonzero, and any 0 < p < 1 gives the same answer.
    """
    chosen: list[int] = []
    used: set[int] = set()
    for i in range(desc.n):
        nb = augmented_neighborhood(desc, i)
        if nb & used:
            continue
        if exact_bit_error(desc, i, p) > 0:
            chosen.append(i)
            used |= nb
    return chosen


def joint_error_distribution(desc: SchemeDescription, positions: Sequence[int], p) -> dict:
    """Exact law of the error indicators at ``positions`` (full enumeration)."""
    p = Fraction(p)
    law: dict[tuple[int, ...], Fraction] = {}
    for x in _configurations(desc.n):
        xh = desc.decode(desc.encode(x))
        key = tuple(int(xh[i] != x[i]) for i in positions)
        law[key] = law.get(key, Fraction(0)) + _weight(sum(x), desc.n - sum(x), p)
    return law


def factorizes(desc: SchemeDescription, positions: Sequence[int], p) -> bool:
    p = Fraction(p)
    law = joint_error_distribution(desc, positions, p)
    marg = [exact_bit_error(desc, i, p) for i in positions]
    for key in itertools.product((0, 1), repeat=len(positions)):
        prod = Fraction(1)
        for bit, pe in zip(key, marg):
            prod *= pe if bit else 1 - pe
        if law.get(key, Fraction(0)) != prod:
            return False
    return True


@dataclass
class BlockErrorReport:
    exact: Fraction
    bound: Fraction
    greedy_set: list[int]
    bit_errors: dict[int, Fraction] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.exact >= self.bound


def exact_block_error(desc: SchemeDescription, p) -> Fraction:
    p = Fraction(p)
    total = Fraction(0)
    for x in _configurations(desc.n):
        if desc.decode(desc.encode(x)) != list(x):
            total += _weight(sum(x), desc.n - sum(x), p)
    return total


def block_error_bound(desc: SchemeDescription, p) -> BlockErrorReport:
    p = Fraction(p)
    s = greedy_disjoint_set(desc, p)
    errs = {i: exact_bit_error(desc, i, p) for i in s}
    prod = Fraction(1)
    for pe in errs.values():
        prod *= 1 - pe
    return BlockErrorReport(exact_block_error(desc, p), 1 - prod, s, errs)


def has_positive_error(desc: SchemeDescription, p=Fraction(1, 10)) -> bool:
    return any(exact_bit_error(desc, i, p) > 0 for i in range(desc.n))


# degrees


@dataclass
class DegreeReport:
    d: list[int]            # decoder reads per message bit
    e: list[int]            # encoder inputs per codeword bit
    delta_l: list[int]      # codeword bits touching each message bit
    delta_r: list[int]      # decoders reading each codeword bit
    log2_n: float

    @property
    def d_wc(self) -> int:
        return max(self.d, default=0)

    @property
    def e_wc(self) -> int:
        return max(self.e, default=0)

    @property
    def u_wc(self) -> int:
        return max(self.delta_l, default=0)

    @staticmethod
    def _avg(xs: Sequence[int]) -> Fraction:
        return Fraction(sum(xs), len(xs)) if xs else Fraction(0)

    @property
    def e_avg(self) -> Fraction:
        return self._avg(self.e)

    @property
    def d_avg(self) -> Fraction:
        return self._avg(self.d)

    @property
    def delta_l_avg(self) -> Fraction:
        return self._avg(self.delta_l)

    @property
    def delta_r_avg(self) -> Fraction:
        return self._avg(self.delta_r)

    @property
    def encoder_ratio(self) -> Fraction:
        """Average over worst right degree of the encoding graph."""
        return self.e_avg / self.e_wc if self.e_wc else Fraction(1)

    @property
    def decoder_ratio(self) -> Fraction:
        """Average over worst left degree of the decoding graph."""
        wc = max(self.delta_r, default=0)
        return self.delta_r_avg / wc if wc else Fraction(1)

    @property
    def degree_identity(self) -> bool:
        return sum(self.e) == sum(self.delta_l)

    @property
    def adaptive_equivalent(self) -> dict[str, float]:
        """log2 of each nonadaptive locality (adaptive schemes with locality
        l read at most 2**l bits)."""
        return {
            "d_wc": math.log2(self.d_wc) if self.d_wc else 0.0,
            "e_wc": math.log2(self.e_wc) if self.e_wc else 0.0,
            "u_wc": math.log2(self.u_wc) if self.u_wc else 0.0,
        }

    def rows(self) -> list[tuple[str, str]]:
        ae = self.adaptive_equivalent
        return [
            ("d_wc", str(self.d_wc)),
            ("e_wc", str(self.e_wc)),
            ("u_wc_proxy", str(self.u_wc)),
            ("d_avg", f"{float(self.d_avg):.4f}"),
            ("e_avg", f"{float(self.e_avg):.4f}"),
            ("delta_l_avg", f"{float(self.delta_l_avg):.4f}"),
            ("delta_r_avg", f"{float(self.delta_r_avg):.4f}"),
            ("encoder_avg_to_wc", f"{float(self.encoder_ratio):.4f}"),
            ("decoder_avg_to_wc", f"{float(self.decoder_ratio):.4f}"),
            ("d_wc*e_wc", str(self.d_wc * self.e_wc)),
            ("d_wc*u_wc", str(self.d_wc * self.u_wc)),
            ("log2_n", f"{self.log2_n:.4f}"),
            ("degree_identity", str(self.degree_identity)),
            ("adaptive_d_wc", f"{ae['d_wc']:.4f}"),
            ("adaptive_e_wc", f"{ae['e_wc']:.4f}"),
            ("adaptive_u_wc", f"{ae['u_wc']:.4f}"),
        ]


def degree_report(desc: SchemeDescription) -> DegreeReport:
    delta_l = [0] * desc.n
    delta_r = [0] * desc.m
    for f in desc.enc:
        for a in f.neighbors:
            delta_l[a] += 1
    for g in desc.dec:
        for j in g.neighbors:
            delta_r[j] += 1
    return DegreeReport(
        d=[len(g.neighbors) for g in desc.dec],
        e=[len(f.neighbors) for f in desc.enc],
        delta_l=delta_l,
        delta_r=delta_r,
        log2_n=math.log2(desc.n) if desc.n else 0.0,
    )


# reference schemes


def identity_scheme(n: int) -> SchemeDescription:
    copy = (0, 1)
    return SchemeDescription(
        n, n,
        tuple(_fn([i], copy) for i in range(n)),
        tuple(_fn([i], copy) for i in range(n)),
    )


def repeat_first_scheme() -> SchemeDescription:
    """n=2, m=1: store X_0 only and decode both positions from it."""
    copy = (0, 1)
    return SchemeDescription(2, 1, (_fn([0], copy),), (_fn([0], copy), _fn([0], copy)))


def constant_decoder_scheme(n: int = 1) -> SchemeDescription:
    """No codeword bits; every position decodes to 0."""
    return SchemeDescription(n, 0, (), tuple(_fn([], (0,)) for _ in range(n)))


def disjoint_union(*descs: SchemeDescription) -> SchemeDescription:
    enc: list[LocalFunction] = []
    dec: list[LocalFunction] = []
    n_off = m_off = 0
    for d in descs:
        enc.extend(_fn([a + n_off for a in f.neighbors], f.table) for f in d.enc)
        dec.extend(_fn([a + m_off for a in g.neighbors], g.table) for g in d.dec)
        n_off += d.n
        m_off += d.m
    return SchemeDescription(n_off, m_off, tuple(enc), tuple(dec))


def with_idle_codeword_bits(desc: SchemeDescription, extra: int) -> SchemeDescription:
    """Append codeword bits that read nothing and are read by nobody."""
    idle = tuple(_fn([], (0,)) for _ in range(extra))
    return SchemeDescription(desc.n, desc.m + extra, desc.enc + idle, desc.dec)


def blocking_scheme(n: int, b: int, w: int) -> SchemeDescription:
    """Each b-bit block coded jointly by the threshold code of weight w.

    Every codeword bit of a block depends on the whole block and every
    decoder reads the block's whole codeword.
    """
    if n % b:
        raise InvalidParams("b must divide n")
    code = SubblockParams(b, w)
    L = code.L
    inputs = list(itertools.product((0, 1), repeat=b))
    codewords = [subblock.encode_subblock(x, code) for x in inputs]
    # codewords past the last rank never occur; decode them as zeros
    outputs = [
        subblock.unrank(v, code) if v <= code.n_typical else [0] * b
        for v in range(1 << L)
    ]
    enc, dec = [], []
    for blk in range(n // b):
        nb = range(blk * b, (blk + 1) * b)
        for t in range(L):
            enc.append(_fn(nb, [cw[t] for cw in codewords]))
        cnb = range(blk * L, (blk + 1) * L)
        for off in range(b):
            dec.append(_fn(cnb, [out[off] for out in outputs]))
    return SchemeDescription(n, (n // b) * L, tuple(enc), tuple(dec))


def random_scheme(rng, n: int, m: int, max_enc: int = 3, max_dec: int = 3) -> SchemeDescription:
    """Random neighbourhoods and truth tables; ``rng`` is a random.Random."""
    enc, dec = [], []
    for _ in range(m):
        nb = sorted(rng.sample(range(n), rng.randint(0, min(max_enc, n))))
        enc.append(_fn(nb, [rng.randint(0, 1) for _ in range(1 << len(nb))]))
    for _ in range(n):
        nb = sorted(rng.sample(range(m), rng.randint(0, min(max_dec, m))))
        dec.append(_fn(nb, [rng.randint(0, 1) for _ in range(1 << len(nb))]))
    return SchemeDescription(n, m, tuple(enc), tuple(dec))


def report_rows(desc: SchemeDescription, p) -> list[tuple]:
    """Flat TSV-ready report: per-position errors, block bound, degrees."""
    p = Fraction(p)
    rows: list[tuple] = [("section", "key", "value", "detail")]
    for r in check_error_floor(desc, p):
        rows.append(("bit_error", r.i, str(r.p_error),
                     f"floor={r.floor} ok={r.ok} naive_floor={r.naive_floor} naive_ok={r.naive_ok}"))
    if desc.n <= 20:
        be = block_error_bound(desc, p)
        rows.append(("block_error", "exact", str(be.exact), f"ok={be.ok}"))
        rows.append(("block_error", "bound", str(be.bound),
                     "S=" + ",".join(map(str, be.greedy_set))))
    deg = degree_report(desc)
    for key, value in deg.rows():
        rows.append(("degrees", key, value, ""))
    if desc.m < desc.n:
        size_hint = desc.n * (1 - desc.rate) / max(1, deg.d_wc * deg.e_wc)
        rows.append(("degrees", "greedy_size_hint", f"{float(size_hint):.4f}", "n(1-R)/(d_wc*e_wc)"))
    return rows
