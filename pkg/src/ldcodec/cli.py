"""Command-line front end.

Tables go to stdout as TSV, diagnostics to stderr.  Exit codes: 0 on
success, otherwise the ``exit_code`` of the raised
:class:`~ldcodec.errors.LDCodecError` subclass (2 bad parameters,
3 address, 4 block failed, 5 capacity, 6 malformed container,
7 infeasible) and 8 for I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import audit, bounds, scheme
from .baseline import derive_blocking
from .errors import CapacityExceeded, LDCodecError
from .scheme import Container

log = logging.getLogger("ldcodec")

IO_ERROR = 8


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a decimal or fraction: {text!r}") from exc


def _tsv(rows) -> None:
    for row in rows:
        print("\t".join(str(c) for c in row))


def _read_bits(path: Path, n: int | None) -> list[int]:
    data = path.read_bytes()
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="big")
    if n is None:
        n = bits.size
    if n > bits.size:
        raise LDCodecError(f"{path} holds {bits.size} bits, fewer than n={n}")
    return bits[:n].tolist()


def _write_bits(path: Path, bits) -> None:
    arr = np.asarray(bits, dtype=np.uint8)
    path.write_bytes(np.packbits(arr, bitorder="big").tobytes())


def cmd_compress(args) -> int:
    x = _read_bits(args.input, args.n)
    params = scheme.derive_params(len(x), args.p, args.epsilon)
    container = scheme.global_encode(x, params)
    container.save(args.output)
    failed = container.failed_blocks()
    size_bits = 8 * args.output.stat().st_size
    _tsv([
        ("n", "b0", "w0", "b1", "beta", "rate", "file_rate", "failed_blocks"),
        (params.n, params.b0, params.w0, params.b1, params.beta,
         f"{float(scheme.rate(params)):.6f}", f"{size_bits / params.n:.6f}", len(failed)),
    ])
    if failed:
        log.warning("blocks %s overflowed their sparse capacity", failed)
    return 0


def cmd_decompress(args) -> int:
    container = Container.load(args.input)
    result = scheme.global_decode(container)
    _write_bits(args.output, result.bits)
    _tsv([("n", "failed_blocks"),
          (container.params.n, ",".join(map(str, result.failed_blocks)) or "-")])
    return 0


def cmd_get(args) -> int:
    container = Container.load(args.file)
    with container.store.ledger() as led:
        bit = scheme.local_decode(container, args.index)
    _tsv([("index", "bit", "probes"), (args.index, bit, led.probe_count)])
    return 0


def cmd_set(args) -> int:
    container = Container.load(args.file)
    header_len = len(container.header_bytes())
    before = container.store.snapshot()
    status = 0
    with container.store.ledger() as led:
        try:
            scheme.local_update(container, args.index, args.value)
        except CapacityExceeded as exc:
            log.error("%s; block flagged as failed", exc)
            status = exc.exit_code
    after = container.store.snapshot()
    touched = sorted({addr // 8 for addr, _ in led.writes})
    if touched:
        packed = np.packbits(np.frombuffer(after, dtype=np.uint8), bitorder="big")
        with open(args.file, "r+b") as fh:
            for byte in touched:
                fh.seek(header_len + byte)
                fh.write(bytes([packed[byte]]))
    changed = sum(a != b for a, b in zip(before, after))
    _tsv([("index", "value", "probes", "bits_changed"),
          (args.index, args.value, led.probe_count, changed)])
    return status


def cmd_audit(args) -> int:
    params = scheme.derive_params(args.n, args.p, args.epsilon)
    formulas = audit.nominal_costs(params.sparse)
    rows = [("trial", "seed", "decode_max", "decode_mean", "decode_bound",
             "update_max", "update_mean", "update_bound",
             "sparse_decode_formula", "sparse_update_itemized", "sparse_update_simplified",
             "sparse_update_audited", "failed_blocks")]
    dmax = umax = 0
    for t in range(args.trials):
        seed = args.seed + t
        row = audit.measure_scheme(params, seed=seed)
        dmax, umax = max(dmax, row.r_wc), max(umax, row.t_wc)
        rows.append((t, seed, row.r_wc, f"{row.r_mean:.3f}", row.r_bound,
                     row.t_wc, f"{row.t_mean:.3f}", row.t_bound,
                     f"{formulas['decode']:.3f}", f"{formulas['update_itemized']:.3f}",
                     f"{formulas['update_simplified']:.3f}", params.sparse.update_bound,
                     row.failed_blocks))
    rows.append(("all", args.seed, dmax, "", params.decode_bound, umax, "",
                 params.update_bound, "", "", "", params.sparse.update_bound, ""))
    _tsv(rows)
    return 0


def cmd_bounds(args) -> int:
    desc = bounds.parse_description(args.scheme.read_text())
    _tsv(bounds.report_rows(desc, args.p))
    return 0


def cmd_bench(args) -> int:
    params = scheme.derive_params(args.n, args.p, args.epsilon)
    rng = np.random.default_rng(args.seed)
    x = scheme.random_message(params.n, params.p, rng)
    start = time.perf_counter()
    container = scheme.global_encode(x, params)
    enc_rate = params.n / (time.perf_counter() - start)
    idx = rng.integers(0, params.n, size=2000)
    dec_ops = audit.throughput(lambda k: scheme.local_decode(container, int(idx[k])), len(idx))
    row = audit.measure_scheme(params, seed=args.seed)
    rows = [("codec", "n", "rate", "r_wc", "t_wc", "r_wc_per_loglogn", "r_wc_per_logn",
             "encode_bits_per_s", "decode_ops_per_s")]
    lln = np.log2(np.log2(params.n))
    ln = np.log2(params.n)
    rows.append(("scheme", params.n, f"{float(scheme.rate(params)):.6f}", row.r_wc, row.t_wc,
                 f"{row.r_wc / lln:.3f}", f"{row.r_wc / ln:.3f}",
                 f"{enc_rate:.0f}", f"{dec_ops:.0f}"))
    if args.baseline:
        bp = derive_blocking(params.n, args.p, args.epsilon)
        brow = audit.measure_baseline(bp, args.p, seed=args.seed)
        rows.append(("baseline", bp.n, f"{float(bp.rate):.6f}", brow.r_wc, brow.t_wc,
                     f"{brow.r_wc / lln:.3f}", f"{brow.r_wc / ln:.3f}", "", ""))
    _tsv(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldcodec", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress a raw bit file")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--n", type=int, help="message length in bits (default: whole file)")
    p.add_argument("--p", type=_rational, required=True)
    p.add_argument("--epsilon", type=_rational, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="globally decode a container")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("get", help="locally decode one bit")
    p.add_argument("--file", type=Path, required=True)
    p.add_argument("--index", type=int, required=True)
    p.set_defaults(func=cmd_get)

    p = sub.add_parser("set", help="locally update one bit in place")
    p.add_argument("--file", type=Path, required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--value", type=int, choices=(0, 1), required=True)
    p.set_defaults(func=cmd_set)

    p = sub.add_parser("audit", help="measure decode/update probes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_rational, required=True)
    p.add_argument("--epsilon", type=_rational, required=True)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bounds", help="analyse a scheme description")
    p.add_argument("--scheme", type=Path, required=True)
    p.add_argument("--p", type=_rational, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bench", help="locality and speed against the blocking baseline")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_rational, required=True)
    p.add_argument("--epsilon", type=_rational, required=True)
    p.add_argument("--baseline", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except LDCodecError as exc:
        log.error("%s", exc)
        return exc.exit_code
    except OSError as exc:
        log.error("%s", exc)
        return IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
