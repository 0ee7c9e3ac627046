"""Operator surface: parameter tables, encoding, serving, retrieval.

Subcommands: params, encode, serve, retrieve, privacy-audit, bench.
Databases are byte files; they pack into field symbols of log2(q) bits
(little-endian bit order within each byte), become the coefficients of
the message polynomial in graded-lex monomial order, and are split into
one share file per server.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from dataclasses import dataclass

from .field import field_of_order
from .mpoly import MultiPoly, random_poly
from .multcode import (
    CodeParams,
    ParameterError,
    SchemeRow,
    decode_codeword,
    downlink_bits,
    make_params,
    monomial_basis,
    scheme_table,
    uplink_bits,
)
from .pir import ByzantineMode, gen_queries, preprocess, retrieve_record
from .transport import (
    Endpoint,
    InProcessTransport,
    ShareServer,
    ShareTCPServer,
    SocketTransport,
    read_share,
    write_share,
)

TABLE_M_RANGE = (2, 3, 4)
TABLE_S_RANGE = (1, 2, 3, 4, 5, 6)
SEARCH_Q_DEFAULT = (16, 256)


@dataclass
class DbConfig:
    """Flat table of entries*records, each record b bits."""

    entries: int
    records: int
    record_bits: int

    @property
    def total_bits(self) -> int:
        n = self.entries * self.records * self.record_bits
        if n <= 0:
            raise ValueError("database must have positive bit-size")
        return n


def params_for(q: int, m: int, s: int, d: int) -> CodeParams:
    return make_params(field_of_order(q), m, s, d)


def max_degree(q: int, s: int) -> int:
    """Largest legal degree, s(q-1)-1: full rate, no error tolerance."""
    return s * (q - 1) - 1


def full_table(q: int) -> list[SchemeRow]:
    fld = field_of_order(q)
    rows = []
    for m in TABLE_M_RANGE:
        for s in TABLE_S_RANGE:
            rows.append(scheme_table(fld, m, s, max_degree(q, s)))
    return rows


def select_parameters(db: DbConfig, qs=SEARCH_Q_DEFAULT) -> SchemeRow:
    """Smallest deployment that can hold the database.

    Feasible rows need k*log2(q) >= total bits; among them, prefer fewer
    servers, then less total storage, then smaller dimension.
    """
    best = None
    best_key = None
    for q in sorted(qs):
        fld = field_of_order(q)
        for m in range(1, max(TABLE_M_RANGE) + 1):
            for s in TABLE_S_RANGE:
                try:
                    row = scheme_table(fld, m, s, max_degree(q, s))
                except ParameterError:
                    continue
                if row.k * math.log2(q) < db.total_bits:
                    continue
                storage = row.k * row.overhead * math.log2(q)
                key = (row.servers, storage, row.k)
                if best_key is None or key < best_key:
                    best, best_key = row, key
    if best is None:
        raise ParameterError(
            f"no parameter choice in the search grid holds {db.total_bits} bits"
        )
    return best


def _fmt_overhead(x: float) -> str:
    return f"{x:.1f}" if x < 10 else f"{x:.0f}"


def _fmt_row(row: SchemeRow) -> str:
    return (
        f"{row.q:>4} {row.m:>2} {row.s:>2} {row.d:>5} {row.k:>13} "
        f"{row.queries:>8} {row.servers:>8} "
        f"{_fmt_overhead(row.std_overhead):>8} {_fmt_overhead(row.overhead):>6} "
        f"{row.std_comm:>12.0f} {row.comm:>12.0f}"
    )


_HEADER = (
    f"{'q':>4} {'m':>2} {'s':>2} {'d':>5} {'k':>13} "
    f"{'queries':>8} {'servers':>8} {'std-ovh':>8} {'ovh':>6} "
    f"{'std-comm':>12} {'comm':>12}"
)


# -- byte <-> symbol packing -------------------------------------------------


def bytes_to_symbols(data: bytes, q: int) -> list[int]:
    """Split a byte string into log2(q)-bit symbols, LSB-first per byte."""
    e = q.bit_length() - 1
    if 1 << e != q:
        raise ParameterError(f"byte packing needs q = 2^e, got q = {q}")
    out = []
    acc = 0
    nbits = 0
    for byte in data:
        acc |= byte << nbits
        nbits += 8
        while nbits >= e:
            out.append(acc & (q - 1))
            acc >>= e
            nbits -= e
    if nbits:
        out.append(acc)
    return out


def symbols_to_bytes(symbols, q: int, byte_len: int) -> bytes:
    e = q.bit_length() - 1
    if 1 << e != q:
        raise ParameterError(f"byte packing needs q = 2^e, got q = {q}")
    acc = 0
    nbits = 0
    out = bytearray()
    for sym in symbols:
        acc |= sym << nbits
        nbits += e
        while nbits >= 8 and len(out) < byte_len:
            out.append(acc & 0xFF)
            acc >>= 8
            nbits -= 8
    while len(out) < byte_len:
        out.append(acc & 0xFF)
        acc >>= 8
    return bytes(out)


def message_to_poly(params: CodeParams, data: bytes) -> MultiPoly:
    symbols = bytes_to_symbols(data, params.q)
    if len(symbols) > params.k:
        raise ParameterError(
            f"input needs {len(symbols)} symbols but the code holds k = {params.k}"
        )
    symbols += [0] * (params.k - len(symbols))
    basis = monomial_basis(params.m, params.d)
    return MultiPoly(params.field, params.m, dict(zip(basis, symbols)))


def poly_to_message(params: CodeParams, F: MultiPoly, byte_len: int) -> bytes:
    basis = monomial_basis(params.m, params.d)
    return symbols_to_bytes([F.coeffs.get(j, 0) for j in basis], params.q, byte_len)


def share_filename(ell: int) -> str:
    return f"share_{ell:03d}.mpir"


# -- subcommands --------------------------------------------------------------


def cmd_params(args) -> int:
    if args.db:
        entries, records, bits = (int(x) for x in args.db.split(","))
        db = DbConfig(entries, records, bits)
        qs = (args.q,) if args.q else SEARCH_Q_DEFAULT
        row = select_parameters(db, qs)
        need = math.ceil(db.total_bits / math.log2(row.q))
        print(_HEADER)
        print(_fmt_row(row))
        print(
            f"database: {db.total_bits} bits -> needs {need} symbols; "
            f"k = {row.k}, expansion {_fmt_overhead(row.overhead)}, "
            f"PIR-locality {row.servers}"
        )
        return 0
    if not args.q:
        print("error: --q required without --db", file=sys.stderr)
        return 2
    if args.table:
        print(_HEADER)
        for row in full_table(args.q):
            print(_fmt_row(row))
        return 0
    if args.m is None or args.s is None:
        print("error: need --m and --s (or --table / --db)", file=sys.stderr)
        return 2
    d = args.d if args.d is not None else max_degree(args.q, args.s)
    row = scheme_table(field_of_order(args.q), args.m, args.s, d)
    print(_HEADER)
    print(_fmt_row(row))
    params = params_for(args.q, args.m, args.s, d)
    print(
        f"rate {float(params.rate):.4f}, byzantine tolerance nu = {params.nu}, "
        f"uplink {uplink_bits(params):.0f} + downlink {downlink_bits(params):.0f} bits per retrieval"
    )
    return 0


def cmd_encode(args) -> int:
    params = params_for(args.q, args.m, args.s, args.d)
    with open(args.input, "rb") as fh:
        data = fh.read()
    F = message_to_poly(params, data)
    shares = preprocess(params, F)
    os.makedirs(args.out, exist_ok=True)
    for share in shares:
        write_share(os.path.join(args.out, share_filename(share.index)), share)
    manifest = {
        "q": args.q,
        "m": args.m,
        "s": args.s,
        "d": args.d,
        "byte_len": len(data),
    }
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh)
    print(
        f"encoded {len(data)} bytes into {params.q} shares of "
        f"{params.points_per_share} points x {params.sigma} symbols in {args.out}"
    )
    return 0


def cmd_serve(args) -> int:
    share = read_share(args.share)
    logic = ShareServer(share, ByzantineMode(args.byzantine), args.seed)
    srv = ShareTCPServer((args.host, args.port), logic)
    print(
        f"serving hyperplane {share.index} on {args.host}:{args.port} "
        f"({args.byzantine} mode)"
    )
    try:
        srv.serve_forever()
    except KeyboardInterrupt:
        srv.shutdown()
    return 0


def _load_manifest(path: str) -> tuple[CodeParams, int]:
    with open(path) as fh:
        mf = json.load(fh)
    return params_for(mf["q"], mf["m"], mf["s"], mf["d"]), mf["byte_len"]


def _load_endpoints(path: str) -> list[Endpoint]:
    eps = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            idx, addr = line.split()
            host, port = addr.rsplit(":", 1)
            eps.append(Endpoint(int(idx), host, int(port)))
    return eps


def _print_traffic(params: CodeParams, report) -> None:
    print(
        f"traffic: uplink {report.uplink_info_bits:.0f} bits "
        f"(formula {uplink_bits(params):.0f}), downlink {report.downlink_info_bits:.0f} bits "
        f"(formula {downlink_bits(params):.0f}), total {report.total_info_bits:.0f} bits; "
        f"on the wire {report.uplink_wire_bytes}+{report.downlink_wire_bytes} bytes framed"
    )


def cmd_retrieve(args) -> int:
    params, byte_len = _load_manifest(args.manifest)
    transport = SocketTransport(_load_endpoints(args.endpoints))
    rng = random.Random(args.seed)
    if args.index is not None:
        symbol, report = retrieve_record(params, transport, args.index, rng)
        print(f"symbol {args.index}: {symbol}")
        _print_traffic(params, report)
        return 0
    # full-database paths: the message lives in the polynomial's
    # coefficients, so records are only recoverable from a complete
    # codeword; retrieve every point and invert the encoder.
    symbols = []
    totals = None
    for j in range(params.n):
        symbol, report = retrieve_record(params, transport, j, rng)
        symbols.append(symbol)
        if totals is None:
            totals = report
        else:
            totals.uplink_symbols += report.uplink_symbols
            totals.downlink_symbols += report.downlink_symbols
            totals.uplink_wire_bytes += report.uplink_wire_bytes
            totals.downlink_wire_bytes += report.downlink_wire_bytes
    F = decode_codeword(params, symbols)
    data = poly_to_message(params, F, byte_len)
    if args.record is not None:
        size = args.record_bytes or byte_len
        chunk = data[args.record * size : (args.record + 1) * size]
        sys.stdout.buffer.write(chunk)
        sys.stdout.buffer.flush()
        print()
    elif args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
        print(f"wrote {len(data)} bytes to {args.out}")
    _print_traffic(params, totals)
    return 0


def _audit_counts(params: CodeParams, rng, trials: int, target):
    """Per-server histograms of queried local points, pooled over slots."""
    counts = [
        [0] * params.points_per_share for _ in range(params.q)
    ]
    from .multcode import local_index

    for _ in range(trials):
        j = target if target is not None else rng.randrange(params.n)
        plan = gen_queries(params, j, rng)
        for ell in range(params.q):
            for pt in plan.batches[ell]:
                counts[ell][local_index(params, pt)] += 1
    return counts


def privacy_audit(
    params: CodeParams, trials: int, seed: int | None, target: int = 0
) -> dict:
    """Compare per-server query marginals for a fixed vs random target.

    Also chi-square-tests uniformity of the direction sampling.  Returns
    max per-server total-variation distance and the chi-square p-value.
    """
    if params.m < 2:
        raise ParameterError("privacy audit needs m >= 2 (transversal geometry)")
    if trials < 1000:
        raise ParameterError("need at least 1000 trials for stable estimates")
    from scipy import stats

    rng = random.Random(seed)
    fixed = _audit_counts(params, rng, trials, target)
    uniform = _audit_counts(params, rng, trials, None)
    denom = trials * params.sigma
    max_tv = 0.0
    for ell in range(params.q):
        tv = sum(abs(a - b) for a, b in zip(fixed[ell], uniform[ell])) / (2 * denom)
        max_tv = max(max_tv, tv)

    n_classes = params.q ** (params.m - 1)
    dir_counts = [0] * n_classes
    from .multcode import sample_transversal_directions

    draws = max(trials, 10_000)
    for _ in range(draws):
        for u in sample_transversal_directions(params, rng, params.sigma):
            idx = 0
            for x in reversed(u[:-1]):
                idx = idx * params.q + x
            dir_counts[idx] += 1
    chi2, pvalue = stats.chisquare(dir_counts)
    return {
        "trials": trials,
        "max_tv": max_tv,
        "chi2": float(chi2),
        "chi2_pvalue": float(pvalue),
        "direction_draws": draws * params.sigma,
    }


def cmd_privacy_audit(args) -> int:
    params = params_for(args.q, args.m, args.s, args.d)
    result = privacy_audit(params, args.trials, args.seed, args.target)
    print(
        f"privacy audit over {result['trials']} trials: "
        f"max per-server TV distance {result['max_tv']:.4f}; "
        f"direction uniformity chi2 = {result['chi2']:.1f} "
        f"(p = {result['chi2_pvalue']:.3f} over {result['direction_draws']} draws)"
    )
    return 0


def cmd_bench(args) -> int:
    params = params_for(args.q, args.m, args.s, args.d)
    rng = random.Random(args.seed)
    F = random_poly(params.field, params.m, params.d, rng)
    t0 = time.perf_counter()
    shares = preprocess(params, F)
    t1 = time.perf_counter()
    servers = [ShareServer(s) for s in shares]
    transport = InProcessTransport(servers)
    reports = []
    t2 = time.perf_counter()
    for _ in range(args.trials):
        j = rng.randrange(params.n)
        _, report = retrieve_record(params, transport, j, rng)
        reports.append(report)
    t3 = time.perf_counter()
    print(
        f"encode+partition: {t1 - t0:.3f} s; "
        f"{args.trials} retrievals: {(t3 - t2) / args.trials * 1e3:.2f} ms each"
    )
    _print_traffic(params, reports[-1])
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="multipir",
        description="Byzantine-robust PIR over hyperplane-partitioned multiplicity codes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="show code/scheme properties")
    p.add_argument("--q", type=int, help="field order (prime power)")
    p.add_argument("--m", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--table", action="store_true", help="print the full m/s grid")
    p.add_argument("--db", help="E,S,b database shape for auto-selection")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encode", help="encode a byte file into share files")
    p.add_argument("input")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("serve", help="serve one share file over TCP")
    p.add_argument("--share", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, required=True)
    p.add_argument(
        "--byzantine",
        default="honest",
        choices=[m.value for m in ByzantineMode],
        help="fault-injection mode for robustness drills",
    )
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("retrieve", help="privately retrieve from running servers")
    p.add_argument("--endpoints", required=True, help='file of "index host:port" lines')
    p.add_argument("--manifest", required=True)
    p.add_argument("-j", "--index", type=int, help="codeword symbol index")
    p.add_argument("--record", type=int, help="record number (full decode)")
    p.add_argument("--record-bytes", type=int)
    p.add_argument("--out", help="write the decoded database to a file")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("privacy-audit", help="statistical query-privacy audit")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=20_000)
    p.add_argument("--target", type=int, default=0)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_privacy_audit)

    p = sub.add_parser("bench", help="time retrievals over an in-process cluster")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
