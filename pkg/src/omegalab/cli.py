"""Command-line entry point: ``omegalab <subcommand> ...``.

Exit status is 0 on success, 1 on usage errors and 2 on data or
validation errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from omegalab import codecs
from omegalab.bits import BitString, is_container, read_container, write_container
from omegalab.errors import LawValidationError, OmegaLabError
from omegalab.kraft import DEFAULT_MAX_BLOCKS, brute_partial_sum, partial_sum_beta_le
from omegalab.mixedlaw import entropy, implied_lengths, law_from_dict
from omegalab.quantizer import (
    boltzmann_check,
    decomposition_report,
    quantization_from_dict,
    quantize,
    quantized_kraft,
)
from omegalab.renorm import CodelengthFn, flow, log_chain, log_grid
from omegalab.suite import SUITES, run_suite

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- output helpers ----------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def emit_table(out, columns, rows, mode):
    if mode == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])
        return
    cells = [[_fmt(row[c]) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    out.write("  ".join(c.rjust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for r in cells:
        out.write("  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip() + "\n")


def emit_pairs(out, pairs, mode):
    if mode == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow([k for k, _ in pairs])
        w.writerow([_fmt(v) for _, v in pairs])
    else:
        for k, v in pairs:
            out.write(f"{k} = {_fmt(v)}\n")


def _read_input(path, binary=False):
    if path is None or path == "-":
        return sys.stdin.buffer.read() if binary else sys.stdin.read()
    try:
        with open(path, "rb" if binary else "r") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc


def _write_output(path, data):
    if path is None or path == "-":
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(data)
        return
    try:
        with open(path, "wb" if isinstance(data, bytes) else "w") as fh:
            fh.write(data)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from exc


def _parse_ints(text):
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            n = int(line, 10)
        except ValueError:
            raise DataError(f"line {lineno}: not a decimal integer: {line!r}") from None
        if n < 1:
            raise DataError(f"line {lineno}: integers must be >= 1, got {n}")
        values.append(n)
    return values


def _load_json(path):
    text = _read_input(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


# --- subcommands -------------------------------------------------------------

def cmd_encode(args):
    values = _parse_ints(_read_input(args.infile))
    bits = codecs.encode_many(values, args.code)
    if args.bits:
        _write_output(args.outfile, bits.bits + "\n")
    else:
        _write_output(args.outfile, write_container(bits, args.code))


def cmd_decode(args):
    data = _read_input(args.infile, binary=True)
    if is_container(data):
        code, bits = read_container(data)
        if args.code and args.code != code:
            raise DataError(f"container holds {code} codewords, --code says {args.code}")
    else:
        try:
            text = data.decode("ascii")
        except UnicodeDecodeError:
            raise DataError("input is neither an OMGA container nor ASCII bits") from None
        bits = BitString("".join(text.split()))
        code = args.code or "omega"
    values = codecs.decode_many(bits, code)
    _write_output(args.outfile, "".join(f"{v}\n" for v in values))


def cmd_len(args):
    lengths = codecs.LENGTHS[args.code]
    rows = []
    for n in args.n:
        bits = lengths(n)
        value = bits if args.units == "bits" else bits * math.log(2)
        row = {"n": n, "length": value}
        if args.chain:
            row["chain"] = " ".join(str(v) for v in codecs.omega_chain(n)) if args.code == "omega" else ""
        rows.append(row)
    columns = ["n", "length"] + (["chain"] if args.chain else [])
    if args.output == "csv" or args.chain:
        emit_table(sys.stdout, columns, rows, args.output)
    else:
        for row in rows:
            sys.stdout.write(_fmt(row["length"]) + "\n")


def cmd_kraft(args):
    total = partial_sum_beta_le(args.max_beta, args.code, max_blocks=args.max_blocks,
                                workers=args.workers)
    gap = 1 - total
    pairs = [("code", args.code), ("max_beta", args.max_beta),
             ("exact", str(total)), ("decimal", total.decimal(args.digits)),
             ("gap", str(gap)), ("gap_decimal", gap.decimal(args.digits))]
    if args.brute is not None:
        brute = brute_partial_sum(args.brute, args.code)
        pairs += [("brute_n", args.brute), ("brute_exact", str(brute)),
                  ("brute_decimal", brute.decimal(args.digits))]
        if args.brute == (1 << args.max_beta) - 1:
            pairs.append(("brute_agrees", str(brute == total).lower()))
    emit_pairs(sys.stdout, pairs, args.output)


def _parse_x(specs):
    xs = []
    for spec in specs:
        try:
            if ":" in spec:
                lo, hi, pts = spec.split(":")
                xs.extend(log_grid(float(lo), float(hi), int(pts)).tolist())
            else:
                xs.append(float(spec))
        except ValueError:
            raise UsageError(f"--x expects a number or lo:hi:points, got {spec!r}") from None
    for x in xs:
        if not x >= 1:
            raise UsageError(f"--x values must be >= 1, got {x}")
    return xs


def _parse_init(spec):
    if spec == "zero":
        return CodelengthFn.zero()
    if spec == "square":
        return CodelengthFn(lambda t: t * t, "square")
    if spec.startswith("const:"):
        try:
            c = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad --init {spec!r}") from None
        if c < 0:
            raise UsageError("--init const:C needs C >= 0")
        return CodelengthFn.constant(c)
    raise UsageError(f"--init must be zero, square or const:C, got {spec!r}")


def cmd_flow(args):
    if not args.x:
        raise UsageError("flow needs at least one --x")
    xs = _parse_x(args.x)
    f0 = _parse_init(args.init)
    rows = []
    for x in xs:
        chain = log_chain(x)
        m = chain.depth if args.iters is None else args.iters
        value = flow(f0, x, m)
        star = math.fsum(chain.terms)
        row = {"x": x, "iters": m, "depth": chain.depth}
        if args.report == "value":
            row.update(value=value, ell_star=star)
        elif args.report == "gap":
            row.update(gap=abs(value - star), tail=chain.tail, f0_tail=f0(chain.tail))
        else:
            row.update(chain=" ".join(repr(v) for v in chain.entries))
        rows.append(row)
    columns = list(rows[0])
    emit_table(sys.stdout, columns, rows, args.output)


def cmd_law(args):
    data = _load_json(args.check)
    law = law_from_dict(data)
    pairs = [("status", "ok"), ("atoms", len(law.atoms)), ("segments", len(law.segments)),
             ("atom_mass", law.atom_mass), ("density_mass", law.density_mass),
             ("entropy_nats", entropy(law))]
    emit_pairs(sys.stdout, pairs, args.output)


def cmd_quantize(args):
    law_data = _load_json(args.law)
    quant_data = law_data if args.quant is None else _load_json(args.quant)
    law = law_from_dict({k: v for k, v in law_data.items() if k in ("atoms", "segments")})
    q = quantization_from_dict({k: v for k, v in quant_data.items()
                                if k in ("encode_atoms", "cells")})
    lens = implied_lengths(law, allow_negative=args.allow_negative)
    code = quantize(law, lens, q)
    report = decomposition_report(law, lens, q, base=args.boltzmann_base)
    pairs = [(f"symbol[{i}]", f"{e.index} mass={e.mass!r} length={e.length!r}")
             for i, e in enumerate(code.entries)] if args.output == "text" else []
    pairs.append(("quantized_kraft", quantized_kraft(code)))
    pairs += list(report.as_dict().items())
    if report.full_coverage:
        lbar, rhs, gap = boltzmann_check(report, args.boltzmann_base)
        pairs += [("lbar_base_D", lbar), ("kD_ln_W", rhs), ("boltzmann_gap", gap)]
    emit_pairs(sys.stdout, pairs, args.output)


def cmd_suite(args):
    columns, rows = run_suite(args.name, args.seed, args.instances, args.workers)
    emit_table(sys.stdout, columns, rows, args.output)


# --- grammar -----------------------------------------------------------------

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {v}")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="omegalab", description="Universal prefix-coding laboratory.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    codes = sorted(codecs.ENCODERS)

    s = sub.add_parser("encode", help="encode integers (one per line) into a container")
    s.add_argument("--code", choices=codes, default="omega")
    s.add_argument("--in", dest="infile", metavar="FILE")
    s.add_argument("--out", dest="outfile", metavar="FILE")
    s.add_argument("--bits", action="store_true", help="write ASCII '0'/'1' instead of a container")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode", help="decode a container (or ASCII bits) to integers")
    s.add_argument("--in", dest="infile", metavar="FILE")
    s.add_argument("--out", dest="outfile", metavar="FILE")
    s.add_argument("--code", choices=codes, help="codec for ASCII input; checked against containers")
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("len", help="codeword lengths")
    s.add_argument("n", nargs="+", type=_positive_int, metavar="N")
    s.add_argument("--units", choices=["bits", "nats"], default="bits")
    s.add_argument("--code", choices=codes, default="omega")
    s.add_argument("--chain", action="store_true", help="also show the omega chain n_0, n_1, ...")
    s.add_argument("--output", choices=["text", "csv"], default="text")
    s.set_defaults(func=cmd_len)

    s = sub.add_parser("kraft", help="exact Kraft partial sums over beta(n) <= K")
    s.add_argument("--max-beta", type=_positive_int, required=True, metavar="K")
    s.add_argument("--digits", type=_nonneg_int, default=20, metavar="D")
    s.add_argument("--brute", type=_nonneg_int, metavar="N", help="also sum n = 1..N directly")
    s.add_argument("--code", choices=codes, default="omega")
    s.add_argument("--workers", type=_positive_int, default=1)
    s.add_argument("--max-blocks", type=_positive_int, default=DEFAULT_MAX_BLOCKS)
    s.add_argument("--output", choices=["text", "csv"], default="text")
    s.set_defaults(func=cmd_kraft)

    s = sub.add_parser("flow", help="renormalization flow diagnostics")
    s.add_argument("--x", action="append", default=[], metavar="X|LO:HI:POINTS")
    s.add_argument("--init", default="zero", metavar="zero|const:C|square")
    s.add_argument("--iters", type=_nonneg_int, metavar="M", help="default: chain depth of each x")
    s.add_argument("--report", choices=["value", "gap", "chain"], default="value")
    s.add_argument("--output", choices=["text", "csv"], default="text")
    s.set_defaults(func=cmd_flow)

    s = sub.add_parser("law", help="validate a law file")
    s.add_argument("--check", required=True, metavar="FILE")
    s.add_argument("--output", choices=["text", "csv"], default="text")
    s.set_defaults(func=cmd_law)

    s = sub.add_parser("quantize", help="quantize a law with its implied lengths")
    s.add_argument("--law", required=True, metavar="FILE")
    s.add_argument("--quant", metavar="FILE", help="defaults to the law file itself")
    s.add_argument("--boltzmann-base", type=int, default=2, metavar="D")
    s.add_argument("--allow-negative", action="store_true",
                   help="accept densities above 1 (negative implied lengths)")
    s.add_argument("--output", choices=["text", "csv"], default="text")
    s.set_defaults(func=cmd_quantize)

    s = sub.add_parser("suite", help="seeded randomized reports")
    s.add_argument("name", choices=sorted(SUITES))
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--instances", type=_positive_int, default=200)
    s.add_argument("--workers", type=_positive_int, default=1)
    s.add_argument("--output", choices=["text", "csv"], default="csv")
    s.set_defaults(func=cmd_suite)

    for sp in sub.choices.values():
        sp.set_defaults(usage=sp.format_usage())
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(args.usage)
        sys.stderr.write(f"omegalab {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except LawValidationError as exc:
        for path, msg in exc.violations:
            sys.stderr.write(f"{path or '<root>'}: {msg}\n")
        return EXIT_DATA
    except (DataError, OmegaLabError, ValueError) as exc:
        sys.stderr.write(f"omegalab {args.command}: {exc}\n")
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
