"""Command-line front end: field queries, tower reports, table reproduction and scans."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import forms, genus
from .arith import is_prime
from .quadfield import classify_triple, fundamental_unit, make_field, norm_equation
from .tower import FieldData, HypothesisError, build_tower_report, c_invariant, field_data

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_VERIFY = 0, 2, 3, 4

CACHE_ENV = "IWASAWA2_CACHE"
DEFAULT_CACHE = Path.home() / ".cache" / "iwasawa2" / "fields.jsonl"

FAMILIES = {"cond1": (5, 3, 3), "cond2": (5, 7, 3)}
SYMBOL_KEYS = ("q1/p1", "q2/p1", "q1q2/p1", "p1/q2")
TABLE_COLUMNS = ("p1", "q1", "q2", "principal", "A0", "A1")


class UsageError(Exception):
    pass


# --- cache ---------------------------------------------------------------------


class FieldCache:
    """Append-only JSON-lines store of FieldData keyed by discriminant.

    One process writes; any number may read. Unreadable lines are skipped.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.entries: dict[int, FieldData] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        record = json.loads(line)
                        self.entries[int(record["disc"])] = FieldData.from_dict(record["data"])
                    except (ValueError, KeyError, TypeError) as exc:
                        warnings.warn(f"{self.path}:{lineno}: skipping corrupt cache line ({exc})", stacklevel=2)

    def __contains__(self, disc: int) -> bool:
        return disc in self.entries

    def get(self, disc: int) -> FieldData | None:
        return self.entries.get(disc)

    def put(self, data: FieldData) -> None:
        if data.disc in self.entries:
            return
        self.entries[data.disc] = data
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"disc": data.disc, "data": data.to_dict()}, sort_keys=True) + "\n")


def resolve_cache_path(arg: str | None) -> Path | None:
    """--cache PATH wins, then $IWASAWA2_CACHE, then the default when --cache is bare."""
    if arg:
        return Path(arg)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    if arg == "":
        return DEFAULT_CACHE
    return None


def _disc_of(d: int) -> int:
    return d if d % 4 == 1 else 4 * d


# --- scanning ------------------------------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    family: str = "all"
    prime_bound: int = 50
    symbol_filter: tuple[tuple[str, int], ...] = ()
    output: str = "table"
    cache_path: Path | None = None
    parallelism: int = 1

    def __post_init__(self):
        if self.family not in ("cond1", "cond2", "all"):
            raise UsageError(f"unknown family {self.family}")
        if self.prime_bound < 3:
            raise UsageError("--bound must be at least 3")
        if self.parallelism < 1:
            raise UsageError("--jobs must be at least 1")
        if self.output not in ("json", "csv", "table"):
            raise UsageError(f"unknown output format {self.output}")


def parse_symbol_filter(text: str | None) -> tuple[tuple[str, int], ...]:
    """Parse e.g. 'q1/p1=1,q2/p1=-1'."""
    if not text:
        return ()
    out = []
    for part in text.split(","):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in SYMBOL_KEYS or value.strip() not in ("1", "-1", "+1"):
            raise UsageError(f"bad symbol filter {part!r}; expected KEY=±1 with KEY in {', '.join(SYMBOL_KEYS)}")
        out.append((key, int(value)))
    return tuple(out)


def enumerate_triples(family: str, bound: int, symbol_filter=()) -> list:
    primes = [p for p in range(3, bound + 1) if is_prime(p)]
    families = FAMILIES if family == "all" else {family: FAMILIES[family]}
    out = []
    for residues in families.values():
        r1, r2, r3 = residues
        for p1 in (p for p in primes if p % 8 == r1):
            for q1 in (p for p in primes if p % 8 == r2):
                for q2 in (p for p in primes if p % 8 == r3 and p != q1):
                    T = classify_triple(p1, q1, q2)
                    if all(T.symbols[k] == v for k, v in symbol_filter):
                        out.append(T)
    return sorted(out, key=lambda T: T.primes)


def _load_fields(ds: list[int], cache: FieldCache | None, jobs: int) -> dict[int, FieldData]:
    table: dict[int, FieldData] = {}
    missing = []
    for d in ds:
        hit = cache.get(_disc_of(d)) if cache is not None else None
        if hit is not None:
            table[d] = hit
        else:
            missing.append(d)
    if jobs > 1 and len(missing) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            computed = list(pool.map(field_data, missing, chunksize=8))
    else:
        computed = [field_data(d) for d in missing]
    # the aggregator is the only cache writer
    for d, data in zip(missing, computed):
        table[d] = data
        if cache is not None:
            cache.put(data)
    return table


def run_scan(config: ScanConfig) -> list:
    triples = enumerate_triples(config.family, config.prime_bound, config.symbol_filter)
    ds = sorted({x for T in triples for x in (T.d, 2 * T.d)})
    cache = FieldCache(config.cache_path) if config.cache_path else None
    table = _load_fields(ds, cache, config.parallelism)
    return [build_tower_report(T, table.__getitem__) for T in triples]


# --- formatting ----------------------------------------------------------------


def _csv_row(rec: dict) -> dict:
    row = {k: v for k, v in rec.items() if k != "symbols"}
    for k in SYMBOL_KEYS:
        row[k] = rec["symbols"][k]
    for k in ("A0_factors", "AF_factors", "principal", "violations"):
        row[k] = " ".join(str(x) for x in rec[k]) if k != "violations" else "; ".join(rec[k])
    return row


def format_reports(reports, output: str) -> str:
    records = [r.to_json() for r in reports]
    if output == "json":
        return "".join(json.dumps(rec, ensure_ascii=False) + "\n" for rec in records)
    if output == "csv":
        buf = io.StringIO()
        header = [k for k in records[0] if k != "symbols"] if records else []
        if records:
            header[header.index("pattern") + 1 : header.index("pattern") + 1] = list(SYMBOL_KEYS)
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow(_csv_row(rec))
        return buf.getvalue()
    return "".join(format_report_line(r) + "\n" for r in reports)


def format_report_line(r) -> str:
    T = r.triple
    flag = "  VIOLATION" if r.violations else ""
    principal = ",".join(str(x) for x in r.principal_primes) or "-"
    return (
        f"({T.p1}, {T.q1}, {T.q2}) {T.pattern}  A0={r.A0_order} AF={r.AF_order} Q={r.Q_K1} A1={r.A1_order}"
        f"  principal={principal}  stable={str(r.stable).lower()}  Xinf={r.Xinf}  [{r.theorem_tag}]{flag}"
    )


def format_report_long(r) -> str:
    T = r.triple
    symbols = ", ".join(f"({k}) = {v:+d}" for k, v in T.symbols.items())
    lines = [
        f"triple        ({T.p1}, {T.q1}, {T.q2})  {T.pattern}",
        f"symbols       {symbols}",
        f"K             Q(sqrt {T.d})   A0 = {list(r.A0_factors)}  order {r.A0_order}",
        f"F             Q(sqrt {2 * T.d})   A(F) = {list(r.AF_factors)}  order {r.AF_order}",
        f"principal     {', '.join(str(x) for x in r.principal_primes) or 'none'}",
        f"unit index    Q(K1) = {r.Q_K1}   units {r.fundamental_system}",
        f"layer 1       #A1 = {r.A1_order}   stable = {str(r.stable).lower()}",
        f"invariants    lambda = {r.lambda_}, mu = {r.mu}, nu = {r.nu}",
        f"X_inf         {r.Xinf}",
        f"statement     {r.theorem_tag}",
    ]
    lines += [f"VIOLATION     {v}" for v in r.violations]
    return "\n".join(lines)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


# --- subcommands ---------------------------------------------------------------


def _field(d: int):
    try:
        return make_field(d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_classgroup(args) -> int:
    K = _field(args.d)
    A = forms.narrow_class_group(K.disc) if args.narrow else forms.wide_class_group(K)
    index = {x: i for i, x in enumerate(A.elements)}
    primes = {ell: {"class": index[x], "principal": x == A.identity} for ell, x in A.prime_class.items()}
    rec = {
        "d": K.d,
        "disc": K.disc,
        "narrow": bool(args.narrow),
        "class_number": A.class_number,
        "order": A.order,
        "invariant_factors": list(A.invariant_factors),
        "cyclic": A.is_cyclic(),
        "principal": [str(ell) for ell, v in primes.items() if v["principal"]],
        "primes": {str(ell): v for ell, v in primes.items()},
    }
    if args.json:
        print(json.dumps(rec))
        return EXIT_OK
    kind = "narrow" if args.narrow else "wide"
    print(f"Q(sqrt {K.d}), disc {K.disc}: {kind} class number {A.class_number}")
    print(f"2-class group order {A.order}, invariant factors {list(A.invariant_factors)}, cyclic={A.is_cyclic()}")
    for ell, v in primes.items():
        print(f"  prime above {ell}: class #{v['class']}, {'principal' if v['principal'] else 'not principal'}")
    print(f"principal: {{{', '.join(rec['principal'])}}}")
    return EXIT_OK


def cmd_unit(args) -> int:
    K = _field(args.d)
    e = fundamental_unit(K)
    c = c_invariant(K).square_class.rep if e.norm == 1 else None
    if args.json:
        print(json.dumps({"d": K.d, "t": e.t, "u": e.u, "norm": e.norm, "c": c}))
        return EXIT_OK
    print(f"eps = ({e.t} + {e.u}*sqrt({K.d}))/2, norm {e.norm:+d}")
    print(f"c-invariant: {c}" if c is not None else "c-invariant: none (norm -1)")
    return EXIT_OK


def cmd_redei(args) -> int:
    D = args.disc
    if not forms.is_fundamental(D):
        raise UsageError(f"{D} is not a fundamental discriminant")
    S1, S2 = genus.redei_S1(D), genus.redei_S2(D)
    rec = {"disc": D, "S1": [list(x) for x in S1], "S2": [list(x) for x in S2]}
    if D > 0:
        N = forms.narrow_class_group(D)
        rec["narrow_factors"] = list(N.invariant_factors)
        rec["agrees"] = len(S1) == 2**N.rank and len(S2) == 2**N.four_rank
    if args.json:
        print(json.dumps(rec))
    else:
        print(f"D = {D}: #S1 = {len(S1)}, #S2 = {len(S2)}")
        print("S1: " + ", ".join(f"{a}*{b}" for a, b in S1))
        print("S2: " + ", ".join(f"{a}*{b}" for a, b in S2))
        if D > 0:
            print(f"narrow 2-class group {rec['narrow_factors']}, counts agree: {rec['agrees']}")
    return EXIT_OK if rec.get("agrees", True) else EXIT_VERIFY


def cmd_normeq(args) -> int:
    K = _field(args.d)
    if args.N == 0:
        raise UsageError("N must be nonzero")
    sol = norm_equation(K, args.N)
    if args.json:
        print(json.dumps({"d": K.d, "N": args.N, "solution": list(sol) if sol else None}))
    elif sol is None:
        print(f"a^2 - {K.d} b^2 = {4 * args.N}: no solution")
    else:
        print(f"a^2 - {K.d} b^2 = {4 * args.N}: (a, b) = {sol}")
    return EXIT_OK


def _triple(p1: int, q1: int, q2: int):
    try:
        T = classify_triple(p1, q1, q2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if T is None:
        raise HypothesisError(f"({p1}, {q1}, {q2}) is neither (5, 3, 3) nor (5, 7, 3) mod 8")
    return T


def cmd_tower(args) -> int:
    T = _triple(args.p1, args.q1, args.q2)
    r = build_tower_report(T)
    print(json.dumps(r.to_json(), ensure_ascii=False) if args.json else format_report_long(r))
    return EXIT_VERIFY if r.violations else EXIT_OK


def load_table(which: int) -> list[dict]:
    text = resources.files("iwasawa2").joinpath("data", f"table{which}.csv").read_text(encoding="utf-8")
    return [{k: int(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


def reproduce_table(which: int) -> list[tuple[dict, dict]]:
    """(expected, computed) pairs for every bundled row."""
    out = []
    for row in load_table(which):
        r = build_tower_report(_triple(row["p1"], row["q1"], row["q2"]))
        computed = {
            "p1": row["p1"],
            "q1": row["q1"],
            "q2": row["q2"],
            "principal": ";".join(str(x) for x in r.principal_primes),
            "A0": r.A0_order,
            "A1": r.A1_order,
        }
        out.append((row, computed))
    return out


def row_matches(expected: dict, computed: dict) -> bool:
    return (
        computed["principal"] == str(expected["principal"])
        and computed["A0"] == expected["A0"]
        and computed["A1"] == expected["A1"]
    )


def cmd_tables(args) -> int:
    pairs = reproduce_table(args.which)
    matches = sum(row_matches(e, c) for e, c in pairs)
    if args.csv:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(c for _, c in pairs)
        sys.stdout.write(buf.getvalue())
    else:
        print(f"{'p1':>4} {'q1':>4} {'q2':>4} | {'Pr':>4} {'#A0':>4} {'#A1':>4} | {'Pr':>4} {'#A0':>4} {'#A1':>4}")
        for e, c in pairs:
            mark = "ok" if row_matches(e, c) else "MISMATCH"
            print(
                f"{e['p1']:>4} {e['q1']:>4} {e['q2']:>4} | {e['principal']:>4} {e['A0']:>4} {e['A1']:>4} |"
                f" {c['principal']:>4} {c['A0']:>4} {c['A1']:>4}  {mark}"
            )
    print(f"table {args.which}: {matches}/{len(pairs)} rows match", file=sys.stderr if args.csv else sys.stdout)
    return EXIT_OK if matches == len(pairs) else EXIT_VERIFY


def cmd_scan(args) -> int:
    if args.csv and args.json:
        raise UsageError("choose one of --csv and --json")
    config = ScanConfig(
        family=args.family,
        prime_bound=args.bound,
        symbol_filter=parse_symbol_filter(args.symbol),
        output="json" if args.json else "csv" if args.csv else "table",
        cache_path=resolve_cache_path(args.cache),
        parallelism=args.jobs,
    )
    reports = run_scan(config)
    _emit(format_reports(reports, config.output), args.out)
    tags = Counter(r.theorem_tag for r in reports)
    bad = sum(1 for r in reports if r.violations)
    summary = ", ".join(f"{tag}: {n}" for tag, n in sorted(tags.items()))
    print(f"{len(reports)} triples; {summary or 'none'}; {bad} with violations", file=sys.stderr)
    return EXIT_VERIFY if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwasawa2", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classgroup", help="2-class group of Q(sqrt d)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--narrow", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("unit", help="fundamental unit and c-invariant of Q(sqrt d)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_unit)

    p = sub.add_parser("redei", help="Redei-Reichardt decompositions of a discriminant")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_redei)

    p = sub.add_parser("normeq", help="solve a^2 - d b^2 = 4N")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("N", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_normeq)

    p = sub.add_parser("tower", help="first-layer report for a prime triple")
    for name in ("p1", "q1", "q2"):
        p.add_argument(name, type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("tables", help="recompute the bundled reference tables")
    p.add_argument("--which", type=int, choices=(2, 3), required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("scan", help="reports for every qualifying triple below a bound")
    p.add_argument("--family", choices=("cond1", "cond2", "all"), default="all")
    p.add_argument("--bound", type=int, default=50)
    p.add_argument("--symbol", help="filter such as 'q1q2/p1=-1' or 'q1/p1=1,q2/p1=1'")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--cache", nargs="?", const="", default=None, help=f"field cache file (default ${CACHE_ENV})")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisError as exc:
        print(f"hypothesis mismatch: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
