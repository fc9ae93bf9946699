"""Command-line front end.

    realchrom group  --theory bprn --n 1 --k 1 --l 0
    realchrom table  --theory bprn --n 1 --l 0 --kmin 0 --kmax 16 --format csv
    realchrom ss     --theory tate --n 1 --window 8 --page 3
    realchrom verify --suite tate-closed-form --n 1 --window 40

Exit codes: 0 success, 1 verification failure, 2 bad arguments, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import cache
from .engine import EngineConfig, ResourceError, build_e1, run_to_einfty, turn_page
from .grading import Bidegree
from .rings import TheoryId, group_at, table_records
from .verify import SUITES, run_suite

THEORIES = ("bpr", "bprn", "tate", "borelcoh", "borelhom", "geometric")
FORMATS = ("text", "json", "csv")
CSV_COLUMNS = ("theory", "n", "k", "l", "free_rank", "z2_count", "generators")
SS_KINDS = {"tate": "tate", "borelcoh": "borel", "geometric": "geometric"}


class UsageError(Exception):
    pass


def _window(text: str) -> tuple[int, int]:
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window {text!r}, expected K or K,L")
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2 or min(parts) < 1:
        raise argparse.ArgumentTypeError(f"bad window {text!r}, expected positive K or K,L")
    return parts[0], parts[1]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="realchrom", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, theory=True):
        if theory:
            sp.add_argument("--theory", choices=THEORIES, required=True)
        sp.add_argument("--n", type=int, help="height (not used by bpr)")
        sp.add_argument("--format", choices=FORMATS, default="text")
        sp.add_argument("--cache-dir", help=f"results cache (default ${cache.ENV_VAR})")

    g = sub.add_parser("group", help="group and generators at one bidegree")
    common(g)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--l", type=int, required=True)
    g.add_argument("--mode", choices=("theorem", "corollary", "literal"), default="theorem")
    g.add_argument("--twisted-fixed-points", action="store_true",
                   help="label (k, l) as dimension k of the twist-l fixed points")

    t = sub.add_parser("table", help="group table over a window")
    common(t)
    t.add_argument("--window", type=_window, default=(8, 8), metavar="K[,L]")
    t.add_argument("--l", type=int, help="restrict to one twist")
    t.add_argument("--kmin", type=int)
    t.add_argument("--kmax", type=int)
    t.add_argument("--mode", choices=("theorem", "corollary", "literal"), default="theorem")
    t.add_argument("--output", help="write here instead of stdout")
    t.add_argument("--twisted-fixed-points", action="store_true")

    s = sub.add_parser("ss", help="spectral sequence page dump")
    common(s)
    s.add_argument("--window", type=_window, default=(8, 8), metavar="K[,L]")
    s.add_argument("--page", type=int, help="page index (default: E_infinity)")
    s.add_argument("--l", type=int, help="restrict to one twist")

    v = sub.add_parser("verify", help="run a verification suite")
    common(v, theory=False)
    v.add_argument("--suite", choices=SUITES, required=True)
    v.add_argument("--window", type=_window, metavar="K[,L]")
    return p


def _theory(args) -> TheoryId:
    if args.n is not None and args.n < 0:
        raise UsageError("--n must be >= 0")
    if args.theory == "bpr":
        if args.n is not None:
            raise UsageError("bpr takes no --n")
        return TheoryId("BPR")
    if args.n is None:
        raise UsageError(f"--theory {args.theory} needs --n")
    return TheoryId.parse(args.theory, args.n)


def _record(row: dict, fixed: bool) -> dict:
    if not fixed:
        return row
    out = dict(row)
    out["dimension"] = out.pop("k")
    out["twist"] = out.pop("l")
    return {key: out[key] for key in ("theory", "n", "dimension", "twist", "freeRank", "z2Count", "generators")}


def render_records(rows: list[dict], fmt: str, fixed: bool = False) -> str:
    if fmt == "json":
        return json.dumps([_record(r, fixed) for r in rows], indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = list(CSV_COLUMNS)
        if fixed:
            cols[2:4] = ["dimension", "twist"]
        w.writerow(cols)
        for r in rows:
            n = "" if r["n"] is None else r["n"]
            w.writerow([r["theory"], n, r["k"], r["l"], r["freeRank"], r["z2Count"], ";".join(r["generators"])])
        return buf.getvalue()
    lines = []
    for r in rows:
        g = _summary_text(r)
        lines.append(f"pi_{r['k']} of twist {r['l']} fixed points: {g}" if fixed else f"{r['k']} {r['l']} {g}")
    return "\n".join(lines) + ("\n" if lines else "")


def _summary_text(r: dict) -> str:
    parts = []
    if r["freeRank"]:
        parts.append("Z(2)" if r["freeRank"] == 1 else f"Z(2)^{r['freeRank']}")
    if r["z2Count"]:
        parts.append("Z/2" if r["z2Count"] == 1 else f"(Z/2)^{r['z2Count']}")
    if not parts:
        return "0"
    return f"{' + '.join(parts)} {{{', '.join(r['generators'])}}}"


def parse_csv(text: str) -> list[dict]:
    """Inverse of the csv rendering (used for round-trip checks)."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({
            "theory": rec["theory"],
            "n": int(rec["n"]) if rec["n"] else None,
            "k": int(rec["k"]),
            "l": int(rec["l"]),
            "freeRank": int(rec["free_rank"]),
            "z2Count": int(rec["z2_count"]),
            "generators": rec["generators"].split(";") if rec["generators"] else [],
        })
    return rows


def cmd_group(args) -> tuple[str, int]:
    th = _theory(args)
    g = group_at(th, Bidegree(args.k, args.l), args.mode)
    rows = table_records(th, args.k, args.k, args.l, args.l, args.mode)
    if args.format == "text":
        text = str(g)
        if args.twisted_fixed_points:
            text = f"pi_{args.k} of twist {args.l} fixed points: {text}"
        return text + "\n", 0
    return render_records(rows, args.format, args.twisted_fixed_points), 0


def cmd_table(args) -> tuple[str, int]:
    th = _theory(args)
    K, L = args.window
    kmin = -K if args.kmin is None else args.kmin
    kmax = K if args.kmax is None else args.kmax
    lmin, lmax = (-L, L) if args.l is None else (args.l, args.l)
    key = cache.entry_key(f"table-{th.cli_name}", th.n,
                          (kmin, kmax, lmin, lmax, args.format, int(args.twisted_fixed_points)), args.mode)

    def compute():
        rows = table_records(th, kmin, kmax, lmin, lmax, args.mode) if kmin <= kmax else []
        return render_records(rows, args.format, args.twisted_fixed_points), 0

    return cache.cached(cache.cache_dir(args.cache_dir), key, compute)


def cmd_ss(args) -> tuple[str, int]:
    if args.theory not in SS_KINDS:
        raise UsageError(f"no spectral sequence for {args.theory}; use one of {sorted(SS_KINDS)}")
    if args.n is None or args.n < 0:
        raise UsageError("ss needs --n >= 0")
    kind = SS_KINDS[args.theory]
    K, L = args.window
    cfg = EngineConfig(K, L)
    key = cache.entry_key(f"ss-{kind}", args.n, (K, L, args.page, args.l, args.format), "theorem")

    def compute():
        lines = None if args.l is None else [args.l]
        if kind == "geometric":
            run = run_to_einfty(kind, args.n, cfg)
            rows = []
            lo, hi = (-L, L) if args.l is None else (args.l, args.l)
            for l in range(lo, hi + 1):
                for k in range(-K, K + 1):
                    for p in run.pieces(Bidegree(k, l)):
                        rows.append({"page": "inf", "k": k, "l": l, "filtration": p.filtration,
                                     "order": p.order_text, "monomial": str(p.label)})
        else:
            if args.page is None:
                pw = run_to_einfty(kind, args.n, cfg, lines)
            else:
                if args.page < 1:
                    raise UsageError("--page must be >= 1")
                pw = build_e1(kind, args.n, cfg, lines)
                while pw.page < args.page:
                    pw = turn_page(pw)
            rows = pw.dump()
            if args.page is None:
                for r in rows:
                    r["page"] = "inf"
        return _render_dump(rows, args.format), 0

    return cache.cached(cache.cache_dir(args.cache_dir), key, compute)


def _render_dump(rows: list[dict], fmt: str) -> str:
    cols = ("page", "k", "l", "filtration", "order", "monomial")
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([r[c] for c in cols])
        return buf.getvalue()
    return "".join(f"E_{r['page']} {r['k']}+{r['l']}A t={r['filtration']} {r['order']} {r['monomial']}\n"
                   for r in rows)


def cmd_verify(args) -> tuple[str, int]:
    if args.n is not None and args.n < 0:
        raise UsageError("--n must be >= 0")
    K, L = args.window if args.window else (None, None)
    key = cache.entry_key(f"verify-{args.suite}", args.n, (K, L, args.format), "theorem")

    def compute():
        res = run_suite(args.suite, args.n, K, L)
        if args.format == "json":
            text = json.dumps({"suite": res.suite, "ok": res.ok, "lines": res.lines,
                               "failures": res.failures}, indent=1) + "\n"
        else:
            text = res.render()
        return text, 0 if res.ok else 1

    return cache.cached(cache.cache_dir(args.cache_dir), key, compute)


COMMANDS = {"group": cmd_group, "table": cmd_table, "ss": cmd_ss, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"realchrom: error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"realchrom: {exc}", file=sys.stderr)
        return 2
    out = getattr(args, "output", None)
    if out:
        try:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"realchrom: cannot write {out}: {exc.strerror}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
