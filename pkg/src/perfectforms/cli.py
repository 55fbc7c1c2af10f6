"""Command-line interface.

    perfectforms seed --d 5
    perfectforms minvec --input a2.json
    perfectforms perfect-check --d 5
    perfectforms enumerate --d 13 --output out/
    perfectforms table --d-max 66 --output table.csv --plot-data fig.dat
    perfectforms verify --computed table.csv

Input is selected by square-free d; output is keyed by the discriminant D.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from importlib import resources

from .formspace import FormOverF, RationalGram
from .perfection import perfection_report
from .qfield import FieldDescriptor, field, is_squarefree, q_to_str
from .seed import initial_perfect_form, seed_trace_form
from .shortvec import minimal_vectors
from .voronoi import DEFAULT_CLASS_CAP, TruncationError, enumerate_classes, galois_partners

log = logging.getLogger("perfectforms")

CHECKPOINT_ENV = "PERFECTFORMS_CHECKPOINT_DIR"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_TRUNCATED = 3


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _field_from_args(args) -> FieldDescriptor:
    if getattr(args, "rational", False):
        return field(None)
    if args.d is None:
        raise UsageError("one of --d or --rational is required")
    if args.d < 2 or not is_squarefree(args.d):
        raise UsageError(f"d must be a square-free integer >= 2, got {args.d}")
    return field(args.d)


def _load_input(path: str):
    """Read a form or Gram file.

    Accepted shapes: {"gram": [[...]]} for a rational Gram matrix, or a form
    {"field": {"d": ...}, "n": ..., "entries": [[[a, b], ...], ...]}.
    """
    with open(path) as fh:
        data = json.load(fh)
    if "gram" in data:
        return RationalGram.from_json(data["gram"])
    fdata = data.get("field") or {}
    F = field(fdata.get("d"))
    return FormOverF.from_json(F, data)


def _target(args):
    if args.input:
        return _load_input(args.input)
    F = _field_from_args(args)
    return initial_perfect_form(F, args.n)


def cmd_seed(args) -> int:
    F = _field_from_args(args)
    if F.rational_mode:
        raise UsageError("seed requires --d (the rational case starts from A_n)")
    gram, md, seed = seed_trace_form(F)
    form = initial_perfect_form(F, args.n)
    out = {
        "seed": seed.to_json(),
        "trace_form_gram": gram.to_json(),
        "trace_form_minimum": q_to_str(md.minimum),
        "trace_form_min_vectors": [[x.to_json() for x in v] for v in md.field_vectors(F)],
        "form": form.to_json(),
    }
    _emit(_dump(out), args.output)
    return EXIT_OK


def cmd_minvec(args) -> int:
    target = _target(args)
    if isinstance(target, RationalGram):
        md = minimal_vectors(target)
        out = {"minimum": q_to_str(md.minimum), "num_min_vectors": len(md.vectors),
               "vectors": [list(v) for v in md.vectors]}
    else:
        md = minimal_vectors(target.gram())
        out = {"field": target.F.to_json(), "minimum": q_to_str(md.minimum),
               "num_min_vectors": len(md.vectors),
               "vectors": [list(v) for v in md.vectors],
               "field_vectors": [[x.to_json() for x in v] for v in md.field_vectors(target.F)]}
    _emit(_dump(out), args.output)
    print(f"minimum {q_to_str(md.minimum)} with {len(md.vectors)} vector pairs", file=sys.stderr)
    return EXIT_OK


def cmd_perfect_check(args) -> int:
    target = _target(args)
    if isinstance(target, RationalGram):
        raise UsageError("perfect-check needs a form over F, not a bare Gram matrix")
    md = minimal_vectors(target.gram())
    rep = perfection_report(target, md)
    out = {"field": target.F.to_json(), "summary": rep.summary(), "is_perfect": rep.is_perfect,
           "rank": rep.rank, "required": rep.required, "minimum": q_to_str(md.minimum),
           "num_min_vectors": len(md.vectors)}
    _emit(_dump(out), args.output)
    print(rep.summary(), file=sys.stderr)
    return EXIT_OK


def _output_names(F: FieldDescriptor, n: int) -> tuple[str, str]:
    tag = "Q" if F.rational_mode else f"D{F.D}"
    return f"classes_{tag}_n{n}.json", f"adjacency_{tag}_n{n}.json"


def _checkpoint_path(args, F):
    if args.checkpoint:
        return args.checkpoint
    base = os.environ.get(CHECKPOINT_ENV)
    if base:
        os.makedirs(base, exist_ok=True)
        tag = "Q" if F.rational_mode else f"D{F.D}"
        return os.path.join(base, f"checkpoint_{tag}_n{args.n}.json")
    return None


def _progress(done, total):
    log.info("explored %d of %d classes", done, total)


def cmd_enumerate(args) -> int:
    F = _field_from_args(args)
    truncated = False
    try:
        result = enumerate_classes(F, args.n, max_classes=args.max_classes, workers=args.jobs,
                                   checkpoint=_checkpoint_path(args, F), progress=_progress)
    except TruncationError as exc:
        result = exc.partial
        truncated = True
    if args.galois and not truncated:
        galois_partners(result)
    data = result.to_json()
    if truncated:
        data["truncated"] = True
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        cname, aname = _output_names(F, args.n)
        with open(os.path.join(args.output, cname), "w", newline="\n") as fh:
            fh.write(_dump(data))
        with open(os.path.join(args.output, aname), "w", newline="\n") as fh:
            fh.write(_dump({"field": F.to_json(), "adjacency": data["adjacency"]}))
    summary = result.summary()
    if truncated:
        print(f"TRUNCATED {summary} (class cap {args.max_classes})")
        return EXIT_TRUNCATED
    print(summary)
    return EXIT_OK


def _d_values(args) -> list[int]:
    if args.d_list:
        ds = [int(x) for x in args.d_list.split(",") if x.strip()]
        bad = [d for d in ds if d < 2 or not is_squarefree(d)]
        if bad:
            raise UsageError(f"not square-free: {bad}")
        return ds
    lo = args.d_min
    hi = args.d_max
    if hi is None:
        raise UsageError("give --d or --d-max for the range")
    return [d for d in range(max(lo, 2), hi + 1) if is_squarefree(d)]


def compute_table(ds, *, jobs=1, max_classes=DEFAULT_CLASS_CAP):
    """Rows (D, N_D or None) sorted by D; None marks a failed field."""
    rows = []
    for d in ds:
        F = field(d)
        try:
            n_d = enumerate_classes(F, 2, max_classes=max_classes, workers=jobs).N_D
        except Exception as exc:  # recorded as an ERROR row
            log.error("d=%d failed: %s", d, exc)
            n_d = None
        rows.append((F.D, n_d))
    rows.sort()
    return rows


def format_table_csv(rows) -> str:
    buf = io.StringIO()
    buf.write("D,N_D\n")
    for D, n in rows:
        buf.write(f"{D},{'ERROR' if n is None else n}\n")
    return buf.getvalue()


def cmd_table(args) -> int:
    rows = compute_table(_d_values(args), jobs=args.jobs, max_classes=args.max_classes)
    _emit(format_table_csv(rows), args.output)
    if args.plot_data:
        with open(args.plot_data, "w", newline="\n") as fh:
            fh.write("# D N_D\n")
            for D, n in rows:
                if n is not None:
                    fh.write(f"{D} {n}\n")
    return EXIT_FAIL if any(n is None for _, n in rows) else EXIT_OK


def read_table_csv(text: str) -> dict[int, int | None]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "D" not in reader.fieldnames or "N_D" not in reader.fieldnames:
        raise UsageError("table CSV needs D and N_D columns")
    out = {}
    for row in reader:
        try:
            D = int(row["D"])
            val = row["N_D"].strip()
            out[D] = None if val == "ERROR" else int(val)
        except (TypeError, ValueError):
            raise UsageError(f"malformed table row: {row}") from None
    return out


def reference_table_text() -> str:
    return resources.files("perfectforms").joinpath("data/table1.csv").read_text()


def compare_tables(computed: dict, reference: dict) -> tuple[list[str], int, int]:
    lines = []
    matches = 0
    for D in sorted(computed):
        got = computed[D]
        want = reference.get(D)
        if want is not None and got == want:
            matches += 1
            lines.append(f"D={D} N_D={got} match")
        else:
            lines.append(f"D={D} N_D={got if got is not None else 'ERROR'} MISMATCH "
                         f"(reference {want if want is not None else 'missing'})")
    return lines, matches, len(computed)


def cmd_verify(args) -> int:
    if args.reference:
        with open(args.reference) as fh:
            reference = read_table_csv(fh.read())
    else:
        reference = read_table_csv(reference_table_text())
    if args.computed:
        with open(args.computed) as fh:
            computed = read_table_csv(fh.read())
    else:
        wanted = sorted(D for D in reference if args.max_D is None or D <= args.max_D)
        ds = []
        for D in wanted:
            d = D if D % 4 == 1 else D // 4
            if d < 2 or not is_squarefree(d) or field(d).D != D:
                raise UsageError(f"reference row D={D} is not a real quadratic discriminant")
            ds.append(d)
        computed = dict(compute_table(ds, jobs=args.jobs, max_classes=args.max_classes))
    lines, matches, total = compare_tables(computed, reference)
    for line in lines:
        print(line)
    print(f"{matches}/{total} match")
    return EXIT_OK if matches == total else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="perfectforms",
                                description="Perfect binary forms over real quadratic fields.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def field_opts(sp, allow_input=False):
        sp.add_argument("--d", type=int, help="square-free d >= 2 for F = Q(sqrt d)")
        sp.add_argument("--rational", action="store_true", help="use F = Q")
        sp.add_argument("--n", type=int, default=2, help="rank (default 2)")
        if allow_input:
            sp.add_argument("--input", help="JSON file with a form or a Gram matrix")
        sp.add_argument("--output", help="write output here instead of stdout")

    sp = sub.add_parser("seed", help="initial perfect form for Q(sqrt d)")
    field_opts(sp)
    sp.set_defaults(func=cmd_seed)

    sp = sub.add_parser("minvec", help="minimum and minimal vectors")
    field_opts(sp, allow_input=True)
    sp.set_defaults(func=cmd_minvec)

    sp = sub.add_parser("perfect-check", help="perfection test")
    field_opts(sp, allow_input=True)
    sp.set_defaults(func=cmd_perfect_check)

    def run_opts(sp):
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--max-classes", type=int, default=DEFAULT_CLASS_CAP)

    sp = sub.add_parser("enumerate", help="GL_2(O)-classes of perfect forms")
    sp.add_argument("--d", type=int)
    sp.add_argument("--rational", action="store_true")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--output", help="directory for classes/adjacency JSON")
    sp.add_argument("--checkpoint", help=f"checkpoint file (default from ${CHECKPOINT_ENV})")
    sp.add_argument("--galois", action="store_true", help="add Galois-partner diagnostics")
    run_opts(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("table", help="D,N_D table over a range of d")
    sp.add_argument("--d", dest="d_list", help="comma-separated square-free d values")
    sp.add_argument("--d-min", type=int, default=2)
    sp.add_argument("--d-max", type=int)
    sp.add_argument("--output", help="CSV path (default stdout)")
    sp.add_argument("--plot-data", help="also write 'D N_D' plot data here")
    run_opts(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("verify", help="compare N_D values against a reference table")
    sp.add_argument("--reference", help="reference CSV (default: shipped N_D table)")
    sp.add_argument("--computed", help="computed CSV; if omitted, enumerate the reference rows")
    sp.add_argument("--max-D", type=int, help="only recompute reference rows with D <= this")
    run_opts(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "n", 2) < 1:
        parser.error("--n must be positive")
    if args.command == "enumerate" and args.n != 2:
        parser.error("enumeration is implemented for binary forms (--n 2)")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"perfectforms {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"perfectforms {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
