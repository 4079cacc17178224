"""``ctcsim`` command-line frontend.

Exit codes: 0 success, 1 usage or I/O error, 2 parse/validation error,
3 runtime fault or budget exceeded, 4 empty fixed-point set under
``--expect-nonempty``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import corpus
from .dsl import DslError, Program, parse
from .interpreter import DEFAULT_MAX_STEPS, MAX_INPUT, Limits, RunRecord, Status, consistency_of, run
from .numtheory import is_prime
from .solver import (
    DEFAULT_DOMAIN_BUDGET, AutoDomainUnresolvable, DomainTooLarge, SolveReport, solve,
)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_RUNTIME, EXIT_EMPTY = 0, 1, 2, 3, 4

LOOP_LABEL = "LOOP"
SWEEP_COLUMNS = ["n", "program", "fixedpoint_count", "outputs", "classifications",
                 "loop_iterations", "divergences"]


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def _ranges(values) -> str:
    """Compress sorted integers to ``a..b`` runs, e.g. ``-1,1..15``."""
    parts, values = [], sorted(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[j + 1] == values[j] + 1:
            j += 1
        parts.append(str(values[i]) if i == j else f"{values[i]}..{values[j]}")
        i = j + 1
    return ",".join(parts)


def record_to_dict(record: RunRecord) -> dict:
    d = {
        "outputs": list(record.outputs),
        "sends": {r: list(v) for r, v in record.sends.items()},
        "label_counts": dict(record.label_counts),
        "steps": record.steps,
        "status": record.status.value,
    }
    if record.fault is not None:
        d["fault"] = {"kind": record.fault.kind, "line": record.fault.line,
                      "detail": record.fault.detail}
    return d


def report_to_dict(report: SolveReport, limits: Limits | None = None,
                   budget: int | None = None, timing: bool = False) -> dict:
    d = {
        "program": report.program,
        "n": report.n,
        "candidates_tried": report.candidates_tried,
        "faults": report.faults,
        "domains": {
            name: {"rule": report.domains.rules.get(name, ""), "size": len(vals),
                   "values": _ranges(vals)}
            for name, vals in report.domains.candidates.items()
        },
        "fixed_points": [
            {"received": dict(fp.received.values), "classification": fp.classification,
             **record_to_dict(fp.record)}
            for fp in report.fixed_points
        ],
        "paper_divergences": [str(dv) for dv in report.paper_divergences],
    }
    settings = {}
    if limits is not None:
        settings["max_steps"] = limits.max_steps
    if budget is not None:
        settings["domain_budget"] = budget
    if settings:
        d["settings"] = settings
    if timing:
        d["wall_time"] = report.wall_time
    return d


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------
# Sweep rows
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    n: int
    program: str
    fixedpoint_count: int
    outputs: str
    classifications: str
    loop_iterations: str
    divergences: int

    def as_list(self) -> list:
        return [self.n, self.program, self.fixedpoint_count, self.outputs,
                self.classifications, self.loop_iterations, self.divergences]


def _last_output(record: RunRecord) -> int | None:
    return record.outputs[-1] if record.outputs else None


def sweep_row(report: SolveReport) -> SweepRow:
    fps = sorted(report.fixed_points,
                 key=lambda fp: (_last_output(fp.record) is None,
                                 _last_output(fp.record) or 0, fp.received.key()))
    outputs = ["" if _last_output(fp.record) is None else str(_last_output(fp.record))
               for fp in fps]
    loops = [str(fp.record.label_counts.get(LOOP_LABEL, "")) for fp in fps]
    return SweepRow(report.n, report.program, len(fps), ";".join(outputs),
                    ";".join(fp.classification for fp in fps), ";".join(loops),
                    len(report.paper_divergences))


def _sweep_one(args) -> tuple[SweepRow, SolveReport]:
    program, n, limits, budget, compare = args
    report = solve(program, n, limits, budget=budget, compare=compare)
    return sweep_row(report), report


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow(row.as_list())
    return buf.getvalue()


# --------------------------------------------------------------------------
# Helpers
# --------------------------------------------------------------------------


def load_program(ref: str) -> tuple[Program, bool]:
    """Resolve a corpus id or a ``.ctc`` path; the flag says whether it was a corpus id."""
    if corpus.is_corpus_id(ref):
        return corpus.program(ref), True
    path = Path(ref)
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{ref}: cannot read file ({exc.strerror or exc})") from None
    return parse(source), False


def parse_received(spec: str) -> dict[str, int]:
    values: dict[str, int] = {}
    for part in filter(None, (p.strip() for p in spec.split(","))):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or not name:
            raise UsageError(f"malformed received entry {part!r}; expected name=value")
        if name in values:
            raise UsageError(f"register {name!r} given twice")
        try:
            values[name] = int(value.strip())
        except ValueError:
            raise UsageError(f"malformed value in {part!r}; expected an integer") from None
    return values


def _default_max_steps() -> int:
    env = os.environ.get("CTCSIM_MAX_STEPS")
    if env is None:
        return DEFAULT_MAX_STEPS
    try:
        value = int(env)
    except ValueError:
        raise UsageError(f"CTCSIM_MAX_STEPS must be an integer, got {env!r}") from None
    if value < 1:
        raise UsageError("CTCSIM_MAX_STEPS must be >= 1")
    return value


def _limits(args) -> Limits:
    max_steps = args.max_steps if args.max_steps is not None else _default_max_steps()
    if max_steps < 1:
        raise UsageError("--max-steps must be >= 1")
    return Limits(max_steps)


def _check_n(n: int) -> None:
    if not 2 <= n <= MAX_INPUT:
        raise UsageError(f"--n must lie in [2, {MAX_INPUT}]")


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [headers] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
                     for r in cells)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_parse(args) -> int:
    program, _ = load_program(args.file)
    print(f"OK {program.name}")
    return EXIT_OK


def cmd_run(args) -> int:
    program, _ = load_program(args.program)
    received = parse_received(args.received)
    declared = set(program.register_names)
    if set(received) != declared:
        missing = sorted(declared - set(received))
        unknown = sorted(set(received) - declared)
        raise UsageError(f"--received must name exactly the declared registers "
                         f"{sorted(declared)} (missing {missing}, unknown {unknown})")
    _check_n(args.n)
    limits = _limits(args)
    record = run(program, args.n, received, limits, trace=sys.stderr if args.trace else None)
    verdict = consistency_of(record, received, program)

    if args.format == "json":
        data = {"program": program.name, "n": args.n, "received": dict(sorted(received.items())),
                "record": record_to_dict(record), "verdict": verdict.verdict,
                "explanations": verdict.explanations,
                "conflicting_sends": list(verdict.conflicting_sends),
                "settings": {"max_steps": limits.max_steps}}
        sys.stdout.write(dumps(data))
    else:
        rows = [
            ["program", program.name],
            ["n", args.n],
            ["received", ", ".join(f"{k}={v}" for k, v in sorted(received.items()))],
            ["status", record.status.value + (
                f" ({record.fault.kind} at line {record.fault.line})" if record.fault else "")],
            ["outputs", " ".join(map(str, record.outputs)) or "-"],
            ["sends", "; ".join(f"{r}: {' '.join(map(str, v)) or '-'}"
                                for r, v in record.sends.items())],
            ["label counts", " ".join(f"{k}={v}" for k, v in record.label_counts.items()) or "-"],
            ["steps", record.steps],
            ["verdict", str(verdict)],
        ]
        if verdict.conflicting_sends:
            rows.append(["warning", "ConflictingSends on " + ", ".join(verdict.conflicting_sends)])
        print("\n".join(f"{k:<13}{v}" for k, v in rows))
    return EXIT_OK if record.status is Status.HALTED else EXIT_RUNTIME


def _print_solve_table(report: SolveReport) -> None:
    names = sorted(report.domains.candidates)
    print(f"{report.program}  n={report.n}  candidates={report.candidates_tried}  "
          f"faults={report.faults}  fixed points={len(report.fixed_points)}")
    for name in names:
        vals = report.domains.candidates[name]
        print(f"  domain {name}: {_ranges(vals)} ({report.domains.rules.get(name, '')})")
    if report.fixed_points:
        rows = [[*(fp.received[n] for n in names),
                 " ".join(map(str, fp.record.outputs)), fp.classification,
                 fp.record.label_counts.get(LOOP_LABEL, "-"), fp.record.steps]
                for fp in report.fixed_points]
        print(_table([*names, "output", "class", "loop", "steps"], rows))
    else:
        print("no fixed points (paradox: no self-consistent execution)")
    print(f"divergences: {len(report.paper_divergences)}")
    for dv in report.paper_divergences:
        print(f"  {dv}")


def cmd_solve(args) -> int:
    program, is_corpus = load_program(args.program)
    _check_n(args.n)
    limits = _limits(args)
    report = solve(program, args.n, limits, budget=args.domain_budget,
                   parallel=args.parallel, compare=is_corpus)
    if args.format == "json":
        sys.stdout.write(dumps(report_to_dict(report, limits, args.domain_budget,
                                              timing=not args.deterministic)))
    elif args.format == "csv":
        sys.stdout.write(rows_to_csv([sweep_row(report)]))
    else:
        _print_solve_table(report)
    if args.expect_nonempty and not report.fixed_points:
        return EXIT_EMPTY
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.start < 2 or args.start > args.stop or args.stop > MAX_INPUT:
        raise UsageError("sweep range must satisfy 2 <= --from <= --to <= 2^31")
    program, is_corpus = load_program(args.program)
    limits = _limits(args)
    jobs = [(program, n, limits, args.domain_budget, is_corpus)
            for n in range(args.start, args.stop + 1)]
    if args.parallel:
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_sweep_one, jobs, chunksize=max(1, len(jobs) // 64)))
    else:
        results = [_sweep_one(job) for job in jobs]
    rows = [row for row, _ in results]
    text = rows_to_csv(rows)

    summary_out = sys.stdout
    if args.out:
        out = Path(args.out)
        tmp = None
        try:
            fd, tmp = tempfile.mkstemp(dir=out.parent if str(out.parent) else ".",
                                       prefix=f".{out.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, out)
        except OSError as exc:
            if tmp and os.path.exists(tmp):
                os.unlink(tmp)
            raise UsageError(f"{args.out}: cannot write ({exc.strerror or exc})") from None
    else:
        sys.stdout.write(text)
        summary_out = sys.stderr

    loops = {True: [], False: []}
    for row, report in results:
        for fp in report.fixed_points:
            count = fp.record.label_counts.get(LOOP_LABEL)
            if count is not None:
                loops[is_prime(report.n)].append(count)
    total_fp = sum(r.fixedpoint_count for r in rows)
    total_div = sum(r.divergences for r in rows)
    print(f"{program.name}: n={args.start}..{args.stop}  rows={len(rows)}  "
          f"fixed points={total_fp}  divergences={total_div}", file=summary_out)
    print(f"max loop iterations: primes={max(loops[True], default='-')}  "
          f"composites={max(loops[False], default='-')}", file=summary_out)
    if args.expect_nonempty and any(r.fixedpoint_count == 0 for r in rows):
        return EXIT_EMPTY
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.action == "list":
        for id, title in corpus.list_entries():
            print(f"{id}\t{title}")
        return EXIT_OK
    if not args.id:
        raise UsageError("corpus show needs a program id")
    try:
        entry = corpus.get(args.id)
    except corpus.UnknownCorpusProgram as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(entry.source)
    return EXIT_OK


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="ctcsim", description=(
        "Enumerate self-consistent executions of programs with time-travel registers."))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and validate a .ctc file")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    def common(p, formats):
        p.add_argument("--program", required=True, help="corpus id or path to a .ctc file")
        p.add_argument("--max-steps", type=int, default=None,
                       help=f"step limit per run (default {DEFAULT_MAX_STEPS}, "
                            f"or $CTCSIM_MAX_STEPS)")
        if formats:
            p.add_argument("--format", choices=formats, default="table")

    def solving(p):
        p.add_argument("--domain-budget", type=int, default=DEFAULT_DOMAIN_BUDGET)
        p.add_argument("--parallel", action="store_true", help="fan work out over processes")
        p.add_argument("--expect-nonempty", action="store_true",
                       help="exit 4 when no fixed point exists")

    p = sub.add_parser("run", help="one forward execution for a given received assignment")
    common(p, ["table", "json"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--received", required=True, help="e.g. tt=3,flag=0")
    p.add_argument("--trace", action="store_true", help="trace each step to stderr")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("solve", help="enumerate all fixed points for one input")
    common(p, ["table", "json", "csv"])
    solving(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True,
                   help="omit timing from JSON output (default on)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve over a range of inputs and write CSV")
    common(p, None)
    solving(p)
    p.add_argument("--from", dest="start", type=int, required=True)
    p.add_argument("--to", dest="stop", type=int, required=True)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("corpus", help="list or show the bundled programs")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("id", nargs="?")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ctcsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DslError as exc:
        where = getattr(args, "file", None) or getattr(args, "program", "")
        print(f"{where}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except AutoDomainUnresolvable as exc:
        print(f"ctcsim: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainTooLarge as exc:
        print(f"ctcsim: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
