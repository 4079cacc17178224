"""Exhaustive search for self-consistent executions (fixed points).

Every candidate assignment of received register values is run forward once;
the ones whose run sends back exactly what was received are fixed points.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import corpus
from .dsl import (
    And, BinOp, Compare, Cond, Expr, IfGoto, Input, Not, Num, Or, Program,
    Receive, Send, Var,
)
from .interpreter import (
    ConsistencyResult, Limits, ReceivedAssignment, RunRecord, Status,
    consistency_of, run,
)
from .numtheory import factor_view

DEFAULT_DOMAIN_BUDGET = 10**8

NONTRIVIAL_FACTOR = "NontrivialFactor"
TRIVIAL_SELF = "TrivialSelf"
OTHER = "Other"


class DomainTooLarge(ValueError):
    pass


class AutoDomainUnresolvable(ValueError):
    """An ``auto`` register matches none of the syntactic domain rules."""


# --------------------------------------------------------------------------
# Domain resolution
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainResolution:
    candidates: dict[str, tuple[int, ...]]
    rules: dict[str, str] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return math.prod(len(v) for v in self.candidates.values())

    def assignments(self, reverse: bool = False) -> Iterator[ReceivedAssignment]:
        names = sorted(self.candidates)
        pools = [self.candidates[n] for n in names]
        if reverse:
            pools = [p[::-1] for p in pools]
        for combo in itertools.product(*pools):
            yield ReceivedAssignment(dict(zip(names, combo)))


def _expr_names(e: Expr) -> Iterator[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Input):
        yield "input"
    elif isinstance(e, BinOp):
        yield from _expr_names(e.left)
        yield from _expr_names(e.right)


def _comparisons(c: Cond) -> Iterator[Compare]:
    if isinstance(c, Compare):
        yield c
    elif isinstance(c, Not):
        yield from _comparisons(c.operand)
    elif isinstance(c, (And, Or)):
        yield from _comparisons(c.left)
        yield from _comparisons(c.right)


def _auto_rule(program: Program, register: str) -> str:
    received_vars = {st.instr.var for st in program.statements
                     if isinstance(st.instr, Receive) and st.instr.register == register}
    for st in program.statements:
        if isinstance(st.instr, IfGoto):
            for cmp in _comparisons(st.instr.cond):
                names = set(_expr_names(cmp.left)) | set(_expr_names(cmp.right))
                if "input" in names and names & received_vars:
                    return "input-range"
    sends = [st.instr.expr for st in program.statements
             if isinstance(st.instr, Send) and st.instr.register == register]
    if sends and all(isinstance(e, Num) and e.value in (0, 1) for e in sends):
        return "boolean"
    raise AutoDomainUnresolvable(
        f"register {register!r} has domain auto but is neither compared against input "
        f"nor only sent 0/1; give it an explicit domain")


def resolve_domains(program: Program, n: int,
                    budget: int = DEFAULT_DOMAIN_BUDGET) -> DomainResolution:
    """Finite candidate sets for every register; the initial value is always included."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    bounds: dict[str, tuple[int, int, int]] = {}
    rules: dict[str, str] = {}
    for reg in program.registers:
        if reg.is_auto:
            rule = _auto_rule(program, reg.name)
            lo, hi = (1, n) if rule == "input-range" else (0, 1)
        else:
            rule = "explicit"
            lo, hi = reg.domain
        rules[reg.name] = rule
        bounds[reg.name] = (lo, hi, reg.initial)

    size = 1
    for lo, hi, initial in bounds.values():
        size *= (hi - lo + 1) + (0 if lo <= initial <= hi else 1)
    if size > budget:
        raise DomainTooLarge(f"{size} candidate assignments exceed the budget of {budget}")

    candidates = {
        name: tuple(sorted(set(range(lo, hi + 1)) | {initial}))
        for name, (lo, hi, initial) in bounds.items()
    }
    return DomainResolution(candidates, rules)


# --------------------------------------------------------------------------
# Solving
# --------------------------------------------------------------------------


def classify(outputs: Iterable[int], n: int) -> str:
    outputs = tuple(outputs)
    if any(1 < o < n and n % o == 0 for o in outputs):
        return NONTRIVIAL_FACTOR
    if outputs and all(o == n for o in outputs):
        return TRIVIAL_SELF
    return OTHER


@dataclass(frozen=True)
class FixedPoint:
    received: ReceivedAssignment
    record: RunRecord
    classification: str


@dataclass(frozen=True)
class Divergence:
    kind: str  # "present-but-unexpected" | "expected-but-absent"
    assignment: tuple[tuple[str, int], ...]

    def __str__(self) -> str:
        what = ", ".join(f"{k}={v}" for k, v in self.assignment)
        if self.kind == "present-but-unexpected":
            return f"present-but-unexpected: ({what}) is a fixed point but not a claimed solution"
        return f"expected-but-absent: ({what}) is a claimed solution but not a fixed point"


@dataclass
class SolveReport:
    program: str
    n: int
    fixed_points: list[FixedPoint]
    candidates_tried: int
    faults: int
    domains: DomainResolution
    paper_divergences: list[Divergence] = field(default_factory=list)
    wall_time: float = 0.0

    def fixed_point_set(self) -> set[tuple[int, ...]]:
        """Received values per fixed point, ordered by register name."""
        return {tuple(v for _, v in fp.received.key()) for fp in self.fixed_points}


def _evaluate(program: Program, n: int, limits: Limits,
              assignments: Iterable[ReceivedAssignment]) -> tuple[list[FixedPoint], int, int]:
    found, faults, tried = [], 0, 0
    for received in assignments:
        tried += 1
        record = run(program, n, received, limits)
        if record.status is not Status.HALTED:
            faults += 1
            continue
        if consistency_of(record, received, program).consistent:
            found.append(FixedPoint(received, record, classify(record.outputs, n)))
    return found, faults, tried


def _chunks(items: list, count: int) -> list[list]:
    size = max(1, -(-len(items) // count))
    return [items[i:i + size] for i in range(0, len(items), size)]


def solve(program: Program, n: int, limits: Limits = Limits(), *,
          budget: int = DEFAULT_DOMAIN_BUDGET, parallel: bool | int = False,
          reverse: bool = False, compare: bool | None = None) -> SolveReport:
    """Run every candidate assignment and collect the self-consistent ones.

    ``parallel`` fans candidates out over worker processes (``True`` uses the
    CPU count). ``reverse`` walks the candidates backwards; the report does not
    depend on either. Divergences against the claimed solution sets are filled
    in for corpus programs unless ``compare`` is False.
    """
    start = time.perf_counter()
    domains = resolve_domains(program, n, budget)
    assignments = domains.assignments(reverse=reverse)

    if parallel:
        workers = (os.cpu_count() or 1) if parallel is True else int(parallel)
        pending = list(assignments)
        found, faults, tried = [], 0, 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_evaluate, program, n, limits, chunk)
                       for chunk in _chunks(pending, workers * 4)]
            for fut in futures:
                f, flt, t = fut.result()
                found.extend(f)
                faults += flt
                tried += t
    else:
        found, faults, tried = _evaluate(program, n, limits, assignments)

    found.sort(key=lambda fp: fp.received.key())
    report = SolveReport(program.name, n, found, tried, faults, domains)
    if compare is None:
        compare = corpus.is_corpus_id(program.name)
    if compare:
        report.paper_divergences = compare_to_paper(report)
    report.wall_time = time.perf_counter() - start
    return report


def verify(program: Program, n: int, received, limits: Limits = Limits()) -> ConsistencyResult:
    """Independent recheck: execute from scratch and judge consistency."""
    record = run(program, n, received, limits)
    return consistency_of(record, received, program)


def claimed_solutions(program_name: str, n: int) -> set[tuple[tuple[str, int], ...]]:
    """Fixed points the published analysis asserts for a corpus program."""
    if not corpus.is_corpus_id(program_name):
        raise corpus.UnknownCorpusProgram(program_name)
    view = factor_view(n)
    if program_name == "brun1":
        return {(("tt", d),) for d in view.divisors_gt1}
    if program_name == "brun2":
        if view.is_prime:
            return {(("tt", n),)}
        return {(("tt", d),) for d in view.proper_divisors}
    if view.is_prime:
        return {(("flag", 1), ("tt", n))}
    return {(("flag", 0), ("tt", d)) for d in view.proper_divisors}


def compare_to_paper(report: SolveReport) -> list[Divergence]:
    """Differences between the computed fixed points and the claimed solutions."""
    expected = claimed_solutions(report.program, report.n)
    computed = {fp.received.key() for fp in report.fixed_points}
    out = [Divergence("present-but-unexpected", a) for a in sorted(computed - expected)]
    out += [Divergence("expected-but-absent", a) for a in sorted(expected - computed)]
    return out
