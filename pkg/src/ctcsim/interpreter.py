"""Deterministic, instrumented forward execution of CTC-DSL programs.

A run fixes the values every time-travel register holds at the clock point
(the *received* assignment), executes the program forward once, and records
everything a later consistency judgement needs: outputs, the ordered values
sent to each register, per-label execution counts and the step count.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, TextIO

from .dsl import (
    And, Assign, Compare, Cond, Expr, Goto, Halt, IfGoto, Input, Not, Num,
    Or, Output, Program, Receive, Send, Var, format_instr,
)

DEFAULT_MAX_STEPS = 10_000_000
MAX_INPUT = 2**31


class Status(str, enum.Enum):
    HALTED = "Halted"
    STEP_LIMIT_EXCEEDED = "StepLimitExceeded"
    FAULTED = "Faulted"


@dataclass(frozen=True)
class Limits:
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True)
class Fault:
    kind: str  # ModByNonPositive | UnboundVariable
    line: int | None
    detail: str = ""


@dataclass(frozen=True)
class ReceivedAssignment:
    values: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "values", dict(sorted(self.values.items())))

    def __getitem__(self, register: str) -> int:
        return self.values[register]

    def key(self) -> tuple[tuple[str, int], ...]:
        """Sort key: lexicographic by register name, then value."""
        return tuple(self.values.items())

    def __hash__(self):
        return hash(self.key())

    def __str__(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.values.items())


@dataclass(frozen=True)
class RunRecord:
    outputs: tuple[int, ...]
    sends: dict[str, tuple[int, ...]]
    label_counts: dict[str, int]
    steps: int
    status: Status
    fault: Fault | None = None

    @property
    def halted(self) -> bool:
        return self.status is Status.HALTED


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    explanations: dict[str, str] = field(default_factory=dict)
    conflicting_sends: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.consistent

    @property
    def verdict(self) -> str:
        return "Consistent" if self.consistent else "Inconsistent"

    def __str__(self) -> str:
        if self.consistent:
            return "Consistent"
        return "Inconsistent(" + "; ".join(f"{r}: {m}" for r, m in self.explanations.items()) + ")"


class _Fault(Exception):
    def __init__(self, kind: str, detail: str):
        self.kind = kind
        self.detail = detail


# --------------------------------------------------------------------------
# Compilation of expressions/conditions to closures over the environment
# --------------------------------------------------------------------------

_INPUT = "input"  # keyword, so it cannot collide with a variable name

EvalFn = Callable[[dict], int]


def _compile_expr(e: Expr) -> EvalFn:
    if isinstance(e, Num):
        value = e.value
        return lambda env: value
    if isinstance(e, Input):
        return lambda env: env[_INPUT]
    if isinstance(e, Var):
        name = e.name

        def read(env):
            try:
                return env[name]
            except KeyError:
                raise _Fault("UnboundVariable", f"variable {name!r} read before assignment") from None
        return read
    left, right = _compile_expr(e.left), _compile_expr(e.right)
    if e.op == "+":
        return lambda env: left(env) + right(env)
    if e.op == "-":
        return lambda env: left(env) - right(env)
    if e.op == "*":
        return lambda env: left(env) * right(env)

    def mod(env):
        a = left(env)
        b = right(env)
        if b <= 0:
            raise _Fault("ModByNonPositive", f"{a} mod {b}")
        return a % b
    return mod


_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
}


def _compile_cond(c: Cond) -> Callable[[dict], bool]:
    if isinstance(c, Compare):
        left, right, op = _compile_expr(c.left), _compile_expr(c.right), _CMP[c.op]
        return lambda env: op(left(env), right(env))
    if isinstance(c, Not):
        inner = _compile_cond(c.operand)
        return lambda env: not inner(env)
    left, right = _compile_cond(c.left), _compile_cond(c.right)
    if isinstance(c, And):
        return lambda env: left(env) and right(env)
    if isinstance(c, Or):
        return lambda env: left(env) or right(env)
    raise TypeError(f"not a condition: {c!r}")


# opcodes of the compiled form
_ASSIGN, _RECEIVE, _SEND, _IF, _GOTO, _OUTPUT, _HALT = range(7)


_compiled: dict[int, tuple[Program, tuple]] = {}


def _compile(program: Program) -> tuple:
    hit = _compiled.get(id(program))
    if hit is not None and hit[0] is program:
        return hit[1]
    code = []
    for st in program.statements:
        i = st.instr
        if isinstance(i, Assign):
            code.append((_ASSIGN, i.var, _compile_expr(i.expr)))
        elif isinstance(i, Receive):
            code.append((_RECEIVE, i.var, i.register))
        elif isinstance(i, Send):
            code.append((_SEND, i.register, _compile_expr(i.expr)))
        elif isinstance(i, IfGoto):
            code.append((_IF, program.labels[i.target], _compile_cond(i.cond)))
        elif isinstance(i, Goto):
            code.append((_GOTO, program.labels[i.target], None))
        elif isinstance(i, Output):
            code.append((_OUTPUT, None, _compile_expr(i.expr)))
        elif isinstance(i, Halt):
            code.append((_HALT, None, None))
        else:
            raise TypeError(f"not an instruction: {i!r}")
    if len(_compiled) > 256:
        _compiled.clear()
    _compiled[id(program)] = (program, tuple(code))
    return _compiled[id(program)][1]


# --------------------------------------------------------------------------
# Execution
# --------------------------------------------------------------------------


def _as_received(received) -> ReceivedAssignment:
    if isinstance(received, ReceivedAssignment):
        return received
    return ReceivedAssignment(dict(received))


def _trace_line(out: TextIO, step: int, program: Program, pc: int, env: dict) -> None:
    st = program.statements[pc]
    snapshot = " ".join(f"{k}={v}" for k, v in sorted(env.items()) if k != _INPUT)
    out.write(f"{step}, {st.line if st.line is not None else '-'}, {st.label or '-'}, "
              f"{format_instr(st.instr)}, {snapshot}\n")


def run(program: Program, n: int, received, limits: Limits = Limits(),
        trace: TextIO | None = None) -> RunRecord:
    """Execute ``program`` on input ``n`` with the given received register values.

    Faults and step-limit overruns come back as data in the returned record.
    """
    if not isinstance(n, int) or not 2 <= n <= MAX_INPUT:
        raise ValueError(f"input n must be an integer in [2, 2^31], got {n!r}")
    received = _as_received(received)
    missing = set(program.register_names) - set(received.values)
    extra = set(received.values) - set(program.register_names)
    if missing or extra:
        raise ValueError(
            f"received assignment must cover exactly the declared registers "
            f"(missing {sorted(missing)}, unknown {sorted(extra)})")

    code = _compile(program)
    statements = program.statements
    labels_at = {i: st.label for i, st in enumerate(statements) if st.label is not None}
    label_counts = dict.fromkeys(program.labels, 0)
    sends: dict[str, list[int]] = {r: [] for r in program.register_names}
    outputs: list[int] = []
    values = received.values
    env: dict = {_INPUT: n}
    max_steps = limits.max_steps
    end = len(code)
    pc = 0
    steps = 0
    status = Status.HALTED
    fault = None

    while pc < end:
        if steps >= max_steps:
            status = Status.STEP_LIMIT_EXCEEDED
            break
        if trace is not None:
            _trace_line(trace, steps + 1, program, pc, env)
        steps += 1
        label = labels_at.get(pc)
        if label is not None:
            label_counts[label] += 1
        op, arg, fn = code[pc]
        pc += 1
        try:
            if op == _IF:
                if fn(env):
                    pc = arg
            elif op == _ASSIGN:
                env[arg] = fn(env)
            elif op == _SEND:
                sends[arg].append(fn(env))
            elif op == _RECEIVE:
                env[arg] = values[fn]
            elif op == _GOTO:
                pc = arg
            elif op == _OUTPUT:
                outputs.append(fn(env))
            else:
                break
        except _Fault as exc:
            status = Status.FAULTED
            fault = Fault(exc.kind, statements[pc - 1].line, exc.detail)
            break

    return RunRecord(
        outputs=tuple(outputs),
        sends={r: tuple(v) for r, v in sends.items()},
        label_counts=label_counts,
        steps=steps,
        status=status,
        fault=fault,
    )


def consistency_of(record: RunRecord, received, program: Program) -> ConsistencyResult:
    """Judge whether a run reproduces the values it was given from the future.

    The past sees the *last* value sent to a register; a register never sent
    must have been received with its declared initial value.
    """
    received = _as_received(received)
    explanations: dict[str, str] = {}
    conflicting = tuple(r for r, vals in record.sends.items() if len(set(vals)) > 1)
    if record.status is Status.FAULTED:
        f = record.fault
        explanations["*"] = f"run faulted ({f.kind} at line {f.line})"
    elif record.status is Status.STEP_LIMIT_EXCEEDED:
        explanations["*"] = f"step limit exceeded after {record.steps} steps"
    for reg in program.registers:
        got = received[reg.name]
        sent = record.sends.get(reg.name, ())
        if sent:
            if sent[-1] != got:
                explanations[reg.name] = f"sent {sent[-1]} != received {got}"
        elif got != reg.initial:
            explanations[reg.name] = f"never sent, received {got} != initial {reg.initial}"
    return ConsistencyResult(not explanations, explanations, conflicting)
