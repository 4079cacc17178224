"""Lexer, parser, validator and pretty-printer for the CTC-DSL.

The language is a flat label/goto integer language with two time-travel
primitives: ``receive REG -> var`` reads the value a register holds at the
(single, implicit) clock point, and ``send REG expr`` overwrites that value
from the future.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    program  := "program" IDENT regdecl* stmt*
    regdecl  := "ttreg" IDENT "init" INT ("domain" INT ".." INT | "domain" "auto")
    stmt     := (IDENT ":")? instr
    instr    := IDENT "=" expr | "receive" IDENT "->" IDENT | "send" IDENT expr
              | "if" cond "goto" IDENT | "goto" IDENT | "output" expr | "halt"
    expr     := term (("+"|"-") term)*
    term     := atom (("*"|"mod") atom)*
    atom     := INT | IDENT | "input" | "(" expr ")"
    cond     := band ("or" band)*
    band     := bnot ("and" bnot)*
    bnot     := "not" bnot | expr CMP expr | "(" cond ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Literal, Union

AUTO = "auto"

KEYWORDS = frozenset(
    {
        "program", "ttreg", "init", "domain", "auto", "receive", "send",
        "if", "goto", "output", "halt", "mod", "and", "or", "not", "input",
    }
)
COMPARISONS = ("==", "!=", "<=", ">=", "<", ">")


# --------------------------------------------------------------------------
# Diagnostics
# --------------------------------------------------------------------------


class DslError(Exception):
    """Base class for every diagnostic raised by :func:`parse`."""

    kind = "DslError"

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None, token: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(f"{where}{self.kind}: {message}")


class DslSyntaxError(DslError):
    kind = "SyntaxError"


class UndeclaredRegister(DslError):
    kind = "UndeclaredRegister"


class DuplicateLabel(DslError):
    kind = "DuplicateLabel"


class UnknownLabel(DslError):
    kind = "UnknownLabel"


class DuplicateReceive(DslError):
    kind = "DuplicateReceive"


class DuplicateRegister(DslError):
    kind = "DuplicateRegister"


class InvalidDomain(DslError):
    kind = "InvalidDomain"


_ERRORS = {
    cls.kind: cls
    for cls in (UndeclaredRegister, DuplicateLabel, UnknownLabel,
                DuplicateReceive, DuplicateRegister, InvalidDomain)
}


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    token: str
    line: int | None = None

    def to_error(self) -> DslError:
        return _ERRORS[self.kind](self.message, line=self.line, token=self.token)

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{where}{self.kind}: {self.message}"


ValidationReport = list  # list[Violation]; empty means valid


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Input:
    pass


@dataclass(frozen=True)
class BinOp:
    op: Literal["+", "-", "*", "mod"]
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Input, BinOp]


@dataclass(frozen=True)
class Compare:
    op: Literal["==", "!=", "<", ">", "<=", ">="]
    left: Expr
    right: Expr


@dataclass(frozen=True)
class And:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Or:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Not:
    operand: "Cond"


Cond = Union[Compare, And, Or, Not]


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class Receive:
    register: str
    var: str


@dataclass(frozen=True)
class Send:
    register: str
    expr: Expr


@dataclass(frozen=True)
class IfGoto:
    cond: Cond
    target: str


@dataclass(frozen=True)
class Goto:
    target: str


@dataclass(frozen=True)
class Output:
    expr: Expr


@dataclass(frozen=True)
class Halt:
    pass


Instr = Union[Assign, Receive, Send, IfGoto, Goto, Output, Halt]


@dataclass(frozen=True)
class Statement:
    instr: Instr
    label: str | None = None
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RegisterDecl:
    name: str
    initial: int
    domain: tuple[int, int] | Literal["auto"] = AUTO
    line: int | None = field(default=None, compare=False)

    @property
    def is_auto(self) -> bool:
        return self.domain == AUTO


@dataclass(frozen=True)
class Program:
    name: str
    registers: tuple[RegisterDecl, ...]
    statements: tuple[Statement, ...]
    labels: dict[str, int] = field(default_factory=dict, hash=False)

    @classmethod
    def build(cls, name: str, registers, statements) -> "Program":
        """Assemble a program and derive its label table (first occurrence wins)."""
        statements = tuple(statements)
        labels: dict[str, int] = {}
        for i, st in enumerate(statements):
            if st.label is not None and st.label not in labels:
                labels[st.label] = i
        return cls(name, tuple(registers), statements, labels)

    def register(self, name: str) -> RegisterDecl:
        for reg in self.registers:
            if reg.name == name:
                return reg
        raise KeyError(name)

    @property
    def register_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.registers)


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, KW, OP, EOF
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|->|\.\.|[<>=+\-*():])
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        column = pos - line_start + 1
        if m is None:
            raise DslSyntaxError(f"unexpected character {source[pos]!r}",
                                 line, column, source[pos])
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "int":
            tokens.append(Token("INT", text, line, column))
        elif kind == "ident":
            tokens.append(Token("KW" if text in KEYWORDS else "IDENT", text, line, column))
        elif kind == "op":
            tokens.append(Token("OP", text, line, column))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("KW", "OP") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, expected: str) -> DslSyntaxError:
        tok = self.tok
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        return DslSyntaxError(f"expected {expected}, found {found}",
                              tok.line, tok.column, tok.text)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(repr(text))
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "IDENT":
            raise self.error(what)
        return self.advance()

    def signed_int(self) -> int:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        if self.tok.kind != "INT":
            raise self.error("integer literal")
        return sign * int(self.advance().text)

    # program structure -------------------------------------------------

    def program(self) -> Program:
        self.expect("program")
        name = self.ident("program name").text
        registers = []
        while self.at("ttreg"):
            registers.append(self.regdecl())
        statements = []
        while self.tok.kind != "EOF":
            statements.append(self.statement())
        return Program.build(name, registers, statements)

    def regdecl(self) -> RegisterDecl:
        line = self.expect("ttreg").line
        name = self.ident("register name").text
        self.expect("init")
        initial = self.signed_int()
        self.expect("domain")
        if self.at("auto"):
            self.advance()
            return RegisterDecl(name, initial, AUTO, line=line)
        lo = self.signed_int()
        self.expect("..")
        hi = self.signed_int()
        return RegisterDecl(name, initial, (lo, hi), line=line)

    def statement(self) -> Statement:
        label = None
        line = self.tok.line
        if self.tok.kind == "IDENT" and self.peek().text == ":":
            label = self.advance().text
            self.advance()
        return Statement(self.instr(), label, line=line)

    def instr(self) -> Instr:
        tok = self.tok
        if tok.kind == "IDENT":
            self.advance()
            self.expect("=")
            return Assign(tok.text, self.expr())
        if self.at("receive"):
            self.advance()
            reg = self.ident("register name").text
            self.expect("->")
            return Receive(reg, self.ident("variable name").text)
        if self.at("send"):
            self.advance()
            reg = self.ident("register name").text
            return Send(reg, self.expr())
        if self.at("if"):
            self.advance()
            cond = self.cond()
            self.expect("goto")
            return IfGoto(cond, self.ident("label").text)
        if self.at("goto"):
            self.advance()
            return Goto(self.ident("label").text)
        if self.at("output"):
            self.advance()
            return Output(self.expr())
        if self.at("halt"):
            self.advance()
            return Halt()
        raise self.error("statement")

    # expressions -------------------------------------------------------

    def expr(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.atom()
        while self.at("*") or self.at("mod"):
            op = self.advance().text
            left = BinOp(op, left, self.atom())
        return left

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "INT" or (self.at("-") and self.peek().kind == "INT"):
            return Num(self.signed_int())
        if tok.kind == "IDENT":
            self.advance()
            return Var(tok.text)
        if self.at("input"):
            self.advance()
            return Input()
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error("expression")

    # conditions --------------------------------------------------------

    def cond(self) -> Cond:
        left = self.band()
        while self.at("or"):
            self.advance()
            left = Or(left, self.band())
        return left

    def band(self) -> Cond:
        left = self.bnot()
        while self.at("and"):
            self.advance()
            left = And(left, self.bnot())
        return left

    def bnot(self) -> Cond:
        if self.at("not"):
            self.advance()
            return Not(self.bnot())
        # "(" may open either a parenthesised expression or a nested condition
        start = self.pos
        try:
            left = self.expr()
            if self.tok.kind == "OP" and self.tok.text in COMPARISONS:
                op = self.advance().text
                return Compare(op, left, self.expr())
            if not self.at("("):
                raise self.error("comparison operator")
        except DslSyntaxError:
            if self.tokens[start].text != "(":
                raise
        self.pos = start
        self.expect("(")
        inner = self.cond()
        self.expect(")")
        return inner


def parse(source: str) -> Program:
    """Parse and validate CTC-DSL source.

    Raises the first diagnostic found, as a :class:`DslError` subclass.
    """
    program = _Parser(tokenize(source)).program()
    violations = validate(program)
    if violations:
        raise violations[0].to_error()
    return program


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------


def _targets(instr: Instr) -> Iterator[str]:
    if isinstance(instr, (Goto, IfGoto)):
        yield instr.target


def validate(program: Program) -> list[Violation]:
    """Return every invariant violation of ``program`` in source order."""
    out: list[Violation] = []
    declared: set[str] = set()
    for reg in program.registers:
        if reg.name in declared:
            out.append(Violation("DuplicateRegister",
                                 f"register {reg.name!r} declared twice", reg.name, reg.line))
        declared.add(reg.name)
        if not reg.is_auto:
            lo, hi = reg.domain
            if lo > hi:
                out.append(Violation("InvalidDomain",
                                     f"register {reg.name!r} has empty domain {lo}..{hi}",
                                     reg.name, reg.line))

    seen_labels: set[str] = set()
    received: set[str] = set()
    for st in program.statements:
        if st.label is not None:
            if st.label in seen_labels:
                out.append(Violation("DuplicateLabel",
                                     f"label {st.label!r} defined twice", st.label, st.line))
            seen_labels.add(st.label)
        instr = st.instr
        if isinstance(instr, (Receive, Send)) and instr.register not in declared:
            out.append(Violation("UndeclaredRegister",
                                 f"register {instr.register!r} is not declared",
                                 instr.register, st.line))
        if isinstance(instr, Receive):
            if instr.register in received:
                out.append(Violation("DuplicateReceive",
                                     f"register {instr.register!r} is received more than once",
                                     instr.register, st.line))
            received.add(instr.register)

    for st in program.statements:
        for target in _targets(st.instr):
            if target not in seen_labels:
                out.append(Violation("UnknownLabel", f"no statement labelled {target!r}",
                                     target, st.line))

    for label, index in program.labels.items():
        if not (0 <= index < len(program.statements)) or program.statements[index].label != label:
            out.append(Violation("UnknownLabel",
                                 f"label table entry {label!r} -> {index} is inconsistent",
                                 label, None))
    return out


# --------------------------------------------------------------------------
# Pretty-printer
# --------------------------------------------------------------------------

_EXPR_PREC = {"+": 1, "-": 1, "*": 2, "mod": 2}


def format_expr(e: Expr, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Input):
        return "input"
    prec = _EXPR_PREC[e.op]
    text = f"{format_expr(e.left, prec)} {e.op} {format_expr(e.right, prec, right=True)}"
    # left-associative: a right operand of equal precedence needs parentheses
    if prec < parent_prec or (right and prec == parent_prec):
        return f"({text})"
    return text


_COND_PREC = {Or: 1, And: 2}


def format_cond(c: Cond, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(c, Compare):
        return f"{format_expr(c.left)} {c.op} {format_expr(c.right)}"
    if isinstance(c, Not):
        if isinstance(c.operand, Not):
            return f"not {format_cond(c.operand)}"
        return f"not ({format_cond(c.operand)})"
    prec = _COND_PREC[type(c)]
    word = "or" if isinstance(c, Or) else "and"
    text = f"{format_cond(c.left, prec)} {word} {format_cond(c.right, prec, right=True)}"
    if prec < parent_prec or (right and prec == parent_prec):
        return f"({text})"
    return text


def format_instr(instr: Instr) -> str:
    if isinstance(instr, Assign):
        return f"{instr.var} = {format_expr(instr.expr)}"
    if isinstance(instr, Receive):
        return f"receive {instr.register} -> {instr.var}"
    if isinstance(instr, Send):
        return f"send {instr.register} {format_expr(instr.expr)}"
    if isinstance(instr, IfGoto):
        return f"if {format_cond(instr.cond)} goto {instr.target}"
    if isinstance(instr, Goto):
        return f"goto {instr.target}"
    if isinstance(instr, Output):
        return f"output {format_expr(instr.expr)}"
    if isinstance(instr, Halt):
        return "halt"
    raise TypeError(f"not an instruction: {instr!r}")


def pretty(program: Program) -> str:
    """Canonical source text: one statement per line, labels in a left column."""
    lines = [f"program {program.name}"]
    for reg in program.registers:
        dom = AUTO if reg.is_auto else f"{reg.domain[0]}..{reg.domain[1]}"
        lines.append(f"ttreg {reg.name} init {reg.initial} domain {dom}")
    width = max((len(st.label) + 1 for st in program.statements if st.label), default=0)
    for st in program.statements:
        prefix = f"{st.label}:" if st.label else ""
        pad = f"{prefix:<{width}} " if width else ""
        lines.append(f"{pad}{format_instr(st.instr)}")
    return "\n".join(lines) + "\n"
