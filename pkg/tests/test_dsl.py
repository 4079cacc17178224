import pytest
from hypothesis import given, settings, strategies as st

import progen
from ctcsim import corpus
from ctcsim.dsl import (
    AUTO, BinOp, DslError, DslSyntaxError, DuplicateLabel, DuplicateReceive,
    DuplicateRegister, Goto, InvalidDomain, Num, Program, RegisterDecl, Send,
    Statement, UndeclaredRegister, UnknownLabel, Var, parse, pretty, tokenize,
    validate,
)

HEADER = "program t\nttreg tt init -1 domain auto\n"


def test_brun1_structure():
    prog = parse(corpus.get("brun1").source)
    assert prog.name == "brun1"
    assert prog.registers == (RegisterDecl("tt", -1, AUTO),)
    assert {"JUMP", "LOOP", "FINAL"} <= set(prog.labels)
    for label, index in prog.labels.items():
        assert prog.statements[index].label == label


def test_unknown_label():
    with pytest.raises(UnknownLabel) as err:
        parse(HEADER + "receive tt -> p\ngoto NOWHERE\n")
    assert err.value.token == "NOWHERE"
    assert err.value.line == 4


def test_duplicate_receive():
    with pytest.raises(DuplicateReceive) as err:
        parse(HEADER + "receive tt -> p\nreceive tt -> p\n")
    assert err.value.token == "tt"
    assert err.value.line == 4


def test_undeclared_register():
    with pytest.raises(UndeclaredRegister) as err:
        parse(HEADER + "send x 1\n")
    assert err.value.token == "x"


def test_duplicate_label():
    with pytest.raises(DuplicateLabel):
        parse(HEADER + "A: halt\nA: halt\n")


def test_duplicate_register_and_empty_domain():
    with pytest.raises(DuplicateRegister):
        parse(HEADER + "ttreg tt init 0 domain 0..1\n")
    with pytest.raises(InvalidDomain):
        parse("program t\nttreg r init 0 domain 5..1\n")


@pytest.mark.parametrize(
    "source, line",
    [
        ("program\n", 2),
        ("program t\nx = \n", 3),
        ("program t\nif x goto A\n", 2),
        ("program t\nx = 3 $ 4\n", 2),
        ("program t\nttreg r init 0 domain 1 2\n", 2),
        ("program t\n\n  receive r p\n", 3),
    ],
)
def test_syntax_errors_carry_position(source, line):
    with pytest.raises(DslSyntaxError) as err:
        parse(source)
    assert err.value.line == line
    assert err.value.column is not None
    assert f"line {line}" in str(err.value)


def test_comments_and_whitespace_insensitive():
    a = parse("program t # name\n x = 1 y = x + 2 # trailing\n output y halt")
    b = parse("program t\nx = 1\ny = x + 2\noutput y\nhalt\n")
    assert a == b


def test_precedence_and_associativity():
    prog = parse("program t\nx = 1 - 2 - 3 * 4 mod 5\n")
    e = prog.statements[0].instr.expr
    assert e == BinOp("-", BinOp("-", Num(1), Num(2)),
                      BinOp("mod", BinOp("*", Num(3), Num(4)), Num(5)))


def test_parenthesised_expression_inside_condition():
    prog = parse("program t\nA: if (x + 1) * 2 > input and not (x == 1 or x == 2) goto A\n")
    text = pretty(prog)
    assert "(x + 1) * 2 > input and not (x == 1 or x == 2)" in text
    assert parse(text) == prog


def test_negative_literals():
    prog = parse("program t\nx = -1\ny = x - -2\n")
    assert prog.statements[0].instr.expr == Num(-1)
    assert prog.statements[1].instr.expr == BinOp("-", Var("x"), Num(-2))


def test_keywords_are_not_identifiers():
    with pytest.raises(DslSyntaxError):
        parse("program t\ninput = 3\n")
    assert [t.kind for t in tokenize("mod modx")][:2] == ["KW", "IDENT"]


def test_validate_reports_data_not_exceptions():
    assert validate(corpus.program("brun2")) == []
    bad = Program.build("t", [], [Statement(Send("x", Num(1)))])
    (violation,) = validate(bad)
    assert violation.kind == "UndeclaredRegister"
    unlabeled = Program.build("t", [], [Statement(Goto("L")), Statement(Send("x", Var("p")))])
    kinds = [v.kind for v in validate(unlabeled)]
    assert "UnknownLabel" in kinds


def test_validate_detects_inconsistent_label_table():
    prog = Program("t", (), (Statement(Goto("A"), "A"),), {"A": 3})
    assert [v.kind for v in validate(prog)] == ["UnknownLabel"]


@pytest.mark.parametrize("pid", corpus.IDS)
def test_corpus_roundtrip_and_idempotent(pid):
    prog = parse(corpus.get(pid).source)
    text = pretty(prog)
    assert parse(text) == prog
    assert pretty(parse(text)) == text


def test_pretty_format():
    text = pretty(corpus.program("brun1"))
    lines = text.splitlines()
    assert lines[0] == "program brun1"
    assert any(line.startswith("FINAL: send tt p") for line in lines)
    assert all(line.count(" goto ") <= 1 for line in lines)


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_roundtrip_random_programs(rng):
    prog = progen.program(rng)
    assert validate(prog) == []
    text = pretty(prog)
    again = parse(text)
    assert again == prog
    assert pretty(again) == text


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="program ttreg x=1:->()+-*modgotoif\n#", max_size=60))
def test_parse_is_total(source):
    # any input either parses or yields a single positioned diagnostic
    try:
        parse(source)
    except DslError as err:
        assert err.line is not None
