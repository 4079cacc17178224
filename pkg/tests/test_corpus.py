import json
from pathlib import Path

import pytest

from ctcsim import corpus
from ctcsim.dsl import Receive, Send, parse, validate
from ctcsim.interpreter import run

FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "traces.json").read_text())


def test_list_order_and_titles():
    assert corpus.list_entries() == [
        ("brun1", "Factoring algorithm as proposed by Brun"),
        ("brun2", "Modified factoring algorithm"),
        ("brun3", "Optimal factoring algorithm"),
    ]


@pytest.mark.parametrize("pid", corpus.IDS)
def test_entries_parse_cleanly(pid):
    entry = corpus.get(pid)
    assert validate(parse(entry.source)) == []
    assert corpus.source_path(pid).name == f"{pid}.ctc"


@pytest.mark.parametrize("pid", corpus.IDS)
def test_paper_lines_cover_time_travel_and_loop(pid):
    entry = corpus.get(pid)
    prog = entry.program
    for st in prog.statements:
        if isinstance(st.instr, (Send, Receive)) or st.label == "LOOP":
            assert st.line in entry.paper_lines, (pid, st)


def test_register_declarations():
    assert [(r.name, r.initial, r.domain) for r in corpus.program("brun1").registers] == [
        ("tt", -1, "auto")]
    assert [(r.name, r.initial, r.domain) for r in corpus.program("brun3").registers] == [
        ("tt", -1, "auto"), ("flag", 0, "auto")]


def test_brun2_adds_equality_guard():
    b1 = corpus.program("brun1").statements
    b2 = corpus.program("brun2").statements
    assert len(b2) == len(b1) + 1
    assert b2[1].instr.cond.op == "=="
    assert b2[1].instr.target == "JUMP"
    assert b2[:1] + b2[2:] == b1


def test_brun3_flag_sends():
    sends = [st.instr for st in corpus.program("brun3").statements
             if isinstance(st.instr, Send) and st.instr.register == "flag"]
    assert len(sends) == 2


def test_unknown_id():
    with pytest.raises(corpus.UnknownCorpusProgram):
        corpus.get("brun4")


def test_fixture_count():
    assert len(FIXTURES) == 30


@pytest.mark.parametrize("case", FIXTURES, ids=lambda c: f"{c['program']}-{c['n']}-{c['received']}")
def test_fixture_faithfulness(case):
    rec = run(corpus.program(case["program"]), case["n"], case["received"])
    assert list(rec.outputs) == case["outputs"]
    assert {r: list(v) for r, v in rec.sends.items()} == case["sends"]
    assert rec.label_counts == case["label_counts"]
