from pathlib import Path

import pytest

from rtlmosaic.formula import atoms, parse, to_text
from rtlmosaic.hardness import (
    MachineError, ResourceExceeded, canonical_run, encode_parts, encode_tm, format_tm,
    formula_size, parse_tm, simulate,
)
from rtlmosaic.oracle import IntervalWord, eval_word

FIXTURES = Path(__file__).parent / "fixtures"
TICK0 = 1  # region of the first tick point


def load(name):
    return parse_tm((FIXTURES / f"{name}.tm").read_text())


def test_simulate_fixtures():
    run = simulate(load("accept"))
    assert run.accepted and run.halted_at == 1
    run = simulate(load("reject"))
    assert not run.accepted and run.halted_at == 1
    run = simulate(load("swap3"))
    assert run.accepted and run.halted_at == 3
    assert run.configs[-1][0] == ["b", "a", "#"]


@pytest.mark.parametrize("name", ["accept", "swap3"])
def test_accepting_run_satisfies_every_conjunct(name):
    spec = load(name)
    w = canonical_run(spec)
    assert all(eval_word(w, f)[TICK0] for f in encode_parts(spec))
    assert eval_word(w, encode_tm(spec))[TICK0]


def test_rejecting_run_fails_only_the_last_conjunct():
    spec = load("reject")
    w = canonical_run(spec)
    vals = [eval_word(w, f)[TICK0] for f in encode_parts(spec)]
    assert vals == [True] * 14 + [False]


def test_rejecting_input_on_swap_machine():
    spec = load("swap3")
    spec.input = ("b", "a")
    assert not simulate(spec).accepted
    vals = [eval_word(canonical_run(spec), f)[TICK0] for f in encode_parts(spec)]
    assert vals == [True] * 14 + [False]


@pytest.mark.parametrize("name", ["accept", "swap3"])
def test_corrupted_cells_break_the_encoding(name):
    spec = load(name)
    w = canonical_run(spec)
    f = encode_tm(spec)
    first_block = 2 * (spec.space + 1)
    tried = 0
    for i in range(1 + first_block, len(w.regions), 2):
        cell = {x for x in w.regions[i] if x.startswith(("c_", "h_"))}
        if not cell:
            continue
        regs = list(w.regions)
        regs[i] = w.regions[i] - cell
        assert not eval_word(IntervalWord(tuple(regs), w.loop), f)[TICK0]
        tried += 1
    assert tried > 0


def test_encoding_text_round_trips():
    f = encode_tm(load("accept"))
    assert parse(to_text(f)) == f
    assert {"tick", "star", "r1", "c_blank", "h_q0_blank", "h_qa_blank"} <= atoms(f)


def test_size_grows_with_bounds():
    spec = load("swap3")
    base = formula_size(encode_tm(spec))
    spec.space = 4
    wider = formula_size(encode_tm(spec))
    spec.time = 3
    longer = formula_size(encode_tm(spec))
    assert base < wider < longer


def test_format_round_trip():
    for name in ("accept", "reject", "swap3"):
        spec = load(name)
        assert parse_tm(format_tm(spec)) == spec


def test_leftward_first_move_rejected():
    text = (FIXTURES / "accept.tm").read_text().replace("q0 # -> qa # R", "q0 # -> qa # L")
    with pytest.raises(MachineError, match="right"):
        parse_tm(text).validate()


def test_missing_transition_rejected():
    text = (FIXTURES / "swap3.tm").read_text().replace("q1 a -> qr a R\n", "")
    with pytest.raises(MachineError, match="no transition"):
        encode_tm(parse_tm(text))


def test_resource_exceeded():
    text = """states: q0 q1
alphabet: #
initial: q0
accept:
reject:
space: 2
time: 2
input:
q0 # -> q1 # R
q1 # -> q0 # R
"""
    with pytest.raises(ResourceExceeded, match="leaves"):
        simulate(parse_tm(text))
    bounce = text.replace("q1 # -> q0 # R", "q1 # -> q0 # L")
    with pytest.raises(ResourceExceeded, match="within"):
        simulate(parse_tm(bounce))


@pytest.mark.parametrize("bad", [
    "states: q0\n",
    "states: q0 qa\nstates: q0\n",
    "what is this\n",
])
def test_parse_errors(bad):
    with pytest.raises(MachineError):
        parse_tm(bad)


def test_bad_names_rejected():
    text = (FIXTURES / "accept.tm").read_text().replace("states: q0 qa", "states: Q0 qa")
    with pytest.raises(MachineError):
        parse_tm(text).validate()
