import pytest
from hypothesis import given, settings

from rtlmosaic.formula import And, Atom, Not, Until, atoms, desugar, formula_length, parse, subformulas
from rtlmosaic.relativize import DecisionContext, RelativizedSpace, fresh_atom, is_relativized, star

from strategies import core_formulas

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_fresh_atom():
    assert fresh_atom(p) == "q"
    assert fresh_atom(And(p, q)) == "q_1"
    assert fresh_atom(parse("q & q_1")) == "q_2"
    assert fresh_atom(desugar(parse("True"))) == "q"


def test_star_examples():
    assert star(p, "q") == And(p, q)
    assert star(Until(p, r), "q") == And(Until(And(p, q), And(r, q)), q)
    assert star(Not(p), "q") == And(Not(And(p, q)), q)


def test_star_rejects_used_atom():
    with pytest.raises(ValueError):
        star(And(p, q), "q")


@settings(max_examples=200, deadline=None)
@given(core_formulas())
def test_star_length_and_subformulas(f):
    qn = fresh_atom(f)
    s = star(f, qn)
    assert formula_length(s) <= 3 * formula_length(f)
    assert atoms(s) == atoms(f) | {qn}
    subs = set(subformulas(s))
    for g in subformulas(f):
        assert star(g, qn) in subs


def ctx_p():
    return DecisionContext.build(p)


def test_context():
    ctx = DecisionContext.build(parse("F p"))
    assert ctx.q == "q"
    assert ctx.N == formula_length(ctx.psi)
    assert ctx.depth_bound == 2 * ctx.N
    assert "q" not in atoms(ctx.phi)


def test_is_relativized_examples():
    ctx = ctx_p()
    sp = RelativizedSpace(ctx)
    t = ctx.table
    a = t.from_texts(["!q", "!p", "!(p & q)"])
    b = t.from_texts(["q", "p", "p & q"])
    c = t.from_texts(["!q", "p", "!(p & q)"])
    m = sp.make_mosaic(a, b, c)
    assert is_relativized(m, ctx)
    # q missing from the cover
    m2 = sp.make_mosaic(a, t.from_texts(["p"]), c)
    assert not is_relativized(m2, ctx)
    # not psi in the cover
    m3 = sp.make_mosaic(a, t.from_texts(["q", "!p", "!(p & q)"]), c)
    assert not is_relativized(m3, ctx)
    # q at an endpoint
    m4 = sp.make_mosaic(t.from_texts(["q", "p", "p & q"]), b, c)
    assert not is_relativized(m4, ctx)


def test_is_relativized_rejects_until_in_end():
    ctx = DecisionContext.build(parse("U(p, r)"))
    sp = RelativizedSpace(ctx)
    ends = [c for c in sp.mpcs if sp.relativized_end(c)]
    assert ends
    u = ctx.table.idx(Until(And(p, q), And(r, q)))
    assert all(not (c >> u) & 1 for c in ends)
    assert any(not sp.relativized_end(c) and (c >> u) & 1 for c in sp.mpcs)
