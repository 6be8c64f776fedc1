import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtlmosaic.formula import And, Atom, Not, Since, Until, closure, parse
from rtlmosaic.mosaic import MosaicSpace, compose
from rtlmosaic.oracle import (
    IntervalWord, eval_word, mos_extract, parse_word, sat_search, temporal_depth, words,
)

from strategies import core_formulas

ATOMS2 = st.sampled_from(["p", "q"])


def brute_eval(regions, f):
    """Direct quantification over regions, assuming region-constant truth.

    U(a,b) at region r: some later s with a(s) and b everywhere strictly
    between; s either lies in r itself (r an interval) or in a later region.
    """
    n = len(regions)
    if isinstance(f, Atom):
        return [f.name in r for r in regions]
    if isinstance(f, Not):
        return [not v for v in brute_eval(regions, f.child)]
    if isinstance(f, And):
        a, b = brute_eval(regions, f.left), brute_eval(regions, f.right)
        return [x and y for x, y in zip(a, b)]
    a, b = brute_eval(regions, f.goal), brute_eval(regions, f.hold)
    interval = [k % 2 == 0 for k in range(n)]
    out = []
    for r in range(n):
        if isinstance(f, Until):
            cands = range(r + 1, n)
            between = lambda s: range(r + 1, s)
        else:
            cands = range(r - 1, -1, -1)
            between = lambda s: range(s + 1, r)
        ok = interval[r] and a[r] and b[r]
        for s in cands:
            if ok:
                break
            ok = (a[s] and all(b[k] for k in between(s))
                  and (not interval[r] or b[r]) and (not interval[s] or b[s]))
        out.append(ok)
    return out


def random_word(rng, names, n_points):
    labels = [frozenset(x for x in names if rng.random() < 0.5) for _ in range(2 * n_points + 1)]
    return IntervalWord(tuple(labels))


# ---------------------------------------------------------------- literals


def test_parse_and_print_word():
    w = parse_word("( {} | [p] | {} )")
    assert w.regions == (frozenset(), frozenset({"p"}), frozenset())
    assert w.n_points == 1 and w.point_region(1) == 1
    assert parse_word(str(w)) == w
    assert str(parse_word("({p q}|[q]|{})")) == "( {p q} | [q] | {} )"


@pytest.mark.parametrize("text", ["{} | [p] | {}", "( [p] )", "( {} | {} | {} )", "( {} | [p )", "( {} | [p] )"])
def test_parse_word_rejects(text):
    with pytest.raises(ValueError):
        parse_word(text)


def test_loop_validation():
    with pytest.raises(ValueError):
        IntervalWord((frozenset(),), (frozenset(),))
    w = IntervalWord((frozenset(),), (frozenset({"p"}), frozenset()))
    assert str(w) == "( {} ) ( [p] | {} )*"
    assert len(w.unrolled(3)) == 7


# ---------------------------------------------------------------- evaluation


def test_eval_examples():
    w = parse_word("( {} | [p] | {} )")
    assert eval_word(w, parse("F p")) == [True, False, False]
    assert eval_word(w, parse("S(p, True)")) == [False, False, True]
    assert eval_word(w, parse("G !p")) == [False, True, True]
    # a point holding p does not give U(p, q) at the preceding interval without q
    assert eval_word(w, parse("U(p, q)")) == [False, False, False]


def test_temporal_depth():
    assert temporal_depth(parse("p & !q")) == 0
    assert temporal_depth(parse("U(S(p,q), p)")) == 2


@settings(max_examples=300, deadline=None)
@given(core_formulas(ATOMS2, max_leaves=6), st.integers(0, 10 ** 6))
def test_eval_matches_brute_force(f, seed):
    rng = random.Random(seed)
    w = random_word(rng, ["p", "q"], rng.randint(0, 4))
    assert eval_word(w, f) == brute_eval(w.regions, f)


@settings(max_examples=150, deadline=None)
@given(core_formulas(ATOMS2, max_leaves=6), st.integers(0, 10 ** 6))
def test_loop_unrolling_is_stable(f, seed):
    """More loop copies than needed change nothing on the prefix and first copies."""
    rng = random.Random(seed)
    pre = random_word(rng, ["p", "q"], rng.randint(0, 2)).regions
    loop = random_word(rng, ["p", "q"], rng.randint(1, 2)).regions[1:]
    k = temporal_depth(f) + 2
    short = eval_word(IntervalWord(pre, loop), f)
    # a long finite truncation agrees away from its right end
    long = IntervalWord(pre + loop * (k + 12), ())
    if not any(isinstance(g, Until) for g in _subs(f)):
        assert short == eval_word(long, f)[:len(short)]
    again = eval_word(IntervalWord(pre, loop * 2), f)
    assert again[:len(pre)] == short[:len(pre)]


def _subs(f):
    yield f
    for name in ("child", "left", "right", "goal", "hold"):
        if hasattr(f, name):
            yield from _subs(getattr(f, name))


def test_lasso_needs_fixpoint():
    # G F p on an infinite p-blinking tail: true everywhere
    w = IntervalWord((frozenset(),), (frozenset({"p"}), frozenset()))
    assert all(eval_word(w, parse("G F p")))
    # F G !p fails there
    assert not any(eval_word(w, parse("F G !p")))
    # U(p, !p) on a tail with no p point stays false
    w2 = IntervalWord((frozenset(),), (frozenset(), frozenset()))
    assert not any(eval_word(w2, parse("U(p, !p)")))


# ---------------------------------------------------------------- search


def test_words_skip_redundant_points():
    ws = list(words(["p"], 3))
    assert len(ws) == 8 - 2
    assert all(not (w.regions[0] == w.regions[1] == w.regions[2]) for w in ws)


def test_sat_search_examples():
    w, r = sat_search(parse("p"), 1)
    assert "p" in w.regions[r]
    assert sat_search(parse("p & !p"), 7) is None
    w, r = sat_search(parse("F p & G !q"), 5)
    assert eval_word(w, parse("F p & G !q"))[r]
    with pytest.raises(ValueError):
        sat_search(parse("p"), 0)


def test_cut_formula_has_no_small_model():
    cut = parse("p & F !p & U(p,p) & G(!p -> G !p) & G((p & F !p) -> U(p,p)) & G(!p -> S(!p,!p))")
    assert sat_search(cut, 7) is None


# ---------------------------------------------------------------- extraction


@pytest.mark.parametrize("text", ["U(p,q)", "S(p,q) & !U(q,p)"])
def test_extraction_gives_mosaics_and_composes(text):
    t = closure(parse(text))
    sp = MosaicSpace(t)
    rng = random.Random(2)
    for _ in range(25):
        w = random_word(rng, ["p", "q"], rng.randint(2, 5))
        n = w.n_points
        mos = {(i, j): mos_extract(w, i, j, t) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        for m in mos.values():
            assert sp.is_mosaic(m)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for k in range(j + 1, n + 1):
                    assert compose(mos[i, j], mos[j, k]) == mos[i, k]


def test_mos_extract_rejects_bad_indices():
    t = closure(parse("p"))
    w = parse_word("( {} | [p] | {} | [] | {} )")
    with pytest.raises(ValueError):
        mos_extract(w, 2, 1, t)
    with pytest.raises(ValueError):
        mos_extract(w, 1, 3, t)
