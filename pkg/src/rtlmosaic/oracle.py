"""Finite-variability real models ("interval words") and their semantics.

A word is I_0, x_1, I_1, ..., x_n, I_n: open intervals alternating with
points, each region labelled with the atoms true throughout it.  Every
formula is constant on every region, so truth is a per-region vector.

Case table for U(a, b), with S the mirror image:

* last interval I_n:   a(I_n) and b(I_n)
* interval I_k, k < n: b(I_k) and (a(I_k) or a(x_{k+1}) or (b(x_{k+1}) and U at x_{k+1}))
* point x_k:           same value as on I_k

A point needs a witness strictly later, and the open interval after it is
nonempty, so any witness keeps b on an initial part of that interval; that
is why a point copies the value of the interval that follows it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence

from .formula import And, Atom, ClosureTable, Formula, Not, Since, Until, atoms, desugar, is_core
from .mosaic import Mosaic


@dataclass(frozen=True)
class IntervalWord:
    """Regions I_0, x_1, I_1, ..., x_n, I_n, each a set of true atoms.

    With a nonempty ``loop`` (x, I, x, I, ...) the word continues by repeating
    the loop forever after the last prefix interval; the flow then has
    infinitely many points, unbounded to the right.
    """

    regions: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...] = ()

    def __post_init__(self):
        if len(self.regions) % 2 != 1:
            raise ValueError("a word has an odd number of regions: I_0 x_1 I_1 ... x_n I_n")
        if len(self.loop) % 2 != 0:
            raise ValueError("a loop alternates point, interval and has even length")

    @property
    def n_points(self) -> int:
        return len(self.regions) // 2

    def point_region(self, k: int) -> int:
        """Region index of point x_k (1-based)."""
        if not 1 <= k <= self.n_points:
            raise IndexError(f"no point x_{k}")
        return 2 * k - 1

    def unrolled(self, copies: int) -> tuple[frozenset[str], ...]:
        return self.regions + self.loop * copies

    def __len__(self) -> int:
        return len(self.regions)

    def __str__(self) -> str:
        def show(i: int, r: frozenset[str]) -> str:
            body = " ".join(sorted(r))
            return "{" + body + "}" if i % 2 == 0 else "[" + body + "]"

        text = "( " + " | ".join(show(i, r) for i, r in enumerate(self.regions)) + " )"
        if self.loop:
            text += " ( " + " | ".join(show(i + 1, r) for i, r in enumerate(self.loop)) + " )*"
        return text


_REGION_RE = re.compile(r"\s*(\{[^{}\[\]]*\}|\[[^{}\[\]]*\])\s*")


def parse_word(text: str) -> IntervalWord:
    """Parse ``( {p q} | [p] | {} )``: braces are intervals, brackets points."""
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError("word literal must be enclosed in parentheses")
    chunks = s[1:-1].split("|")
    regions = []
    for i, chunk in enumerate(chunks):
        m = _REGION_RE.fullmatch(chunk)
        if not m:
            raise ValueError(f"bad region {chunk.strip()!r}")
        tok = m.group(1)
        want = "{" if i % 2 == 0 else "["
        if tok[0] != want:
            kind = "interval" if want == "{" else "point"
            raise ValueError(f"region {i} must be an {kind}")
        regions.append(frozenset(tok[1:-1].split()))
    return IntervalWord(tuple(regions))


def temporal_depth(f: Formula) -> int:
    if isinstance(f, (Until, Since)):
        return 1 + max(temporal_depth(f.goal), temporal_depth(f.hold))
    if isinstance(f, Not):
        return temporal_depth(f.child)
    if isinstance(f, And):
        return max(temporal_depth(f.left), temporal_depth(f.right))
    return 0


def eval_word(word: IntervalWord, f: Formula) -> list[bool]:
    """Truth of ``f`` on each region of ``word``.

    For a looping word the vector covers the prefix followed by enough loop
    copies for every subformula to have become periodic; the last copy
    stands for all later ones.
    """
    if not is_core(f):
        f = desugar(f)
    copies = temporal_depth(f) + 2 if word.loop else 0
    regions = word.unrolled(copies)
    period = len(word.loop)
    memo: dict[Formula, list[bool]] = {}

    def ev(g: Formula) -> list[bool]:
        got = memo.get(g)
        if got is None:
            if isinstance(g, Atom):
                got = [g.name in r for r in regions]
            elif isinstance(g, Not):
                got = [not v for v in ev(g.child)]
            elif isinstance(g, And):
                got = [x and y for x, y in zip(ev(g.left), ev(g.right))]
            elif isinstance(g, Until):
                got = _until(ev(g.goal), ev(g.hold), period)
            elif isinstance(g, Since):
                got = _since(ev(g.goal), ev(g.hold))
            else:
                raise TypeError(f"not a core formula: {g!r}")
            memo[g] = got
        return got

    return ev(f)


def _until_pass(a: list[bool], b: list[bool], out: list[bool], last: int, lo: int, nxt) -> None:
    """Fill out[lo..last] right to left; ``nxt`` = (a, b, U) at the point after
    interval ``last``, or None if that interval is unbounded."""
    if nxt is None:
        out[last] = a[last] and b[last]
    else:
        na, nb, nu = nxt
        out[last] = b[last] and (a[last] or na or (nb and nu))
    for k in range(last - 2, lo - 1, -2):
        x = k + 1
        out[x] = out[x + 1]
        out[k] = b[k] and (a[k] or a[x] or (b[x] and out[x]))


def _until(a: list[bool], b: list[bool], period: int = 0) -> list[bool]:
    n = len(a)
    out = [False] * n
    if not period:
        _until_pass(a, b, out, n - 1, 0, None)
        return out
    # the last copy repeats forever: least fixpoint over its first point
    first = n - period
    guess = False
    while True:
        _until_pass(a, b, out, n - 1, first + 1, (a[first], b[first], guess))
        out[first] = out[first + 1]
        if out[first] == guess:
            break
        guess = out[first]
    _until_pass(a, b, out, first - 1, 0, (a[first], b[first], out[first]))
    return out


def _since(a: list[bool], b: list[bool]) -> list[bool]:
    out = [False] * len(a)
    out[0] = a[0] and b[0]
    for k in range(2, len(a), 2):
        x = k - 1
        out[x] = out[x - 1]
        out[k] = b[k] and (a[k] or a[x] or (b[x] and out[x]))
    return out


def words(atom_names: Sequence[str], n_regions: int) -> Iterator[IntervalWord]:
    """All words with ``n_regions`` regions, skipping those where a point
    and both neighbouring intervals share a label (a shorter word describes
    the same real structure)."""
    names = sorted(atom_names)
    labels = [frozenset(c for c, bit in zip(names, bits) if bit)
              for bits in product((False, True), repeat=len(names))]
    for regs in product(labels, repeat=n_regions):
        if any(regs[k - 1] == regs[k] == regs[k + 1] for k in range(1, n_regions, 2)):
            continue
        yield IntervalWord(regs)


def sat_search(f: Formula, max_regions: int) -> Optional[tuple[IntervalWord, int]]:
    """First (word, region) making ``f`` true, over words of at most
    ``max_regions`` regions; None says nothing about satisfiability."""
    if max_regions < 1:
        raise ValueError("max_regions must be at least 1")
    if not is_core(f):
        f = desugar(f)
    names = sorted(atoms(f))
    for n in range(1, max_regions + 1, 2):
        for w in words(names, n):
            vec = eval_word(w, f)
            if any(vec):
                return w, vec.index(True)
    return None


def mos_extract(word: IntervalWord, i: int, j: int, table: ClosureTable) -> Mosaic:
    """The mosaic of points x_i < x_j (1-based point indices)."""
    if not 1 <= i < j <= word.n_points:
        raise ValueError(f"need 1 <= i < j <= {word.n_points}, got i={i}, j={j}")
    ri, rj = word.point_region(i), word.point_region(j)
    a = b = c = 0
    for k, g in enumerate(table.formulas):
        vec = eval_word(word, g)
        bit = 1 << k
        if vec[ri]:
            a |= bit
        if all(vec[ri + 1:rj]):
            b |= bit
        if vec[rj]:
            c |= bit
    return Mosaic(a, b, c)
