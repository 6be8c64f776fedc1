"""Formulas of L(U,S): abstract syntax, parser, printer, desugaring and closure.

``Until(goal, hold)`` is true at x when ``goal`` holds at some y > x and
``hold`` holds at every point strictly between x and y.  ``Since`` is the
mirror image.  Both connectives are strict.

Grammar (lowest to highest binding)::

    iff   := imp ('<->' iff)?
    imp   := or ('->' imp)?
    or    := and ('|' and)*
    and   := unary ('&' unary)*
    unary := '!' unary | 'F' unary | 'G' unary | primary
    primary := atom | 'True' | 'False' | 'U' '(' iff ',' iff ')'
             | 'S' '(' iff ',' iff ')' | '(' iff ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    child: Formula

    def __repr__(self) -> str:
        return f"Not({self.child!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Until(Formula):
    goal: Formula
    hold: Formula

    def __repr__(self) -> str:
        return f"Until({self.goal!r}, {self.hold!r})"


@dataclass(frozen=True, repr=False)
class Since(Formula):
    goal: Formula
    hold: Formula

    def __repr__(self) -> str:
        return f"Since({self.goal!r}, {self.hold!r})"


# Sugar: removed by desugar() before any decision procedure sees the formula.

@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Or({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Iff({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class TrueF(Formula):
    def __repr__(self) -> str:
        return "TrueF()"


@dataclass(frozen=True, repr=False)
class FalseF(Formula):
    def __repr__(self) -> str:
        return "FalseF()"


@dataclass(frozen=True, repr=False)
class Future(Formula):
    child: Formula

    def __repr__(self) -> str:
        return f"Future({self.child!r})"


@dataclass(frozen=True, repr=False)
class Globally(Formula):
    child: Formula

    def __repr__(self) -> str:
        return f"Globally({self.child!r})"


CORE_TYPES = (Atom, Not, And, Until, Since)
TEMPORAL_TYPES = (Until, Since)
RESERVED_TRUE_ATOM = "v_true"
ATOM_RE = re.compile(r"[a-z][a-z0-9_]*")


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Atom, TrueF, FalseF)):
        return ()
    if isinstance(f, (Not, Future, Globally)):
        return (f.child,)
    if isinstance(f, (Until, Since)):
        return (f.goal, f.hold)
    return (f.left, f.right)


def is_core(f: Formula) -> bool:
    return isinstance(f, CORE_TYPES) and all(is_core(c) for c in children(f))


def atoms(f: Formula) -> set[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            out.add(g.name)
        stack.extend(children(g))
    return out


def formula_length(f: Formula) -> int:
    """Node count of the AST (sugar nodes count as one node each)."""
    return 1 + sum(formula_length(c) for c in children(f))


def subformulas(f: Formula) -> Iterator[Formula]:
    """Distinct subformulas in post-order (children before parents)."""
    seen: set[Formula] = set()

    def walk(g: Formula) -> Iterator[Formula]:
        if g in seen:
            return
        for c in children(g):
            yield from walk(c)
        if g not in seen:
            seen.add(g)
            yield g

    yield from walk(f)


# ---------------------------------------------------------------- parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, offset: int, expected: set[str], found: str):
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"syntax error at offset {offset}: expected one of {{{exp}}}, found {found!r}")


_TOKEN_RE = re.compile(r"\s*(?:(<->|->|[!&|(),])|([A-Za-z][A-Za-z0-9_]*))")
_KEYWORDS = {"U", "S", "F", "G", "True", "False"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks: list[tuple[str, str, int]] = []
    pos = 0
    raw = text.encode("utf-8")
    # offsets are byte offsets; map char positions through the utf-8 prefix length
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise FormulaSyntaxError(len(text[:at].encode("utf-8")), {"formula"}, stripped[0])
        start = m.start(1) if m.group(1) else m.start(2)
        boff = len(text[:start].encode("utf-8"))
        if m.group(1):
            toks.append((m.group(1), m.group(1), boff))
        else:
            word = m.group(2)
            if word in _KEYWORDS:
                toks.append((word, word, boff))
            elif ATOM_RE.fullmatch(word):
                toks.append(("atom", word, boff))
            else:
                raise FormulaSyntaxError(boff, {"atom", "keyword"}, word)
        pos = m.end()
    toks.append(("eof", "", len(raw)))
    return toks


class _Parser:
    _PRIMARY_START = {"atom", "True", "False", "U", "S", "(", "!", "F", "G"}

    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            raise FormulaSyntaxError(tok[2], {kind}, tok[1] or "<eof>")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok[0] != "eof":
            raise FormulaSyntaxError(tok[2], {"<eof>", "&", "|", "->", "<->"}, tok[1])
        return f

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek()[0] == "<->":
            self.i += 1
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek()[0] == "->":
            self.i += 1
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[0] == "|":
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind = self.peek()[0]
        if kind == "!":
            self.i += 1
            return Not(self.unary())
        if kind == "F":
            self.i += 1
            return Future(self.unary())
        if kind == "G":
            self.i += 1
            return Globally(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, text, off = self.peek()
        if kind == "atom":
            self.i += 1
            return Atom(text)
        if kind == "True":
            self.i += 1
            return TrueF()
        if kind == "False":
            self.i += 1
            return FalseF()
        if kind in ("U", "S"):
            self.i += 1
            self.take("(")
            goal = self.iff()
            self.take(",")
            hold = self.iff()
            self.take(")")
            return Until(goal, hold) if kind == "U" else Since(goal, hold)
        if kind == "(":
            self.i += 1
            f = self.iff()
            self.take(")")
            return f
        raise FormulaSyntaxError(off, self._PRIMARY_START, text or "<eof>")


def parse(text: str) -> Formula:
    """Parse formula text into a (possibly sugar-bearing) AST.

    Raises FormulaSyntaxError carrying the byte offset of the offending
    token and the set of tokens that would have been accepted there.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------- printing

# binding strength: larger binds tighter
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_UNARY_PREC = 5


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), _UNARY_PREC)


def to_text(f: Formula) -> str:
    """Canonical text with minimal parentheses; parse(to_text(f)) == f."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueF):
        return "True"
    if isinstance(f, FalseF):
        return "False"
    if isinstance(f, (Not, Future, Globally)):
        op = {Not: "!", Future: "F ", Globally: "G "}[type(f)]
        inner = to_text(f.child)
        if _prec(f.child) < _UNARY_PREC:
            inner = f"({inner})"
        return op + inner
    if isinstance(f, Until):
        return f"U({to_text(f.goal)}, {to_text(f.hold)})"
    if isinstance(f, Since):
        return f"S({to_text(f.goal)}, {to_text(f.hold)})"
    p = _prec(f)
    op = {And: " & ", Or: " | ", Implies: " -> ", Iff: " <-> "}[type(f)]
    left, right = to_text(f.left), to_text(f.right)
    if isinstance(f, (And, Or)):
        # left-associative
        if _prec(f.left) < p:
            left = f"({left})"
        if _prec(f.right) <= p:
            right = f"({right})"
    else:
        # right-associative
        if _prec(f.left) <= p:
            left = f"({left})"
        if _prec(f.right) < p:
            right = f"({right})"
    return left + op + right


# ---------------------------------------------------------------- desugaring


def truth_atom(f: Formula) -> Atom:
    names = atoms(f)
    return Atom(min(names) if names else RESERVED_TRUE_ATOM)


def desugar(f: Formula) -> Formula:
    """Rewrite sugar into Atom/Not/And/Until/Since.

    True becomes !(p0 & !p0) where p0 is the least atom of the whole input,
    so no fresh atom inflates the closure unless the input has none.
    """
    p0 = truth_atom(f)
    top = Not(And(p0, Not(p0)))

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return g
        if isinstance(g, Not):
            return Not(go(g.child))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Until):
            return Until(go(g.goal), go(g.hold))
        if isinstance(g, Since):
            return Since(go(g.goal), go(g.hold))
        if isinstance(g, Or):
            return Not(And(Not(go(g.left)), Not(go(g.right))))
        if isinstance(g, Implies):
            return Not(And(go(g.left), Not(go(g.right))))
        if isinstance(g, Iff):
            a, b = go(g.left), go(g.right)
            return And(Not(And(a, Not(b))), Not(And(b, Not(a))))
        if isinstance(g, TrueF):
            return top
        if isinstance(g, FalseF):
            return Not(top)
        if isinstance(g, Future):
            return Until(go(g.child), top)
        if isinstance(g, Globally):
            return Not(Until(Not(go(g.child)), top))
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


def sim(f: Formula) -> Formula:
    """Strip one leading negation, or add one."""
    return f.child if isinstance(f, Not) else Not(f)


# ---------------------------------------------------------------- closure


@dataclass(frozen=True)
class ClosureTable:
    """Indexed closure {psi, !psi : psi a subformula of root}.

    Formula sets over the table are Python ints used as bitsets: bit i is
    set iff ``formulas[i]`` is a member.
    """

    root: Formula
    formulas: tuple[Formula, ...]
    index: dict[Formula, int] = field(repr=False, compare=False)
    neg_of: dict[int, int] = field(repr=False, compare=False)
    sim_of: tuple[int, ...] = field(repr=False, compare=False)
    subformula_edges: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    is_sub: tuple[bool, ...] = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.formulas)

    def __len__(self) -> int:
        return len(self.formulas)

    def __contains__(self, f: Formula) -> bool:
        return f in self.index

    def idx(self, f: Union[Formula, str]) -> int:
        if isinstance(f, str):
            f = parse(f)
        return self.index[f]

    def sim(self, i: int) -> int:
        return self.sim_of[i]

    def mask(self, fs) -> int:
        m = 0
        for f in fs:
            m |= 1 << self.idx(f)
        return m

    def members(self, mask: int) -> list[Formula]:
        return [self.formulas[i] for i in iter_bits(mask)]

    def text_set(self, mask: int) -> list[str]:
        return sorted(to_text(f) for f in self.members(mask))

    def from_texts(self, texts) -> int:
        return self.mask(parse(t) for t in texts)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.formulas)) - 1


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def closure(f: Formula) -> ClosureTable:
    if not is_core(f):
        raise ValueError("closure() needs a core formula; desugar first")
    subs = list(subformulas(f))
    sub_set = set(subs)
    formulas: list[Formula] = []
    index: dict[Formula, int] = {}

    def add(g: Formula) -> None:
        if g not in index:
            index[g] = len(formulas)
            formulas.append(g)

    for g in subs:
        add(g)
        add(Not(g))
    neg_of = {i: index[Not(g)] for i, g in enumerate(formulas) if Not(g) in index}
    sim_of = tuple(index[sim(g)] for g in formulas)
    edges = tuple(tuple(index[c] for c in children(g)) for g in formulas)
    return ClosureTable(
        root=f,
        formulas=tuple(formulas),
        index=index,
        neg_of=neg_of,
        sim_of=sim_of,
        subformula_edges=edges,
        is_sub=tuple(g in sub_set for g in formulas),
    )
