"""Relativization to a fresh atom q.

``star(f, q)`` confines every subformula of ``f`` to the q-points, so ``f``
has a real model iff some mosaic for ``star(f, q)`` has a q-only interior
(cover) and non-q endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .formula import (
    And,
    Atom,
    ClosureTable,
    Formula,
    Not,
    Since,
    Until,
    atoms,
    closure,
    desugar,
    formula_length,
    is_core,
)
from .mosaic import MosaicSpace


def fresh_atom(f: Formula) -> str:
    used = atoms(f)
    if "q" not in used:
        return "q"
    k = 1
    while f"q_{k}" in used:
        k += 1
    return f"q_{k}"


def star(f: Formula, q: str) -> Formula:
    if q in atoms(f):
        raise ValueError(f"atom {q!r} already occurs in the formula")
    qa = Atom(q)
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if g in memo:
            return memo[g]
        if isinstance(g, Atom):
            out: Formula = And(g, qa)
        elif isinstance(g, Not):
            out = And(Not(go(g.child)), qa)
        elif isinstance(g, And):
            out = And(And(go(g.left), go(g.right)), qa)
        elif isinstance(g, Until):
            out = And(Until(go(g.goal), go(g.hold)), qa)
        elif isinstance(g, Since):
            out = And(Since(go(g.goal), go(g.hold)), qa)
        else:
            raise TypeError(f"star expects a core formula, got {type(g).__name__}")
        memo[g] = out
        return out

    return go(f)


@dataclass(frozen=True)
class DecisionContext:
    phi: Formula
    q: str
    psi: Formula
    table: ClosureTable
    N: int

    @classmethod
    def build(cls, phi: Formula) -> "DecisionContext":
        if not is_core(phi):
            phi = desugar(phi)
        q = fresh_atom(phi)
        psi = star(phi, q)
        return cls(phi, q, psi, closure(psi), formula_length(psi))

    @property
    def depth_bound(self) -> int:
        return 2 * self.N


class RelativizedSpace(MosaicSpace):
    """A mosaic space that also knows the q / psi indices of its context."""

    def __init__(self, ctx: DecisionContext):
        super().__init__(ctx.table)
        self.ctx = ctx
        self.q_idx = ctx.table.idx(Atom(ctx.q))
        self.not_q_idx = ctx.table.neg_of[self.q_idx]
        self.not_psi_idx = ctx.table.neg_of[ctx.table.idx(ctx.psi)]

    def relativized_start(self, a: int) -> bool:
        return bool((a >> self.not_q_idx) & 1) and a & self.since_mask == 0

    def relativized_end(self, c: int) -> bool:
        return bool((c >> self.not_q_idx) & 1) and c & self.until_mask == 0

    def is_relativized(self, m: Sequence[int]) -> bool:
        a, b, c = m
        return (
            self.relativized_start(a)
            and bool((b >> self.q_idx) & 1)
            and not (b >> self.not_psi_idx) & 1
            and self.relativized_end(c)
        )


def is_relativized(m: Sequence[int], ctx: DecisionContext) -> bool:
    return RelativizedSpace(ctx).is_relativized(m)
