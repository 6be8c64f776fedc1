"""Mosaic algebra over a closure table.

Formula sets are int bitsets over closure indices (see ``ClosureTable``).
A mosaic ``(start, cover, end)`` abstracts two points x < y of a structure:
``start`` holds at x, ``end`` at y and ``cover`` at every point strictly
between them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from .formula import And, Atom, ClosureTable, Not, Since, Until, iter_bits, to_text


class Mosaic(NamedTuple):
    start: int
    cover: int
    end: int


class MosaicError(ValueError):
    """A triple failed the mosaic definition.

    ``kind`` is one of NotMpcStart, NotMpcEnd, CoverNotSimClosed,
    CoherencyViolation; ``clause`` names the violated clause (e.g. "C1.2").
    """

    def __init__(self, kind: str, clause: str = "", alpha: Optional[int] = None,
                 beta: Optional[int] = None):
        self.kind = kind
        self.clause = clause
        self.alpha = alpha
        self.beta = beta
        msg = kind if not clause else f"{kind}({clause}, alpha={alpha}, beta={beta})"
        super().__init__(msg)


class NonComposable(ValueError):
    def __init__(self, position: int = 0):
        self.position = position
        super().__init__(f"mosaics at positions {position} and {position + 1} do not compose")


@dataclass(frozen=True)
class DefectReport:
    type1: frozenset[int]
    type2: frozenset[int]
    type3: frozenset[int]

    def is_empty(self) -> bool:
        return not (self.type1 or self.type2 or self.type3)


class Temporal(NamedTuple):
    """Indices for one U(alpha, beta) or S(alpha, beta) closure member."""

    idx: int
    alpha: int
    beta: int
    neg_alpha: int
    neg_beta: int
    neg_self: int
    sim_alpha: int


class MosaicSpace:
    """Precomputed tables for mosaics over one closure.

    Propositional consistency is decided by abstraction: atoms and U/S
    members are opaque variables, and a set is PC iff some valuation of those
    variables makes every member true.  Hence the MPCs are exactly the sets of
    closure members true under one valuation.
    """

    def __init__(self, table: ClosureTable):
        self.table = table
        f = table.formulas
        self.size = len(f)
        self.full = (1 << self.size) - 1
        self.sim_of = table.sim_of
        self.opaque = tuple(i for i, g in enumerate(f) if isinstance(g, (Atom, Until, Since)))

        def temporal(kind) -> tuple[Temporal, ...]:
            out = []
            for i, g in enumerate(f):
                if isinstance(g, kind):
                    a, b = table.index[g.goal], table.index[g.hold]
                    out.append(Temporal(i, a, b, table.neg_of[a], table.neg_of[b],
                                        table.neg_of[i], table.sim_of[a]))
            return tuple(out)

        self.untils = temporal(Until)
        self.sinces = temporal(Since)
        self.until_mask = sum(1 << t.idx for t in self.untils)
        self.since_mask = sum(1 << t.idx for t in self.sinces)
        # condition 0.2 only bites on beta = !gamma with !!gamma in the closure
        self.double_neg = tuple(
            (table.neg_of[i], table.sim_of[i])
            for i, g in enumerate(f) if isinstance(g, Not) and i in table.neg_of
        )

    # ------------------------------------------------------------ MPCs

    def valuation_set(self, assignment: dict[int, bool]) -> int:
        """The MPC induced by truth values for the opaque closure members."""
        f = self.table.formulas
        edges = self.table.subformula_edges
        val: list[Optional[bool]] = [None] * self.size
        for i, v in assignment.items():
            val[i] = v

        def ev(i: int) -> bool:
            v = val[i]
            if v is None:
                g = f[i]
                if isinstance(g, Not):
                    v = not ev(edges[i][0])
                elif isinstance(g, And):
                    v = ev(edges[i][0]) and ev(edges[i][1])
                else:
                    raise KeyError(f"no value for opaque member {to_text(g)}")
                val[i] = v
            return v

        return sum(1 << i for i in range(self.size) if ev(i))

    @cached_property
    def mpcs(self) -> tuple[int, ...]:
        out = []
        for bits in product((False, True), repeat=len(self.opaque)):
            out.append(self.valuation_set(dict(zip(self.opaque, bits))))
        return tuple(sorted(out))

    @cached_property
    def mpc_set(self) -> frozenset[int]:
        return frozenset(self.mpcs)

    def is_pc(self, s: int) -> bool:
        return any(s & ~m == 0 for m in self.mpcs)

    def is_mpc(self, s: int) -> bool:
        return s in self.mpc_set

    # ------------------------------------------------------------ mosaics

    def sim_closed(self, b: int) -> bool:
        """Condition 0.2: !beta in B iff ~beta in B, for every !beta in Cl."""
        for nb, sb in self.double_neg:
            if ((b >> nb) & 1) != ((b >> sb) & 1):
                return False
        return True

    def violation(self, a: int, b: int, c: int) -> Optional[MosaicError]:
        if a not in self.mpc_set:
            return MosaicError("NotMpcStart")
        if c not in self.mpc_set:
            return MosaicError("NotMpcEnd")
        if not self.sim_closed(b):
            return MosaicError("CoverNotSimClosed")
        return self.coherency_violation(a, b, c)

    def coherency_violation(self, a: int, b: int, c: int) -> Optional[MosaicError]:
        for t in self.untils:
            if (a >> t.neg_self) & 1 and (b >> t.beta) & 1:
                if not ((c >> t.neg_alpha) & 1 and ((c >> t.neg_beta) & 1 or (c >> t.neg_self) & 1)):
                    return MosaicError("CoherencyViolation", "C1.1", t.alpha, t.beta)
                if not ((b >> t.neg_alpha) & 1 and (b >> t.neg_self) & 1):
                    return MosaicError("CoherencyViolation", "C1.2", t.alpha, t.beta)
            if (a >> t.idx) & 1 and (b >> t.neg_alpha) & 1:
                if not ((c >> t.alpha) & 1 or ((c >> t.beta) & 1 and (c >> t.idx) & 1)):
                    return MosaicError("CoherencyViolation", "C2.1", t.alpha, t.beta)
                if not ((b >> t.beta) & 1 and (b >> t.idx) & 1):
                    return MosaicError("CoherencyViolation", "C2.2", t.alpha, t.beta)
        for t in self.sinces:
            if (c >> t.neg_self) & 1 and (b >> t.beta) & 1:
                if not ((a >> t.neg_alpha) & 1 and ((a >> t.neg_beta) & 1 or (a >> t.neg_self) & 1)):
                    return MosaicError("CoherencyViolation", "C3.1", t.alpha, t.beta)
                if not ((b >> t.neg_alpha) & 1 and (b >> t.neg_self) & 1):
                    return MosaicError("CoherencyViolation", "C3.2", t.alpha, t.beta)
            if (c >> t.idx) & 1 and (b >> t.neg_alpha) & 1:
                if not ((a >> t.alpha) & 1 or ((a >> t.beta) & 1 and (a >> t.idx) & 1)):
                    return MosaicError("CoherencyViolation", "C4.1", t.alpha, t.beta)
                if not ((b >> t.beta) & 1 and (b >> t.idx) & 1):
                    return MosaicError("CoherencyViolation", "C4.2", t.alpha, t.beta)
        return None

    def is_mosaic(self, m: Sequence[int]) -> bool:
        return self.violation(*m) is None

    def make_mosaic(self, a: int, b: int, c: int) -> Mosaic:
        err = self.violation(a, b, c)
        if err is not None:
            raise err
        return Mosaic(a, b, c)

    def all_mosaics(self) -> Iterator[Mosaic]:
        """Every mosaic over the closure; only usable for tiny closures."""
        for a in self.mpcs:
            for c in self.mpcs:
                for b in range(self.full + 1):
                    if self.violation(a, b, c) is None:
                        yield Mosaic(a, b, c)

    # ------------------------------------------------------------ defects

    def defects(self, m: Sequence[int]) -> DefectReport:
        a, b, c = m
        t1 = frozenset(
            t.idx for t in self.untils
            if (a >> t.idx) & 1 and (
                not (b >> t.beta) & 1
                or (not (c >> t.alpha) & 1 and not (c >> t.beta) & 1)
                or (not (c >> t.alpha) & 1 and not (c >> t.idx) & 1)
            )
        )
        t2 = frozenset(
            t.idx for t in self.sinces
            if (c >> t.idx) & 1 and (
                not (b >> t.beta) & 1
                or (not (a >> t.alpha) & 1 and not (a >> t.beta) & 1)
                or (not (a >> t.alpha) & 1 and not (a >> t.idx) & 1)
            )
        )
        return DefectReport(t1, t2, frozenset(iter_bits(self.type3_mask(b))))

    def type3_mask(self, b: int) -> int:
        """{beta : ~beta not in B}."""
        sim = self.sim_of
        return sum(1 << i for i in range(self.size) if not (b >> sim[i]) & 1)

    # ------------------------------------------------------------ text

    def fmt_set(self, s: int) -> str:
        return "{" + ", ".join(self.table.text_set(s)) + "}"

    def fmt(self, m: Sequence[int]) -> str:
        return "(" + ", ".join(self.fmt_set(x) for x in m) + ")"


# ---------------------------------------------------------------- composition


def composes(m1: Sequence[int], m2: Sequence[int]) -> bool:
    return m1[2] == m2[0]


def compose(m1: Sequence[int], m2: Sequence[int]) -> Mosaic:
    """(A', B' & C' & B'', C'') when C' == A''."""
    if m1[2] != m2[0]:
        raise NonComposable(0)
    return Mosaic(m1[0], m1[1] & m1[2] & m2[1], m2[2])


def compose_seq(seq: Sequence[Sequence[int]]) -> Mosaic:
    if not seq:
        raise ValueError("composition of an empty sequence is undefined")
    a, b, c = seq[0]
    for pos, m in enumerate(seq[1:]):
        if m[0] != c:
            raise NonComposable(pos)
        b &= c & m[1]
        c = m[2]
    return Mosaic(a, b, c)


def is_composing(seq: Sequence[Sequence[int]]) -> bool:
    return all(seq[i][2] == seq[i + 1][0] for i in range(len(seq) - 1))


# ---------------------------------------------------------------- fullness


def is_full_decomposition(space: MosaicSpace, m: Sequence[int], seq: Sequence[Sequence[int]]) -> bool:
    """Literal check that ``seq`` composes to ``m`` and cures every defect.

    Positions are 1-based in the conditions below: U-witnesses sit at an end
    C_i with 1 <= i < n, S-witnesses at a start A_i with 1 < i <= n, and each
    beta with ~beta not in B needs beta in some C_i, 1 <= i < n.
    """
    n = len(seq)
    if n == 0 or not is_composing(seq) or tuple(compose_seq(seq)) != tuple(m):
        return False
    a, b, c = m
    starts = [x[0] for x in seq]
    covers = [x[1] for x in seq]
    ends = [x[2] for x in seq]

    for t in space.untils:
        if not (a >> t.idx) & 1:
            continue
        if (b >> t.beta) & 1 and (((c >> t.beta) & 1 and (c >> t.idx) & 1) or (c >> t.alpha) & 1):
            continue
        ok = False
        for i in range(n - 1):  # 0-based i <-> 1-based i+1 < n
            if not (covers[i] >> t.beta) & 1:
                break
            if (ends[i] >> t.alpha) & 1:
                ok = True
                break
            if not (ends[i] >> t.beta) & 1:
                break
        if not ok:
            return False

    for t in space.sinces:
        if not (c >> t.idx) & 1:
            continue
        if (b >> t.beta) & 1 and (((a >> t.beta) & 1 and (a >> t.idx) & 1) or (a >> t.alpha) & 1):
            continue
        ok = False
        for i in range(n - 1, 0, -1):  # 0-based i <-> 1-based i+1 > 1
            if not (covers[i] >> t.beta) & 1:
                break
            if (starts[i] >> t.alpha) & 1:
                ok = True
                break
            if not (starts[i] >> t.beta) & 1:
                break
        if not ok:
            return False

    inner = 0
    for e in ends[:-1]:
        inner |= e
    need = space.type3_mask(b)
    return need & ~inner == 0


def cure_positions(space: MosaicSpace, m: Sequence[int], seq: Sequence[Sequence[int]]) -> dict:
    """Map each defect of ``m`` to the 1-based position witnessing its cure.

    Keys are ("U"|"S"|"3", formula index); defects without a witness are
    absent.  Type 1/2 defects are cured only through clause 1.2 / 2.2.
    """
    n = len(seq)
    rep = space.defects(m)
    out: dict = {}
    for t in space.untils:
        if t.idx not in rep.type1:
            continue
        for i in range(n - 1):
            if not (seq[i][1] >> t.beta) & 1:
                break
            if (seq[i][2] >> t.alpha) & 1:
                out[("U", t.idx)] = i + 1
                break
            if not (seq[i][2] >> t.beta) & 1:
                break
    for t in space.sinces:
        if t.idx not in rep.type2:
            continue
        for i in range(n - 1, 0, -1):
            if not (seq[i][1] >> t.beta) & 1:
                break
            if (seq[i][0] >> t.alpha) & 1:
                out[("S", t.idx)] = i + 1
                break
            if not (seq[i][0] >> t.beta) & 1:
                break
    for beta in rep.type3:
        for i in range(n - 1):
            if (seq[i][2] >> beta) & 1:
                out[("3", beta)] = i + 1
                break
    return out


def sorted_mosaics(ms: Iterable[Mosaic]) -> list[Mosaic]:
    return sorted(ms)
