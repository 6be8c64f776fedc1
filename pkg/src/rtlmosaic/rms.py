"""Level fixpoint over the mosaic universe and the top-level decisions.

Tags form the chain 0 < 0+ < 1- < 1 < 1+ < 2- < 2 < ...; tag index ``3n`` is
level n, ``3n+1`` is n+ and ``3n+2`` is (n+1)-.  Each stage adds tactic
witnesses over the previous tag set and closes under composition.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .formula import Formula, Not, desugar, parse, to_text
from .mosaic import Mosaic, MosaicSpace, compose
from .relativize import DecisionContext, RelativizedSpace
from .tactics import (
    BaseGraph,
    CoverView,
    ShuffleSpec,
    _Masks,
    lead_accepts,
    lead_cycles,
    s_part,
    trail_accepts,
    trail_cycles,
    u_part,
)

# ---------------------------------------------------------------- tags


def tag_name(t: int) -> str:
    n, k = divmod(t, 3)
    return (str(n), f"{n}+", f"{n + 1}-")[k]


def parse_tag(text: str) -> int:
    text = text.strip()
    if text.endswith("+"):
        return 3 * int(text[:-1]) + 1
    if text.endswith("-"):
        n = int(text[:-1])
        if n < 1:
            raise ValueError(f"no tag {text!r}")
        return 3 * n - 1
    return 3 * int(text)


def tag_kind(t: int) -> str:
    """'level' for n, 'plus' for n+, 'minus' for (n+1)-."""
    return ("level", "plus", "minus")[t % 3]


def tag_level(t: int) -> int:
    """The least full level whose member set contains tag ``t``'s members."""
    return -(-t // 3)


# ---------------------------------------------------------------- ledger


@dataclass(frozen=True)
class Justification:
    kind: str  # shuffle | lead | trail | composition
    payload: Union[ShuffleSpec, tuple[Mosaic, ...]]


@dataclass
class LevelLedger:
    tags: dict[Mosaic, int] = field(default_factory=dict)
    witnesses: dict[Mosaic, Justification] = field(default_factory=dict)
    depth_bound: int = 0
    last_tag: int = -1
    saturated: bool = False
    complete: bool = True
    sizes: list[int] = field(default_factory=list)

    def members(self, tag: int) -> set[Mosaic]:
        return {m for m, t in self.tags.items() if t <= tag}

    def tag_of(self, m: Sequence[int]) -> Optional[int]:
        return self.tags.get(Mosaic(*m))

    def generators(self, upto: int) -> list[Mosaic]:
        return [m for m, t in self.tags.items()
                if t <= upto and self.witnesses[m].kind != "composition"]


# ---------------------------------------------------------------- universe


@dataclass
class Universe:
    """Which mosaics the fixpoint tracks.

    ``need`` must lie in every cover; ``nodes`` are the MPCs allowed as
    interior boundaries; ``starts``/``ends`` the MPCs allowed at the ends.
    """

    need: int
    nodes: tuple[int, ...]
    starts: tuple[int, ...]
    ends: tuple[int, ...]

    @classmethod
    def full(cls, space: MosaicSpace) -> "Universe":
        return cls(0, space.mpcs, space.mpcs, space.mpcs)

    @classmethod
    def relativized(cls, space: RelativizedSpace) -> "Universe":
        q = 1 << space.q_idx
        nodes = tuple(p for p in space.mpcs if p & q)
        starts = tuple(sorted(set(nodes) | {p for p in space.mpcs if space.relativized_start(p)}))
        ends = tuple(sorted(set(nodes) | {p for p in space.mpcs if space.relativized_end(p)}))
        return cls(q, nodes, starts, ends)

    def __post_init__(self):
        self._starts = frozenset(self.starts)
        self._ends = frozenset(self.ends)

    def admits(self, m: Sequence[int]) -> bool:
        return self.need & ~m[1] == 0 and m[0] in self._starts and m[2] in self._ends


def intersection_lattice(sets: Iterable[int]) -> list[int]:
    """All intersections of nonempty subfamilies of ``sets``."""
    base = sorted(set(sets))
    out = set(base)
    frontier = list(base)
    while frontier:
        nxt = []
        for x in frontier:
            for s in base:
                y = x & s
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(out)


# ---------------------------------------------------------------- engine


class StopSearch(Exception):
    pass


class RmsEngine:
    def __init__(self, space: MosaicSpace, universe: Optional[Universe] = None,
                 stop: Optional[Callable[[Mosaic], bool]] = None, depth_bound: int = 0):
        self.space = space
        self.universe = universe or Universe.full(space)
        self.stop = stop
        self.ledger = LevelLedger(depth_bound=depth_bound)
        self.found: Optional[Mosaic] = None
        self.masks = _Masks(space)
        self.stats: dict[str, int] = {"cycle_states": 0, "shuffle_checks": 0, "compositions": 0}
        self._covers: Optional[list[int]] = None
        self._groups: dict[int, list] = {}
        self._shuffle_done: set[tuple[int, int, int]] = set()
        self._by_start: dict[int, list[Mosaic]] = {}
        self._by_end: dict[int, list[Mosaic]] = {}

    # ---- bookkeeping

    def _add(self, m: Mosaic, tag: int, just: Justification) -> bool:
        led = self.ledger
        if m in led.tags or not self.universe.admits(m):
            return False
        led.tags[m] = tag
        led.witnesses[m] = just
        self._by_start.setdefault(m.start, []).append(m)
        self._by_end.setdefault(m.end, []).append(m)
        if self.stop is not None and self.found is None and self.stop(m):
            self.found = m
            raise StopSearch
        return True

    def _parts(self, m: Mosaic) -> tuple[Mosaic, ...]:
        w = self.ledger.witnesses[m]
        return w.payload if w.kind == "composition" else (m,)

    def _close(self, fresh: list[Mosaic], tag: int) -> None:
        """Close the ledger under composition, starting from ``fresh``."""
        work = list(fresh)
        while work:
            y = work.pop()
            for x in list(self._by_end.get(y.start, ())):
                z = compose(x, y)
                self.stats["compositions"] += 1
                if z not in self.ledger.tags:
                    if self._add(z, tag, Justification("composition", self._parts(x) + self._parts(y))):
                        work.append(z)
            for x in list(self._by_start.get(y.end, ())):
                z = compose(y, x)
                self.stats["compositions"] += 1
                if z not in self.ledger.tags:
                    if self._add(z, tag, Justification("composition", self._parts(y) + self._parts(x))):
                        work.append(z)

    # ---- tactic candidates

    def covers(self) -> list[int]:
        if self._covers is None:
            self._covers = [b for b in intersection_lattice(self.universe.nodes)
                            if self.universe.need & ~b == 0]
        return self._covers

    def _cover_groups(self, b: int) -> list:
        got = self._groups.get(b)
        if got is None:
            sp = self.space
            um, sm = sp.until_mask, sp.since_mask
            a_groups: dict[tuple[int, int], list[int]] = {}
            for a in self.universe.starts:
                a_groups.setdefault((a & um, s_part(sp, b, a)), []).append(a)
            c_groups: dict[tuple[int, int], list[int]] = {}
            for c in self.universe.ends:
                c_groups.setdefault((u_part(sp, b, c), c & sm), []).append(c)
            got = [(k, a_groups[k], c_groups[k]) for k in sorted(a_groups) if k in c_groups]
            self._groups[b] = got
        return got

    def shuffle_stage(self, tag: int, base: list[Mosaic]) -> list[Mosaic]:
        graph = BaseGraph(base)
        sp = self.space
        new: list[Mosaic] = []
        for b in self.covers():
            groups = [g for g in self._cover_groups(b) if (b,) + g[0] not in self._shuffle_done]
            if not groups:
                continue
            view = CoverView(sp, graph, b, self.universe.nodes)
            for (u, s), alist, clist in groups:
                self.stats["shuffle_checks"] += 1
                if not view.feasible(u, s):
                    continue
                self._shuffle_done.add((b, u, s))
                spec = view.witness(u, s)
                for a in alist:
                    for c in clist:
                        m = Mosaic(a, b, c)
                        if m not in self.ledger.tags and sp.coherency_violation(a, b, c) is None:
                            if self._add(m, tag, Justification("shuffle", spec)):
                                new.append(m)
        return new

    def cycle_stage(self, tag: int, base: list[Mosaic]) -> list[Mosaic]:
        graph = BaseGraph(base)
        sp, uni = self.space, self.universe
        new: list[Mosaic] = []
        anchors = sorted(graph.out)
        for c in anchors:
            if uni.need & ~c or c not in uni._ends:
                continue
            res = lead_cycles(sp, graph, c, need=uni.need, masks=self.masks)
            self.stats["cycle_states"] += res.states
            for (b, alive), sigma in sorted(res.found.items(), key=lambda kv: (len(kv[1]), kv[1])):
                for a in uni.starts:
                    m = Mosaic(a, b, c)
                    if m in self.ledger.tags:
                        continue
                    if sp.coherency_violation(a, b, c) is None and lead_accepts(sp, a, b, c, alive):
                        if self._add(m, tag, Justification("lead", sigma)):
                            new.append(m)
        for a in anchors:
            if uni.need & ~a or a not in uni._starts:
                continue
            res = trail_cycles(sp, graph, a, need=uni.need, masks=self.masks)
            self.stats["cycle_states"] += res.states
            for (b, wit), sigma in sorted(res.found.items(), key=lambda kv: (len(kv[1]), kv[1])):
                for c in uni.ends:
                    m = Mosaic(a, b, c)
                    if m in self.ledger.tags:
                        continue
                    if sp.coherency_violation(a, b, c) is None and trail_accepts(sp, a, b, c, wit):
                        if self._add(m, tag, Justification("trail", sigma)):
                            new.append(m)
        return new

    # ---- driver

    def run_stage(self, tag: int) -> None:
        led = self.ledger
        if tag_kind(tag) == "level":
            base = led.generators(tag - 1) if tag > 0 else []
            fresh = self.shuffle_stage(tag, base)
        else:
            fresh = self.cycle_stage(tag, led.generators(tag - 1))
        self._close(fresh, tag)
        led.last_tag = tag
        led.sizes.append(len(led.tags))

    def run(self, max_level: Optional[int] = None) -> LevelLedger:
        """Iterate full levels until two consecutive ones coincide or the
        level index exceeds ``max_level`` (default: the depth bound)."""
        led = self.ledger
        limit = led.depth_bound if max_level is None else max_level
        try:
            self.run_stage(0)
            n = 0
            while n < limit:
                before = len(led.tags)
                for t in (3 * n + 1, 3 * n + 2, 3 * n + 3):
                    self.run_stage(t)
                n += 1
                if len(led.tags) == before:
                    led.saturated = True
                    break
        except StopSearch:
            led.complete = False
            led.last_tag = max(led.tags.values())
        return led


# ---------------------------------------------------------------- decisions


@dataclass
class Verdict:
    status: str  # SAT | UNSAT | VALID | INVALID
    certificate: Optional[dict] = None
    stats: dict = field(default_factory=dict)
    ledger: Optional[LevelLedger] = field(default=None, repr=False)
    witness: Optional[Mosaic] = None


def rms_membership(ctx: DecisionContext, restrict: bool = True, early_stop: bool = False,
                   depth_bound: Optional[int] = None) -> tuple[RmsEngine, LevelLedger]:
    space = RelativizedSpace(ctx)
    uni = Universe.relativized(space) if restrict else Universe.full(space)
    bound = ctx.depth_bound if depth_bound is None else depth_bound
    eng = RmsEngine(space, uni, stop=space.is_relativized if early_stop else None, depth_bound=bound)
    eng.run()
    return eng, eng.ledger


def _as_formula(f: Union[str, Formula]) -> Formula:
    return parse(f) if isinstance(f, str) else f


def decide_sat(f: Union[str, Formula], restrict: bool = True, early_stop: bool = True,
               depth_bound: Optional[int] = None, certificate: bool = True) -> Verdict:
    from .certificate import build_certificate

    t0 = time.perf_counter()
    source = _as_formula(f)
    ctx = DecisionContext.build(desugar(source))
    eng, led = rms_membership(ctx, restrict=restrict, early_stop=early_stop, depth_bound=depth_bound)
    space = eng.space
    witness = eng.found
    if witness is None:
        cands = sorted((led.tags[m], m) for m in led.tags if space.is_relativized(m))
        witness = cands[0][1] if cands else None
    stats = {
        "closure_size": ctx.table.size,
        "mpcs": len(space.mpcs),
        "N": ctx.N,
        "depth_bound": led.depth_bound,
        "ledger_size": len(led.tags),
        "tag_sizes": {tag_name(i): s for i, s in enumerate(led.sizes)},
        "last_tag": tag_name(led.last_tag) if led.last_tag >= 0 else None,
        "saturated": led.saturated,
        **eng.stats,
    }
    cert = None
    if witness is not None:
        stats["witness_tag"] = tag_name(led.tags[witness])
        if certificate:
            cert = build_certificate(to_text(source), ctx, led, witness)
    stats["seconds"] = round(time.perf_counter() - t0, 3)
    return Verdict("SAT" if witness is not None else "UNSAT", cert, stats, led, witness)


def decide_valid(f: Union[str, Formula], **kw) -> Verdict:
    v = decide_sat(Not(_as_formula(f)), **kw)
    v.status = "INVALID" if v.status == "SAT" else "VALID"
    return v
