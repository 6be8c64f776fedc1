"""Lead, trail and shuffle decompositions.

Two layers live here.  The *check* functions implement the definitions
literally and are what certificates are verified against.  The *search*
functions find witnesses; they rely on a few structural facts which the
test-suite cross-checks by brute force on small closures:

* In a lead ``<m> + sigma`` (sigma a cycle at ``end(m)``) the cover of ``m``
  is exactly the intersection of ``end(m)`` with the ends of sigma, every
  sigma mosaic contains the cover in its start, cover and end, U-defects of
  ``m`` reduce to a test on B and C, and S-defects need a witness that is
  still "alive" at the tail of sigma.  Trails are the mirror image.
* In a shuffle, the forward K property pins down the U-part of every P_i,
  of A and of each last end of a lambda; the backward K property pins down
  the S-part likewise.  With (A, B, C) fixed, the best spec uses every
  eligible P and every eligible lambda, so existence is plain reachability.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .mosaic import Mosaic, MosaicSpace, compose_seq, is_composing, is_full_decomposition


# ---------------------------------------------------------------- K(m)


def u_part(space: MosaicSpace, b: int, c: int) -> int:
    """The U-formulas a set satisfying forward K((_, b, c)) must contain."""
    out = 0
    for t in space.untils:
        if (b >> t.beta) & 1 and (
            not (b >> t.sim_alpha) & 1
            or (c >> t.alpha) & 1
            or ((c >> t.beta) & 1 and (c >> t.idx) & 1)
        ):
            out |= 1 << t.idx
    return out


def s_part(space: MosaicSpace, b: int, a: int) -> int:
    out = 0
    for t in space.sinces:
        if (b >> t.beta) & 1 and (
            not (b >> t.sim_alpha) & 1
            or (a >> t.alpha) & 1
            or ((a >> t.beta) & 1 and (a >> t.idx) & 1)
        ):
            out |= 1 << t.idx
    return out


def forward_K(space: MosaicSpace, m: Sequence[int], q: int) -> bool:
    return q & space.until_mask == u_part(space, m[1], m[2])


def backward_K(space: MosaicSpace, m: Sequence[int], q: int) -> bool:
    return q & space.since_mask == s_part(space, m[1], m[0])


# ---------------------------------------------------------------- shuffles


@dataclass(frozen=True)
class ShuffleSpec:
    ps: tuple[int, ...]
    lambdas: tuple[tuple[Mosaic, ...], ...] = ()

    @property
    def s(self) -> int:
        return len(self.ps) - 1

    @property
    def r(self) -> int:
        return len(self.lambdas)

    def well_formed(self) -> bool:
        return bool(self.ps) and all(lam and is_composing(lam) for lam in self.lambdas)


@dataclass(frozen=True)
class ShuffleExpansion:
    m_prime: Mosaic
    m_dblprime: Mosaic
    ys: tuple[Mosaic, ...]
    xs: tuple[Mosaic, ...]
    lambda_flat: tuple[Mosaic, ...]
    mu: tuple[Mosaic, ...]


def expand_shuffle(m: Sequence[int], spec: ShuffleSpec) -> ShuffleExpansion:
    a, b, c = m
    ps = spec.ps
    s = len(ps) - 1
    ys = tuple(Mosaic(ps[i], b, ps[i + 1]) for i in range(s)) + (Mosaic(ps[s], b, ps[0]),)
    xs: tuple[Mosaic, ...] = ()
    flat: list[Mosaic] = []
    lams = spec.lambdas
    if lams:
        firsts = [lam[0][0] for lam in lams]
        lasts = [lam[-1][2] for lam in lams]
        r = len(lams)
        xs = (
            (Mosaic(ps[0], b, firsts[0]),)
            + tuple(Mosaic(lasts[i - 1], b, firsts[i]) for i in range(1, r))
            + (Mosaic(lasts[r - 1], b, ps[0]),)
        )
        flat.append(xs[0])
        for i, lam in enumerate(lams):
            flat.extend(Mosaic(*x) for x in lam)
            flat.append(xs[i + 1])
    return ShuffleExpansion(
        m_prime=Mosaic(a, b, ps[0]),
        m_dblprime=Mosaic(ps[0], b, c),
        ys=ys,
        xs=xs,
        lambda_flat=tuple(flat),
        mu=ys,
    )


def check_shuffle_definitional(space: MosaicSpace, m: Sequence[int], spec: ShuffleSpec) -> bool:
    """F1-F6 over the expansion, each via ``is_full_decomposition``."""
    if not spec.well_formed():
        return False
    ex = expand_shuffle(m, spec)
    for piece in (ex.m_prime, ex.m_dblprime) + ex.ys + ex.xs:
        if not space.is_mosaic(piece):
            return False
    lam, mu, xs, ys = list(ex.lambda_flat), list(ex.mu), ex.xs, ex.ys
    full = is_full_decomposition
    if not full(space, m, [ex.m_prime] + lam + mu + [ex.m_dblprime]):
        return False
    r, s = spec.r, spec.s
    if r > 0:
        if not full(space, xs[0], lam + mu + [xs[0]]):
            return False
        # lambda_flat = x_0, lam_1..., x_1, ..., lam_r..., x_r; locate each x_i
        pos = [0]
        for lam_i in spec.lambdas:
            pos.append(pos[-1] + len(lam_i) + 1)
        for i in range(1, r):
            seq = lam[pos[i]:] + mu + lam[: pos[i] + 1]
            if not full(space, xs[i], seq):
                return False
        if not full(space, xs[r], [xs[r]] + mu + lam):
            return False
    for i in range(s):
        if not full(space, ys[i], list(ys[i:]) + lam + list(ys[: i + 1])):
            return False
    return full(space, ys[s], [ys[s]] + lam + mu)


def check_shuffle_conditions(space: MosaicSpace, m: Sequence[int], spec: ShuffleSpec) -> bool:
    """The seven-condition characterization S0-S6."""
    if not spec.well_formed():
        return False
    a, b, c = m
    u = u_part(space, b, c)
    s = s_part(space, b, a)
    um, sm = space.until_mask, space.since_mask
    seen = 0
    for p in spec.ps:  # S0, S1
        if b & ~p or p & um != u or p & sm != s:
            return False
        seen |= p
    for lam in spec.lambdas:
        for x in lam:  # S0
            if b & ~x[0] or b & ~x[1] or b & ~x[2]:
                return False
            seen |= x[0] | x[2]
        if lam[0][0] & sm != s or lam[-1][2] & um != u:  # S2, S3
            return False
    if a & um != u or c & sm != s:  # S4, S5
        return False
    return space.type3_mask(b) & ~seen == 0  # S6


# ---------------------------------------------------------------- base graph


class BaseGraph:
    """Mosaics indexed by start for path searches; iteration order is sorted."""

    def __init__(self, mosaics: Iterable[Sequence[int]]):
        self.mosaics = sorted({Mosaic(*m) for m in mosaics})
        out: dict[int, list[Mosaic]] = {}
        for m in self.mosaics:
            out.setdefault(m.start, []).append(m)
        self.out = out

    def __len__(self) -> int:
        return len(self.mosaics)

    def edges_from(self, x: int, b: int = 0) -> Iterator[Mosaic]:
        for e in self.out.get(x, ()):
            if b & ~(e.start & e.cover & e.end) == 0:
                yield e


class _Masks:
    """Per-mosaic bit masks over the U/S lists, cached by triple."""

    def __init__(self, space: MosaicSpace):
        self.space = space
        self._lead: dict[Mosaic, tuple[int, int]] = {}
        self._trail: dict[Mosaic, tuple[int, int, int]] = {}

    def lead(self, e: Mosaic) -> tuple[int, int]:
        got = self._lead.get(e)
        if got is None:
            keep = spawn = 0
            for k, t in enumerate(self.space.sinces):
                if (e.cover >> t.beta) & 1:
                    if (e.start >> t.beta) & 1:
                        keep |= 1 << k
                    if (e.start >> t.alpha) & 1:
                        spawn |= 1 << k
            got = self._lead[e] = (keep, spawn)
        return got

    def trail(self, e: Mosaic) -> tuple[int, int, int]:
        got = self._trail.get(e)
        if got is None:
            cov = alpha_end = beta_end = 0
            for k, t in enumerate(self.space.untils):
                if (e.cover >> t.beta) & 1:
                    cov |= 1 << k
                if (e.end >> t.alpha) & 1:
                    alpha_end |= 1 << k
                if (e.end >> t.beta) & 1:
                    beta_end |= 1 << k
            got = self._trail[e] = (cov, alpha_end, beta_end)
        return got


def _walk(parents: dict, key) -> tuple[Mosaic, ...]:
    seq = []
    while True:
        prev, e = parents[key]
        if e is None:
            break
        seq.append(e)
        key = prev
    return tuple(reversed(seq))


@dataclass
class CycleResult:
    """Outcomes of a cycle search at ``anchor``: one entry per distinct
    (cover, tag) pair, with the sigma reaching it."""

    anchor: int
    found: dict[tuple[int, int], tuple[Mosaic, ...]] = field(default_factory=dict)
    states: int = 0


def lead_cycles(space: MosaicSpace, graph: BaseGraph, c: int, b: Optional[int] = None,
                need: int = 0, masks: Optional[_Masks] = None) -> CycleResult:
    """Breadth-first search over cycles sigma at ``c``.

    State: (node, X, bad, alive) where X is the intersection of c with the
    ends so far, ``bad`` the part of X missing from some cover, and ``alive``
    the S-formulas (bit k = k-th S) with a live tail witness.  A closed
    cycle yields cover X when ``bad`` is empty.  With ``b`` given only
    mosaics containing ``b`` are used and only cover ``b`` is reported.
    """
    masks = masks or _Masks(space)
    must = need | (b or 0)
    res = CycleResult(c)
    if must & ~c:
        return res
    init = (c, c, 0, 0, 0)
    parents: dict = {init: (None, None)}
    queue = deque([init])
    while queue:
        key = queue.popleft()
        x, inter, bad, alive, _ = key
        for e in graph.edges_from(x, must):
            inter2 = inter & e.end
            if must & ~inter2:
                continue
            bad2 = inter2 & (bad | ~e.cover)
            keep, spawn = masks.lead(e)
            alive2 = (alive & keep) | spawn
            nkey = (e.end, inter2, bad2, alive2, 1)
            if nkey in parents:
                continue
            parents[nkey] = (key, e)
            queue.append(nkey)
            if e.end == c and bad2 == 0 and (b is None or inter2 == b):
                res.found.setdefault((inter2, alive2), _walk(parents, nkey))
    res.states = len(parents)
    return res


def trail_cycles(space: MosaicSpace, graph: BaseGraph, a: int, b: Optional[int] = None,
                 need: int = 0, masks: Optional[_Masks] = None) -> CycleResult:
    """Mirror of ``lead_cycles``: cycles at ``a`` tracking U-formulas
    witnessed from the head of sigma (``wit``) and those whose hold formula
    has been maintained so far (``open``)."""
    masks = masks or _Masks(space)
    must = need | (b or 0)
    res = CycleResult(a)
    if must & ~a:
        return res
    all_u = (1 << len(space.untils)) - 1
    init = (a, a, 0, all_u, 0, 0)
    parents: dict = {init: (None, None)}
    queue = deque([init])
    while queue:
        key = queue.popleft()
        x, inter, bad, opened, wit, _ = key
        for e in graph.edges_from(x, must):
            inter2 = inter & e.end
            if must & ~inter2:
                continue
            bad2 = inter2 & (bad | ~e.cover)
            cov, alpha_end, beta_end = masks.trail(e)
            o1 = opened & cov
            wit2 = wit | (o1 & alpha_end)
            o2 = o1 & beta_end
            nkey = (e.end, inter2, bad2, o2, wit2, 1)
            if nkey in parents:
                continue
            parents[nkey] = (key, e)
            queue.append(nkey)
            if e.end == a and bad2 == 0 and (b is None or inter2 == b):
                res.found.setdefault((inter2, wit2), _walk(parents, nkey))
    res.states = len(parents)
    return res


def lead_accepts(space: MosaicSpace, a: int, b: int, c: int, alive: int) -> bool:
    """Does sigma with tail-alive set ``alive`` make ``<(a,b,c)> + sigma`` full,
    given that sigma's ends intersect with c to exactly b?"""
    for t in space.untils:
        if (a >> t.idx) & 1 and not (
            (b >> t.beta) & 1 and (
                not (b >> t.sim_alpha) & 1 or (c >> t.alpha) & 1
                or ((c >> t.beta) & 1 and (c >> t.idx) & 1)
            )
        ):
            return False
    for k, t in enumerate(space.sinces):
        if (c >> t.idx) & 1 and not (alive >> k) & 1 and not (
            (b >> t.beta) & 1 and ((a >> t.alpha) & 1 or ((a >> t.beta) & 1 and (a >> t.idx) & 1))
        ):
            return False
    return True


def trail_accepts(space: MosaicSpace, a: int, b: int, c: int, wit: int) -> bool:
    for k, t in enumerate(space.untils):
        if (a >> t.idx) & 1 and not (wit >> k) & 1 and not (
            (b >> t.beta) & 1 and ((c >> t.alpha) & 1 or ((c >> t.beta) & 1 and (c >> t.idx) & 1))
        ):
            return False
    for t in space.sinces:
        if (c >> t.idx) & 1 and not (
            (b >> t.beta) & 1 and (
                not (b >> t.sim_alpha) & 1 or (a >> t.alpha) & 1
                or ((a >> t.beta) & 1 and (a >> t.idx) & 1)
            )
        ):
            return False
    return True


def exists_lead(space: MosaicSpace, m: Sequence[int], base: Iterable[Sequence[int]] | BaseGraph
                ) -> Optional[tuple[Mosaic, ...]]:
    a, b, c = m
    if not space.is_mosaic(m) or b & ~c:
        return None
    graph = base if isinstance(base, BaseGraph) else BaseGraph(base)
    res = lead_cycles(space, graph, c, b=b)
    best = None
    for (_, alive), sigma in res.found.items():
        if lead_accepts(space, a, b, c, alive) and (best is None or (len(sigma), sigma) < (len(best), best)):
            best = sigma
    return best


def exists_trail(space: MosaicSpace, m: Sequence[int], base: Iterable[Sequence[int]] | BaseGraph
                 ) -> Optional[tuple[Mosaic, ...]]:
    a, b, c = m
    if not space.is_mosaic(m) or b & ~a:
        return None
    graph = base if isinstance(base, BaseGraph) else BaseGraph(base)
    res = trail_cycles(space, graph, a, b=b)
    best = None
    for (_, wit), sigma in res.found.items():
        if trail_accepts(space, a, b, c, wit) and (best is None or (len(sigma), sigma) < (len(best), best)):
            best = sigma
    return best


# ---------------------------------------------------------------- shuffle search


class CoverView:
    """Everything about a base graph that a shuffle with cover ``b`` can use."""

    def __init__(self, space: MosaicSpace, graph: BaseGraph, b: int, nodes: Iterable[int]):
        self.space = space
        self.b = b
        self.nodes = [p for p in nodes if b & ~p == 0]
        edge: dict[tuple[int, int], Mosaic] = {}
        for m in graph.mosaics:
            if b & ~(m.start & m.cover & m.end) == 0:
                edge.setdefault((m.start, m.end), m)
        self.edge = edge
        succ: dict[int, list[int]] = {}
        pred: dict[int, list[int]] = {}
        for (x, y) in edge:
            succ.setdefault(x, []).append(y)
            pred.setdefault(y, []).append(x)
        self.succ, self.pred = succ, pred
        self._cache: dict[tuple[int, int], Optional[dict]] = {}

    def _bfs(self, roots: list[int], adj: dict[int, list[int]]) -> dict[int, Optional[int]]:
        par: dict[int, Optional[int]] = {x: None for x in roots}
        queue = deque(roots)
        while queue:
            x = queue.popleft()
            for y in adj.get(x, ()):
                if y not in par:
                    par[y] = x
                    queue.append(y)
        return par

    def summary(self, u: int, s: int) -> Optional[dict]:
        """Eligible P's and lambda boundaries for K-parts (u, s), or None
        when no P is eligible."""
        key = (u, s)
        if key in self._cache:
            return self._cache[key]
        sp = self.space
        um, sm = sp.until_mask, sp.since_mask
        ps = [p for p in self.nodes if p & um == u and p & sm == s]
        out: Optional[dict] = None
        if ps:
            verts = set(self.succ) | set(self.pred)
            srcs = sorted(x for x in verts if x & sm == s)
            tgts = sorted(x for x in verts if x & um == u)
            fwd = self._bfs(srcs, self.succ)
            bwd = self._bfs(tgts, self.pred)
            bound: dict[int, tuple[int, int]] = {}
            for (x, y) in sorted(self.edge):
                if x in fwd and y in bwd:
                    bound.setdefault(x, (x, y))
                    bound.setdefault(y, (x, y))
            seen = 0
            for p in ps:
                seen |= p
            for x in bound:
                seen |= x
            out = {"ps": ps, "bound": bound, "fwd": fwd, "bwd": bwd, "seen": seen}
        self._cache[key] = out
        return out

    def feasible(self, u: int, s: int) -> bool:
        summ = self.summary(u, s)
        return summ is not None and self.space.type3_mask(self.b) & ~summ["seen"] == 0

    def lambda_through(self, summ: dict, x: int) -> tuple[Mosaic, ...]:
        a, b = summ["bound"][x]
        head = []
        y = a
        while y is not None:
            head.append(y)
            y = summ["fwd"][y]
        head.reverse()
        tail = []
        y = b
        while y is not None:
            tail.append(y)
            y = summ["bwd"][y]
        path = head + tail
        return tuple(self.edge[(path[i], path[i + 1])] for i in range(len(path) - 1))

    def witness(self, u: int, s: int) -> Optional[ShuffleSpec]:
        """Greedy cover of the type-3 set: P's first, then lambdas."""
        if not self.feasible(u, s):
            return None
        summ = self.summary(u, s)
        need = self.space.type3_mask(self.b)
        items = [(0, p) for p in summ["ps"]] + [(1, x) for x in sorted(summ["bound"])]
        chosen_p: list[int] = []
        chosen_l: list[int] = []
        while need:
            best = max(items, key=lambda it: (bin(it[1] & need).count("1"), -it[0], -it[1]))
            if best[1] & need == 0:
                return None
            (chosen_p if best[0] == 0 else chosen_l).append(best[1])
            need &= ~best[1]
        if not chosen_p:
            chosen_p.append(summ["ps"][0])
        lambdas = tuple(self.lambda_through(summ, x) for x in chosen_l)
        return ShuffleSpec(tuple(chosen_p), lambdas)


def exists_shuffle(space: MosaicSpace, m: Sequence[int], base: Iterable[Sequence[int]] | BaseGraph
                   ) -> Optional[ShuffleSpec]:
    a, b, c = m
    if not space.is_mosaic(m):
        return None
    u, s = u_part(space, b, c), s_part(space, b, a)
    if a & space.until_mask != u or c & space.since_mask != s:
        return None
    graph = base if isinstance(base, BaseGraph) else BaseGraph(base)
    view = CoverView(space, graph, b, space.mpcs)
    return view.witness(u, s)


def shuffle_sequence_length(spec: ShuffleSpec) -> int:
    return sum(len(lam) for lam in spec.lambdas)


def composed_lambdas(spec: ShuffleSpec) -> list[Mosaic]:
    return [compose_seq(lam) for lam in spec.lambdas]
