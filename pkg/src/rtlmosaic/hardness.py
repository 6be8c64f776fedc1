"""Encoding space-bounded deterministic Turing machine runs as formulas.

A machine run is laid out on tick points 0, 1, 2, ...  Every (S+1)-th tick
carries ``star`` and a binary counter r1..rB; the S ticks between two stars
hold one tape configuration.  The encoder builds the fifteen conjuncts,
``canonical_run`` builds the intended model as an ultimately periodic word.

Atom names: ``tick``, ``star``, ``r1``..``rB``, ``c_<a>`` for tape symbol a
and ``h_<q>_<a>`` for the head in state q over a.  The blank ``#`` is spelled
``blank`` inside atom names.

Machine text format (``//`` starts a comment)::

    states: q0 qa
    alphabet: #
    initial: q0
    accept: qa
    reject:
    space: 2
    time: 1
    input:
    q0 # -> qa # R
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .formula import And, Atom, Formula, Globally, Iff, Implies, Not, Since, TrueF, Until, subformulas
from .oracle import IntervalWord

BLANK = "#"
_NAME_RE = re.compile(r"[a-z0-9]+")


class MachineError(ValueError):
    """The machine description is malformed or violates an encoder precondition."""


class ResourceExceeded(RuntimeError):
    """The run leaves the tape or does not halt within the time bound."""


@dataclass
class TmSpec:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    delta: dict[tuple[str, str], tuple[str, str, str]]
    initial: str
    accept: frozenset[str] = frozenset()
    reject: frozenset[str] = frozenset()
    space: int = 1
    time: int = 1
    input: tuple[str, ...] = ()

    def halting(self, q: str) -> bool:
        return q in self.accept or q in self.reject

    def tape(self) -> list[str]:
        return list(self.input) + [BLANK] * (self.space - len(self.input))

    def validate(self) -> None:
        if BLANK not in self.alphabet:
            raise MachineError("the alphabet must contain the blank #")
        for name in self.states:
            if not _NAME_RE.fullmatch(name):
                raise MachineError(f"bad state name {name!r} (use [a-z0-9]+)")
        for a in self.alphabet:
            if a != BLANK and not _NAME_RE.fullmatch(a):
                raise MachineError(f"bad symbol {a!r} (use [a-z0-9]+ or #)")
        if len(set(self.states)) != len(self.states) or len(set(self.alphabet)) != len(self.alphabet):
            raise MachineError("duplicate state or symbol")
        known = set(self.states)
        if self.initial not in known:
            raise MachineError(f"unknown initial state {self.initial!r}")
        for q in self.accept | self.reject:
            if q not in known:
                raise MachineError(f"unknown halting state {q!r}")
        if self.accept & self.reject:
            raise MachineError("accepting and rejecting states overlap")
        if self.space < 2 or self.time < 1:
            raise MachineError("need space >= 2 and time >= 1")
        if len(self.input) > self.space:
            raise MachineError("input longer than the space bound")
        for a in self.input:
            if a not in self.alphabet:
                raise MachineError(f"input symbol {a!r} not in the alphabet")
        for (q, a), (q2, b, d) in self.delta.items():
            if q not in known or q2 not in known or a not in self.alphabet or b not in self.alphabet:
                raise MachineError(f"transition {q} {a} mentions an unknown state or symbol")
            if d not in ("L", "R"):
                raise MachineError(f"transition {q} {a}: direction must be L or R")
            for group in (self.accept, self.reject):
                if q in group and q2 not in group:
                    raise MachineError(f"transition {q} {a} leaves a halting state class")
        first = self.delta.get((self.initial, self.tape()[0]))
        if first is None or first[2] != "R":
            raise MachineError("the first move must be to the right")
        # totality: every state reachable from q0 must handle every symbol
        seen = {(self.initial, a) for a in self.alphabet}
        todo = list(seen)
        while todo:
            q, a = todo.pop()
            if (q, a) not in self.delta:
                if not self.halting(q):
                    raise MachineError(f"no transition for reachable pair ({q}, {a})")
                continue
            q2 = self.delta[(q, a)][0]
            for c in self.alphabet:
                if (q2, c) not in seen:
                    seen.add((q2, c))
                    todo.append((q2, c))


# ---------------------------------------------------------------- text format


_KEYS = ("states", "alphabet", "initial", "accept", "reject", "space", "time", "input")


def parse_tm(text: str) -> TmSpec:
    fields: dict[str, list[str]] = {}
    delta: dict[tuple[str, str], tuple[str, str, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            lhs, rhs = (part.split() for part in line.split("->", 1))
            if len(lhs) != 2 or len(rhs) != 3:
                raise MachineError(f"line {lineno}: expected 'q a -> q2 b L|R'")
            if tuple(lhs) in delta:
                raise MachineError(f"line {lineno}: second transition for {lhs[0]} {lhs[1]}")
            delta[(lhs[0], lhs[1])] = (rhs[0], rhs[1], rhs[2])
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in _KEYS:
            raise MachineError(f"line {lineno}: unrecognised line {raw.strip()!r}")
        if key in fields:
            raise MachineError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = value.split()
    for key in ("states", "alphabet", "initial", "space", "time"):
        if key not in fields:
            raise MachineError(f"missing key {key!r}")

    def number(key: str) -> int:
        vals = fields[key]
        if len(vals) != 1 or not vals[0].isdigit():
            raise MachineError(f"{key} must be a single nonnegative integer")
        return int(vals[0])

    if len(fields["initial"]) != 1:
        raise MachineError("initial must name one state")
    spec = TmSpec(
        states=tuple(fields["states"]),
        alphabet=tuple(fields["alphabet"]),
        delta=delta,
        initial=fields["initial"][0],
        accept=frozenset(fields.get("accept", [])),
        reject=frozenset(fields.get("reject", [])),
        space=number("space"),
        time=number("time"),
        input=tuple(fields.get("input", [])),
    )
    spec.validate()
    return spec


def format_tm(spec: TmSpec) -> str:
    lines = [
        "states: " + " ".join(spec.states),
        "alphabet: " + " ".join(spec.alphabet),
        f"initial: {spec.initial}",
        "accept: " + " ".join(sorted(spec.accept)),
        "reject: " + " ".join(sorted(spec.reject)),
        f"space: {spec.space}",
        f"time: {spec.time}",
        "input: " + " ".join(spec.input),
    ]
    lines += [f"{q} {a} -> {q2} {b} {d}" for (q, a), (q2, b, d) in sorted(spec.delta.items())]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- atoms


TICK = Atom("tick")
STAR = Atom("star")


def _spell(a: str) -> str:
    return "blank" if a == BLANK else a


def sym_atom(a: str) -> Atom:
    return Atom(f"c_{_spell(a)}")


def head_atom(q: str, a: str) -> Atom:
    return Atom(f"h_{q}_{_spell(a)}")


def counter_atom(i: int) -> Atom:
    return Atom(f"r{i}")


# ---------------------------------------------------------------- encoding


TOP = TrueF()


def conj(items: Iterable[Formula]) -> Formula:
    out: Optional[Formula] = None
    for f in items:
        out = f if out is None else And(out, f)
    return TOP if out is None else out


def nxt(f: Formula, times: int = 1) -> Formula:
    """X f = U(tick & f, !tick), iterated."""
    for _ in range(times):
        f = Until(And(TICK, f), Not(TICK))
    return f


def encode_parts(spec: TmSpec) -> list[Formula]:
    """The conjuncts phi_1 .. phi_15, in order."""
    spec.validate()
    S, B = spec.space, spec.time
    sigma = spec.alphabet
    gap = S + 1
    tape = spec.tape()
    rs = [counter_atom(i) for i in range(1, B + 1)]
    heads = [head_atom(q, a) for q in spec.states for a in sigma]
    config = [STAR] + [sym_atom(a) for a in sigma] + heads

    phi1 = conj([TICK, Not(Since(TICK, TOP)), Globally(Implies(TICK, nxt(TOP)))])
    phi2 = conj([STAR, nxt(STAR, gap), Globally(Implies(STAR, nxt(STAR, gap)))])
    excl = conj(
        [Not(And(x, y)) for i, x in enumerate(config) for y in config[i + 1:]]
        + [Implies(x, TICK) for x in config]
    )
    phi3 = And(excl, Globally(excl))

    beta: Formula = TOP
    for k in range(S, 1, -1):
        beta = nxt(And(sym_atom(tape[k - 1]), beta))
    phi4 = nxt(And(head_atom(spec.initial, tape[0]), beta))

    q1, a1, _ = spec.delta[(spec.initial, tape[0])]
    phi5 = nxt(And(sym_atom(a1), nxt(head_atom(q1, tape[1]))), S + 2)

    def rule(pre: Formula, post: Formula) -> Formula:
        return Globally(Implies(pre, nxt(post, gap)))

    def chain(x: Formula, y: Formula, z: Formula) -> Formula:
        return And(x, nxt(And(y, nxt(z))))

    sy = sym_atom
    moves = sorted(spec.delta.items())
    phi6, phi7, phi8, phi9 = [], [], [], []
    for (q, a), (q2, a2, d) in moves:
        for b in sigma:
            if d == "R":
                phi6.append(rule(chain(STAR, head_atom(q, a), sy(b)), chain(STAR, sy(a2), head_atom(q2, b))))
            else:
                phi9.append(rule(chain(sy(b), head_atom(q, a), STAR), chain(head_atom(q2, b), sy(a2), STAR)))
            for c in sigma:
                if d == "R":
                    phi8.append(rule(chain(sy(b), head_atom(q, a), sy(c)), chain(sy(b), sy(a2), head_atom(q2, c))))
                else:
                    phi7.append(rule(chain(sy(b), head_atom(q, a), sy(c)), chain(head_atom(q2, b), sy(a2), sy(c))))
    phi10 = [rule(chain(sy(a), sy(b), sy(c)), nxt(sy(b))) for a in sigma for b in sigma for c in sigma]
    phi11 = [rule(chain(STAR, sy(b), sy(c)), nxt(sy(b))) for b in sigma for c in sigma]
    phi12 = [rule(chain(sy(a), sy(b), STAR), nxt(sy(b))) for a in sigma for b in sigma]

    phi13 = nxt(conj([rs[0]] + [Not(r) for r in rs[1:]]), gap)
    steps = []
    for i in range(B):
        low = rs[:i]
        pre = conj([STAR] + low + [Not(rs[i])])
        post = conj(
            [nxt(conj([Not(r) for r in low] + [rs[i]]), gap)]
            + [Iff(rs[j], nxt(rs[j], gap)) for j in range(i + 1, B)]
        )
        steps.append(Implies(pre, post))
    phi14 = Globally(conj(steps))
    losing = [head_atom(q, a) for q in spec.states if q not in spec.accept for a in sigma]
    phi15 = Globally(
        Implies(conj([STAR] + [Not(r) for r in rs] + [Since(STAR, TOP)]),
                Globally(conj(Not(h) for h in losing)))
    )
    return [phi1, phi2, phi3, phi4, phi5, conj(phi6), conj(phi7), conj(phi8), conj(phi9),
            conj(phi10), conj(phi11), conj(phi12), phi13, phi14, phi15]


def encode_tm(spec: TmSpec) -> Formula:
    return conj(encode_parts(spec))


def formula_size(f: Formula) -> int:
    """Number of distinct subformulas (the size of the formula as a DAG)."""
    return sum(1 for _ in subformulas(f))


# ---------------------------------------------------------------- the intended model


@dataclass
class Run:
    configs: list[tuple[list[str], int, str]] = field(default_factory=list)
    halted_at: int = 0
    accepted: bool = False


def simulate(spec: TmSpec) -> Run:
    """Configurations (tape, head cell, state) until the first halting state."""
    spec.validate()
    tape, pos, q = spec.tape(), 0, spec.initial
    run = Run()
    limit = 2 ** spec.time
    for step in range(limit + 1):
        run.configs.append((list(tape), pos, q))
        if spec.halting(q):
            run.halted_at = step
            run.accepted = q in spec.accept
            return run
        q, tape[pos], d = spec.delta[(q, tape[pos])]
        pos += 1 if d == "R" else -1
        if not 0 <= pos < spec.space:
            raise ResourceExceeded(f"head leaves the {spec.space} tape cells at step {step + 1}")
    raise ResourceExceeded(f"no halting state within {limit} steps")


def canonical_run(spec: TmSpec) -> IntervalWord:
    """The intended model of ``encode_tm(spec)``; tick 0 is point x_1.

    Block k (ticks k(S+1) .. k(S+1)+S) holds star, the counter value k mod
    2^B and the configuration after k steps; once halted the configuration
    is frozen.  The loop is 2^B blocks starting at the first multiple of 2^B
    at or after the halting step.
    """
    run = simulate(spec)
    period = 2 ** spec.time
    start = -(-run.halted_at // period) * period
    rs = [counter_atom(i).name for i in range(1, spec.time + 1)]

    def block(k: int) -> list[frozenset[str]]:
        tape, pos, q = run.configs[min(k, run.halted_at)]
        value = k % period
        first = {TICK.name, STAR.name} | {r for i, r in enumerate(rs) if value >> i & 1}
        cells = [
            {TICK.name, head_atom(q, a).name if i == pos else sym_atom(a).name}
            for i, a in enumerate(tape)
        ]
        out = []
        for label in [first] + cells:
            out += [frozenset(label), frozenset()]
        return out

    prefix: list[frozenset[str]] = [frozenset()]
    for k in range(start):
        prefix += block(k)
    loop: list[frozenset[str]] = []
    for k in range(start, start + period):
        loop += block(k)
    return IntervalWord(tuple(prefix), tuple(loop))
