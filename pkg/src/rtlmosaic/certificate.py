"""SAT certificates: a level-tagged derivation DAG rooted at a relativized mosaic.

The checker performs no search.  It re-derives the closure from the embedded
formula and then validates every node locally:

* each mosaic is well formed over the closure;
* composition nodes compose to their mosaic, carry the highest tag among
  their parts, and each part is either tagged strictly lower or is a
  same-tag tactic node of the kind the tag allows;
* lead/trail nodes sit at a + or - tag and pass the fullness test with
  every sigma member tagged strictly lower;
* shuffle nodes sit at a full level tag, have a nonempty P list, pass the
  seven shuffle conditions and use only strictly lower lambda members
  (none at level 0);
* the root is relativized and its level does not exceed the depth bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from . import __version__
from .formula import Formula, FormulaSyntaxError, desugar, parse, to_text
from .mosaic import Mosaic, compose_seq, is_composing, is_full_decomposition
from .relativize import DecisionContext, RelativizedSpace
from .tactics import ShuffleSpec, check_shuffle_conditions

FORMAT = "rtlmosaic-certificate"

_TACTICS_AT = {"level": ("shuffle",), "plus": ("lead", "trail"), "minus": ("lead", "trail")}


def _tags():
    from .rms import parse_tag, tag_kind, tag_level, tag_name
    return parse_tag, tag_kind, tag_level, tag_name


def mosaic_json(space: RelativizedSpace, m) -> dict:
    t = space.table
    return {"start": t.text_set(m[0]), "cover": t.text_set(m[1]), "end": t.text_set(m[2])}


def build_certificate(formula_text: str, ctx: DecisionContext, ledger, root: Mosaic) -> dict:
    _, _, _, tag_name = _tags()
    space = RelativizedSpace(ctx)
    ids: dict[Mosaic, int] = {}
    order: list[Mosaic] = []

    def visit(m: Mosaic) -> int:
        if m in ids:
            return ids[m]
        ids[m] = len(order)
        order.append(m)
        w = ledger.witnesses[m]
        if w.kind == "shuffle":
            for lam in w.payload.lambdas:
                for x in lam:
                    visit(x)
        else:
            for x in w.payload:
                visit(x)
        return ids[m]

    visit(root)
    nodes = []
    for m in order:
        w = ledger.witnesses[m]
        node: dict[str, Any] = {
            "id": ids[m],
            "tag": tag_name(ledger.tags[m]),
            "mosaic": mosaic_json(space, m),
            "rule": w.kind,
        }
        if w.kind == "shuffle":
            node["ps"] = [ctx.table.text_set(p) for p in w.payload.ps]
            node["lambdas"] = [[ids[x] for x in lam] for lam in w.payload.lambdas]
        elif w.kind == "composition":
            node["parts"] = [ids[x] for x in w.payload]
        else:
            node["sigma"] = [ids[x] for x in w.payload]
        nodes.append(node)
    return {
        "format": FORMAT,
        "tool_version": __version__,
        "formula": formula_text,
        "q": ctx.q,
        "psi": to_text(ctx.psi),
        "depth_bound": ledger.depth_bound,
        "root": ids[root],
        "nodes": nodes,
    }


def dumps(cert: dict) -> str:
    return json.dumps(cert, indent=1, sort_keys=True)


# ---------------------------------------------------------------- checking


@dataclass
class CheckResult:
    accepted: bool
    path: str = ""
    clause: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def describe(self) -> str:
        return "accepted" if self.accepted else f"rejected at {self.path}: {self.clause}"


class _Reject(Exception):
    def __init__(self, path: str, clause: str):
        super().__init__(f"{path}: {clause}")
        self.path = path
        self.clause = clause


def _need(cond: bool, path: str, clause: str) -> None:
    if not cond:
        raise _Reject(path, clause)


def check_certificate(cert: Union[dict, str], formula: Optional[Union[str, Formula]] = None) -> CheckResult:
    try:
        _check(cert, formula)
    except _Reject as r:
        return CheckResult(False, r.path, r.clause)
    return CheckResult(True)


def _text_set(space: RelativizedSpace, texts, path: str) -> int:
    _need(isinstance(texts, list), path, "expected a list of formula texts")
    out = 0
    for k, t in enumerate(texts):
        _need(isinstance(t, str), f"{path}[{k}]", "expected formula text")
        try:
            f = parse(t)
        except FormulaSyntaxError as e:
            raise _Reject(f"{path}[{k}]", f"unparsable formula ({e})")
        _need(f in space.table.index, f"{path}[{k}]", "formula outside the closure")
        bit = 1 << space.table.index[f]
        _need(not out & bit, f"{path}[{k}]", "duplicate formula")
        out |= bit
    return out


def _check(cert: Union[dict, str], formula) -> None:
    parse_tag, tag_kind, tag_level, _ = _tags()
    if isinstance(cert, str):
        try:
            cert = json.loads(cert)
        except json.JSONDecodeError as e:
            raise _Reject("$", f"invalid JSON ({e})")
    _need(isinstance(cert, dict), "$", "certificate must be an object")
    _need(cert.get("format") == FORMAT, "$.format", "unknown certificate format")
    text = cert.get("formula")
    _need(isinstance(text, str), "$.formula", "missing formula text")
    try:
        phi = parse(text)
    except FormulaSyntaxError as e:
        raise _Reject("$.formula", f"unparsable formula ({e})")
    if formula is not None:
        other = parse(formula) if isinstance(formula, str) else formula
        _need(desugar(other) == desugar(phi), "$.formula", "certificate is for a different formula")
    ctx = DecisionContext.build(desugar(phi))
    _need(cert.get("q") == ctx.q, "$.q", "relativizing atom does not match")
    _need(cert.get("psi") == to_text(ctx.psi), "$.psi", "relativized formula does not match")
    bound = cert.get("depth_bound")
    _need(isinstance(bound, int) and not isinstance(bound, bool) and bound >= 0,
          "$.depth_bound", "depth bound must be a nonnegative integer")
    space = RelativizedSpace(ctx)

    raw = cert.get("nodes")
    _need(isinstance(raw, list) and raw, "$.nodes", "missing derivation nodes")
    mos: dict[int, Mosaic] = {}
    tags: dict[int, int] = {}
    rules: dict[int, str] = {}
    for k, node in enumerate(raw):
        p = f"$.nodes[{k}]"
        _need(isinstance(node, dict), p, "node must be an object")
        nid = node.get("id")
        _need(isinstance(nid, int) and not isinstance(nid, bool) and nid not in mos, f"{p}.id", "bad or duplicate id")
        body = node.get("mosaic")
        _need(isinstance(body, dict), f"{p}.mosaic", "missing mosaic")
        m = Mosaic(
            _text_set(space, body.get("start"), f"{p}.mosaic.start"),
            _text_set(space, body.get("cover"), f"{p}.mosaic.cover"),
            _text_set(space, body.get("end"), f"{p}.mosaic.end"),
        )
        err = space.violation(*m)
        _need(err is None, f"{p}.mosaic", f"not a mosaic: {err}")
        try:
            tags[nid] = parse_tag(str(node.get("tag")))
        except ValueError:
            raise _Reject(f"{p}.tag", "unknown level tag")
        rule = node.get("rule")
        _need(rule in ("composition", "lead", "trail", "shuffle"), f"{p}.rule", "unknown rule")
        mos[nid] = m
        rules[nid] = rule

    def refs(value, path: str, nonempty: bool = True) -> list[int]:
        _need(isinstance(value, list), path, "expected a list of node ids")
        _need(bool(value) or not nonempty, path, "empty sequence")
        for k, r in enumerate(value):
            _need(isinstance(r, int) and not isinstance(r, bool) and r in mos, f"{path}[{k}]", "dangling node reference")
        return value

    for k, node in enumerate(raw):
        p = f"$.nodes[{k}]"
        nid = node["id"]
        m, t, rule = mos[nid], tags[nid], rules[nid]
        kind = tag_kind(t)
        if rule == "composition":
            parts = refs(node.get("parts"), f"{p}.parts")
            for j, r in enumerate(parts):
                ok = tags[r] < t or (tags[r] == t and rules[r] in _TACTICS_AT[kind])
                _need(ok, f"{p}.parts[{j}]", "part violates the level-tag chain")
            _need(max(tags[r] for r in parts) == t, f"{p}.tag", "composition tag is not the highest part tag")
            seq = [mos[r] for r in parts]
            _need(is_composing(seq), f"{p}.parts", "parts do not compose")
            _need(compose_seq(seq) == m, f"{p}.parts", "composition differs from node mosaic")
        elif rule in ("lead", "trail"):
            _need(kind in ("plus", "minus"), f"{p}.tag", f"{rule} is only allowed at n+ and n- tags")
            sigma = refs(node.get("sigma"), f"{p}.sigma")
            for j, r in enumerate(sigma):
                _need(tags[r] < t, f"{p}.sigma[{j}]", "sigma member not tagged strictly lower")
            seq = [mos[r] for r in sigma]
            full = [m] + seq if rule == "lead" else seq + [m]
            _need(is_full_decomposition(space, m, full), f"{p}.sigma",
                  f"{rule} sequence is not a full decomposition")
        else:
            _need(kind == "level", f"{p}.tag", "shuffle is only allowed at full level tags")
            ps_raw = node.get("ps")
            _need(isinstance(ps_raw, list) and ps_raw, f"{p}.ps", "shuffle needs at least one P")
            ps = tuple(_text_set(space, x, f"{p}.ps[{j}]") for j, x in enumerate(ps_raw))
            for j, x in enumerate(ps):
                _need(space.is_mpc(x), f"{p}.ps[{j}]", "P is not an MPC")
            lams_raw = node.get("lambdas")
            _need(isinstance(lams_raw, list), f"{p}.lambdas", "expected a list of sequences")
            _need(t > 0 or not lams_raw, f"{p}.lambdas", "level 0 shuffles take no sequences")
            lams = []
            for j, lam in enumerate(lams_raw):
                ids = refs(lam, f"{p}.lambdas[{j}]")
                for i, r in enumerate(ids):
                    _need(tags[r] < t, f"{p}.lambdas[{j}][{i}]", "lambda member not tagged strictly lower")
                seq = tuple(mos[r] for r in ids)
                _need(is_composing(seq), f"{p}.lambdas[{j}]", "lambda does not compose")
                lams.append(seq)
            spec = ShuffleSpec(ps, tuple(lams))
            _need(check_shuffle_conditions(space, m, spec), f"{p}", "shuffle conditions S0-S6 fail")

    root = cert.get("root")
    _need(isinstance(root, int) and not isinstance(root, bool) and root in mos, "$.root", "dangling root")
    _need(space.is_relativized(mos[root]), "$.root", "root mosaic is not relativized")
    _need(tag_level(tags[root]) <= bound, "$.root", "root level exceeds the depth bound")
