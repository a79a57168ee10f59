"""Process terms over a net and the equational theory that identifies them.

A process term is built from transitions, identities, sequential composition,
and the net theory's operations on morphisms. Terms are normalized into
layered forms: sequences of firing layers, where a layer is itself a canonical
free-model element over the alphabet of transition names plus ``id.``-prefixed
place names (the held frame). Layer-level equalities of the theory hold
definitionally in that representation; the remaining equations (category
axioms and the requirement that composition is a model homomorphism) are
explored by a budgeted bidirectional rewrite search over layer merges and
splits.

``Distinct`` verdicts are sound with respect to that rewrite closure: they are
issued when invariants differ or when one term's entire closure was
enumerated without meeting the other. ``Unknown`` is reserved for genuine
budget exhaustion.
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from . import jsonio
from .intlattice import IntLattice
from .net import QNet, validate_net
from .reflexive import ID_PREFIX, InvalidNetError
from .theory import (
    COUNT_THEORIES,
    GROUP_THEORIES,
    FreeElem,
    QnetError,
    Theory,
    TheoryMismatchError,
    UnsupportedOperationError,
    combine,
    combine_all,
    extend,
    invert,
    lift,
    multiset,
    occurrences,
    unit,
)

DEFAULT_BUDGET = 10_000


def default_budget() -> int:
    """Rewrite-search node budget; the QNET_BUDGET env var overrides it."""
    raw = os.environ.get("QNET_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


class IllTypedTermError(QnetError):
    pass


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Ident:
    obj: FreeElem


@dataclass(frozen=True)
class Comp:
    after: "MorTerm"
    before: "MorTerm"


@dataclass(frozen=True)
class Oper:
    op: str  # "combine" | "invert"
    args: tuple["MorTerm", ...]


MorTerm = Union[Gen, Ident, Comp, Oper]


@dataclass(frozen=True)
class LayeredForm:
    """Sequential decomposition: ``layers[0]`` fires first. Layers are
    elements over transition names and ``id.`` place names; pure-identity
    layers are never stored, so the empty tuple is the identity on ``start``."""

    start: FreeElem
    layers: tuple[FreeElem, ...]


@dataclass(frozen=True)
class EqVerdict:
    status: str  # "equal" | "distinct" | "unknown"
    reason: str
    witness: tuple[str, ...] = ()

    @property
    def is_equal(self) -> bool:
        return self.status == "equal"

    @property
    def is_distinct(self) -> bool:
        return self.status == "distinct"

    @property
    def is_unknown(self) -> bool:
        return self.status == "unknown"


def _equal(reason: str, witness: tuple[str, ...] = ()) -> EqVerdict:
    return EqVerdict("equal", reason, witness)


def _distinct(reason: str) -> EqVerdict:
    return EqVerdict("distinct", reason)


def _unknown(reason: str) -> EqVerdict:
    return EqVerdict("unknown", reason)


# ---------------------------------------------------------------------------
# Evaluation context: symbol images for the layer alphabet


@dataclass(frozen=True)
class _Ctx:
    net: QNet
    src_images: Mapping[str, FreeElem]
    tgt_images: Mapping[str, FreeElem]


def _context(net: QNet) -> _Ctx:
    diags = validate_net(net)
    if diags:
        raise InvalidNetError("; ".join(diags))
    if any(t.startswith(ID_PREFIX) for t in net.transitions):
        raise InvalidNetError(
            f"process semantics reserves the {ID_PREFIX!r} transition prefix")
    src_images = {}
    tgt_images = {}
    for name, (src, tgt) in net.transitions.items():
        src_images[name] = src
        tgt_images[name] = tgt
    for p in net.places:
        src_images[ID_PREFIX + p] = unit(net.theory, p)
        tgt_images[ID_PREFIX + p] = unit(net.theory, p)
    return _Ctx(net, src_images, tgt_images)


def _is_id_sym(name: str) -> bool:
    return name.startswith(ID_PREFIX)


def _pure_id(layer: FreeElem) -> bool:
    return all(_is_id_sym(a) for a in layer.atoms())


def _identity_layer(th: Theory, marking: FreeElem) -> FreeElem:
    return lift(th, {p: ID_PREFIX + p for p in marking.atoms()}, marking)


def _ids_marking(th: Theory, layer: FreeElem) -> FreeElem:
    """Marking held by the id letters of a layer (gens are dropped)."""
    if th in COUNT_THEORIES:
        return FreeElem(th, tuple((p[len(ID_PREFIX):], c)
                                  for p, c in layer.payload if _is_id_sym(p)))
    if th is Theory.GRP:
        return FreeElem(th, tuple((p[len(ID_PREFIX):], s)
                                  for p, s in layer.payload if _is_id_sym(p)))
    if th is Theory.MON:
        return FreeElem(th, tuple(p[len(ID_PREFIX):]
                                  for p in layer.payload if _is_id_sym(p)))
    return FreeElem(th, tuple(sorted(p[len(ID_PREFIX):]
                                     for p in layer.payload if _is_id_sym(p))))


def _gens_part(th: Theory, layer: FreeElem) -> FreeElem:
    if th in COUNT_THEORIES:
        return FreeElem(th, tuple(e for e in layer.payload if not _is_id_sym(e[0])))
    if th is Theory.GRP:
        return FreeElem(th, tuple(e for e in layer.payload if not _is_id_sym(e[0])))
    return FreeElem(th, tuple(p for p in layer.payload if not _is_id_sym(p)))


def _layer_src(layer: FreeElem, ctx: _Ctx) -> FreeElem:
    return extend(ctx.net.theory, ctx.src_images, layer)


def _layer_tgt(layer: FreeElem, ctx: _Ctx) -> FreeElem:
    return extend(ctx.net.theory, ctx.tgt_images, layer)


def form_tgt(form: LayeredForm, ctx: _Ctx) -> FreeElem:
    return _layer_tgt(form.layers[-1], ctx) if form.layers else form.start


def layered_repr(form: LayeredForm) -> str:
    start = jsonio.dumps(jsonio.elem_to_json(form.start))
    steps = " ; ".join(jsonio.dumps(jsonio.elem_to_json(l)) for l in form.layers)
    return f"{start} [{steps}]"


# ---------------------------------------------------------------------------
# Term endpoints and layering


def _endpoints(t: MorTerm, ctx: _Ctx) -> tuple[FreeElem, FreeElem]:
    th = ctx.net.theory
    if isinstance(t, Gen):
        if t.name not in ctx.net.transitions:
            raise IllTypedTermError(f"unknown transition {t.name!r}")
        return ctx.net.transitions[t.name]
    if isinstance(t, Ident):
        if t.obj.theory is not th:
            raise IllTypedTermError(
                f"identity object has theory {t.obj.theory.value}, net is {th.value}")
        if t.obj.atoms() - set(ctx.net.places):
            raise IllTypedTermError("identity object mentions undeclared places")
        return t.obj, t.obj
    if isinstance(t, Comp):
        src_b, tgt_b = _endpoints(t.before, ctx)
        src_a, tgt_a = _endpoints(t.after, ctx)
        if tgt_b != src_a:
            raise IllTypedTermError(
                f"composite mismatch: before ends at {tgt_b.payload}, after starts at"
                f" {src_a.payload}")
        return src_b, tgt_a
    if isinstance(t, Oper):
        if t.op == "combine":
            if len(t.args) < 2:
                raise IllTypedTermError("combine needs at least two arguments")
            ends = [_endpoints(a, ctx) for a in t.args]
            return (combine_all(th, (s for s, _ in ends)),
                    combine_all(th, (g for _, g in ends)))
        if t.op == "invert":
            if th not in GROUP_THEORIES:
                raise IllTypedTermError(f"{th.value} morphisms have no inverses")
            if len(t.args) != 1:
                raise IllTypedTermError("invert takes exactly one argument")
            s, g = _endpoints(t.args[0], ctx)
            return invert(s), invert(g)
        raise IllTypedTermError(f"unknown operation {t.op!r}")
    raise IllTypedTermError(f"not a process term: {t!r}")


def mor_src(t: MorTerm, net: QNet) -> FreeElem:
    return _endpoints(t, _context(net))[0]


def mor_tgt(t: MorTerm, net: QNet) -> FreeElem:
    return _endpoints(t, _context(net))[1]


def _layers_of(t: MorTerm, ctx: _Ctx) -> tuple[FreeElem, FreeElem, tuple[FreeElem, ...]]:
    """Recursive layering; may contain pure-id layers, normalized by callers."""
    th = ctx.net.theory
    if isinstance(t, Gen):
        src, tgt = _endpoints(t, ctx)
        return src, tgt, (unit(th, t.name),)
    if isinstance(t, Ident):
        src, tgt = _endpoints(t, ctx)
        return src, src, ()
    if isinstance(t, Comp):
        src_b, tgt_b, layers_b = _layers_of(t.before, ctx)
        src_a, tgt_a, layers_a = _layers_of(t.after, ctx)
        if tgt_b != src_a:
            raise IllTypedTermError(
                f"composite mismatch: before ends at {tgt_b.payload}, after starts at"
                f" {src_a.payload}")
        return src_b, tgt_a, layers_b + layers_a
    if isinstance(t, Oper) and t.op == "invert":
        if th not in GROUP_THEORIES:
            raise IllTypedTermError(f"{th.value} morphisms have no inverses")
        if len(t.args) != 1:
            raise IllTypedTermError("invert takes exactly one argument")
        src, tgt, layers = _layers_of(t.args[0], ctx)
        return invert(src), invert(tgt), tuple(invert(l) for l in layers)
    if isinstance(t, Oper) and t.op == "combine":
        if len(t.args) < 2:
            raise IllTypedTermError("combine needs at least two arguments")
        src, tgt, layers = _layers_of(t.args[0], ctx)
        for arg in t.args[1:]:
            src_b, tgt_b, layers_b = _layers_of(arg, ctx)
            layers = _zip_layers(th, (src, layers), (src_b, layers_b))
            src = combine(th, src, src_b)
            tgt = combine(th, tgt, tgt_b)
        return src, tgt, layers
    raise IllTypedTermError(f"not a process term: {t!r}")


def _zip_layers(th: Theory,
                a: tuple[FreeElem, tuple[FreeElem, ...]],
                b: tuple[FreeElem, tuple[FreeElem, ...]]) -> tuple[FreeElem, ...]:
    """Parallel combination: pad the shorter side in front with held frames."""
    start_a, layers_a = a
    start_b, layers_b = b
    depth = max(len(layers_a), len(layers_b))
    pad_a = (_identity_layer(th, start_a),) * (depth - len(layers_a)) + layers_a
    pad_b = (_identity_layer(th, start_b),) * (depth - len(layers_b)) + layers_b
    return tuple(combine(th, x, y) for x, y in zip(pad_a, pad_b))


def layered(t: MorTerm, net: QNet) -> LayeredForm:
    """Canonical-ish sequentialization of a term; denotes the same morphism."""
    ctx = _context(net)
    return _layered_ctx(t, ctx)


def _layered_ctx(t: MorTerm, ctx: _Ctx) -> LayeredForm:
    src, _tgt, layers = _layers_of(t, ctx)
    return LayeredForm(src, tuple(l for l in layers if not _pure_id(l)))


# ---------------------------------------------------------------------------
# Rewrite moves: merging and splitting adjacent layers


def _merge_candidates(l1: FreeElem, l2: FreeElem, ctx: _Ctx) -> list[FreeElem]:
    th = ctx.net.theory
    if th in (Theory.CMON, Theory.ABGRP):
        g1 = _gens_part(th, l1)
        g2 = _gens_part(th, l2)
        held = occurrences(_ids_marking(th, l1))
        needed = occurrences(_layer_src(g2, ctx))
        frame = dict(held)
        for p, c in needed.items():
            frame[p] = frame.get(p, 0) - c
        if th is Theory.CMON and any(c < 0 for c in frame.values()):
            return []
        merged = combine(th, combine(th, g1, g2),
                         _identity_layer(th, multiset(th, frame)))
        return [merged]
    if th is Theory.SEMILAT:
        g1 = _gens_part(th, l1)
        g2 = _gens_part(th, l2)
        ids1 = set(_ids_marking(th, l1).payload)
        ids2 = set(_ids_marking(th, l2).payload)
        src_g2 = set(_layer_src(g2, ctx).payload)
        tgt_g1 = set(_layer_tgt(g1, ctx).payload)
        out = []
        shared = sorted(ids1 & ids2)
        for bits in itertools.product((False, True), repeat=len(shared)):
            w = {p for p, keep in zip(shared, bits) if keep}
            if (w | src_g2) == ids1 and (w | tgt_g1) == ids2:
                frame = FreeElem(th, tuple(sorted(w)))
                out.append(combine(th, combine(th, g1, g2), _identity_layer(th, frame)))
        return sorted(set(out), key=lambda e: e.payload)
    return _merge_words(l1, l2, ctx)


def _letter_elem(th: Theory, letter) -> FreeElem:
    return FreeElem(th, (letter,))


def _merge_words(l1: FreeElem, l2: FreeElem, ctx: _Ctx) -> list[FreeElem]:
    """Interleaved merges for word theories, by matching held blocks."""
    th = ctx.net.theory
    w1, w2 = l1.payload, l2.payload
    results: set[tuple] = set()

    def is_id_letter(letter) -> bool:
        name = letter[0] if th is Theory.GRP else letter
        return _is_id_sym(name)

    def rec(i: int, j: int, acc: tuple) -> None:
        if i == len(w1) and j == len(w2):
            results.add(acc)
            return
        if (i < len(w1) and j < len(w2) and is_id_letter(w1[i])
                and w1[i] == w2[j]):
            rec(i + 1, j + 1, acc + (w1[i],))
        if i < len(w1) and not is_id_letter(w1[i]):
            held = _identity_layer(th, _layer_tgt(_letter_elem(th, w1[i]), ctx)).payload
            if w2[j:j + len(held)] == held:
                rec(i + 1, j + len(held), acc + (w1[i],))
        if j < len(w2) and not is_id_letter(w2[j]):
            held = _identity_layer(th, _layer_src(_letter_elem(th, w2[j]), ctx)).payload
            if w1[i:i + len(held)] == held:
                rec(i + len(held), j + 1, acc + (w2[j],))

    rec(0, 0, ())
    out = set()
    for acc in results:
        if th is Theory.GRP:
            out.add(FreeElem(th, acc) if _is_reduced(acc) else _reduced_elem(acc))
        else:
            out.add(FreeElem(th, acc))
    return sorted(out, key=lambda e: e.payload)


def _is_reduced(pairs: tuple) -> bool:
    return all(not (pairs[i][0] == pairs[i + 1][0] and pairs[i][1] == -pairs[i + 1][1])
               for i in range(len(pairs) - 1))


def _reduced_elem(pairs: tuple) -> FreeElem:
    from .theory import signed_word

    return signed_word(pairs)


def _split_candidates(layer: FreeElem, ctx: _Ctx) -> list[tuple[FreeElem, FreeElem]]:
    th = ctx.net.theory
    if th in (Theory.CMON, Theory.ABGRP):
        gens = _gens_part(th, layer)
        held = _ids_marking(th, layer)
        choices = []
        for name, count in gens.payload:
            step = 1 if count > 0 else -1
            choices.append([(name, step * k) for k in range(abs(count) + 1)])
        out = []
        for pick in itertools.product(*choices):
            part1 = {n: c for n, c in pick if c != 0}
            part2 = {n: c - part1.get(n, 0) for n, c in gens.payload
                     if c - part1.get(n, 0) != 0}
            if not part1 or not part2:
                continue
            g1 = multiset(th, part1)
            g2 = multiset(th, part2)
            l1 = combine(th, g1, _identity_layer(
                th, combine(th, held, _layer_src(g2, ctx))))
            l2 = combine(th, g2, _identity_layer(
                th, combine(th, held, _layer_tgt(g1, ctx))))
            out.append((l1, l2))
        return out
    if th is Theory.SEMILAT:
        gens = sorted(_gens_part(th, layer).payload)
        held = _ids_marking(th, layer)
        out = []
        for assign in itertools.product(("L", "R", "B"), repeat=len(gens)):
            left = {g for g, a in zip(gens, assign) if a in ("L", "B")}
            right = {g for g, a in zip(gens, assign) if a in ("R", "B")}
            if not left or not right:
                continue
            g1 = FreeElem(th, tuple(sorted(left)))
            g2 = FreeElem(th, tuple(sorted(right)))
            l1 = combine(th, g1, _identity_layer(
                th, combine(th, held, _layer_src(g2, ctx))))
            l2 = combine(th, g2, _identity_layer(
                th, combine(th, held, _layer_tgt(g1, ctx))))
            out.append((l1, l2))
        return sorted(set(out), key=lambda pair: (pair[0].payload, pair[1].payload))
    return _split_word(layer, ctx)


def _split_word(layer: FreeElem, ctx: _Ctx) -> list[tuple[FreeElem, FreeElem]]:
    th = ctx.net.theory

    def is_id_letter(letter) -> bool:
        name = letter[0] if th is Theory.GRP else letter
        return _is_id_sym(name)

    gen_positions = [k for k, letter in enumerate(layer.payload)
                     if not is_id_letter(letter)]
    out = []
    for assign in itertools.product((True, False), repeat=len(gen_positions)):
        early = {pos for pos, fl in zip(gen_positions, assign) if fl}
        if not early or len(early) == len(gen_positions):
            continue
        w1: list = []
        w2: list = []
        for k, letter in enumerate(layer.payload):
            if is_id_letter(letter):
                w1.append(letter)
                w2.append(letter)
            elif k in early:
                w1.append(letter)
                w2.extend(_identity_layer(
                    th, _layer_tgt(_letter_elem(th, letter), ctx)).payload)
            else:
                w1.extend(_identity_layer(
                    th, _layer_src(_letter_elem(th, letter), ctx)).payload)
                w2.append(letter)
        if th is Theory.GRP:
            out.append((_reduced_elem(tuple(w1)), _reduced_elem(tuple(w2))))
        else:
            out.append((FreeElem(th, tuple(w1)), FreeElem(th, tuple(w2))))
    return out


def _layer_gens_total(layer: FreeElem) -> int:
    return sum(abs(c) for name, c in occurrences(layer).items()
               if not _is_id_sym(name))


def _form_gens_total(form: LayeredForm) -> int:
    return sum(_layer_gens_total(layer) for layer in form.layers)


def _neighbors(form: LayeredForm, ctx: _Ctx,
               gens_cap: int | None = None) -> Iterator[LayeredForm]:
    """Adjacent-layer merges and splits; splits may not push the total
    generator count past ``gens_cap`` (idempotent duplication is otherwise
    unbounded)."""
    layers = form.layers
    for i in range(len(layers) - 1):
        for merged in _merge_candidates(layers[i], layers[i + 1], ctx):
            mid = () if _pure_id(merged) else (merged,)
            yield LayeredForm(form.start, layers[:i] + mid + layers[i + 2:])
    total = _form_gens_total(form)
    for i, layer in enumerate(layers):
        here = _layer_gens_total(layer)
        for a, b in _split_candidates(layer, ctx):
            if gens_cap is not None:
                grown = total - here + _layer_gens_total(a) + _layer_gens_total(b)
                if grown > gens_cap:
                    continue
            yield LayeredForm(form.start, layers[:i] + (a, b) + layers[i + 1:])


def _greedy(form: LayeredForm, ctx: _Ctx) -> LayeredForm:
    """Earliest-firing prefilter: merge forward while possible. Sound but not
    trusted as a complete canonical form."""
    layers = list(form.layers)
    i = 0
    while i + 1 < len(layers):
        cands = _merge_candidates(layers[i], layers[i + 1], ctx)
        if cands:
            merged = min(cands, key=lambda e: e.payload)
            layers[i:i + 2] = [] if _pure_id(merged) else [merged]
            i = max(i - 1, 0)
        else:
            i += 1
    return LayeredForm(form.start, tuple(layers))


# ---------------------------------------------------------------------------
# Equality search


def _form_occurrences(form: LayeredForm) -> dict[str, int]:
    totals: dict[str, int] = {}
    for layer in form.layers:
        for name, count in occurrences(layer).items():
            if not _is_id_sym(name):
                totals[name] = totals.get(name, 0) + count
    return {n: c for n, c in totals.items() if c != 0}


def _search_connect(f1: LayeredForm, f2: LayeredForm, ctx: _Ctx,
                    budget: int) -> EqVerdict:
    sides: tuple[dict, dict] = ({f1: None}, {f2: None})
    queues = (deque([f1]), deque([f2]))
    expansions = 0
    gens_cap = max(_form_gens_total(f1), _form_gens_total(f2))
    # Within the capped form space the move relation is symmetric for theories
    # without inverses (merge and split are mutual converses), so exhausting
    # one side enumerates its whole class. With inverses, merges can cancel a
    # layer away without a converse insertion move, so both sides must be
    # exhausted; equal ABGRP forms still always meet at their full merge.
    early_exhaust = ctx.net.theory not in GROUP_THEORIES

    def witness(meet: LayeredForm) -> tuple[str, ...]:
        chains = []
        for side in (0, 1):
            chain = []
            node = meet
            while node is not None:
                chain.append(node)
                node = sides[side][node]
            chains.append(chain)
        path = list(reversed(chains[0])) + chains[1][1:]
        return tuple(layered_repr(f) for f in path)

    if f2 in sides[0]:
        return _equal("identical layered forms")
    while queues[0] or queues[1]:
        side = 0 if (queues[0] and (not queues[1] or len(queues[0]) <= len(queues[1]))) else 1
        node = queues[side].popleft()
        expansions += 1
        if expansions > budget:
            return _unknown(f"budget of {budget} nodes exhausted")
        for nxt in _neighbors(node, ctx, gens_cap):
            if nxt in sides[side]:
                continue
            sides[side][nxt] = node
            if nxt in sides[1 - side]:
                return _equal("rewrite path found", witness(nxt))
            queues[side].append(nxt)
        if early_exhaust and (not queues[0] or not queues[1]):
            return _distinct("one rewrite closure is complete and excludes the other term")
    return _distinct("rewrite closures are disjoint")


def _forms_equal(f1: LayeredForm, f2: LayeredForm, ctx: _Ctx,
                 budget: int | None = None) -> EqVerdict:
    th = ctx.net.theory
    if budget is None:
        budget = default_budget()
    if f1.start != f2.start or form_tgt(f1, ctx) != form_tgt(f2, ctx):
        return _distinct("endpoints differ")
    if f1 == f2:
        return _equal("identical layered forms")
    if th is not Theory.SEMILAT and _form_occurrences(f1) != _form_occurrences(f2):
        return _distinct("generator occurrence counts differ")
    g1 = _greedy(f1, ctx)
    g2 = _greedy(f2, ctx)
    if g1 == g2:
        return _equal("greedy canonical forms agree",
                      (layered_repr(f1), layered_repr(g1), layered_repr(f2)))
    verdict = _search_connect(f1, f2, ctx, budget)
    if verdict.is_distinct and th is Theory.GRP:
        # Word reduction can hide merge patterns for GRP, so exhaustion of the
        # explored closure is not a proof there.
        return _unknown("closure exhausted; GRP move set is not known complete")
    return verdict


def mor_equal(t1: MorTerm, t2: MorTerm, net: QNet,
              budget: int | None = None) -> EqVerdict:
    """Decide equality of two process terms in the free category on ``net``."""
    ctx = _context(net)
    e1 = _endpoints(t1, ctx)
    e2 = _endpoints(t2, ctx)
    if e1 != e2:
        return _distinct("source/target pairs differ")
    return _forms_equal(_layered_ctx(t1, ctx), _layered_ctx(t2, ctx), ctx, budget)


# ---------------------------------------------------------------------------
# Layer enumeration, hom-sets, reachability


def _fired_multisets(ctx: _Ctx, marking: FreeElem,
                     max_width: int | None) -> Iterator[dict[str, int]]:
    """Nonempty transition multisets whose combined source fits the marking."""
    names = sorted(ctx.net.transitions)

    def rec(idx: int, room: dict[str, int], width_left: int | None,
            acc: dict[str, int]) -> Iterator[dict[str, int]]:
        if idx == len(names):
            if acc:
                yield dict(acc)
            return
        yield from rec(idx + 1, room, width_left, acc)
        name = names[idx]
        src = occurrences(ctx.net.transitions[name][0])
        count = 0
        local = dict(room)
        while width_left is None or count < width_left:
            ok = all(local.get(p, 0) >= c for p, c in src.items())
            if not ok:
                break
            for p, c in src.items():
                local[p] = local[p] - c
            count += 1
            acc2 = dict(acc)
            acc2[name] = count
            left = None if width_left is None else width_left - count
            yield from rec(idx + 1, local, left, acc2)
        return

    yield from rec(0, dict(occurrences(marking)), max_width, {})


def _step_layers(ctx: _Ctx, marking: FreeElem,
                 max_width: int | None) -> list[FreeElem]:
    """All single firing layers whose source is exactly ``marking``."""
    th = ctx.net.theory
    out: set[FreeElem] = set()
    if th is Theory.CMON:
        for fired in _fired_multisets(ctx, marking, max_width):
            gens = multiset(th, fired)
            frame_counts = dict(occurrences(marking))
            for p, c in occurrences(_layer_src(gens, ctx)).items():
                frame_counts[p] -= c
            frame = multiset(th, frame_counts)
            out.add(combine(th, gens, _identity_layer(th, frame)))
    elif th is Theory.SEMILAT:
        names = sorted(ctx.net.transitions)
        marking_set = set(marking.payload)
        for r in range(1, len(names) + 1):
            if max_width is not None and r > max_width:
                break
            for group in itertools.combinations(names, r):
                fired_src = set()
                for nm in group:
                    fired_src |= set(ctx.net.transitions[nm][0].payload)
                if not fired_src <= marking_set:
                    continue
                base = marking_set - fired_src
                extras = sorted(fired_src)
                for bits in itertools.product((False, True), repeat=len(extras)):
                    keep = {p for p, b in zip(extras, bits) if b}
                    frame = FreeElem(th, tuple(sorted(base | keep)))
                    gens = FreeElem(th, tuple(sorted(group)))
                    out.add(combine(th, gens, _identity_layer(th, frame)))
    elif th is Theory.MON:
        letters = marking.payload

        def rec(pos: int, width_left: int, acc: tuple) -> None:
            if pos == len(letters) and not all(_is_id_sym(x) for x in acc):
                out.add(FreeElem(th, acc))
            for name in sorted(ctx.net.transitions):
                if width_left == 0:
                    break
                src = ctx.net.transitions[name][0].payload
                if letters[pos:pos + len(src)] == src:
                    rec(pos + len(src), width_left - 1, acc + (name,))
            if pos < len(letters):
                rec(pos + 1, width_left, acc + (ID_PREFIX + letters[pos],))

        rec(0, max_width if max_width is not None else len(letters) + 1, ())
    else:
        raise UnsupportedOperationError(
            f"single-layer enumeration is not finite over {th.value}")
    return sorted(out, key=lambda e: e.payload)


def hom_enumerate(net: QNet, x: FreeElem, y: FreeElem, max_layers: int,
                  max_width: int, budget: int | None = None) -> list[MorTerm]:
    """All process-term classes from ``x`` to ``y`` within the layer bounds.

    Classes are deduplicated with :func:`mor_equal`; representatives are
    returned in lexicographic (layer count, serialized form) order.
    """
    if net.theory in GROUP_THEORIES:
        raise UnsupportedOperationError(
            f"hom-sets over {net.theory.value} are infinite whenever nonempty")
    if max_layers <= 0 or max_width <= 0:
        raise UnsupportedOperationError("layer and width bounds must be positive")
    ctx = _context(net)
    forms: list[LayeredForm] = []

    def rec(marking: FreeElem, acc: tuple[FreeElem, ...]) -> None:
        if marking == y:
            forms.append(LayeredForm(x, acc))
        if len(acc) == max_layers:
            return
        for layer in _step_layers(ctx, marking, max_width):
            rec(_layer_tgt(layer, ctx), acc + (layer,))

    rec(x, ())
    forms.sort(key=lambda f: (len(f.layers), tuple(l.payload for l in f.layers)))
    reps: list[LayeredForm] = []
    for form in forms:
        if not any(_forms_equal(form, rep, ctx, budget).is_equal for rep in reps):
            reps.append(form)
    return [layered_to_term(rep, net) for rep in reps]


def layered_to_term(form: LayeredForm, net: QNet) -> MorTerm:
    """Convert a layered form back into a process term."""
    th = net.theory
    ctx = _context(net)

    def letter_term(letter) -> MorTerm:
        if th is Theory.GRP:
            name, sign = letter
            base = Ident(unit(th, name[len(ID_PREFIX):])) if _is_id_sym(name) \
                else Gen(name)
            return Oper("invert", (base,)) if sign < 0 else base
        if _is_id_sym(letter):
            return Ident(unit(th, letter[len(ID_PREFIX):]))
        return Gen(letter)

    def layer_term(layer: FreeElem) -> MorTerm:
        items: list[MorTerm] = []
        if th in COUNT_THEORIES:
            for name, count in layer.payload:
                piece = Ident(unit(th, name[len(ID_PREFIX):])) if _is_id_sym(name) \
                    else Gen(name)
                if count < 0:
                    piece = Oper("invert", (piece,))
                items.extend([piece] * abs(count))
        else:
            items.extend(letter_term(l) for l in layer.payload)
        if len(items) == 1:
            return items[0]
        return Oper("combine", tuple(items))

    if not form.layers:
        return Ident(form.start)
    term = layer_term(form.layers[0])
    for layer in form.layers[1:]:
        term = Comp(layer_term(layer), term)
    return term


@dataclass(frozen=True)
class ReachResult:
    start: FreeElem
    max_steps: int
    markings: tuple[FreeElem, ...]
    edges: tuple[tuple[FreeElem, str, FreeElem], ...]


def reachable(net: QNet, m0: FreeElem, max_steps: int) -> ReachResult:
    """Breadth-first token game; the step rule is theory-specific.

    CMON fires any multiset of transitions whose combined source fits the
    marking; MON rewrites one contiguous source factor; SEMILAT fires one
    transition against any context whose union restores the marking.
    """
    th = net.theory
    if th in GROUP_THEORIES:
        raise UnsupportedOperationError(
            f"reachability over {th.value} is not a token game; use the lattice test")
    ctx = _context(net)
    if m0.theory is not th:
        raise TheoryMismatchError("marking theory differs from net theory")
    if m0.atoms() - set(net.places):
        raise InvalidNetError("marking mentions undeclared places")
    if th is Theory.CMON and any(src.is_neutral()
                                 for src, _ in net.transitions.values()):
        raise UnsupportedOperationError(
            "a transition with empty source makes the step relation infinitely branching")

    def steps(m: FreeElem) -> Iterator[tuple[str, FreeElem]]:
        if th is Theory.CMON:
            for fired in _fired_multisets(ctx, m, None):
                gens = multiset(th, fired)
                counts = dict(occurrences(m))
                for p, c in occurrences(_layer_src(gens, ctx)).items():
                    counts[p] = counts.get(p, 0) - c
                for p, c in occurrences(_layer_tgt(gens, ctx)).items():
                    counts[p] = counts.get(p, 0) + c
                yield jsonio.dumps({"fire": fired}), multiset(th, counts)
        elif th is Theory.MON:
            for name in sorted(net.transitions):
                src, tgt = net.transitions[name]
                for pos in range(len(m.payload) - len(src.payload) + 1):
                    if m.payload[pos:pos + len(src.payload)] == src.payload:
                        new = m.payload[:pos] + tgt.payload + m.payload[pos + len(src.payload):]
                        yield jsonio.dumps({"at": pos, "fire": name}), FreeElem(th, new)
        else:
            marking_set = set(m.payload)
            for name in sorted(net.transitions):
                src, tgt = net.transitions[name]
                if not set(src.payload) <= marking_set:
                    continue
                base = marking_set - set(src.payload)
                for bits in itertools.product((False, True), repeat=len(src.payload)):
                    keep = {p for p, b in zip(src.payload, bits) if b}
                    context = base | keep
                    new = FreeElem(th, tuple(sorted(context | set(tgt.payload))))
                    yield jsonio.dumps({"fire": name, "keep": sorted(context)}), new

    seen = {m0}
    frontier = [m0]
    edges: set[tuple[FreeElem, str, FreeElem]] = set()
    for _ in range(max_steps):
        nxt = []
        for m in frontier:
            for label, m2 in steps(m):
                edges.add((m, label, m2))
                if m2 not in seen:
                    seen.add(m2)
                    nxt.append(m2)
        if not nxt:
            break
        frontier = nxt
    return ReachResult(
        m0, max_steps,
        tuple(sorted(seen, key=lambda e: e.payload)),
        tuple(sorted(edges, key=lambda e: (e[0].payload, e[1], e[2].payload))))


def reachability_dot(result: ReachResult) -> str:
    """Graphviz rendering: nodes are canonical markings, edges fired layers."""

    def quote(s: str) -> str:
        return '"' + s.replace('"', '\\"') + '"'

    lines = ["digraph reachability {"]
    for m in result.markings:
        label = jsonio.dumps(jsonio.elem_to_json(m))
        shape = "doublecircle" if m == result.start else "box"
        lines.append(f"  {quote(label)} [shape={shape}];")
    for src, label, tgt in result.edges:
        lines.append("  {} -> {} [label={}];".format(
            quote(jsonio.dumps(jsonio.elem_to_json(src))),
            quote(jsonio.dumps(jsonio.elem_to_json(tgt))),
            quote(label)))
    lines.append("}")
    return "\n".join(lines) + "\n"


def hom_nonempty_group(net: QNet, x: FreeElem, y: FreeElem) -> bool:
    """Whether some process connects ``x`` to ``y`` in an ABGRP net.

    Decided exactly: the difference must lie in the integer lattice spanned by
    the transition effects.
    """
    if net.theory is not Theory.ABGRP:
        raise UnsupportedOperationError(
            "the lattice test answers hom-nonemptiness for ABGRP nets only")
    diags = validate_net(net)
    if diags:
        raise InvalidNetError("; ".join(diags))
    if x.theory is not Theory.ABGRP or y.theory is not Theory.ABGRP:
        raise TheoryMismatchError("markings must be ABGRP elements")
    places = list(net.places)
    index = {p: i for i, p in enumerate(places)}
    if (x.atoms() | y.atoms()) - set(places):
        raise InvalidNetError("marking mentions undeclared places")
    lattice = IntLattice(len(places))
    for name, (src, tgt) in net.transitions.items():
        effect = [0] * len(places)
        for p, c in tgt.payload:
            effect[index[p]] += c
        for p, c in src.payload:
            effect[index[p]] -= c
        lattice.add(effect)
    goal = [0] * len(places)
    for p, c in y.payload:
        goal[index[p]] += c
    for p, c in x.payload:
        goal[index[p]] -= c
    return goal in lattice


@dataclass(frozen=True)
class UnderlyingNet:
    """Finite truncation of the net underlying the free category."""

    net: QNet
    objects: tuple[FreeElem, ...]
    reps: Mapping[str, MorTerm]
    truncated: bool = True


def underlying_net(net: QNet, bound: int) -> UnderlyingNet:
    """Truncate the free category on ``net`` back to a net.

    Objects are the arc markings plus the place units; transitions are the
    process classes found by :func:`hom_enumerate` with ``bound`` as both the
    layer and width limit.
    """
    if bound <= 0:
        raise UnsupportedOperationError("enumeration bound must be positive")
    if net.theory in GROUP_THEORIES:
        raise UnsupportedOperationError(
            f"underlying-net truncation is not available over {net.theory.value}")
    ctx = _context(net)
    objects: set[FreeElem] = set()
    for src, tgt in net.transitions.values():
        objects.add(src)
        objects.add(tgt)
    for p in net.places:
        objects.add(unit(net.theory, p))
    ordered = tuple(sorted(objects, key=lambda e: e.payload))
    transitions = {}
    reps = {}
    counter = 0
    for x in ordered:
        for y in ordered:
            for term in hom_enumerate(net, x, y, bound, bound):
                name = f"mor{counter}"
                counter += 1
                transitions[name] = (x, y)
                reps[name] = term
    return UnderlyingNet(QNet(net.theory, net.places, transitions), ordered, reps)


def unit_into_truncation(net: QNet, truncation: UnderlyingNet):
    """The canonical morphism from a net into its free-category truncation."""
    from .net import NetMorphism

    f = {}
    for name in net.transitions:
        for rep_name, rep_term in truncation.reps.items():
            if truncation.net.transitions[rep_name] != net.transitions[name]:
                continue
            if mor_equal(Gen(name), rep_term, net).is_equal:
                f[name] = rep_name
                break
        else:
            raise QnetError(f"truncation bound too small to contain {name!r}")
    return NetMorphism(net, truncation.net, f, {p: p for p in net.places})
