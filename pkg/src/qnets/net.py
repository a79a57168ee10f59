"""Nets over a theory, their morphisms, translations, and binary (co)products.

A net is a finite set of places plus transitions whose source and target are
canonical free-model elements over those places. Morphisms are pairs of name
maps whose two squares (source and target against the lifted place map) must
commute; violations are reported as diagnostics rather than exceptions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .theory import (
    FreeElem,
    Theory,
    TheoryArrow,
    TheoryMismatchError,
    UnmappedNameError,
    UnsupportedOperationError,
    lift,
    multiset,
    translate,
    word,
)


@dataclass(frozen=True)
class QNet:
    theory: Theory
    places: tuple[str, ...]
    transitions: Mapping[str, tuple[FreeElem, FreeElem]]

    def arcs(self, name: str) -> tuple[FreeElem, FreeElem]:
        return self.transitions[name]


@dataclass(frozen=True)
class NetMorphism:
    source: QNet
    target: QNet
    f: Mapping[str, str]
    g: Mapping[str, str]


def validate_net(net: QNet) -> list[str]:
    """Diagnostics for declared-place and theory violations; empty iff valid."""
    diags = []
    if len(set(net.places)) != len(net.places):
        diags.append("duplicate place names")
    declared = set(net.places)
    for name, (src, tgt) in net.transitions.items():
        for role, elem in (("src", src), ("tgt", tgt)):
            if elem.theory is not net.theory:
                diags.append(f"transition {name!r} {role} has theory {elem.theory.value},"
                             f" net is {net.theory.value}")
                continue
            undeclared = elem.atoms() - declared
            if undeclared:
                diags.append(f"transition {name!r} {role} mentions undeclared places"
                             f" {sorted(undeclared)}")
    return diags


def validate_morphism(h: NetMorphism) -> list[str]:
    """Per-transition counterexamples to the two commuting squares."""
    missing_t = set(h.source.transitions) - set(h.f)
    missing_p = set(h.source.places) - set(h.g)
    if missing_t or missing_p:
        raise UnmappedNameError(
            f"partial morphism: unmapped transitions {sorted(missing_t)},"
            f" unmapped places {sorted(missing_p)}")
    diags = []
    if h.source.theory is not h.target.theory:
        diags.append(f"theory mismatch: {h.source.theory.value} vs {h.target.theory.value}")
        return diags
    target_places = set(h.target.places)
    for p in h.source.places:
        if h.g[p] not in target_places:
            diags.append(f"place {p!r} maps to undeclared {h.g[p]!r}")
    for name in h.source.transitions:
        if h.f[name] not in h.target.transitions:
            diags.append(f"transition {name!r} maps to unknown {h.f[name]!r}")
    if diags:
        return diags
    for name, (src, tgt) in h.source.transitions.items():
        img_src, img_tgt = h.target.transitions[h.f[name]]
        want_src = lift(h.source.theory, h.g, src)
        want_tgt = lift(h.source.theory, h.g, tgt)
        if img_src != want_src:
            diags.append(f"source square fails at {name!r}: image has {img_src.payload},"
                         f" lifted source is {want_src.payload}")
        if img_tgt != want_tgt:
            diags.append(f"target square fails at {name!r}: image has {img_tgt.payload},"
                         f" lifted target is {want_tgt.payload}")
    return diags


def identity_morphism(net: QNet) -> NetMorphism:
    return NetMorphism(net, net,
                       {t: t for t in net.transitions},
                       {p: p for p in net.places})


def compose(later: NetMorphism, earlier: NetMorphism) -> NetMorphism:
    """Componentwise composition; ``earlier`` is applied first."""
    if earlier.target != later.source:
        raise TheoryMismatchError("morphisms are not composable")
    return NetMorphism(
        earlier.source, later.target,
        {t: later.f[earlier.f[t]] for t in earlier.f},
        {p: later.g[earlier.g[p]] for p in earlier.g},
    )


def apply_net_functor(arrow: TheoryArrow, net: QNet) -> QNet:
    """Translate every arc along a catalog arrow, keeping all names."""
    if net.theory is not arrow.source:
        raise TheoryMismatchError(
            f"arrow {arrow.value} starts at {arrow.source.value}, net is {net.theory.value}")
    transitions = {
        name: (translate(arrow, src), translate(arrow, tgt))
        for name, (src, tgt) in net.transitions.items()
    }
    return QNet(arrow.target, net.places, transitions)


def coproduct(p1: QNet, p2: QNet) -> tuple[QNet, NetMorphism, NetMorphism]:
    """Disjoint union with ``L.``/``R.`` name tags; returns both injections."""
    if p1.theory is not p2.theory:
        raise TheoryMismatchError("coproduct needs a shared theory")
    th = p1.theory
    g1 = {p: "L." + p for p in p1.places}
    g2 = {p: "R." + p for p in p2.places}
    places = tuple(g1[p] for p in p1.places) + tuple(g2[p] for p in p2.places)
    transitions = {}
    f1, f2 = {}, {}
    for name, (src, tgt) in p1.transitions.items():
        f1[name] = "L." + name
        transitions["L." + name] = (lift(th, g1, src), lift(th, g1, tgt))
    for name, (src, tgt) in p2.transitions.items():
        f2[name] = "R." + name
        transitions["R." + name] = (lift(th, g2, src), lift(th, g2, tgt))
    out = QNet(th, places, transitions)
    return out, NetMorphism(p1, out, f1, g1), NetMorphism(p2, out, f2, g2)


def _pair_name(x: str, y: str) -> str:
    return f"({x},{y})"


def _count_tables(rows: list[tuple[str, int]], cols: list[tuple[str, int]]) -> Iterator[dict]:
    """All nonnegative integer tables with the given row and column sums."""
    if sum(c for _, c in rows) != sum(c for _, c in cols):
        return
    col_names = [c for c, _ in cols]

    def fill(i: int, remaining_cols: tuple[int, ...], acc: dict) -> Iterator[dict]:
        if i == len(rows):
            if all(r == 0 for r in remaining_cols):
                yield dict(acc)
            return
        row_name, row_sum = rows[i]

        def fill_row(j: int, left: int, rem: tuple[int, ...]) -> Iterator[tuple[dict, tuple[int, ...]]]:
            if j == len(col_names):
                if left == 0:
                    yield {}, rem
                return
            for v in range(min(left, rem[j]) + 1):
                rem2 = rem[:j] + (rem[j] - v,) + rem[j + 1:]
                for partial, rem3 in fill_row(j + 1, left - v, rem2):
                    if v:
                        partial = {**partial, _pair_name(row_name, col_names[j]): v}
                    yield partial, rem3

        for partial, rem in fill_row(0, row_sum, remaining_cols):
            yield from fill(i + 1, rem, {**acc, **partial})

    yield from fill(0, tuple(c for _, c in cols), {})


def _marginal_fiber(th: Theory, a: FreeElem, b: FreeElem) -> list[FreeElem]:
    """All elements over paired places projecting to ``a`` and ``b``."""
    if th is Theory.CMON:
        rows = list(a.payload)
        cols = list(b.payload)
        return [multiset(th, table) for table in _count_tables(rows, cols)]
    if th is Theory.MON:
        if len(a.payload) != len(b.payload):
            return []
        return [word(_pair_name(x, y) for x, y in zip(a.payload, b.payload))]
    subsets_of = list(itertools.product(sorted(a.payload), sorted(b.payload)))
    out = []
    for bits in itertools.product((False, True), repeat=len(subsets_of)):
        chosen = [pair for pair, keep in zip(subsets_of, bits) if keep]
        if {x for x, _ in chosen} == set(a.payload) and {y for _, y in chosen} == set(b.payload):
            out.append(FreeElem(Theory.SEMILAT,
                                tuple(sorted(_pair_name(x, y) for x, y in chosen))))
    return out


def product(p1: QNet, p2: QNet) -> tuple[QNet, NetMorphism, NetMorphism]:
    """Categorical product for theories whose marginal fibers are finite.

    Transitions are one per pair of input transitions and per pair of
    source/target fiber elements. ABGRP and GRP are rejected: the fiber over a
    pair of markings is infinite there, so the product net has infinitely many
    transitions.
    """
    if p1.theory is not p2.theory:
        raise TheoryMismatchError("product needs a shared theory")
    th = p1.theory
    if th not in (Theory.CMON, Theory.MON, Theory.SEMILAT):
        raise UnsupportedOperationError(
            f"product over {th.value} is not finitely representable")
    places = tuple(_pair_name(x, y) for x in p1.places for y in p2.places)
    g1 = {}
    g2 = {}
    for x in p1.places:
        for y in p2.places:
            g1[_pair_name(x, y)] = x
            g2[_pair_name(x, y)] = y
    transitions = {}
    f1, f2 = {}, {}
    for n1, (s1, t1) in sorted(p1.transitions.items()):
        for n2, (s2, t2) in sorted(p2.transitions.items()):
            srcs = sorted(_marginal_fiber(th, s1, s2), key=lambda e: e.payload)
            tgts = sorted(_marginal_fiber(th, t1, t2), key=lambda e: e.payload)
            for k, (u, v) in enumerate(itertools.product(srcs, tgts)):
                name = f"{_pair_name(n1, n2)}@{k}"
                transitions[name] = (u, v)
                f1[name] = n1
                f2[name] = n2
    out = QNet(th, places, transitions)
    return out, NetMorphism(out, p1, f1, g1), NetMorphism(out, p2, f2, g2)


def enumerate_morphisms(p: QNet, q: QNet) -> list[NetMorphism]:
    """Brute-force the full hom-set; intended for small nets in tests/suites."""
    if p.theory is not q.theory:
        return []
    src_places = list(p.places)
    src_trans = sorted(p.transitions)
    out = []
    place_choices = itertools.product(q.places, repeat=len(src_places)) \
        if src_places else [()]
    for g_imgs in place_choices:
        g = dict(zip(src_places, g_imgs))
        trans_choices = itertools.product(sorted(q.transitions), repeat=len(src_trans)) \
            if src_trans else [()]
        for f_imgs in trans_choices:
            f = dict(zip(src_trans, f_imgs))
            h = NetMorphism(p, q, f, g)
            if not validate_morphism(h):
                out.append(h)
    return out
