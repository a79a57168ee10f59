"""Freely added symmetries for word-marked nets, and linearizations.

Symmetries are represented extensionally as position permutations of a word
marking, so permutation composition and the braid axioms hold definitionally;
the interesting interaction is sliding a firing layer past a permutation,
which the equality search performs in both directions.

Linearization sends a multiset-marked net to the word-marked nets in its
abelianization preimage: every ordering of every arc payload.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Union

from . import freecat
from .freecat import (
    Comp,
    EqVerdict,
    Gen,
    Ident,
    IllTypedTermError,
    LayeredForm,
    MorTerm,
    Oper,
    _context,
    _distinct,
    _equal,
    _unknown,
    default_budget,
)
from .net import QNet
from .theory import (
    FreeElem,
    Theory,
    TheoryArrow,
    UnsupportedOperationError,
    combine,
    invert,
    translate,
)


@dataclass(frozen=True)
class Perm:
    """Position permutation of a word marking: letter ``i`` of ``word`` moves
    to position ``mapping[i]`` of the target word."""

    word: FreeElem
    mapping: tuple[int, ...]


SymTerm = Union[MorTerm, Perm]


def _apply_perm(payload: tuple, mapping: tuple[int, ...]) -> tuple:
    out: list = [None] * len(payload)
    for i, letter in enumerate(payload):
        out[mapping[i]] = letter
    return tuple(out)


def _check_perm(t: Perm, theory: Theory) -> None:
    if theory not in (Theory.MON, Theory.GRP):
        raise IllTypedTermError("permutations need a word theory")
    if t.word.theory is not theory:
        raise IllTypedTermError("permutation word has the wrong theory")
    n = len(t.word.payload)
    if sorted(t.mapping) != list(range(n)):
        raise IllTypedTermError("mapping is not a permutation of the letter positions")
    if theory is Theory.GRP:
        permuted = _apply_perm(t.word.payload, t.mapping)
        if any(permuted[i][0] == permuted[i + 1][0]
               and permuted[i][1] == -permuted[i + 1][1]
               for i in range(len(permuted) - 1)):
            raise UnsupportedOperationError(
                "permutation target would cancel; not representable letterwise")


def perm_tgt(t: Perm) -> FreeElem:
    return FreeElem(t.word.theory, _apply_perm(t.word.payload, t.mapping))


def braiding(x: FreeElem, y: FreeElem) -> Perm:
    """The block swap x.y -> y.x."""
    if x.theory is not y.theory or x.theory not in (Theory.MON, Theory.GRP):
        raise UnsupportedOperationError("braiding is defined for word markings")
    word = combine(x.theory, x, y)
    if len(word.payload) != len(x.payload) + len(y.payload):
        raise UnsupportedOperationError(
            "braiding across a cancelling boundary is not representable letterwise")
    n, m = len(x.payload), len(y.payload)
    mapping = tuple(i + m for i in range(n)) + tuple(j for j in range(m))
    perm = Perm(word, mapping)
    _check_perm(perm, x.theory)
    return perm


@dataclass(frozen=True)
class _PermLayer:
    word: FreeElem
    mapping: tuple[int, ...]


SymLayer = Union[FreeElem, _PermLayer]


@dataclass(frozen=True)
class SymForm:
    start: FreeElem
    layers: tuple[SymLayer, ...]


def _is_perm_layer(layer: SymLayer) -> bool:
    return isinstance(layer, _PermLayer)


def _sym_layer_src(layer: SymLayer, ctx) -> FreeElem:
    if _is_perm_layer(layer):
        return layer.word
    return freecat._layer_src(layer, ctx)


def _sym_layer_tgt(layer: SymLayer, ctx) -> FreeElem:
    if _is_perm_layer(layer):
        return FreeElem(layer.word.theory, _apply_perm(layer.word.payload, layer.mapping))
    return freecat._layer_tgt(layer, ctx)


def _identity_mapping(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def _drop_trivial(layers: tuple[SymLayer, ...]) -> tuple[SymLayer, ...]:
    out = []
    for layer in layers:
        if _is_perm_layer(layer):
            if layer.mapping != _identity_mapping(len(layer.mapping)):
                out.append(layer)
        elif not freecat._pure_id(layer):
            out.append(layer)
    return tuple(out)


def _pad_after(layer: SymLayer, suffix: FreeElem, ctx) -> SymLayer:
    th = suffix.theory
    if _is_perm_layer(layer):
        n = len(layer.word.payload)
        word = combine(th, layer.word, suffix)
        mapping = layer.mapping + tuple(n + k for k in range(len(suffix.payload)))
        return _PermLayer(word, mapping)
    return combine(th, layer, freecat._identity_layer(th, suffix))


def _pad_before(prefix: FreeElem, layer: SymLayer, ctx) -> SymLayer:
    th = prefix.theory
    if _is_perm_layer(layer):
        m = len(prefix.payload)
        word = combine(th, prefix, layer.word)
        mapping = tuple(range(m)) + tuple(m + t for t in layer.mapping)
        return _PermLayer(word, mapping)
    return combine(th, freecat._identity_layer(th, prefix), layer)


def _sym_layers(t: SymTerm, ctx) -> tuple[FreeElem, FreeElem, tuple[SymLayer, ...]]:
    th = ctx.net.theory
    if isinstance(t, Perm):
        _check_perm(t, th)
        if t.word.atoms() - set(ctx.net.places):
            raise IllTypedTermError("permutation word mentions undeclared places")
        tgt = perm_tgt(t)
        return t.word, tgt, (_PermLayer(t.word, t.mapping),)
    if isinstance(t, (Gen, Ident)):
        src, tgt = freecat._endpoints(t, ctx)
        layers = freecat._layers_of(t, ctx)[2]
        return src, tgt, layers
    if isinstance(t, Comp):
        src_b, tgt_b, layers_b = _sym_layers(t.before, ctx)
        src_a, tgt_a, layers_a = _sym_layers(t.after, ctx)
        if tgt_b != src_a:
            raise IllTypedTermError("composite mismatch in symmetric term")
        return src_b, tgt_a, layers_b + layers_a
    if isinstance(t, Oper) and t.op == "combine":
        if len(t.args) < 2:
            raise IllTypedTermError("combine needs at least two arguments")
        src, tgt, layers = _sym_layers(t.args[0], ctx)
        for arg in t.args[1:]:
            src_b, tgt_b, layers_b = _sym_layers(arg, ctx)
            if (all(not _is_perm_layer(l) for l in layers)
                    and all(not _is_perm_layer(l) for l in layers_b)):
                layers = freecat._zip_layers(th, (src, layers), (src_b, layers_b))
            else:
                layers = tuple(_pad_after(l, src_b, ctx) for l in layers) + \
                    tuple(_pad_before(tgt, l, ctx) for l in layers_b)
            src = combine(th, src, src_b)
            tgt = combine(th, tgt, tgt_b)
        return src, tgt, layers
    if isinstance(t, Oper) and t.op == "invert":
        if th is not Theory.GRP:
            raise IllTypedTermError("invert needs the GRP theory")
        if len(t.args) != 1:
            raise IllTypedTermError("invert takes exactly one argument")
        src, tgt, layers = _sym_layers(t.args[0], ctx)
        inverted = []
        for layer in layers:
            if _is_perm_layer(layer):
                n = len(layer.word.payload)
                mapping = tuple(n - 1 - layer.mapping[n - 1 - i] for i in range(n))
                inverted.append(_PermLayer(invert(layer.word), mapping))
            else:
                inverted.append(invert(layer))
        return invert(src), invert(tgt), tuple(inverted)
    raise IllTypedTermError(f"not a symmetric process term: {t!r}")


def sym_layered(t: SymTerm, net: QNet) -> SymForm:
    ctx = _context(net)
    src, _tgt, layers = _sym_layers(t, ctx)
    return SymForm(src, _drop_trivial(layers))


def _blocks(letters: tuple, lengths: list[int]) -> list[tuple[int, int]]:
    out = []
    offset = 0
    for n in lengths:
        out.append((offset, n))
        offset += n
    return out


def _slide_before_perm(layer: FreeElem, perm: _PermLayer, ctx) -> list[tuple[_PermLayer, FreeElem]]:
    """Rewrite [gen layer, perm] as [perm', gen layer'] when the permutation
    moves whole target blocks of the layer."""
    th = ctx.net.theory
    letters = layer.payload
    tgt_words = [freecat._identity_layer(
        th, freecat._layer_tgt(freecat._letter_elem(th, l), ctx)).payload
        for l in letters]
    src_words = [freecat._identity_layer(
        th, freecat._layer_src(freecat._letter_elem(th, l), ctx)).payload
        for l in letters]
    if any(len(w) == 0 for w in tgt_words + src_words):
        return []
    blocks = _blocks(letters, [len(w) for w in tgt_words])
    mapping = perm.mapping
    images = []
    for offset, size in blocks:
        positions = [mapping[offset + k] for k in range(size)]
        if any(positions[k + 1] != positions[k] + 1 for k in range(size - 1)):
            return []
        images.append(positions[0])
    order = sorted(range(len(letters)), key=lambda j: images[j])
    new_letters = tuple(letters[j] for j in order)
    new_layer = FreeElem(th, new_letters) if th is Theory.MON else \
        freecat._reduced_elem(new_letters)
    if len(new_layer.payload) != len(new_letters):
        return []
    src_blocks = _blocks(letters, [len(w) for w in src_words])
    new_src_offsets = {}
    offset = 0
    for j in order:
        new_src_offsets[j] = offset
        offset += len(src_words[j])
    new_mapping = [None] * sum(len(w) for w in src_words)
    for j, (off, size) in enumerate(src_blocks):
        for k in range(size):
            new_mapping[off + k] = new_src_offsets[j] + k
    prev_word = _sym_layer_src(layer, ctx)
    if len(prev_word.payload) != len(new_mapping):
        return []
    new_perm = _PermLayer(prev_word, tuple(new_mapping))
    if th is Theory.GRP and not freecat._is_reduced(
            _apply_perm(prev_word.payload, new_perm.mapping)):
        return []
    return [(new_perm, new_layer)]


def _slide_after_perm(perm: _PermLayer, layer: FreeElem, ctx) -> list[tuple[FreeElem, _PermLayer]]:
    """Rewrite [perm, gen layer] as [gen layer', perm'] when the permutation's
    inverse moves whole source blocks of the layer."""
    th = ctx.net.theory
    letters = layer.payload
    src_words = [freecat._identity_layer(
        th, freecat._layer_src(freecat._letter_elem(th, l), ctx)).payload
        for l in letters]
    tgt_words = [freecat._identity_layer(
        th, freecat._layer_tgt(freecat._letter_elem(th, l), ctx)).payload
        for l in letters]
    if any(len(w) == 0 for w in src_words + tgt_words):
        return []
    blocks = _blocks(letters, [len(w) for w in src_words])
    inverse = [None] * len(perm.mapping)
    for i, target in enumerate(perm.mapping):
        inverse[target] = i
    starts = []
    for offset, size in blocks:
        positions = [inverse[offset + k] for k in range(size)]
        if any(positions[k + 1] != positions[k] + 1 for k in range(size - 1)):
            return []
        starts.append(positions[0])
    order = sorted(range(len(letters)), key=lambda j: starts[j])
    new_letters = tuple(letters[j] for j in order)
    new_layer = FreeElem(th, new_letters) if th is Theory.MON else \
        freecat._reduced_elem(new_letters)
    if len(new_layer.payload) != len(new_letters):
        return []
    tgt_blocks = _blocks(letters, [len(w) for w in tgt_words])
    new_tgt_offsets = {}
    offset = 0
    for j in order:
        new_tgt_offsets[j] = offset
        offset += len(tgt_words[j])
    new_mapping = [None] * sum(len(w) for w in tgt_words)
    for j, (off, size) in enumerate(tgt_blocks):
        for k in range(size):
            new_mapping[new_tgt_offsets[j] + k] = off + k
    new_word = _sym_layer_tgt(new_layer, ctx)
    if len(new_word.payload) != len(new_mapping):
        return []
    new_perm = _PermLayer(new_word, tuple(new_mapping))
    if th is Theory.GRP and not freecat._is_reduced(
            _apply_perm(new_word.payload, new_perm.mapping)):
        return []
    return [(new_layer, new_perm)]


def _sym_neighbors(form: SymForm, ctx) -> Iterator[SymForm]:
    layers = form.layers
    for i in range(len(layers) - 1):
        a, b = layers[i], layers[i + 1]
        if _is_perm_layer(a) and _is_perm_layer(b):
            composed = tuple(b.mapping[a.mapping[k]] for k in range(len(a.mapping)))
            merged: tuple[SymLayer, ...]
            if composed == _identity_mapping(len(composed)):
                merged = ()
            else:
                merged = (_PermLayer(a.word, composed),)
            yield SymForm(form.start, layers[:i] + merged + layers[i + 2:])
        elif not _is_perm_layer(a) and not _is_perm_layer(b):
            for n in freecat._merge_candidates(a, b, ctx):
                mid = () if freecat._pure_id(n) else (n,)
                yield SymForm(form.start, layers[:i] + mid + layers[i + 2:])
        elif not _is_perm_layer(a) and _is_perm_layer(b):
            for p, l in _slide_before_perm(a, b, ctx):
                yield SymForm(form.start, layers[:i] + (p, l) + layers[i + 2:])
        else:
            for l, p in _slide_after_perm(a, b, ctx):
                yield SymForm(form.start, layers[:i] + (l, p) + layers[i + 2:])
    for i, layer in enumerate(layers):
        if not _is_perm_layer(layer):
            for x, y in freecat._split_candidates(layer, ctx):
                yield SymForm(form.start, layers[:i] + (x, y) + layers[i + 1:])


def _sym_occurrences(form: SymForm) -> dict[str, int]:
    totals: dict[str, int] = {}
    for layer in form.layers:
        if _is_perm_layer(layer):
            continue
        for name, count in freecat._form_occurrences(
                LayeredForm(form.start, (layer,))).items():
            totals[name] = totals.get(name, 0) + count
    return {n: c for n, c in totals.items() if c != 0}


def sym_repr(form: SymForm) -> str:
    parts = []
    for layer in form.layers:
        if _is_perm_layer(layer):
            parts.append(f"perm{list(layer.mapping)}")
        else:
            parts.append(freecat.layered_repr(LayeredForm(form.start, (layer,))))
    return " ; ".join(parts) if parts else "identity"


def sym_equal(t1: SymTerm, t2: SymTerm, net: QNet,
              budget: int | None = None) -> EqVerdict:
    """Equality in the freely symmetrized category on a word-marked net.

    ``Distinct`` comes only from invariants (endpoints, generator counts);
    the search certifies ``Equal`` and otherwise reports ``Unknown``.
    """
    if net.theory not in (Theory.MON, Theory.GRP):
        raise UnsupportedOperationError("symmetric terms need a word-marked net")
    if budget is None:
        budget = default_budget()
    ctx = _context(net)
    src1, tgt1, layers1 = _sym_layers(t1, ctx)
    src2, tgt2, layers2 = _sym_layers(t2, ctx)
    if (src1, tgt1) != (src2, tgt2):
        return _distinct("source/target pairs differ")
    f1 = SymForm(src1, _drop_trivial(layers1))
    f2 = SymForm(src2, _drop_trivial(layers2))
    if f1 == f2:
        return _equal("identical layered forms")
    if _sym_occurrences(f1) != _sym_occurrences(f2):
        return _distinct("generator occurrence counts differ")
    sides: tuple[dict, dict] = ({f1: None}, {f2: None})
    queues = (deque([f1]), deque([f2]))
    expansions = 0
    while queues[0] or queues[1]:
        side = 0 if (queues[0] and (not queues[1] or len(queues[0]) <= len(queues[1]))) else 1
        node = queues[side].popleft()
        expansions += 1
        if expansions > budget:
            return _unknown(f"budget of {budget} nodes exhausted")
        for nxt in _sym_neighbors(node, ctx):
            if nxt in sides[side]:
                continue
            sides[side][nxt] = node
            if nxt in sides[1 - side]:
                return _equal("rewrite path found",
                              (sym_repr(f1), sym_repr(nxt), sym_repr(f2)))
            queues[side].append(nxt)
    return _unknown("closures exhausted; symmetric move set is not known complete")


def erase_symmetries(t: SymTerm) -> MorTerm:
    """Replace every permutation node by the identity on its word."""
    if isinstance(t, Perm):
        return Ident(t.word)
    if isinstance(t, Comp):
        return Comp(erase_symmetries(t.after), erase_symmetries(t.before))
    if isinstance(t, Oper):
        return Oper(t.op, tuple(erase_symmetries(a) for a in t.args))
    return t


def translate_term(arrow: TheoryArrow, t: MorTerm) -> MorTerm:
    """Push a process term along a catalog arrow (objects are translated,
    generators keep their names)."""
    if isinstance(t, Gen):
        return t
    if isinstance(t, Ident):
        return Ident(translate(arrow, t.obj))
    if isinstance(t, Comp):
        return Comp(translate_term(arrow, t.after), translate_term(arrow, t.before))
    if isinstance(t, Oper):
        return Oper(t.op, tuple(translate_term(arrow, a) for a in t.args))
    raise IllTypedTermError(f"not a process term: {t!r}")


def _distinct_orderings(letters: list) -> list[tuple]:
    """Sorted distinct permutations of a letter multiset."""
    return sorted(set(itertools.permutations(letters)))


def _payload_letters(x: FreeElem) -> list:
    if x.theory is Theory.CMON:
        out = []
        for p, c in x.payload:
            out.extend([p] * c)
        return out
    out = []
    for p, c in x.payload:
        out.extend([(p, 1 if c > 0 else -1)] * abs(c))
    return out


def linearizations(p: QNet) -> list[QNet]:
    """Every word-marked net in the abelianization preimage of ``p``.

    CMON nets yield MON nets (all orderings of every arc); ABGRP nets yield
    GRP nets over the fixed signed-letter spelling of each arc, positives
    before negatives, which truncates the infinite true preimage.
    """
    if p.theory is Theory.CMON:
        target = Theory.MON
    elif p.theory is Theory.ABGRP:
        target = Theory.GRP
    else:
        raise UnsupportedOperationError(
            f"linearization applies to CMON or ABGRP nets, not {p.theory.value}")
    names = sorted(p.transitions)
    per_transition = []
    for name in names:
        src, tgt = p.transitions[name]
        pairs = [(FreeElem(target, s), FreeElem(target, t))
                 for s in _distinct_orderings(_payload_letters(src))
                 for t in _distinct_orderings(_payload_letters(tgt))]
        per_transition.append(pairs)
    out = []
    for assignment in itertools.product(*per_transition):
        transitions = {name: arcs for name, arcs in zip(names, assignment)}
        out.append(QNet(target, p.places, transitions))
    return out


def linearization_count(p: QNet) -> int:
    """Closed form for ``len(linearizations(p))``: a product of multinomials."""
    import math

    total = 1
    for src, tgt in p.transitions.values():
        for elem in (src, tgt):
            letters = _payload_letters(elem)
            ways = math.factorial(len(letters))
            for _, c in elem.payload:
                ways //= math.factorial(abs(c))
            total *= ways
    return total


def linearization_sum(p: QNet) -> QNet:
    """One word-marked net summing every linearization on transitions.

    The place set is shared; transition ``t`` of linearization ``i`` becomes
    ``"{i}.{t}"``.
    """
    if p.theory is not Theory.CMON:
        raise UnsupportedOperationError("the summed linearization net is for CMON nets")
    transitions = {}
    for i, lin in enumerate(linearizations(p)):
        for name, arcs in lin.transitions.items():
            transitions[f"{i}.{name}"] = arcs
    return QNet(Theory.MON, p.places, transitions)
