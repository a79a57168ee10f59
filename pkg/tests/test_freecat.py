import pytest

from qnets.freecat import (
    Comp,
    Gen,
    Ident,
    IllTypedTermError,
    Oper,
    form_tgt,
    hom_enumerate,
    hom_nonempty_group,
    layered,
    layered_to_term,
    mor_equal,
    mor_src,
    mor_tgt,
    reachable,
    reachability_dot,
    underlying_net,
    unit_into_truncation,
    _context,
)
from qnets.net import validate_morphism
from qnets.theory import (
    Theory,
    UnsupportedOperationError,
    finset,
    neutral,
    word,
)

from netzoo import cmon, elementary, integer_net, intvec, petri, prenet
from oracle_rewrite import oracle_equal

CHAIN = petri("abc", {"t": ({"a": 1}, {"b": 1}), "u": ({"b": 1}, {"c": 1})})
LOOP = petri("a", {"t": ({"a": 1}, {"a": 1}), "u": ({"a": 1}, {"a": 1})})


def test_mor_src_tgt_examples():
    comp = Comp(Gen("u"), Gen("t"))
    assert mor_src(comp, CHAIN) == cmon({"a": 1})
    assert mor_tgt(comp, CHAIN) == cmon({"c": 1})
    par = Oper("combine", (Gen("t"), Ident(cmon({"c": 1}))))
    assert mor_src(par, CHAIN) == cmon({"a": 1, "c": 1})
    with pytest.raises(IllTypedTermError):
        mor_src(Comp(Gen("t"), Gen("u")), CHAIN)


def test_layered_identity_and_parallel():
    ident = layered(Ident(cmon({"a": 2})), CHAIN)
    assert ident.layers == ()
    assert ident.start == cmon({"a": 2})
    par = layered(Oper("combine", (Gen("t"), Gen("u"))), CHAIN)
    assert len(par.layers) == 1
    assert dict(par.layers[0].payload) == {"t": 1, "u": 1}


def test_layered_padding_example():
    # Fire t against frame a, then u against frame a: hand-derived layers.
    term = Comp(
        Oper("combine", (Gen("u"), Ident(cmon({"a": 1})))),
        Oper("combine", (Gen("t"), Ident(cmon({"a": 1})))))
    form = layered(term, CHAIN)
    assert form.start == cmon({"a": 2})
    assert [dict(l.payload) for l in form.layers] == [
        {"t": 1, "id.a": 1}, {"u": 1, "id.a": 1}]
    rebuilt = layered_to_term(form, CHAIN)
    assert mor_equal(rebuilt, term, CHAIN).is_equal


def test_mor_equal_unit_law():
    v = mor_equal(Comp(Ident(cmon({"b": 1})), Gen("t")), Gen("t"), CHAIN)
    assert v.is_equal


def test_mor_equal_interchange():
    both = Oper("combine", (Gen("t"), Gen("u")))
    seq = Comp(
        Oper("combine", (Gen("u"), Ident(cmon({"b": 1})))),
        Oper("combine", (Gen("t"), Ident(cmon({"b": 1})))))
    assert mor_equal(both, seq, CHAIN).is_equal
    assert oracle_equal(both, seq, CHAIN)


def test_mor_equal_orders_distinct():
    t_then_u = Comp(Gen("u"), Gen("t"))
    u_then_t = Comp(Gen("t"), Gen("u"))
    verdict = mor_equal(t_then_u, u_then_t, LOOP)
    assert verdict.is_distinct
    assert not oracle_equal(t_then_u, u_then_t, LOOP)


def test_mor_equal_semilat_idempotence():
    net = elementary("ab", {"t": ("a", "b")})
    v = mor_equal(Oper("combine", (Gen("t"), Gen("t"))), Gen("t"), net)
    assert v.is_equal


def test_mor_equal_endpoint_separation():
    v = mor_equal(Gen("t"), Gen("u"), CHAIN)
    assert v.is_distinct


def test_hom_enumerate_examples():
    homs = hom_enumerate(CHAIN, cmon({"a": 1}), cmon({"a": 1}), 2, 2)
    assert Ident(cmon({"a": 1})) in homs
    single = petri("ab", {"t": ({"a": 1}, {"b": 1})})
    assert hom_enumerate(single, cmon({"a": 1}), cmon({"b": 1}), 2, 2) == [Gen("t")]
    doubled = hom_enumerate(single, cmon({"a": 2}), cmon({"b": 2}), 2, 2)
    assert len(doubled) == 1
    with pytest.raises(UnsupportedOperationError):
        hom_enumerate(integer_net("a", {}), intvec({}), intvec({}), 1, 1)
    with pytest.raises(UnsupportedOperationError):
        hom_enumerate(single, cmon({}), cmon({}), 0, 1)


def test_reachable_cmon_example():
    net = petri("ab", {"t": ({"a": 1}, {"b": 1})})
    result = reachable(net, cmon({"a": 2}), 2)
    assert set(result.markings) == {cmon({"a": 2}), cmon({"a": 1, "b": 1}),
                                    cmon({"b": 2})}
    empty = reachable(petri("a", {}), cmon({"a": 1}), 3)
    assert set(empty.markings) == {cmon({"a": 1})}


def test_reachable_mon_requires_contiguous_factor():
    net = prenet("abc", {"t": ("aa", "c")})
    result = reachable(net, word("aba"), 3)
    assert set(result.markings) == {word("aba")}
    hit = reachable(net, word("aab"), 3)
    assert word("cb") in hit.markings


def test_reachable_semilat_contexts():
    net = elementary("ab", {"t": ("a", "b")})
    result = reachable(net, finset("a"), 1)
    assert set(result.markings) == {finset("a"), finset("b"), finset("ab")}
    for m in result.markings:
        assert list(m.payload) == sorted(set(m.payload))


def test_reachable_group_rejected():
    with pytest.raises(UnsupportedOperationError):
        reachable(integer_net("a", {"t": ({"a": 1}, {})}), intvec({"a": 1}), 1)


def test_reachability_dot_output():
    net = petri("ab", {"t": ({"a": 1}, {"b": 1})})
    dot = reachability_dot(reachable(net, cmon({"a": 1}), 1))
    assert dot.startswith("digraph")
    assert '"{\\"a\\":1}"' in dot


def test_hom_nonempty_group_examples():
    net = integer_net("ab", {"t": ({"a": 1}, {"b": 1})})
    assert hom_nonempty_group(net, intvec({"a": 1}), intvec({"a": 1}))
    assert hom_nonempty_group(net, intvec({"b": 1}), intvec({"a": 1}))
    parity = integer_net("a", {"t": ({"a": 2}, {})})
    assert not hom_nonempty_group(parity, intvec({"a": 1}), intvec({}))
    with pytest.raises(UnsupportedOperationError):
        hom_nonempty_group(petri("a", {}), cmon({}), cmon({}))


def test_group_cancellation_equalities():
    net = integer_net("ab", {"t": ({"a": 1}, {"b": 1})})
    cancel = Oper("combine", (Gen("t"), Oper("invert", (Gen("t"),))))
    assert mor_equal(cancel, Ident(neutral(Theory.ABGRP)), net).is_equal
    # Backward firing b -> a: whisker the inverted generator with a frame.
    backward = Oper("combine", (Oper("invert", (Gen("t"),)),
                                Ident(intvec({"a": 1, "b": 1}))))
    assert mor_src(backward, net) == intvec({"b": 1})
    assert mor_tgt(backward, net) == intvec({"a": 1})


def test_underlying_net_truncation():
    net = petri("ab", {"t": ({"a": 1}, {"b": 1})})
    trunc = underlying_net(net, 2)
    loops = [n for n, (s, t) in trunc.net.transitions.items() if s == t]
    assert len(loops) >= len(trunc.objects)
    unit_m = unit_into_truncation(net, trunc)
    assert validate_morphism(unit_m) == []


def test_layered_moves_preserve_endpoints():
    ctx = _context(CHAIN)
    term = Comp(Oper("combine", (Gen("u"), Ident(cmon({"a": 1})))),
                Oper("combine", (Gen("t"), Ident(cmon({"a": 1})))))
    form = layered(term, CHAIN)
    from qnets.freecat import _neighbors

    for neighbor in _neighbors(form, ctx):
        assert neighbor.start == form.start
        assert form_tgt(neighbor, ctx) == form_tgt(form, ctx)


@pytest.mark.parametrize("theory_net,terms", [
    (CHAIN, [Comp(Gen("u"), Gen("t")),
             Comp(Comp(Ident(cmon({"c": 1})), Gen("u")), Gen("t"))]),
    (LOOP, [Comp(Gen("t"), Gen("t")), Comp(Gen("t"), Gen("t"))]),
])
def test_oracle_spot_agreement(theory_net, terms):
    t1, t2 = terms
    verdict = mor_equal(t1, t2, theory_net)
    assert not verdict.is_unknown
    assert verdict.is_equal == oracle_equal(t1, t2, theory_net)


def test_equal_terms_share_occurrence_counts():
    from qnets.freecat import _form_occurrences

    both = Oper("combine", (Gen("t"), Gen("u")))
    seq = Comp(
        Oper("combine", (Gen("u"), Ident(cmon({"b": 1})))),
        Oper("combine", (Gen("t"), Ident(cmon({"b": 1})))))
    assert mor_equal(both, seq, CHAIN).is_equal
    assert _form_occurrences(layered(both, CHAIN)) \
        == _form_occurrences(layered(seq, CHAIN))


def test_reach_hom_consistency_both_ways():
    net = petri("ab", {"t": ({"a": 1}, {"b": 1})})
    start = cmon({"a": 2})
    reach = set(reachable(net, start, 2).markings)
    candidates = [cmon(c) for c in
                  ({"a": 2}, {"a": 1, "b": 1}, {"b": 2}, {"a": 1}, {"b": 1}, {})]
    for marking in candidates:
        homs = hom_enumerate(net, start, marking, 2, 4)
        assert bool(homs) == (marking in reach)


def test_budget_env_override(monkeypatch):
    from qnets.freecat import default_budget

    assert default_budget() == 10_000
    monkeypatch.setenv("QNET_BUDGET", "123")
    assert default_budget() == 123


def test_free_edges_morphism_validates():
    from qnets.net import NetMorphism
    from qnets.reflexive import (add_identities_morphism, free_edges_morphism,
                                 validate_graph_morphism)

    p = petri("ab", {"t": ({"a": 1}, {"b": 1})})
    q = petri("c", {"s": ({"c": 1}, {"c": 1})})
    m = add_identities_morphism(NetMorphism(p, q, {"t": "s"}, {"a": "c", "b": "c"}))
    assert validate_graph_morphism(free_edges_morphism(m)) == []
