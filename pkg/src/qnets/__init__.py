"""Nets marked over a catalog of algebraic theories and their process semantics."""

from .theory import (
    FreeElem,
    QnetError,
    Theory,
    TheoryArrow,
    combine,
    extend,
    finset,
    invert,
    lift,
    multiset,
    neutral,
    signed_word,
    translate,
    unit,
    word,
)
from .net import (
    NetMorphism,
    QNet,
    apply_net_functor,
    compose,
    coproduct,
    enumerate_morphisms,
    identity_morphism,
    product,
    validate_morphism,
    validate_net,
)
from .reflexive import (
    GraphMorphism,
    QGraph,
    ReflexiveMorphism,
    ReflexiveQNet,
    add_identities,
    extend_morphism,
    forget_identities,
    free_edges,
    graph_to_net_transpose,
    net_to_graph_transpose,
    restrict_morphism,
    underlying_reflexive,
)
from .freecat import (
    Comp,
    EqVerdict,
    Gen,
    Ident,
    LayeredForm,
    MorTerm,
    Oper,
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
)
from .symmetry import (
    Perm,
    SymTerm,
    braiding,
    erase_symmetries,
    linearization_sum,
    linearizations,
    sym_equal,
    translate_term,
)

__all__ = [name for name in dir() if not name.startswith("_")]
