"""JSON wire formats for elements, nets, morphisms, graphs, and process terms.

Encodings are strict: parsing accepts only canonical payloads, so every value
emitted by the library re-parses to an identical value.
"""

from __future__ import annotations

import json
from typing import Any

from .theory import (
    COUNT_THEORIES,
    CanonicalFormError,
    FreeElem,
    QnetError,
    Theory,
)


def dumps(obj: Any) -> str:
    """Deterministic single-line JSON used by the CLI."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def elem_to_json(x: FreeElem) -> Any:
    if x.theory in COUNT_THEORIES:
        return {p: c for p, c in x.payload}
    if x.theory is Theory.GRP:
        return [[p, "+" if s > 0 else "-"] for p, s in x.payload]
    return list(x.payload)


def elem_from_json(theory: Theory, data: Any) -> FreeElem:
    try:
        if theory in COUNT_THEORIES:
            if not isinstance(data, dict):
                raise CanonicalFormError(f"{theory.value} element must be an object")
            return FreeElem(theory, tuple(sorted((p, c) for p, c in data.items())))
        if not isinstance(data, list):
            raise CanonicalFormError(f"{theory.value} element must be an array")
        if theory is Theory.GRP:
            letters = []
            for entry in data:
                if (not isinstance(entry, list)) or len(entry) != 2 or entry[1] not in ("+", "-"):
                    raise CanonicalFormError("GRP letters must look like [\"a\",\"+\"]")
                letters.append((entry[0], 1 if entry[1] == "+" else -1))
            return FreeElem(theory, tuple(letters))
        return FreeElem(theory, tuple(data))
    except TypeError as exc:
        raise CanonicalFormError(str(exc)) from exc


def net_to_json(net) -> dict:
    return {
        "theory": net.theory.value,
        "places": list(net.places),
        "transitions": {
            name: {"src": elem_to_json(src), "tgt": elem_to_json(tgt)}
            for name, (src, tgt) in net.transitions.items()
        },
    }


def net_from_json(data: Any):
    from .net import QNet

    if not isinstance(data, dict):
        raise QnetError("net JSON must be an object")
    try:
        theory = Theory(data["theory"])
    except (KeyError, ValueError) as exc:
        raise QnetError(f"bad or missing theory tag: {exc}") from exc
    places = tuple(data.get("places", []))
    transitions = {}
    for name, arcs in data.get("transitions", {}).items():
        transitions[name] = (
            elem_from_json(theory, arcs["src"]),
            elem_from_json(theory, arcs["tgt"]),
        )
    return QNet(theory=theory, places=places, transitions=transitions)


def morphism_to_json(h) -> dict:
    return {"f": dict(h.f), "g": dict(h.g)}


def reflexive_to_json(r) -> dict:
    data = net_to_json(r.net)
    data["e"] = dict(r.e)
    return data


def reflexive_from_json(data: Any):
    from .reflexive import ReflexiveQNet

    net = net_from_json(data)
    return ReflexiveQNet(net=net, e=dict(data.get("e", {})))


def qgraph_to_json(g) -> dict:
    return {
        "theory": g.theory.value,
        "generators": list(g.generators),
        "places": list(g.places),
        "src": {name: elem_to_json(x) for name, x in g.src.items()},
        "tgt": {name: elem_to_json(x) for name, x in g.tgt.items()},
        "ident": {place: elem_to_json(x) for place, x in g.ident.items()},
    }


def term_to_json(t) -> Any:
    from . import freecat, symmetry

    if isinstance(t, freecat.Gen):
        return {"gen": t.name}
    if isinstance(t, freecat.Ident):
        return {"id": elem_to_json(t.obj)}
    if isinstance(t, freecat.Comp):
        return {"comp": [term_to_json(t.after), term_to_json(t.before)]}
    if isinstance(t, freecat.Oper):
        return {"op": t.op, "args": [term_to_json(a) for a in t.args]}
    if isinstance(t, symmetry.Perm):
        return {"perm": {"word": elem_to_json(t.word), "map": list(t.mapping)}}
    raise QnetError(f"not a process term: {t!r}")


def term_from_json(theory: Theory, data: Any):
    from . import freecat, symmetry

    if not isinstance(data, dict) or len(data) not in (1, 2):
        raise QnetError(f"bad term JSON: {data!r}")
    if "gen" in data:
        return freecat.Gen(data["gen"])
    if "id" in data:
        return freecat.Ident(elem_from_json(theory, data["id"]))
    if "comp" in data:
        after, before = data["comp"]
        return freecat.Comp(term_from_json(theory, after), term_from_json(theory, before))
    if "op" in data:
        args = tuple(term_from_json(theory, a) for a in data["args"])
        return freecat.Oper(data["op"], args)
    if "perm" in data:
        return symmetry.Perm(
            elem_from_json(theory, data["perm"]["word"]),
            tuple(data["perm"]["map"]),
        )
    raise QnetError(f"bad term JSON: {data!r}")
