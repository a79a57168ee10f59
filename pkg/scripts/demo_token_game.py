"""Walk a small Petri net through the library: validation, the token game,
hom-set enumeration, and a translation to its set-marked approximation.

Run: python scripts/demo_token_game.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qnets import (  # noqa: E402
    QNet,
    Theory,
    TheoryArrow,
    apply_net_functor,
    hom_enumerate,
    jsonio,
    multiset,
    reachability_dot,
    reachable,
    validate_net,
)
from qnets import freecat  # noqa: E402


def main():
    cm = Theory.CMON
    net = QNet(cm, ("a", "b", "c"), {
        "make": (multiset(cm, {"a": 2}), multiset(cm, {"b": 1})),
        "ship": (multiset(cm, {"b": 1}), multiset(cm, {"c": 1})),
    })
    print("diagnostics:", validate_net(net))

    start = multiset(cm, {"a": 4})
    result = reachable(net, start, 3)
    print(f"\nmarkings reachable from {jsonio.elem_to_json(start)} in 3 steps:")
    for marking in result.markings:
        print(" ", jsonio.dumps(jsonio.elem_to_json(marking)))

    goal = multiset(cm, {"c": 2})
    classes = hom_enumerate(net, start, goal, max_layers=4, max_width=4)
    print(f"\nprocess classes {jsonio.elem_to_json(start)} -> {jsonio.elem_to_json(goal)}:")
    for term in classes:
        print(" ", jsonio.dumps(jsonio.term_to_json(term)))

    support = apply_net_functor(TheoryArrow.SUPPORT, net)
    print("\nset-marked approximation:")
    print(" ", jsonio.dumps(jsonio.net_to_json(support)))

    print("\nDOT of the reachability graph:")
    print(reachability_dot(freecat.reachable(net, multiset(cm, {"a": 2}), 2)))


if __name__ == "__main__":
    main()
