"""Cellular decomposition of a pair of elements fixing a neighbourhood of 0.

Prints the atom sizes, the class count and the nontrivial components, and
checks recomposition and the phi round trip.
"""

import argparse
import time

from grho.element import equals, product, special, then_compose, word_to_element
from grho.fixtures import copy_on
from grho.labelling import Labelling
from grho.plmap import thompson_x
from grho.dyadic import Dyadic
from grho.structure import cellular_decompose, phi_embed, project


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f", default="zeta2 zeta3^-1 zeta2", help="generator word for f")
    ap.add_argument("--g", default="zeta3 zeta2", help="generator word for g")
    ap.add_argument("--special-l", type=int, default=None, help="also multiply f by a special element of this radius")
    ap.add_argument("--window", type=int, default=40)
    ap.add_argument("--seed-word", default="ab")
    args = ap.parse_args()

    rho = Labelling(args.seed_word)
    f, g = word_to_element(rho, args.f), word_to_element(rho, args.g)
    if args.special_l is not None:
        l = args.special_l
        u = copy_on(thompson_x(0), Dyadic(1, 2), Dyadic(3, 2))
        f = then_compose(f, special(rho, rho.context_unit(0, l), l, u))
    t0 = time.perf_counter()
    d, fc, gc = cellular_decompose(f, g, args.window)
    dt = time.perf_counter() - t0
    print(f"K={d.K} anchor={d.anchor_word} max_atom={d.max_atom} decoration={d.l} radius={d.radius}")
    print(f"anchors in window: {len(d.anchors)}  classes: {len(d.classes)}  ({dt:.2f}s)")
    for name, comps in (("f", fc), ("g", gc)):
        live = [i for i, c in enumerate(comps) if not c.is_identity()]
        print(f"{name}: nontrivial components in classes {live}")
    print("recomposition:", equals(f, product(fc, rho)) and equals(g, product(gc, rho)))
    print("phi(project(f)) == f:", equals(phi_embed(d, project(d, f), rho), f))


if __name__ == "__main__":
    main()
