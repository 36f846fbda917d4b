"""Re-derive the conjugator recorded for fixture B with the proximal search.

The recorded word in grho.fixtures came from this script with the default
seed and budget.
"""

import argparse
import time
from dataclasses import replace

from grho.config import DEFAULT
from grho.fixtures import fixture_triples
from grho.labelling import Labelling
from grho.witness import find_h, initial_intervals, triple_from_json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fixture", default="B")
    ap.add_argument("--budget", type=int, default=DEFAULT.search_budget)
    ap.add_argument("--seed", type=int, default=DEFAULT.rng_seed)
    args = ap.parse_args()

    cfg = replace(DEFAULT, rng_seed=args.seed)
    rho = Labelling(cfg.seed_word)
    spec, recorded = fixture_triples()[args.fixture]
    _, J = initial_intervals(rho, triple_from_json(rho, spec), cfg)
    print("J4 =", J[3])
    t0 = time.perf_counter()
    h, word = find_h(rho, J[3], cfg, args.budget)
    print("found:", " ".join(word) or "(identity)", f"in {time.perf_counter() - t0:.2f}s")
    if recorded:
        print("recorded:", recorded, "| same:", " ".join(word) == recorded)


if __name__ == "__main__":
    main()
