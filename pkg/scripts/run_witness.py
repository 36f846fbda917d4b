"""Run the witness pipeline on every fixture and print a one-line summary per triple.

    python scripts/run_witness.py --out-dir runs
"""

import argparse
import json
import os
import time

from grho.cli import write_atomic
from grho.config import DEFAULT
from grho.fixtures import fixture_triples
from grho.labelling import Labelling
from grho.witness import ClaimFailure, PipelineInconclusive, run_pipeline, triple_from_json


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--only", nargs="*", help="fixture names (default: all)")
    ap.add_argument("--out-dir", help="write bundle_<name>.json and cert_<name>.json here")
    ap.add_argument("--search", action="store_true", help="ignore recorded h words and search")
    args = ap.parse_args()

    rho = Labelling(DEFAULT.seed_word)
    for name, (spec, h) in fixture_triples().items():
        if args.only and name not in args.only:
            continue
        t0 = time.perf_counter()
        try:
            b, cert, res = run_pipeline(rho, triple_from_json(rho, spec), h_word=None if args.search else h)
        except (ClaimFailure, PipelineInconclusive) as exc:
            print(f"{name:9s} {type(exc).__name__}: {exc}")
            continue
        dt = time.perf_counter() - t0
        print(f"{name:9s} accepted={res.accepted} k={b.k} m={b.m} l={b.l} W={b.W} "
              f"J4={b.J[3]} |h|={len(b.h_word)} steps={len(cert.steps)} {dt:.2f}s")
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            write_atomic(os.path.join(args.out_dir, f"bundle_{name}.json"), b.to_json())
            write_atomic(os.path.join(args.out_dir, f"cert_{name}.json"), cert.to_json())
            with open(os.path.join(args.out_dir, f"trace_{name}.txt"), "w") as fh:
                fh.write("\n".join(res.trace) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
