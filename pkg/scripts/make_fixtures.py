"""Write the fixture triples as JSON files usable with `grho witness run --triple`."""

import argparse
import json
import os

from grho.fixtures import fixture_triples


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="fixtures")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    for name, (spec, h) in fixture_triples().items():
        obj = dict(spec)
        if h:
            obj["h_word"] = h
        path = os.path.join(args.out_dir, f"triple_{name}.json")
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(path)


if __name__ == "__main__":
    main()
