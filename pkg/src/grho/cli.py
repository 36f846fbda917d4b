"""Command line driver.

Exit status: 0 success, 1 verification failure, 2 inconclusive search,
3 usage error (bad flags, unreadable or malformed JSON).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace

from .config import DEFAULT, __version__
from .dyadic import parse_number

OK, FAILED, INCONCLUSIVE, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- io ------------------------------------------------------------------------------------


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def write_atomic(path, obj):
    text = dumps(obj)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from exc


def _emit(args, report):
    report = {"tool_version": __version__, "config_hash": args.cfg.digest(), **report}
    if getattr(args, "out", None):
        write_atomic(args.out, report)
    if args.json or not getattr(args, "out", None):
        sys.stdout.write(dumps(report))


def _element(rho, args, path=None, word=None):
    from .element import ElementError, GElement, word_to_element
    from .witness import element_from_spec

    try:
        if word is not None:
            return word_to_element(rho, word)
        obj = read_json(path)
        if isinstance(obj, dict) and "entries" in obj:
            return GElement.from_json(rho, obj)
        return element_from_spec(rho, obj)
    except (ElementError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path or word}: {exc}") from exc


# -- subcommands ------------------------------------------------------------------------------


def cmd_labelling(args, rho):
    from .labelling import verify_quasi_periodicity

    if args.action == "dump":
        w = rho.level(args.level)
        _emit(args, {"level": args.level, "length": len(w), "word": w})
        return OK
    rep = verify_quasi_periodicity(rho, args.max_len, args.level, args.max_period)
    win = rho.window(args.level)
    parity = all((c in "aA") == (i % 2 == 0) for i, c in enumerate(win))
    ok = parity and rep.inverse_closure and rep.min_nonperiod is None
    _emit(args, {"ok": ok, "parity": parity, **rep.to_json()})
    return OK if ok else FAILED


def cmd_element(args, rho):
    from .element import equals, evaluate, membership_check, reduce_radius

    a = _element(rho, args, args.a, args.word)
    if args.action == "eval":
        if args.x is None:
            raise UsageError("element eval needs --x")
        try:
            x = parse_number(args.x)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --x {args.x!r}") from exc
        _emit(args, {"x": str(x), "image": str(evaluate(a, x))})
        return OK
    if args.action == "dump":
        _emit(args, {"element": reduce_radius(a).to_json()})
        return OK
    if args.action == "check":
        rep = membership_check(a)
        _emit(args, rep.to_json())
        return OK if rep.ok else FAILED
    b = _element(rho, args, args.b, args.word_b)
    same = equals(a, b)
    _emit(args, {"equal": same})
    return OK if same else FAILED


def cmd_structure(args, rho):
    from .element import equals, product
    from .structure import StructureError, cellular_decompose

    f = _element(rho, args, args.f)
    g = _element(rho, args, args.g)
    try:
        d, fc, gc = cellular_decompose(f, g, args.window)
    except StructureError as exc:
        _emit(args, {"ok": False, "error": str(exc)})
        return FAILED
    recomposed = equals(f, product(fc, rho)) and equals(g, product(gc, rho))
    rep = d.to_json()
    rep["recomposition"] = recomposed
    rep["nontrivial_components"] = {
        "f": [i for i, c in enumerate(fc) if not c.is_identity()],
        "g": [i for i, c in enumerate(gc) if not c.is_identity()],
    }
    _emit(args, {"ok": recomposed, "decomposition": rep})
    return OK if recomposed else FAILED


def cmd_witness(args, rho):
    from .element import ElementError
    from .witness import ClaimFailure, PipelineInconclusive, run_pipeline, triple_from_json

    obj = read_json(args.triple)
    try:
        t = triple_from_json(rho, obj)
    except (ElementError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{args.triple}: {exc}") from exc
    h_word = args.h_word or (obj.get("h_word") if isinstance(obj, dict) else None)
    try:
        bundle, cert, res = run_pipeline(rho, t, args.cfg, h_word=h_word, budget=args.search_budget)
    except PipelineInconclusive as exc:
        _emit(args, {"status": "inconclusive", "reason": str(exc)})
        return INCONCLUSIVE
    except ClaimFailure as exc:
        _emit(args, {"status": "failed", "failures": [[c, d] for c, d in exc.failures]})
        return FAILED
    if args.out:
        write_atomic(args.out, {"config_hash": args.cfg.digest(), **bundle.to_json()})
    if args.cert:
        write_atomic(args.cert, cert.to_json())
    report = {"status": "accepted" if res.accepted else "rejected", "claims": bundle.claims,
              "h_word": bundle.h_word, "replay": res.to_json()}
    out, args.out = args.out, None
    _emit(args, report)
    args.out = out
    return OK if res.accepted else FAILED


def cmd_cocycle(args, rho):
    from .cocycle import Certificate, ElementEvidence, ReplayError, replay
    from .element import ElementError
    from .witness import elements_from_bundle_json

    try:
        cert = Certificate.from_json(read_json(args.cert))
    except ReplayError as exc:
        raise UsageError(str(exc)) from exc
    try:
        els = elements_from_bundle_json(rho, read_json(args.evidence))
    except (ElementError, KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"{args.evidence}: {exc}") from exc
    res = replay(cert, ElementEvidence(els))
    _emit(args, res.to_json())
    return OK if res.accepted else FAILED


# -- parser ---------------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="grho", description="Exact computations in the groups G_rho.")
    p.add_argument("--version", action="version", version=f"grho {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--seed-word", default=DEFAULT.seed_word, help="W_1 of the labelling (default ab)")
    common.add_argument("--rng-seed", type=int, default=DEFAULT.rng_seed)
    common.add_argument("--json", action="store_true", help="also print the JSON report to stdout")
    common.add_argument("--out", help="write the JSON report here (atomic)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    lab = sub.add_parser("labelling", parents=[common], help="dump or verify the labelling")
    lab.add_argument("action", choices=["dump", "verify"])
    lab.add_argument("--level", type=int, default=DEFAULT.window_level)
    lab.add_argument("--max-len", type=int, default=DEFAULT.max_factor_len)
    lab.add_argument("--max-period", type=int, default=DEFAULT.max_period)

    el = sub.add_parser("element", parents=[common], help="evaluate, dump, check or compare elements")
    el.add_argument("action", choices=["eval", "equals", "dump", "check"])
    el.add_argument("--a", help="element JSON (dump or description)")
    el.add_argument("--b", help="second element JSON for equals")
    el.add_argument("--word", help="generator word instead of --a")
    el.add_argument("--word-b", help="generator word instead of --b")
    el.add_argument("--x", help="point to evaluate, e.g. 5/4")

    st = sub.add_parser("structure", parents=[common], help="cellular decomposition")
    st.add_argument("action", choices=["decompose"])
    st.add_argument("--f", required=True)
    st.add_argument("--g", required=True)
    st.add_argument("--window", type=int, default=DEFAULT.structure_window, help="units scanned on each side of 0")

    wi = sub.add_parser("witness", parents=[common], help="run the witness pipeline on a triple")
    wi.add_argument("action", choices=["run"])
    wi.add_argument("--triple", required=True)
    wi.add_argument("--cert", help="write the certificate here")
    wi.add_argument("--search-budget", type=int, default=DEFAULT.search_budget)
    wi.add_argument("--h-word", help="use this recorded conjugator instead of searching")

    co = sub.add_parser("cocycle", parents=[common], help="replay a certificate")
    co.add_argument("action", choices=["replay"])
    co.add_argument("--cert", required=True)
    co.add_argument("--evidence", required=True, help="bundle JSON written by witness run")
    return p


COMMANDS = {
    "labelling": cmd_labelling,
    "element": cmd_element,
    "structure": cmd_structure,
    "witness": cmd_witness,
    "cocycle": cmd_cocycle,
}


def main(argv=None):
    from .labelling import Labelling, LabellingError

    try:
        args = build_parser().parse_args(argv)
        args.cfg = replace(DEFAULT, seed_word=args.seed_word, rng_seed=args.rng_seed,
                           search_budget=getattr(args, "search_budget", DEFAULT.search_budget))
        if args.command == "element" and args.a is None and args.word is None:
            raise UsageError("element needs --a or --word")
        if args.command == "element" and args.action == "equals" and args.b is None and args.word_b is None:
            raise UsageError("element equals needs --b or --word-b")
        try:
            rho = Labelling(args.seed_word)
        except LabellingError as exc:
            raise UsageError(str(exc)) from exc
        return COMMANDS[args.command](args, rho)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
