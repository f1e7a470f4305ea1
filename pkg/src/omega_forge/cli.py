"""Command-line entry point: ``omega-forge <command> ...``.

Exit codes: 0 on a positive verdict, 2 on a negative mathematical verdict,
1 on any error (unreadable input, invalid system, bad parameters).
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .chains import build_chain_graph, chain_components, is_chain_transitive
from .core import SftSystem, load_system
from .errors import NoChainError, NotChainTransitiveError, OmegaForgeError, SftNotTransitiveError
from .fixedpoint import fmt, to_fixed
from .omega import verify_realization
from .realization import orbit_csv, orbit_from_json, orbit_to_json, realize, realize_sft

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


def builtin_names():
    return sorted(p.name[:-5] for p in resources.files("omega_forge.data").iterdir() if p.name.endswith(".json"))


def resolve_input(name: str) -> Path:
    """A path, or the name of a bundled example system (``rotation``, ``cycle``, ...)."""
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("omega_forge.data") / f"{name.removesuffix('.json')}.json"
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"no such file or bundled system: {name}")


def _load(name):
    return load_system(resolve_input(name))


def _metric(name):
    sys = _load(name)
    if isinstance(sys, SftSystem):
        raise ValueError("this command needs a finite or grid system")
    return sys


def _dumps(doc) -> str:
    return json.dumps(doc, indent=1) + "\n"


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def _emit(doc):
    sys.stdout.write(_dumps(doc))


def cmd_check(args):
    s = _metric(args.input)
    ok = is_chain_transitive(s, args.eps)
    _emit({"chain_transitive": ok, "epsilon": fmt(to_fixed(args.eps))})
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_components(args):
    s = _metric(args.input)
    comps = chain_components(s, args.eps)
    if args.dot:
        _write(args.dot, comps.quotient_dot())
    _emit(comps.to_json())
    return EXIT_OK


def cmd_chain(args):
    s = _metric(args.input)
    try:
        ch = build_chain_graph(s, args.eps).chain(args.x, args.y)
    except NoChainError as exc:
        _emit({"chain": None, "x": exc.x, "y": exc.y, "epsilon": fmt(to_fixed(args.eps))})
        return EXIT_NEGATIVE
    _emit({"chain": list(ch.points), "length": len(ch) - 1, "epsilon": fmt(to_fixed(args.eps))})
    return EXIT_OK


def cmd_realize(args):
    s = _metric(args.input)
    if args.K <= args.N:
        raise ValueError("K must exceed N")
    try:
        r = realize(s, args.base, args.eps0, args.floor, args.K)
    except NotChainTransitiveError as exc:
        _emit({"realized": False, "epsilon": exc.scale, "witness": list(exc.witness)})
        return EXIT_NEGATIVE
    doc = orbit_to_json(r, args.base)
    _write(args.output, _dumps(doc))
    if args.csv:
        _write(args.csv, orbit_csv(r))
    _emit({"realized": True, "output": str(args.output), "K": r.K, **doc["certificates"], "schedule": doc["schedule"]})
    return EXIT_OK


def cmd_verify(args):
    try:
        doc = json.loads(Path(args.orbit).read_text(encoding="utf-8"))
        r = orbit_from_json(doc)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"corrupt orbit file: {exc!r}") from None
    if not 0 <= args.N < r.K:
        raise ValueError(f"N = {args.N} out of range for an orbit of length {r.K}")
    report = verify_realization(r, args.N, args.tolerance, args.min_visits)
    _emit(report)
    return EXIT_OK if report["pass"] else EXIT_NEGATIVE


def cmd_realize_sft(args):
    s = _load(args.input)
    if not isinstance(s, SftSystem):
        raise ValueError("realize-sft needs an sft system")
    try:
        orbit = realize_sft(s, args.L, args.K)
    except SftNotTransitiveError as exc:
        _emit({"realized": False, "witness": list(exc.witness)})
        return EXIT_NEGATIVE
    if args.output:
        _write(args.output, "".join(map(str, orbit.word.tolist())) + "\n")
    summary = {
        "realized": True,
        "K": len(orbit.word),
        "L": args.L,
        "forbidden_factors": orbit.forbidden_factors(),
        "min_occurrences": orbit.min_occurrences(),
    }
    _emit(summary)
    return EXIT_OK


def cmd_export_dot(args):
    s = _metric(args.input)
    if args.quotient:
        text = chain_components(s, args.eps).quotient_dot()
    else:
        text = build_chain_graph(s, args.eps).to_dot()
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="omega-forge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(name, help_, eps=True):
        c = sub.add_parser(name, help=help_)
        c.add_argument("input", help="system JSON file or bundled name: " + ", ".join(builtin_names()))
        if eps:
            c.add_argument("--eps", required=True, help="scale, e.g. 1/64 or 0.015625")
        return c

    c = with_input("check", "chain transitivity verdict at one scale")
    c.set_defaults(func=cmd_check)

    c = with_input("components", "chain components and transient points")
    c.add_argument("--dot", help="also write the component quotient graph here")
    c.set_defaults(func=cmd_components)

    c = with_input("chain", "shortest chain between two point ids")
    c.add_argument("x", type=int)
    c.add_argument("y", type=int)
    c.set_defaults(func=cmd_chain)

    c = with_input("realize", "build and export a realizing orbit", eps=False)
    c.add_argument("--base", type=int, default=0)
    c.add_argument("--eps0", default="1/8")
    c.add_argument("--floor", default="1/64")
    c.add_argument("-K", type=int, default=100_000)
    c.add_argument("-N", type=int, default=0, help="burn-in, only checked against K")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--csv")
    c.set_defaults(func=cmd_realize)

    c = sub.add_parser("verify", help="verification report for an exported orbit")
    c.add_argument("orbit")
    c.add_argument("-N", type=int, required=True)
    c.add_argument("--tolerance", help="Hausdorff tolerance (default: twice the final scale)")
    c.add_argument("--min-visits", type=int, default=1)
    c.set_defaults(func=cmd_verify)

    c = with_input("realize-sft", "symbolic orbit visiting every admissible word", eps=False)
    c.add_argument("-L", type=int, default=10)
    c.add_argument("-K", type=int, default=100_000)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_realize_sft)

    c = with_input("export-dot", "chain graph (or its component quotient) as DOT")
    c.add_argument("--quotient", action="store_true")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_export_dot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OmegaForgeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
