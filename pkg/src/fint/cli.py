"""Command line front end ``fint``.

Exit codes: 0 pass, 2 input error, 3 classification failure, 4 construction
failure, 5 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import api
from .errors import (ClassificationError, ConstructionError, FintError, ParseError, SpecError,
                     SpectralError)
from .result import MODES

EXIT_OK, EXIT_INPUT, EXIT_CLASS, EXIT_CONSTRUCT, EXIT_VERIFY = 0, 2, 3, 4, 5


def _emit(obj, as_json: bool, out) -> None:
    if as_json:
        out.write(json.dumps(obj, ensure_ascii=False, indent=2) + "\n")
    else:
        out.write("\n".join(obj) + "\n")


def _basis_lines(res):
    lines = [f"class: {res.kind}", f"mode: {res.mode}", f"integrals: {len(res.integrals)}"]
    for i, (F, tag, sing) in enumerate(zip(res.integrals, res.provenance, res.singular_sets)):
        lines.append(f"F{i + 1} [{tag}] = {F.format()}")
        for s in sing:
            lines.append(f"    singular: {s}")
    lines += [f"note: {s}" for s in res.notes]
    return lines


def _report_lines(rep, res):
    lines = [f"{'PASS' if rep.passed else 'FAIL'}: {len(rep.checks)} integrals, "
             f"{rep.trajectories} trajectories, tol {rep.tol:g}",
             f"rank: {rep.rank} (expected {rep.expected_rank})"]
    for c in rep.checks:
        status = "ok" if c.passed else "FAIL"
        lines.append(f"F{c.index + 1} [{c.tag}] {status} drift {c.rel_drift:.3e} "
                     f"(abs {c.max_drift:.3e}, lie {c.lie_residual:.3e})")
        lines += [f"    {s}" for s in c.notes[:3]]
    off = rep.offenders()
    if off:
        lines.append("offenders: " + ", ".join(f"F{c.index + 1}" for c in off))
    lines += [f"note: {s}" for s in res.notes]
    return lines


def cmd_analyze(args, out) -> int:
    spec = api.load_spec(args.path)
    a = api.analyze(spec, args.spectral_tol)
    _emit(a.to_json() if args.json else a.lines(), args.json, out)
    return EXIT_OK


def _build(args):
    spec = api.load_spec(args.path)
    res = api.construct_basis(spec, args.mode, args.spectral_tol)
    return spec, res


def cmd_basis(args, out) -> int:
    _, res = _build(args)
    _emit(res.to_json() if args.json else _basis_lines(res), args.json, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    spec, res = _build(args)
    if args.inject_test:
        res = api.inject_perturbation(res, args.inject_index, args.inject_delta)
    rep = api.verify(spec, res, args.trajectories, args.tol, args.seed)
    if args.json:
        doc = {"class": res.kind, "mode": res.mode}
        doc.update(rep.to_json())
        doc["notes"] = list(res.notes)
        _emit(doc, True, out)
    else:
        _emit(_report_lines(rep, res), False, out)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fint", description="First integrals of linear ODE systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("path", help="JSON system spec")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--spectral-tol", type=float, default=1e-8,
                        help="tolerance for spectral and classification decisions")

    a = sub.add_parser("analyze", help="classify and print spectral data")
    common(a)
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("basis", help="construct a basis of first integrals")
    common(b)
    b.add_argument("--mode", choices=MODES)
    b.set_defaults(func=cmd_basis)

    v = sub.add_parser("verify", help="construct and certify on random trajectories")
    common(v)
    v.add_argument("--mode", choices=MODES)
    v.add_argument("--trajectories", type=int, default=20)
    v.add_argument("--tol", type=float, default=1e-7, help="relative drift gate")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--inject-test", action="store_true",
                   help="corrupt one integral to check that the oracle fails")
    v.add_argument("--inject-index", type=int, default=0)
    v.add_argument("--inject-delta", type=float, default=api.INJECT_DELTA)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (SpecError, ParseError) as e:
        print(f"fint: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ClassificationError as e:
        print(f"fint: classification failed: {e}", file=sys.stderr)
        return EXIT_CLASS
    except (ConstructionError, SpectralError) as e:
        print(f"fint: construction failed: {e}", file=sys.stderr)
        return EXIT_CONSTRUCT
    except FintError as e:
        print(f"fint: {e}", file=sys.stderr)
        return EXIT_CONSTRUCT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
