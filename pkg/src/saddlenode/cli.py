"""Command-line front end.

Every command reads a JSON document, runs one pipeline and writes a JSON
result that echoes all effective numeric parameters.  Exit status is 0 on
success, 2 when the input or parameters fail validation and 3 on a numeric
failure (escaping leaf, collapsed first integral).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import CoeffTable
from .documents import (
    InputError,
    complex_pair,
    dumps,
    field_document,
    load_json,
    modulus_document,
    parse_complex,
    parse_field,
    parse_int,
    parse_modulus,
    table_document,
)
from .geometry import DegeneratePathError, FormalClass
from .leaf import DulacField, LeafError, NonIntegrablePayloadError
from .normalform import (
    NormalFormData,
    integrability_test,
    realize_holonomy,
    realize_orbital,
    realize_temporal,
    roundtrip_check,
)
from .period import (
    CauchyConfig,
    FirstIntegralCollapsedError,
    Settings,
    model_coeff,
    orbital_modulus,
    temporal_modulus,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

COMMANDS = ("modulus", "model-coeffs", "normal-form", "temporal-form", "integrability", "holonomy", "roundtrip")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def _add_numeric(p: argparse.ArgumentParser) -> None:
    p.add_argument("--degree", type=_positive(int), default=None, help="top order D (default: from input or 4)")
    p.add_argument("--radius", type=_positive(float), default=None, help="base point modulus |x_j|")
    p.add_argument("--step", type=_positive(float), default=None, help="RK4 step along the path")
    p.add_argument("--circle-radius", type=_positive(float), default=None, help="radius of the y-circle")
    p.add_argument("--circle-points", type=_positive(int), default=None, help="samples on the y-circle")
    p.add_argument("--eps-min", type=_positive(float), default=None, help="inner truncation radius")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saddlenode",
        description="Moduli and normal forms of saddle-node foliations, computed numerically.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_text, needs_input=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=needs_input, default=None, help="input JSON document")
        p.add_argument("--output", default="-", help="output path ('-' for stdout)")
        _add_numeric(p)
        return p

    cmd("modulus", "orbital and temporal modulus of a field document")
    p = cmd("model-coeffs", "closed-form period coefficients of the formal model", needs_input=False)
    p.add_argument("--k", type=_positive(int), default=None)
    p.add_argument("--mu", type=float, nargs=2, metavar=("RE", "IM"), default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--j", type=int, default=None)
    for name, text in (("normal-form", "orbital normal form realizing a modulus document"),
                       ("roundtrip", "realize a modulus and recompute it")):
        p = cmd(name, text)
        p.add_argument("--payload-offset", type=int, choices=(0, 1), default=1,
                       help="1: blocks x^(sigma n + 1 + m) y^n; 0: x^(sigma n + m) y^n")
    p = cmd("temporal-form", "orbital and temporal normal form realizing a modulus document")
    p.add_argument("--payload-offset", type=int, choices=(0, 1), default=1)
    p = cmd("integrability", "test a modulus document for the integrable logarithmic form")
    p.add_argument("--tol", type=_positive(float), default=1e-8)
    p = cmd("holonomy", "saddle-node realizing a holonomy germ psi (k = 1)")
    p.add_argument("--payload-offset", type=int, choices=(0, 1), default=1)
    return parser


def _settings(args, base: Settings) -> Settings:
    changes = {}
    if args.radius is not None:
        changes["radius"] = args.radius
    if args.step is not None:
        changes["step"] = args.step
    if args.eps_min is not None:
        changes["eps_min"] = args.eps_min
    if args.circle_radius is not None:
        changes["circle_radius"] = args.circle_radius
    if args.circle_points is not None:
        changes["circle_points"] = args.circle_points
    try:
        return base.with_(**changes)
    except (ValueError, TypeError) as exc:
        raise InputError("parameters", str(exc)) from exc


def _degree(args, default: int) -> int:
    return args.degree if args.degree is not None else default


def _parameters(args, settings: Settings | None, D: int | None, k: int | None = None, **extra) -> dict:
    out = {"version": __version__, "command": args.command, "input": args.input}
    if D is not None:
        out["degree"] = D
    if settings is not None:
        out.update(settings.as_dict(k))
    out.update(extra)
    return out


def _run_modulus(args) -> dict:
    doc = load_json(args.input)
    field = parse_field(doc)
    settings = _settings(args, Settings.modulus_defaults())
    D = _degree(args, 4)
    orb = orbital_modulus(field, D, settings)
    tem = temporal_modulus(field, D, settings)
    out = {"parameters": _parameters(args, settings, D, field.k), "field": field_document(field)}
    out.update(modulus_document(field.k, field.mu, orb, tem))
    out["c0"] = {"orbital": [complex_pair(z) for z in orb.c0], "temporal": [complex_pair(z) for z in tem.c0]}
    return out


def _run_model_coeffs(args) -> dict:
    doc = load_json(args.input) if args.input else {}
    k = args.k if args.k is not None else parse_int(doc.get("k", 1), "input.k", 1)
    mu = complex(*args.mu) if args.mu is not None else parse_complex(doc.get("mu", [0, 0]), "input.mu")
    if args.m is not None or args.n is not None:
        terms = [[args.m if args.m is not None else 0, args.n if args.n is not None else 1,
                  args.j if args.j is not None else 0]]
    else:
        terms = doc.get("terms", [[1, 1, 0]])
    rows = []
    for i, t in enumerate(terms):
        if not isinstance(t, list) or len(t) not in (2, 3):
            raise InputError(f"input.terms[{i}]", "expected [m, n] or [m, n, j]")
        m = parse_int(t[0], f"terms[{i}][0]")
        n = parse_int(t[1], f"terms[{i}][1]", 1)
        j = parse_int(t[2], f"terms[{i}][2]") if len(t) == 3 else 0
        rows.append({"m": m, "n": n, "j": j, "c": complex_pair(model_coeff(k, mu, m, n, j))})
    return {"parameters": _parameters(args, None, None, k, mu=complex_pair(mu)), "coefficients": rows}


def _target(args, need: str) -> tuple[int, complex, CoeffTable, CoeffTable | None, int]:
    doc = load_json(args.input)
    k, mu, orb, tem = parse_modulus(doc)
    if need == "orbital" and orb is None:
        raise InputError("input.orbital", "missing")
    if need == "temporal" and tem is None:
        raise InputError("input.temporal", "missing")
    if orb is None:
        orb = CoeffTable.zeros(k, tem.degree)
    D = _degree(args, max(orb.degree, tem.degree if tem is not None else 0))
    return k, mu, orb, tem, D


def _nf_document(nf: NormalFormData, D: int) -> dict:
    out = nf.as_dict()
    U = nf.unit_series(D) if nf.G is not None and nf.formal.P.degree() <= 0 else None
    if nf.payload_offset == 1 or nf.formal.sigma >= 1:
        out["field"] = field_document(nf.field(), U)
    return out


def _run_normal_form(args) -> dict:
    k, mu, orb, _, D = _target(args, "orbital")
    settings = _settings(args, Settings.normal_form_defaults())
    nf = realize_orbital(k, mu, orb, D, settings, args.payload_offset)
    out = {"parameters": _parameters(args, settings, D, k, payload_offset=args.payload_offset)}
    out["target"] = modulus_document(k, mu, orb.truncate(D), None)
    out["normal_form"] = _nf_document(nf, D)
    return out


def _run_temporal_form(args) -> dict:
    k, mu, orb, tem, D = _target(args, "temporal")
    settings = _settings(args, Settings.normal_form_defaults())
    nf = realize_orbital(k, mu, orb, D, settings, args.payload_offset)
    nf = realize_temporal(nf, tem, D, settings)
    out = {"parameters": _parameters(args, settings, D, k, payload_offset=args.payload_offset)}
    out["target"] = modulus_document(k, mu, orb.truncate(D), tem.truncate(D))
    out["normal_form"] = _nf_document(nf, D)
    return out


def _run_integrability(args) -> dict:
    doc = load_json(args.input)
    k, mu, orb, _ = parse_modulus(doc)
    if orb is None:
        raise InputError("input.orbital", "missing")
    if args.degree is not None:
        orb = orb.truncate(args.degree)
    if orb.degree < 2:
        raise InputError("input.orbital", "need at least two orders")
    cr = args.circle_radius if args.circle_radius is not None else CauchyConfig().circle_radius
    verdict = integrability_test(orb, args.tol, cr)
    params = _parameters(args, None, orb.degree, k, tol=args.tol, circle_radius=cr)
    return {"parameters": params, "verdict": verdict.as_dict()}


def _run_holonomy(args) -> dict:
    doc = load_json(args.input)
    if not isinstance(doc, dict) or "psi" not in doc:
        raise InputError("input.psi", "missing")
    raw = doc["psi"]
    if not isinstance(raw, list) or not raw:
        raise InputError("input.psi", "expected a non-empty list of [re, im]")
    psi = [parse_complex(v, f"input.psi[{i}]") for i, v in enumerate(raw)]
    if psi[0] == 0:
        raise InputError("input.psi[0]", "not a diffeomorphism: psi'(0) = 0")
    D = _degree(args, max(len(psi) - 1, 1))
    settings = _settings(args, Settings.normal_form_defaults())
    mu, nf = realize_holonomy(psi, D, settings, args.payload_offset)
    out = {"parameters": _parameters(args, settings, D, 1, payload_offset=args.payload_offset)}
    out["mu"] = complex_pair(mu)
    out["normal_form"] = _nf_document(nf, D)
    return out


def _run_roundtrip(args) -> dict:
    k, mu, orb, _, D = _target(args, "orbital")
    settings = _settings(args, Settings.normal_form_defaults())
    nf, res = roundtrip_check(k, mu, orb, D, settings, args.payload_offset)
    out = {"parameters": _parameters(args, settings, D, k, payload_offset=args.payload_offset)}
    out["normal_form"] = nf.as_dict()
    out["residuals"] = {str(j): [float(r) for r in res[j]] for j in range(k)}
    out["max_residual"] = float(res.max())
    return out


_RUNNERS = {
    "modulus": _run_modulus,
    "model-coeffs": _run_model_coeffs,
    "normal-form": _run_normal_form,
    "temporal-form": _run_temporal_form,
    "integrability": _run_integrability,
    "holonomy": _run_holonomy,
    "roundtrip": _run_roundtrip,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = _RUNNERS[args.command](args)
    except (LeafError, FirstIntegralCollapsedError, ArithmeticError) as exc:
        print(f"saddlenode {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, DegeneratePathError, NonIntegrablePayloadError, ValueError) as exc:
        print(f"saddlenode {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = dumps(result)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
