"""Command-line front end.

Exit codes are the machine contract:

    0   SOS certificate found (check/decompose), or certificate valid (verify),
        or command completed (sample/oracle/witness)
    1   malformed input, or certificate invalid (verify)
    10  positivity refuted: witness written (check), or not SOS (decompose)
    20  inconclusive at every degree up to the cap, or witness extraction
        failed numerically

stdout is human-readable; artifacts are JSON files.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import repsample, soscert, witness
from .algebra import MatrixPolynomial
from .exceptions import (
    BudgetExceededError,
    CertificateError,
    ContractionViolationError,
    DegenerateNumericsError,
    FgsosError,
    MalformedInputError,
    WitnessExtractionError,
)
from .sdp import SolveConfig
from .words import format_word

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_REFUTED = 10
EXIT_INCONCLUSIVE = 20


def _load_polynomial(path: str) -> MatrixPolynomial:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc}") from exc
    return MatrixPolynomial.loads(text)


def _load_json(path: str) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedInputError(f"{path} does not contain a JSON object")
    return obj


def _artifact_path(input_path: str, out: str | None, suffix: str) -> Path:
    if out is not None:
        return Path(out)
    stem = Path(input_path)
    if stem.suffix == ".json":
        stem = stem.with_suffix("")
    return stem.parent / (stem.name + suffix)


def _sibling(path: Path, suffix: str) -> Path:
    name = path.name
    if name.endswith(".json"):
        name = name[: -len(".json")]
    for known in (".sos", ".witness", ".moment"):
        if name.endswith(known):
            name = name[: -len(known)]
    return path.parent / (name + suffix)


def _solve_config(args) -> SolveConfig:
    return SolveConfig(
        eps_feas=args.eps_feas,
        eps_psd=args.eps_psd,
        delta_gap=args.delta_gap,
        max_iters=args.max_iters,
    )


def _format_complex(z: complex) -> str:
    if z.imag == 0:
        return repr(z.real)
    if z.real == 0:
        return f"{z.imag!r}j"
    sign = "+" if z.imag >= 0 else "-"
    return f"({z.real!r}{sign}{abs(z.imag)!r}j)"


def format_polynomial(a: MatrixPolynomial) -> str:
    """Render in the word grammar; matrix coefficients print row by row."""
    if not len(a):
        return "0"
    if a.m == 1:
        parts = []
        for w in a.support:
            coeff = complex(a.coeff(w)[0, 0])
            word = format_word(w)
            if w.is_identity:
                parts.append(_format_complex(coeff))
            elif coeff == 1:
                parts.append(word)
            else:
                parts.append(f"{_format_complex(coeff)}*{word}")
        return " + ".join(parts)
    lines = []
    for w in a.support:
        rows = "; ".join(
            ", ".join(_format_complex(complex(z)) for z in row)
            for row in a.coeff(w)
        )
        lines.append(f"  {format_word(w)}: [{rows}]")
    return "\n".join(lines)


def _escalate(b: MatrixPolynomial, args):
    """Run certify_sos over the degree ladder.

    Returns ("sos", GramCertificate) | ("refuted", moment, report) |
    ("inconclusive", messages).
    """
    cfg = _solve_config(args)
    start = args.degree if args.degree is not None else soscert.default_degree(b)
    cap = args.max_degree if args.max_degree is not None else start + 2
    if cap < start:
        raise MalformedInputError(f"--max-degree {cap} is below --degree {start}")
    notes = []
    for degree in range(start, cap + 1):
        result = soscert.certify_sos(b, degree, cfg)
        if isinstance(result, soscert.GramCertificate):
            return "sos", result
        if isinstance(result, witness.MomentCertificate):
            try:
                report = witness.extract_witness(result, b)
            except (WitnessExtractionError, ContractionViolationError,
                    CertificateError, DegenerateNumericsError) as exc:
                notes.append(f"degree {degree}: dual certificate found but "
                             f"witness extraction failed: {exc}")
                continue
            return "refuted", result, report
        notes.append(f"degree {degree}: {result.reason} "
                     f"({result.iterations} iterations)")
    return "inconclusive", notes


def cmd_check(args) -> int:
    b = _load_polynomial(args.polynomial)
    outcome = _escalate(b, args)
    if outcome[0] == "sos":
        cert = outcome[1]
        path = _artifact_path(args.polynomial, args.out, ".sos.json")
        path.write_text(cert.dumps())
        print(f"SOS certificate at degree {cert.degree} "
              f"({len(cert.factors)} factors, residual {cert.residual:.3e})")
        print(f"wrote {path}")
        return EXIT_OK
    if outcome[0] == "refuted":
        moment, report = outcome[1], outcome[2]
        wpath = _artifact_path(args.polynomial, args.out, ".witness.json")
        mpath = _sibling(wpath, ".moment.json")
        wpath.write_text(report.dumps())
        mpath.write_text(moment.dumps())
        print(f"not a sum of Hermitian squares: witness at dimension {report.rep.N} "
              f"with <xi, rho(b) xi> = {report.value:.6f} "
              f"(lambda_min = {report.lambda_min:.6f})")
        print(f"wrote {wpath}")
        print(f"wrote {mpath}")
        return EXIT_REFUTED
    for note in outcome[1]:
        print(note)
    print("inconclusive: no certificate either way at the tried degrees")
    return EXIT_INCONCLUSIVE


def cmd_decompose(args) -> int:
    b = _load_polynomial(args.polynomial)
    outcome = _escalate(b, args)
    if outcome[0] == "sos":
        cert = outcome[1]
        print(f"b = sum of {len(cert.factors)} Hermitian squares "
              f"(degree {cert.degree}, residual {cert.residual:.3e}):")
        for k, factor in enumerate(cert.factors, 1):
            rendered = format_polynomial(factor)
            if factor.m == 1:
                print(f"a_{k} = {rendered}")
            else:
                print(f"a_{k} =\n{rendered}")
        return EXIT_OK
    if outcome[0] == "refuted":
        print("not a sum of Hermitian squares (a refuting representation exists); "
              "run `fgsos check` to export the witness")
        return EXIT_REFUTED
    for note in outcome[1]:
        print(note)
    return EXIT_INCONCLUSIVE


def cmd_witness(args) -> int:
    b = _load_polynomial(args.polynomial)
    cert = witness.MomentCertificate.from_obj(_load_json(args.moment))
    try:
        report = witness.extract_witness(cert, b)
    except (WitnessExtractionError, ContractionViolationError, CertificateError,
            DegenerateNumericsError) as exc:
        print(f"witness extraction failed: {exc}")
        return EXIT_INCONCLUSIVE
    path = _artifact_path(args.polynomial, args.out, ".witness.json")
    path.write_text(report.dumps())
    print(f"witness at dimension {report.rep.N}: value {report.value:.6f}, "
          f"lambda_min {report.lambda_min:.6f}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_sample(args) -> int:
    b = _load_polynomial(args.polynomial)
    dims = tuple(int(t) for t in args.dims.split(","))
    report = repsample.sample_and_test(b, dims=dims, count=args.count, seed=args.seed)
    print(f"min lambda_min over {report.count} samples at dims {list(dims)}: "
          f"{report.min_value:.9e}")
    if report.argmin_rep is not None:
        print(f"negative value witnessed at sample {report.argmin_sample} "
              f"(dimension {report.argmin_rep.N})")
    if args.out:
        Path(args.out).write_text(report.dumps())
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    b = _load_polynomial(args.polynomial)
    report = repsample.scalar_grid_oracle(b, args.grid)
    angles = ", ".join(f"{t:.6f}" for t in report.argmin_angles)
    print(f"min lambda_min over the {args.grid}-point scalar grid: "
          f"{report.min_value:.9e} at angles ({angles})")
    if args.out:
        Path(args.out).write_text(report.dumps())
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    b = _load_polynomial(args.against)
    obj = _load_json(args.certificate)
    kind = obj.get("kind")
    if kind == "sos":
        cert = soscert.GramCertificate.from_obj(obj)
        reasons = soscert.verify_gram(cert, b, eps_psd=args.eps_psd)
    elif kind == "moment":
        cert = witness.MomentCertificate.from_obj(obj)
        reasons = witness.verify_moment(cert, b, eps_psd=args.eps_psd)
    elif kind == "witness":
        report = witness.WitnessReport.from_obj(obj)
        reasons = witness.verify_witness(report, b)
    else:
        raise MalformedInputError(f"unknown certificate kind {kind!r}")
    if reasons:
        for reason in reasons:
            print(f"INVALID: {reason}")
        return EXIT_BAD_INPUT
    print(f"valid {kind} certificate for {args.against}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgsos",
        description="Certify or refute positivity of matrix polynomials over "
                    "free groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tolerances(p):
        p.add_argument("--eps-feas", type=float, default=1e-7,
                       help="constraint residual tolerance (default 1e-7)")
        p.add_argument("--eps-psd", type=float, default=1e-8,
                       help="PSD slack tolerance (default 1e-8)")
        p.add_argument("--delta-gap", type=float, default=None,
                       help="infeasibility gap threshold (default 1e-6*||c||)")
        p.add_argument("--max-iters", type=int, default=50_000)

    def add_degrees(p):
        p.add_argument("--degree", type=int, default=None,
                       help="basis degree (default ceil(deg(b)/2))")
        p.add_argument("--max-degree", type=int, default=None,
                       help="escalation cap (default degree + 2)")

    p = sub.add_parser("check", help="certify SOS or refute with a witness")
    p.add_argument("polynomial")
    add_degrees(p)
    add_tolerances(p)
    p.add_argument("--out", default=None, help="primary artifact path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decompose", help="print an SOS factorization")
    p.add_argument("polynomial")
    add_degrees(p)
    add_tolerances(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("witness", help="extract a witness from a moment certificate")
    p.add_argument("polynomial")
    p.add_argument("--moment", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("sample", help="test under Haar-random representations")
    p.add_argument("polynomial")
    p.add_argument("--dims", default="1,2,4,8")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("oracle", help="exhaustive scalar-representation grid")
    p.add_argument("polynomial")
    p.add_argument("--grid", type=int, default=360)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="re-check a certificate, solver-free")
    p.add_argument("certificate")
    p.add_argument("--against", required=True, help="polynomial JSON")
    p.add_argument("--eps-psd", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MalformedInputError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except FgsosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
