"""Command-line front end: build, certify, recover, eigs.

Exit codes: 0 success, 1 usage or parse error, 2 certification failure,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import re
import sys
import tempfile
from pathlib import Path

from . import __version__
from .charsums import certify_bound, certify_quadratic
from .field import FieldError, find_primitive_root, format_poly, make_field
from .indexsets import amub_partition, build_amub, build_full, build_quotient
from .matrix import (BRUTEFORCE_CAP, SensingMatrix, certify_amub, coherence_bruteforce,
                     coherence_fft)
from .recovery import ExperimentConfig, run_success_sweep, sweep_csv
from .spectral import EigConfig, eig_csv, run_eig_config

EXIT_OK, EXIT_USAGE, EXIT_CERT, EXIT_NONCONV = 0, 1, 2, 3


class UsageError(Exception):
    pass


def write_atomic(path: Path, text: str) -> None:
    """Write UTF-8 text ending in a newline via a temp file and rename."""
    if not text.endswith("\n"):
        text += "\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- config files --------------------------------------------------------------

def _key_line(text: str, key: str) -> int:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def load_config(path: Path, cls):
    """Parse a JSON config whose keys are exactly the fields of ``cls``.

    Errors are raised as ``UsageError`` prefixed with ``path:line``.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(rec, dict):
        raise UsageError(f"{path}:1: top level must be an object")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    for key in rec:
        if key not in fields:
            raise UsageError(f"{path}:{_key_line(text, key)}: unknown key {key!r}")
    for name, f in fields.items():
        if name not in rec and f.default is dataclasses.MISSING:
            raise UsageError(f"{path}:1: missing required key {name!r}")
    kwargs = {}
    for key, value in rec.items():
        default = fields[key].default
        line = _key_line(text, key)
        if isinstance(default, tuple):
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise UsageError(f"{path}:{line}: {key!r} must be a list of strings")
            value = tuple(value)
        elif isinstance(default, bool) or default is dataclasses.MISSING:
            if not isinstance(value, str):
                raise UsageError(f"{path}:{line}: {key!r} must be a string")
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise UsageError(f"{path}:{line}: {key!r} must be an integer")
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise UsageError(f"{path}:{line}: {key!r} must be a number")
            value = float(value)
        elif isinstance(default, str) and not isinstance(value, str):
            raise UsageError(f"{path}:{line}: {key!r} must be a string")
        kwargs[key] = value
    try:
        return cls(**kwargs), text
    except ValueError as exc:
        raise UsageError(f"{path}:1: {exc}") from None


def load_matrix(path: Path) -> SensingMatrix:
    try:
        return SensingMatrix.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: cannot parse matrix file: {exc}") from None


def _resolve(config_path: Path, matrix: str) -> Path:
    p = Path(matrix)
    return p if p.is_absolute() else config_path.parent / p


def _manifest(argv, config_text, seed, outdir: Path, outputs: dict[str, str], extra=None):
    rec = {
        "command": list(argv),
        "config_sha256": sha256(config_text),
        "master_seed": seed,
        "version": __version__,
        "outputs": [{"path": name, "sha256": sha256(text)} for name, text in outputs.items()],
    }
    rec.update(extra or {})
    write_atomic(outdir / "manifest.json", dump_json(rec))


# -- commands ------------------------------------------------------------------

def cmd_build(args) -> int:
    if args.variant == "quotient" and args.b is None:
        raise UsageError("--b is required with --variant quotient")
    if args.variant != "quotient" and args.b is not None:
        raise UsageError("--b only applies to --variant quotient")
    params = make_field(args.p, args.a, args.n, args.modulus)
    g = params.element(args.g) if args.g else find_primitive_root(params)
    alpha = params.element(args.alpha) if args.alpha else None
    if args.variant == "full":
        ix = build_full(params, g, alpha)
    elif args.variant == "quotient":
        ix = build_quotient(params, g, alpha, args.b)
    else:
        ix, _ = build_amub(params, g, alpha)
    mat = SensingMatrix.from_indexset(ix)
    out = Path(args.out)
    write_atomic(out / "indexset.json", ix.dumps())
    write_atomic(out / "matrix.json", mat.dumps())
    print(f"N={ix.N} m={mat.m} mu_bound={(params.n - 1) / math.sqrt(params.q)!r} "
          f"g={format_poly(g.coeffs)} alpha={format_poly(ix.alpha.coeffs)}")
    return EXIT_OK


def certify(mat: SensingMatrix, what: str):
    """Run one certification; returns (passed, report dict, optional CSV text)."""
    ix = mat.source
    if what in ("katz", "quadratic"):
        if ix is None:
            raise UsageError(f"{what} certification needs a field-backed matrix")
        if what == "quadratic":
            if ix.n != 2:
                raise UsageError("quadratic certification needs n = 2")
            cert = certify_quadratic(ix.params, ix.g, ix.alpha)
        else:
            cert = certify_bound(ix.params, ix.g, ix.alpha)
        rep = {"what": what, "passed": cert.passed, "q": cert.q, "n": cert.n,
               "characters": int(cert.a_values.size), "exhaustive": cert.exhaustive,
               "max_deviation": cert.max_deviation, "worst_a": cert.worst_a,
               "bound": cert.bound}
        return cert.passed, rep, cert.to_csv()
    if what == "coherence":
        rep_fft = coherence_fft(mat)
        rep = {"what": what, "mu": rep_fft.mu, "argmax_difference": rep_fft.argmax_pair[0],
               "welch": rep_fft.welch, "bound": rep_fft.bound, "k_max": rep_fft.k_max}
        passed = rep_fft.within_bound
        if mat.N <= BRUTEFORCE_CAP:
            brute = coherence_bruteforce(mat)
            rep["mu_bruteforce"] = brute.mu
            passed = passed and abs(brute.mu - rep_fft.mu) <= 1e-9
        rep["passed"] = passed
        return passed, rep, None
    if what == "amub":
        if ix is None or ix.variant != "amub":
            raise UsageError("amub certification needs a matrix built with --variant amub")
        r = certify_amub(mat, amub_partition(ix.q))
        rep = {"what": what, "passed": r.passed, "q": ix.q,
               "max_unitary_deviation": r.max_unitary_deviation,
               "min_cross": r.min_cross, "max_cross": r.max_cross,
               "lower": r.lower, "upper": r.upper,
               "violation": list(r.violation) if r.violation else None}
        return r.passed, rep, None
    raise UsageError(f"unknown certification {what!r}")


def cmd_certify(args) -> int:
    path = Path(args.matrix)
    mat = load_matrix(path)
    passed, rep, table = certify(mat, args.what)
    report = Path(args.report) if args.report else path.with_name(f"{path.stem}.{args.what}.json")
    write_atomic(report, dump_json(rep))
    if table is not None and args.csv:
        write_atomic(Path(args.csv), table)
    bound = rep.get("bound")
    print(f"{args.what}: {'PASS' if passed else 'FAIL'}"
          + (f" mu={rep['mu']!r}" if "mu" in rep else "")
          + (f" bound={bound!r}" if bound is not None else ""))
    return EXIT_OK if passed else EXIT_CERT


def cmd_recover(args, argv) -> int:
    cpath = Path(args.config)
    config, text = load_config(cpath, ExperimentConfig)
    mat = load_matrix(_resolve(cpath, config.matrix))
    try:
        rows = run_success_sweep(mat, config)
    except ValueError as exc:
        raise UsageError(f"{cpath}: {exc}") from None
    csv_text = sweep_csv(rows)
    out = Path(args.out)
    write_atomic(out / "sweep.csv", csv_text)
    nonconv = sum(r.nonconverged for r in rows)
    _manifest(argv, text, config.master_seed, out, {"sweep.csv": csv_text},
              {"nonconverged_trials": nonconv})
    if nonconv:
        print(f"warning: {nonconv} solver runs did not converge", file=sys.stderr)
        return EXIT_NONCONV
    return EXIT_OK


def cmd_eigs(args, argv) -> int:
    cpath = Path(args.config)
    config, text = load_config(cpath, EigConfig)
    mat = load_matrix(_resolve(cpath, config.matrix))
    try:
        rows = run_eig_config(mat, config)
    except ValueError as exc:
        raise UsageError(f"{cpath}: {exc}") from None
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    csv_text = eig_csv(rows)
    out = Path(args.out)
    write_atomic(out / "eigs.csv", csv_text)
    _manifest(argv, text, config.master_seed, out, {"eigs.csv": csv_text})
    return EXIT_OK


# -- entry point ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fourier-cs", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="construct an index set and its sensing matrix")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--a", type=int, default=1)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--b", type=int)
    b.add_argument("--modulus", help="coefficients, constant term first, e.g. 2,0,1")
    b.add_argument("--g", help="primitive element as coefficients (default: first found)")
    b.add_argument("--alpha", help="line offset as coefficients (default: x)")
    b.add_argument("--variant", choices=("full", "quotient", "amub"), required=True)
    b.add_argument("--out", default=".", help="output directory")

    c = sub.add_parser("certify", help="certify a matrix file")
    c.add_argument("matrix")
    c.add_argument("--what", choices=("katz", "quadratic", "coherence", "amub"), required=True)
    c.add_argument("--report", help="report path (default: next to the matrix file)")
    c.add_argument("--csv", help="per-character table for katz/quadratic")

    for name, helptext in (("recover", "success-rate sweep"), ("eigs", "eigenvalue sweep")):
        e = sub.add_parser(name, help=helptext)
        e.add_argument("config")
        e.add_argument("--out", default=".", help="output directory")
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = make_parser().parse_args(argv)
        if args.command == "build":
            return cmd_build(args)
        if args.command == "certify":
            return cmd_certify(args)
        if args.command == "recover":
            return cmd_recover(args, argv)
        return cmd_eigs(args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FieldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
