"""Command-line surface: check, solve-canonical, eval-resolvent, verify, demo.

Exit codes are fixed for scripting: 0 success, 1 input or configuration
error, 2 verification or positivity failure, 3 structural gate
(non-self-adjoint second shift, broken internal structure), 4 parameter
gate (inadmissible, non-commuting, or otherwise rejected parameter).
All floating-point output uses 17 significant digits and reruns with
the same configuration are byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from .cayley import ContractionParameter, build_isometric_pair
from .config import DEFAULT_TOLERANCES
from .errors import (AdmissibilityFailedError, ClusterAmbiguityError,
                     CommutationViolatedError, ContractionViolatedError,
                     DomainCollapseError, EmbeddingLostError,
                     ExcludedPointError, FixedPointError,
                     InconsistentShiftError, IndexOutOfRangeError,
                     Moment2dError, NegativeDenominatorError,
                     NoDecompositionError, NotDirectSumError, NotPsdError,
                     NotSelfAdjointA2Error, NotSupportedError,
                     NotUnitaryError, PointMismatchError, SchemaError,
                     SingularMatrixError, SingularShiftError,
                     StructureViolationError)
from .moments import carleman_diagnostic, check_psd
from .resolvents import pair_resolvent_symmetric
from .scenarios import e1, e2, e3
from .solutions import SamplerSpec, solve_canonical, verify_solution

__all__ = ["main"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2
EXIT_STRUCTURE = 3
EXIT_PARAMETER = 4

_INPUT_ERRORS = (SchemaError, IndexOutOfRangeError,
                 NegativeDenominatorError, NotSupportedError)
_VERIFY_ERRORS = (NotPsdError,)
_STRUCTURE_ERRORS = (NotSelfAdjointA2Error, StructureViolationError,
                     InconsistentShiftError, ClusterAmbiguityError,
                     DomainCollapseError, NotDirectSumError,
                     NoDecompositionError, EmbeddingLostError,
                     SingularShiftError, SingularMatrixError)
_PARAMETER_ERRORS = (AdmissibilityFailedError, CommutationViolatedError,
                     ContractionViolatedError, FixedPointError,
                     NotUnitaryError, ExcludedPointError, PointMismatchError)


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _parse_complex(text: str, what: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise SchemaError(f"{what}: cannot parse {text!r} as a complex "
                          f"number (use Python syntax, e.g. 0.5+2j)") from exc


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    obj = io.read_json(path)
    if not isinstance(obj, dict):
        raise SchemaError("config file must hold a JSON object")
    return obj


def _resolve(args, config: dict, name: str, default):
    """Flag value, else config-file value, else default."""
    value = getattr(args, name)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise SchemaError(f"{name} must be strictly positive")
    return value


def _tolerances(args, config: dict):
    tol = DEFAULT_TOLERANCES
    updates = {}
    for field in ("rank_tol", "subspace_tol", "cluster_tol",
                  "atom_merge_tol"):
        value = _resolve(args, config, field, None)
        if value is not None:
            updates[field] = _positive(value, field)
    if updates:
        tol = tol.replace(**updates)
    return tol


def _sampler(args, config: dict) -> SamplerSpec:
    kind = _resolve(args, config, "sampler", "identity-only")
    count = int(_resolve(args, config, "count", 1))
    seed = _resolve(args, config, "seed", None)
    phases = int(_resolve(args, config, "phases", 4))
    if kind == "haar-random" and seed is None:
        raise SchemaError("sampler haar-random requires --seed")
    try:
        return SamplerSpec(kind=kind, count=count,
                           seed=None if seed is None else int(seed),
                           phases=phases)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def _write_or_print(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _load_source(path: str):
    """Moment table or operator pair, sniffed from the JSON keys."""
    obj = io.read_json(path)
    if isinstance(obj, dict) and "entries" in obj:
        return io.moment_table_from_json(obj)
    if isinstance(obj, dict) and "a1_domain" in obj:
        return io.pair_from_json(obj)
    raise SchemaError(f"{path}: expected a moment table (key 'entries') "
                      f"or an operator pair (key 'a1_domain')")


def cmd_check(args) -> int:
    config = _load_config(args.config)
    table = io.moment_table_from_json(io.read_json(args.table))
    psd_tol = _resolve(args, config, "psd_tol", None)
    if psd_tol is not None:
        psd_tol = _positive(psd_tol, "psd_tol")
    variant = _resolve(args, config, "carleman_variant", "pair")
    psd_rows = []
    all_ok = True
    for d_m in range(table.max_m // 2 + 1):
        for d_n in range(table.max_n // 2 + 1):
            ok, min_eig = check_psd(table, d_m, d_n, psd_tol)
            all_ok = all_ok and ok
            psd_rows.append({"d_m": d_m, "d_n": d_n, "ok": bool(ok),
                             "min_eig": float(min_eig)})
    carleman_rows = []
    big_k = table.max_n // 2
    if big_k >= 1:
        m = 0
        while 2 * m + 2 <= table.max_m:
            report = carleman_diagnostic(table, m, big_k, variant=variant)
            carleman_rows.append({
                "m": report.m,
                "variant": variant,
                "verdict": report.verdict,
                "partial_sums": [float(s) for s in report.partial_sums],
            })
            m += 1
    out = {"psd": psd_rows, "psd_ok": bool(all_ok),
           "carleman": carleman_rows}
    _write_or_print(io.dumps(out), args.output)
    return EXIT_OK if all_ok else EXIT_VERIFY


def cmd_solve_canonical(args) -> int:
    config = _load_config(args.config)
    source = _load_source(args.input)
    sampler = _sampler(args, config)
    tolerances = _tolerances(args, config)
    verify_tol = _positive(_resolve(args, config, "verify_tol", 1e-8),
                           "verify_tol")
    d_m = _resolve(args, config, "d_m", None)
    d_n = _resolve(args, config, "d_n", None)
    max_n = _resolve(args, config, "max_n", None)
    out_dir = _resolve(args, config, "output_dir", ".")
    os.makedirs(out_dir, exist_ok=True)

    def on_reject(label: str, exc: FixedPointError):
        sys.stderr.write(f"rejected {label}: {exc}\n")

    count = 0
    for report in solve_canonical(
            source, sampler=sampler,
            d_m=None if d_m is None else int(d_m),
            d_n=None if d_n is None else int(d_n),
            max_n=None if max_n is None else int(max_n),
            tolerances=tolerances, verify_tol=verify_tol,
            refine=bool(args.refine), on_reject=on_reject):
        path = os.path.join(out_dir, f"solution-{count:04d}.json")
        io.write_json(io.report_to_json(report), path)
        sys.stdout.write(
            f"{path}: atoms={report.measure.n_atoms} "
            f"error={_fmt(report.max_abs_moment_error)} "
            f"passed={report.passed} u2={report.u2_seed}\n")
        count += 1
    sys.stdout.write(f"solutions written: {count}\n")
    return EXIT_OK


def cmd_eval_resolvent(args) -> int:
    config = _load_config(args.config)
    pair = io.pair_from_json(io.read_json(args.input))
    tolerances = _tolerances(args, config)
    iso = build_isometric_pair(pair, tolerances.subspace_tol,
                               tolerances.structure_tol,
                               tolerances.fixed_point_tol)
    d_n0 = iso.n0_basis.shape[1]
    d_ninf = iso.ninf_basis.shape[1]
    if args.phi is None:
        phi_matrix = np.zeros((d_ninf, d_n0), dtype=complex)
    else:
        phi_matrix = io.complex_matrix_from_json(
            io.read_json(args.phi), "phi", rows=d_ninf, cols=d_n0)
    phi = ContractionParameter.const(phi_matrix)
    grid1 = _grid(args, config, "l1")
    grid2 = _grid(args, config, "l2")
    fmt = _resolve(args, config, "format", "csv")
    if fmt not in ("csv", "json"):
        raise SchemaError("format must be 'csv' or 'json'")
    rows = []
    excluded = 0
    for lam1 in grid1:
        for lam2 in grid2:
            try:
                matrix = pair_resolvent_symmetric(
                    iso, phi, lam1, lam2,
                    subspace_tol=tolerances.subspace_tol,
                    structure_tol=tolerances.structure_tol,
                    excluded_radius=tolerances.excluded_radius)
            except ExcludedPointError:
                excluded += 1
                continue
            value = complex(np.vdot(pair.h00, matrix @ pair.h00))
            rows.append((lam1, lam2, value))
    if fmt == "csv":
        lines = ["l1_re,l1_im,l2_re,l2_im,value_re,value_im"]
        for lam1, lam2, value in rows:
            lines.append(",".join(_fmt(v) for v in (
                lam1.real, lam1.imag, lam2.real, lam2.imag,
                value.real, value.imag)))
        lines.append(f"# excluded: {excluded}")
        _write_or_print("\n".join(lines), args.output)
    else:
        out = {"rows": [[lam1.real, lam1.imag, lam2.real, lam2.imag,
                         value.real, value.imag]
                        for lam1, lam2, value in rows],
               "excluded": excluded}
        _write_or_print(io.dumps(out), args.output)
    return EXIT_OK


def _grid(args, config: dict, which: str) -> list:
    start = _resolve(args, config, f"{which}_start", None)
    if start is None:
        raise SchemaError(f"missing --{which}-start")
    stop = _resolve(args, config, f"{which}_stop", None)
    count = int(_resolve(args, config, f"{which}_count", 1))
    if count < 1:
        raise SchemaError(f"--{which}-count must be >= 1")
    z0 = _parse_complex(str(start), f"--{which}-start")
    if stop is None:
        if count != 1:
            raise SchemaError(f"--{which}-stop is required when "
                              f"--{which}-count > 1")
        return [z0]
    z1 = _parse_complex(str(stop), f"--{which}-stop")
    if count == 1:
        return [z0]
    ts = np.linspace(0.0, 1.0, count)
    return [complex(z0 + (z1 - z0) * t) for t in ts]


def cmd_verify(args) -> int:
    config = _load_config(args.config)
    measure = io.measure_from_json(io.read_json(args.measure))
    table = io.moment_table_from_json(io.read_json(args.table))
    tol = _positive(_resolve(args, config, "verify_tol", 1e-8), "verify_tol")
    report = verify_solution(measure, table, tol)
    _write_or_print(io.dumps(io.report_to_json(report)), args.output)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_demo(args) -> int:
    out_dir = args.output_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    s1, s2, s3 = e1(), e2(), e3()
    paths = {}
    for scen in (s1, s2, s3):
        table_path = os.path.join(out_dir, f"{scen.name}-table.json")
        io.write_json(io.moment_table_to_json(scen.table), table_path)
        paths[f"{scen.name}-table"] = table_path
        pair_path = os.path.join(out_dir, f"{scen.name}-pair.json")
        io.write_json(io.pair_to_json(scen.pair), pair_path)
        paths[f"{scen.name}-pair"] = pair_path
        if scen.measure is not None:
            m_path = os.path.join(out_dir, f"{scen.name}-measure.json")
            io.write_json(io.measure_to_json(scen.measure), m_path)
            paths[f"{scen.name}-measure"] = m_path
    for key in sorted(paths):
        sys.stdout.write(f"wrote {paths[key]}\n")
    # Determinate round trip on the two-atom scenario.
    reports = list(solve_canonical(s2.table))
    sys.stdout.write(
        f"e2 solve-canonical: {len(reports)} solution(s), "
        f"error={_fmt(reports[0].max_abs_moment_error)}\n")
    # Indeterminate family on the Jacobi scenario: four phases, one of
    # which may be rejected as a fixed point.
    labels = []

    def on_reject(label, exc):
        labels.append(f"{label} (rejected)")

    for report in solve_canonical(
            s3.pair, sampler=SamplerSpec(kind="exhaustive-phases", phases=4),
            on_reject=on_reject):
        labels.append(f"{report.u2_seed} -> atoms={report.measure.n_atoms}")
    sys.stdout.write("e3 canonical family:\n")
    for line in labels:
        sys.stdout.write(f"  {line}\n")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON file with flag overrides")
    parser.add_argument("--output", help="output file (default stdout)")
    for field in ("rank-tol", "psd-tol", "subspace-tol", "cluster-tol",
                  "atom-merge-tol", "verify-tol"):
        parser.add_argument(f"--{field}", type=float, default=None,
                            dest=field.replace("-", "_"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moment2d",
        description="Two-dimensional moment problem toolkit: positivity "
                    "checks, canonical solutions, resolvent grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="PSD and Carleman diagnostics "
                                     "for a moment table")
    p.add_argument("table", help="moment table JSON file")
    p.add_argument("--carleman-variant", choices=("pair", "single"),
                   default=None)
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve-canonical",
                       help="enumerate canonical solutions")
    p.add_argument("input", help="moment table or operator pair JSON file")
    p.add_argument("--sampler", choices=("identity-only", "haar-random",
                                         "exhaustive-phases"), default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--phases", type=int, default=None)
    p.add_argument("--d-m", type=int, default=None, dest="d_m")
    p.add_argument("--d-n", type=int, default=None, dest="d_n")
    p.add_argument("--max-n", type=int, default=None, dest="max_n")
    p.add_argument("--refine", action="store_true")
    p.add_argument("--output-dir", default=None, dest="output_dir")
    _add_common(p)
    p.set_defaults(func=cmd_solve_canonical)

    p = sub.add_parser("eval-resolvent",
                       help="evaluate the pair resolvent scalar on a grid")
    p.add_argument("input", help="operator pair JSON file")
    p.add_argument("--phi", help="constant parameter matrix JSON file "
                                 "(default zero)")
    p.add_argument("--l1-start", dest="l1_start")
    p.add_argument("--l1-stop", dest="l1_stop")
    p.add_argument("--l1-count", type=int, default=None, dest="l1_count")
    p.add_argument("--l2-start", dest="l2_start")
    p.add_argument("--l2-stop", dest="l2_stop")
    p.add_argument("--l2-count", type=int, default=None, dest="l2_count")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    _add_common(p)
    p.set_defaults(func=cmd_eval_resolvent)

    p = sub.add_parser("verify", help="compare a measure against a table")
    p.add_argument("measure", help="measure JSON file")
    p.add_argument("table", help="moment table JSON file")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="write bundled scenarios and run a "
                                    "small pipeline")
    p.add_argument("--output-dir", default=None, dest="output_dir")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (OSError, ValueError, TypeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except _VERIFY_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VERIFY
    except NotSelfAdjointA2Error as exc:
        sys.stderr.write(f"error: {exc}\n")
        if exc.defect_a1 is not None or exc.defect_a2 is not None:
            sys.stderr.write(f"defect indices: A1={exc.defect_a1} "
                             f"A2={exc.defect_a2}\n")
        return EXIT_STRUCTURE
    except _STRUCTURE_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_STRUCTURE
    except _PARAMETER_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARAMETER
    except Moment2dError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
