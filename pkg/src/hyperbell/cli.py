"""Command-line interface.

Subcommands mirror the library layers: ``verify`` re-derives the exact
quantities, ``bounds``/``eta-threshold``/``min-n``/``sweep`` analyze noise
and detection efficiency, ``simulate`` runs the finite-statistics model, and
``dump-terms`` prints the expanded Bell expression for small N.

Output is JSON by default; tabular commands also emit CSV (fixed column
order, a leading ``#`` metadata line, shortest round-trip float formatting).
Exit codes: 0 success, 1 verification failure or no violation possible,
2 usage error.  Commands are deterministic: repeating one with the same seed
and any ``--threads`` value produces byte-identical output.  If the
``HYPERBELL_SEED`` environment variable is set it overrides the default
seed 0; an explicit ``--seed`` beats both.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Any

from .bell import enumerate_terms, n_terms, quantum_value
from .efficiency import (
    NoViolationError,
    NoiseParams,
    bounds_report,
    min_blocks,
    visibility_factor,
)
from .lhv import BRUTE_FORCE_BLOCK_CAP, brute_force_bound, factored_bound
from .montecarlo import estimate_beta
from .pauli import pauli_to_string
from .state import verify_perfect_correlations

SEED_ENV_VAR = "HYPERBELL_SEED"
DUMP_TERMS_CAP = 6

OUTPUT_COLUMNS = (
    "n",
    "beta_epr",
    "beta_qm",
    "beta_epr_noisy",
    "beta_qm_noisy",
    "ratio",
    "eta_min",
    "violated",
)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {value}")
    return value


def _usage_error(message: str) -> SystemExit:
    sys.stderr.write(f"error: {message}\n")
    return SystemExit(2)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _usage_error(f"invalid {SEED_ENV_VAR} value: {raw!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _json_text(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _csv_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(columns: tuple[str, ...], rows: list[dict[str, Any]], meta: dict[str, Any]) -> str:
    buffer = io.StringIO()
    meta_text = " ".join(f"{k}={_csv_cell(v)}" for k, v in meta.items())
    buffer.write(f"# {meta_text}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buffer.getvalue()


def _output_row(n: int, eps: float, p: float, eta: float) -> dict[str, Any]:
    report = bounds_report(n, eps, p)
    return {
        "n": report.n_blocks,
        "beta_epr": report.beta_epr,
        "beta_qm": report.beta_qm,
        "beta_epr_noisy": report.beta_epr_noisy,
        "beta_qm_noisy": report.beta_qm_noisy,
        "ratio": report.ratio,
        "eta_min": report.eta_min,
        "violated": visibility_factor(eta) * report.beta_qm_noisy > report.beta_epr_noisy,
    }


def cmd_verify(args: argparse.Namespace) -> int:
    n = args.n
    report = verify_perfect_correlations(n)
    failures = [
        {"block": c.block, "label": c.label, "expected": c.expected, "actual": c.actual}
        for c in report.failures()
    ]
    term_failures: list[str] = []
    try:
        beta_qm = quantum_value(n, threads=args.threads)
    except ValueError as exc:
        beta_qm = None
        term_failures.append(str(exc))
    if n <= 2:
        lhv_method = "brute_force"
        beta_epr = brute_force_bound(n).max_value
    else:
        lhv_method = "factored"
        beta_epr = factored_bound(n)
    ok = (
        report.passed
        and not term_failures
        and beta_qm == 4**n
        and beta_epr == 2**n
    )
    doc = {
        "command": "verify",
        "schema_version": 1,
        "n": n,
        "correlations": {
            "passed": report.n_passed,
            "total": len(report.checks),
            "failures": failures,
        },
        "beta_qm": {"value": beta_qm, "expected": 4**n, "failures": term_failures},
        "beta_epr": {"value": beta_epr, "expected": 2**n, "method": lhv_method},
        "ok": ok,
    }
    _emit(_json_text(doc), args.out)
    return 0 if ok else 1


def cmd_bounds(args: argparse.Namespace) -> int:
    n = args.n
    report = bounds_report(n, args.eps, args.p)
    if n <= BRUTE_FORCE_BLOCK_CAP:
        lhv = brute_force_bound(n)
        lhv_doc: dict[str, Any] = {
            "method": "brute_force",
            "value": lhv.max_value,
            "assignments_scanned": lhv.assignments_scanned,
            "argmax_bitmask": lhv.argmax.to_bitmask(),
        }
    else:
        lhv_doc = {"method": "factored", "value": factored_bound(n)}
    doc = {
        "command": "bounds",
        "schema_version": 1,
        "n": n,
        "eps": args.eps,
        "p": args.p,
        "beta_epr": report.beta_epr,
        "beta_qm": report.beta_qm,
        "beta_epr_noisy": report.beta_epr_noisy,
        "beta_qm_noisy": report.beta_qm_noisy,
        "ratio": report.ratio,
        "eta_min": report.eta_min,
        "lhv": lhv_doc,
    }
    _emit(_json_text(doc), args.out)
    return 0


def cmd_eta_threshold(args: argparse.Namespace) -> int:
    report = bounds_report(args.n, args.eps, args.p)
    doc = {
        "command": "eta-threshold",
        "schema_version": 1,
        "n": args.n,
        "eps": args.eps,
        "p": args.p,
        "beta_epr_noisy": report.beta_epr_noisy,
        "beta_qm_noisy": report.beta_qm_noisy,
        "ratio": report.ratio,
        "eta_min": report.eta_min,
        "feasible": report.eta_min <= 1.0,
    }
    _emit(_json_text(doc), args.out)
    return 0


def cmd_min_n(args: argparse.Namespace) -> int:
    try:
        result = min_blocks(args.eta, args.eps, args.p, n_cap=args.n_cap)
    except NoViolationError as exc:
        doc = {
            "command": "min-n",
            "schema_version": 1,
            "eta": args.eta,
            "eps": args.eps,
            "p": args.p,
            "n_star": None,
            "error": str(exc),
        }
        _emit(_json_text(doc), args.out)
        return 1
    rows = [_output_row(r.n_blocks, args.eps, args.p, args.eta) for r in result.table]
    meta = {
        "eta": args.eta,
        "eps": args.eps,
        "p": args.p,
        "visibility": result.visibility,
        "n_star": result.n_star,
    }
    if args.format == "csv":
        _emit(_csv_text(OUTPUT_COLUMNS, rows, meta), args.out)
    else:
        doc = {"command": "min-n", "schema_version": 1, **meta, "rows": rows}
        _emit(_json_text(doc), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.n_min > args.n_max:
        raise _usage_error(f"--n-min {args.n_min} exceeds --n-max {args.n_max}")
    rows = [
        _output_row(n, args.eps, args.p, args.eta)
        for n in range(args.n_min, args.n_max + 1)
    ]
    meta = {"n_min": args.n_min, "n_max": args.n_max, "eta": args.eta, "eps": args.eps, "p": args.p}
    if args.format == "csv":
        _emit(_csv_text(OUTPUT_COLUMNS, rows, meta), args.out)
    else:
        doc = {"command": "sweep", "schema_version": 1, "params": meta, "rows": rows}
        _emit(_json_text(doc), args.out)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    noise = NoiseParams(epsilon=args.eps, p=args.p, eta=args.eta)
    estimate = estimate_beta(
        args.n,
        args.shots,
        noise,
        seed=args.seed,
        term_budget=args.term_budget,
        threads=args.threads,
    )
    _emit(_json_text(estimate.to_json_dict()), args.out)
    return 0


def cmd_dump_terms(args: argparse.Namespace) -> int:
    n = args.n
    if n > DUMP_TERMS_CAP:
        raise _usage_error(
            f"dump-terms supports up to {DUMP_TERMS_CAP} blocks ({4**DUMP_TERMS_CAP} terms)"
        )
    rows = [
        {
            "index": term.index,
            "choices": ".".join(term.labels),
            "sign": term.sign,
            "operator": pauli_to_string(term.operator),
        }
        for term in enumerate_terms(n)
    ]
    if args.format == "csv":
        _emit(_csv_text(("index", "choices", "sign", "operator"), rows, {"n": n, "terms": n_terms(n)}), args.out)
    else:
        doc = {"command": "dump-terms", "schema_version": 1, "n": n, "terms": rows}
        _emit(_json_text(doc), args.out)
    return 0


def _add_noise_flags(parser: argparse.ArgumentParser, with_eta: bool = True) -> None:
    parser.add_argument("--eps", type=_unit_interval, default=0.15, help="certainty-relation error tolerance (default 0.15)")
    parser.add_argument("--p", type=_unit_interval, default=0.98, help="intended-state weight in the prepared mixture (default 0.98)")
    if with_eta:
        parser.add_argument("--eta", type=_unit_interval, default=0.33, help="detection efficiency per particle (default 0.33)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperbell",
        description="Bell inequalities for block-structured hyperentangled states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="re-derive the exact correlations and bounds")
    p_verify.add_argument("--n", type=_positive_int, required=True, help="number of blocks")
    p_verify.add_argument("--threads", type=_positive_int, default=1)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_bounds = sub.add_parser("bounds", help="ideal and noise-adjusted bounds for one N")
    p_bounds.add_argument("--n", type=_positive_int, required=True)
    _add_noise_flags(p_bounds, with_eta=False)
    p_bounds.add_argument("--out", default=None)
    p_bounds.set_defaults(func=cmd_bounds)

    p_eta = sub.add_parser("eta-threshold", help="minimum detection efficiency for one N")
    p_eta.add_argument("--n", type=_positive_int, required=True)
    _add_noise_flags(p_eta, with_eta=False)
    p_eta.add_argument("--out", default=None)
    p_eta.set_defaults(func=cmd_eta_threshold)

    p_min = sub.add_parser("min-n", help="smallest N that violates at a given efficiency")
    _add_noise_flags(p_min)
    p_min.add_argument("--n-cap", type=_positive_int, default=64, help="search cap (default 64)")
    p_min.add_argument("--format", choices=("json", "csv"), default="json")
    p_min.add_argument("--out", default=None)
    p_min.set_defaults(func=cmd_min_n)

    p_sweep = sub.add_parser("sweep", help="bound table over a range of N")
    p_sweep.add_argument("--n-min", type=_positive_int, default=1)
    p_sweep.add_argument("--n-max", type=_positive_int, required=True)
    _add_noise_flags(p_sweep)
    p_sweep.add_argument("--format", choices=("json", "csv"), default="csv")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_sim = sub.add_parser("simulate", help="finite-statistics estimate of the Bell value")
    p_sim.add_argument("--n", type=_positive_int, required=True)
    p_sim.add_argument("--shots", type=_positive_int, required=True, help="runs per term")
    _add_noise_flags(p_sim)
    p_sim.add_argument("--seed", type=_nonnegative_int, default=_default_seed(), help=f"master seed (default 0, or ${SEED_ENV_VAR})")
    p_sim.add_argument("--term-budget", type=_positive_int, default=4096)
    p_sim.add_argument("--threads", type=_positive_int, default=1)
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_dump = sub.add_parser("dump-terms", help="print the expanded Bell expression")
    p_dump.add_argument("--n", type=_positive_int, required=True)
    p_dump.add_argument("--format", choices=("json", "csv"), default="csv")
    p_dump.add_argument("--out", default=None)
    p_dump.set_defaults(func=cmd_dump_terms)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
