"""
Terminal interface for the A-infinity workbench.

Each subcommand runs one computation and exits 0 on a full pass, 1 when a verification fails
(the first failure is printed) and 2 on a usage or configuration error.

Examples:
    python main.py transfer --d-max 5 --basis single --output table.json
    python main.py verify --arity 6 --threads 8
    python main.py hkr
    python main.py determinacy --random 20
    python main.py toric --golden
    python main.py floer-check
    python main.py verify-contraction --max-sym 6 --write
"""

import argparse
import logging
import os
import random
import sys
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from algebra.koszul import OneForm, sign_normalize_gamma
from algebra.koszul import superpotential as default_superpotential
from algebra.polynomials import Poly
from algebra.scalars import bit
from services.ainfty_structure import (
    AInftyStructure,
    check_index_degrees,
    check_low_order,
    check_weights,
    hkr_summary,
    semidirect,
    verify_ainfty,
)
from services.contraction import matrix_factorization_check, verify_contraction
from services.determinacy import exactness_sample, random_invariant_perturbation, reduce_to_W
from services.floer_data import (
    compare_with_transfer,
    hkr_mismatches,
    load_floer_data,
    mutate,
    transport,
    validate_floer,
)
from services.toric import (
    Lattice,
    compare_golden,
    coverage_gaps,
    default_charts,
    load_golden,
    render_toric,
    verify_chart,
)
from services.transfer import TransferResult, transfer
from utils.config import JobConfig
from utils.errors import ConfigError, DeterminacyError, VerificationFailure, WorkbenchError
from utils.serialization import file_hash
from utils.terminal_colors import TerminalColors as tc
from utils.utilities import Utilities

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class UsageParser(argparse.ArgumentParser):
    """argparse parser whose usage errors raise instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def _status(label: str, passed: bool, detail: str = "") -> None:
    print(f"{tc.status(passed)} {label}" + (f": {detail}" if detail else ""))


def _fail(message: str, first_failure: str = "") -> None:
    raise VerificationFailure(message, first_failure)


def _single_basis(n: int) -> list[int]:
    return [bit(k) for k in range(1, n + 1)]


def _conventions_path(cfg: JobConfig) -> Path:
    return Path(cfg.conventions_file) if cfg.conventions_file else Utilities().conventions_path()


def _transfer(cfg: JobConfig, d_max: int, basis: Optional[list[int]] = None, min_arity: int = 1) -> TransferResult:
    gamma, _flip = cfg.one_form()
    return transfer(
        gamma,
        d_max,
        basis=basis,
        threads=cfg.threads,
        cache_dir=Path(cfg.cache_dir) if cfg.cache_dir else None,
        conventions=file_hash(_conventions_path(cfg)),
        min_arity=min_arity,
    )


def _gamma_flip(cfg: JobConfig) -> int:
    """Sign taking the job's γ to the one whose W_eff is the target superpotential."""
    try:
        _gamma, flip = sign_normalize_gamma(OneForm.from_strings(cfg.gamma, cfg.n), cfg.target_superpotential())
    except ValueError:
        return 1
    return flip


def _applied_flip(cfg: JobConfig) -> int:
    """The part of that sign not already applied to the γ the job transfers with."""
    return 1 if cfg.normalize_gamma else _gamma_flip(cfg)


def _hkr_sign(cfg: JobConfig) -> int:
    """The recorded HKR sign, stored for the normalised γ, carried over to the γ the job runs on."""
    value = Utilities().read_conventions(_conventions_path(cfg)).get("hkr_sign", 1)
    return value * _applied_flip(cfg)


# ---------------------------------------------------------------------------------------------
# subcommands


def cmd_transfer(cfg: JobConfig, args: argparse.Namespace) -> int:
    d_max = args.d_max or cfg.d_max
    basis = _single_basis(cfg.n) if args.basis == "single" else None
    result = _transfer(cfg, d_max, basis)
    _gamma, flip = cfg.one_form()
    metadata = {"gamma_flip": flip, "seed": cfg.seed}
    text = result.constant_table(metadata)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        Utilities().log_msg_green(f"Wrote {len(result.entries)} constants to {args.output}")
    else:
        sys.stdout.write(text)
    sign = _hkr_sign(cfg)
    for (d, k), image in hkr_summary(AInftyStructure.from_transfer(result)).items():
        print(f"{tc.CYAN}HKR mu^{d}_{k}:{tc.RESET} {image.scale(sign)}  (raw {image})", file=sys.stderr)
    return EXIT_PASS


def cmd_verify(cfg: JobConfig, args: argparse.Namespace) -> int:
    arity = args.arity or cfg.d_max
    mu = AInftyStructure.from_transfer(_transfer(cfg, arity))
    report = verify_ainfty(mu, arity)
    _status("A-infinity relations", report.passed, report.summary())
    weights = check_weights(mu, None)
    _status("weight law", weights.passed, weights.summary())
    index = check_index_degrees(mu)
    _status("index law", index.passed, index.summary())
    low = check_low_order(mu)
    _status("low-order terms", low.passed, low.summary())
    failures = report.failures + weights.violations + index.violations + low.violations
    if args.semidirect:
        product = semidirect(mu.restricted(args.semidirect), cfg.z_group())
        semi = product.verify(args.semidirect)
        _status(f"semidirect product with Z through arity {args.semidirect}", semi.passed, semi.summary())
        failures += semi.failures
    if failures:
        _fail("verification failed", failures[0])
    return EXIT_PASS


def cmd_hkr(cfg: JobConfig, args: argparse.Namespace) -> int:
    d_max = args.d_max or min(cfg.d_max, 5)
    result = _transfer(cfg, d_max, _single_basis(cfg.n), min_arity=2)
    sign = _hkr_sign(cfg)
    mu = AInftyStructure.from_transfer(result)
    summary = hkr_summary(mu)
    for (d, k), image in summary.items():
        print(f"mu^{d}_{k}: {image.scale(sign)}")
    if not summary:
        print("no nonzero HKR classes through this arity")
    low_arity = AInftyStructure.from_transfer(_transfer(cfg, min(d_max, 3)))
    low = check_low_order(AInftyStructure(cfg.n, {**low_arity.entries, **mu.entries}, label="transferred"))
    _status("low-order terms", low.passed, low.summary())
    if not low.passed:
        _fail("unexpected low-order constants", low.violations[0])
    if cfg.n == 3 and cfg.target_superpotential() == default_superpotential(3):
        mismatches = hkr_mismatches(summary, sign, cfg.n, range(2, d_max + 1))
        _status("potential terms", not mismatches, f"{len(mismatches)} mismatches")
        if mismatches:
            _fail("HKR classes differ from the potential", mismatches[0])
    return EXIT_PASS


def _perturbations(cfg: JobConfig, args: argparse.Namespace) -> list[Poly]:
    found = []
    if args.perturbation:
        found.append(Poly.from_sympy(Utilities().load_text(args.perturbation).strip(), cfg.n))
    if args.expression:
        found.append(Poly.from_sympy(args.expression, cfg.n))
    if args.random:
        rng = random.Random(cfg.seed)
        found.extend(random_invariant_perturbation(rng, cfg.group()) for _ in range(args.random))
    if not found:
        raise ConfigError("determinacy needs --perturbation, --expression or --random")
    return found


def cmd_determinacy(cfg: JobConfig, args: argparse.Namespace) -> int:
    w = cfg.target_superpotential()
    order = args.order or cfg.truncation
    failures = []
    for index, perturbation in enumerate(_perturbations(cfg, args), start=1):
        try:
            certificate = reduce_to_W(w + perturbation, order, w=w, group=cfg.group())
        except DeterminacyError as exc:
            failures.append(f"perturbation {index} ({perturbation}): {exc}")
            _status(f"perturbation {index}", False, str(exc))
            continue
        _status(f"perturbation {index}", certificate.passed, certificate.summary())
        print(f"  W' = W + ({perturbation})")
        print(f"  change: {certificate.change}")
        if not certificate.passed:
            failures.append(f"perturbation {index}: residual {certificate.residual}")
    if args.exactness:
        report = exactness_sample(w, order, random.Random(cfg.seed), samples=args.exactness)
        _status("Koszul exactness sample", report.passed, f"{report.solved}/{report.samples} cocycles re-solved")
        failures += report.failures
    if failures:
        _fail("determinacy failed", failures[0])
    return EXIT_PASS


def cmd_toric(cfg: JobConfig, args: argparse.Namespace) -> int:
    charts = default_charts()
    w = cfg.target_superpotential()
    text = render_toric(charts, w)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    failures = Lattice().check()
    for chart in charts:
        report = verify_chart(chart)
        failures += report.failures
    gaps = coverage_gaps(charts)
    if gaps:
        failures.append(f"{len(gaps)} lattice points of the positive orthant lie in no cone, e.g. {gaps[0]}")
    if args.golden:
        failures += compare_golden(charts, w, load_golden())
    _status("toric charts", not failures, f"{len(charts)} charts checked")
    if failures:
        _fail("toric data inconsistent", failures[0])
    return EXIT_PASS


def cmd_floer_check(cfg: JobConfig, args: argparse.Namespace) -> int:
    tables, dictionary = load_floer_data(Utilities().load_text(args.tables) if args.tables else None)
    if args.mutate is not None:
        tables = mutate(tables, args.mutate)
    report = validate_floer(tables, dictionary, cfg.n)
    _status("Floer transport", report.passed, report.summary())
    failures = list(report.failures)
    if args.compare_transfer:
        low = _transfer(cfg, 2)
        high = _transfer(cfg, 5, _single_basis(cfg.n), min_arity=3)
        merged = AInftyStructure(cfg.n, {**low.entries, **high.entries}, label="transferred")
        mismatches = compare_with_transfer(transport(tables, dictionary, cfg.n), merged, _hkr_sign(cfg))
        _status("agreement with the transferred structure", not mismatches)
        failures += mismatches
    if failures:
        _fail("Floer data check failed", failures[0])
    return EXIT_PASS


def cmd_verify_contraction(cfg: JobConfig, args: argparse.Namespace) -> int:
    report = verify_contraction(cfg.n, args.max_sym)
    _status("contraction data", report.passed, report.summary())
    gamma, _flip = cfg.one_form()
    w_eff = matrix_factorization_check(gamma)
    target = cfg.target_superpotential()
    matches = w_eff == target or (not cfg.normalize_gamma and -w_eff == target)
    _status("matrix factorization", matches, f"W_eff = {w_eff}")
    if not matches:
        _fail("W_eff differs from the target superpotential", f"W_eff = {w_eff}, W = {target}")
    if not report.passed:
        _fail("contraction data failed", report.failures[0] if report.failures else "no homotopy sign")
    if args.write:
        values = {"contraction_side": 1, "homotopy_sign": report.epsilon, "gamma_flip": _gamma_flip(cfg)}
        if cfg.n == 3:
            result = _transfer(cfg, 3, _single_basis(cfg.n), min_arity=3)
            cubic = hkr_summary(AInftyStructure.from_transfer(result)).get((3, 0))
            coefficient = cubic.coefficient_poly(0).coefficient((1, 1, 1)) if cubic else 0
            if coefficient not in (1, -1):
                _fail("cannot fix the HKR sign", f"coefficient of v1*v2*v3 is {coefficient}")
            values["hkr_sign"] = int(-coefficient) * _applied_flip(cfg)
        path = Path(cfg.conventions_file) if cfg.conventions_file else None
        Utilities().write_conventions(values, path)
    return EXIT_PASS


COMMANDS = {
    "transfer": cmd_transfer,
    "verify": cmd_verify,
    "hkr": cmd_hkr,
    "determinacy": cmd_determinacy,
    "toric": cmd_toric,
    "floer-check": cmd_floer_check,
    "verify-contraction": cmd_verify_contraction,
}


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(prog="ainfty", description="Exact A-infinity computations on the exterior algebra")
    parser.add_argument("--threads", type=int, help="worker threads (env AINFTY_THREADS)")
    parser.add_argument("--seed", type=int, help="seed for randomised checks (env AINFTY_SEED)")
    parser.add_argument("--config", help="JSON job file; its values override flags and environment")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=LOG_LEVELS,
        default=os.getenv("AINFTY_LOG_LEVEL", "INFO"),
        help="logging level (env AINFTY_LOG_LEVEL)",
    )
    parser.add_argument(
        "--printed-gamma", action="store_true", help="use the printed one-form without sign normalisation"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageParser)

    p = sub.add_parser("transfer", help="structure constants as canonical JSON")
    p.add_argument("--d-max", type=int)
    p.add_argument("--basis", choices=["full", "single"], default="full")
    p.add_argument("--output")
    p.add_argument("--default-job", action="store_true", help="explicitly request the default job")

    p = sub.add_parser("verify", help="A-infinity relations and grading laws")
    p.add_argument("--arity", type=int)
    p.add_argument("--semidirect", type=int, default=0, metavar="ARITY", help="also check A x Z through ARITY")

    p = sub.add_parser("hkr", help="HKR classes of the transferred structure")
    p.add_argument("--d-max", type=int)

    p = sub.add_parser("determinacy", help="reduce perturbations of W back to W")
    p.add_argument("--perturbation", help="file holding one polynomial in v1..vn")
    p.add_argument("--expression", help="perturbation given inline")
    p.add_argument("--random", type=int, default=0, help="number of seeded random invariant perturbations")
    p.add_argument("--order", type=int, help="truncation order N")
    p.add_argument("--exactness", type=int, default=0, metavar="SAMPLES", help="sampled Koszul exactness check")

    p = sub.add_parser("toric", help="charts, transitions and H equations")
    p.add_argument("--golden", action="store_true", help="compare with the vendored golden data")
    p.add_argument("--output")

    p = sub.add_parser("floer-check", help="validate the transported Floer data")
    p.add_argument("--tables", help="alternative JSON table")
    p.add_argument("--mutate", type=int, help="flip the sign of this product record")
    p.add_argument("--compare-transfer", action="store_true")

    p = sub.add_parser("verify-contraction", help="check (i, p, h) and the matrix factorization")
    p.add_argument("--max-sym", type=int, default=6)
    p.add_argument("--write", action="store_true", help="rewrite the conventions file")
    return parser


def load_config(args: argparse.Namespace) -> JobConfig:
    cfg = JobConfig.from_env(threads=args.threads, seed=args.seed)
    if args.printed_gamma:
        cfg = JobConfig.build({**cfg.model_dump(), "normalize_gamma": False})
    if args.config:
        cfg = JobConfig.from_json(Utilities().load_text(args.config), base=cfg)
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
        if args.log_level not in LOG_LEVELS:
            raise ConfigError(f"unknown log level {args.log_level!r}, expected one of {LOG_LEVELS}")
        logging.basicConfig(level=args.log_level, format="%(message)s")
        cfg = load_config(args)
        logger.debug(f"[CLI] {args.command} with {cfg.to_json().strip()}")
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"{tc.BG_BRIGHT_RED}usage error: {exc}{tc.RESET}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailure as exc:
        print(f"{tc.BG_BRIGHT_RED}{exc}{tc.RESET}", file=sys.stderr)
        if exc.first_failure:
            print(f"first failure: {exc.first_failure}", file=sys.stderr)
        return EXIT_FAILURE
    except (WorkbenchError, FileNotFoundError) as exc:
        print(f"{tc.BG_BRIGHT_RED}{type(exc).__name__}: {exc}{tc.RESET}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
