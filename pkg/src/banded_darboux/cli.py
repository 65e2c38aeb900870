"""Command line front end: banded-darboux <command> --config FILE.

Commands
    gen        build the seeded instance and vector, write them as JSON
    factorize  shifted LU plus the bidiagonal chain split
    transform  the rotated matrices J(j) (one j or all of them)
    polys      characteristic sequences of the source and the transforms
    verify     the full certificate run; exit status reflects the verdict

Reports are JSON documents {"payload": ..., "timings": ...}; the payload is
deterministic for a fixed (config, seed) and is what reproducibility
comparisons should hash. Reports land in --report-dir, else the config's
report_dir, else $BANDED_DARBOUX_REPORTS, else ./reports.

Exit codes (total over library errors):
    0  success / certificate passed
    1  configuration or input problem (ConfigError, GenerationExhausted,
       BadFreeSpec, NotMonicOrDegreeGap, InsufficientMoments,
       DegreeExceedsMoments, bad JSON, missing files)
    2  orthogonality hypothesis failure (HypothesisViolated,
       LadderViolation), including non-passing verify verdicts
    3  singular pivot (SingularLeadingMinor, ZeroPeelPivot)
    4  internal consistency (InternalCheckError, ConsistencyFailure,
       NonzeroRemainder, ShapeMismatch, SizeMismatch, NotSquare,
       IndexOutOfRange)
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .banded import BidiagonalChain, characteristic_polys
from .engine import free_entries_from_nu, run_theorem
from .errors import (
    BadFreeSpec,
    BandedDarbouxError,
    ConfigError,
    ConsistencyFailure,
    DegreeExceedsMoments,
    GenerationExhausted,
    HypothesisViolated,
    IndexOutOfRange,
    InsufficientMoments,
    InternalCheckError,
    LadderViolation,
    NonzeroRemainder,
    NotMonicOrDegreeGap,
    NotSquare,
    ShapeMismatch,
    SingularLeadingMinor,
    SizeMismatch,
    ZeroPeelPivot,
)
from .exact import format_rational
from .factorization import (
    bidiagonal_chain_factor,
    darboux_transform,
    shifted_lu,
    transformed_polys,
)
from .functionals import lambda_of
from .generate import InstanceConfig, generate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_HYPOTHESIS = 2
EXIT_SINGULAR = 3
EXIT_INTERNAL = 4

_EXIT_BY_ERROR = {
    ConfigError: EXIT_CONFIG,
    GenerationExhausted: EXIT_CONFIG,
    BadFreeSpec: EXIT_CONFIG,
    NotMonicOrDegreeGap: EXIT_CONFIG,
    InsufficientMoments: EXIT_CONFIG,
    DegreeExceedsMoments: EXIT_CONFIG,
    HypothesisViolated: EXIT_HYPOTHESIS,
    LadderViolation: EXIT_HYPOTHESIS,
    SingularLeadingMinor: EXIT_SINGULAR,
    ZeroPeelPivot: EXIT_SINGULAR,
    InternalCheckError: EXIT_INTERNAL,
    ConsistencyFailure: EXIT_INTERNAL,
    NonzeroRemainder: EXIT_INTERNAL,
    ShapeMismatch: EXIT_INTERNAL,
    SizeMismatch: EXIT_INTERNAL,
    NotSquare: EXIT_INTERNAL,
    IndexOutOfRange: EXIT_INTERNAL,
}


def exit_code_for(exc: BaseException) -> int:
    for klass, code in _EXIT_BY_ERROR.items():
        if isinstance(exc, klass):
            return code
    if isinstance(exc, (OSError, json.JSONDecodeError)):
        return EXIT_CONFIG
    return EXIT_INTERNAL


def _report_dir(args, config: InstanceConfig) -> Path:
    if args.report_dir:
        return Path(args.report_dir)
    if config.report_dir:
        return Path(config.report_dir)
    return Path(os.environ.get("BANDED_DARBOUX_REPORTS", "reports"))


def _write_report(args, config: InstanceConfig, command: str, payload: dict, timings: dict) -> Path:
    directory = _report_dir(args, config)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / (args.out or f"{command}.json")
    document = {"payload": payload, "timings": timings}
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    return path


def _load_config(args) -> InstanceConfig:
    if not args.config:
        raise ConfigError("--config FILE is required")
    data = json.loads(Path(args.config).read_text())
    if args.p is not None:
        data["p"] = args.p
    if args.seed is not None:
        data["seed"] = args.seed
    if args.shift is not None:
        data["C"] = args.shift
    if args.window is not None:
        data["window"] = args.window
    if args.j is not None:
        data["transform_index"] = args.j
    return InstanceConfig.from_json_dict(data)


def _poly_table(label: str, polys) -> list[str]:
    lines = [label]
    for n, poly in enumerate(polys):
        lines.append(f"  P_{n} = {poly}")
    return lines


def cmd_gen(args) -> int:
    config = _load_config(args)
    t0 = time.perf_counter()
    built = generate(config)
    payload = {
        "command": "gen",
        "tool_version": __version__,
        "config": built.config_echo,
        "matrix": built.instance.J.to_json_dict(),
        "C": format_rational(built.instance.shift),
        "shift_retries": list(built.shift_retries),
        "ladder_retries": built.ladder_retries,
        "nu": built.nu.to_json_dict(),
        "ladder": (
            None
            if built.ladder_rows is None
            else [[format_rational(v) for v in row] for row in built.ladder_rows]
        ),
    }
    timings = {"total_s": time.perf_counter() - t0}
    path = _write_report(args, config, "gen", payload, timings)
    print(f"instance p={config.p} N={config.n} seed={config.seed} C={payload['C']}")
    if built.shift_retries:
        print(f"  rejected shifts: {', '.join(built.shift_retries)}")
    print(f"report: {path}")
    return EXIT_OK


def cmd_factorize(args) -> int:
    config = _load_config(args)
    t0 = time.perf_counter()
    built = generate(config)
    inst = built.instance
    L, U = shifted_lu(inst)
    ladder = lambda_of(built.nu, built.source_polys)
    free = free_entries_from_nu(ladder, config.p)
    factors = bidiagonal_chain_factor(L, free)
    chain = BidiagonalChain(config.p, config.n, inst.shift, factors, U)
    payload = {
        "command": "factorize",
        "tool_version": __version__,
        "config": built.config_echo,
        "C": format_rational(inst.shift),
        "free_entries": free.to_json_dict(),
        "chain": chain.to_json_dict(),
    }
    timings = {"total_s": time.perf_counter() - t0}
    path = _write_report(args, config, "factorize", payload, timings)
    print(f"J - C*I = L(1)..L({config.p}) * U with C = {payload['C']}")
    print("U diagonal: " + ", ".join(format_rational(v) for v in U.diag))
    for f in factors:
        print(f"L({f.index}) subdiagonal: " + ", ".join(format_rational(v) for v in f.sub))
    print(f"report: {path}")
    return EXIT_OK


def _build_chain(config: InstanceConfig, built) -> BidiagonalChain:
    inst = built.instance
    L, U = shifted_lu(inst)
    ladder = lambda_of(built.nu, built.source_polys)
    free = free_entries_from_nu(ladder, config.p)
    factors = bidiagonal_chain_factor(L, free)
    return BidiagonalChain(config.p, config.n, inst.shift, factors, U)


def cmd_transform(args) -> int:
    config = _load_config(args)
    t0 = time.perf_counter()
    built = generate(config)
    chain = _build_chain(config, built)
    indices = (
        range(config.p + 1)
        if config.transform_index is None
        else [config.transform_index]
    )
    transforms = {}
    for j in indices:
        hess = darboux_transform(chain, j)
        transforms[str(j)] = {
            "matrix": hess.to_json_dict(),
            "valid_rows": hess.valid_rows,
        }
    payload = {
        "command": "transform",
        "tool_version": __version__,
        "config": built.config_echo,
        "chain": chain.to_json_dict(),
        "transforms": transforms,
    }
    timings = {"total_s": time.perf_counter() - t0}
    path = _write_report(args, config, "transform", payload, timings)
    for j in indices:
        print(f"J({j}): valid rows {transforms[str(j)]['valid_rows']} of {config.n}")
    print(f"report: {path}")
    return EXIT_OK


def cmd_polys(args) -> int:
    config = _load_config(args)
    t0 = time.perf_counter()
    built = generate(config)
    chain = _build_chain(config, built)
    nmax = config.window
    indices = (
        range(config.p + 1)
        if config.transform_index is None
        else [config.transform_index]
    )
    sequences = {}
    lines = []
    for j in indices:
        polys = (
            characteristic_polys(built.instance.J, nmax)
            if j == 0
            else transformed_polys(chain, j, nmax)
        )
        sequences[str(j)] = [
            [format_rational(c) for c in poly.coefficients] for poly in polys
        ]
        lines.extend(_poly_table(f"stage {j}:", polys))
    payload = {
        "command": "polys",
        "tool_version": __version__,
        "config": built.config_echo,
        "nmax": nmax,
        "sequences": sequences,
    }
    timings = {"total_s": time.perf_counter() - t0}
    path = _write_report(args, config, "polys", payload, timings)
    print("\n".join(lines))
    print(f"report: {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _load_config(args)
    t0 = time.perf_counter()
    built = generate(config)
    certificate = run_theorem(built.instance, built.nu, config.window)
    payload = {
        "command": "verify",
        "tool_version": __version__,
        "config": built.config_echo,
        "certificate": certificate.to_json_dict(),
    }
    timings = {"total_s": time.perf_counter() - t0}
    path = _write_report(args, config, "verify", payload, timings)
    print(f"verdict: {'pass' if certificate.passed else 'FAIL'}")
    for verdict in certificate.stage_verdicts:
        status = "pass" if verdict.passed else "FAIL"
        print(
            f"  j={verdict.j}: {status} "
            f"({verdict.report.zero_checks} zero checks, "
            f"{verdict.report.nonzero_checks} nonzero checks)"
        )
        for witness in verdict.report.failures:
            print(
                f"    witness {witness.kind} (r={witness.r}, k={witness.k}, "
                f"n={witness.n}) -> {format_rational(witness.value)}"
            )
    if certificate.partial is not None:
        print(
            f"  partial chain: {certificate.partial.stages} factor(s), "
            f"minor (stage {certificate.partial.violated[0]}, "
            f"size {certificate.partial.violated[1]}) = 0"
        )
    print(f"report: {path}")
    return EXIT_OK if certificate.passed else EXIT_HYPOTHESIS


_COMMANDS = {
    "gen": cmd_gen,
    "factorize": cmd_factorize,
    "transform": cmd_transform,
    "polys": cmd_polys,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banded-darboux",
        description="Exact Darboux factorizations of banded Hessenberg matrices",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--p", type=int, help="override band parameter")
    parser.add_argument("--seed", type=int, help="override seed")
    parser.add_argument("--C", dest="shift", help="override shift (rational string)")
    parser.add_argument("--window", type=int, help="override verification window")
    parser.add_argument("--j", type=int, help="select one transform index")
    parser.add_argument("--report-dir", help="override report directory")
    parser.add_argument("--out", help="report file name inside the report directory")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; that slot belongs to hypothesis
        # failures here, so usage problems become config errors.
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except BandedDarbouxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
