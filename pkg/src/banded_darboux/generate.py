"""Seeded instance generation and run configuration.

Everything random flows through one `random.Random(seed)` in a fixed draw
order, so a (config, seed) pair regenerates byte-identical artifacts. Draws
are small rationals: numerator in [-B, B], denominator in [1, B], with the
lowest band of J and ladder diagonals resampled until nonzero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .banded import BandedHessenberg, characteristic_polys
from .engine import _delta_table, moment_budget
from .errors import (
    ConfigError,
    GenerationExhausted,
    ShapeMismatch,
    SingularLeadingMinor,
    SizeMismatch,
)
from .exact import Polynomial, format_rational, parse_rational
from .factorization import ShiftedInstance
from .functionals import (
    LambdaLadder,
    LinearFunctional,
    OrthogonalityVector,
    build_nu,
    canonical_nu,
    dual_sequence,
)

DEFAULT_BOUND = 9
DEFAULT_RETRY_CAP = 32


def random_rational(rng: random.Random, bound: int, nonzero: bool = False) -> Fraction:
    num = rng.randint(-bound, bound)
    while nonzero and num == 0:
        num = rng.randint(-bound, bound)
    den = rng.randint(1, bound)
    return Fraction(num, den)


def random_hessenberg(rng: random.Random, p: int, n: int, bound: int) -> BandedHessenberg:
    """Random band entries, lowest band kept nonzero (resampled)."""
    bands: dict[int, list[Fraction]] = {d: [Fraction(0)] * n for d in range(-p, 1)}
    for i in range(n):
        for m in range(max(0, i - p), i + 1):
            bands[m - i][i] = random_rational(rng, bound, nonzero=(m == i - p))
    return BandedHessenberg(p, n, bands)


def random_ladder(rng: random.Random, p: int, bound: int) -> LambdaLadder:
    rows = []
    for i in range(1, p + 1):
        row = [random_rational(rng, bound) for _ in range(i - 1)]
        row.append(random_rational(rng, bound, nonzero=True))
        rows.append(row)
    return LambdaLadder(rows)


@dataclass
class InstanceConfig:
    """One reproducible run: sizes, sources, seed, and output knobs."""

    p: int
    n: int
    window: int
    seed: int = 0
    bound: int = DEFAULT_BOUND
    shift: str = "0"
    matrix_source: str = "random"              # "random" | "explicit"
    matrix_bands: Optional[Mapping] = None     # JSON matrix dict when explicit
    nu_source: str = "random"                  # "random" | "canonical" | "ladder"
    nu_ladder: Optional[Sequence[Sequence[str]]] = None
    require_hypotheses: bool = True            # resample random ladders until minors nonzero
    retry_cap: int = DEFAULT_RETRY_CAP
    report_dir: Optional[str] = None
    transform_index: Optional[int] = None      # None means all j = 0..p

    @property
    def moment_budget(self) -> int:
        return moment_budget(self.window, self.p)

    def validate(self) -> None:
        if self.p < 1:
            raise ConfigError(f"p must be >= 1, got {self.p}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.bound < 1:
            raise ConfigError(f"bound must be >= 1, got {self.bound}")
        if self.retry_cap < 0:
            raise ConfigError(f"retry cap must be >= 0, got {self.retry_cap}")
        if self.window + self.p + 1 > self.n:
            raise ConfigError(
                f"window {self.window} with p {self.p} needs N >= "
                f"{self.window + self.p + 1}, got {self.n}"
            )
        if self.moment_budget > self.n:
            raise ConfigError(
                f"moment budget {self.moment_budget} exceeds N = {self.n}; "
                f"raise N or shrink the window"
            )
        if self.matrix_source not in ("random", "explicit"):
            raise ConfigError(f"unknown matrix source {self.matrix_source!r}")
        if self.matrix_source == "explicit" and self.matrix_bands is None:
            raise ConfigError("explicit matrix source needs matrix bands")
        if self.nu_source not in ("random", "canonical", "ladder"):
            raise ConfigError(f"unknown nu source {self.nu_source!r}")
        if self.nu_source == "ladder" and self.nu_ladder is None:
            raise ConfigError("ladder nu source needs ladder rows")
        if self.transform_index is not None and not 0 <= self.transform_index <= self.p:
            raise ConfigError(
                f"transform index {self.transform_index} outside 0..{self.p}"
            )
        try:
            parse_rational(self.shift)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad shift {self.shift!r}: {exc}") from None

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "N": self.n,
            "window": self.window,
            "seed": self.seed,
            "bound": self.bound,
            "C": self.shift,
            "matrix": (
                {"source": "explicit", "bands": dict(self.matrix_bands or {})}
                if self.matrix_source == "explicit"
                else {"source": "random"}
            ),
            "nu": (
                {"source": "ladder", "lambda": [list(r) for r in (self.nu_ladder or [])]}
                if self.nu_source == "ladder"
                else {"source": self.nu_source, "require_hypotheses": self.require_hypotheses}
            ),
            "retry_cap": self.retry_cap,
            "moment_budget": self.moment_budget,
            "transform_index": self.transform_index,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "InstanceConfig":
        try:
            matrix = data.get("matrix", {"source": "random"})
            nu = data.get("nu", {"source": "random"})
            cfg = cls(
                p=int(data["p"]),
                n=int(data["N"]),
                window=int(data["window"]),
                seed=int(data.get("seed", 0)),
                bound=int(data.get("bound", DEFAULT_BOUND)),
                shift=str(data.get("C", "0")),
                matrix_source=matrix.get("source", "random"),
                matrix_bands=matrix.get("bands"),
                nu_source=nu.get("source", "random"),
                nu_ladder=nu.get("lambda"),
                require_hypotheses=bool(nu.get("require_hypotheses", True)),
                retry_cap=int(data.get("retry_cap", DEFAULT_RETRY_CAP)),
                report_dir=data.get("report_dir"),
                transform_index=(
                    None
                    if data.get("transform_index") is None
                    else int(data["transform_index"])
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class GeneratedInstance:
    """Instance plus vector, with the retries it took to get there."""

    config_echo: dict
    instance: ShiftedInstance
    nu: OrthogonalityVector
    duals: tuple[LinearFunctional, ...]
    source_polys: tuple[Polynomial, ...]
    ladder_rows: Optional[tuple[tuple[Fraction, ...], ...]]
    shift_retries: tuple[str, ...]
    ladder_retries: int


def generate(config: InstanceConfig) -> GeneratedInstance:
    """Build the (J, C) instance and the nu vector a config describes.

    Shift admissibility: C is accepted only if every P_n(C), n <= N, is
    nonzero; otherwise C+1 is tried, up to the retry cap, recording each
    rejected value. Random ladders are likewise resampled while any
    hypothesis minor vanishes (when require_hypotheses is set).
    """
    config.validate()
    rng = random.Random(config.seed)

    if config.matrix_source == "explicit":
        try:
            J = BandedHessenberg.from_json_dict(
                {"p": config.p, "N": config.n, "bands": config.matrix_bands}
            )
        except (SizeMismatch, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad explicit matrix: {exc}") from None
    else:
        J = random_hessenberg(rng, config.p, config.n, config.bound)

    shift = parse_rational(config.shift)
    retries: list[str] = []
    instance = None
    if config.retry_cap == 0:
        # No retry budget: the caller insists on this shift, so a singular
        # minor propagates with its index instead of being retried away.
        instance = ShiftedInstance(J, shift)
    else:
        for _ in range(config.retry_cap + 1):
            try:
                instance = ShiftedInstance(J, shift)
                break
            except SingularLeadingMinor:
                retries.append(format_rational(shift))
                shift = shift + 1
        if instance is None:
            raise GenerationExhausted(
                f"no admissible shift within {config.retry_cap} retries from {config.shift}"
            )

    budget = config.moment_budget
    source_polys = characteristic_polys(J, budget)
    duals = dual_sequence(source_polys)

    ladder_rows = None
    ladder_retries = 0
    if config.nu_source == "canonical":
        nu = canonical_nu(duals, config.p)
    elif config.nu_source == "ladder":
        try:
            ladder = LambdaLadder(
                [[parse_rational(v) for v in row] for row in config.nu_ladder]
            )
        except (ShapeMismatch, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad ladder: {exc}") from None
        if ladder.nrows != config.p:
            raise ConfigError(f"ladder has {ladder.nrows} rows, p is {config.p}")
        ladder_rows = ladder.rows
        nu = build_nu(ladder, duals)
    else:
        ladder = random_ladder(rng, config.p, config.bound)
        if config.require_hypotheses:
            while any(v == 0 for _, _, v in _delta_table(ladder, config.p)):
                ladder_retries += 1
                if ladder_retries > config.retry_cap:
                    raise GenerationExhausted(
                        f"no hypothesis-satisfying ladder within {config.retry_cap} retries"
                    )
                ladder = random_ladder(rng, config.p, config.bound)
        ladder_rows = ladder.rows
        nu = build_nu(ladder, duals)

    return GeneratedInstance(
        config_echo=config.to_json_dict(),
        instance=instance,
        nu=nu,
        duals=duals,
        source_polys=source_polys,
        ladder_rows=ladder_rows,
        shift_retries=tuple(retries),
        ladder_retries=ladder_retries,
    )
