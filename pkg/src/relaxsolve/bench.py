"""Benchmark harness: seeded repetitions across problems and variants.

Runs every (problem, variant, repetition) combination of a plan with
deterministically derived seeds, shares one generated system instance
per (problem, repetition) across all variants so paired comparisons see
identical data, and serializes results to CSV and residual-trace SVG
charts. Seed derivation mixes the plan's base seed with an FNV-1a hash
of a text label, so results are invariant under reordering of the plan.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from xml.sax.saxutils import escape

from .evolution import RunResult, SolverConfig, Variant, run_solver
from .linalg import LinearSystem
from .problems import (
    FAMILY_IDS,
    ProblemSpec,
    SpecParseError,
    _build_spec,
    _parse_int,
    _scan_kv,
    family_spec,
    generate_problem,
)

__all__ = [
    "BenchPlan",
    "BenchRow",
    "CSV_HEADER",
    "Summary",
    "emit_trace_svg",
    "fnv1a64",
    "mix_seed",
    "parse_bench_plan",
    "problem_hash",
    "read_csv",
    "run_benchmark",
    "summarize",
    "write_csv",
]

CSV_HEADER = "problem,variant,seed,generations,elapsed_ms,final_residual,converged,problem_hash"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


def fnv1a64(data: bytes | str) -> int:
    """64-bit FNV-1a hash of bytes (strings are UTF-8 encoded first)."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


def mix_seed(base_seed: int, label: str) -> int:
    """Derive a run/instance seed: ``base_seed XOR fnv1a64(label)``.

    Labels look like ``"P1|JBTVA|3"`` (run seeds) or ``"P1|instance|3"``
    (instance seeds), making every derived seed a pure function of the
    base seed, problem id, variant id, and repetition index.
    """
    return (base_seed ^ fnv1a64(label)) & _U64


def problem_hash(sys: LinearSystem) -> int:
    """64-bit FNV-1a over the raw float64 bytes of A then b."""
    return fnv1a64(sys.a.tobytes() + sys.b.tobytes())


@dataclass(frozen=True)
class BenchPlan:
    """What to run: problems x variants x repetitions, plus solver defaults."""

    problems: tuple[ProblemSpec, ...]
    variants: tuple[Variant, ...]
    repetitions: int = 10
    base_seed: int = 0
    solver_defaults: SolverConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "problems", tuple(self.problems))
        object.__setattr__(
            self, "variants", tuple(Variant(v) for v in self.variants)
        )
        if not self.problems:
            raise ValueError("plan needs at least one problem")
        if not self.variants:
            raise ValueError("plan needs at least one variant")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must be an unsigned 64-bit integer")
        if self.solver_defaults is None:
            object.__setattr__(
                self, "solver_defaults", SolverConfig(variant=self.variants[0])
            )


@dataclass(frozen=True)
class BenchRow:
    """One CSV line: a single solver run and the hash of its system."""

    problem_id: str
    variant: str
    seed: int
    generations: int
    elapsed_ms: float
    final_residual: float
    converged: bool
    problem_hash: int


def run_benchmark(
    plan: BenchPlan,
    on_result: Callable[[BenchRow, RunResult, int], None] | None = None,
) -> list[BenchRow]:
    """Execute the full plan; rows come out ordered (problem, variant, r).

    One system instance is generated per (problem, repetition) from seed
    ``mix_seed(base, "<pid>|instance|<r>")`` and reused by every variant,
    so paired rows share a ``problem_hash``. Each run's solver seed is
    ``mix_seed(base, "<pid>|<variant>|<r>")``. Runs that hit the
    generation cap or diverge still emit a row (``converged`` false);
    nothing aborts the plan. ``on_result`` is called after each run with
    the row, the full result (including the trace), and the repetition
    index.
    """
    rows: list[BenchRow] = []
    for spec in plan.problems:
        instances = []
        for r in range(plan.repetitions):
            inst_seed = mix_seed(plan.base_seed, f"{spec.id}|instance|{r}")
            rng = np.random.default_rng(inst_seed)
            sys = generate_problem(spec, rng)
            instances.append((sys, problem_hash(sys)))
        for variant in plan.variants:
            for r in range(plan.repetitions):
                sys, h = instances[r]
                run_seed = mix_seed(plan.base_seed, f"{spec.id}|{variant.value}|{r}")
                cfg = replace(plan.solver_defaults, variant=variant, seed=run_seed)
                result = run_solver(sys, cfg)
                row = BenchRow(
                    problem_id=spec.id,
                    variant=variant.value,
                    seed=run_seed,
                    generations=result.generations,
                    elapsed_ms=result.elapsed_ms,
                    final_residual=result.final_residual,
                    converged=result.converged,
                    problem_hash=h,
                )
                rows.append(row)
                if on_result is not None:
                    on_result(row, result, r)
    return rows


def write_csv(rows: Iterable[BenchRow], sink) -> None:
    """Write the fixed-schema CSV: exact header, LF newlines.

    Reals use ``repr`` (shortest decimal that round-trips to the same
    float64), booleans are ``true``/``false``, the hash is 16 lowercase
    hex digits.
    """
    sink.write(CSV_HEADER + "\n")
    for row in rows:
        sink.write(
            f"{row.problem_id},{row.variant},{int(row.seed)},"
            f"{int(row.generations)},{float(row.elapsed_ms)!r},"
            f"{float(row.final_residual)!r},"
            f"{'true' if row.converged else 'false'},{int(row.problem_hash):016x}\n"
        )


def read_csv(source) -> list[BenchRow]:
    """Parse ``write_csv`` output back into rows; strict about the schema."""
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty CSV: missing header") from None
    if header != CSV_HEADER.split(","):
        raise ValueError(f"unexpected CSV header: {','.join(header)!r}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != 8:
            raise ValueError(f"line {lineno}: expected 8 fields, got {len(rec)}")
        if rec[6] not in ("true", "false"):
            raise ValueError(f"line {lineno}: converged must be true/false")
        try:
            rows.append(
                BenchRow(
                    problem_id=rec[0],
                    variant=rec[1],
                    seed=int(rec[2]),
                    generations=int(rec[3]),
                    elapsed_ms=float(rec[4]),
                    final_residual=float(rec[5]),
                    converged=rec[6] == "true",
                    problem_hash=int(rec[7], 16),
                )
            )
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return rows


@dataclass(frozen=True)
class Summary:
    """Per-(problem, variant) aggregate of benchmark rows."""

    problem_id: str
    variant: str
    runs: int
    converged_runs: int
    mean_generations: float
    mean_elapsed_ms: float
    mean_final_residual: float


def summarize(rows: Sequence[BenchRow]) -> list[Summary]:
    """Arithmetic means per (problem, variant), in first-seen order."""
    groups: dict[tuple[str, str], list[BenchRow]] = {}
    for row in rows:
        groups.setdefault((row.problem_id, row.variant), []).append(row)
    out = []
    for (pid, variant), grp in groups.items():
        k = len(grp)
        out.append(
            Summary(
                problem_id=pid,
                variant=variant,
                runs=k,
                converged_runs=sum(1 for r in grp if r.converged),
                mean_generations=sum(r.generations for r in grp) / k,
                mean_elapsed_ms=sum(r.elapsed_ms for r in grp) / k,
                mean_final_residual=sum(r.final_residual for r in grp) / k,
            )
        )
    return out


# Trace-chart geometry and palette.
_SVG_W, _SVG_H = 640, 420
_ML, _MR, _MT, _MB = 64, 24, 28, 48
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_RESIDUAL_FLOOR = 1e-16


def _normalize_traces(trace) -> list[tuple[str, list[tuple[int, float]]]]:
    if isinstance(trace, Mapping):
        items = [(str(k), list(v)) for k, v in trace.items()]
    elif trace and isinstance(trace[0], tuple) and len(trace[0]) == 2 and isinstance(
        trace[0][1], (list, tuple)
    ):
        items = [(str(k), list(v)) for k, v in trace]
    else:
        items = [("residual", list(trace))]
    if not items:
        raise ValueError("no traces to plot")
    for label, pts in items:
        if not pts:
            raise ValueError(f"trace {label!r} is empty")
    return items


def emit_trace_svg(trace, sink, title: str = "") -> None:
    """Write a standalone SVG chart of residual norm versus generation.

    ``trace`` is either one list of ``(generation, residual)`` pairs or
    a mapping/sequence of ``(label, trace)`` entries; each trace becomes
    one polyline on a log10 residual axis (zero residuals are clamped to
    1e-16 for display) with a swatch legend. Empty input is an error.
    """
    items = _normalize_traces(trace)
    xs_all = [g for _, pts in items for g, _ in pts]
    ys_all = [
        math.log10(max(res, _RESIDUAL_FLOOR)) for _, pts in items for _, res in pts
    ]
    x_lo, x_hi = min(xs_all), max(xs_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    y_lo, y_hi = min(ys_all), max(ys_all)
    if y_hi - y_lo < 1e-9:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0

    plot_w = _SVG_W - _ML - _MR
    plot_h = _SVG_H - _MT - _MB

    def px(g):
        return _ML + (g - x_lo) / (x_hi - x_lo) * plot_w

    def py(v):
        return _MT + (y_hi - v) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_MT + plot_h}" x2="{_ML + plot_w}" '
        f'y2="{_MT + plot_h}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + plot_h}" '
        f'stroke="black"/>',
    ]
    if title:
        out.append(
            f'<text x="{_ML + plot_w / 2:.1f}" y="{_MT - 10}" '
            f'text-anchor="middle" font-size="13">{escape(title)}</text>'
        )
    for k in range(5):
        gx = x_lo + (x_hi - x_lo) * k / 4
        vx = px(gx)
        out.append(
            f'<line x1="{vx:.1f}" y1="{_MT + plot_h}" x2="{vx:.1f}" '
            f'y2="{_MT + plot_h + 4}" stroke="black"/>'
        )
        out.append(
            f'<text x="{vx:.1f}" y="{_MT + plot_h + 17}" text-anchor="middle" '
            f'font-size="11">{gx:.0f}</text>'
        )
        vy = y_lo + (y_hi - y_lo) * k / 4
        out.append(
            f'<line x1="{_ML - 4}" y1="{py(vy):.1f}" x2="{_ML}" '
            f'y2="{py(vy):.1f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_ML - 7}" y="{py(vy) + 4:.1f}" text-anchor="end" '
            f'font-size="11">{vy:.1f}</text>'
        )
    out.append(
        f'<text x="{_ML + plot_w / 2:.1f}" y="{_SVG_H - 12}" '
        f'text-anchor="middle" font-size="12">generation</text>'
    )
    out.append(
        f'<text x="16" y="{_MT + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 16 {_MT + plot_h / 2:.1f})">'
        f"log10 residual</text>"
    )
    for idx, (label, pts) in enumerate(items):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(
            f"{px(g):.2f},{py(math.log10(max(res, _RESIDUAL_FLOOR))):.2f}"
            for g, res in pts
        )
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{coords}"/>'
        )
        ly = _MT + 8 + idx * 16
        out.append(
            f'<rect x="{_ML + plot_w - 120}" y="{ly}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        out.append(
            f'<text x="{_ML + plot_w - 105}" y="{ly + 9}" font-size="11">'
            f"{escape(label)}</text>"
        )
    out.append("</svg>")
    sink.write("\n".join(out) + "\n")


_PLAN_KEYS = ("problems", "variants", "repetitions", "base_seed", "threshold",
              "max_generations")
_PROBLEM_KEYS = ("id", "n", "seed", "diag", "offdiag", "rhs")
_DEFAULT_VARIANTS = ("JBTVA", "GSBTVA", "MJBTVA", "MGSBTVA")


def parse_bench_plan(text: str) -> BenchPlan:
    """Parse a benchmark plan from the shared ``key=value`` text format.

    Either ``problems=P1,P5,...`` names canonical families (sized by an
    optional shared ``n``, default 200), or the problem keys of a single
    spec (``id=``, ``diag=``, ...) define one problem inline. Optional
    plan keys: ``variants`` (comma list, default the four adaptive
    variants), ``repetitions`` (default 10), ``base_seed`` (default 0),
    ``threshold`` and ``max_generations`` (solver defaults).
    """
    fields: dict[str, str] = {}
    lines: dict[str, int | None] = {}
    for lineno, key, value in _scan_kv(text):
        if key not in _PLAN_KEYS and key not in _PROBLEM_KEYS:
            raise SpecParseError(f"unknown key {key!r}", lineno)
        if key in fields:
            raise SpecParseError(f"duplicate key {key!r}", lineno)
        fields[key] = value
        lines[key] = lineno

    if "problems" in fields and "id" in fields:
        raise SpecParseError(
            "use either problems=... or an inline id=... block, not both",
            lines["problems"],
        )

    if "problems" in fields:
        for key in ("diag", "offdiag", "rhs", "seed"):
            if key in fields:
                raise SpecParseError(
                    f"key {key!r} is only allowed with an inline id=custom block",
                    lines[key],
                )
        n = 200
        if "n" in fields:
            n = _parse_int(fields, lines, "n", 1, 2**62, "a positive integer")
        specs = []
        for pid in fields["problems"].split(","):
            pid = pid.strip()
            if pid not in FAMILY_IDS:
                raise SpecParseError(f"unknown id {pid!r}", lines["problems"])
            specs.append(family_spec(pid, n, seed=0))
    elif "id" in fields:
        prob_fields = {k: v for k, v in fields.items() if k in _PROBLEM_KEYS}
        prob_fields.setdefault("n", "200")
        prob_fields.setdefault("seed", "0")
        specs = [_build_spec(prob_fields, lines)]
    else:
        raise SpecParseError("plan needs either problems=... or an id=... block")

    if "variants" in fields:
        variants = []
        for name in fields["variants"].split(","):
            name = name.strip()
            try:
                variants.append(Variant(name))
            except ValueError:
                raise SpecParseError(
                    f"unknown variant {name!r}", lines["variants"]
                ) from None
    else:
        variants = [Variant(v) for v in _DEFAULT_VARIANTS]

    repetitions = 10
    if "repetitions" in fields:
        repetitions = _parse_int(
            fields, lines, "repetitions", 1, 2**31, "a positive integer"
        )
    base_seed = 0
    if "base_seed" in fields:
        base_seed = _parse_int(
            fields, lines, "base_seed", 0, 2**64, "an unsigned 64-bit integer"
        )

    cfg = SolverConfig(variant=variants[0])
    if "threshold" in fields:
        try:
            threshold = float(fields["threshold"])
        except ValueError:
            raise SpecParseError(
                f"invalid real for key 'threshold': {fields['threshold']!r}",
                lines["threshold"],
            ) from None
        if not threshold > 0.0:
            raise SpecParseError("threshold must be positive", lines["threshold"])
        cfg = replace(cfg, threshold=threshold)
    if "max_generations" in fields:
        cfg = replace(
            cfg,
            max_generations=_parse_int(
                fields, lines, "max_generations", 0, 2**31, "a nonnegative integer"
            ),
        )

    return BenchPlan(
        problems=tuple(specs),
        variants=tuple(variants),
        repetitions=repetitions,
        base_seed=base_seed,
        solver_defaults=cfg,
    )
