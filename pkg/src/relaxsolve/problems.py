"""Seeded generators for the eleven benchmark problem families P1-P11.

Each family fills a dense n-by-n system from three rules -- one for the
diagonal, one for the off-diagonal block, one for the right-hand side.
A rule is a constant, a uniform open interval, or a 1-based index
formula. Families P1-P6 and P9-P11 are random; P7 and P8 are fully
deterministic. Custom problems use the same rule kinds through a small
line-oriented ``key=value`` spec format.

Diagonal interval rules whose range spans zero (P3, P9, P11) are
rejection-sampled until every diagonal entry has magnitude at least 1,
since the iteration matrices need an invertible diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .linalg import DIAG_FLOOR, LinearSystem

__all__ = [
    "ConstRule",
    "FAMILY_IDS",
    "FormulaRule",
    "ProblemSpec",
    "Rule",
    "SpecParseError",
    "UniformRule",
    "family_spec",
    "generate_problem",
    "parse_problem_spec",
    "render_problem_spec",
]

# Zero-spanning diagonal intervals are resampled until |a_ii| >= this.
DIAG_MIN_ABS = 1.0


@dataclass(frozen=True)
class ConstRule:
    """Every entry equals ``value``."""

    value: float

    def __str__(self) -> str:
        return f"const:{self.value!r}"


@dataclass(frozen=True)
class UniformRule:
    """Entries drawn uniformly from the open interval ``(lo, hi)``."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"uniform rule needs lo < hi, got ({self.lo}, {self.hi})")

    def __str__(self) -> str:
        return f"uniform:{self.lo!r},{self.hi!r}"

    @property
    def spans_zero(self) -> bool:
        return self.lo < 0.0 < self.hi


@dataclass(frozen=True)
class FormulaRule:
    """Entries computed from 1-based indices by a named built-in formula.

    ``family`` is ``"p7"`` or ``"p8"``; ``slot`` is ``"diag"``,
    ``"offdiag"`` or ``"rhs"``. The formulas take vectorized row index
    ``i``, column index ``j`` and dimension ``n``.
    """

    family: str
    slot: str

    def __post_init__(self):
        if (self.family, self.slot) not in _FORMULAS:
            raise ValueError(f"unknown formula {self.family}-{self.slot}")

    def __str__(self) -> str:
        return f"formula:{self.family}-{self.slot}"

    def evaluate(self, i, j, n: int):
        return _FORMULAS[(self.family, self.slot)](i, j, n)


Rule = Union[ConstRule, UniformRule, FormulaRule]

# P7: a_ii = 20 i, a_ij = (100 - j)/20, b_i = 10 i (column-indexed
# off-diagonal).  P8: a_ii = 20 n, a_ij = j, b_i = i.
_FORMULAS: dict[tuple[str, str], Callable] = {
    ("p7", "diag"): lambda i, j, n: 20.0 * i,
    ("p7", "offdiag"): lambda i, j, n: (100.0 - j) / 20.0,
    ("p7", "rhs"): lambda i, j, n: 10.0 * i,
    ("p8", "diag"): lambda i, j, n: 20.0 * n + 0.0 * i,
    ("p8", "offdiag"): lambda i, j, n: 0.0 * i + 1.0 * j,
    ("p8", "rhs"): lambda i, j, n: 1.0 * i,
}

# diag, offdiag, rhs rule triples for the canonical families.
_FAMILIES: dict[str, tuple[Rule, Rule, Rule]] = {
    "P1": (UniformRule(100, 200), UniformRule(-10, 10), UniformRule(100, 200)),
    "P2": (UniformRule(1, 400), UniformRule(-4, 4), ConstRule(100)),
    "P3": (UniformRule(-50, 50), UniformRule(-1, 1), UniformRule(-1, 1)),
    "P4": (ConstRule(100), UniformRule(-1, 1), UniformRule(0, 100)),
    "P5": (ConstRule(50), UniformRule(-10, 10), UniformRule(-5, 5)),
    "P6": (ConstRule(50), UniformRule(-1, 1), ConstRule(2)),
    "P7": (
        FormulaRule("p7", "diag"),
        FormulaRule("p7", "offdiag"),
        FormulaRule("p7", "rhs"),
    ),
    "P8": (
        FormulaRule("p8", "diag"),
        FormulaRule("p8", "offdiag"),
        FormulaRule("p8", "rhs"),
    ),
    "P9": (UniformRule(-20, 200), UniformRule(-2, 3), UniformRule(-2, 3)),
    "P10": (ConstRule(40), UniformRule(-4, 4), ConstRule(200)),
    "P11": (UniformRule(-50, 50), UniformRule(-1, 1), UniformRule(-1, 1)),
}

FAMILY_IDS = tuple(_FAMILIES)


@dataclass(frozen=True)
class ProblemSpec:
    """A fully specified random linear system: id, size, rules, seed."""

    id: str
    n: int
    seed: int
    diag_rule: Rule
    offdiag_rule: Rule
    rhs_rule: Rule

    def __post_init__(self):
        if self.id != "custom" and self.id not in _FAMILIES:
            raise ValueError(f"unknown problem id {self.id!r}")
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if isinstance(self.diag_rule, ConstRule):
            if abs(self.diag_rule.value) < DIAG_FLOOR:
                raise ValueError("constant diagonal rule must be nonzero")
        if isinstance(self.diag_rule, FormulaRule) and self.diag_rule.slot != "diag":
            raise ValueError("diagonal formula must target the diag slot")
        if (
            isinstance(self.offdiag_rule, FormulaRule)
            and self.offdiag_rule.slot != "offdiag"
        ):
            raise ValueError("off-diagonal formula must target the offdiag slot")
        if isinstance(self.rhs_rule, FormulaRule) and self.rhs_rule.slot != "rhs":
            raise ValueError("right-hand-side formula must target the rhs slot")


def family_spec(pid: str, n: int, seed: int) -> ProblemSpec:
    """ProblemSpec for canonical family ``pid`` ("P1".."P11")."""
    if pid not in _FAMILIES:
        raise ValueError(f"unknown problem id {pid!r}")
    diag, offdiag, rhs = _FAMILIES[pid]
    return ProblemSpec(
        id=pid, n=n, seed=seed, diag_rule=diag, offdiag_rule=offdiag, rhs_rule=rhs
    )


def _draw_uniform(
    rule: UniformRule, size, rng: np.random.Generator, min_abs: float = 0.0
) -> np.ndarray:
    vals = rng.uniform(rule.lo, rule.hi, size=size)
    if min_abs > 0.0:
        bad = np.abs(vals) < min_abs
        while bad.any():
            vals[bad] = rng.uniform(rule.lo, rule.hi, size=int(bad.sum()))
            bad = np.abs(vals) < min_abs
    return vals


def generate_problem(
    spec: ProblemSpec, rng: np.random.Generator | None = None
) -> LinearSystem:
    """Materialize the dense system described by ``spec``.

    Random draws consume one stream in a fixed order: the off-diagonal
    field first (drawn as a full n-by-n block whose diagonal is then
    overwritten), then the diagonal, then the right-hand side. Formula
    and constant rules consume no draws. If ``rng`` is omitted a fresh
    generator is seeded with ``spec.seed``, so the same spec always
    produces the same system.

    Diagonal entries from a zero-spanning interval are redrawn until
    their magnitude reaches 1.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n = spec.n
    rows = np.arange(1, n + 1, dtype=np.float64)[:, None]
    cols = np.arange(1, n + 1, dtype=np.float64)[None, :]

    off = spec.offdiag_rule
    if isinstance(off, UniformRule):
        a = _draw_uniform(off, (n, n), rng)
    elif isinstance(off, ConstRule):
        a = np.full((n, n), float(off.value))
    else:
        a = np.broadcast_to(off.evaluate(rows, cols, n), (n, n)).astype(np.float64)
        a = np.array(a)

    diag = spec.diag_rule
    if isinstance(diag, UniformRule):
        min_abs = DIAG_MIN_ABS if diag.spans_zero else 0.0
        d = _draw_uniform(diag, n, rng, min_abs=min_abs)
    elif isinstance(diag, ConstRule):
        d = np.full(n, float(diag.value))
    else:
        i = rows.ravel()
        d = np.broadcast_to(diag.evaluate(i, i, n), (n,)).astype(np.float64)
    np.fill_diagonal(a, d)

    rhs = spec.rhs_rule
    if isinstance(rhs, UniformRule):
        b = _draw_uniform(rhs, n, rng)
    elif isinstance(rhs, ConstRule):
        b = np.full(n, float(rhs.value))
    else:
        i = rows.ravel()
        b = np.broadcast_to(rhs.evaluate(i, i, n), (n,)).astype(np.float64)

    return LinearSystem(a, b)


class SpecParseError(ValueError):
    """Problem-spec text could not be parsed; ``line`` is 1-based or None."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


_RULE_KEYS = {"diag": "diag_rule", "offdiag": "offdiag_rule", "rhs": "rhs_rule"}
_ALL_KEYS = ("id", "n", "seed", "diag", "offdiag", "rhs")


def _parse_rule(key: str, value: str, lineno: int | None) -> Rule:
    kind, sep, rest = value.partition(":")
    if not sep:
        raise SpecParseError(
            f"rule for {key!r} must look like const:<.>, uniform:<.>,<.> "
            f"or formula:<name>, got {value!r}",
            lineno,
        )
    if kind == "const":
        try:
            return ConstRule(float(rest))
        except ValueError:
            raise SpecParseError(f"invalid constant {rest!r}", lineno) from None
    if kind == "uniform":
        parts = rest.split(",")
        if len(parts) != 2:
            raise SpecParseError(
                f"malformed interval {rest!r}, expected <lo>,<hi>", lineno
            )
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise SpecParseError(f"malformed interval {rest!r}", lineno) from None
        if not lo < hi:
            raise SpecParseError(f"interval needs lo < hi, got {rest!r}", lineno)
        return UniformRule(lo, hi)
    if kind == "formula":
        name, sep, slot = rest.partition("-")
        if sep and slot != key:
            raise SpecParseError(
                f"formula {rest!r} targets slot {slot!r} but is assigned "
                f"to {key!r}",
                lineno,
            )
        if (name, key) not in _FORMULAS:
            raise SpecParseError(f"unknown formula {rest!r}", lineno)
        return FormulaRule(name, key)
    raise SpecParseError(f"unknown rule kind {kind!r}", lineno)


def _scan_kv(text: str):
    """Yield ``(lineno, key, value)`` for each non-comment, non-blank line.

    Shared by the problem-spec and benchmark-plan parsers; performs no
    key validation beyond the ``key=value`` shape.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise SpecParseError(f"expected key=value, got {raw.strip()!r}", lineno)
        if not value:
            raise SpecParseError(f"empty value for key {key!r}", lineno)
        yield lineno, key, value


def _parse_int(
    fields: dict[str, str],
    lines: dict[str, int | None],
    key: str,
    lo: int,
    hi: int,
    what: str,
) -> int:
    try:
        value = int(fields[key])
    except ValueError:
        raise SpecParseError(
            f"invalid integer for key {key!r}: {fields[key]!r}", lines.get(key)
        ) from None
    if not lo <= value < hi:
        raise SpecParseError(f"{key} must be {what}", lines.get(key))
    return value


def _build_spec(fields: dict[str, str], lines: dict[str, int | None]) -> ProblemSpec:
    """Assemble a ProblemSpec from already-scanned key/value fields.

    Values of present keys are validated first so malformed input is
    reported with its line number even when other keys are missing.
    """
    n = seed = None
    if "n" in fields:
        n = _parse_int(fields, lines, "n", 1, 2**62, "a positive integer")
    if "seed" in fields:
        seed = _parse_int(
            fields, lines, "seed", 0, 2**64, "an unsigned 64-bit integer"
        )
    for req in ("id", "n", "seed"):
        if req not in fields:
            raise SpecParseError(f"missing required key {req!r}")
    pid = fields["id"]

    if pid in _FAMILIES:
        for key in _RULE_KEYS:
            if key in fields:
                raise SpecParseError(
                    f"key {key!r} is only allowed with id=custom", lines.get(key)
                )
        return family_spec(pid, n, seed)
    if pid != "custom":
        raise SpecParseError(f"unknown id {pid!r}", lines.get("id"))

    rules = {}
    for key, attr in _RULE_KEYS.items():
        if key not in fields:
            raise SpecParseError(f"missing required key {key!r} for custom problem")
        rules[attr] = _parse_rule(key, fields[key], lines.get(key))
    try:
        return ProblemSpec(id="custom", n=n, seed=seed, **rules)
    except ValueError as exc:
        raise SpecParseError(str(exc)) from None


def parse_problem_spec(text: str) -> ProblemSpec:
    """Parse the line-oriented ``key=value`` problem-spec format.

    Keys: ``id`` (P1..P11 or custom), ``n``, ``seed``, and for custom
    problems ``diag``, ``offdiag``, ``rhs``. ``#`` starts a comment;
    blank lines are skipped. Family ids take their rules from the
    built-in table and reject explicit rule keys. Errors carry the
    offending 1-based line number where one applies.
    """
    fields: dict[str, str] = {}
    lines: dict[str, int | None] = {}
    for lineno, key, value in _scan_kv(text):
        if key not in _ALL_KEYS:
            raise SpecParseError(f"unknown key {key!r}", lineno)
        if key in fields:
            raise SpecParseError(f"duplicate key {key!r}", lineno)
        fields[key] = value
        lines[key] = lineno
    return _build_spec(fields, lines)


def render_problem_spec(spec: ProblemSpec) -> str:
    """Serialize a spec back to the text format ``parse_problem_spec`` reads."""
    out = [f"id={spec.id}", f"n={spec.n}", f"seed={spec.seed}"]
    if spec.id == "custom":
        out.append(f"diag={spec.diag_rule}")
        out.append(f"offdiag={spec.offdiag_rule}")
        out.append(f"rhs={spec.rhs_rule}")
    return "\n".join(out) + "\n"
