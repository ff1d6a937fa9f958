"""Hybrid evolutionary loop that self-adapts relaxation factors.

A population of candidate solution vectors is evolved by, per generation:
optional recombination through a random row-stochastic matrix, mutation
(one relaxed Jacobi or Gauss-Seidel sweep per individual, each with its
own slot-resident relaxation factor), fitness evaluation (residual norm),
pairwise stochastic adaptation of the relaxation factors with a step size
that decays over generations, and truncation selection with duplication.

The four adaptive variants differ only in the mutation sweep (Jacobi vs
Gauss-Seidel) and in whether the recombination stage runs at all; the
``FIXED_*`` variants bypass the population machinery entirely and iterate
a single state with a constant relaxation factor.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

import numpy as np

from .iteration import gauss_seidel_sr_step, jacobi_sr_step
from .linalg import LinearSystem, residual_norm

__all__ = [
    "AdaptiveParams",
    "Individual",
    "OMEGA_MARGIN",
    "Population",
    "RunResult",
    "SolverConfig",
    "Variant",
    "adapt_pair",
    "adapt_pair_from_steps",
    "basic_time_variant",
    "init_population",
    "init_relaxation_factors",
    "make_stochastic_matrix",
    "mutate_and_evaluate",
    "recombine",
    "run_solver",
    "select_and_reproduce",
]

# Adapted relaxation factors are clamped this far inside the open interval.
OMEGA_MARGIN = 1e-6

# Standard deviation of the Gaussian noise behind the adaptation steps.
NOISE_SD = 0.25


class Variant(str, Enum):
    """Solver variants: adaptive hybrids and fixed-factor baselines."""

    JBTVA = "JBTVA"
    GSBTVA = "GSBTVA"
    MJBTVA = "MJBTVA"
    MGSBTVA = "MGSBTVA"
    FIXED_JACOBI_SR = "FIXED_JACOBI_SR"
    FIXED_GS_SR = "FIXED_GS_SR"

    @property
    def uses_recombination(self) -> bool:
        return self in (Variant.JBTVA, Variant.GSBTVA)

    @property
    def is_fixed(self) -> bool:
        return self in (Variant.FIXED_JACOBI_SR, Variant.FIXED_GS_SR)

    @property
    def method(self) -> str:
        """The underlying sweep: ``"jacobi"`` or ``"gauss_seidel"``."""
        if self in (Variant.JBTVA, Variant.MJBTVA, Variant.FIXED_JACOBI_SR):
            return "jacobi"
        return "gauss_seidel"


@dataclass(frozen=True)
class AdaptiveParams:
    """Constants of the time-variant adaptation rule.

    ``e_x`` scales the signed step that pulls a loser's relaxation factor
    toward the winner's; ``e_y`` scales the nonnegative step that pushes
    the winner's factor away from the loser, toward the interval boundary
    on its own side. ``lam`` controls how fast both steps decay with the
    generation counter and must exceed 10. ``omega_lo``/``omega_hi``
    bound the open interval all factors live in.
    """

    e_x: float = 0.125
    e_y: float = 0.03125
    lam: float = 50.0
    omega_lo: float = 0.0
    omega_hi: float = 2.0

    def __post_init__(self):
        if self.e_x <= 0.0 or self.e_y <= 0.0:
            raise ValueError("e_x and e_y must be positive")
        if not self.lam > 10.0:
            raise ValueError("lam must be greater than 10")
        if not self.omega_lo < self.omega_hi:
            raise ValueError("omega_lo must be below omega_hi")


@dataclass(frozen=True)
class SolverConfig:
    """Full configuration of one solver run."""

    variant: Variant
    population_size: int = 2
    threshold: float = 1e-7
    max_generations: int = 10000
    divergence_bound: float = 1e12
    seed: int = 0
    adaptive: AdaptiveParams = field(default_factory=AdaptiveParams)
    fixed_omega: float = 1.0
    init_lo: float = -30.0
    init_hi: float = 30.0

    def __post_init__(self):
        variant = Variant(self.variant)
        object.__setattr__(self, "variant", variant)
        if not variant.is_fixed:
            if self.population_size < 2 or self.population_size % 2 != 0:
                raise ValueError("population_size must be even and at least 2")
        if not self.threshold > 0.0:
            raise ValueError("threshold must be positive")
        if self.max_generations < 0:
            raise ValueError("max_generations must be nonnegative")
        if not self.divergence_bound > 0.0:
            raise ValueError("divergence_bound must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if not self.init_lo < self.init_hi:
            raise ValueError("init_lo must be below init_hi")


class Individual(NamedTuple):
    """One candidate solution with its residual norm (None if unevaluated)."""

    state: np.ndarray
    fitness: float | None


@dataclass(frozen=True)
class Population:
    """N population slots: states, their fitnesses, slot-resident omegas.

    ``fitness`` is None while the states have been changed but not yet
    re-evaluated. Relaxation factors belong to slots, not to individuals:
    selection copies states around but never moves omegas.
    """

    states: np.ndarray
    fitness: np.ndarray | None
    omegas: np.ndarray
    generation: int = 0

    @property
    def size(self) -> int:
        return self.states.shape[0]

    def individual(self, i: int) -> Individual:
        fit = None if self.fitness is None else float(self.fitness[i])
        return Individual(state=self.states[i], fitness=fit)

    def best_index(self) -> int:
        if self.fitness is None:
            raise ValueError("population has not been evaluated")
        return int(np.argmin(self.fitness))

    def best(self) -> Individual:
        return self.individual(self.best_index())


@dataclass(frozen=True)
class RunResult:
    """Outcome of one solver run.

    ``trace`` holds one ``(generation, best_residual)`` pair per
    generation starting at 0; ``elapsed_ms`` is wall time around the
    iteration loop only. ``best_state`` is the candidate vector the
    final residual belongs to. ``recombine_calls`` counts executed
    recombination stages, which is zero for the modified variants and the
    fixed baselines.
    """

    generations: int
    elapsed_ms: float
    final_residual: float
    converged: bool
    diverged: bool
    trace: list[tuple[int, float]]
    final_omegas: list[float]
    best_state: np.ndarray
    recombine_calls: int


def init_relaxation_factors(n_pop: int, params: AdaptiveParams) -> np.ndarray:
    """Evenly spaced midpoint factors covering the open omega interval.

    With spacing ``d = (hi - lo) / n_pop`` the factors are
    ``lo + d/2, lo + 3d/2, ...``; all lie strictly inside the interval.
    """
    if n_pop < 1:
        raise ValueError("n_pop must be at least 1")
    d = (params.omega_hi - params.omega_lo) / n_pop
    return params.omega_lo + d * (np.arange(n_pop) + 0.5)


def init_population(
    sys: LinearSystem, cfg: SolverConfig, rng: np.random.Generator
) -> Population:
    """Uniform random states over the init box, evaluated, with midpoint omegas."""
    n_pop = cfg.population_size
    states = rng.uniform(cfg.init_lo, cfg.init_hi, size=(n_pop, sys.n))
    fitness = np.array([residual_norm(sys, s) for s in states])
    omegas = init_relaxation_factors(n_pop, cfg.adaptive)
    return Population(states=states, fitness=fitness, omegas=omegas, generation=0)


def basic_time_variant(t: int, lam: float) -> float:
    """Decay factor ``lam * ln(1 + 1/(t + lam))`` for adaptation step sizes.

    Strictly decreasing in the generation counter ``t``, tending to zero;
    below 1 already at ``t = 0`` for every ``lam > 10``.
    """
    if not lam > 10.0:
        raise ValueError("lam must be greater than 10")
    if t < 0:
        raise ValueError("t must be nonnegative")
    return lam * math.log1p(1.0 / (t + lam))


def adapt_pair_from_steps(
    omega_x: float,
    omega_y: float,
    err_x: float,
    err_y: float,
    p_pull: float,
    p_push: float,
    params: AdaptiveParams,
) -> tuple[float, float]:
    """Deterministic core of the pairwise adaptation rule.

    The higher-error member of the pair (the loser) is pulled toward the
    winner: its factor becomes ``(0.5 + p_pull) * (omega_x + omega_y)``.
    The winner is pushed away from the loser: its factor moves by
    ``p_push`` times the distance to the boundary on its side of the
    loser (the upper boundary when its factor is >= the loser's, else the
    lower). Equal errors leave both factors untouched. Results are
    clamped ``OMEGA_MARGIN`` inside the open interval.

    ``p_pull`` is signed; ``p_push`` is expected nonnegative. Tests
    inject the steps directly; ``adapt_pair`` derives them from Gaussian
    noise and the time-variant decay.
    """
    if err_x == err_y:
        return omega_x, omega_y
    lo = params.omega_lo + OMEGA_MARGIN
    hi = params.omega_hi - OMEGA_MARGIN
    if err_x > err_y:
        loser, winner = omega_x, omega_y
    else:
        loser, winner = omega_y, omega_x
    new_loser = (0.5 + p_pull) * (omega_x + omega_y)
    if winner >= loser:
        new_winner = winner + p_push * (params.omega_hi - winner)
    else:
        new_winner = winner + p_push * (params.omega_lo - winner)
    new_loser = min(max(new_loser, lo), hi)
    new_winner = min(max(new_winner, lo), hi)
    if err_x > err_y:
        return new_loser, new_winner
    return new_winner, new_loser


def adapt_pair(
    omega_x: float,
    omega_y: float,
    err_x: float,
    err_y: float,
    t: int,
    params: AdaptiveParams,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Stochastic pairwise adaptation of two relaxation factors.

    Draws two Gaussians with mean 0 and standard deviation ``NOISE_SD``
    (the first for the pull step, the second for the push step), scales
    them by ``e_x`` / ``e_y`` and the time-variant decay at generation
    ``t``, and applies ``adapt_pair_from_steps``.
    """
    g_pull = rng.normal(0.0, NOISE_SD)
    g_push = rng.normal(0.0, NOISE_SD)
    t_omega = basic_time_variant(t, params.lam)
    p_pull = params.e_x * g_pull * t_omega
    p_push = params.e_y * abs(g_push) * t_omega
    return adapt_pair_from_steps(
        omega_x, omega_y, err_x, err_y, p_pull, p_push, params
    )


def make_stochastic_matrix(n_pop: int, rng: np.random.Generator) -> np.ndarray:
    """Random row-stochastic matrix: uniform(0,1) entries, rows normalized."""
    if n_pop < 1:
        raise ValueError("n_pop must be at least 1")
    r = rng.uniform(0.0, 1.0, size=(n_pop, n_pop))
    return r / r.sum(axis=1, keepdims=True)


def recombine(pop: Population, r: np.ndarray) -> Population:
    """Replace every state by a convex combination of the parent states.

    ``r`` must be row-stochastic (each row sums to 1 within 1e-12);
    offspring i is ``sum_j r_ij * state_j``. Slot omegas and the
    generation counter are untouched; fitnesses are invalidated.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (pop.size, pop.size):
        raise ValueError(
            f"stochastic matrix shape {r.shape} does not match population "
            f"size {pop.size}"
        )
    if np.max(np.abs(r.sum(axis=1) - 1.0)) > 1e-12:
        raise ValueError("matrix rows must sum to 1 within 1e-12")
    return replace(pop, states=r @ pop.states, fitness=None)


def mutate_and_evaluate(
    pop: Population, sys: LinearSystem, variant: Variant
) -> Population:
    """One relaxed sweep per slot with its own omega, then re-evaluate.

    The sweep is Jacobi or Gauss-Seidel according to the variant.
    Non-finite states are propagated as-is; the run loop's divergence
    check deals with them.
    """
    step = jacobi_sr_step if variant.method == "jacobi" else gauss_seidel_sr_step
    states = np.array(
        [step(sys, pop.states[i], pop.omegas[i]) for i in range(pop.size)]
    )
    with np.errstate(over="ignore", invalid="ignore"):
        fitness = np.array(
            [np.linalg.norm(sys.a @ s - sys.b) for s in states], dtype=np.float64
        )
    return replace(pop, states=states, fitness=fitness)


def select_and_reproduce(pop: Population) -> Population:
    """Keep the best half of the population, each copied into two slots.

    Ranking is by fitness with ties broken by lower slot index; survivor
    k occupies slots 2k and 2k+1. Slot omegas stay where they are, so
    the copies of one survivor run under different relaxation factors in
    the next generation. The caller advances the generation counter.
    """
    if pop.fitness is None:
        raise ValueError("population must be evaluated before selection")
    if pop.size % 2 != 0:
        raise ValueError("population size must be even")
    order = np.argsort(pop.fitness, kind="stable")
    survivors = order[: pop.size // 2]
    states = np.repeat(pop.states[survivors], 2, axis=0)
    fitness = np.repeat(pop.fitness[survivors], 2)
    return replace(pop, states=states, fitness=fitness)


def run_solver(sys: LinearSystem, cfg: SolverConfig) -> RunResult:
    """Run one solver configuration to convergence, cap, or divergence.

    Terminates when the best residual drops below ``cfg.threshold``
    (converged), the generation counter reaches ``cfg.max_generations``,
    or the best residual exceeds ``cfg.divergence_bound`` or turns
    non-finite (diverged). All randomness comes from one PCG64 generator
    seeded with ``cfg.seed``; the draw order is: initial states, then per
    generation a stochastic matrix (recombining variants only) followed
    by two Gaussians per adapted pair. Identical configurations produce
    identical traces.
    """
    if not isinstance(cfg, SolverConfig):
        raise ValueError("cfg must be a SolverConfig")
    if cfg.variant.is_fixed:
        return _run_fixed(sys, cfg)
    return _run_hybrid(sys, cfg)


def _finish(
    t: int,
    t0: float,
    best: float,
    converged: bool,
    diverged: bool,
    trace: list[tuple[int, float]],
    omegas,
    best_state: np.ndarray,
    recombine_calls: int,
) -> RunResult:
    elapsed_ms = (time.perf_counter() - t0) * 1e3
    return RunResult(
        generations=t,
        elapsed_ms=elapsed_ms,
        final_residual=best,
        converged=converged,
        diverged=diverged,
        trace=trace,
        final_omegas=[float(w) for w in omegas],
        best_state=np.array(best_state, dtype=np.float64),
        recombine_calls=recombine_calls,
    )


def _run_fixed(sys: LinearSystem, cfg: SolverConfig) -> RunResult:
    step = (
        jacobi_sr_step
        if cfg.variant.method == "jacobi"
        else gauss_seidel_sr_step
    )
    omega = cfg.fixed_omega
    x = np.zeros(sys.n)
    best = residual_norm(sys, x)
    trace = [(0, best)]
    t = 0
    converged = best < cfg.threshold
    diverged = False
    t0 = time.perf_counter()
    while not converged and t < cfg.max_generations:
        x = step(sys, x, omega)
        with np.errstate(over="ignore", invalid="ignore"):
            best = float(np.linalg.norm(sys.a @ x - sys.b))
        t += 1
        trace.append((t, best))
        if best < cfg.threshold:
            converged = True
        elif not best <= cfg.divergence_bound:
            diverged = True
            break
    return _finish(t, t0, best, converged, diverged, trace, [omega], x, 0)


def _run_hybrid(sys: LinearSystem, cfg: SolverConfig) -> RunResult:
    rng = np.random.default_rng(cfg.seed)
    params = cfg.adaptive
    pop = init_population(sys, cfg, rng)
    best = float(pop.fitness.min())
    trace = [(0, best)]
    t = 0
    converged = best < cfg.threshold
    diverged = False
    recombine_calls = 0
    t0 = time.perf_counter()
    while not converged and not diverged and t < cfg.max_generations:
        if cfg.variant.uses_recombination:
            r = make_stochastic_matrix(pop.size, rng)
            pop = recombine(pop, r)
            recombine_calls += 1
        pop = mutate_and_evaluate(pop, sys, cfg.variant)
        omegas = pop.omegas.copy()
        for p in range(0, pop.size - 1, 2):
            omegas[p], omegas[p + 1] = adapt_pair(
                omegas[p],
                omegas[p + 1],
                float(pop.fitness[p]),
                float(pop.fitness[p + 1]),
                t,
                params,
                rng,
            )
        pop = replace(pop, omegas=omegas)
        pop = select_and_reproduce(pop)
        t += 1
        pop = replace(pop, generation=t)
        best = float(pop.fitness.min())
        trace.append((t, best))
        if best < cfg.threshold:
            converged = True
        elif not best <= cfg.divergence_bound:
            diverged = True
    return _finish(
        t,
        t0,
        best,
        converged,
        diverged,
        trace,
        pop.omegas,
        pop.states[pop.best_index()],
        recombine_calls,
    )
