"""Particle swarm search over injective core-to-tile mappings.

A particle's position is a real vector with one component per tile; the
first ``C`` components, rounded and repaired into distinct tiles, give the
tile of each core. Three variants share one driver:

* ``pso``   - the standard attraction update with floored velocity steps;
* ``arpso`` - the same, but the social term repels from the global best once
  ``ator`` evaluations have been spent;
* ``qpso``  - a fixed fraction ``ch`` of the swarm is moved by a
  component-wise quadratic-interpolation operator instead of velocities.

Any variant may be seeded with the heuristic mapping as particle 0.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from nocmap.core import Apcg, Mapping, Topology
from nocmap.errors import SizingError
from nocmap.heuristic import map_heuristic
from nocmap.metrics import BatchObjective, EnergyParams, objective_value

VARIANTS = ("pso", "arpso", "qpso")

# (c1, c2, w) per variant
_COEFFICIENTS = {
    "pso": (1.2, 1.3, 0.721348),
    "arpso": (1.2, 1.3, 0.721348),
    "qpso": (2.8, 1.3, 0.719),
}

QA_EPS = 1e-12


@dataclass(frozen=True)
class SwarmConfig:
    variant: str = "pso"
    c1: float = 1.2
    c2: float = 1.3
    w: float = 0.721348
    swarm_size: int = 200
    max_evals: int = 150_000
    simulations: int = 100
    ator: int = 5000
    ch: float = 0.30
    seed_with_heuristic: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be at least 2")
        if not all(np.isfinite(v) for v in (self.c1, self.c2, self.w)):
            raise ValueError("c1, c2 and w must be finite")
        if self.ator < 0:
            raise ValueError("ator must be non-negative")
        if not 0.0 <= self.ch <= 1.0:
            raise ValueError("ch must lie in [0, 1]")
        if self.simulations < 1 or self.max_evals < 0:
            raise ValueError("simulations must be >= 1 and max_evals >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def for_variant(cls, variant: str, **overrides) -> "SwarmConfig":
        """Config with the tuned coefficients of ``variant``; keyword overrides win."""
        c1, c2, w = _COEFFICIENTS[variant]
        return cls(variant=variant, **{"c1": c1, "c2": c2, "w": w, **overrides})

    @property
    def qa_size(self) -> int:
        if self.variant != "qpso":
            return 0
        return int(round(self.ch * self.swarm_size))


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: float
    fitness: float


# --- position decoding -------------------------------------------------------

def decode_batch(positions: np.ndarray, num_cores: int, num_tiles: int) -> np.ndarray:
    """Repair each row of ``positions`` into ``num_cores`` distinct tile indices.

    Components are rounded and clamped to ``[0, num_tiles - 1]``. The first
    occurrence of a tile keeps it; later duplicates take the smallest tiles
    not kept by anyone, in ascending order of component index.
    """
    x = np.atleast_2d(np.asarray(positions, dtype=float))[:, :num_cores]
    k = x.shape[0]
    tiles = np.clip(np.rint(x), 0, num_tiles - 1).astype(np.intp)
    if num_cores == 0:
        return tiles

    order = np.argsort(tiles, axis=1, kind="stable")
    sorted_tiles = np.take_along_axis(tiles, order, axis=1)
    dup_sorted = np.zeros_like(sorted_tiles, dtype=bool)
    dup_sorted[:, 1:] = sorted_tiles[:, 1:] == sorted_tiles[:, :-1]
    dup = np.empty_like(dup_sorted)
    np.put_along_axis(dup, order, dup_sorted, axis=1)
    if not dup.any():
        return tiles

    used = np.zeros((k, num_tiles), dtype=bool)
    r, c = np.nonzero(~dup)
    used[r, tiles[r, c]] = True
    # stable sort puts unused tiles first, in ascending order
    free = np.argsort(used, axis=1, kind="stable")
    rows = np.arange(k)[:, None]
    slot = np.cumsum(dup, axis=1) - 1
    return np.where(dup, free[rows, np.maximum(slot, 0)], tiles)


def decode(position, apcg: Apcg, topology: Topology) -> Mapping:
    tiles = decode_batch(position, apcg.num_cores, topology.num_tiles)[0]
    return Mapping(apcg, topology, tuple(tiles.tolist()))


# --- update rules ------------------------------------------------------------

def update_velocity(velocity, position, pbest, gbest, w, r1, r2, repel=False):
    """``w*v + r1*(pbest - x) +/- r2*(gbest - x)``; ``r1``/``r2`` are pre-scaled draws."""
    social = r2 * (gbest - position)
    cognitive = r1 * (pbest - position)
    return w * velocity + cognitive - social if repel else w * velocity + cognitive + social


def move(position, velocity):
    return position + np.floor(velocity)


def _draws(rng: np.random.Generator, config: SwarmConfig, shape):
    r1 = rng.uniform(0.0, config.c1, shape)
    r2 = rng.uniform(0.0, config.c2, shape)
    return r1, r2


def _step(particle: Particle, gbest, config, rng, fitness, repel, draws):
    r1, r2 = draws if draws is not None else _draws(rng, config, particle.position.shape)
    v = update_velocity(particle.velocity, particle.position, particle.best_position,
                        np.asarray(gbest, dtype=float), config.w, r1, r2, repel)
    x = move(particle.position, v)
    f = float(fitness(x))
    if f < particle.best_fitness:
        return Particle(x, v, x.copy(), f, f)
    return Particle(x, v, particle.best_position, particle.best_fitness, f)


def step_pso(particle: Particle, gbest, config: SwarmConfig, rng: np.random.Generator,
             fitness: Callable[[np.ndarray], float], draws=None) -> Particle:
    """One attraction step. ``draws`` optionally fixes the ``(r1, r2)`` vectors."""
    return _step(particle, gbest, config, rng, fitness, False, draws)


def step_arpso_repulsion(particle: Particle, gbest, config: SwarmConfig,
                         rng: np.random.Generator, fitness: Callable[[np.ndarray], float],
                         draws=None) -> Particle:
    """One repulsion step: pulled toward its own best, pushed away from the global best."""
    return _step(particle, gbest, config, rng, fitness, True, draws)


def quadratic_vertex(r1, r2, r3, f1, f2, f3, fallback):
    """Component-wise minimiser of the parabola through three (point, value) pairs.

    Components whose denominator is (numerically) zero take ``fallback``.
    """
    r1, r2, r3 = (np.asarray(r, dtype=float) for r in (r1, r2, r3))
    num = (r2**2 - r3**2) * f1 + (r3**2 - r1**2) * f2 + (r1**2 - r2**2) * f3
    den = (r2 - r3) * f1 + (r3 - r1) * f2 + (r1 - r2) * f3
    ok = np.abs(den) >= QA_EPS
    safe = np.where(ok, den, 1.0)
    return np.where(ok, 0.5 * num / safe, np.asarray(fallback, dtype=float))


def qa_step(positions, best_positions, best_fitness, targets, gbest_index, rng,
            evaluate: Callable[[np.ndarray], np.ndarray]):
    """Quadratic-approximation update of the particles listed in ``targets``.

    Each target gets a candidate from the global best and two other random
    swarm members with distinct personal-best positions. A candidate is kept
    only if it beats the target's personal best. Works in place and returns
    ``(accepted_mask, candidate_fitness)``, or ``None`` when the swarm holds
    fewer than three distinct positions (nothing is evaluated then).
    """
    targets = np.asarray(targets, dtype=np.intp)
    if targets.size == 0 or len(np.unique(best_positions, axis=0)) < 3:
        return None
    g = best_positions[gbest_index]
    not_g = np.flatnonzero(np.any(best_positions != g, axis=1))
    candidates = np.empty((targets.size, positions.shape[1]))
    for t, s in enumerate(targets):
        i2 = not_g[rng.integers(not_g.size)]
        pool = not_g[np.any(best_positions[not_g] != best_positions[i2], axis=1)]
        i3 = pool[rng.integers(pool.size)]
        candidates[t] = quadratic_vertex(
            g, best_positions[i2], best_positions[i3],
            best_fitness[gbest_index], best_fitness[i2], best_fitness[i3],
            positions[s],
        )
    cand_fit = evaluate(candidates)
    accepted = cand_fit < best_fitness[targets]
    hit = targets[accepted]
    positions[hit] = candidates[accepted]
    best_positions[hit] = candidates[accepted]
    best_fitness[hit] = cand_fit[accepted]
    return accepted, cand_fit


# --- driver ------------------------------------------------------------------

def stream(seed: int, simulation: int, iteration: int) -> np.random.Generator:
    """Counter-based generator for one (simulation, iteration) cell of a run."""
    counter = (simulation << 192) | (iteration << 128)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


@dataclass
class SimulationResult:
    best_fitness: float
    best_assignment: tuple[int, ...]
    evaluations: int
    convergence: list[tuple[int, float]]
    attraction_iterations: int = 0
    repulsion_iterations: int = 0
    phase_switch_eval: int | None = None
    qa_evaluations: int = 0


@dataclass
class RunResult:
    config: SwarmConfig
    objective: str
    best_mapping: Mapping
    min_cost: float
    simulations: list[SimulationResult] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def best_assignment(self) -> tuple[int, ...]:
        return self.best_mapping.assignment

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "schema": "noc-map/run/1",
            "apcg": self.best_mapping.apcg.name,
            "mesh": self.best_mapping.topology.n,
            "objective": self.objective,
            "config": asdict(self.config),
            "min_cost": self.min_cost,
            "best_assignment": list(self.best_assignment),
            "simulations": [
                {
                    "best_fitness": s.best_fitness,
                    "best_assignment": list(s.best_assignment),
                    "evaluations": s.evaluations,
                    "attraction_iterations": s.attraction_iterations,
                    "repulsion_iterations": s.repulsion_iterations,
                    "phase_switch_eval": s.phase_switch_eval,
                    "qa_evaluations": s.qa_evaluations,
                    "convergence": [[e, f] for e, f in s.convergence],
                }
                for s in self.simulations
            ],
        }
        if include_timing:
            out["wall_clock"] = self.wall_clock
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    def convergence_csv(self) -> str:
        lines = ["simulation,evaluation,best_fitness"]
        for i, sim in enumerate(self.simulations):
            lines.extend(f"{i},{e},{f!r}" for e, f in sim.convergence)
        return "\n".join(lines) + "\n"


def _simulate(sim: int, objective: BatchObjective, config: SwarmConfig, num_cores: int,
              num_tiles: int, seed_assignment) -> SimulationResult:
    S, D, C = config.swarm_size, num_tiles, num_cores

    def evaluate(x):
        return objective(decode_batch(x, C, D))

    rng = stream(config.seed, sim, 0)
    X = rng.integers(0, D, size=(S, D)).astype(float)
    V = rng.uniform(-(D - 1), D - 1, size=(S, D))
    if seed_assignment is not None:
        X[0, :C] = seed_assignment
    fit = evaluate(X)
    evals = S
    P, Pf = X.copy(), fit.copy()
    g = int(np.argmin(Pf))
    result = SimulationResult(0.0, (), 0, [(evals, float(Pf[g]))])

    k = config.qa_size
    qa = np.arange(S - k, S)
    pso = np.arange(S - k)
    iteration = 0
    while evals < config.max_evals:
        iteration += 1
        rng = stream(config.seed, sim, iteration)
        gbest = P[g].copy()
        repel = config.variant == "arpso" and evals >= config.ator
        if repel:
            if result.phase_switch_eval is None:
                result.phase_switch_eval = evals
            result.repulsion_iterations += 1
        else:
            result.attraction_iterations += 1

        if pso.size:
            r1, r2 = _draws(rng, config, (pso.size, D))
            V[pso] = update_velocity(V[pso], X[pso], P[pso], gbest, config.w, r1, r2, repel)
            X[pso] = move(X[pso], V[pso])
            f = evaluate(X[pso])
            evals += pso.size
            better = f < Pf[pso]
            P[pso[better]] = X[pso[better]]
            Pf[pso[better]] = f[better]
        if qa.size:
            # reads the pre-iteration gbest through `g`, as the PSO half does
            out = qa_step(X, P, Pf, qa, g, rng, evaluate)
            if out is not None:
                evals += qa.size
                result.qa_evaluations += qa.size
        g = int(np.argmin(Pf))
        result.convergence.append((evals, float(Pf[g])))

    result.best_fitness = float(Pf[g])
    result.best_assignment = tuple(decode_batch(P[g], C, D)[0].tolist())
    result.evaluations = evals
    return result


def run(apcg: Apcg, topology: Topology, config: SwarmConfig, objective: str = "energy",
        params: EnergyParams = EnergyParams()) -> RunResult:
    if apcg.num_cores > topology.num_tiles:
        raise SizingError(f"{apcg.num_cores} cores do not fit on {topology.num_tiles} tiles")
    if apcg.num_cores == 0:
        raise SizingError("cannot optimize an empty task graph")
    start = time.perf_counter()
    batch = BatchObjective(apcg, topology, objective, params)
    seed_assignment = None
    if config.seed_with_heuristic:
        seed_assignment = np.array(map_heuristic(apcg, topology)[0].assignment, dtype=float)

    sims = [
        _simulate(i, batch, config, apcg.num_cores, topology.num_tiles, seed_assignment)
        for i in range(config.simulations)
    ]
    best = min(range(len(sims)), key=lambda i: (sims[i].best_fitness, i))
    mapping = Mapping(apcg, topology, sims[best].best_assignment)
    return RunResult(
        config=config,
        objective=objective,
        best_mapping=mapping,
        min_cost=objective_value(mapping, objective, params),
        simulations=sims,
        wall_clock=time.perf_counter() - start,
    )


def hybrid(config: SwarmConfig) -> SwarmConfig:
    return replace(config, seed_with_heuristic=True)
