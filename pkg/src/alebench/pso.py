"""Particle-swarm search for the enhancer weight vector.

Each particle's position is a candidate weight vector; its fitness is the
mean squared residual of filtering the whole frame with those weights held
fixed.  Velocities start at zero and update without an inertia factor:
the previous velocity carries weight exactly 1 (an optional inertia knob
exists for experimentation but defaults to that behaviour).  Two scalar
uniform draws per particle per iteration drive the attraction terms, and
every draw for an iteration happens before any cost evaluation, so results
do not depend on how the evaluations are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ale import AleConfig, filter_frame

__all__ = [
    "PsoConfig",
    "Particle",
    "SwarmState",
    "CostEval",
    "evaluate_cost",
    "init_swarm",
    "update_velocity",
    "update_position",
    "run_pso",
]


@dataclass(frozen=True)
class PsoConfig:
    """Swarm size, learning coefficients, bounds, and stopping rules.

    `tol` is an absolute threshold on global-best improvement; once the
    improvement stays below it for `patience` consecutive iterations the
    search stops early.  Set ``tol=0`` to always run `max_iters` iterations.
    """

    n_particles: int = 60
    c1: float = 2.0
    c2: float = 2.0
    max_iters: int = 60
    tol: float = 1e-4
    patience: int = 5
    init_range: float = 2.0
    v_max: float = 1.0
    seed: int = 0
    inertia: float = 1.0
    per_dimension_draws: bool = False

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError(f"n_particles must be >= 1, got {self.n_particles}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (self.c1 >= 0.0 and self.c2 >= 0.0):
            raise ValueError("learning coefficients must be >= 0")
        if not self.init_range > 0.0:
            raise ValueError(f"init_range must be > 0, got {self.init_range}")
        if not self.v_max > 0.0:
            raise ValueError(f"v_max must be > 0, got {self.v_max}")
        if self.tol < 0.0:
            raise ValueError(f"tol must be >= 0, got {self.tol}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_cost: float


@dataclass
class SwarmState:
    """Full swarm snapshot plus the per-iteration global-best history."""

    particles: list[Particle]
    gbest_position: np.ndarray
    gbest_cost: float
    history: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class CostEval:
    """Mean squared residual and the number of samples it averaged."""

    cost: float
    n_samples: int


def evaluate_cost(w: np.ndarray, d: np.ndarray, ale: AleConfig) -> CostEval:
    """Mean |e[n]|^2 over the fully-populated range, weights held fixed."""
    run = filter_frame(d, w, ale)
    resid = run.e[run.valid_slice]
    return CostEval(cost=float(np.mean(np.abs(resid) ** 2)), n_samples=len(resid))


def init_swarm(cfg: PsoConfig, taps: int, cost_fn=None, rng=None) -> SwarmState:
    """Draw initial positions uniformly in [-init_range, init_range]^taps.

    Velocities start at exactly zero and each particle's best is its own
    starting point.  When `cost_fn` is given the initial costs are
    evaluated and the global best is the cheapest particle; otherwise the
    costs stay at +inf until the first search iteration evaluates them.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    positions = rng.uniform(-cfg.init_range, cfg.init_range, size=(cfg.n_particles, taps))
    particles = []
    for i in range(cfg.n_particles):
        pos = positions[i].copy()
        cost = float(cost_fn(pos)) if cost_fn is not None else np.inf
        particles.append(
            Particle(
                position=pos,
                velocity=np.zeros(taps),
                best_position=pos.copy(),
                best_cost=cost,
            )
        )
    best = min(range(len(particles)), key=lambda i: particles[i].best_cost)
    return SwarmState(
        particles=particles,
        gbest_position=particles[best].best_position.copy(),
        gbest_cost=particles[best].best_cost,
    )


def update_velocity(
    p: Particle, gbest: np.ndarray, cfg: PsoConfig, r1: float, r2: float
) -> np.ndarray:
    """New velocity from the personal and global attraction terms.

    v' = inertia * v + c1*r1*(pbest - x) + c2*r2*(gbest - x), then each
    component is clamped to [-v_max, v_max].
    """
    v = (
        cfg.inertia * p.velocity
        + cfg.c1 * r1 * (p.best_position - p.position)
        + cfg.c2 * r2 * (np.asarray(gbest) - p.position)
    )
    return np.clip(v, -cfg.v_max, cfg.v_max)


def update_position(p: Particle, v_new: np.ndarray) -> np.ndarray:
    """Positions move by plain vector addition; no position clamping."""
    return p.position + np.asarray(v_new)


def run_pso(
    d: np.ndarray, cfg: PsoConfig, ale: AleConfig, map_fn=map
) -> tuple[np.ndarray, SwarmState]:
    """Search for the weight vector minimizing the frame's residual cost.

    `map_fn` only maps the pure cost evaluations (e.g. a thread pool's
    map); all random draws and state updates stay sequential, so any
    map implementation yields bit-identical results.

    Returns the global-best weights and the final swarm state, whose
    `history` holds the global-best cost after each iteration.
    """
    d = np.asarray(d, dtype=np.complex128)
    rng = np.random.default_rng(cfg.seed)

    def cost_fn(w):
        return evaluate_cost(w, d, ale).cost

    swarm = init_swarm(cfg, ale.taps, cost_fn=cost_fn, rng=rng)
    stall = 0
    for _ in range(cfg.max_iters):
        if cfg.per_dimension_draws:
            draws = rng.uniform(size=(cfg.n_particles, 2, ale.taps))
        else:
            draws = rng.uniform(size=(cfg.n_particles, 2))
        gbest_prev = swarm.gbest_position.copy()
        for i, p in enumerate(swarm.particles):
            v_new = update_velocity(p, gbest_prev, cfg, draws[i, 0], draws[i, 1])
            p.velocity = v_new
            p.position = update_position(p, v_new)

        costs = list(map_fn(cost_fn, [p.position.copy() for p in swarm.particles]))
        for p, cost in zip(swarm.particles, costs):
            if cost < p.best_cost:
                p.best_cost = float(cost)
                p.best_position = p.position.copy()

        prev = swarm.gbest_cost
        for p in swarm.particles:
            if p.best_cost < swarm.gbest_cost:
                swarm.gbest_cost = p.best_cost
                swarm.gbest_position = p.best_position.copy()
        swarm.history.append(swarm.gbest_cost)

        if prev - swarm.gbest_cost < cfg.tol:
            stall += 1
        else:
            stall = 0
        if cfg.tol > 0.0 and stall >= cfg.patience:
            break

    return swarm.gbest_position.copy(), swarm
