"""Desk-scale single-intersection traffic environment.

A deterministic cell/queue kinematic model stands in for a microsimulator:
four incoming 750 m roads, each split into a straight movement (3 lanes) and
a left-turn movement (1 lane). Vehicles arrive Bernoulli per second, drive at
free speed toward the stop line, queue behind each other, and depart on green
at a fixed saturation headway per lane. The state is the occupancy bit per
movement cell; the reward is the decrease in total cumulative waiting time
between decision instants (never positive: departed vehicles keep their
accumulated wait).

All waiting times are whole seconds, so episode rewards telescope exactly:
the rewards of an episode that starts empty sum to -W(end).
"""
from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .traces import Schema, TraceSet

PHASES = ("NS", "NSL", "EW", "EWL")

# Movement order: road (N,S,E,W) major, straight (G0) before left (G1).
ROADS = ("N", "S", "E", "W")
MOVEMENTS = tuple(f"{road}-G{g}" for road in ROADS for g in (0, 1))

# Movements served by each green phase.
PHASE_GREEN = {
    "NS": ("N-G0", "S-G0"),
    "NSL": ("N-G1", "S-G1"),
    "EW": ("E-G0", "W-G0"),
    "EWL": ("E-G1", "W-G1"),
}

DEFAULT_BOUNDARIES = (0, 7, 14, 21, 28, 35, 42, 49, 100, 300, 750)


@dataclass(frozen=True)
class IntersectionConfig:
    cell_boundaries: tuple[float, ...] = DEFAULT_BOUNDARIES
    road_length: float = 750.0
    green_hold: int = 10
    yellow: int = 4
    speed_threshold: float = 0.1
    free_speed: float = 13.9
    saturation_headway: float = 2.0  # seconds per departing vehicle per lane
    queue_gap: float = 7.5  # jam spacing between stopped vehicles, metres
    straight_lanes: int = 3
    left_lanes: int = 1
    straight_rate: float = 0.04  # arrivals per second per straight movement
    left_rate: float = 0.04 / 3  # 3:1 straight:left flow asymmetry
    rate_jitter: float = 0.15  # episode scaling drawn from U[1-j, 1+j] per road
    episode_seconds: int = 5400

    def __post_init__(self) -> None:
        b = self.cell_boundaries
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ValueError("cell boundaries must be strictly increasing")
        if b[0] != 0 or b[-1] != self.road_length:
            raise ValueError("cell boundaries must span 0..road_length")
        if self.green_hold <= 0:
            raise ValueError("green hold must be positive")

    @property
    def cells_per_movement(self) -> int:
        return len(self.cell_boundaries) - 1

    def lanes(self, movement: str) -> int:
        return self.straight_lanes if movement.endswith("G0") else self.left_lanes

    def arrival_rate(self, movement: str) -> float:
        return self.straight_rate if movement.endswith("G0") else self.left_rate

    def cell_name(self, movement: str, cell: int) -> str:
        lo, hi = self.cell_boundaries[cell], self.cell_boundaries[cell + 1]
        fmt = lambda x: str(int(x)) if float(x).is_integer() else str(x)
        return f"{movement}_{fmt(lo)}-{fmt(hi)}"


def state_variable_names(config: IntersectionConfig, depth: int) -> tuple[str, ...]:
    """Observed-cell names, movement-major: first `depth` cells per movement."""
    if not 1 <= depth <= config.cells_per_movement:
        raise ValueError(f"depth must be in 1..{config.cells_per_movement}")
    return tuple(
        config.cell_name(m, j) for m in MOVEMENTS for j in range(depth)
    )


def observation_schema(config: IntersectionConfig, depth: int) -> Schema:
    return Schema(state_variable_names(config, depth), PHASES)


@dataclass(slots=True)
class Vehicle:
    movement: int
    position: float  # metres from the stop line
    speed: float = 0.0
    slow_time: int = 0  # whole seconds spent below the speed threshold


class TlcSimulator:
    """Single intersection under phase control; one instance per thread."""

    def __init__(self, config: IntersectionConfig = IntersectionConfig(),
                 seed: int = 0) -> None:
        self.config = config
        self.reset(seed)

    def reset(self, seed: int) -> None:
        cfg = self.config
        self.rng = random.Random(seed)
        self.vehicles: list[list[Vehicle]] = [[] for _ in MOVEMENTS]
        self.phase: Optional[str] = None
        self.time = 0
        self.entered = 0
        self.departed = 0
        self.departed_wait = 0
        self.dep_credit = [0.0] * len(MOVEMENTS)
        # episode-level flow scaling, one factor per incoming road
        road_scale = {road: self.rng.uniform(1 - cfg.rate_jitter, 1 + cfg.rate_jitter)
                      for road in ROADS}
        self.rates = [
            min(0.95, cfg.arrival_rate(m) * road_scale[m[0]]) for m in MOVEMENTS
        ]

    @property
    def total_wait(self) -> int:
        """W(t): cumulative sub-threshold seconds over all vehicles ever entered."""
        active = sum(v.slow_time for lane in self.vehicles for v in lane)
        return self.departed_wait + active

    @property
    def vehicle_count(self) -> int:
        return sum(len(lane) for lane in self.vehicles)

    def _tick(self, green: Sequence[str]) -> None:
        cfg = self.config
        step = cfg.free_speed  # metres per 1 s tick
        threshold = cfg.speed_threshold
        gap = cfg.queue_gap
        rand = self.rng.random
        for i, movement in enumerate(MOVEMENTS):
            lane = self.vehicles[i]
            if movement in green:
                lanes = cfg.lanes(movement)
                credit = self.dep_credit[i] + lanes / cfg.saturation_headway
                if credit > lanes:
                    credit = float(lanes)
                while credit >= 1.0 and lane and lane[0].position <= step:
                    gone = lane.pop(0)
                    self.departed += 1
                    self.departed_wait += gone.slow_time
                    credit -= 1.0
                self.dep_credit[i] = credit
            else:
                self.dep_credit[i] = 0.0
            limit = 0.0  # stop line; red and green alike (departures model crossing)
            for v in lane:
                pos = v.position
                target = pos - step
                if target < limit:
                    target = limit
                    if target > pos:  # jammed back past the entry point
                        target = pos
                moved = pos - target
                v.position = target
                v.speed = moved
                if moved < threshold:
                    v.slow_time += 1
                limit = target + gap
            if rand() < self.rates[i]:
                lane.append(Vehicle(i, cfg.road_length))
                self.entered += 1
        self.time += 1

    def step(self, action: str) -> tuple[tuple[int, ...], int, int]:
        """Apply one decision: optional 4 s yellow on a phase change, then the
        10 s green hold. Returns (occupancy state, reward, elapsed seconds)."""
        if action not in PHASES:
            raise ValueError(f"unknown action {action!r}")
        cfg = self.config
        wait_before = self.total_wait
        elapsed = 0
        if self.phase is not None and action != self.phase:
            for _ in range(cfg.yellow):
                self._tick(())
            elapsed += cfg.yellow
        self.phase = action
        for _ in range(cfg.green_hold):
            self._tick(PHASE_GREEN[action])
        elapsed += cfg.green_hold
        reward = wait_before - self.total_wait
        return self.occupancy(), reward, elapsed

    def occupancy(self) -> tuple[int, ...]:
        """Full occupancy state x_ij, movement-major."""
        cfg = self.config
        cells = cfg.cells_per_movement
        bits = [0] * (len(MOVEMENTS) * cells)
        for i, lane in enumerate(self.vehicles):
            for v in lane:
                j = bisect_right(cfg.cell_boundaries, v.position) - 1
                if j >= cells:  # position exactly at the entry boundary
                    j = cells - 1
                bits[i * cells + j] = 1
        return tuple(bits)

    def observe(self, depth: int) -> tuple[int, ...]:
        """State restricted to the first `depth` cells of each movement."""
        cfg = self.config
        if not 1 <= depth <= cfg.cells_per_movement:
            raise ValueError(f"depth must be in 1..{cfg.cells_per_movement}")
        full = self.occupancy()
        cells = cfg.cells_per_movement
        return tuple(
            full[i * cells + j] for i in range(len(MOVEMENTS)) for j in range(depth)
        )


Policy = Callable[[tuple[int, ...]], str]


def run_episode(
    sim: TlcSimulator,
    policy: Policy,
    depth: int,
    seed: int,
    duration: Optional[int] = None,
) -> tuple[list[tuple[tuple[int, ...], str]], int]:
    """One seeded episode; returns the (observation, action) rows and the
    total reward. Deterministic given the seed."""
    sim.reset(seed)
    duration = sim.config.episode_seconds if duration is None else duration
    rows: list[tuple[tuple[int, ...], str]] = []
    total = 0
    t = 0
    while t < duration:
        obs = sim.observe(depth)
        action = policy(obs)
        _, reward, elapsed = sim.step(action)
        rows.append((obs, action))
        total += reward
        t += elapsed
    return rows, total


def collect_traces(
    config: IntersectionConfig,
    policy: Policy,
    depth: int,
    episodes: int,
    seed: int,
) -> tuple[TraceSet, dict]:
    """Concatenated traces of `episodes` seeded episodes under one policy.

    The summary carries the reward series plus fleet totals: entered/departed
    vehicle counts and the mean accumulated wait per vehicle."""
    schema = observation_schema(config, depth)
    traces = TraceSet(
        schema,
        provenance={"seed": seed, "episodes": episodes, "depth": depth},
    )
    sim = TlcSimulator(config, seed)
    rewards = []
    entered = departed = waited = 0
    for e in range(episodes):
        rows, total = run_episode(sim, policy, depth, seed + e)
        for state, action in rows:
            traces.append(state, action)
        rewards.append(total)
        entered += sim.entered
        departed += sim.departed
        waited += sim.total_wait
    summary = {
        "episode_rewards": rewards,
        "total_reward": sum(rewards),
        "vehicles_entered": entered,
        "vehicles_departed": departed,
        "mean_wait_seconds": waited / entered if entered else 0.0,
    }
    return traces, summary


def pressure_policy(depth: int) -> Policy:
    """Built-in heuristic: serve the phase with the most occupied observed
    cells, ties in fixed phase order. Useful for untrained trace generation."""

    def decide(obs: tuple[int, ...]) -> str:
        best, best_load = PHASES[0], -1
        for phase in PHASES:
            load = 0
            for m in PHASE_GREEN[phase]:
                i = MOVEMENTS.index(m)
                load += sum(obs[i * depth : (i + 1) * depth])
            if load > best_load:
                best, best_load = phase, load
        return best

    return decide
