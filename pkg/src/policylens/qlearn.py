"""Tabular Q-learning with experience replay and linear epsilon decay.

Replaces a deep approximator at desk scale: Q-values live in a table over
visited observed states only, updated in batches sampled from a replay buffer
at episode ends. The exploration schedule is linear, eps(e) = 1 - e/E, so the
final episode is fully greedy. Training is deterministic under a fixed seed
and yields a single-valued greedy policy (ties broken in fixed phase order),
which is what the trace encoder expects from a deterministic controller.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from .tlc import PHASES, IntersectionConfig, Policy, TlcSimulator

# Greedy fallback for states never visited during training. Analysts should
# expect this: unexplored states map to the first phase.
FALLBACK_ACTION = PHASES[0]

Transition = tuple[str, int, int, str]  # (state bits, action index, reward, next bits)


def bits_key(bits: tuple[int, ...]) -> str:
    return "".join("1" if b else "0" for b in bits)


@dataclass
class QTable:
    """Q(s, a) over visited states; missing entries read as zero."""

    alpha: float = 0.03
    gamma: float = 0.9
    values: dict[str, list[float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0 <= self.gamma <= 1:
            raise ValueError("discount factor must be in [0, 1]")
        if self.alpha <= 0:
            raise ValueError("learning rate must be positive")

    def row(self, state: str) -> list[float]:
        row = self.values.get(state)
        if row is None:
            row = [0.0] * len(PHASES)
            self.values[state] = row
        return row

    def update(self, transition: Transition) -> float:
        """Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))."""
        state, action, reward, nxt = transition
        row = self.row(state)
        best_next = max(self.row(nxt))
        row[action] += self.alpha * (reward + self.gamma * best_next - row[action])
        return row[action]

    def greedy_action(self, state: str) -> int:
        row = self.values.get(state)
        if row is None:
            return 0
        best = 0
        for a in range(1, len(PHASES)):
            if row[a] > row[best]:
                best = a
        return best

    def greedy_policy(self) -> dict[str, str]:
        """One action per visited state; a function, never multi-valued."""
        return {
            state: PHASES[self.greedy_action(state)]
            for state in sorted(self.values)
        }


class ReplayBuffer:
    """Fixed-capacity ring of transitions; batches sample uniformly without
    replacement within a batch."""

    def __init__(self, capacity: int = 50_000) -> None:
        self.capacity = capacity
        self.items: list[Transition] = []
        self._next = 0

    def add(self, transition: Transition) -> None:
        if len(self.items) < self.capacity:
            self.items.append(transition)
        else:
            self.items[self._next] = transition
            self._next = (self._next + 1) % self.capacity

    def sample(self, rng: random.Random, batch_size: int) -> list[Transition]:
        k = min(batch_size, len(self.items))
        return rng.sample(self.items, k)

    def __len__(self) -> int:
        return len(self.items)


def epsilon(episode: int, total_episodes: int) -> float:
    """Linear exploration schedule: 1 - e/E, reaching 0 on the last episode."""
    if not 1 <= episode <= total_episodes:
        raise ValueError(f"episode {episode} outside 1..{total_episodes}")
    return 1.0 - episode / total_episodes


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 100
    depth: int = 1
    alpha: float = 0.03
    gamma: float = 0.9
    buffer_capacity: int = 50_000
    batch_size: int = 100
    batches_per_episode: int = 800
    env: IntersectionConfig = IntersectionConfig()


@dataclass
class TrainResult:
    qtable: QTable
    policy: dict[str, str]
    episode_rewards: list[int]


def train(config: TrainConfig, seed: int = 0) -> TrainResult:
    """Train for config.episodes episodes and return the greedy policy plus
    the per-episode reward series."""
    rng = random.Random(seed)
    table = QTable(alpha=config.alpha, gamma=config.gamma)
    buffer = ReplayBuffer(config.buffer_capacity)
    sim = TlcSimulator(config.env, seed)
    rewards: list[int] = []
    n_actions = len(PHASES)

    for e in range(1, config.episodes + 1):
        sim.reset(rng.randrange(2**32))
        eps = epsilon(e, config.episodes)
        state = bits_key(sim.observe(config.depth))
        total = 0
        t = 0
        while t < config.env.episode_seconds:
            if rng.random() < eps:
                action = rng.randrange(n_actions)
            else:
                action = table.greedy_action(state)
            _, reward, elapsed = sim.step(PHASES[action])
            nxt = bits_key(sim.observe(config.depth))
            buffer.add((state, action, reward, nxt))
            total += reward
            state = nxt
            t += elapsed
        rewards.append(total)
        for _ in range(config.batches_per_episode):
            for tr in buffer.sample(rng, config.batch_size):
                table.update(tr)

    return TrainResult(table, table.greedy_policy(), rewards)


def policy_fn(policy: dict[str, str], fallback: str = FALLBACK_ACTION) -> Policy:
    """Wrap a serialized policy map for the simulator."""

    def decide(obs: tuple[int, ...]) -> str:
        return policy.get(bits_key(obs), fallback)

    return decide


def save_policy(policy: dict[str, str], path: Path) -> None:
    Path(path).write_text(json.dumps(policy, indent=2, sort_keys=True) + "\n")


def load_policy(path: Path) -> dict[str, str]:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict) or any(a not in PHASES for a in data.values()):
        raise ValueError(f"{path} is not a policy map")
    return data


def save_rewards_csv(rewards: list[int], path: Path) -> None:
    lines = ["episode,total_reward"]
    lines += [f"{i + 1},{r}" for i, r in enumerate(rewards)]
    Path(path).write_text("\n".join(lines) + "\n")
