"""Scenario drivers: experiment replay and multi-agent forum simulation.

Replay pushes one agent through an ordered sequence of thread exposures
with the field pinned to the thread's emotional charge (-1/0/+1), the
simulation analogue of reading threads and reporting in between.

The forum couples many agents through one shared field h.  Each step is
synchronous: every agent integrates against the current h, posting is
sampled (the per-minute participation tendency is scaled by dt so the
posting rate does not depend on the step size), the field decays and
absorbs the polarity sum of new posts, and feedback is applied to the
agents that posted.  The first post of a run seeds the discussion; every
later post counts as a reply.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .expression import apply_feedback, sample_expression
from .integrator import IntegratorConfig, SimulationTrace, integrate, step, substream
from .model import EmotionState, ModelParams

__all__ = [
    "ReplayScenario",
    "ReplayResult",
    "ForumScenario",
    "FieldTrace",
    "ForumResult",
    "replay",
    "run_forum",
    "load_scenario",
]

REPLAY_FIELD_LEVELS = (-1.0, 0.0, 1.0)


@dataclass(frozen=True)
class ReplayScenario:
    """Ordered thread exposures (h, minutes) plus the agent's starting state."""

    threads: tuple[tuple[float, float], ...]
    initial_state: EmotionState = dc_field(default_factory=lambda: EmotionState(0.0, 0.0))

    def __post_init__(self) -> None:
        if not self.threads:
            raise ValueError("replay scenario needs at least one thread")
        for h, minutes in self.threads:
            if h not in REPLAY_FIELD_LEVELS:
                raise ValueError(f"replay field must be -1, 0 or +1, got {h}")
            if minutes <= 0:
                raise ValueError(f"exposure minutes must be > 0, got {minutes}")

    @classmethod
    def from_dict(cls, data: dict) -> "ReplayScenario":
        state = data.get("initial_state", {})
        return cls(
            threads=tuple(
                (float(t["h"]), float(t.get("minutes", 1.0))) for t in data["threads"]
            ),
            initial_state=EmotionState(
                valence=float(state.get("valence", 0.0)),
                arousal=float(state.get("arousal", 0.0)),
            ),
        )


@dataclass
class ReplayResult:
    """Full-resolution trace plus the state at every thread boundary."""

    trace: SimulationTrace
    boundary_times: np.ndarray
    boundary_states: list[EmotionState]

    def boundary_rows(self) -> list[tuple[float, float, float]]:
        return [
            (float(t), s.valence, s.arousal)
            for t, s in zip(self.boundary_times, self.boundary_states)
        ]

    def write_boundaries_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_minutes", "valence", "arousal"])
            for t, v, a in self.boundary_rows():
                writer.writerow([repr(t), repr(v), repr(a)])


def replay(scenario: ReplayScenario, params: ModelParams, cfg: IntegratorConfig) -> ReplayResult:
    """Integrate the agent through each thread in order; record thread boundaries."""
    if cfg.clamp != params.clamp_states:
        cfg = IntegratorConfig(
            dt=cfg.dt,
            seed=cfg.seed,
            noise_distribution=cfg.noise_distribution,
            clamp=params.clamp_states,
        )
    schedule = [(minutes, h) for h, minutes in scenario.threads]
    trace = integrate(scenario.initial_state, schedule, params, cfg, rng=substream(cfg.seed, 0))
    boundary_idx = [0]
    i = 0
    for minutes, _ in schedule:
        i += int(round(minutes / cfg.dt))
        boundary_idx.append(i)
    times = trace.t_minutes[boundary_idx]
    states = [
        EmotionState(valence=float(trace.valence[i]), arousal=float(trace.arousal[i]))
        for i in boundary_idx
    ]
    return ReplayResult(trace=trace, boundary_times=times, boundary_states=states)


@dataclass(frozen=True)
class ForumScenario:
    """Shared-field simulation: agent count, duration, and field-update constants.

    The field evolves as h' = clip(h * (1 - field_decay * dt) + impact * sum(s), -1, 1)
    where sum(s) adds the polarity of every post produced in the step.
    Agents start at the valence/arousal baselines unless a state is given.
    ``sample_expressions`` turns the posting machinery off entirely, which
    reduces a one-agent, zero-impact run to a plain replay.
    """

    n_agents: int
    duration_minutes: float
    field_decay: float = 0.0
    impact: float = 0.01
    initial_h: float = 0.0
    initial_state: EmotionState | None = None
    sample_expressions: bool = True

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        if self.duration_minutes <= 0:
            raise ValueError("duration_minutes must be > 0")
        if self.field_decay < 0:
            raise ValueError("field_decay must be >= 0")
        if self.impact < 0:
            raise ValueError("impact must be >= 0")
        if not -1.0 <= self.initial_h <= 1.0:
            raise ValueError("initial_h must be in [-1, 1]")
        if not math.isfinite(self.field_decay) or not math.isfinite(self.impact):
            raise ValueError("field parameters must be finite")

    @classmethod
    def from_dict(cls, data: dict) -> "ForumScenario":
        state = None
        if "initial_state" in data:
            state = EmotionState(
                valence=float(data["initial_state"].get("valence", 0.0)),
                arousal=float(data["initial_state"].get("arousal", 0.0)),
            )
        return cls(
            n_agents=int(data["n_agents"]),
            duration_minutes=float(data["duration_minutes"]),
            field_decay=float(data.get("field_decay", 0.0)),
            impact=float(data.get("impact", 0.01)),
            initial_h=float(data.get("initial_h", 0.0)),
            initial_state=state,
            sample_expressions=bool(data.get("sample_expressions", True)),
        )


@dataclass
class FieldTrace:
    """Field value and post count at every step boundary."""

    t_minutes: np.ndarray
    h: np.ndarray
    n_expressions: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_minutes", "h", "n_expressions"])
            for i in range(len(self.t_minutes)):
                writer.writerow(
                    [
                        repr(float(self.t_minutes[i])),
                        repr(float(self.h[i])),
                        int(self.n_expressions[i]),
                    ]
                )


@dataclass
class ForumResult:
    agents: list[SimulationTrace]
    field: FieldTrace


def run_forum(scenario: ForumScenario, params: ModelParams, cfg: IntegratorConfig) -> ForumResult:
    """Simulate coupled agents against a shared field; one substream per agent."""
    dt = cfg.dt
    n_steps = int(round(scenario.duration_minutes / dt))
    if n_steps < 1 or not math.isclose(n_steps * dt, scenario.duration_minutes, rel_tol=1e-9):
        raise ValueError("duration_minutes must be a positive multiple of dt")
    n = scenario.n_agents
    start = scenario.initial_state or EmotionState(
        valence=params.valence.b, arousal=params.arousal.d
    )
    step_cfg = IntegratorConfig(
        dt=dt, seed=cfg.seed, noise_distribution=cfg.noise_distribution, clamp=params.clamp_states
    )
    rngs = [substream(cfg.seed, agent) for agent in range(n)]
    states = [start] * n

    t = np.arange(n_steps + 1) * dt
    valence = np.empty((n, n_steps + 1))
    arousal = np.empty((n, n_steps + 1))
    expressed = np.zeros((n, n_steps + 1), dtype=int)
    s_col = np.full((n, n_steps + 1), math.nan)
    h_col = np.empty(n_steps + 1)
    field_trace = np.empty(n_steps + 1)
    n_expr = np.zeros(n_steps + 1, dtype=int)

    h = float(scenario.initial_h)
    any_post_yet = False
    for agent in range(n):
        valence[agent, 0] = start.valence
        arousal[agent, 0] = start.arousal
    field_trace[0] = h

    for i in range(n_steps):
        h_col[i] = h
        s_sum = 0.0
        events = []
        for agent in range(n):
            states[agent] = step(states[agent], h, params, step_cfg, rngs[agent])
        if scenario.sample_expressions:
            for agent in range(n):
                kind = "reply" if any_post_yet else "first_post"
                event = sample_expression(
                    states[agent],
                    params.expression,
                    rngs[agent],
                    time=(i + 1) * dt,
                    kind=kind,
                    scale=dt,
                )
                if event is not None:
                    any_post_yet = True
                    events.append((agent, event))
                    s_sum += event.polarity
        h = min(1.0, max(-1.0, h * (1.0 - scenario.field_decay * dt) + scenario.impact * s_sum))
        for agent, event in events:
            states[agent] = apply_feedback(states[agent], event, params.expression)
            if params.clamp_states:
                states[agent] = states[agent].clamped()
            expressed[agent, i + 1] = 1
            s_col[agent, i + 1] = event.polarity
        for agent in range(n):
            valence[agent, i + 1] = states[agent].valence
            arousal[agent, i + 1] = states[agent].arousal
        field_trace[i + 1] = h
        n_expr[i + 1] = len(events)
    h_col[n_steps] = h

    traces = [
        SimulationTrace(
            t_minutes=t.copy(),
            valence=valence[agent],
            arousal=arousal[agent],
            h=h_col.copy(),
            expressed=expressed[agent],
            s=s_col[agent],
        )
        for agent in range(n)
    ]
    return ForumResult(
        agents=traces,
        field=FieldTrace(t_minutes=t.copy(), h=field_trace, n_expressions=n_expr),
    )


def load_scenario(path) -> ReplayScenario | ForumScenario:
    """Read a scenario JSON file; dispatches on its "type" key."""
    with open(path) as fh:
        data = json.load(fh)
    kind = data.get("type")
    if kind == "replay":
        return ReplayScenario.from_dict(data)
    if kind == "forum":
        return ForumScenario.from_dict(data)
    raise ValueError(f'scenario "type" must be "replay" or "forum", got {kind!r}')
