"""Euler-Maruyama time stepping for the valence/arousal dynamics.

One step advances the state by drift * dt plus noise * sqrt(dt), then
clamps to [-1, 1]^2 when enabled.  The two noise draws per step (valence
first, then arousal) come from a caller-owned ``numpy`` Generator, so a
trace is a pure function of (initial state, schedule, parameters, seed).

Random streams use the counter-based Philox generator.  Independent
substreams for agents or runs are derived by spawning the root seed with
a key, e.g. ``substream(seed, agent_id)``; this keeps batches reproducible
regardless of execution order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import EmotionState, FieldValue, ModelParams, drift_a, drift_v

__all__ = [
    "IntegratorConfig",
    "SimulationTrace",
    "substream",
    "step",
    "integrate",
]

NOISE_DISTRIBUTIONS = ("standard_normal", "uniform_pm1")

TRACE_COLUMNS = ("t_minutes", "valence", "arousal", "h", "expressed", "s")


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size (minutes), seed, noise family, and clamping switch."""

    dt: float = 0.01
    seed: int = 0
    noise_distribution: str = "standard_normal"
    clamp: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.dt <= 1.0):
            raise ValueError(f"dt must be in (0, 1], got {self.dt}")
        if self.noise_distribution not in NOISE_DISTRIBUTIONS:
            raise ValueError(f"noise_distribution must be one of {NOISE_DISTRIBUTIONS}")


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream for (seed, *key); same inputs, same stream."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _draw_noise(rng: np.random.Generator, distribution: str) -> float:
    if distribution == "standard_normal":
        return float(rng.standard_normal())
    # uniform on [-1, 1]; variance 1/3, kept for sensitivity checks
    return float(rng.uniform(-1.0, 1.0))


def step(
    state: EmotionState,
    h: FieldValue,
    params: ModelParams,
    cfg: IntegratorConfig,
    rng: np.random.Generator,
) -> EmotionState:
    """Advance the state by one Euler-Maruyama step of length cfg.dt."""
    dt = cfg.dt
    sqrt_dt = math.sqrt(dt)
    xi_v = _draw_noise(rng, cfg.noise_distribution)
    xi_a = _draw_noise(rng, cfg.noise_distribution)
    v = state.valence + drift_v(state, h, params.valence) * dt + params.valence.A_v * xi_v * sqrt_dt
    a = state.arousal + drift_a(state, h, params.arousal) * dt + params.arousal.A_a * xi_a * sqrt_dt
    assert math.isfinite(v) and math.isfinite(a), "integrator produced non-finite state"
    out = EmotionState(valence=v, arousal=a)
    return out.clamped() if cfg.clamp else out


@dataclass
class SimulationTrace:
    """Time-indexed record of one agent: state, field in force, expression events.

    ``expressed`` is 0/1 per boundary; ``s`` is the polarity of the event
    (+1 positive-only, -1 negative-only, 0 mixed/neutral) and NaN when no
    event occurred.
    """

    t_minutes: np.ndarray
    valence: np.ndarray
    arousal: np.ndarray
    h: np.ndarray
    expressed: np.ndarray
    s: np.ndarray

    def __len__(self) -> int:
        return len(self.t_minutes)

    def final_state(self) -> EmotionState:
        return EmotionState(valence=float(self.valence[-1]), arousal=float(self.arousal[-1]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for i in range(len(self)):
                s_val = self.s[i]
                writer.writerow(
                    [
                        repr(float(self.t_minutes[i])),
                        repr(float(self.valence[i])),
                        repr(float(self.arousal[i])),
                        repr(float(self.h[i])),
                        int(self.expressed[i]),
                        "" if math.isnan(s_val) else repr(float(s_val)),
                    ]
                )

    @classmethod
    def from_csv(cls, path) -> "SimulationTrace":
        cols: dict[str, list] = {name: [] for name in TRACE_COLUMNS}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != list(TRACE_COLUMNS):
                raise ValueError(f"unexpected trace header: {reader.fieldnames}")
            for row in reader:
                for name in TRACE_COLUMNS:
                    cols[name].append(row[name])
        n = len(cols["t_minutes"])
        return cls(
            t_minutes=np.array([float(x) for x in cols["t_minutes"]]),
            valence=np.array([float(x) for x in cols["valence"]]),
            arousal=np.array([float(x) for x in cols["arousal"]]),
            h=np.array([float(x) for x in cols["h"]]),
            expressed=np.array([int(x) for x in cols["expressed"]], dtype=int),
            s=np.array([float(x) if x else math.nan for x in cols["s"]]),
        )


def _segment_steps(duration: float, dt: float) -> int:
    n = int(round(duration / dt))
    if n < 1 or not math.isclose(n * dt, duration, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(f"duration {duration} is not a positive multiple of dt={dt}")
    return n


def integrate(
    state0: EmotionState,
    field_schedule: Sequence[tuple[float, FieldValue]],
    params: ModelParams,
    cfg: IntegratorConfig,
    rng: np.random.Generator | None = None,
) -> SimulationTrace:
    """Drive ``step`` through a schedule of (duration_minutes, h) segments.

    The trace holds the state at every step boundary, including t=0; its
    length is total_duration/dt + 1.  Row i carries the field value applied
    during the step that starts at t_i (the last row repeats the final h).
    """
    schedule = list(field_schedule)
    if not schedule:
        raise ValueError("field schedule must not be empty")
    for duration, _ in schedule:
        if duration <= 0:
            raise ValueError(f"durations must be > 0, got {duration}")
    if rng is None:
        rng = substream(cfg.seed)

    counts = [_segment_steps(duration, cfg.dt) for duration, _ in schedule]
    total = sum(counts)
    t = np.empty(total + 1)
    valence = np.empty(total + 1)
    arousal = np.empty(total + 1)
    h_col = np.empty(total + 1)
    state = state0
    t[0], valence[0], arousal[0] = 0.0, state.valence, state.arousal
    i = 0
    for (duration, h), n_steps in zip(schedule, counts):
        for _ in range(n_steps):
            h_col[i] = h
            state = step(state, h, params, cfg, rng)
            i += 1
            t[i] = i * cfg.dt
            valence[i] = state.valence
            arousal[i] = state.arousal
    h_col[total] = schedule[-1][1]
    return SimulationTrace(
        t_minutes=t,
        valence=valence,
        arousal=arousal,
        h=h_col,
        expressed=np.zeros(total + 1, dtype=int),
        s=np.full(total + 1, math.nan),
    )
