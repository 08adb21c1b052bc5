"""Core state types, parameters, and deterministic drift functions.

An agent's emotional state is a point (valence, arousal) in [-1, 1]^2.
Both coordinates feel two deterministic forces:

* an exponential relaxation toward a baseline (the eigendynamics), and
* a perception force driven by the emotional charge ``h`` of the online
  field the agent is reading.  Valence responds to the sign of ``h``,
  arousal only to its magnitude ``|h|``.

The perception forces are cubic polynomials in the current state.  All
rates are per minute.  Default parameter values are the bundled reference
calibration; the noise amplitudes ``A_v``/``A_a`` are calibration
constants measured as the residual standard deviations of the bundled
synthetic dataset, not fitted quantities.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

__all__ = [
    "FieldValue",
    "EmotionState",
    "ValenceParams",
    "ArousalParams",
    "ModelParams",
    "perception_force_v",
    "perception_force_a",
    "drift_v",
    "drift_a",
]

# Emotional charge of the online field: -1/0/+1 in experiment replays,
# continuous in [-1, 1] for multi-agent runs.
FieldValue = float

# Residual standard deviations of the bundled synthetic reference dataset
# (data/synthetic_observations.csv); see affectsim.synthetic.
DEFAULT_NOISE_V = 0.2665
DEFAULT_NOISE_A = 0.3235


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class EmotionState:
    """Instantaneous valence and arousal of one agent, both dimensionless."""

    valence: float
    arousal: float

    def __post_init__(self) -> None:
        _require_finite("valence", self.valence)
        _require_finite("arousal", self.arousal)

    def clamped(self) -> "EmotionState":
        """Return a copy with both coordinates clipped to [-1, 1]."""
        return EmotionState(
            valence=min(1.0, max(-1.0, self.valence)),
            arousal=min(1.0, max(-1.0, self.arousal)),
        )


@dataclass(frozen=True)
class ValenceParams:
    """Relaxation, baseline, perception polynomial, and noise amplitude for valence."""

    gamma_v: float = 0.367
    b: float = 0.056
    b0: float = 0.14
    b1: float = 0.0
    b2: float = 0.057
    b3: float = -0.047
    A_v: float = DEFAULT_NOISE_V

    def __post_init__(self) -> None:
        for f in fields(self):
            _require_finite(f.name, getattr(self, f.name))
        if self.gamma_v <= 0:
            raise ValueError(f"gamma_v must be > 0, got {self.gamma_v}")
        if self.A_v < 0:
            raise ValueError(f"A_v must be >= 0, got {self.A_v}")


@dataclass(frozen=True)
class ArousalParams:
    """Relaxation, baseline, perception polynomial, and noise amplitude for arousal."""

    gamma_a: float = 0.414
    d: float = -0.442
    d0: float = 0.178
    d1: float = 0.14469
    d2: float = 0.0
    d3: float = 0.0
    A_a: float = DEFAULT_NOISE_A

    def __post_init__(self) -> None:
        for f in fields(self):
            _require_finite(f.name, getattr(self, f.name))
        if self.gamma_a <= 0:
            raise ValueError(f"gamma_a must be > 0, got {self.gamma_a}")
        if self.A_a < 0:
            raise ValueError(f"A_a must be >= 0, got {self.A_a}")


def _default_expression():
    from .expression import ExpressionParams

    return ExpressionParams()


@dataclass(frozen=True)
class ModelParams:
    """Aggregate of all model constants plus the state-clamping switch."""

    valence: ValenceParams = field(default_factory=ValenceParams)
    arousal: ArousalParams = field(default_factory=ArousalParams)
    expression: "ExpressionParams" = field(default_factory=_default_expression)  # noqa: F821
    clamp_states: bool = True

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        """Build from a (possibly partial) dict; missing fields keep defaults."""
        from .expression import ExpressionParams

        def build(klass, payload):
            if payload is None:
                return klass()
            known = {f.name for f in fields(klass)}
            extra = set(payload) - known
            if extra:
                raise ValueError(f"unknown {klass.__name__} fields: {sorted(extra)}")
            return klass(**payload)

        known = {"valence", "arousal", "expression", "clamp_states"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown ModelParams fields: {sorted(extra)}")
        return cls(
            valence=build(ValenceParams, data.get("valence")),
            arousal=build(ArousalParams, data.get("arousal")),
            expression=build(ExpressionParams, data.get("expression")),
            clamp_states=bool(data.get("clamp_states", True)),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))


def perception_force_v(h: FieldValue, v: float, p: ValenceParams) -> float:
    """Valence perception force: h * (b0 + b1 v + b2 v^2 + b3 v^3)."""
    return h * (p.b0 + p.b1 * v + p.b2 * v * v + p.b3 * v * v * v)


def perception_force_a(h: FieldValue, a: float, p: ArousalParams) -> float:
    """Arousal perception force: |h| * (d0 + d1 a + d2 a^2 + d3 a^3).

    Symmetric in the sign of h: emotional content excites arousal
    regardless of its polarity.
    """
    return abs(h) * (p.d0 + p.d1 * a + p.d2 * a * a + p.d3 * a * a * a)


def drift_v(state: EmotionState, h: FieldValue, p: ValenceParams) -> float:
    """Deterministic valence velocity: relaxation toward b plus perception force."""
    return -p.gamma_v * (state.valence - p.b) + perception_force_v(h, state.valence, p)


def drift_a(state: EmotionState, h: FieldValue, p: ArousalParams) -> float:
    """Deterministic arousal velocity: relaxation toward d plus perception force."""
    return -p.gamma_a * (state.arousal - p.d) + perception_force_a(h, state.arousal, p)
