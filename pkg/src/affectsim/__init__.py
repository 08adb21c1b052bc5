"""Agent-based simulation and estimation of emotion dynamics in online discussions.

The model couples an agent's valence and arousal to the emotional charge
of an online field through relaxation and perception forces, triggers
posting from high arousal, and feeds expression back into the state.
This package integrates those dynamics, replays experiment-style thread
sequences, simulates coupled multi-agent forums, and re-fits every model
component from pre/post observation data.
"""

__version__ = "0.1.0"

from .engine import ForumScenario, ReplayScenario, replay, run_forum
from .estimation import (
    FittedModel,
    ObservationRecord,
    fit_arousal,
    fit_expression,
    fit_participation,
    fit_valence,
    residual_diagnostics,
    select_terms,
    simulate_posterior,
)
from .expression import (
    ExpressionEvent,
    ExpressionParams,
    apply_feedback,
    participation_probability,
    sample_expression,
)
from .integrator import IntegratorConfig, SimulationTrace, integrate, step, substream
from .model import (
    ArousalParams,
    EmotionState,
    ModelParams,
    ValenceParams,
    drift_a,
    drift_v,
    perception_force_a,
    perception_force_v,
)

__all__ = [
    "__version__",
    "ArousalParams",
    "EmotionState",
    "ExpressionEvent",
    "ExpressionParams",
    "FittedModel",
    "ForumScenario",
    "IntegratorConfig",
    "ModelParams",
    "ObservationRecord",
    "ReplayScenario",
    "SimulationTrace",
    "ValenceParams",
    "apply_feedback",
    "drift_a",
    "drift_v",
    "fit_arousal",
    "fit_expression",
    "fit_participation",
    "fit_valence",
    "integrate",
    "participation_probability",
    "perception_force_a",
    "perception_force_v",
    "replay",
    "residual_diagnostics",
    "run_forum",
    "sample_expression",
    "select_terms",
    "simulate_posterior",
    "step",
    "substream",
]
