"""Posting behaviour: participation tendency, post polarity, and feedback.

High arousal drives the tendency to write a post; the hinge rule

    P(participate) = clamp(p0 + alpha * a * H(a - tau), 0, 1)

is flat at ``p0`` below the activation knot ``tau`` and grows linearly
with arousal above it (``H`` is the Heaviside step with H(0) = 0, so the
hinge contributes nothing exactly at the knot).

When a post is produced, its positive and negative content are sampled
as independent logistic channels of the writer's valence; a post may
carry both polarities at once.  Writing feeds back on the writer: arousal
shrinks toward zero (a full reset, or a proportional contraction), and a
reply written at negative valence lifts valence toward zero as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import EmotionState

__all__ = [
    "ExpressionParams",
    "ExpressionEvent",
    "participation_probability",
    "positive_content_probability",
    "negative_content_probability",
    "sample_expression",
    "apply_feedback",
]

FEEDBACK_MODES = ("reset_zero", "proportional")
POLARITY_MODES = ("logistic", "deterministic_sign")


@dataclass(frozen=True)
class ExpressionParams:
    """Participation hinge, content-channel coefficients, and feedback rule."""

    p0: float = 0.199
    alpha: float = 0.438
    tau: float = 0.0
    pos_intercept: float = -0.4203
    pos_slope_v: float = 0.9462
    neg_intercept: float = 0.2194
    neg_slope_v: float = -0.9777
    feedback_mode: str = "proportional"
    feedback_lambda: float = 0.5
    # "logistic" samples both content channels; "deterministic_sign" sets the
    # polarity to sign(valence) instead.
    polarity_mode: str = "logistic"

    def __post_init__(self) -> None:
        if not 0.0 <= self.feedback_lambda <= 1.0:
            raise ValueError(f"feedback_lambda must be in [0, 1], got {self.feedback_lambda}")
        if self.feedback_mode not in FEEDBACK_MODES:
            raise ValueError(f"feedback_mode must be one of {FEEDBACK_MODES}")
        if self.polarity_mode not in POLARITY_MODES:
            raise ValueError(f"polarity_mode must be one of {POLARITY_MODES}")


@dataclass(frozen=True)
class ExpressionEvent:
    """One produced post: when, first post or reply, and which polarities it carries."""

    time: float
    kind: str  # "first_post" | "reply"
    has_positive: bool
    has_negative: bool

    @property
    def polarity(self) -> float:
        """+1 for positive-only content, -1 for negative-only, 0 for mixed/neutral."""
        if self.has_positive and not self.has_negative:
            return 1.0
        if self.has_negative and not self.has_positive:
            return -1.0
        return 0.0


def _logistic(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def participation_probability(a: float, p: ExpressionParams) -> float:
    """Probability of posting given arousal, clamped to [0, 1]; H(0) = 0."""
    hinge = p.alpha * a if a > p.tau else 0.0
    return min(1.0, max(0.0, p.p0 + hinge))


def positive_content_probability(v: float, p: ExpressionParams) -> float:
    """P(post carries positive content | valence)."""
    return _logistic(p.pos_intercept + p.pos_slope_v * v)


def negative_content_probability(v: float, p: ExpressionParams) -> float:
    """P(post carries negative content | valence)."""
    return _logistic(p.neg_intercept + p.neg_slope_v * v)


def sample_expression(
    state: EmotionState,
    p: ExpressionParams,
    rng: np.random.Generator,
    *,
    time: float = 0.0,
    kind: str = "first_post",
    scale: float = 1.0,
) -> ExpressionEvent | None:
    """Sample one posting opportunity; returns the event or None.

    ``scale`` multiplies the participation probability so callers that poll
    many times per minute can turn the per-opportunity tendency into a rate
    (the forum engine passes its step size).
    """
    prob = participation_probability(state.arousal, p) * scale
    if rng.random() >= prob:
        return None
    if p.polarity_mode == "deterministic_sign":
        has_pos = state.valence > 0
        has_neg = state.valence < 0
    else:
        has_pos = rng.random() < positive_content_probability(state.valence, p)
        has_neg = rng.random() < negative_content_probability(state.valence, p)
    return ExpressionEvent(time=time, kind=kind, has_positive=has_pos, has_negative=has_neg)


def apply_feedback(state: EmotionState, event: ExpressionEvent, p: ExpressionParams) -> EmotionState:
    """Post-expression regulation of the writer's state.

    Arousal is reset to zero or contracted by ``feedback_lambda`` depending
    on the configured mode; replying at negative valence contracts valence
    by the same factor.  Feedback never pushes a coordinate away from zero.
    """
    if p.feedback_mode == "reset_zero":
        arousal = 0.0
    else:
        arousal = p.feedback_lambda * state.arousal
    valence = state.valence
    if event.kind == "reply" and valence < 0:
        valence = p.feedback_lambda * valence
    return EmotionState(valence=valence, arousal=arousal)
