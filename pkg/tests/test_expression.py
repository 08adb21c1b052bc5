import math

import pytest
from hypothesis import given, strategies as st

from affectsim.expression import (
    ExpressionEvent,
    ExpressionParams,
    apply_feedback,
    negative_content_probability,
    participation_probability,
    positive_content_probability,
    sample_expression,
)
from affectsim.integrator import substream
from affectsim.model import EmotionState

P = ExpressionParams()

arousals = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


class TestParams:
    def test_defaults(self):
        assert (P.p0, P.alpha, P.tau) == (0.199, 0.438, 0.0)
        assert (P.pos_intercept, P.pos_slope_v) == (-0.4203, 0.9462)
        assert (P.neg_intercept, P.neg_slope_v) == (0.2194, -0.9777)
        assert P.feedback_mode == "proportional"
        assert P.feedback_lambda == 0.5

    def test_validation(self):
        with pytest.raises(ValueError):
            ExpressionParams(feedback_lambda=1.5)
        with pytest.raises(ValueError):
            ExpressionParams(feedback_mode="bounce")
        with pytest.raises(ValueError):
            ExpressionParams(polarity_mode="random")


class TestParticipationProbability:
    def test_below_threshold_is_ground_level(self):
        assert participation_probability(-1.0, P) == 0.199

    def test_at_the_knot_hinge_contributes_zero(self):
        assert participation_probability(0.0, P) == 0.199

    def test_above_threshold_grows_linearly(self):
        assert participation_probability(0.5, P) == pytest.approx(0.199 + 0.438 * 0.5, abs=1e-12)

    @given(a=arousals)
    def test_bounded_and_monotone_structure(self, a):
        prob = participation_probability(a, P)
        assert 0.0 <= prob <= 1.0
        if a <= P.tau:
            assert prob == P.p0

    @given(a1=arousals, a2=arousals)
    def test_non_decreasing(self, a1, a2):
        lo, hi = sorted((a1, a2))
        assert participation_probability(lo, P) <= participation_probability(hi, P)

    def test_clamped_to_one_for_extreme_params(self):
        params = ExpressionParams(p0=0.9, alpha=2.0)
        assert participation_probability(1.0, params) == 1.0


class TestContentChannels:
    def test_neutral_valence_probabilities(self):
        assert positive_content_probability(0.0, P) == pytest.approx(sigmoid(-0.4203), abs=1e-12)
        assert negative_content_probability(0.0, P) == pytest.approx(sigmoid(0.2194), abs=1e-12)
        assert positive_content_probability(0.0, P) == pytest.approx(0.3964, abs=1e-4)
        assert negative_content_probability(0.0, P) == pytest.approx(0.5546, abs=1e-4)

    def test_full_valence_positive_probability(self):
        assert positive_content_probability(1.0, P) == pytest.approx(0.6285, abs=1e-4)

    def test_positive_channel_increasing_in_valence(self):
        grid = [i / 10 for i in range(-10, 11)]
        probs = [positive_content_probability(v, P) for v in grid]
        assert all(b > a for a, b in zip(probs, probs[1:]))

    @given(v=st.floats(min_value=-1, max_value=1, allow_nan=False))
    def test_channels_individually_bounded(self, v):
        assert 0.0 <= positive_content_probability(v, P) <= 1.0
        assert 0.0 <= negative_content_probability(v, P) <= 1.0


class TestSampleExpression:
    def test_polarity_frequencies_match_channels(self):
        rng = substream(99)
        state = EmotionState(0.0, 1.0)  # participate with certainty is not needed
        n, pos, neg, events = 20000, 0, 0, 0
        for _ in range(n):
            event = sample_expression(state, P, rng)
            if event is not None:
                events += 1
                pos += event.has_positive
                neg += event.has_negative
        p_expr = participation_probability(1.0, P)
        assert events / n == pytest.approx(p_expr, abs=0.01)
        assert pos / events == pytest.approx(sigmoid(-0.4203), abs=0.02)
        assert neg / events == pytest.approx(sigmoid(0.2194), abs=0.02)

    def test_scale_turns_probability_into_rate(self):
        rng = substream(5)
        state = EmotionState(0.0, 0.0)
        n = 20000
        events = sum(
            sample_expression(state, P, rng, scale=0.01) is not None for _ in range(n)
        )
        assert events / n == pytest.approx(0.199 * 0.01, abs=5e-4)

    def test_deterministic_sign_mode(self):
        params = ExpressionParams(polarity_mode="deterministic_sign", p0=1.0)
        rng = substream(1)
        event = sample_expression(EmotionState(0.8, 0.0), params, rng)
        assert event.has_positive and not event.has_negative
        event = sample_expression(EmotionState(-0.8, 0.0), params, rng)
        assert event.has_negative and not event.has_positive
        event = sample_expression(EmotionState(0.0, 0.0), params, rng)
        assert not event.has_positive and not event.has_negative

    def test_event_metadata_passed_through(self):
        params = ExpressionParams(p0=1.0)
        event = sample_expression(
            EmotionState(0, 0), params, substream(2), time=3.5, kind="reply"
        )
        assert event.time == 3.5
        assert event.kind == "reply"


class TestPolarity:
    def test_polarity_values(self):
        mk = lambda p, n: ExpressionEvent(0.0, "first_post", p, n).polarity
        assert mk(True, False) == 1.0
        assert mk(False, True) == -1.0
        assert mk(True, True) == 0.0
        assert mk(False, False) == 0.0


class TestFeedback:
    def test_reset_zeroes_arousal(self):
        params = ExpressionParams(feedback_mode="reset_zero")
        event = ExpressionEvent(0.0, "first_post", True, False)
        out = apply_feedback(EmotionState(0.3, 0.8), event, params)
        assert out.arousal == 0.0
        assert out.valence == 0.3

    def test_proportional_contracts_arousal(self):
        event = ExpressionEvent(0.0, "first_post", True, False)
        assert apply_feedback(EmotionState(0, 0.8), event, P).arousal == pytest.approx(0.4)
        assert apply_feedback(EmotionState(0, -0.6), event, P).arousal == pytest.approx(-0.3)

    def test_neutral_arousal_unchanged(self):
        event = ExpressionEvent(0.0, "reply", False, True)
        for mode in ("reset_zero", "proportional"):
            params = ExpressionParams(feedback_mode=mode)
            assert apply_feedback(EmotionState(0.5, 0.0), event, params).arousal == 0.0

    def test_reply_lifts_negative_valence(self):
        event = ExpressionEvent(0.0, "reply", False, True)
        out = apply_feedback(EmotionState(-0.6, 0.2), event, P)
        assert out.valence == pytest.approx(-0.3)

    def test_first_post_leaves_valence_alone(self):
        event = ExpressionEvent(0.0, "first_post", False, True)
        out = apply_feedback(EmotionState(-0.6, 0.2), event, P)
        assert out.valence == -0.6

    def test_reply_with_positive_valence_unchanged(self):
        event = ExpressionEvent(0.0, "reply", True, False)
        out = apply_feedback(EmotionState(0.6, 0.2), event, P)
        assert out.valence == 0.6

    @given(
        a=arousals,
        v=st.floats(min_value=-1, max_value=1, allow_nan=False),
        lam=st.floats(min_value=0, max_value=1, allow_nan=False),
        mode=st.sampled_from(["reset_zero", "proportional"]),
        kind=st.sampled_from(["first_post", "reply"]),
    )
    def test_feedback_never_excites(self, a, v, lam, mode, kind):
        params = ExpressionParams(feedback_mode=mode, feedback_lambda=lam)
        event = ExpressionEvent(0.0, kind, True, True)
        out = apply_feedback(EmotionState(v, a), event, params)
        assert abs(out.arousal) <= abs(a) + 1e-15
        assert abs(out.valence) <= abs(v) + 1e-15
        if mode == "reset_zero":
            assert out.arousal == 0.0
        elif a != 0.0 and out.arousal != 0.0:
            assert math.copysign(1, out.arousal) == math.copysign(1, a)
