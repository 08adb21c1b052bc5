import json
import math

import numpy as np
import pytest

from affectsim.engine import (
    ForumScenario,
    ReplayScenario,
    load_scenario,
    replay,
    run_forum,
)
from affectsim.integrator import IntegratorConfig, integrate, substream
from affectsim.model import EmotionState, ModelParams, drift_a, drift_v


class TestReplayScenario:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ReplayScenario(threads=())

    def test_rejects_field_outside_levels(self):
        with pytest.raises(ValueError):
            ReplayScenario(threads=((0.5, 1.0),))

    def test_rejects_nonpositive_exposure(self):
        with pytest.raises(ValueError):
            ReplayScenario(threads=((1.0, 0.0),))


class TestReplay:
    def test_neutral_thread_relaxes_toward_baseline(self, quiet_params):
        scenario = ReplayScenario(threads=((0.0, 1.0),), initial_state=EmotionState(1.0, 0.0))
        result = replay(scenario, quiet_params, IntegratorConfig(dt=0.01))
        v0 = result.boundary_states[0].valence
        v1 = result.boundary_states[1].valence
        assert v1 < v0
        assert v1 > quiet_params.valence.b

    def test_positive_thread_signs_from_neutral_start(self, quiet_params):
        scenario = ReplayScenario(threads=((1.0, 1.0),), initial_state=EmotionState(0.0, 0.0))
        result = replay(scenario, quiet_params, IntegratorConfig(dt=0.01))
        dv = result.boundary_states[1].valence - result.boundary_states[0].valence
        da = result.boundary_states[1].arousal - result.boundary_states[0].arousal
        assert dv > 0
        assert da < 0  # the arousal drift at a=0 under |h|=1 is slightly negative

    def test_seven_thread_sequence_signs(self, quiet_params):
        # drift-sign oracle: inside the moderate-valence band the boundary
        # movement of valence follows the thread's polarity
        threads = ((1.0, 1.0), (-1.0, 1.0), (1.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (1.0, 1.0), (-1.0, 1.0))
        scenario = ReplayScenario(threads=threads, initial_state=EmotionState(0.0, -0.442))
        result = replay(scenario, quiet_params, IntegratorConfig(dt=0.001))
        for i, (h, _) in enumerate(threads):
            v_start = result.boundary_states[i].valence
            dv = result.boundary_states[i + 1].valence - v_start
            if h != 0.0 and abs(v_start) <= 0.5:
                assert math.copysign(1.0, dv) == math.copysign(1.0, h)
                # cross-check against the instantaneous drift at the start
                drift = drift_v(result.boundary_states[i], h, quiet_params.valence)
                assert math.copysign(1.0, drift) == math.copysign(1.0, h)

    def test_boundary_count(self, quiet_params):
        scenario = ReplayScenario(threads=((1.0, 1.0), (0.0, 2.0)))
        result = replay(scenario, quiet_params, IntegratorConfig(dt=0.01))
        assert len(result.boundary_states) == 3
        assert result.boundary_times[-1] == pytest.approx(3.0)

    def test_noiseless_replay_deterministic(self, quiet_params):
        scenario = ReplayScenario(threads=((1.0, 1.0), (-1.0, 1.0)))
        a = replay(scenario, quiet_params, IntegratorConfig(dt=0.01, seed=1))
        b = replay(scenario, quiet_params, IntegratorConfig(dt=0.01, seed=2))
        assert np.array_equal(a.trace.valence, b.trace.valence)


class TestForumScenario:
    def test_validation(self):
        with pytest.raises(ValueError):
            ForumScenario(n_agents=0, duration_minutes=1.0)
        with pytest.raises(ValueError):
            ForumScenario(n_agents=1, duration_minutes=0.0)
        with pytest.raises(ValueError):
            ForumScenario(n_agents=1, duration_minutes=1.0, field_decay=-1.0)
        with pytest.raises(ValueError):
            ForumScenario(n_agents=1, duration_minutes=1.0, initial_h=2.0)


class TestRunForum:
    def test_decoupled_limit_matches_replay(self, default_params):
        scenario = ForumScenario(
            n_agents=1,
            duration_minutes=2.0,
            impact=0.0,
            initial_h=0.0,
            initial_state=EmotionState(0.4, 0.2),
            sample_expressions=False,
        )
        cfg = IntegratorConfig(dt=0.01, seed=11)
        forum = run_forum(scenario, default_params, cfg)
        rep = replay(
            ReplayScenario(threads=((0.0, 2.0),), initial_state=EmotionState(0.4, 0.2)),
            default_params,
            cfg,
        )
        assert np.array_equal(forum.agents[0].valence, rep.trace.valence)
        assert np.array_equal(forum.agents[0].arousal, rep.trace.arousal)

    def test_frozen_field(self, default_params):
        scenario = ForumScenario(
            n_agents=3, duration_minutes=1.0, field_decay=0.0, impact=0.0, initial_h=1.0
        )
        result = run_forum(scenario, default_params, IntegratorConfig(dt=0.01, seed=0))
        assert np.all(result.field.h == 1.0)

    def test_field_stays_in_bounds(self, default_params):
        scenario = ForumScenario(
            n_agents=20, duration_minutes=5.0, field_decay=0.0, impact=0.5, initial_h=0.9
        )
        result = run_forum(scenario, default_params, IntegratorConfig(dt=0.02, seed=3))
        assert result.field.h.max() <= 1.0
        assert result.field.h.min() >= -1.0

    def test_impact_zero_agents_uncorrelated(self, default_params):
        scenario = ForumScenario(
            n_agents=2, duration_minutes=100.0, impact=0.0, sample_expressions=False
        )
        result = run_forum(scenario, default_params, IntegratorConfig(dt=0.01, seed=101))
        r = np.corrcoef(result.agents[0].valence, result.agents[1].valence)[0, 1]
        assert abs(r) < 0.1

    def test_expression_events_recorded_and_feedback_applied(self, default_params):
        scenario = ForumScenario(
            n_agents=5, duration_minutes=10.0, field_decay=0.2, impact=0.05
        )
        result = run_forum(scenario, default_params, IntegratorConfig(dt=0.05, seed=21))
        total_events = sum(int(t.expressed.sum()) for t in result.agents)
        assert total_events == int(result.field.n_expressions.sum())
        assert total_events > 0
        for trace in result.agents:
            idx = np.nonzero(trace.expressed)[0]
            for i in idx:
                assert not math.isnan(trace.s[i])
                assert trace.s[i] in (-1.0, 0.0, 1.0)

    def test_first_event_is_first_post(self, default_params):
        scenario = ForumScenario(n_agents=5, duration_minutes=10.0, impact=0.01)
        cfg = IntegratorConfig(dt=0.05, seed=21)
        # rerun and collect event kinds through the per-agent traces is not
        # possible (kind is not in the csv), so probe via the engine module
        from affectsim import engine as eng

        captured = []
        original = eng.sample_expression

        def spy(state, p, rng, **kwargs):
            event = original(state, p, rng, **kwargs)
            if event is not None:
                captured.append(event)
            return event

        eng.sample_expression = spy
        try:
            run_forum(scenario, default_params, cfg)
        finally:
            eng.sample_expression = original
        assert captured, "expected at least one expression event"
        assert captured[0].kind == "first_post"
        assert all(e.kind == "reply" for e in captured[1:])

    def test_deterministic_given_seed(self, default_params):
        scenario = ForumScenario(n_agents=4, duration_minutes=3.0, impact=0.02)
        cfg = IntegratorConfig(dt=0.02, seed=8)
        a = run_forum(scenario, default_params, cfg)
        b = run_forum(scenario, default_params, cfg)
        for ta, tb in zip(a.agents, b.agents):
            assert np.array_equal(ta.valence, tb.valence)
            assert np.array_equal(np.nan_to_num(ta.s), np.nan_to_num(tb.s))
        assert np.array_equal(a.field.h, b.field.h)

    def test_pulse_raises_mean_arousal(self, default_params):
        # batch oracle: a one-minute emotional pulse lifts the 50-agent mean
        # arousal over its pre-pulse level (forced by the positive constant
        # term of the arousal perception force).  With impact=0 the forum
        # decouples to per-agent integration, so the exogenous pulse is
        # applied as a field schedule on the same per-agent substreams.
        rises = 0
        for seed in range(100):
            deltas = []
            for agent in range(50):
                trace = integrate(
                    EmotionState(default_params.valence.b, default_params.arousal.d),
                    [(1.0, 0.0), (1.0, 1.0)],
                    default_params,
                    IntegratorConfig(dt=0.05, seed=seed),
                    rng=substream(seed, agent),
                )
                n_pre = 20
                deltas.append(trace.arousal[n_pre:].mean() - trace.arousal[:n_pre].mean())
            rises += np.mean(deltas) > 0
        assert rises >= 95  # one-sided Monte Carlo check over 100 seeds


class TestScenarioIO:
    def test_load_replay(self, tmp_path):
        path = tmp_path / "r.json"
        path.write_text(
            json.dumps(
                {
                    "type": "replay",
                    "initial_state": {"valence": 0.1, "arousal": -0.2},
                    "threads": [{"h": 1, "minutes": 2.0}, {"h": 0}],
                }
            )
        )
        scenario = load_scenario(path)
        assert isinstance(scenario, ReplayScenario)
        assert scenario.threads == ((1.0, 2.0), (0.0, 1.0))
        assert scenario.initial_state == EmotionState(0.1, -0.2)

    def test_load_forum(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(
            json.dumps(
                {
                    "type": "forum",
                    "n_agents": 7,
                    "duration_minutes": 4.0,
                    "field_decay": 0.3,
                    "impact": 0.02,
                    "initial_h": -0.5,
                }
            )
        )
        scenario = load_scenario(path)
        assert isinstance(scenario, ForumScenario)
        assert scenario.n_agents == 7
        assert scenario.initial_h == -0.5

    def test_unknown_type_rejected(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text('{"type": "party"}')
        with pytest.raises(ValueError):
            load_scenario(path)

    def test_bundled_scenarios_load(self, data_dir):
        assert isinstance(load_scenario(data_dir / "scenarios" / "study2_replay.json"), ReplayScenario)
        assert isinstance(load_scenario(data_dir / "scenarios" / "forum_small.json"), ForumScenario)
