"""Synthetic observation data generated from the model's own dynamics.

The bundled reference dataset mimics the shape of the reading
experiments: pre-exposure states live on the Likert-derived grids (13
valence levels from the paired positive/negative scales, 7 arousal
levels), threads are positive/negative/neutral in a 45/45/10 mix, and
one exposure lasts one minute.  Post states follow the exact drift
functions plus Gaussian velocity noise whose scale is tuned so the
velocity fits report roughly the reference R^2 values (~0.52 for
valence, ~0.28 for arousal).

Participation intent accompanies the pre-exposure report: it is drawn
from a Beta distribution whose mean is the hinge rule evaluated at the
(discrete) pre arousal.  The Beta keeps intent inside [0, 1] at a noise
level no bounded Gaussian could reach; its dispersion is tuned for a
hinge-fit R^2 near 0.14.  A subset of records additionally carries
post-content labels sampled from the logistic content channels at the
post-exposure valence.

Run ``python -m affectsim.synthetic --out data`` to regenerate the
bundled CSV byte-for-byte.
"""

from __future__ import annotations

import argparse
from typing import Sequence

import numpy as np

from .estimation import ObservationRecord, save_observations
from .expression import (
    negative_content_probability,
    participation_probability,
    positive_content_probability,
)
from .integrator import substream
from .model import EmotionState, ModelParams, drift_a, drift_v

__all__ = [
    "VALENCE_LEVELS",
    "AROUSAL_LEVELS",
    "SIGMA_V",
    "SIGMA_A",
    "INTENT_PHI",
    "REFERENCE_SEED",
    "REFERENCE_SIZE",
    "reading_records",
    "expression_records",
    "reference_dataset",
]

VALENCE_LEVELS = np.linspace(-1.0, 1.0, 13)
AROUSAL_LEVELS = np.linspace(-1.0, 1.0, 7)
H_VALUES = np.array([-1.0, 0.0, 1.0])
H_PROBS = np.array([0.45, 0.10, 0.45])

# velocity-noise scales tuned on this design for the reference R^2 targets
SIGMA_V = 0.267
SIGMA_A = 0.318
# Beta dispersion of the intent noise, tuned for a hinge R^2 near 0.14
INTENT_PHI = 0.2

REFERENCE_SEED = 31415
REFERENCE_SIZE = 1271
REFERENCE_LABELLED = 182
THREADS_PER_PARTICIPANT = 10


def reading_records(
    n: int,
    rng: np.random.Generator,
    params: ModelParams | None = None,
    sigma_v: float = SIGMA_V,
    sigma_a: float = SIGMA_A,
    with_intent: bool = True,
    intent_phi: float = INTENT_PHI,
) -> list[ObservationRecord]:
    """Draw n one-minute reading exposures from the exact velocity law plus noise."""
    params = params or ModelParams()
    v_pre = rng.choice(VALENCE_LEVELS, size=n)
    a_pre = rng.choice(AROUSAL_LEVELS, size=n)
    h = rng.choice(H_VALUES, size=n, p=H_PROBS)
    records = []
    for i in range(n):
        state = EmotionState(valence=float(v_pre[i]), arousal=float(a_pre[i]))
        dv = drift_v(state, float(h[i]), params.valence) + sigma_v * rng.standard_normal()
        da = drift_a(state, float(h[i]), params.arousal) + sigma_a * rng.standard_normal()
        intent = None
        if with_intent:
            mu = participation_probability(state.arousal, params.expression)
            intent = float(rng.beta(mu * intent_phi, (1.0 - mu) * intent_phi))
        participant = i // THREADS_PER_PARTICIPANT
        records.append(
            ObservationRecord(
                participant_id=f"p{participant:03d}",
                study_id="study1" if participant < 91 else "study2",
                h=float(h[i]),
                v_pre=float(v_pre[i]),
                a_pre=float(a_pre[i]),
                v_post=float(v_pre[i] + dv),
                a_post=float(a_pre[i] + da),
                dt_minutes=1.0,
                participation_intent=intent,
            )
        )
    return records


def expression_records(
    n: int,
    rng: np.random.Generator,
    params: ModelParams | None = None,
) -> list[ObservationRecord]:
    """Draw n post-writing records with content labels from the logistic channels."""
    params = params or ModelParams()
    v_post = rng.choice(VALENCE_LEVELS, size=n)
    a_post = rng.choice(AROUSAL_LEVELS, size=n)
    records = []
    for i in range(n):
        v = float(v_post[i])
        pos = rng.random() < positive_content_probability(v, params.expression)
        neg = rng.random() < negative_content_probability(v, params.expression)
        records.append(
            ObservationRecord(
                participant_id=f"w{i // 4:03d}",
                study_id="study3",
                h=0.0,
                v_pre=v,
                a_pre=float(a_post[i]),
                v_post=v,
                a_post=float(a_post[i]),
                dt_minutes=1.0,
                post_pos=bool(pos),
                post_neg=bool(neg),
                post_kind="first_post" if rng.random() < 0.5 else "reply",
            )
        )
    return records


def _attach_expression_labels(
    records: list[ObservationRecord],
    rng: np.random.Generator,
    params: ModelParams,
    n_labelled: int,
) -> list[ObservationRecord]:
    chosen = set(rng.choice(len(records), size=n_labelled, replace=False).tolist())
    out = []
    for i, r in enumerate(records):
        if i not in chosen:
            out.append(r)
            continue
        pos = rng.random() < positive_content_probability(r.v_post, params.expression)
        neg = rng.random() < negative_content_probability(r.v_post, params.expression)
        out.append(
            ObservationRecord(
                participant_id=r.participant_id,
                study_id=r.study_id,
                h=r.h,
                v_pre=r.v_pre,
                a_pre=r.a_pre,
                v_post=r.v_post,
                a_post=r.a_post,
                dt_minutes=r.dt_minutes,
                participation_intent=r.participation_intent,
                post_pos=bool(pos),
                post_neg=bool(neg),
                post_kind="first_post" if rng.random() < 0.5 else "reply",
            )
        )
    return out


def reference_dataset(
    seed: int = REFERENCE_SEED, size: int = REFERENCE_SIZE
) -> list[ObservationRecord]:
    """The bundled synthetic dataset: reading records with intent, a labelled subset."""
    params = ModelParams()
    rng = substream(seed)
    records = reading_records(size, rng, params=params)
    return _attach_expression_labels(records, rng, params, min(REFERENCE_LABELLED, size))


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="regenerate the bundled synthetic dataset")
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--seed", type=int, default=REFERENCE_SEED)
    parser.add_argument("--size", type=int, default=REFERENCE_SIZE)
    args = parser.parse_args(argv)
    from pathlib import Path

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = reference_dataset(seed=args.seed, size=args.size)
    path = out_dir / "synthetic_observations.csv"
    save_observations(records, path)
    print(f"wrote {len(records)} records to {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
