"""Raw Likert report ingestion: validation, rescaling, and pre/post pairing.

A raw row is one emotional report given right after reading one thread:
positive and negative affect and excitation on 7-point scales, plus the
thread's polarity.  Rescaling maps reports onto the model scales:

    v = (likert_pos - likert_neg) / 6        in [-1, 1]
    a = (likert_arousal - 4) / 3             in [-1, 1]
    h = +1 / -1 / 0  for pos / neg / neu threads

Rescaling is row-by-row and total: every input row yields either one
rescaled report or a line-numbered error, never a silent drop.  Pairing
then turns consecutive reports of the same participant into estimation
records (previous report = pre state, current report = post state, the
current thread's polarity as the field); the first report of each
participant seeds the first pair, so pairing emits n - #participants
records and says so.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .estimation import ObservationRecord

__all__ = [
    "RawLikertRow",
    "RescaledReport",
    "IngestError",
    "rescale",
    "read_raw_csv",
    "pair_reports",
    "write_reports_csv",
]

POLARITY_TO_FIELD = {"pos": 1.0, "neg": -1.0, "neu": 0.0}

RAW_COLUMNS = (
    "participant_id",
    "study_id",
    "thread_index",
    "likert_pos",
    "likert_neg",
    "likert_arousal",
    "thread_polarity",
)

REPORT_COLUMNS = ("participant_id", "study_id", "thread_index", "v", "a", "h")


class IngestError(ValueError):
    """Raw-data validation failure; message carries the offending line numbers."""


@dataclass(frozen=True)
class RawLikertRow:
    """One raw report: three 7-point Likert answers plus thread metadata."""

    participant_id: str
    study_id: str
    thread_index: int
    likert_pos: int
    likert_neg: int
    likert_arousal: int
    thread_polarity: str

    def __post_init__(self) -> None:
        for name in ("likert_pos", "likert_neg", "likert_arousal"):
            value = getattr(self, name)
            if not 1 <= value <= 7:
                raise IngestError(f"{name} must be in 1..7, got {value}")
        if self.thread_polarity not in POLARITY_TO_FIELD:
            raise IngestError(
                f"thread_polarity must be pos, neg or neu, got {self.thread_polarity!r}"
            )


@dataclass(frozen=True)
class RescaledReport:
    participant_id: str
    study_id: str
    thread_index: int
    v: float
    a: float
    h: float


def rescale(row: RawLikertRow) -> RescaledReport:
    """Map one raw report onto the model scales."""
    return RescaledReport(
        participant_id=row.participant_id,
        study_id=row.study_id,
        thread_index=row.thread_index,
        v=(row.likert_pos - row.likert_neg) / 6.0,
        a=(row.likert_arousal - 4) / 3.0,
        h=POLARITY_TO_FIELD[row.thread_polarity],
    )


def read_raw_csv(path) -> list[RescaledReport]:
    """Read and rescale a raw Likert CSV; raises with every bad line listed."""
    reports = []
    errors = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file")
        missing = set(RAW_COLUMNS) - set(reader.fieldnames)
        if missing:
            raise IngestError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                raw = RawLikertRow(
                    participant_id=row["participant_id"],
                    study_id=row["study_id"],
                    thread_index=int(row["thread_index"]),
                    likert_pos=int(row["likert_pos"]),
                    likert_neg=int(row["likert_neg"]),
                    likert_arousal=int(row["likert_arousal"]),
                    thread_polarity=row["thread_polarity"],
                )
            except (IngestError, ValueError) as exc:
                errors.append(f"{path}:{lineno}: {exc}")
                continue
            reports.append(rescale(raw))
    if errors:
        raise IngestError("; ".join(errors))
    return reports


def pair_reports(
    reports: list[RescaledReport], dt_minutes: float = 1.0
) -> list[ObservationRecord]:
    """Pair consecutive reports per participant into estimation records.

    Input order is preserved within each participant; the first report of
    a participant only supplies the pre state of their first record.
    """
    by_participant: dict[tuple[str, str], list[RescaledReport]] = {}
    for report in reports:
        by_participant.setdefault((report.study_id, report.participant_id), []).append(report)
    records = []
    for (study_id, participant_id), group in by_participant.items():
        for prev, cur in zip(group, group[1:]):
            records.append(
                ObservationRecord(
                    participant_id=participant_id,
                    study_id=study_id,
                    h=cur.h,
                    v_pre=prev.v,
                    a_pre=prev.a,
                    v_post=cur.v,
                    a_post=cur.a,
                    dt_minutes=dt_minutes,
                )
            )
    return records


def write_reports_csv(reports: list[RescaledReport], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for r in reports:
            writer.writerow(
                [
                    r.participant_id,
                    r.study_id,
                    r.thread_index,
                    repr(r.v),
                    repr(r.a),
                    repr(r.h),
                ]
            )
