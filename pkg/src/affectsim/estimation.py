"""Parameter estimation from pre/post observation records.

The velocity models regress per-minute changes in valence (arousal) on
the pre-exposure state and the thread charge:

    dv/dt = -gamma_v (v - b) + h   * (b0 + b1 v + b2 v^2 + b3 v^3) + noise
    da/dt = -gamma_a (a - d) + |h| * (d0 + d1 a + d2 a^2 + d3 a^3) + noise

They are fitted by damped Gauss-Newton least squares (the model is linear
in a reparameterization, which supplies the starting point, so the loop
converges in a handful of iterations).  Reported covariance is
(J'J)^-1 * RSS/(n-k); the Gaussian log-likelihood backs AIC-based
exhaustive subset selection over the polynomial terms, with relaxation
rate and baseline always retained.

Participation tendency is fitted as a single-knot hinge by grid search
over candidate knots (observed arousal values plus zero) with OLS per
knot.  Post-content models are logistic regressions fitted by iteratively
reweighted least squares.  Parameter uncertainty can be propagated by
drawing from the asymptotic multivariate normal of any converged fit.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DataError",
    "FitError",
    "ObservationRecord",
    "FittedModel",
    "ParticipationFit",
    "PosteriorSample",
    "NormalFitDiagnostics",
    "load_observations",
    "save_observations",
    "fit_valence",
    "fit_arousal",
    "select_terms",
    "aic_table",
    "simulate_posterior",
    "fit_participation",
    "fit_expression",
    "residual_diagnostics",
    "sturges_bins",
]


class DataError(ValueError):
    """Invalid or insufficient input data."""


class FitError(RuntimeError):
    """Numerical failure of a fitting routine."""

    def __init__(self, message: str, last_estimates: dict | None = None):
        super().__init__(message)
        self.last_estimates = last_estimates


H_LEVELS = (-1.0, 0.0, 1.0)

VALENCE_TERMS = ("b0", "b1", "b2", "b3")
AROUSAL_TERMS = ("d0", "d1", "d2", "d3")
# optional extension term for the arousal model: a signed-h regressor used
# to check that arousal responds to |h| rather than h
SIGNED_FIELD_TERM = "h_signed"

_TERM_POWER = {name: k for k, name in enumerate(VALENCE_TERMS)}
_TERM_POWER.update({name: k for k, name in enumerate(AROUSAL_TERMS)})

# two-sided Wald significance markers used in fit reports
SIGNIFICANCE_LEVELS = ((1e-10, "***"), (1e-3, "**"), (1e-2, "*"))


@dataclass(frozen=True)
class ObservationRecord:
    """One pre/post emotional report around one thread exposure.

    States are nominally in [-1, 1]; that bound is guaranteed for ingested
    Likert data but deliberately not enforced here, because synthetic data
    with Gaussian velocity noise can step slightly outside it.
    """

    participant_id: str
    study_id: str
    h: float
    v_pre: float
    a_pre: float
    v_post: float
    a_post: float
    dt_minutes: float = 1.0
    participation_intent: float | None = None
    post_pos: bool | None = None
    post_neg: bool | None = None
    post_kind: str | None = None  # "first_post" | "reply"

    def __post_init__(self) -> None:
        if self.h not in H_LEVELS:
            raise DataError(f"h must be -1, 0 or +1, got {self.h}")
        if not self.dt_minutes > 0:
            raise DataError(f"dt_minutes must be > 0, got {self.dt_minutes}")
        for name in ("v_pre", "a_pre", "v_post", "a_post"):
            if not math.isfinite(getattr(self, name)):
                raise DataError(f"{name} must be finite")
        if self.participation_intent is not None and not 0.0 <= self.participation_intent <= 1.0:
            raise DataError("participation_intent must be in [0, 1]")
        if self.post_kind not in (None, "first_post", "reply"):
            raise DataError(f"post_kind must be first_post or reply, got {self.post_kind!r}")


OBSERVATION_COLUMNS = (
    "participant_id",
    "study_id",
    "h",
    "v_pre",
    "a_pre",
    "v_post",
    "a_post",
    "dt_minutes",
    "participation_intent",
    "post_pos",
    "post_neg",
    "post_kind",
)


def save_observations(records: Iterable[ObservationRecord], path) -> None:
    """Write records as CSV with the canonical column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(OBSERVATION_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.participant_id,
                    r.study_id,
                    repr(float(r.h)),
                    repr(float(r.v_pre)),
                    repr(float(r.a_pre)),
                    repr(float(r.v_post)),
                    repr(float(r.a_post)),
                    repr(float(r.dt_minutes)),
                    "" if r.participation_intent is None else repr(float(r.participation_intent)),
                    "" if r.post_pos is None else int(r.post_pos),
                    "" if r.post_neg is None else int(r.post_neg),
                    r.post_kind or "",
                ]
            )


def load_observations(path) -> list[ObservationRecord]:
    """Read an observations CSV (header required, '.' decimal separator).

    An empty dt_minutes falls back to one event unit with a warning.
    """
    records = []
    errors = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        missing = set(OBSERVATION_COLUMNS[:8]) - set(reader.fieldnames)
        if missing - {"dt_minutes"}:
            raise DataError(f"{path}: missing required columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                dt_raw = (row.get("dt_minutes") or "").strip()
                if not dt_raw:
                    warnings.warn(
                        f"{path}:{lineno}: missing dt_minutes, using one event unit",
                        stacklevel=2,
                    )
                    dt = 1.0
                else:
                    dt = float(dt_raw)
                intent = (row.get("participation_intent") or "").strip()
                pos = (row.get("post_pos") or "").strip()
                neg = (row.get("post_neg") or "").strip()
                kind = (row.get("post_kind") or "").strip()
                records.append(
                    ObservationRecord(
                        participant_id=row["participant_id"],
                        study_id=row["study_id"],
                        h=float(row["h"]),
                        v_pre=float(row["v_pre"]),
                        a_pre=float(row["a_pre"]),
                        v_post=float(row["v_post"]),
                        a_post=float(row["a_post"]),
                        dt_minutes=dt,
                        participation_intent=float(intent) if intent else None,
                        post_pos=bool(int(pos)) if pos else None,
                        post_neg=bool(int(neg)) if neg else None,
                        post_kind=kind or None,
                    )
                )
            except (DataError, KeyError, ValueError) as exc:
                errors.append(f"{path}:{lineno}: {exc}")
    if errors:
        raise DataError("; ".join(errors))
    return records


# ---------------------------------------------------------------------------
# fitted-model container
# ---------------------------------------------------------------------------


@dataclass
class FittedModel:
    """Point estimates, covariance, and diagnostics of one converged fit."""

    target: str
    param_names: tuple[str, ...]
    estimates: np.ndarray
    covariance: np.ndarray
    r_squared: float
    n: int
    residuals: np.ndarray
    included_terms: tuple[str, ...]
    residual_normal_r2: float
    loglik: float

    @property
    def deviance(self) -> float:
        return -2.0 * self.loglik

    @property
    def standard_errors(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance))

    @property
    def p_values(self) -> np.ndarray:
        """Two-sided Wald p-values against zero."""
        se = self.standard_errors
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(se > 0, np.abs(self.estimates) / se, np.inf)
        return np.array([math.erfc(val / math.sqrt(2.0)) if math.isfinite(val) else 0.0 for val in z])

    @property
    def estimates_dict(self) -> dict[str, float]:
        return {name: float(val) for name, val in zip(self.param_names, self.estimates)}

    def aic(self) -> float:
        """2k - 2 lnL with k the number of mean-model parameters."""
        return 2.0 * len(self.param_names) - 2.0 * self.loglik

    def significance(self, name: str) -> str:
        p = float(self.p_values[self.param_names.index(name)])
        for threshold, stars in SIGNIFICANCE_LEVELS:
            if p < threshold:
                return stars
        return ""

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "param_names": list(self.param_names),
            "estimates": [float(x) for x in self.estimates],
            "standard_errors": [float(x) for x in self.standard_errors],
            "p_values": [float(x) for x in self.p_values],
            "significance": [self.significance(name) for name in self.param_names],
            "covariance": [[float(x) for x in row] for row in self.covariance],
            "r_squared": float(self.r_squared),
            "n": int(self.n),
            "included_terms": list(self.included_terms),
            "residual_normal_r2": float(self.residual_normal_r2),
            "loglik": float(self.loglik),
            "deviance": float(self.deviance),
            "aic": float(self.aic()),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FittedModel":
        return cls(
            target=data["target"],
            param_names=tuple(data["param_names"]),
            estimates=np.array(data["estimates"], dtype=float),
            covariance=np.array(data["covariance"], dtype=float),
            r_squared=float(data["r_squared"]),
            n=int(data["n"]),
            residuals=np.array(data.get("residuals", []), dtype=float),
            included_terms=tuple(data["included_terms"]),
            residual_normal_r2=float(data["residual_normal_r2"]),
            loglik=float(data["loglik"]),
        )


def _gaussian_loglik(rss: float, n: int) -> float:
    if rss <= 0:
        # exact fit: bounded below numerically by machine epsilon scale
        rss = np.finfo(float).tiny
    return -0.5 * n * (math.log(2.0 * math.pi * rss / n) + 1.0)


def _r_squared(residuals: np.ndarray, y: np.ndarray) -> float:
    tss = float(((y - y.mean()) ** 2).sum())
    rss = float((residuals**2).sum())
    if tss == 0.0:
        return 0.0 if rss > 0 else 1.0
    return 1.0 - rss / tss


# ---------------------------------------------------------------------------
# velocity models: damped Gauss-Newton
# ---------------------------------------------------------------------------


def _velocity_design(data: Sequence[ObservationRecord], target: str):
    if target == "valence":
        x = np.array([r.v_pre for r in data])
        y = np.array([(r.v_post - r.v_pre) / r.dt_minutes for r in data])
        g = np.array([r.h for r in data])
    else:
        x = np.array([r.a_pre for r in data])
        y = np.array([(r.a_post - r.a_pre) / r.dt_minutes for r in data])
        g = np.abs(np.array([r.h for r in data]))
    h_signed = np.array([r.h for r in data])
    return x, g, h_signed, y


def _term_columns(x, g, h_signed, terms):
    cols = []
    for name in terms:
        if name == SIGNED_FIELD_TERM:
            cols.append(h_signed)
        else:
            cols.append(g * x ** _TERM_POWER[name])
    return cols


def _check_identifiable(columns: list[np.ndarray], names: list[str]) -> None:
    """Reject designs whose columns cannot separate the requested terms."""
    dead = [name for col, name in zip(columns, names) if not np.any(col != 0.0)]
    if dead:
        raise FitError(f"unidentifiable terms (zero regressor columns): {', '.join(dead)}")
    X = np.column_stack(columns)
    rank = np.linalg.matrix_rank(X)
    if rank < X.shape[1]:
        # name the terms loading on the null space of the design
        _, _, vt = np.linalg.svd(X, full_matrices=False)
        null = np.abs(vt[rank:]).sum(axis=0)
        guilty = [name for name, load in zip(names, null) if load > 1e-8]
        raise FitError(f"rank-deficient design, collinear terms: {', '.join(guilty)}")


def _fit_velocity(
    data: Sequence[ObservationRecord],
    target: str,
    terms: tuple[str, ...],
    max_iter: int = 200,
) -> FittedModel:
    rate_name, base_name = ("gamma_v", "b") if target == "valence" else ("gamma_a", "d")
    valid = VALENCE_TERMS if target == "valence" else AROUSAL_TERMS + (SIGNED_FIELD_TERM,)
    bad = [t for t in terms if t not in valid]
    if bad:
        raise DataError(f"unknown {target} terms: {bad}")
    x, g, h_signed, y = _velocity_design(data, target)
    names = [rate_name, base_name, *terms]
    k = len(names)
    if len(data) < 2 * k:
        raise DataError(f"need at least {2 * k} records to fit {k} parameters, got {len(data)}")
    if terms and len(set(np.abs(np.array([r.h for r in data])) if target == "arousal" else [r.h for r in data])) < 2:
        raise FitError(
            f"unidentifiable terms (single field level in data): {', '.join(terms)}"
        )

    term_cols = _term_columns(x, g, h_signed, terms)
    _check_identifiable([x, np.ones_like(x), *term_cols], ["(state)", "(const)", *terms])

    # exact starting point via the linear reparameterization
    # y = c1*x + c2 + sum_j t_j * col_j  with gamma = -c1, baseline = c2/gamma
    X_lin = np.column_stack([x, np.ones_like(x), *term_cols])
    coef, _, _, _ = np.linalg.lstsq(X_lin, y, rcond=None)
    gamma0 = -coef[0]
    base0 = coef[1] / gamma0 if abs(gamma0) > 1e-12 else 0.0
    theta = np.array([gamma0, base0, *coef[2:]])

    def model_and_jacobian(th):
        gamma, base = th[0], th[1]
        f = -gamma * (x - base) + np.zeros_like(x)
        J = np.empty((len(x), k))
        J[:, 0] = -(x - base)
        J[:, 1] = gamma
        for j, col in enumerate(term_cols):
            f += th[2 + j] * col
            J[:, 2 + j] = col
        return f, J

    def rss_of(th):
        f, _ = model_and_jacobian(th)
        r = y - f
        return float(r @ r), r

    rss, resid = rss_of(theta)
    converged = False
    for _ in range(max_iter):
        f, J = model_and_jacobian(theta)
        resid = y - f
        try:
            step = np.linalg.solve(J.T @ J, J.T @ resid)
        except np.linalg.LinAlgError:
            raise FitError(
                "singular normal equations during Gauss-Newton",
                last_estimates=dict(zip(names, theta)),
            ) from None
        # damp: halve the step until the objective does not increase
        scale = 1.0
        for _ in range(40):
            candidate = theta + scale * step
            rss_new, _ = rss_of(candidate)
            if rss_new <= rss:
                break
            scale *= 0.5
        else:
            rss_new = rss
            candidate = theta
        improvement = rss - rss_new
        theta = candidate
        if improvement <= 1e-14 * max(rss, 1e-30):
            rss = rss_new
            converged = True
            break
        rss = rss_new
    if not converged:
        raise FitError(
            f"Gauss-Newton did not converge within {max_iter} iterations",
            last_estimates=dict(zip(names, theta)),
        )

    f, J = model_and_jacobian(theta)
    resid = y - f
    rss = float(resid @ resid)
    dof = len(y) - k
    sigma2 = rss / dof if dof > 0 else 0.0
    try:
        cov = np.linalg.inv(J.T @ J) * sigma2
    except np.linalg.LinAlgError:
        raise FitError(
            "singular Jacobian at the solution", last_estimates=dict(zip(names, theta))
        ) from None
    cov = 0.5 * (cov + cov.T)

    loglik = _gaussian_loglik(rss, len(y))
    try:
        diag_r2 = residual_diagnostics_from_array(resid).r_squared
    except (DataError, FitError):
        diag_r2 = math.nan
    return FittedModel(
        target=target,
        param_names=tuple(names),
        estimates=theta,
        covariance=cov,
        r_squared=_r_squared(resid, y),
        n=len(y),
        residuals=resid,
        included_terms=tuple(names),
        residual_normal_r2=diag_r2,
        loglik=loglik,
    )


def fit_valence(
    data: Sequence[ObservationRecord], terms: Iterable[str] = VALENCE_TERMS
) -> FittedModel:
    """Fit the valence velocity model; gamma_v and b are always estimated."""
    return _fit_velocity(data, "valence", tuple(terms))


def fit_arousal(
    data: Sequence[ObservationRecord], terms: Iterable[str] = AROUSAL_TERMS[:2]
) -> FittedModel:
    """Fit the arousal velocity model on |h|; gamma_a and d are always estimated.

    The term vocabulary additionally accepts "h_signed", a sign-sensitive
    field regressor for checking that polarity adds nothing.
    """
    return _fit_velocity(data, "arousal", tuple(terms))


# ---------------------------------------------------------------------------
# AIC subset selection
# ---------------------------------------------------------------------------


def aic_table(data: Sequence[ObservationRecord], target: str) -> list[dict]:
    """Fit every subset of the polynomial terms; report AIC per subset.

    Subsets that fail to fit are kept in the table with their error and
    excluded from the competition (a warning is emitted).
    """
    if target not in ("valence", "arousal"):
        raise DataError(f'target must be "valence" or "arousal", got {target!r}')
    pool = VALENCE_TERMS if target == "valence" else AROUSAL_TERMS
    rows = []
    for size in range(len(pool) + 1):
        for subset in combinations(pool, size):
            entry = {"terms": list(subset), "k": 2 + len(subset)}
            try:
                fit = _fit_velocity(data, target, subset)
            except (FitError, DataError) as exc:
                warnings.warn(f"subset {subset} excluded from AIC search: {exc}", stacklevel=2)
                entry["error"] = str(exc)
            else:
                entry["aic"] = fit.aic()
                entry["loglik"] = fit.loglik
                entry["r_squared"] = fit.r_squared
            rows.append(entry)
    return rows


def select_terms(data: Sequence[ObservationRecord], target: str) -> tuple[str, ...]:
    """Return the AIC-minimizing subset of polynomial terms.

    Exact AIC ties break toward fewer terms, then lexicographic order.
    """
    rows = [r for r in aic_table(data, target) if "aic" in r]
    if not rows:
        raise FitError(f"no {target} term subset could be fitted")
    best = min(rows, key=lambda r: (r["aic"], r["k"], tuple(r["terms"])))
    return tuple(best["terms"])


# ---------------------------------------------------------------------------
# posterior simulation
# ---------------------------------------------------------------------------


def sturges_bins(n: int) -> int:
    """Histogram bin count ceil(log2(n) + 1)."""
    if n < 1:
        raise DataError("need at least one observation for a histogram")
    return math.ceil(math.log2(n) + 1.0)


@dataclass
class PosteriorSample:
    """Draws from the asymptotic normal of a fit, with histogram summaries."""

    param_names: tuple[str, ...]
    point_estimates: np.ndarray
    samples: np.ndarray  # (n_draws, k)
    bin_edges: list[np.ndarray] = field(default_factory=list)
    bin_density: list[np.ndarray] = field(default_factory=list)

    @property
    def n_draws(self) -> int:
        return self.samples.shape[0]

    @property
    def means(self) -> np.ndarray:
        return self.samples.mean(axis=0)

    @property
    def sds(self) -> np.ndarray:
        return self.samples.std(axis=0, ddof=1)

    @property
    def mc_standard_errors(self) -> np.ndarray:
        return self.sds / math.sqrt(self.n_draws)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.param_names)
            for row in self.samples:
                writer.writerow([repr(float(x)) for x in row])

    def summary(self) -> dict:
        return {
            "n_draws": self.n_draws,
            "bins": len(self.bin_edges[0]) - 1 if self.bin_edges else 0,
            "parameters": {
                name: {
                    "point_estimate": float(self.point_estimates[j]),
                    "posterior_mean": float(self.means[j]),
                    "posterior_sd": float(self.sds[j]),
                    "mc_standard_error": float(self.mc_standard_errors[j]),
                    "histogram": {
                        "edges": [float(x) for x in self.bin_edges[j]],
                        "density": [float(x) for x in self.bin_density[j]],
                    },
                }
                for j, name in enumerate(self.param_names)
            },
        }


def simulate_posterior(fit: FittedModel, n_draws: int = 10000, seed: int = 0) -> PosteriorSample:
    """Draw from N(estimates, covariance); histograms use Sturges bins.

    Fails if the covariance is asymmetric or has a meaningfully negative
    eigenvalue.  A zero covariance degenerates to repeating the point
    estimate, as it should.
    """
    if n_draws < 1:
        raise DataError("n_draws must be >= 1")
    cov = np.asarray(fit.covariance, dtype=float)
    k = len(fit.param_names)
    if cov.shape != (k, k) or not np.allclose(cov, cov.T, rtol=1e-10, atol=1e-12):
        raise FitError("covariance must be a symmetric k x k matrix")
    eigvals, eigvecs = np.linalg.eigh(0.5 * (cov + cov.T))
    tol = -1e-10 * max(1.0, float(np.abs(eigvals).max()))
    if eigvals.min() < tol:
        raise FitError(f"covariance is not positive semidefinite (min eigenvalue {eigvals.min():g})")
    scale = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    z = rng.standard_normal((n_draws, k))
    samples = fit.estimates[None, :] + z @ scale.T

    bins = sturges_bins(n_draws)
    edges_list, density_list = [], []
    for j in range(k):
        col = samples[:, j]
        if col.max() == col.min():
            # degenerate axis: a single unit-mass bin centred on the value
            edges = np.array([col[0] - 0.5, col[0] + 0.5])
            density = np.array([1.0])
        else:
            density, edges = np.histogram(col, bins=bins, density=True)
        edges_list.append(edges)
        density_list.append(density)
    return PosteriorSample(
        param_names=fit.param_names,
        point_estimates=fit.estimates.copy(),
        samples=samples,
        bin_edges=edges_list,
        bin_density=density_list,
    )


# ---------------------------------------------------------------------------
# participation hinge
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParticipationFit:
    """Hinge-regression estimates of the participation tendency."""

    p0: float
    alpha: float
    tau: float
    r_squared: float
    n: int


def fit_participation(data: Sequence[ObservationRecord]) -> ParticipationFit:
    """Single-knot hinge regression of participation intent on arousal.

    Grid search over candidate knots (unique observed arousal values plus
    zero); OLS of intent on [1, a * H(a - tau)] per candidate; minimal RSS
    wins, with exact ties broken toward the smallest |tau|.
    """
    rows = [r for r in data if r.participation_intent is not None]
    if len(rows) < 20:
        raise DataError(f"need at least 20 records with participation intent, got {len(rows)}")
    a = np.array([r.a_pre for r in rows])
    y = np.array([r.participation_intent for r in rows])
    if np.ptp(a) == 0.0:
        raise DataError("degenerate knot grid: all arousal values are equal")
    if np.ptp(y) == 0.0:
        # flat response: intercept carries everything, no hinge effect
        return ParticipationFit(p0=float(y[0]), alpha=0.0, tau=0.0, r_squared=0.0, n=len(rows))

    tss = float(((y - y.mean()) ** 2).sum())
    candidates = np.unique(np.concatenate([a, [0.0]]))
    best = None
    for tau in candidates:
        hinge = a * (a > tau)
        if np.ptp(hinge) == 0.0:
            continue  # knot beyond the data: hinge column is constant zero
        X = np.column_stack([np.ones_like(a), hinge])
        coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
        r = y - X @ coef
        rss = float(r @ r)
        key = (rss, abs(tau), tau)
        if best is None or key < best[:3]:
            best = (rss, abs(tau), float(tau), float(coef[0]), float(coef[1]))
    if best is None:
        raise DataError("degenerate knot grid: no candidate produces a usable hinge")
    rss, _, tau, p0, alpha = best
    return ParticipationFit(p0=p0, alpha=alpha, tau=tau, r_squared=1.0 - rss / tss, n=len(rows))


# ---------------------------------------------------------------------------
# logistic content models
# ---------------------------------------------------------------------------


def fit_expression(
    data: Sequence[ObservationRecord],
    regressor: str = "valence",
    outcome: str = "positive",
) -> FittedModel:
    """Logistic regression of post content on post-writing valence or arousal.

    ``outcome`` selects the positive- or negative-content channel.  Fitted
    by iteratively reweighted least squares to tolerance 1e-8 (at most 50
    iterations); complete separation is reported as an explicit failure.
    """
    if regressor not in ("valence", "arousal"):
        raise DataError(f'regressor must be "valence" or "arousal", got {regressor!r}')
    if outcome not in ("positive", "negative"):
        raise DataError(f'outcome must be "positive" or "negative", got {outcome!r}')
    flag = "post_pos" if outcome == "positive" else "post_neg"
    rows = [r for r in data if getattr(r, flag) is not None]
    if not rows:
        raise DataError(f"no records carry {flag} labels")
    y = np.array([float(getattr(r, flag)) for r in rows])
    x = np.array([r.v_post if regressor == "valence" else r.a_post for r in rows])
    if y.min() == y.max():
        raise DataError("both outcome classes must be present")

    X = np.column_stack([np.ones_like(x), x])
    beta = np.zeros(2)
    converged = False
    for _ in range(50):
        eta = X @ beta
        mu = 1.0 / (1.0 + np.exp(-eta))
        w = mu * (1.0 - mu)
        try:
            step = np.linalg.solve(X.T @ (X * w[:, None]), X.T @ (y - mu))
        except np.linalg.LinAlgError:
            raise FitError(
                "complete separation detected (singular weighted design)",
                last_estimates={"intercept": beta[0], f"slope_{regressor}": beta[1]},
            ) from None
        beta = beta + step
        if np.abs(beta).max() > 1e3:
            raise FitError(
                "complete separation detected (diverging coefficients)",
                last_estimates={"intercept": beta[0], f"slope_{regressor}": beta[1]},
            )
        if np.abs(step).max() < 1e-8:
            converged = True
            break
    if not converged:
        raise FitError(
            "IRLS did not converge within 50 iterations",
            last_estimates={"intercept": beta[0], f"slope_{regressor}": beta[1]},
        )

    eta = X @ beta
    mu = 1.0 / (1.0 + np.exp(-eta))
    w = mu * (1.0 - mu)
    cov = np.linalg.inv(X.T @ (X * w[:, None]))
    cov = 0.5 * (cov + cov.T)
    loglik = float(np.sum(y * np.log(mu) + (1.0 - y) * np.log(1.0 - mu)))
    p_bar = y.mean()
    loglik_null = float(len(y) * (p_bar * math.log(p_bar) + (1.0 - p_bar) * math.log(1.0 - p_bar)))
    mcfadden = 1.0 - loglik / loglik_null if loglik_null != 0 else 0.0
    names = ("intercept", f"slope_{regressor}")
    return FittedModel(
        target=f"expression_{outcome}",
        param_names=names,
        estimates=beta,
        covariance=cov,
        r_squared=mcfadden,
        n=len(y),
        residuals=y - mu,
        included_terms=names,
        residual_normal_r2=math.nan,
        loglik=loglik,
    )


# ---------------------------------------------------------------------------
# residual diagnostics
# ---------------------------------------------------------------------------


@dataclass
class NormalFitDiagnostics:
    """Agreement between the residual histogram and a moment-fitted normal."""

    r_squared: float
    mean: float
    sd: float
    bin_edges: np.ndarray
    bin_density: np.ndarray
    normal_density: np.ndarray


def residual_diagnostics_from_array(residuals: np.ndarray) -> NormalFitDiagnostics:
    residuals = np.asarray(residuals, dtype=float)
    if residuals.size < 8:
        raise DataError(f"need at least 8 residuals, got {residuals.size}")
    mean = float(residuals.mean())
    sd = float(residuals.std(ddof=0))  # method of moments
    if sd == 0.0:
        raise DataError("residuals have zero variance")
    bins = sturges_bins(residuals.size)
    density, edges = np.histogram(residuals, bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    normal = np.exp(-0.5 * ((centers - mean) / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))
    denom = float(((density - density.mean()) ** 2).sum())
    num = float(((density - normal) ** 2).sum())
    r2 = 1.0 - num / denom if denom > 0 else 0.0
    return NormalFitDiagnostics(
        r_squared=r2,
        mean=mean,
        sd=sd,
        bin_edges=edges,
        bin_density=density,
        normal_density=normal,
    )


def residual_diagnostics(fit: FittedModel) -> NormalFitDiagnostics:
    """Moment-fit a normal to the fit's residuals; R^2 over histogram bins."""
    return residual_diagnostics_from_array(fit.residuals)
