"""Logistic regression over discretized page features.

Two models share one design: inclusion (does a page have a counterpart on the
other platform?) and rewrite (was an included page rewritten rather than kept
verbatim?). Both regress on dummy-coded ordinal levels of views (V), edits (E),
references (R), and reverts (Rv) with Low as the reference level, plus one
edits-by-reverts interaction term:

    logit P(outcome) = a0 + a1*V + a2*E + a3*R + a4*Rv + a5*(E*Rv)

Fitting is plain Newton/IRLS on the exact likelihood; no regularization unless
the ridge fallback is explicitly enabled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .features import ActivityLevel, PageRecord

# Factor key -> PageRecord level attribute, in the model's canonical order.
FACTOR_FIELDS = {
    "V": "views_level",
    "E": "edits_level",
    "R": "references_level",
    "Rv": "reverts_level",
}

_NON_REFERENCE = (ActivityLevel.MID, ActivityLevel.HIGH, ActivityLevel.VERYHIGH)

# A fitted log-odds beyond this bound means odds past e^30 ~ 1e13: the MLE is
# running off to infinity, i.e. the data are (quasi-)separated.
_DIVERGENCE_BOUND = 30.0


class SeparationError(RuntimeError):
    """Perfect separation: the MLE does not exist (diverging coefficients)."""


@dataclass(frozen=True)
class DesignMatrix:
    matrix: np.ndarray          # shape (n_rows, n_columns), float64, intercept first
    labels: tuple[str, ...]     # column labels, parallel to matrix columns
    interaction: str            # "score" or "full"
    level_presence: dict[str, frozenset[ActivityLevel]]  # factor -> observed levels
    notes: tuple[str, ...] = ()  # e.g. dropped columns for absent levels


@dataclass(frozen=True)
class CoefficientSet:
    labels: tuple[str, ...]
    estimates: np.ndarray
    standard_errors: np.ndarray
    z_values: np.ndarray
    p_values: np.ndarray
    iterations: int
    converged: bool
    log_likelihood: float
    interaction: str = "score"
    level_presence: dict[str, frozenset[ActivityLevel]] = field(default_factory=dict)
    notes: tuple[str, ...] = ()


def encode_design(records: Sequence[PageRecord], interaction: str = "score") -> DesignMatrix:
    """Dummy-code records into a design matrix with Low as reference level.

    Column order: intercept, then Mid/High/VeryHigh dummies for V, E, R, Rv
    (skipping levels absent from the corpus, with a note), then the interaction.
    With interaction="score" that is a single column holding the product of the
    ordinal scores of E and Rv (Low=0, Mid=1, High=2, VeryHigh=3); with
    interaction="full" it is one column per observed non-Low (E, Rv) level pair.
    """
    if not records:
        raise ValueError("cannot encode an empty record list")
    if interaction not in ("score", "full"):
        raise ValueError(f"unknown interaction encoding {interaction!r}")

    levels: dict[str, list[ActivityLevel]] = {}
    for factor, attr in FACTOR_FIELDS.items():
        column = [getattr(r, attr) for r in records]
        if any(lvl is None for lvl in column):
            raise ValueError(f"record missing {attr}; run discretization first")
        levels[factor] = column

    presence = {
        factor: frozenset(levels[factor]) for factor in FACTOR_FIELDS
    }

    n = len(records)
    columns: list[np.ndarray] = [np.ones(n)]
    labels: list[str] = ["intercept"]
    notes: list[str] = []

    for factor in FACTOR_FIELDS:
        for lvl in _NON_REFERENCE:
            label = f"{factor}_{lvl.label}"
            if lvl in presence[factor]:
                columns.append(np.array([1.0 if v == lvl else 0.0 for v in levels[factor]]))
                labels.append(label)
            else:
                notes.append(f"column {label} absent: no page at that level")

    if interaction == "score":
        product = np.array([float(int(e) * int(rv))
                            for e, rv in zip(levels["E"], levels["Rv"])])
        columns.append(product)
        labels.append("E_x_Rv")
    else:
        for e_lvl in _NON_REFERENCE:
            for rv_lvl in _NON_REFERENCE:
                label = f"E_{e_lvl.label}_x_Rv_{rv_lvl.label}"
                col = np.array([
                    1.0 if (e == e_lvl and rv == rv_lvl) else 0.0
                    for e, rv in zip(levels["E"], levels["Rv"])
                ])
                if col.any():
                    columns.append(col)
                    labels.append(label)
                else:
                    notes.append(f"column {label} absent: no page with that pair")

    return DesignMatrix(
        matrix=np.column_stack(columns),
        labels=tuple(labels),
        interaction=interaction,
        level_presence=presence,
        notes=tuple(notes),
    )


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    expe = np.exp(eta[~pos])
    out[~pos] = expe / (1.0 + expe)
    return out


def _log_likelihood(eta: np.ndarray, y: np.ndarray) -> float:
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def _first_dependent_column(x: np.ndarray, labels: Sequence[str]) -> str:
    """Name the first column that is linearly dependent on its predecessors."""
    for j in range(1, x.shape[1]):
        if np.linalg.matrix_rank(x[:, : j + 1]) <= np.linalg.matrix_rank(x[:, :j]):
            return labels[j]
    return labels[int(np.argmin(np.abs(x).sum(axis=0)))]


def fit_logistic(
    design: DesignMatrix,
    outcome: Sequence[bool],
    tol: float = 1e-8,
    max_iter: int = 100,
    ridge: bool = False,
    ridge_penalty: float = 1e-6,
) -> CoefficientSet:
    """Maximum-likelihood logistic fit via iteratively reweighted least squares.

    Stops when the largest absolute coefficient update drops below ``tol`` or
    after ``max_iter`` Newton steps (then ``converged`` is False). Standard
    errors come from the inverse observed information at the final estimate;
    p-values are two-sided normal.

    Raises ValueError when the outcome has no variation, and SeparationError
    (naming the offending column) when the data are perfectly separated or the
    weighted normal equations are singular — unless ``ridge`` is set, which adds
    a tiny L2 penalty (default 1e-6) on the non-intercept columns and always
    yields finite estimates.
    """
    x = design.matrix
    y = np.asarray([1.0 if o else 0.0 for o in outcome])
    if len(y) != x.shape[0]:
        raise ValueError(f"{x.shape[0]} design rows but {len(y)} outcomes")
    if y.min() == y.max():
        raise ValueError("outcome has no variation: all rows share one class")

    n_cols = x.shape[1]
    penalty = np.zeros(n_cols)
    if ridge:
        penalty[[i for i, lab in enumerate(design.labels) if lab != "intercept"]] = ridge_penalty

    beta = np.zeros(n_cols)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        eta = x @ beta
        mu = _sigmoid(eta)
        weights = mu * (1.0 - mu)
        hessian = x.T @ (x * weights[:, None]) + np.diag(penalty)
        gradient = x.T @ (y - mu) - penalty * beta
        try:
            delta = np.linalg.solve(hessian, gradient)
        except np.linalg.LinAlgError:
            raise SeparationError(
                "singular weighted normal equations; offending column: "
                + _first_dependent_column(x, design.labels)
            ) from None
        beta = beta + delta
        if not ridge and np.max(np.abs(beta)) > _DIVERGENCE_BOUND:
            worst = design.labels[int(np.argmax(np.abs(beta)))]
            raise SeparationError(
                f"perfect separation: coefficient for {worst} is diverging"
            )
        if np.max(np.abs(delta)) < tol:
            converged = True
            break

    eta = x @ beta
    mu = _sigmoid(eta)
    weights = mu * (1.0 - mu)
    hessian = x.T @ (x * weights[:, None]) + np.diag(penalty)
    try:
        covariance = np.linalg.inv(hessian)
    except np.linalg.LinAlgError:
        raise SeparationError(
            "information matrix singular at the optimum; offending column: "
            + _first_dependent_column(x, design.labels)
        ) from None
    se = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, beta / se, np.inf * np.sign(beta))
    p = np.array([math.erfc(abs(zi) / math.sqrt(2.0)) if math.isfinite(zi) else 0.0
                  for zi in z])

    return CoefficientSet(
        labels=design.labels,
        estimates=beta,
        standard_errors=se,
        z_values=z,
        p_values=p,
        iterations=iterations,
        converged=converged,
        log_likelihood=_log_likelihood(eta, y),
        interaction=design.interaction,
        level_presence=dict(design.level_presence),
        notes=design.notes,
    )


def predict_probability(coeffs: CoefficientSet,
                        levels: Mapping[str, ActivityLevel]) -> float:
    """Inverse-logit of the linear predictor for one page's factor levels.

    ``levels`` maps each factor key ("V", "E", "R", "Rv") to an ActivityLevel.
    Raises ValueError when a non-reference level had no column at fit time
    (that level never occurred in the fitted corpus).
    """
    missing = [f for f in FACTOR_FIELDS if f not in levels]
    if missing:
        raise ValueError(f"levels missing factors: {', '.join(missing)}")
    index = {label: i for i, label in enumerate(coeffs.labels)}
    x = np.zeros(len(coeffs.labels))
    x[index["intercept"]] = 1.0
    for factor in FACTOR_FIELDS:
        lvl = levels[factor]
        if lvl == ActivityLevel.LOW:
            continue
        label = f"{factor}_{lvl.label}"
        if label not in index:
            raise ValueError(f"level {label} had no column at fit time")
        x[index[label]] = 1.0
    if coeffs.interaction == "score":
        x[index["E_x_Rv"]] = float(int(levels["E"]) * int(levels["Rv"]))
    else:
        e_lvl, rv_lvl = levels["E"], levels["Rv"]
        if e_lvl != ActivityLevel.LOW and rv_lvl != ActivityLevel.LOW:
            label = f"E_{e_lvl.label}_x_Rv_{rv_lvl.label}"
            if label not in index:
                raise ValueError(f"level pair {label} had no column at fit time")
            x[index[label]] = 1.0
    eta = float(x @ coeffs.estimates)
    return float(_sigmoid(np.array([eta]))[0])
