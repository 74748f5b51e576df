"""Least-squares power-law fitting in log10-log10 space.

The model is y = a * x**(-b). With X = lg x, Y = lg y and c = lg a it becomes
the line Y = -b*X + c, whose least-squares solution has the closed form used
in ``fit_power_law``. Goodness of fit is reported two ways: the explained-over-
observed ratio measured about the mean fitted value (``r_squared_paper``) and
the textbook 1 - SSE/SST (``r_squared_standard``).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping

import numpy as np

MIN_POINTS = 3
BUCKETS = ("<0.6", "0.6–0.7", "0.7–0.8", "≥0.8")
UNDEFINED_BUCKET = "undefined"


class InsufficientDataError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


@dataclass(frozen=True)
class FitInput:
    points: tuple[tuple[float, float], ...]
    dropped: int = 0

    def __post_init__(self):
        for x, y in self.points:
            if not (x > 0 and y > 0):
                raise ValueError(f"points must be strictly positive, got ({x}, {y})")

    @property
    def x(self) -> np.ndarray:
        return np.array([p[0] for p in self.points], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.points], dtype=float)


@dataclass(frozen=True)
class PowerLawFit:
    intercept: float  # c = lg a
    coefficient: float  # b
    r2_paper: float | None
    r2_standard: float | None
    n_points: int
    dropped: int
    bucket: str

    @property
    def a(self) -> float:
        return 10.0 ** self.intercept

    def predict(self, x):
        return self.a * np.asarray(x, dtype=float) ** (-self.coefficient)


def prepare_fit_input(series, x_offset: int = 1) -> FitInput:
    """Turn an interval series into fit points ``(ti + x_offset, count)``.

    ``series`` is an ``IntervalSeries`` or a plain ``{ti: count}`` mapping.
    Zero counts are dropped (their log is undefined) and tallied.
    """
    counts: Mapping[int, float] = series.counts if hasattr(series, "counts") else series
    points = []
    dropped = 0
    for ti in sorted(counts):
        x = ti + x_offset
        if x <= 0:
            raise ValueError(f"x must be positive (ti={ti}, offset={x_offset})")
        y = counts[ti]
        if y > 0:
            points.append((float(x), float(y)))
        else:
            dropped += 1
    if len(points) < MIN_POINTS:
        raise InsufficientDataError(f"insufficient data: {len(points)} positive points, need {MIN_POINTS}")
    return FitInput(tuple(points), dropped)


def _log_xy(fit_input: FitInput) -> tuple[np.ndarray, np.ndarray]:
    return np.log10(fit_input.x), np.log10(fit_input.y)


def deviance(fit_input: FitInput, b: float, c: float) -> float:
    """Sum of squared residuals of Y against -b*X + c."""
    X, Y = _log_xy(fit_input)
    r = Y - (-b * X + c)
    return float(r @ r)


def model_values(fit_input: FitInput, b: float, c: float) -> np.ndarray:
    """lg(a * x**-b) at every input abscissa."""
    return c - b * np.log10(fit_input.x)


def _r2_paper(Y: np.ndarray, M: np.ndarray) -> float | None:
    m_bar = M.mean()
    den = float(((Y - m_bar) ** 2).sum())
    if den == 0.0 or np.ptp(Y) == 0:
        return None
    return float(((M - m_bar) ** 2).sum()) / den


def _r2_standard(Y: np.ndarray, M: np.ndarray) -> float | None:
    sst = float(((Y - Y.mean()) ** 2).sum())
    if sst == 0.0 or np.ptp(Y) == 0:
        return None
    return 1.0 - float(((Y - M) ** 2).sum()) / sst


def r_squared_paper(fit_input: FitInput, fit: PowerLawFit) -> float | None:
    _, Y = _log_xy(fit_input)
    return _r2_paper(Y, model_values(fit_input, fit.coefficient, fit.intercept))


def r_squared_standard(fit_input: FitInput, fit: PowerLawFit) -> float | None:
    _, Y = _log_xy(fit_input)
    return _r2_standard(Y, model_values(fit_input, fit.coefficient, fit.intercept))


def r2_bucket(r2: float | None) -> str:
    """Column group of a fit table; the value is taken at its 2-decimal display."""
    if r2 is None:
        return UNDEFINED_BUCKET
    shown = float(f"{r2:.2f}")
    if shown < 0.6:
        return BUCKETS[0]
    if shown < 0.7:
        return BUCKETS[1]
    if shown < 0.8:
        return BUCKETS[2]
    return BUCKETS[3]


def fit_power_law(fit_input: FitInput) -> PowerLawFit:
    X, Y = _log_xy(fit_input)
    n = len(X)
    if n < 2 or np.ptp(X) == 0:
        raise DegenerateFitError("degenerate abscissa: all x values are identical")
    sx, sy = X.sum(), Y.sum()
    sxy, sxx = (X * Y).sum(), (X * X).sum()
    den = n * sxx - sx * sx
    if den == 0:
        raise DegenerateFitError("degenerate abscissa")
    b = float((sx * sy - n * sxy) / den)
    c = float(sy / n + b * sx / n)
    M = c - b * X
    r2p = _r2_paper(Y, M)
    return PowerLawFit(
        intercept=c,
        coefficient=b,
        r2_paper=r2p,
        r2_standard=_r2_standard(Y, M),
        n_points=n,
        dropped=fit_input.dropped,
        bucket=r2_bucket(r2p),
    )


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.2f}"


def format_fit_row(fit: PowerLawFit) -> list[str]:
    """``intercept, coefficient, r2, bucket`` as printed in the fit table."""
    return [_fmt(fit.intercept), _fmt(fit.coefficient), _fmt(fit.r2_paper), fit.bucket]


FIT_TABLE_HEADER = ["aspect_id", "label", "intercept", "coefficient", "r2", "bucket", "n_points", "dropped"]


def write_fit_table(rows: list[tuple[int, str, PowerLawFit | None, str]], path) -> None:
    """``rows`` are ``(aspect_id, label, fit or None, note)``; unfittable aspects get empty numbers."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIT_TABLE_HEADER)
        for aid, label, fit, note in rows:
            if fit is None:
                w.writerow([aid, label, "", "", "", note, "", ""])
            else:
                w.writerow([aid, label, *format_fit_row(fit), fit.n_points, fit.dropped])


def write_fit_diagnostics(rows: list[tuple[int, str, PowerLawFit | None, str]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["aspect_id", "label", "intercept", "coefficient", "a", "r2_paper", "r2_standard",
                    "n_points", "dropped", "note"])
        for aid, label, fit, note in rows:
            if fit is None:
                w.writerow([aid, label, "", "", "", "", "", "", "", note])
                continue
            w.writerow([aid, label, repr(fit.intercept), repr(fit.coefficient), repr(fit.a),
                        "" if fit.r2_paper is None else repr(fit.r2_paper),
                        "" if fit.r2_standard is None else repr(fit.r2_standard),
                        fit.n_points, fit.dropped, note])
