"""Random-coding ensemble: an i.i.d. input distribution feeding a DMC.

Everything is in nats. The tilted log-moment

    gamma_y(s) = -ln sum_x P(x) P(y|x)^s

is evaluated in the log domain so that tiny transition probabilities and
large |s| do not underflow.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.special import logsumexp, xlogy

from .errors import (
    AlphabetTooSmall,
    DomainError,
    NegativeEntry,
    NonStochastic,
    NotSymmetric,
)

SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-9
SYMMETRY_GRID = tuple(np.linspace(0.0, 1.0, 21))


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    max_deviation: float
    s_grid: tuple[float, ...]
    tol: float

    @property
    def is_symmetric(self) -> bool:
        return self.max_deviation <= self.tol


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Input distribution ``input_dist[x]`` and channel ``channel[x, y]``.

    Build instances through :func:`validate` (or :func:`bsc`); the arrays
    are made read-only so the object can be shared freely between threads.
    """

    input_dist: np.ndarray
    channel: np.ndarray
    name: str = field(default="", compare=False)

    @property
    def n_inputs(self) -> int:
        return self.channel.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.channel.shape[1]

    @cached_property
    def log_input(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.input_dist)

    @cached_property
    def log_channel(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.channel)

    @cached_property
    def output_dist(self) -> np.ndarray:
        return self.input_dist @ self.channel

    @property
    def all_positive(self) -> bool:
        return bool(np.all(self.channel > 0))

    @cached_property
    def symmetry(self) -> SymmetryReport:
        """Symmetry check on the default probe grid, computed once."""
        return check_symmetry(self)

    def to_json(self) -> str:
        return json.dumps(
            {"input_dist": self.input_dist.tolist(), "channel": self.channel.tolist()}
        )


def validate(input_dist, channel, name: str = "") -> Ensemble:
    try:
        px = np.array(input_dist, dtype=float)
        w = np.array(channel, dtype=float)
    except (TypeError, ValueError) as exc:  # ragged or non-numeric tables
        raise NonStochastic(f"cannot read probability tables: {exc}") from None
    if px.ndim != 1 or w.ndim != 2 or w.shape[0] != px.shape[0]:
        raise NonStochastic(
            f"shape mismatch: input_dist {px.shape} vs channel {w.shape}"
        )
    if w.shape[0] < 2 or w.shape[1] < 2:
        raise AlphabetTooSmall(f"need |X|, |Y| >= 2, got {w.shape}")
    if not (np.all(np.isfinite(px)) and np.all(np.isfinite(w))):
        raise NonStochastic("non-finite probability")
    if np.any(px < 0) or np.any(w < 0):
        raise NegativeEntry("probabilities must be nonnegative")
    if np.any(px > 1) or np.any(w > 1):
        raise NonStochastic("probability larger than 1")
    if abs(px.sum() - 1.0) > SUM_TOL:
        raise NonStochastic(f"input_dist sums to {px.sum():.15g}")
    rows = w.sum(axis=1)
    bad = np.flatnonzero(np.abs(rows - 1.0) > SUM_TOL)
    if bad.size:
        raise NonStochastic(f"channel row {bad[0]} sums to {rows[bad[0]]:.15g}")
    px.setflags(write=False)
    w.setflags(write=False)
    return Ensemble(px, w, name)


def bsc(p: float) -> Ensemble:
    """Uniform binary input through a BSC with crossover ``p``."""
    return validate([0.5, 0.5], [[1 - p, p], [p, 1 - p]], name=f"bsc:{p}")


def load_channel(spec: str) -> Ensemble:
    """Parse ``bsc:<p>`` or read a JSON channel file."""
    if spec.startswith("bsc:"):
        try:
            p = float(spec[4:])
        except ValueError:
            raise DomainError(f"cannot parse crossover in {spec!r}") from None
        if not 0.0 < p < 0.5:
            raise DomainError(f"BSC crossover must satisfy 0 < p < 1/2, got {p}")
        return bsc(p)
    text = Path(spec).read_text()  # OSError propagates: an I/O problem, not a bad channel
    try:
        data = json.loads(text)
        dist, chan = data["input_dist"], data["channel"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DomainError(f"{spec}: expected JSON with 'input_dist' and 'channel' ({exc})") from None
    return validate(dist, chan, name=spec)


def _tilted_terms(ens: Ensemble, s: float, y: int) -> tuple[np.ndarray, np.ndarray]:
    """Log weights ln P(x) + s ln P(y|x) and ln P(y|x) over the usable x."""
    col = ens.channel[:, y]
    keep = col > 0
    if not np.all(keep) and s <= 0:
        raise DomainError(
            f"gamma_y(s) needs s > 0 when column {y} has zero entries (s={s})"
        )
    lc = ens.log_channel[keep, y]
    logw = ens.log_input[keep] + s * lc
    if logw.size == 0 or np.all(np.isneginf(logw)):
        raise DomainError(f"sum_x P(x) P(y|x)^s vanishes for y={y}")
    return logw, lc


def gamma_y(ens: Ensemble, s: float, y: int) -> float:
    logw, _ = _tilted_terms(ens, s, y)
    return float(-logsumexp(logw))


def gamma_y_prime(ens: Ensemble, s: float, y: int) -> float:
    logw, lc = _tilted_terms(ens, s, y)
    w = np.exp(logw - logsumexp(logw))
    return float(-np.dot(w, lc))


def _require_symmetric(ens: Ensemble) -> None:
    rep = ens.symmetry
    if not rep.is_symmetric:
        raise NotSymmetric(
            f"gamma_y(s) depends on y: deviation {rep.max_deviation:.3e} > tol {rep.tol:g}"
        )


def gamma(ens: Ensemble, s: float) -> float:
    _require_symmetric(ens)
    return gamma_y(ens, s, 0)


def gamma_prime(ens: Ensemble, s: float) -> float:
    _require_symmetric(ens)
    return gamma_y_prime(ens, s, 0)


def check_symmetry(ens: Ensemble, s_grid=None, tol: float = SYMMETRY_TOL) -> SymmetryReport:
    if s_grid is None:
        s_grid = SYMMETRY_GRID
        if not ens.all_positive:
            # s = 0 is outside the domain once a column has a zero
            s_grid = tuple(s for s in s_grid if s > 0)
    s_grid = tuple(float(s) for s in s_grid)
    if not s_grid:
        raise ValueError("s_grid must be nonempty")
    dev = 0.0
    for s in s_grid:
        ref = gamma_y(ens, s, 0)
        for y in range(1, ens.n_outputs):
            dev = max(dev, abs(gamma_y(ens, s, y) - ref))
    return SymmetryReport(max_deviation=dev, s_grid=s_grid, tol=tol)


def mutual_information(ens: Ensemble) -> float:
    joint = ens.input_dist[:, None] * ens.channel
    py = ens.output_dist
    ratio = np.divide(ens.channel, py[None, :], out=np.ones_like(ens.channel), where=py[None, :] > 0)
    return float(max(xlogy(joint, ratio).sum(), 0.0))
