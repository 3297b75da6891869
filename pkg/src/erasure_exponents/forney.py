"""Forney's two-parameter erasure exponent and Gallager's E_r, for comparison.

    E1(R, T) = max_{0 <= s <= rho <= 1} E0(s, rho) - rho R - s T
    E0(s, rho) = -ln sum_y [sum_x P(x) P(y|x)^(1-s)] [sum_x P(x) P(y|x)^(s/rho)]^rho

Zero transition probabilities are dropped from every inner sum (0^u = 0 for
u >= 0), which is the continuous extension from s > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
from scipy.special import logsumexp

from .ensemble import Ensemble
from .errors import DomainError
from .search import ternary_max


@dataclass(frozen=True)
class ForneyResult:
    e1: float
    s_opt: float
    rho_opt: float
    grid_resolution: tuple[float, float]
    vacuous: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _log_moment(ens: Ensemble, expo) -> np.ndarray:
    """ln sum_x P(x) P(y|x)^expo for every y; ``expo`` broadcasts, result has a trailing |Y| axis."""
    expo = np.asarray(expo, dtype=float)[..., None, None]
    lc = ens.log_channel
    mask = ens.channel > 0
    with np.errstate(invalid="ignore"):
        terms = np.where(mask, ens.log_input[:, None] + expo * lc, -np.inf)
    return logsumexp(terms, axis=-2)


def _e0_st(ens: Ensemble, s, t, rho) -> np.ndarray:
    """E0 with the inner exponent given directly as t = s / rho."""
    rho = np.asarray(rho, dtype=float)
    la = _log_moment(ens, 1.0 - np.asarray(s, dtype=float))
    lb = _log_moment(ens, t)
    return -logsumexp(la + rho[..., None] * lb, axis=-1)


def e0_forney(ens: Ensemble, s: float, rho: float) -> float:
    if s == 0.0 and rho == 0.0:
        return 0.0
    if not (0.0 < rho <= 1.0 and 0.0 <= s <= rho):
        raise DomainError(f"need 0 < rho <= 1 and 0 <= s <= rho, got s={s}, rho={rho}")
    return float(_e0_st(ens, s, s / rho, rho))


def e0_gallager(ens: Ensemble, rho: float) -> float:
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"need 0 <= rho <= 1, got {rho}")
    lm = _log_moment(ens, 1.0 / (1.0 + rho))
    return float(-logsumexp((1.0 + rho) * lm))


def er_gallager(ens: Ensemble, R: float, tol: float = 1e-10) -> float:
    if R < 0:
        raise DomainError(f"rate must be >= 0, got {R}")
    _, value = ternary_max(lambda r: e0_gallager(ens, r) - r * R, 0.0, 1.0, tol)
    return max(value, 0.0)


def _objective(ens: Ensemble, R: float, T: float, rho, t) -> np.ndarray:
    s = t * rho
    return _e0_st(ens, s, t, rho) - rho * R - s * T


def _best(vals: np.ndarray, rho: np.ndarray, t: np.ndarray):
    # arrays are laid out rho-major with t ascending, so argmax prefers small rho, then small s
    i = int(np.argmax(vals))
    return float(vals.flat[i]), float(rho.flat[i]), float(t.flat[i])


def e1_forney(ens: Ensemble, R: float, T: float, coarse_n: int = 400,
              refine_iters: int = 6, refine_n: int = 17) -> ForneyResult:
    """Grid maximization of Forney's E1 over the triangle 0 <= s <= rho <= 1.

    The coarse pass covers ``coarse_n`` values of rho in (0, 1] times
    ``coarse_n`` values of t = s/rho in [0, 1]. Each refinement round lays a
    ``refine_n`` x ``refine_n`` grid around the incumbent and shrinks the
    window 4x. The corner s = rho = 0 enters with its limit value 0.
    """
    if coarse_n < 2:
        raise DomainError("coarse_n must be >= 2")
    step = 1.0 / coarse_n
    rho_axis = np.linspace(step, 1.0, coarse_n)
    t_axis = np.linspace(0.0, 1.0, coarse_n)
    rho, t = np.meshgrid(rho_axis, t_axis, indexing="ij")
    best = _best(_objective(ens, R, T, rho, t), rho, t)
    if best[0] < 0.0:
        best = (0.0, 0.0, 0.0)

    half = step
    for _ in range(refine_iters):
        _, r0, t0 = best
        r_ax = np.unique(np.clip(np.linspace(r0 - half, r0 + half, refine_n), step * 1e-6, 1.0))
        t_ax = np.unique(np.clip(np.linspace(t0 - half, t0 + half, refine_n), 0.0, 1.0))
        rho, t = np.meshgrid(r_ax, t_ax, indexing="ij")
        cand = _best(_objective(ens, R, T, rho, t), rho, t)
        if cand[0] > best[0]:
            best = cand
        half /= 4.0

    value, r_opt, t_opt = best
    final = 2.0 * half * 4.0 / (refine_n - 1) if refine_iters else step
    return ForneyResult(e1=value, s_opt=t_opt * r_opt, rho_opt=r_opt,
                        grid_resolution=(step, final), vacuous=value <= 0.0)
