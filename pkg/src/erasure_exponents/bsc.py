"""Closed-form exponent for the BSC with uniform random coding.

With beta = ln((1-p)/p), the Gilbert-Varshamov radius delta_GV(R) and the
tilted crossover p_s = p^s / (p^s + (1-p)^s), the objective is F(s) above
s_R and G(s) below it. The two curves touch at s_R, so the sign of
F'(s_R) = beta (p_{s_R} - p_{1-s_R}) - T decides which one carries the
maximum:

* F'(s_R) > 0: maximize F, optimum s2(p, T), independent of R;
* F'(s_R) < 0: maximize G, optimum s1(p, R, T);
* F'(s_R) = 0: the optimum is s_R itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import bisect
from scipy.special import entr, expit

from .errors import DomainError, InvalidThreshold, RateOutOfRange, ThresholdTooLarge
from .exponents import BOUNDARY, TILTED, ExponentResult

LN2 = math.log(2.0)
ZERO_SLOPE = 1e-10


@dataclass(frozen=True)
class BscParams:
    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 0.5:
            raise DomainError(f"BSC crossover must satisfy 0 < p < 1/2, got {self.p}")

    @property
    def beta(self) -> float:
        return math.log((1.0 - self.p) / self.p)

    @property
    def capacity(self) -> float:
        return LN2 - binary_entropy(self.p)


@dataclass(frozen=True)
class BscRegime:
    s_r: float
    slope: float
    slope_sign: int
    s_opt: float
    active_curve: str


def binary_entropy(delta: float) -> float:
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"h(delta) needs delta in [0, 1], got {delta}")
    return float(entr(delta) + entr(1.0 - delta))


def gv_distance(R: float) -> float:
    """Smaller root of h(delta) = ln 2 - R."""
    if not 0.0 <= R <= LN2:
        raise RateOutOfRange(f"need 0 <= R <= ln 2, got {R}")
    if R == 0.0:
        return 0.5
    if R == LN2:
        return 0.0
    target = LN2 - R
    return bisect(lambda d: binary_entropy(d) - target, 0.0, 0.5, xtol=1e-15, maxiter=200)


def p_tilt(p: float, s: float) -> float:
    return float(expit(-s * math.log((1.0 - p) / p)))


def _log_pow_sum(p: float, a: float) -> float:
    """ln[p^a + (1-p)^a]."""
    u, v = a * math.log(p), a * math.log1p(-p)
    m = max(u, v)
    return m + math.log(math.exp(u - m) + math.exp(v - m))


def _check(p: float, R: float) -> BscParams:
    bp = BscParams(p)
    if not 0.0 <= R < bp.capacity:
        raise RateOutOfRange(f"need 0 <= R < ln 2 - h(p) = {bp.capacity:.12g}, got {R}")
    return bp


def s_r_bsc(p: float, R: float) -> float:
    bp = _check(p, R)
    d = gv_distance(R)
    return math.log((1.0 - d) / d) / bp.beta


def mu0(p: float, R: float, s: float) -> float:
    _check(p, R)
    return s * math.log1p(-p) - _log_pow_sum(p, s) + LN2 - R


def mu(p: float, R: float, s: float) -> float:
    bp = _check(p, R)
    if s >= s_r_bsc(p, R):
        return mu0(p, R, s)
    return bp.beta * s * gv_distance(R)


def _tail(p: float, T: float, s: float) -> float:
    # s ln(1/(1-p)) - ln[p^(1-s) + (1-p)^(1-s)] - s T
    return -s * math.log1p(-p) - _log_pow_sum(p, 1.0 - s) - s * T


def curve_f(p: float, R: float, T: float, s: float) -> float:
    return mu0(p, R, s) + _tail(p, T, s)


def curve_g(p: float, R: float, T: float, s: float) -> float:
    bp = _check(p, R)
    return bp.beta * s * gv_distance(R) + _tail(p, T, s)


def s1(p: float, R: float, T: float) -> float:
    if T < 0:
        raise InvalidThreshold(f"threshold must be >= 0, got {T}")
    bp = _check(p, R)
    b, d = bp.beta, gv_distance(R)
    if b * d <= T:
        return 0.0
    return max(1.0 - math.log((b * (1.0 - d) + T) / (b * d - T)) / b, 0.0)


def s2(p: float, T: float) -> float:
    if T < 0:
        raise InvalidThreshold(f"threshold must be >= 0, got {T}")
    b = BscParams(p).beta
    if T >= b:
        raise ThresholdTooLarge(f"s2 needs T < beta = {b:.12g}; above it the decoder always erases")
    z0 = (math.sqrt(T * T + 4.0 * p * (1.0 - p) * (b * b - T * T)) - T) / (2.0 * p * (T + b))
    return math.log(z0) / b


def f_slope_at_s_r(p: float, R: float, T: float) -> float:
    """F'(s_R) = G'(s_R) = beta (p_{s_R} - p_{1-s_R}) - T."""
    b = BscParams(p).beta
    sr = s_r_bsc(p, R)
    return b * (p_tilt(p, sr) - p_tilt(p, 1.0 - sr)) - T


def regime(p: float, R: float, T: float) -> BscRegime:
    if T < 0:
        raise InvalidThreshold(f"threshold must be >= 0, got {T}")
    sr = s_r_bsc(p, R)
    slope = f_slope_at_s_r(p, R, T)
    if abs(slope) <= ZERO_SLOPE:
        return BscRegime(sr, slope, 0, sr, "F")
    if slope > 0:
        return BscRegime(sr, slope, 1, s2(p, T), "F")
    return BscRegime(sr, slope, -1, s1(p, R, T), "G")


def e1_star_bsc(p: float, R: float, T: float) -> ExponentResult:
    reg = regime(p, R, T)
    if reg.active_curve == "F":
        value = curve_f(p, R, T, reg.s_opt)
        branch = TILTED
    else:
        value = curve_g(p, R, T, reg.s_opt)
        branch = BOUNDARY
    if reg.s_opt == 0.0:
        value = 0.0
    return ExponentResult(R=R, T=T, s_r=reg.s_r, s_opt=reg.s_opt, e1_star=value,
                          e2_star=value + T, branch=branch)
