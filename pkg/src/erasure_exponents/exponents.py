"""Single-parameter exponent for decoding with an erasure option.

For a symmetric ensemble (gamma_y independent of y) the exponent of the
probability of not decoding correctly is

    E1*(R, T) = sup_{s >= 0} Lambda(R, s) + gamma(1 - s) - s T - ln|Y|

with s_R solving gamma(s) - s gamma'(s) = R and

    Lambda(R, s) = gamma(s) - R         for s >= s_R
                 = s gamma'(s_R)        for s <  s_R.

The undetected-error exponent is E2* = E1* + T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from functools import lru_cache

from scipy.optimize import bisect

from .ensemble import Ensemble, gamma, gamma_prime, mutual_information
from .errors import DomainError, ExponentError, InvalidThreshold, RateOutOfRange
from .search import ternary_max

S_R_RESIDUAL = 1e-10
TILTED = "tilted"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class ExponentResult:
    R: float
    T: float
    s_r: float
    s_opt: float
    e1_star: float
    e2_star: float
    branch: str
    forney_e1: float | None = None
    gap: float | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=64)
def _capacity(ens: Ensemble) -> float:
    return mutual_information(ens)


def check_rate(ens: Ensemble, R: float) -> None:
    cap = _capacity(ens)
    if not (0.0 <= R < cap):
        raise RateOutOfRange(f"need 0 <= R < I(X;Y) = {cap:.12g}, got R = {R!r}")


def check_threshold(T: float) -> None:
    if not T >= 0.0:
        raise InvalidThreshold(f"threshold must be >= 0, got {T!r}")


def _boundary_residual(s: float, ens: Ensemble, R: float) -> float:
    return gamma(ens, s) - s * gamma_prime(ens, s) - R


@lru_cache(maxsize=4096)
def solve_s_r(ens: Ensemble, R: float) -> float:
    """Root of gamma(s) - s gamma'(s) = R on [0, 1), by bisection."""
    check_rate(ens, R)
    if R == 0.0:
        return 0.0
    # with zero channel entries gamma is only defined for s > 0
    lo = 0.0 if ens.all_positive else 1e-12
    f_lo = _boundary_residual(lo, ens, R)
    if f_lo >= 0.0:
        return lo
    if _boundary_residual(1.0, ens, R) <= 0.0:
        raise RateOutOfRange(f"R = {R!r} is not below I(X;Y) to working precision")
    s = bisect(_boundary_residual, lo, 1.0, args=(ens, R), xtol=1e-15, maxiter=200)
    resid = _boundary_residual(s, ens, R)
    if abs(resid) > S_R_RESIDUAL:
        raise DomainError(f"s_R bisection stalled at residual {resid:.3e}")
    return s


def lambda_exp(ens: Ensemble, R: float, s: float) -> float:
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    s_r = solve_s_r(ens, R)
    if s >= s_r:
        return gamma(ens, s) - R
    return s * gamma_prime(ens, s_r)


def lambda_branch(ens: Ensemble, R: float, s: float) -> str:
    return TILTED if s >= solve_s_r(ens, R) else BOUNDARY


def e1_star_at(ens: Ensemble, R: float, T: float, s: float) -> float:
    """Objective of the sup at a fixed s (may be negative)."""
    return lambda_exp(ens, R, s) + gamma(ens, 1.0 - s) - s * T - math.log(ens.n_outputs)


def e1_star(ens: Ensemble, R: float, T: float, s_max: float = 1.0, tol: float = 1e-9) -> ExponentResult:
    check_threshold(T)
    s_r = solve_s_r(ens, R)
    if s_max > 1.0 and not ens.all_positive:
        raise DomainError("s_max > 1 needs a channel without zero entries")
    if s_max < 0:
        raise DomainError(f"s_max must be >= 0, got {s_max}")
    hi = s_max if ens.all_positive else min(s_max, 1.0 - 1e-9)
    s_opt, value = ternary_max(lambda s: e1_star_at(ens, R, T, s), 0.0, hi, tol)
    if value < 0.0:
        # s = 0 always attains 0
        s_opt, value = 0.0, 0.0
    branch = TILTED if s_opt >= s_r else BOUNDARY
    return ExponentResult(R=R, T=T, s_r=s_r, s_opt=s_opt, e1_star=value,
                          e2_star=value + T, branch=branch)


def _failed(R: float, T: float, exc: Exception) -> ExponentResult:
    nan = float("nan")
    return ExponentResult(R=R, T=T, s_r=nan, s_opt=nan, e1_star=nan, e2_star=nan,
                          branch="error", error=f"{type(exc).__name__}: {exc}")


def sweep(ens: Ensemble, R_list, T_list, forney: bool = False, s_max: float = 1.0,
          tol: float = 1e-9, forney_kwargs: dict | None = None) -> list[ExponentResult]:
    """Evaluate every (R, T) pair, R outer and T inner.

    A failing point becomes a row with ``error`` set; the sweep goes on.
    With ``forney=True`` each row also carries Forney's E1 and the gap
    ``e1_star - forney_e1``.
    """
    from .forney import e1_forney

    rows = []
    for R in R_list:
        for T in T_list:
            try:
                res = e1_star(ens, R, T, s_max=s_max, tol=tol)
                if forney:
                    fr = e1_forney(ens, R, T, **(forney_kwargs or {}))
                    res = ExponentResult(**{**res.to_dict(), "forney_e1": fr.e1,
                                            "gap": res.e1_star - fr.e1})
            except ExponentError as exc:
                res = _failed(R, T, exc)
            rows.append(res)
    return rows


def monotonicity_violations(rows: list[ExponentResult], tol: float = 1e-9) -> list[tuple[str, ExponentResult, ExponentResult]]:
    """Pairs where E1* increases with R at fixed T, or with T at fixed R."""
    ok = [r for r in rows if r.error is None]
    out = []
    for key, along in (("R", "T"), ("T", "R")):
        groups: dict[float, list[ExponentResult]] = {}
        for r in ok:
            groups.setdefault(getattr(r, along), []).append(r)
        for grp in groups.values():
            grp.sort(key=lambda r: getattr(r, key))
            for a, b in zip(grp, grp[1:]):
                if b.e1_star > a.e1_star + tol:
                    out.append((key, a, b))
    return out
