"""Moments of the binary distance enumerator.

For a received word y, the number N of incorrect codewords at distance
d = n delta is Binomial(M - 1, q) with q = C(n, d) / 2^n. Its s-th moment
grows like

    exp(n s [R + h(delta) - ln 2])   inside G_R = [delta_GV, 1 - delta_GV]
    exp(n   [R + h(delta) - ln 2])   outside G_R.

``exact_moment_exponent`` evaluates E{N^s} from the binomial law itself
(exact log-binomial q, saddle-point accurate log-pmf), so it can be used
to check those rates at finite n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, asdict

import numpy as np
from scipy.special import logsumexp, rel_entr

from .bsc import LN2, binary_entropy
from .errors import DomainError, TruncationWarning

BOUNDARY_TOL = 1e-12
LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# Poisson summation: a Gaussian-shaped summand sampled every sigma/8 lattice
# points reproduces the full lattice sum up to a factor exp(-2 pi^2 64).
STRIDE_DIVISOR = 8.0


def in_g_r(R: float, delta: float) -> bool:
    if not 0.0 <= R <= LN2:
        raise DomainError(f"need 0 <= R <= ln 2, got {R}")
    return R + binary_entropy(delta) - LN2 >= -BOUNDARY_TOL


def predicted_moment_exponent(R: float, s: float, delta: float) -> float:
    if not 0.0 < s <= 1.0:
        raise DomainError(f"moment order must lie in (0, 1], got {s}")
    e = R + binary_entropy(delta) - LN2
    return s * e if in_g_r(R, delta) else e


# -- log pmf of Binomial(m, q) for very large m --------------------------------

_SFE = [0.0] + [math.lgamma(k + 1.0) - (k + 0.5) * math.log(k) + k - LN_SQRT_2PI for k in range(1, 16)]


def _stirlerr(x):
    """ln Gamma(x+1) - (x + 1/2) ln x + x - ln sqrt(2 pi), elementwise."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= 15.0
    if np.any(small):
        xs = x[small]
        out[small] = np.where(
            xs == np.round(xs),
            np.take(_SFE, np.clip(np.round(xs).astype(int), 0, 15)),
            np.array([math.lgamma(v + 1.0) - (v + 0.5) * math.log(v) + v - LN_SQRT_2PI if v > 0 else 0.0
                      for v in xs]),
        )
    big = ~small
    if np.any(big):
        xb = x[big]
        x2 = xb * xb
        out[big] = (1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680 - (1 / 1188) / x2) / x2) / x2) / x2) / xb
    return out


def _bd0(x, np_, diff=None):
    """x ln(x / np) + np - x without cancellation when x is close to np.

    ``diff`` may supply x - np computed more accurately than the caller's
    rounded x and np allow.
    """
    x = np.asarray(x, dtype=float)
    np_ = np.asarray(np_, dtype=float)
    x, np_ = np.broadcast_arrays(x, np_)
    diff = x - np_ if diff is None else np.broadcast_to(np.asarray(diff, dtype=float), x.shape)
    out = np.empty(x.shape)
    close = np.abs(diff) < 0.1 * (x + np_)
    if np.any(close):
        xc, nc, dc = x[close], np_[close], diff[close]
        v = dc / (xc + nc)
        acc = dc * v
        ej = 2.0 * xc * v
        v2 = v * v
        for j in range(1, 40):
            ej = ej * v2
            term = ej / (2 * j + 1)
            acc = acc + term
            if np.all(np.abs(term) <= 1e-17 * np.abs(acc)):
                break
        out[close] = acc
    far = ~close
    if np.any(far):
        xf, nf = x[far], np_[far]
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(xf > 0, xf * np.log(xf / nf), 0.0) + nf - xf
        out[far] = val
    return out


_SPLIT = 134217729.0  # 2^27 + 1


def _two_prod(a: float, b: float) -> tuple[float, float]:
    """a * b = hi + lo exactly (Dekker)."""
    hi = a * b
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
    return hi, lo


def binom_logpmf(k, m: float, q: float, log_q: float | None = None):
    """ln P{N = k} for N ~ Binomial(m, q); accurate for m far beyond 2^53."""
    k = np.asarray(k, dtype=float)
    if log_q is None:
        log_q = math.log(q)
    out = np.empty(k.shape)
    zero = k == 0
    full = k == m
    mid = ~(zero | full)
    out[zero] = m * math.log1p(-q)
    out[full] = m * log_q
    if np.any(mid):
        km = k[mid]
        rest = m - km
        hi, lo = _two_prod(m, q)
        dev = (km - hi) - lo  # k - mq; the first difference is exact near the mean
        out[mid] = (_stirlerr(np.array([m]))[0] - _stirlerr(km) - _stirlerr(rest)
                    - _bd0(km, hi, dev) - _bd0(rest, m * (1.0 - q), -dev)
                    + 0.5 * np.log(m / (2.0 * math.pi * km * rest)))
    return out


def _log_chernoff(k: float, m: float, q: float) -> float:
    """ln of exp(-m D(k/m || q)), a bound on the tail beyond k."""
    return -float(_bd0(k, m * q) + _bd0(m - k, m * (1.0 - q)))


def _first_below(f, start: float, direction: int, limit: float, target: float):
    """Nearest integer from ``start`` (moving in ``direction``) with f <= target, or None."""
    step = 1.0
    prev = start
    cur = start
    while True:
        if (direction > 0 and cur > limit) or (direction < 0 and cur < limit):
            return None
        if f(cur) <= target:
            break
        prev = cur
        cur = start + direction * step
        step *= 2.0
    lo, hi = prev, cur
    while abs(hi - lo) > 1.0:
        mid = math.floor(0.5 * (lo + hi)) if direction > 0 else math.ceil(0.5 * (lo + hi))
        if mid in (lo, hi):
            break
        if f(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def truncation_window(m: float, q: float, tail_tol: float = 1e-15) -> tuple[float, float, bool]:
    """Integer range [lo, hi] holding at least 1 - tail_tol of Binomial(m, q).

    Each end is cut where a Chernoff bound puts at most tail_tol/2 beyond
    it. The flag reports whether the upper end reached the support edge m.
    """
    target = math.log(tail_tol / 2.0)
    mean = m * q
    up = _first_below(lambda k: _log_chernoff(k, m, q), float(math.ceil(mean)), +1, m, target)
    down = _first_below(lambda k: _log_chernoff(k, m, q), float(math.floor(mean)), -1, 0.0, target)
    hi = m if up is None else up - 1.0
    lo = 0.0 if down is None else down + 1.0
    return lo, hi, up is None


@dataclass(frozen=True)
class MomentQuery:
    n: int
    R: float
    s: float
    delta_requested: float

    def __post_init__(self):
        if not 1 <= self.n <= 4096:
            raise DomainError(f"block length must lie in [1, 4096], got {self.n}")
        if not 0.0 < self.s <= 1.0:
            raise DomainError(f"moment order must lie in (0, 1], got {self.s}")
        if not 0.0 <= self.delta_requested <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta_requested}")
        if self.n * self.R > 700.0:
            raise DomainError("e^{nR} overflows double precision; use n R <= 700")
        if self.m < 1:
            raise DomainError(f"need M - 1 >= 1, got M = {round(math.exp(self.n * self.R))}")

    @property
    def k(self) -> int:
        return int(round(self.n * self.delta_requested))

    @property
    def delta(self) -> float:
        return self.k / self.n

    @property
    def m(self) -> float:
        return float(round(math.exp(self.n * self.R)) - 1)

    @property
    def log_q(self) -> float:
        return math.log(math.comb(self.n, self.k)) - self.n * LN2


def log_moment(m: float, q: float, s: float, log_q: float | None = None, tail_tol: float = 1e-15) -> float:
    """ln E{N^s} for N ~ Binomial(m, q)."""
    lo, hi, clipped = truncation_window(m, q, tail_tol)
    if clipped:
        warnings.warn(f"truncation window reached the support edge m = {m:g}", TruncationWarning, stacklevel=2)
    sigma = math.sqrt(m * q * (1.0 - q))
    stride = max(1.0, math.floor(sigma / STRIDE_DIVISOR))
    lo = max(lo, 1.0)
    count = int((hi - lo) // stride) + 1 if hi >= lo else 0
    parts = []
    if count > 0:
        ks = lo + stride * np.arange(count, dtype=float)
        parts.append(binom_logpmf(ks, m, q, log_q) + s * np.log(ks) + math.log(stride))
    if count == 0 or lo > 1.0:
        # the single-codeword term dominates when the mean is tiny
        parts.append(binom_logpmf(np.array([1.0]), m, q, log_q))
    if not parts:
        return -math.inf
    return float(logsumexp(np.concatenate(parts)))


def exact_moment_exponent(n: int, R: float, s: float, delta: float, tail_tol: float = 1e-15) -> float:
    qry = MomentQuery(n, R, s, delta)
    lq = qry.log_q
    return log_moment(qry.m, math.exp(lq), s, lq, tail_tol) / n


@dataclass(frozen=True)
class MomentReport:
    n: int
    R: float
    s: float
    delta: float
    delta_requested: float
    regime: str
    predicted: float
    oracle: float
    abs_error: float

    def to_dict(self) -> dict:
        return asdict(self)


def verify_point(n: int, R: float, s: float, delta: float, tail_tol: float = 1e-15) -> MomentReport:
    qry = MomentQuery(n, R, s, delta)
    pred = predicted_moment_exponent(R, s, qry.delta)
    orc = exact_moment_exponent(n, R, s, delta, tail_tol)
    regime = "G_R" if in_g_r(R, qry.delta) else "complement"
    return MomentReport(n, R, s, qry.delta, delta, regime, pred, orc, abs(orc - pred))


def verify_ladder(ns, R: float, s_list, deltas, tail_tol: float = 1e-15) -> list[MomentReport]:
    """Reports ordered by delta, then s, then n (so each ladder is contiguous)."""
    return [verify_point(n, R, s, d, tail_tol) for d in deltas for s in s_list for n in ns]


# -- appendix bounds -------------------------------------------------------------

def binary_divergence(a: float, b: float) -> float:
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise DomainError(f"D(a||b) needs a, b in (0, 1), got {a}, {b}")
    return float(rel_entr(a, b) + rel_entr(1.0 - a, 1.0 - b))


def divergence_lower_bound(a: float, b: float) -> float:
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise DomainError(f"bound needs a, b in (0, 1), got {a}, {b}")
    return a * (math.log(a / b) - 1.0)


@dataclass(frozen=True)
class TailBound:
    log_bound: float
    vacuous: bool


def chernoff_tail_bound(n: int, R: float, A: float, delta: float) -> TailBound:
    """ln of the bound on Pr{N >= e^{nA}}: -e^{nA} (n [ln 2 - R - h(delta) + A] - 1)."""
    if not 0.0 <= A < R:
        raise DomainError(f"need 0 <= A < R, got A={A}, R={R}")
    bracket = n * (LN2 - R - binary_entropy(delta) + A) - 1.0
    if bracket <= 0.0:
        return TailBound(0.0, True)
    return TailBound(-math.exp(n * A) * bracket, False)
