"""Brute-force check of the general-DMC exponents over conditional types.

A conditional type Q(x|y) together with the output composition P^(y)
defines

    c(Q) = H_Q(X|Y) + E_Q ln P(X)         (rate budget; G_R is R + c >= 0)
    l(Q) = E_Q ln P(Y|X).

The moment exponent of the incorrect-codeword likelihood sum is

    Lambda(R, s) = -(R + max_{Q in closure(G_R^c)} [c(Q) + s l(Q)])

and Delta(R) = min_{Q in G_R} -l(Q). Both objective and constraint are sums
over output letters of per-column terms, so the search enumerates every
column but the last on a simplex grid and answers the last column from a
table sorted by its share of the constraint.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .ensemble import Ensemble, gamma_y, gamma_y_prime
from .errors import AlphabetTooLarge, DomainError
from .exponents import check_rate, lambda_exp, solve_s_r

MAX_ALPHABET = 3
COLUMN_TOL = 1e-12
_CHUNK = 1 << 21


@dataclass(frozen=True, eq=False)
class ConditionalType:
    q: np.ndarray            # q[x, y] = Q(x|y)
    composition: np.ndarray  # P^(y)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        comp = np.asarray(self.composition, dtype=float)
        if q.ndim != 2 or comp.shape != (q.shape[1],):
            raise DomainError(f"shape mismatch: q {q.shape}, composition {comp.shape}")
        if np.any(q < -COLUMN_TOL) or np.any(q > 1 + COLUMN_TOL):
            raise DomainError("conditional type entries must lie in [0, 1]")
        if np.any(np.abs(q.sum(axis=0) - 1.0) > COLUMN_TOL):
            raise DomainError("each column of Q(x|y) must sum to 1")
        if np.any(comp < 0) or abs(comp.sum() - 1.0) > COLUMN_TOL:
            raise DomainError("composition must be a probability vector")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "composition", comp)


@dataclass(frozen=True, eq=False)
class OracleResult:
    value: float
    maximizer: ConditionalType
    on_boundary: bool
    residual: float  # R + c(maximizer)


def _uniform(ens: Ensemble) -> np.ndarray:
    return np.full(ens.n_outputs, 1.0 / ens.n_outputs)


def _composition(ens: Ensemble, composition) -> np.ndarray:
    return _uniform(ens) if composition is None else np.asarray(composition, dtype=float)


def _masked_dot(q: np.ndarray, logp: np.ndarray) -> np.ndarray:
    """sum_x q_x ln p_x along the last axis, -inf where q puts mass on p = 0."""
    with np.errstate(invalid="ignore"):
        terms = np.where(q > 0, q * logp, 0.0)
    return terms.sum(axis=-1)


def _c_col(ens: Ensemble, q: np.ndarray) -> np.ndarray:
    """H(q) + sum_x q_x ln P(x) for column vectors stored on the last axis."""
    return entr(q).sum(axis=-1) + _masked_dot(q, ens.log_input)


def _l_col(ens: Ensemble, q: np.ndarray, y: int) -> np.ndarray:
    return _masked_dot(q, ens.log_channel[:, y])


def constraint(ens: Ensemble, qt: ConditionalType, R: float) -> float:
    """R + H_Q(X|Y) + E_Q ln P(X); nonnegative exactly on G_R."""
    cols = qt.q.T
    return float(R + np.dot(qt.composition, _c_col(ens, cols)))


def objective(ens: Ensemble, qt: ConditionalType, s: float) -> float:
    """H_Q(X|Y) + E_Q ln P(X) + s E_Q ln P(Y|X)."""
    cols = qt.q.T
    val = _c_col(ens, cols)
    if s != 0.0:
        val = val + s * np.array([_l_col(ens, cols[y], y) for y in range(ens.n_outputs)])
    w = qt.composition
    return float(np.sum(np.where(w > 0, w * val, 0.0)))


def tilted_q(ens: Ensemble, s: float, composition=None) -> ConditionalType:
    """Q(x|y) proportional to P(x) P(y|x)^s."""
    cols = []
    for y in range(ens.n_outputs):
        g = gamma_y(ens, s, y)  # raises DomainError outside the domain
        col = ens.channel[:, y]
        with np.errstate(divide="ignore"):
            logw = ens.log_input + np.where(col > 0, s * ens.log_channel[:, y], -np.inf)
        cols.append(np.exp(logw + g))
    return ConditionalType(np.array(cols).T, _composition(ens, composition))


def simplex_grid(size: int, grid_res: float) -> np.ndarray:
    """All points of the probability simplex in R^size with coordinates on multiples of grid_res."""
    K = int(round(1.0 / grid_res))
    if size == 2:
        a = np.arange(K + 1) / K
        return np.column_stack([a, 1.0 - a])
    pts = [(i, j, K - i - j) for i in range(K + 1) for j in range(K + 1 - i)]
    return np.array(pts, dtype=float) / K


def _default_res(ens: Ensemble) -> float:
    return 1e-3 if ens.n_inputs == 2 else 1e-2


def _check_size(ens: Ensemble) -> None:
    if ens.n_inputs > MAX_ALPHABET or ens.n_outputs > MAX_ALPHABET:
        raise AlphabetTooLarge(
            f"grid oracle handles |X|, |Y| <= {MAX_ALPHABET}, got {ens.n_inputs}x{ens.n_outputs}"
        )


def _constrained_max(f_cols, c_cols, weights, R, feasible):
    """max sum_y w_y f_y(i_y) subject to R + sum_y w_y c_y(i_y) <= 0 (feasible='le') or >= 0 ('ge').

    Returns (value, index tuple) or (-inf, None) when nothing is feasible.
    """
    active = [y for y in range(len(weights)) if weights[y] > 0]
    last = max(active, key=lambda y: weights[y])
    lead = [y for y in active if y != last]
    wl = weights[last]

    order = np.argsort(c_cols[last], kind="stable")
    c_sorted = c_cols[last][order]
    f_sorted = f_cols[last][order]
    if feasible == "le":
        run = np.maximum.accumulate(f_sorted)
        # position of the first occurrence of each running maximum
        pos = np.maximum.accumulate(np.where(f_sorted >= run, np.arange(f_sorted.size), 0))
    else:
        rev = f_sorted[::-1]
        run = np.maximum.accumulate(rev)[::-1]
        idx = np.arange(f_sorted.size)[::-1]
        pos = np.minimum.accumulate(np.where(rev >= np.maximum.accumulate(rev), idx, f_sorted.size))[::-1]

    best_val, best_idx = -math.inf, None
    sizes = [f_cols[y].size for y in lead]
    total = int(np.prod(sizes)) if lead else 1
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idxs = np.unravel_index(flat, sizes) if lead else ()
        part_f = np.zeros(flat.size)
        part_c = np.full(flat.size, R)
        for y, ix in zip(lead, idxs):
            part_f = part_f + weights[y] * f_cols[y][ix]
            part_c = part_c + weights[y] * c_cols[y][ix]
        budget = -part_c / wl
        if feasible == "le":
            j = np.searchsorted(c_sorted, budget, side="right") - 1
            ok = j >= 0
        else:
            j = np.searchsorted(c_sorted, budget, side="left")
            ok = j < c_sorted.size
        jj = np.where(ok, j, 0)
        vals = np.where(ok, part_f + wl * run[jj], -np.inf)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            choice = {y: int(ix[k]) for y, ix in zip(lead, idxs)}
            choice[last] = int(order[pos[jj[k]]])
            best_idx = choice
    return best_val, best_idx


def _columns(ens: Ensemble, grid: np.ndarray):
    """Constraint share c and per-output log-likelihood share l of every grid column."""
    c = _c_col(ens, grid)
    ls = [_l_col(ens, grid, y) for y in range(ens.n_outputs)]
    return c, ls


def _assemble(ens: Ensemble, grid: np.ndarray, choice: dict, comp: np.ndarray) -> ConditionalType:
    cols = []
    for y in range(ens.n_outputs):
        cols.append(grid[choice[y]] if y in choice else ens.input_dist)
    return ConditionalType(np.array(cols).T, comp)


def _search(ens, R, f_of, feasible, grid_res, composition):
    _check_size(ens)
    comp = _composition(ens, composition)
    grid = simplex_grid(ens.n_inputs, grid_res or _default_res(ens))
    c, ls = _columns(ens, grid)
    f_cols = [f_of(c, ls[y]) for y in range(ens.n_outputs)]
    c_cols = [c] * ens.n_outputs
    val, choice = _constrained_max(f_cols, c_cols, comp, R, feasible)
    if choice is None:
        raise DomainError("no grid point satisfies the rate constraint; refine the grid")
    # unconstrained grid optimum, to tell whether the constraint binds
    free = {y: int(np.argmax(f_cols[y])) for y in range(ens.n_outputs) if comp[y] > 0}
    free_c = R + sum(comp[y] * c[free[y]] for y in free)
    return val, _assemble(ens, grid, choice, comp), free_c


def _lin(c, l, s):
    with np.errstate(invalid="ignore"):
        return c + s * l if s != 0.0 else c


def b_exponent_oracle(ens: Ensemble, R: float, s: float, grid_res: float | None = None,
                      composition=None) -> OracleResult:
    """Lambda(R, s) by grid search over the closure of G_R^c."""
    check_rate(ens, R)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    val, qt, free_c = _search(ens, R, lambda c, l: _lin(c, l, s), "le", grid_res, composition)
    # the free optimum lies in G_R exactly when the constraint is active
    return OracleResult(value=-(R + val), maximizer=qt, on_boundary=bool(free_c > 0.0),
                        residual=constraint(ens, qt, R))


def a_exponent_oracle(ens: Ensemble, R: float, s: float, grid_res: float | None = None,
                      composition=None) -> OracleResult:
    """-s (R + max_{Q in G_R} [c(Q) + l(Q)]), expected to equal s Delta(R)."""
    check_rate(ens, R)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    val, qt, free_c = _search(ens, R, lambda c, l: _lin(c, l, 1.0), "ge", grid_res, composition)
    return OracleResult(value=-s * (R + val), maximizer=qt, on_boundary=bool(free_c < 0.0),
                        residual=constraint(ens, qt, R))


def delta_r_oracle(ens: Ensemble, R: float, grid_res: float | None = None, composition=None) -> float:
    """min over G_R of E_Q ln 1/P(Y|X), by grid search."""
    check_rate(ens, R)
    val, _, _ = _search(ens, R, lambda c, l: l, "ge", grid_res, composition)
    return -val


def delta_r(ens: Ensemble, R: float, check: bool = False, grid_res: float | None = None,
            tol: float = 5e-3) -> float:
    """Delta(R) = gamma'(s_R); with ``check`` also compare against the grid oracle."""
    value = gamma_y_prime(ens, solve_s_r(ens, R), 0)
    if check:
        orc = delta_r_oracle(ens, R, grid_res)
        if abs(orc - value) > tol:
            raise DomainError(f"Delta(R) closed form {value:.6g} disagrees with grid oracle {orc:.6g}")
    return value


@dataclass(frozen=True)
class OracleRow:
    R: float
    s: float
    s_r: float
    lambda_closed: float
    lambda_oracle: float
    abs_error: float
    on_boundary: bool


def compare_lambda(ens: Ensemble, R_list, s_list, grid_res: float | None = None) -> list[OracleRow]:
    rows = []
    for R, s in itertools.product(R_list, s_list):
        closed = lambda_exp(ens, R, s)
        orc = b_exponent_oracle(ens, R, s, grid_res)
        rows.append(OracleRow(R, s, solve_s_r(ens, R), closed, orc.value,
                              abs(orc.value - closed), orc.on_boundary))
    return rows
