import math

import numpy as np
import pytest

from erasure_exponents.ensemble import bsc, mutual_information, validate
from erasure_exponents.errors import DomainError
from erasure_exponents.exponents import e1_star
from erasure_exponents.forney import e0_forney, e0_gallager, e1_forney, er_gallager


def _e0_loops(ens, s, rho):
    """Plain-loop recomputation of E0(s, rho)."""
    total = 0.0
    for y in range(ens.n_outputs):
        a = sum(ens.input_dist[x] * ens.channel[x, y] ** (1 - s) for x in range(ens.n_inputs))
        b = sum(ens.input_dist[x] * ens.channel[x, y] ** (s / rho) for x in range(ens.n_inputs))
        total += a * b ** rho
    return -math.log(total)


def test_e0_forney_values(bsc01, tern):
    # 50-digit evaluation
    assert e0_forney(bsc01, 0.3, 0.6) == pytest.approx(0.15406176858649520715, abs=1e-14)
    for ens in (bsc01, tern):
        for s, rho in ((0.1, 0.2), (0.5, 0.9), (0.0, 1.0), (0.7, 0.7)):
            assert e0_forney(ens, s, rho) == pytest.approx(_e0_loops(ens, s, rho), abs=1e-13)
    assert e0_forney(bsc01, 0.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert e0_forney(bsc01, 0.0, 0.0) == 0.0


@pytest.mark.parametrize("s, rho", [(0.5, 0.4), (-0.1, 0.5), (0.1, 0.0), (0.5, 1.2)])
def test_e0_forney_domain(bsc01, s, rho):
    with pytest.raises(DomainError):
        e0_forney(bsc01, s, rho)


def test_e0_gallager(bsc01):
    assert e0_gallager(bsc01, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert e0_gallager(bsc01, 1.0) == pytest.approx(0.22314355131420975577, abs=1e-14)
    assert e0_gallager(bsc01, 1.0) == pytest.approx(e0_forney(bsc01, 0.5, 1.0), abs=1e-14)
    with pytest.raises(DomainError):
        e0_gallager(bsc01, 1.5)


@pytest.mark.parametrize("rho", np.round(np.arange(1, 11) / 10, 1))
def test_forney_gallager_identity(bsc01, tern, rho):
    for ens in (bsc01, tern, bsc(0.05), bsc(0.2)):
        assert abs(e0_forney(ens, rho / (1 + rho), rho) - e0_gallager(ens, rho)) <= 1e-12


def test_er_gallager(bsc01):
    cap = mutual_information(bsc01)
    assert er_gallager(bsc01, cap) == 0.0
    assert er_gallager(bsc01, 0.5) == 0.0
    assert er_gallager(bsc01, 0.0) == pytest.approx(e0_gallager(bsc01, 1.0), abs=1e-12)
    rho = np.linspace(0, 1, 2001)
    for R in (0.05, 0.15, 0.3):
        grid = max(e0_gallager(bsc01, r) - r * R for r in rho)
        assert er_gallager(bsc01, R) == pytest.approx(grid, abs=1e-7)
    with pytest.raises(DomainError):
        er_gallager(bsc01, -0.1)


def test_e1_forney_result_shape(bsc01):
    res = e1_forney(bsc01, 0.13, 0.05)
    assert 0.0 <= res.s_opt <= res.rho_opt <= 1.0
    assert not res.vacuous and res.e1 > 0
    assert res.grid_resolution[0] == pytest.approx(1 / 400)
    assert res.e1 == pytest.approx(e0_forney(bsc01, res.s_opt, res.rho_opt) - res.rho_opt * 0.13
                                   - res.s_opt * 0.05, abs=1e-14)


def test_e1_forney_feasible_dominance(bsc01, rng):
    R, T = 0.13, 0.05
    res = e1_forney(bsc01, R, T)
    for _ in range(500):
        rho = rng.uniform(1e-6, 1.0)
        s = rng.uniform(0.0, rho)
        assert res.e1 >= e0_forney(bsc01, s, rho) - rho * R - s * T - 1e-9


def test_e1_forney_grid_doubling(bsc01):
    a = e1_forney(bsc01, 0.13, 0.05)
    b = e1_forney(bsc01, 0.13, 0.05, coarse_n=800)
    assert abs(a.e1 - b.e1) < 1e-4


def test_e1_forney_vacuous():
    res = e1_forney(bsc(0.1), 0.3, 2.0)
    assert res.vacuous and res.e1 == 0.0 and res.s_opt == 0.0 and res.rho_opt == 0.0


def test_dominance_chain(bsc01, tern):
    for ens in (bsc01, tern):
        cap = mutual_information(ens)
        for R in np.linspace(0.02, 0.9 * cap, 5):
            new = e1_star(ens, float(R), 0.0).e1_star
            fr = e1_forney(ens, float(R), 0.0, coarse_n=200).e1
            assert new >= fr - 1e-3
            assert fr >= er_gallager(ens, float(R)) - 1e-3


def test_zero_entry_channel_finite():
    ens = validate([0.5, 0.5], [[0.9, 0.1, 0.0], [0.0, 0.1, 0.9]])
    assert math.isfinite(e0_forney(ens, 0.0, 0.5))
    assert math.isfinite(e1_forney(ens, 0.1, 0.05, coarse_n=50).e1)
