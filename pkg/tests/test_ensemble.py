import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import ternary
from erasure_exponents.ensemble import (
    bsc, check_symmetry, gamma, gamma_prime, gamma_y, load_channel, mutual_information,
    validate,
)
from erasure_exponents.errors import (
    AlphabetTooSmall, DomainError, NegativeEntry, NonStochastic, NotSymmetric,
)

H01 = -(0.1 * math.log(0.1) + 0.9 * math.log(0.9))


def test_validate_bsc():
    ens = validate([0.5, 0.5], [[0.9, 0.1], [0.1, 0.9]])
    assert ens.n_inputs == ens.n_outputs == 2
    assert not ens.channel.flags.writeable


@pytest.mark.parametrize("dist, chan, exc", [
    ([0.5, 0.5], [[0.5, 0.6], [0.1, 0.9]], NonStochastic),
    ([0.6, 0.6], [[0.5, 0.5], [0.1, 0.9]], NonStochastic),
    ([1.5, -0.5], [[0.5, 0.5], [0.1, 0.9]], NegativeEntry),
    ([1.0], [[0.5, 0.5]], AlphabetTooSmall),
    ([0.5, 0.5], [[1.0], [1.0]], AlphabetTooSmall),
    ([0.5, 0.5], [[0.5, 0.5], [0.1]], NonStochastic),
    ([0.5, 0.5], [[0.5, 0.5, 0.0]], NonStochastic),
])
def test_validate_rejects(dist, chan, exc):
    with pytest.raises(exc):
        validate(dist, chan)


def test_ternary_valid(tern):
    assert tern.n_inputs == 3 and tern.n_outputs == 2


def test_gamma_bsc_values(bsc01):
    assert gamma_y(bsc01, 1.0, 0) == pytest.approx(math.log(2), abs=1e-15)
    assert gamma_y(bsc01, 1.0, 1) == pytest.approx(math.log(2), abs=1e-15)
    assert gamma(bsc01, 0.0) == 0.0
    for s in (0.2, 0.5, 1.7):
        expect = math.log(2) - math.log(0.1**s + 0.9**s)
        assert gamma(bsc01, s) == pytest.approx(expect, abs=1e-14)


def test_gamma_ternary_oracle(tern):
    # 50-digit evaluation of -ln[0.4 (0.3^0.5 + 0.7^0.5) + 0.2 * 2^-0.5]
    assert gamma(tern, 0.5) == pytest.approx(0.36359254424085913853, abs=1e-14)


def test_gamma_prime_values(bsc01):
    assert gamma_prime(bsc01, 1.0) == pytest.approx(H01, abs=1e-14)
    half = validate([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]])
    for s in (0.0, 0.3, 2.0):
        assert gamma_prime(half, s) == pytest.approx(math.log(2), abs=1e-15)


@pytest.mark.parametrize("s", [0.37, 0.05, 0.5, 0.95])
def test_gamma_prime_finite_difference(tern, s):
    h = 1e-5
    fd = (gamma(tern, s + h) - gamma(tern, s - h)) / (2 * h)
    assert gamma_prime(tern, s) == pytest.approx(fd, abs=1e-6)


def test_zero_entries_domain():
    ens = validate([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]])
    assert gamma_y(ens, 0.5, 0) == pytest.approx(math.log(2))
    with pytest.raises(DomainError):
        gamma_y(ens, 0.0, 0)
    with pytest.raises(DomainError):
        gamma_y(ens, -1.0, 1)
    assert check_symmetry(ens).is_symmetric


def test_symmetry_reports(tern):
    assert check_symmetry(bsc(0.1)).max_deviation <= 1e-12
    rep = check_symmetry(tern)
    assert rep.is_symmetric and rep.max_deviation <= 1e-12
    assert len(rep.s_grid) == 21
    bad = ternary(p0_b=0.31)
    rep = check_symmetry(bad)
    assert not rep.is_symmetric and rep.max_deviation > 1e-3
    with pytest.raises(NotSymmetric):
        gamma(bad, 0.5)
    # the per-letter functions stay available
    assert math.isfinite(gamma_y(bad, 0.5, 1))


def test_symmetry_custom_grid_and_tol(tern):
    rep = check_symmetry(ternary(p0_b=0.3000001), s_grid=[0.5], tol=1e-3)
    assert rep.is_symmetric and rep.s_grid == (0.5,)


def test_mutual_information(bsc01, tern):
    assert mutual_information(bsc01) == pytest.approx(math.log(2) - H01, abs=1e-14)
    assert mutual_information(bsc(0.5)) == pytest.approx(0.0, abs=1e-15)
    for ens in (bsc01, tern, bsc(0.3)):
        assert mutual_information(ens) == pytest.approx(gamma(ens, 1.0) - gamma_prime(ens, 1.0), abs=1e-10)


def test_output_permutation_invariance(tern):
    flip = validate(tern.input_dist, tern.channel[:, ::-1])
    for s in (0.1, 0.6, 1.0):
        assert gamma(flip, s) == pytest.approx(gamma(tern, s), abs=1e-12)
        assert gamma_prime(flip, s) == pytest.approx(gamma_prime(tern, s), abs=1e-12)
    assert mutual_information(flip) == pytest.approx(mutual_information(tern), abs=1e-12)


def test_gamma_y_one_is_output_marginal(tern):
    for y in range(tern.n_outputs):
        assert gamma_y(tern, 1.0, y) == pytest.approx(-math.log(tern.output_dist[y]), abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(p=st.floats(0.001, 0.499), s=st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3, unique=True))
def test_gamma_concave(p, s):
    ens = bsc(p)
    s1, s2, s3 = sorted(s)
    if s3 - s1 < 1e-6:
        return
    lam = (s3 - s2) / (s3 - s1)
    interp = lam * gamma(ens, s1) + (1 - lam) * gamma(ens, s3)
    assert gamma(ens, s2) >= interp - 1e-12


def test_load_channel(tmp_path, tern):
    assert load_channel("bsc:0.2").channel[0, 1] == pytest.approx(0.2)
    for bad in ("bsc:0.6", "bsc:0.5", "bsc:0", "bsc:x"):
        with pytest.raises(DomainError):
            load_channel(bad)
    f = tmp_path / "t.json"
    f.write_text(tern.to_json())
    back = load_channel(str(f))
    np.testing.assert_array_equal(back.channel, tern.channel)
    f.write_text('{"input_dist": [0.5, 0.5]}')
    with pytest.raises(DomainError):
        load_channel(str(f))
    with pytest.raises(OSError):
        load_channel(str(tmp_path / "missing.json"))
