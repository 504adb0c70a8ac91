import csv
import math

import numpy as np
import pytest
from scipy.integrate import quad

from doiforge.errors import InvalidParameter, TailMassTooLarge
from doiforge.fourier import (fourier_profile, sobolev_sum, synthesize_from_profile, theta_scaling_fit,
                              write_profile_csv)
from doiforge.kernels import psi_theta, weak_lp_split


@pytest.fixture(scope="module")
def sech():
    return fourier_profile("SechHalf")


def test_sech_l1_against_independent_quadrature(sech):
    # transform of 1/(e^{t/2}+e^{-t/2}) is pi sech(pi s)/sqrt(2 pi)
    oracle = 2 * quad(lambda s: 2 * math.pi * math.exp(-math.pi * s) / (1 + math.exp(-2 * math.pi * s)) / math.sqrt(2 * math.pi), 0, np.inf)[0]
    assert oracle == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)
    assert sech.l1_ghat == pytest.approx(1.2533141, abs=1e-6)
    assert sech.l1_ghat == pytest.approx(oracle, rel=1e-8)
    exact = np.pi / np.cosh(np.pi * sech.s) / math.sqrt(2 * math.pi)
    assert np.max(np.abs(sech.ghat - exact)) <= 1e-10


def test_sech_sobolev_bound(sech):
    assert sech.l1_ghat <= sech.sobolev_bound
    assert sech.l2_g == pytest.approx(math.sqrt(quad(lambda t: 1 / (2 * math.cosh(t / 2)) ** 2, -80, 80)[0]),
                                      rel=1e-9)


def test_theta_half_is_sech(sech):
    th = fourier_profile("ThetaExp", (0.5,))
    np.testing.assert_array_equal(th.ghat, sech.ghat)
    assert th.l1_ghat == sech.l1_ghat


@pytest.mark.parametrize("theta", [0.05, 0.1, 0.3, 0.7, 0.95])
def test_theta_profiles_bounded(theta):
    p = fourier_profile("ThetaExp", (theta,))
    assert np.isfinite(p.l1_ghat) and p.l1_ghat <= p.sobolev_bound
    assert p.tail_s <= 1e-6 * p.l1_ghat


def test_theta_scaling_exponent():
    fit = theta_scaling_fit()
    assert abs(fit.exponent - (-0.5)) <= 0.1
    assert np.all(np.diff(fit.sobolev) < 0)
    assert sobolev_sum(0.2) == pytest.approx(sobolev_sum(0.8), rel=1e-9)


@pytest.mark.parametrize("family,params", [("WeakLpChi0", (2.0,)), ("WeakLpChi1", ())])
def test_cutoff_profiles(family, params):
    p = fourier_profile(family, params)
    assert np.isfinite(p.l1_ghat) and p.l1_ghat <= p.sobolev_bound


def test_cutoff_profiles_reassemble_split_kernel():
    # g(log(lam/mu)) pieces should synthesize the split kernel at mu = 1 with r = 2
    p0 = fourier_profile("WeakLpChi0", (2.0,))
    p1 = fourier_profile("WeakLpChi1")
    lam = np.array([0.3, 1.0, 2.5, 6.0])
    np.testing.assert_allclose(synthesize_from_profile(p0, lam, 1.0).real,
                               weak_lp_split(2.0, "chi0")(lam, 1.0), atol=1e-6)
    u = np.log(lam)
    chi1_part = weak_lp_split(2.0, "chi1")(lam, 1.0)
    # chi1 piece carries lam^(1/2 - r) - lam^(-1/2) numerator; g1 is the shared factor
    g1 = synthesize_from_profile(p1, lam, 1.0).real
    np.testing.assert_allclose(g1 * (lam ** -1.5 - lam ** -0.5), chi1_part, atol=1e-6)
    assert np.all(np.isfinite(u))


def test_synthesis_examples(sech):
    assert synthesize_from_profile(sech, 1.0, 1.0) == pytest.approx(0.5, abs=1e-9)
    e2 = synthesize_from_profile(sech, math.e ** 2, 1.0)
    assert e2.real == pytest.approx(1 / (math.e + 1 / math.e), abs=1e-9)
    assert e2.real == pytest.approx(0.3240271368, abs=1e-9)


def test_synthesis_random_points(sech, rng):
    lam, mu = rng.uniform(1e-3, 10, 200), rng.uniform(1e-3, 10, 200)
    direct = psi_theta(0.5)(lam, mu)
    assert np.max(np.abs(synthesize_from_profile(sech, lam, mu) - direct)) <= 1e-6


@pytest.mark.parametrize("theta", [0.05, 0.2, 0.8])
def test_theta_synthesis(theta, rng):
    p = fourier_profile("ThetaExp", (theta,))
    lam, mu = rng.uniform(1e-2, 10, 50), rng.uniform(1e-2, 10, 50)
    assert np.max(np.abs(synthesize_from_profile(p, lam, mu) - psi_theta(theta)(lam, mu))) <= 1e-6


def test_small_grid_raises():
    with pytest.raises(TailMassTooLarge):
        fourier_profile("SechHalf", L=5.0)
    with pytest.raises(TailMassTooLarge):
        fourier_profile("SechHalf", S=2.0)
    with pytest.raises(InvalidParameter):
        fourier_profile("ThetaExp", (1.2,))
    with pytest.raises(InvalidParameter):
        fourier_profile("Gauss")


def test_profile_csv(sech, tmp_path):
    path = tmp_path / "p.csv"
    write_profile_csv(sech, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["s", "ghat_re", "ghat_im"]
    assert len(rows) == sech.s.size + 1
