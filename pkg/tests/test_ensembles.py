import numpy as np
import pytest
from hypothesis import given, strategies as st

from doiforge.ensembles import (EnsembleSpec, away_from_zero, bounded_potential, clustered_spectrum,
                                haar_unitary, hermitian_with_norm, periodic_derivative_model,
                                prescribed_spectrum, rank_one, trial_rng)
from doiforge.errors import InvalidParameter


def test_trial_rng_reproducible_and_keyed():
    a = trial_rng(7, "thm11", 3).standard_normal(4)
    assert np.array_equal(a, trial_rng(7, "thm11", 3).standard_normal(4))
    assert not np.array_equal(a, trial_rng(7, "thm11", 4).standard_normal(4))
    assert not np.array_equal(a, trial_rng(7, "thm13", 3).standard_normal(4))
    assert not np.array_equal(a, trial_rng(8, "thm11", 3).standard_normal(4))
    assert isinstance(trial_rng(1, "x", 0).bit_generator, np.random.Philox)


def test_haar_unitary(rng):
    U = haar_unitary(rng, 6)
    assert np.linalg.norm(U.conj().T @ U - np.eye(6), 2) <= 1e-12


def test_prescribed_and_norm(rng):
    np.testing.assert_allclose(prescribed_spectrum(rng, [3.0, -1.0, 0.5]).spectrum, [-1, 0.5, 3], atol=1e-12)
    assert hermitian_with_norm(rng, 5, 2.5).norm == pytest.approx(2.5)
    assert rank_one(rng, 4, 3.0).norm == pytest.approx(3.0)
    assert np.linalg.matrix_rank(rank_one(rng, 4, 3.0).entries) == 1


@given(st.integers(1, 12), st.floats(1e-6, 0.5), st.integers(0, 2 ** 32 - 1))
def test_clustered_floor(n, gap, seed):
    rng = np.random.default_rng(seed)
    D = clustered_spectrum(rng, n, gap, floor=1.0)
    assert D.dim == n
    assert np.min(np.abs(D.spectrum)) >= 1.0 - 1e-9


def test_clustered_has_close_pairs(rng):
    w = clustered_spectrum(rng, 6, 1e-3).spectrum
    assert np.min(np.diff(w)) <= 1e-3 + 1e-9
    with pytest.raises(InvalidParameter):
        clustered_spectrum(rng, 4, 0.0)


def test_periodic_model():
    D = periodic_derivative_model(3)
    np.testing.assert_array_equal(D.spectrum, np.arange(-3, 4))


def test_away_from_zero():
    D = away_from_zero(periodic_derivative_model(2), 1e-3)
    assert np.min(np.abs(D.spectrum)) == pytest.approx(1e-3)


def test_bounded_potential(rng):
    V = bounded_potential(rng, 10, modes=3, norm=0.7)
    assert V.norm == pytest.approx(0.7)
    # banded: couples only modes at distance <= 3
    assert np.abs(V.entries[0, 5:]).max() <= 1e-12


def test_ensemble_spec(rng):
    assert EnsembleSpec("GaussianHermitian", 5).generate(rng).dim == 5
    assert EnsembleSpec("PeriodicDerivativeModel", 2).generate(rng).dim == 5
    D = EnsembleSpec("PrescribedSpectrum", values=(0.0, 1.0), avoid_zero=True).generate(rng)
    assert np.min(np.abs(D.spectrum)) > 0
    with pytest.raises(InvalidParameter):
        EnsembleSpec("Wishart")
