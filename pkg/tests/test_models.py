import math

import numpy as np
import pytest

from larckit.errors import DimensionMismatch
from larckit.lie import Verdict, larc_check, thm2_hypotheses
from larckit.linop import is_hermitian
from larckit.models import (jaynes_cummings_matrices, jc_basis_index, make_harmonic_oscillator,
                            make_jaynes_cummings, make_thm2_model, primes)
from larckit.spectral import Status, check_rational_independence, relation_value_mp


def test_primes():
    assert primes(8) == [2, 3, 5, 7, 11, 13, 17, 19]


def test_thm2_model_spectrum_and_independence():
    sys_ = make_thm2_model(4)
    assert np.allclose(sys_.drift.eigenvalues, [math.sqrt(p) for p in (2, 3, 5, 7)])
    v = check_rational_independence(sys_.drift)
    assert v.status is Status.INDEPENDENT and v.exact
    assert thm2_hypotheses(sys_)["all"]


def test_thm2_smallest_is_full():
    rep = larc_check(make_thm2_model(2))
    assert rep.verdict is Verdict.FULL and rep.closure_dim == 4


def test_thm2_integer_spectrum_is_dependent():
    sys_ = make_thm2_model(3, spectrum=[1, 2, 3])
    hyp = thm2_hypotheses(sys_)
    assert not hyp["checks"]["rationally_independent"] and not hyp["all"]
    assert hyp["checks"]["graph_connected"]


def test_thm2_string_tags_and_errors():
    sys_ = make_thm2_model(2, spectrum=["sqrt(2)", "sqrt(8)"])
    assert check_rational_independence(sys_.drift).status is Status.DEPENDENT
    with pytest.raises(DimensionMismatch):
        make_thm2_model(3, spectrum=[1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        make_thm2_model(3, coupling=np.eye(2))
    with pytest.raises(ValueError):
        make_thm2_model(1)
    with pytest.raises(ValueError):
        make_thm2_model(3, spectrum="primes")


def test_jc_basis_order():
    assert jc_basis_index(2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1)]


def test_jc_smallest_cutoff():
    h0, h1, h2 = jaynes_cummings_matrices(*(1.0, 1.3, 0.7), 1)
    assert h0.shape == h1.shape == h2.shape == (3, 3)


def test_jc_matrix_elements():
    wa, wc, wi = 1.0, 1.3, 0.7
    h0, h1, h2 = jaynes_cummings_matrices(wa, wc, wi, 5)
    for m in range(1, 6):
        i, j = 2 * m - 1, 2 * m
        # |m;0> = |0>|m> has energy wa + m wc, |m;1> = |1>|m-1> has -wa + (m-1) wc
        assert h0[i, i].real == pytest.approx(wa + m * wc)
        assert h0[j, j].real == pytest.approx(-wa + (m - 1) * wc)
        assert abs(h0[i, j]) == pytest.approx(wi * math.sqrt(m))
    assert h0[0, 0].real == pytest.approx(wa)
    assert np.count_nonzero(h1 - np.diag(np.diagonal(h1))) == 0
    assert all(is_hermitian(h, 1e-14) for h in (h0, h1, h2))
    # sigma_1 (x) 1 flips the atom, so it leaves every block
    assert abs(h2[1, 2]) == 0 and abs(h2[0, 2]) == 1


def test_jc_system_and_errors():
    sys_ = make_jaynes_cummings(1.0, 1.3, 0.7, 3, with_sigma1=False)
    assert sys_.dim == 7 and sys_.n_controls == 1
    with pytest.raises(ValueError):
        jaynes_cummings_matrices(0.0, 1.0, 1.0, 2)
    with pytest.raises(ValueError):
        jaynes_cummings_matrices(1.0, 1.0, 1.0, 0)


def test_harmonic_oscillator():
    s = make_harmonic_oscillator(3)
    assert np.allclose(s.eigenvalues, [0.5, 1.5, 2.5, 3.5])
    v = check_rational_independence(s)
    assert v.status is Status.DEPENDENT and v.exact
    assert relation_value_mp(v.relation, s.eigenvalues) == 0
    with pytest.raises(ValueError):
        make_harmonic_oscillator(1)
