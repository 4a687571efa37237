from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from larckit.exact import ExactValue, integer_vector, rational_nullspace, sqrt_value
from larckit.linop import random_hermitian, random_unitary
from larckit.spectral import (Status, check_rational_independence, eigenprojection, group_degenerate,
                              relation_value_mp, spectrum_from_eigenvalues, spectrum_from_matrix)
from oracles import brute_force_relation

SQRT235 = [2**0.5, 3**0.5, 5**0.5]


def _check_projections(spec, tol=1e-9):
    total = sum(spec.projections)
    assert np.max(np.abs(total - np.eye(spec.dim))) < tol
    for k, p in enumerate(spec.projections):
        assert np.max(np.abs(p - p.conj().T)) < tol
        assert np.max(np.abs(p @ p - p)) < tol
        assert np.trace(p).real == pytest.approx(spec.multiplicities[k])
        for q in spec.projections[k + 1:]:
            assert np.max(np.abs(p @ q)) < tol


def test_group_degenerate_examples():
    s = group_degenerate([3.0, 1.0, 2.0], 1e-9)
    assert list(s.eigenvalues) == [1.0, 2.0, 3.0] and s.multiplicities == (1, 1, 1)
    s = group_degenerate([1.0, 1.0 + 1e-12, 2.0])
    assert s.multiplicities == (2, 1)
    assert s.eigenvalues[0] == pytest.approx(1.0 + 5e-13, abs=1e-15)
    _check_projections(s)


def test_built_in_double_eigenvalue_is_detected(rng):
    u = random_unitary(5, rng)
    x = np.array([0.4, 1.3, 1.3, -2.0, 3.1])
    h = (u * x) @ u.conj().T
    s = spectrum_from_matrix(h)
    assert s.multiplicities == (1, 1, 2, 1)
    assert np.max(np.abs(s.matrix() - h)) < 1e-9
    _check_projections(s)


@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_resolution_of_identity(seed, n):
    s = spectrum_from_matrix(random_hermitian(n, np.random.default_rng(seed)))
    _check_projections(s)
    assert np.max(np.abs(s.matrix() - sum(x * p for x, p in zip(s.eigenvalues, s.projections)))) < 1e-9


def test_eigenprojection_examples(rng):
    s = spectrum_from_eigenvalues([1.0, 2.0, 3.0])
    assert np.array_equal(eigenprojection(s, 1), np.diag([0, 1, 0]).astype(complex))
    s = spectrum_from_eigenvalues([1.0, 1.0, 3.0])
    assert np.trace(eigenprojection(s, 0)).real == pytest.approx(2)
    u = random_unitary(3, rng)
    s = spectrum_from_matrix((u * np.array([1.0, 2.0, 3.0])) @ u.conj().T)
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1
        assert np.allclose(eigenprojection(s, k), u @ np.diag(e) @ u.conj().T, atol=1e-10)
    with pytest.raises(IndexError):
        eigenprojection(s, 3)


def test_exact_value_parsing():
    v = ExactValue.parse("1/2 + 3*sqrt(8) - pi/4")
    assert v.rational == Fraction(1, 2)
    assert v.coeff("sqrt(2)") == 6 and v.coeff("pi") == Fraction(-1, 4)
    assert float(v) == pytest.approx(0.5 + 3 * 8**0.5 - np.pi / 4)
    assert ExactValue.from_json(v.to_json()) == v
    assert ExactValue.parse("sqrt(9)") == ExactValue.make(3)
    with pytest.raises(ValueError):
        ExactValue.parse("log(2)")


def test_rational_nullspace_and_integer_vector():
    basis = rational_nullspace([[1, 2, 3]])
    assert len(basis) == 2
    for b in basis:
        assert sum(Fraction(c) * v for c, v in zip([1, 2, 3], b)) == 0
    assert integer_vector([Fraction(-1, 2), Fraction(1, 3), 0]) == (3, -2, 0)


def test_independence_integer_spectrum():
    v = check_rational_independence([1.0, 2.0, 3.0])
    assert v.status is Status.DEPENDENT
    assert v.relation == (2, -1, 0)


def test_independence_sqrt_exact_and_numeric():
    tags = [sqrt_value(p) for p in (2, 3, 5)]
    exact = check_rational_independence(spectrum_from_eigenvalues(SQRT235, exact=tags))
    assert exact.status is Status.INDEPENDENT and exact.exact
    numeric = check_rational_independence(SQRT235, coeff_bound=50, tol=1e-9)
    assert numeric.status is Status.INDEPENDENT
    assert numeric.coeff_bound == 50 and numeric.tolerance == 1e-9


def test_independence_exact_detects_hidden_relation():
    tags = [sqrt_value(2), sqrt_value(8)]
    v = check_rational_independence(spectrum_from_eigenvalues([float(t) for t in tags], exact=tags))
    assert v.status is Status.DEPENDENT and v.exact
    assert v.relation == (2, -1)


def test_independence_harmonic_oscillator():
    x = [k + 0.5 for k in range(4)]
    v = check_rational_independence(x)
    assert v.status is Status.DEPENDENT
    assert abs(relation_value_mp(v.relation, x)) < 1e-12
    # (1, -2, 1, 0) is a relation too
    assert abs(relation_value_mp((1, -2, 1, 0), x)) == 0


relations = st.lists(st.integers(-4, 4), min_size=2, max_size=4).filter(lambda c: any(c))


@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.booleans())
def test_verdict_matches_brute_force(seed, m, planted):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.5, 3.0, size=m)
    if planted:
        # x_0 = (a_1 x_1 + ... ) / a_0 with small integers
        a = rng.integers(-3, 4, size=m)
        a[0] = rng.integers(1, 4)
        x[0] = -float(np.dot(a[1:], x[1:])) / a[0]
        if abs(x[0]) < 1e-3:
            x[0] = 0.7
    bound = 5
    oracle = brute_force_relation(x, bound, 1e-9)
    v = check_rational_independence(list(x), coeff_bound=bound, tol=1e-9)
    assert v.status in (Status.DEPENDENT, Status.INDEPENDENT)
    assert (v.status is Status.DEPENDENT) == (oracle is not None)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_dependent_witness_is_sound(seed, m):
    rng = np.random.default_rng(seed)
    x = list(rng.integers(1, 30, size=m) / rng.integers(1, 7))
    v = check_rational_independence(x, coeff_bound=20, tol=1e-9)
    if v.status is Status.DEPENDENT:
        c = v.relation
        assert any(c) and max(map(abs, c)) <= 20
        with mpmath.workdps(50):
            assert abs(mpmath.fsum(ci * mpmath.mpf(xi) for ci, xi in zip(c, x))) < 1e-9


def test_sqrt_primes_float_independent_pslq():
    import math
    x = [math.sqrt(p) for p in (2, 3, 5, 7, 11, 13)]
    v = check_rational_independence(x, coeff_bound=20, tol=1e-9)
    assert v.status is Status.INDEPENDENT
