import numpy as np
import pytest
from hypothesis import given, strategies as st

from larckit.errors import HypothesesNotMet, NotAntiHermitian
from larckit.graph import build_graph
from larckit.linop import ControlSystem, random_hermitian, random_unitary
from larckit.lie import (Verdict, closure_defect, double_bracket, evaluate_word, generator_table,
                         larc_check, lie_closure, lie_closure_complex, thm2_certificate, word_depth,
                         word_from_json, word_to_json, word_to_str)
from larckit.models import make_thm2_model, tridiagonal_coupling
from larckit.spectral import spectrum_from_eigenvalues, spectrum_from_matrix
from oracles import word_closure_dim

S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S2 = np.array([[0, -1j], [1j, 0]])
S3 = np.diag([1.0, -1.0]).astype(complex)


def test_su2_closure():
    b = lie_closure([1j * S1, 1j * S2])
    assert b.dim == 3 and b.converged
    assert closure_defect(b) < 1e-9


def test_diagonal_generators_are_abelian():
    gens = [1j * np.diag(np.eye(4)[k]) for k in range(4)]
    b = lie_closure(gens)
    assert b.dim == 4 and b.passes <= 1
    assert closure_defect(b) == 0.0


def test_tridiagonal_matches_word_oracle():
    gens = [1j * np.diag(np.eye(4)[k]) for k in range(4)] + [1j * tridiagonal_coupling(4)]
    b = lie_closure(gens)
    dim, saturated = word_closure_dim(gens, max_length=6)
    assert saturated and dim == b.dim == 16


@pytest.mark.parametrize("n", [3, 4, 5])
def test_larc_full_on_thm2_models(n):
    rep = larc_check(make_thm2_model(n), truncations=[n - 1, n], workers=1)
    assert rep.verdict is Verdict.FULL and rep.closure_dim == n * n
    assert [h["closure_dim"] for h in rep.history] == [(n - 1) ** 2, n * n]


def test_diagonal_controls_give_proper_closure():
    drift = spectrum_from_eigenvalues([2**0.5, 3**0.5, 5**0.5])
    sys_ = ControlSystem(drift, (np.diag([1.0, 0.0, -1.0]),))
    rep = larc_check(sys_)
    assert rep.verdict is Verdict.PROPER and rep.closure_dim == 3


def test_two_block_controls_give_sum_of_squares():
    drift = spectrum_from_eigenvalues([2**0.5, 3**0.5, 5**0.5, 7**0.5, 11**0.5])
    h = np.zeros((5, 5))
    h[0, 1] = h[1, 0] = 1.0
    h[2, 3] = h[3, 2] = h[3, 4] = h[4, 3] = 1.0
    rep = larc_check(ControlSystem(drift, (h,)))
    assert rep.closure_dim == 2**2 + 3**2 and rep.verdict is Verdict.PROPER


@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.floats(0.1, 10))
def test_closure_invariant_under_conjugation_and_scaling(seed, n, scale):
    rng = np.random.default_rng(seed)
    gens = [1j * np.diag(rng.normal(size=n)), 1j * tridiagonal_coupling(n) * rng.normal()]
    u = random_unitary(n, rng)
    conj = [u @ g @ u.conj().T for g in gens]
    d0 = lie_closure(gens).dim
    assert lie_closure(conj).dim == d0
    assert lie_closure([scale * g for g in gens]).dim == d0


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_complex_closure_dim_equals_real(seed, n):
    rng = np.random.default_rng(seed)
    hs = [np.diag(rng.normal(size=n)), random_hermitian(n, rng) * (rng.random() < 0.7)]
    real = lie_closure([1j * h for h in hs])
    cplx = lie_closure_complex(hs)
    assert real.dim == cplx.dim
    assert closure_defect(real) < 1e-9


def test_closure_rejects_hermitian_generator():
    with pytest.raises(NotAntiHermitian):
        lie_closure([S1])


def test_max_passes_exhaustion():
    rep = larc_check(make_thm2_model(5), max_passes=0)
    assert rep.verdict is Verdict.MAX_ITERATIONS and rep.closure_dim < 25


def test_double_bracket_qubit():
    f0, f1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    sym, anti = double_bracket(f0, S1, f1)
    assert np.allclose(sym, S1)
    assert np.allclose(anti, [[0, 1], [-1, 0]])


def test_double_bracket_complex_coupling():
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1], h[1, 0] = 2j, -2j
    f0, f1 = np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0])
    sym, anti = double_bracket(f0, h, f1)
    expected_sym = np.zeros((3, 3), dtype=complex)
    expected_sym[0, 1], expected_sym[1, 0] = 2j, -2j
    expected_anti = np.zeros((3, 3), dtype=complex)
    expected_anti[0, 1], expected_anti[1, 0] = 2j, 2j
    assert np.allclose(sym, expected_sym) and np.allclose(anti, expected_anti)


def test_double_bracket_diagonal_and_bad_input():
    f0, f1 = np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0])
    sym, anti = double_bracket(f0, np.diag([1.0, 2.0, 3.0]), f1)
    assert not sym.any() and not anti.any()
    with pytest.raises(ValueError):
        double_bracket(np.diag([1.0, 1.0, 0]), np.eye(3), f1)
    with pytest.raises(ValueError):
        double_bracket(f0, np.eye(3), f0)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_certificate_words_reevaluate(seed, n):
    rng = np.random.default_rng(seed)
    base = make_thm2_model(n)
    u = random_unitary(n, rng)
    drift = spectrum_from_matrix(u @ base.drift_matrix() @ u.conj().T)
    sys_ = ControlSystem(drift, tuple(u @ h @ u.conj().T for h in base.controls))
    entries = thm2_certificate(sys_)
    assert len(entries) == n * n
    table = generator_table(sys_)
    vecs = sys_.drift.vectors
    for e in entries:
        target = np.outer(vecs[:, e.v], vecs[:, e.w].conj())
        assert np.max(np.abs(evaluate_word(e.word, table) - target)) < 1e-9


def test_certificate_paths():
    entries = {(e.v, e.w): e for e in thm2_certificate(make_thm2_model(5))}
    assert entries[(2, 2)].word == "F2"
    assert entries[(0, 4)].path == (0, 1, 2, 3, 4)
    assert word_depth(entries[(0, 1)].word) == 3


def test_certificate_requires_hypotheses():
    with pytest.raises(HypothesesNotMet):
        thm2_certificate(make_thm2_model(3, spectrum=[1.0, 2.0, 3.0]))
    drift = spectrum_from_eigenvalues([2**0.5, 3**0.5, 5**0.5])
    with pytest.raises(HypothesesNotMet):
        thm2_certificate(ControlSystem(drift, (np.diag([1.0, 0, 0]),)))


def test_word_json_roundtrip():
    entries = thm2_certificate(make_thm2_model(4))
    for e in entries:
        back = word_from_json(word_to_json(e.word))
        assert word_to_str(back) == word_to_str(e.word)
    with pytest.raises(ValueError):
        word_from_json(["xx", "F0"])


def test_graph_and_generator_table_agree():
    sys_ = make_thm2_model(3)
    table = generator_table(sys_)
    assert set(table) == {"F0", "F1", "F2", "H1"}
    assert build_graph(sys_).pairs() == {(0, 1), (1, 2)}
