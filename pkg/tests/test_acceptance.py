"""Acceptance criteria 1-9, one test each.

Run ``pytest tests/test_acceptance.py`` for the pass/fail summary, or
execute this file directly.
"""
import math
import time

import mpmath
import numpy as np
import pytest

from larckit.blocks import block_decompose, block_lie_closure
from larckit.exact import ExactValue, sqrt_value
from larckit.graph import build_graph, is_connected
from larckit.lie import (Verdict, evaluate_word, generator_table, larc_check, lie_closure,
                         thm2_certificate, thm2_hypotheses)
from larckit.linop import (ControlSystem, anti_herm_exp, commutator, commutator_product, herm_exp,
                           random_hermitian, random_unitary, trotter_product)
from larckit.models import make_jaynes_cummings, make_thm2_model, primes
from larckit.spectral import (Status, check_rational_independence, spectrum_from_eigenvalues,
                              spectrum_from_matrix)
from larckit.torus import (NeighborhoodSpec, kronecker_solve, random_unit_vectors, recurrence_time,
                           solve_with_doubling)
from oracles import grid_kronecker, word_closure_dim

SEED = 20240601
JC = (1.0, 1.3, 0.7)


@pytest.mark.acceptance(1, "sqrt-primes chain n=3..8 controllable with closure n^2")
def test_criterion_1_thm2_end_to_end():
    start = time.perf_counter()
    for n in range(3, 9):
        sys_ = make_thm2_model(n)
        hyp = thm2_hypotheses(sys_)
        assert hyp["all"], n
        rep = larc_check(sys_, truncations=list(range(2, n + 1)), rank_tol=1e-9)
        assert rep.verdict is Verdict.FULL
        assert all(h["closure_dim"] == h["n"] ** 2 for h in rep.history)
        assert len(thm2_certificate(sys_)) == n * n
    assert time.perf_counter() - start < 60


@pytest.mark.acceptance(2, "negative controls: dependent spectrum and block-diagonal controls")
def test_criterion_2_negative_controls():
    for n in range(3, 9):
        x = list(range(1, n + 1))
        v = check_rational_independence(spectrum_from_eigenvalues([float(k) for k in x]))
        assert v.status is Status.DEPENDENT
        with mpmath.workdps(60):
            assert abs(mpmath.fsum(c * mpmath.mpf(k) for c, k in zip(v.relation, x))) < 1e-12
    rng = np.random.default_rng(SEED)
    for sizes in ((2, 2), (1, 3), (2, 3), (3, 3), (2, 4)):
        n = sum(sizes)
        drift = spectrum_from_eigenvalues([math.sqrt(p) for p in primes(n)])
        h = np.zeros((n, n), dtype=complex)
        s = 0
        for k in sizes:
            h[s:s + k, s:s + k] = random_hermitian(k, rng)
            s += k
        rep = larc_check(ControlSystem(drift, (h,)))
        assert rep.closure_dim == sum(k * k for k in sizes) != n * n
        assert not is_connected(build_graph(ControlSystem(drift, (h,))))[0]


@pytest.mark.acceptance(3, "Kronecker certificates below delta=1e-2; grid agreement for 2 modes")
def test_criterion_3_kronecker():
    rng = np.random.default_rng(SEED)
    delta = 1e-2
    two_mode = []
    for k in range(20):
        m = 2 + k % 2
        ps = rng.choice(primes(10), size=m, replace=False)
        qs = rng.integers(1, 4, size=m)
        tags = [ExactValue.make(0, {f"sqrt({p})": int(q)}) for p, q in zip(ps, qs)]
        values = [float(t) for t in tags]
        spec = spectrum_from_eigenvalues(values, exact=tags)
        assert check_rational_independence(spec).status is Status.INDEPENDENT
        lam = rng.uniform(0, 1, size=m)
        cert = solve_with_doubling(spec.xhat, lam, delta)
        r = np.abs(cert.t * np.asarray(spec.xhat) - np.asarray(cert.y) - lam)
        r = np.minimum(r, 1 - r)
        assert cert.success and r.max() < delta
        if m == 2:
            two_mode.append((spec.xhat, lam))
    for xhat, lam in two_mode:
        grid_r, _ = grid_kronecker(xhat, lam, step=1e-5, horizon=1e4)
        best = kronecker_solve(xhat, lam, delta, 1e4, t_min=0.0, objective="best")
        step_tol = 1e-5 * float(np.max(xhat))
        assert abs(best.max_residual - grid_r) <= step_tol


@pytest.mark.acceptance(4, "recurrence into a strong neighbourhood; rational period recovered")
def test_criterion_4_recurrence():
    rng = np.random.default_rng(SEED)
    spec = spectrum_from_eigenvalues([math.sqrt(2), math.sqrt(3), math.sqrt(5)],
                                     exact=[sqrt_value(2), sqrt_value(3), sqrt_value(5)])
    vecs = random_unit_vectors(3, 3, rng)
    t_minus = -1.0
    u_minus = herm_exp(spec.matrix(), t_minus)
    rec = recurrence_time(spec, t_minus, NeighborhoodSpec(u_minus, vecs, 1e-2))
    assert rec.t_plus > 0
    u_plus = herm_exp(spec.matrix(), rec.t_plus)
    assert max(np.linalg.norm((u_plus - u_minus) @ v) for v in vecs) < 1e-2

    rational = spectrum_from_eigenvalues([2 * math.pi * k for k in (1, 2, 3)])
    rec = recurrence_time(rational, t_minus, NeighborhoodSpec(rational.evolution(t_minus), vecs, 1e-2))
    assert abs(rec.t_plus - 1.0) < 1e-6


@pytest.mark.acceptance(5, "Trotter and commutator product formulas converge")
def test_criterion_5_product_formulas():
    rng = np.random.default_rng(SEED)
    for k in range(10):
        n = 2 + k % 7
        a, b = random_hermitian(n, rng), random_hermitian(n, rng)
        assert np.linalg.norm(commutator(a, b)) > 1e-6
        exact = herm_exp(a + b)
        t4 = np.linalg.norm(trotter_product(a, b, 2**4) - exact, 2)
        t10 = np.linalg.norm(trotter_product(a, b, 2**10) - exact, 2)
        assert t10 < t4 / 10
        ia, ib = 1j * a, 1j * b
        target = anti_herm_exp(commutator(ia, ib))
        c3 = np.linalg.norm(commutator_product(ia, ib, 2**3) - target, 2)
        c9 = np.linalg.norm(commutator_product(ia, ib, 2**9) - target, 2)
        assert c9 < c3 / 4


@pytest.mark.acceptance(6, "Jaynes-Cummings blocks, su(2) per block, full closure with sigma_1")
def test_criterion_6_jaynes_cummings():
    for cutoff in range(1, 7):
        sys_ = make_jaynes_cummings(*JC, cutoff)
        dec = block_decompose([sys_.drift_matrix(), sys_.controls[0]])
        assert dec.block_dims == (1,) + (2,) * cutoff
        rep = block_lie_closure(sys_, (0, 1), rank_tol=1e-9)
        two = [b for b in rep.per_block if b["dim"] == 2]
        assert len(two) == cutoff
        assert all(b["derived_dim"] == b["su_dim"] == 3 for b in two)
        n = 2 * cutoff + 1
        assert rep.full_dim == n * n


@pytest.mark.acceptance(7, "every certificate word re-evaluates to its matrix unit")
def test_criterion_7_certificate_soundness():
    rng = np.random.default_rng(SEED)
    for n in range(2, 7):
        base = make_thm2_model(n)
        u = random_unitary(n, rng)
        drift = base.drift_matrix()
        sys_ = ControlSystem(spectrum_from_matrix(u @ drift @ u.conj().T),
                             tuple(u @ h @ u.conj().T for h in base.controls))
        for system in (base, sys_):
            entries = thm2_certificate(system)
            assert {(e.v, e.w) for e in entries} == {(v, w) for v in range(n) for w in range(n)}
            table = generator_table(system)
            vecs = system.drift.vectors
            for e in entries:
                target = np.outer(vecs[:, e.v], vecs[:, e.w].conj())
                assert np.max(np.abs(evaluate_word(e.word, table) - target)) < 1e-9


@pytest.mark.acceptance(8, "closure dimension matches exact word enumeration")
def test_criterion_8_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    for k in range(10):
        n = 2 + k % 3
        gens = []
        for _ in range(1 + k % 2):
            m = rng.integers(-2, 3, size=(n, n)) + 1j * rng.integers(-2, 3, size=(n, n))
            m = m * (rng.random((n, n)) < 0.5)
            h = m + m.conj().T
            gens.append(1j * h)
        gens.append(1j * np.diag(rng.integers(-3, 4, size=n)).astype(complex))
        gens = [g for g in gens if np.any(g)]
        dim, saturated = word_closure_dim(gens, max_length=6)
        got = lie_closure(gens).dim
        assert saturated, k
        assert got == dim, (k, got, dim)


@pytest.mark.acceptance(9, "closure dimension invariant under conjugation and rescaling")
def test_criterion_9_invariance():
    rng = np.random.default_rng(SEED)
    failures = 0
    cases = [make_thm2_model(4), make_jaynes_cummings(*JC, 3, with_sigma1=False)]
    drift = spectrum_from_eigenvalues([1.0, 2.0, 3.5, 5.0])
    diag_ctrl = ControlSystem(drift, (np.diag([1.0, 0.0, 0.0, -1.0]),))
    cases.append(diag_ctrl)
    for sys_ in cases:
        gens = [1j * sys_.drift_matrix()] + [1j * h for h in sys_.controls]
        base = lie_closure(gens).dim
        for _ in range(5):
            u = random_unitary(sys_.dim, rng)
            scales = rng.uniform(0.05, 20.0, size=len(gens))
            moved = [s * (u @ g @ u.conj().T) for s, g in zip(scales, gens)]
            failures += lie_closure(moved).dim != base
    assert failures == 0


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
