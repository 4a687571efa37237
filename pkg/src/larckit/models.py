"""Built-in systems: sqrt-of-primes chain, truncated Jaynes-Cummings, harmonic oscillator."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch
from .exact import ExactValue, sqrt_value
from .linop import ControlSystem, as_matrix
from .spectral import DriftSpectrum, spectrum_from_eigenvalues, spectrum_from_matrix


def primes(count: int) -> list[int]:
    out: list[int] = []
    k = 2
    while len(out) < count:
        if all(k % p for p in out if p * p <= k):
            out.append(k)
        k += 1
    return out


def tridiagonal_coupling(n: int, value: complex = 1.0) -> np.ndarray:
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = value
    h[idx + 1, idx] = np.conj(value)
    return h


def _as_tagged(values) -> tuple[list[float], list[ExactValue | None] | None]:
    floats, tags = [], []
    for v in values:
        if isinstance(v, ExactValue):
            tags.append(v)
            floats.append(float(v))
        elif isinstance(v, str):
            e = ExactValue.parse(v)
            tags.append(e)
            floats.append(float(e))
        else:
            tags.append(None)
            floats.append(float(v))
    return floats, (tags if any(t is not None for t in tags) else None)


def make_thm2_model(n: int, spectrum: str | Sequence = "sqrt_primes",
                    coupling: str | np.ndarray = "tridiagonal") -> ControlSystem:
    """Diagonal drift with one coupling control.

    ``spectrum`` is ``"sqrt_primes"`` (exactly tagged square roots of the first
    ``n`` primes) or a list of numbers, ``ExactValue`` objects or parseable
    strings such as ``"sqrt(2)"``.  ``coupling`` is ``"tridiagonal"`` (unit
    nearest-neighbour couplings, a path graph) or an ``n x n`` Hermitian matrix.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if isinstance(spectrum, str):
        if spectrum != "sqrt_primes":
            raise ValueError(f"unknown spectrum kind {spectrum!r}")
        tags = [sqrt_value(p) for p in primes(n)]
        values = [float(t) for t in tags]
    else:
        if len(spectrum) != n:
            raise DimensionMismatch(f"spectrum has {len(spectrum)} values, n = {n}")
        values, tags = _as_tagged(spectrum)
    drift = spectrum_from_eigenvalues(values, exact=tags)
    if isinstance(coupling, str):
        if coupling != "tridiagonal":
            raise ValueError(f"unknown coupling kind {coupling!r}")
        h1 = tridiagonal_coupling(n)
    else:
        h1 = as_matrix(coupling, "coupling")
        if h1.shape != (n, n):
            raise DimensionMismatch(f"coupling must be {n}x{n}, got {h1.shape}")
    return ControlSystem(drift, (h1,))


def jc_basis_index(cutoff: int) -> list[tuple[int, int]]:
    """Atom/photon labels ``(s, m)`` in block order ``|0;0>, |1;0>, |1;1>, |2;0>, ...``.

    ``|mu;0> = |0> (x) |mu>`` and ``|mu;1> = |1> (x) |mu-1>``.
    """
    out = [(0, 0)]
    for mu in range(1, cutoff + 1):
        out += [(0, mu), (1, mu - 1)]
    return out


def jc_blocks(cutoff: int) -> list[list[int]]:
    """Basis indices of the invariant subspaces ``H^(mu)``, mu = 0..cutoff."""
    return [[0]] + [[2 * mu - 1, 2 * mu] for mu in range(1, cutoff + 1)]


def jaynes_cummings_matrices(omega_a: float, omega_c: float, omega_i: float, cutoff: int
                             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``H_0``, ``sigma_3 (x) 1`` and ``sigma_1 (x) 1`` in the block basis, dim ``2 cutoff + 1``."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    for name, w in (("omega_A", omega_a), ("omega_C", omega_c), ("omega_I", omega_i)):
        if w == 0:
            raise ValueError(f"{name} must be nonzero")
    nf = cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, nf)), 1).astype(complex)
    num = np.diag(np.arange(nf)).astype(complex)
    s3 = np.diag([1.0, -1.0]).astype(complex)
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    sp = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
    one_f = np.eye(nf)
    h0 = (omega_a * np.kron(s3, one_f) + omega_c * np.kron(np.eye(2), num)
          + omega_i * (np.kron(sp, a) + np.kron(sp.conj().T, a.conj().T)))
    keep = [s * nf + m for s, m in jc_basis_index(cutoff)]
    sel = np.ix_(keep, keep)
    return h0[sel], np.kron(s3, one_f)[sel], np.kron(s1, one_f)[sel]


def make_jaynes_cummings(omega_a: float, omega_c: float, omega_i: float, cutoff: int,
                         with_sigma1: bool = True) -> ControlSystem:
    """Truncated Jaynes-Cummings system with controls ``sigma_3 (x) 1`` and
    (optionally) ``sigma_1 (x) 1``; the last incomplete block is dropped."""
    h0, h1, h2 = jaynes_cummings_matrices(omega_a, omega_c, omega_i, cutoff)
    controls = (h1, h2) if with_sigma1 else (h1,)
    return ControlSystem(spectrum_from_matrix(h0), controls)


def make_harmonic_oscillator(cutoff: int) -> DriftSpectrum:
    """Levels ``k + 1/2`` for ``k = 0..cutoff`` with exact rational tags."""
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    tags = [ExactValue.make(Fraction(2 * k + 1, 2)) for k in range(cutoff + 1)]
    return spectrum_from_eigenvalues([k + 0.5 for k in range(cutoff + 1)], exact=tags)
