"""Dense complex operator algebra at finite truncation.

Every exponential here has a Hermitian generator, so ``herm_exp`` works
through an eigendecomposition rather than a power series; the result is
unitary to eigensolver accuracy.

Propagator convention: for a schedule of segments (tau_1, y_1), ...,
(tau_M, y_M) the propagator is the product

    exp(i tau_1 H(y_1)) exp(i tau_2 H(y_2)) ... exp(i tau_M H(y_M))

with the first segment leftmost, and H(y) = H_0 + sum_j y_j H_j.  Whether
this represents U(a, b) or U(b, a) is a matter of time-ordering
convention; reports record it verbatim.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .config import DEFAULT_TOL
from .errors import DimensionMismatch, NotAntiHermitian, NotHermitian

if TYPE_CHECKING:  # pragma: no cover
    from .spectral import DriftSpectrum

PROPAGATOR_ORDER = "exp(i tau_1 H(y_1)) ... exp(i tau_M H(y_M)), first segment leftmost"


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a square, finite complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) < tol)


def is_anti_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(a + dagger(a)), initial=0.0) < tol)


def is_unitary(a, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    eye = np.eye(a.shape[-1])
    return bool(np.max(np.abs(dagger(a) @ a - eye), initial=0.0) < tol)


def commutator(a, b) -> np.ndarray:
    """Return ``ab - ba``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _same_dim(a, b)
    return a @ b - b @ a


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``tr(a^dagger b)``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _same_dim(a, b)
    return complex(np.vdot(a, b))


def herm_exp(h, t: float = 1.0, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``exp(i t H)`` for Hermitian ``H`` via its eigendecomposition.

    Raises ``NotHermitian`` when ``H`` fails ``is_hermitian(tol)``; the
    tolerance is scaled by ``max(1, max|H_ij|)`` so large generators are not
    rejected for rounding noise.
    """
    h = as_matrix(h, "H")
    scale = max(1.0, float(np.max(np.abs(h))))
    if not is_hermitian(h, tol * scale):
        raise NotHermitian("herm_exp needs a Hermitian generator")
    h = 0.5 * (h + dagger(h))
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise np.linalg.LinAlgError(f"eigendecomposition failed: {exc}") from exc
    return (v * np.exp(1j * t * w)) @ dagger(v)


def anti_herm_exp(a, t: float = 1.0, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``exp(t A)`` for anti-Hermitian ``A`` (``A = iH``)."""
    a = as_matrix(a, "A")
    scale = max(1.0, float(np.max(np.abs(a))))
    if not is_anti_hermitian(a, tol * scale):
        raise NotAntiHermitian("anti_herm_exp needs an anti-Hermitian generator")
    return herm_exp(-1j * a, t, tol)


def trotter_product(a, b, n: int) -> np.ndarray:
    """``[exp(iA/n) exp(iB/n)]^n`` for Hermitian ``A``, ``B``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _same_dim(a, b)
    if n < 1:
        raise ValueError("n must be >= 1")
    step = herm_exp(a, 1.0 / n) @ herm_exp(b, 1.0 / n)
    return np.linalg.matrix_power(step, n)


def commutator_product(a, b, n: int) -> np.ndarray:
    """``[e^{A/n} e^{B/n} e^{-A/n} e^{-B/n}]^(n^2)`` for anti-Hermitian ``A``, ``B``.

    Converges to ``exp([A, B])`` as ``n`` grows.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _same_dim(a, b)
    if n < 1:
        raise ValueError("n must be >= 1")
    ea = anti_herm_exp(a, 1.0 / n)
    eb = anti_herm_exp(b, 1.0 / n)
    step = ea @ eb @ dagger(ea) @ dagger(eb)
    return np.linalg.matrix_power(step, n * n)


@dataclass(frozen=True)
class ControlSchedule:
    """Piecewise-constant controls: ordered ``(duration, amplitudes)`` segments."""

    segments: tuple[tuple[float, tuple[float, ...]], ...] = ()

    def __post_init__(self):
        segs = []
        for tau, y in self.segments:
            tau = float(tau)
            if not tau > 0:
                raise ValueError(f"segment durations must be positive, got {tau}")
            segs.append((tau, tuple(float(v) for v in y)))
        object.__setattr__(self, "segments", tuple(segs))

    @property
    def total_time(self) -> float:
        return float(sum(tau for tau, _ in self.segments))

    def __add__(self, other: "ControlSchedule") -> "ControlSchedule":
        return ControlSchedule(self.segments + other.segments)

    def __len__(self) -> int:
        return len(self.segments)


@dataclass(frozen=True)
class ControlSystem:
    """Drift spectrum plus bounded Hermitian controls ``H_1 ... H_N``.

    All matrices live in one ambient orthonormal basis; the drift's
    eigenbasis is available from ``drift.vectors``.
    """

    drift: "DriftSpectrum"
    controls: tuple[np.ndarray, ...] = field(default=())
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        ctrls = []
        for j, h in enumerate(self.controls, start=1):
            h = as_matrix(h, f"H{j}")
            if h.shape[0] != self.drift.dim:
                raise DimensionMismatch(
                    f"control H{j} has dim {h.shape[0]}, drift has dim {self.drift.dim}")
            scale = max(1.0, float(np.max(np.abs(h))))
            if not is_hermitian(h, self.tol * scale):
                raise NotHermitian(f"control H{j} is not Hermitian")
            h = 0.5 * (h + dagger(h))
            h.setflags(write=False)
            ctrls.append(h)
        object.__setattr__(self, "controls", tuple(ctrls))

    @property
    def dim(self) -> int:
        return self.drift.dim

    @property
    def n_controls(self) -> int:
        return len(self.controls)

    def drift_matrix(self) -> np.ndarray:
        return self.drift.matrix()

    def hamiltonian(self, y: Sequence[float] = ()) -> np.ndarray:
        """``H(y) = H_0 + sum_j y_j H_j``."""
        y = tuple(y)
        if y and len(y) != self.n_controls:
            raise DimensionMismatch(f"expected {self.n_controls} amplitudes, got {len(y)}")
        h = self.drift_matrix().copy()
        for yj, hj in zip(y, self.controls):
            h += yj * hj
        return h

    def in_eigenbasis(self, n: int | None = None) -> tuple[np.ndarray, list[np.ndarray]]:
        """Drift eigenvalues per basis vector and controls ``V^dagger H_j V``,
        compressed to the first ``n`` drift eigenvectors."""
        v = self.drift.vectors
        n = self.dim if n is None else n
        vn = v[:, :n]
        diag = self.drift.diagonal()[:n]
        return diag, [dagger(vn) @ h @ vn for h in self.controls]


def propagate(system: ControlSystem, schedule: ControlSchedule) -> np.ndarray:
    """Propagator of a piecewise-constant schedule (first segment leftmost)."""
    u = np.eye(system.dim, dtype=complex)
    for tau, y in schedule.segments:
        if len(y) != system.n_controls:
            raise DimensionMismatch(
                f"segment has {len(y)} amplitudes, system has {system.n_controls} controls")
        u = u @ herm_exp(system.hamiltonian(y), tau)
    return u


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (z + dagger(z))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def op_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a), 2))

