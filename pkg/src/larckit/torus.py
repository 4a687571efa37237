"""Simultaneous Diophantine approximation on the maximal torus of the drift.

``kronecker_solve`` looks for a time ``t`` and integers ``y_k`` with
``|t xhat_k - y_k - lambda_k| < delta`` for every mode.  It is an exhaustive
scan over the time axis.  The scan advances from one integer crossing of the
slowest mode to the next instead of taking fixed small steps.  Any feasible
``t`` lies in one of these pivot windows of half-width ``delta/|xhat_p|``, so
nothing inside the horizon is skipped.  Each pivot window is cut down mode by
mode to the sub-windows where every residual stays below ``delta``, and each
surviving window is refined to its exact minimax point (for fixed integers
the residuals are affine in ``t``).

Frequencies here are in cycles: a drift eigenvalue ``x_k`` corresponds to
``xhat_k = x_k / (2 pi)`` and the torus element with phases ``lambda_k`` is
``sum_k exp(2 pi i lambda_k) F_k``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptyInput, HorizonExhausted, IndependenceWarning, LarcError
from .spectral import DriftSpectrum, Status, check_rational_independence

TWO_PI = 2.0 * math.pi
DEFAULT_MAX_CANDIDATES = 10**7


@dataclass(frozen=True)
class TorusElement:
    """Phases ``lambda_k`` (mod 1), one per eigenprojection."""

    phases: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    def matrix(self, spectrum: DriftSpectrum) -> np.ndarray:
        return spectrum.function(np.exp(2j * np.pi * np.asarray(self.phases)))

    @classmethod
    def on_orbit(cls, spectrum: DriftSpectrum, s: float) -> "TorusElement":
        """Phases of ``exp(i s H_0)``."""
        return cls(tuple(np.mod(s * spectrum.xhat, 1.0)))


@dataclass(frozen=True)
class TorusGenerator:
    """Real coefficients ``x_k``; generates ``X = sum_k x_k F_k``."""

    phases: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    def matrix(self, spectrum: DriftSpectrum) -> np.ndarray:
        return spectrum.function(np.asarray(self.phases, dtype=complex))

    def exp(self, spectrum: DriftSpectrum) -> np.ndarray:
        """``exp(i X) = sum_k exp(i x_k) F_k``."""
        return spectrum.function(np.exp(1j * np.asarray(self.phases)))


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Strong neighbourhood ``{W : ||W psi_j - V psi_j|| < eps for all j}``."""

    reference: np.ndarray
    vectors: tuple[np.ndarray, ...]
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        vecs = tuple(np.asarray(v, dtype=complex).ravel() for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "reference", np.asarray(self.reference, dtype=complex))

    def distance(self, w: np.ndarray) -> float:
        if not self.vectors:
            return 0.0
        return max(float(np.linalg.norm(w @ v - self.reference @ v)) for v in self.vectors)

    def contains(self, w: np.ndarray) -> bool:
        return self.distance(w) < self.eps


@dataclass(frozen=True)
class KroneckerCertificate:
    t: float
    y: tuple[int, ...]
    residuals: tuple[float, ...]
    max_residual: float
    delta: float
    search_horizon: float
    success: bool
    candidates: int = 0

    def to_json(self) -> dict:
        return {"t": self.t, "y": list(self.y), "residuals": list(self.residuals),
                "max_residual": self.max_residual, "delta": self.delta,
                "search_horizon": self.search_horizon, "success": self.success,
                "candidates": self.candidates}


def certificate_at(t: float, xhat, lam, delta: float, horizon: float, candidates: int = 0
                   ) -> KroneckerCertificate:
    """Evaluate the residuals at ``t`` from scratch (nearest integers)."""
    xhat = np.asarray(xhat, dtype=float)
    lam = np.asarray(lam, dtype=float)
    u = t * xhat - lam
    y = np.rint(u)
    r = np.abs(u - y)
    mx = float(r.max()) if r.size else 0.0
    return KroneckerCertificate(float(t), tuple(int(v) for v in y), tuple(float(v) for v in r),
                                mx, float(delta), float(horizon), bool(mx < delta), int(candidates))


def _windows(ys: np.ndarray, a: np.ndarray, b: np.ndarray, delta: float):
    """Sub-windows of the pivot windows where every residual is below delta.

    ``a`` are positive frequencies sorted ascending (``a[0]`` is the pivot),
    ``b`` the matching shifts.  Returns integer rows ``Y`` and open intervals.
    """
    lo = (ys + b[0] - delta) / a[0]
    hi = (ys + b[0] + delta) / a[0]
    cols = [ys.astype(np.float64)]
    for k in range(1, a.size):
        umin = lo * a[k] - b[k]
        umax = hi * a[k] - b[k]
        ylo = np.ceil(umin - delta)
        yhi = np.floor(umax + delta)
        cnt = np.maximum(yhi - ylo + 1, 0).astype(np.int64)
        total = int(cnt.sum())
        if total == 0:
            return np.zeros((0, a.size)), lo[:0], hi[:0]
        idx = np.repeat(np.arange(lo.size), cnt)
        offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        yk = ylo[idx] + offs
        nlo = np.maximum(lo[idx], (yk + b[k] - delta) / a[k])
        nhi = np.minimum(hi[idx], (yk + b[k] + delta) / a[k])
        keep = nlo < nhi
        lo, hi = nlo[keep], nhi[keep]
        cols = [c[idx][keep] for c in cols] + [yk[keep]]
    return np.column_stack(cols), lo, hi


def _minimax(y_rows: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Exact minimiser of ``max_k |a_k t - (y_k + b_k)|`` per row (all a_k > 0).

    The optimum of a maximum of V-shaped functions sits where a rising
    branch meets a falling one: ``t = (c_j + c_k) / (a_j + a_k)``.
    """
    c = y_rows + b
    m = a.size
    jj, kk = np.triu_indices(m)
    ts = (c[:, jj] + c[:, kk]) / (a[jj] + a[kk])
    f = np.abs(ts[:, :, None] * a - c[:, None, :]).max(axis=2)
    best = np.argmin(f, axis=1)
    rows = np.arange(c.shape[0])
    return ts[rows, best], f[rows, best]


def kronecker_solve(xhat: Sequence[float], lam: Sequence[float], delta: float, horizon: float, *,
                    t_min: float | None = None, objective: str = "first",
                    max_candidates: int = DEFAULT_MAX_CANDIDATES,
                    skip_within: float = 0.0, chunk: int = 4096) -> KroneckerCertificate:
    """Find ``t`` and integers ``y`` with ``|t xhat_k - y_k - lam_k| < delta``.

    The search range is ``[-horizon, horizon]``, or ``(t_min, horizon]`` when
    ``t_min`` is given.  ``objective="first"`` returns the admissible window
    closest to ``t = 0``; ``"best"`` scans the whole range and returns the
    smallest maximal residual.  Within a window the returned ``t`` is its
    exact minimax point, so halving ``delta`` never increases the returned
    residual.  ``skip_within`` starts the scan at ``|t| ~ skip_within``; it
    is used by horizon doubling, where the inner range is already known to
    hold no solution.

    Raises ``HorizonExhausted`` (carrying the best pivot-aligned candidate)
    when nothing is found, ``EmptyInput`` for empty frequency lists.
    """
    xhat = np.asarray(xhat, dtype=float).ravel()
    lam = np.asarray(lam, dtype=float).ravel()
    if xhat.size == 0:
        raise EmptyInput("no frequencies given")
    if lam.shape != xhat.shape:
        raise ValueError(f"{xhat.size} frequencies but {lam.size} target phases")
    if not delta > 0 or not horizon > 0:
        raise ValueError("delta and horizon must be positive")
    if objective not in ("first", "best"):
        raise ValueError("objective must be 'first' or 'best'")
    lo_t = -horizon if t_min is None else float(t_min)
    hi_t = float(horizon)
    strict = t_min is not None
    if hi_t <= lo_t:
        raise ValueError("empty search range")

    def admissible(t):
        return ((t > lo_t) if strict else (t >= lo_t)) & (t <= hi_t)

    sign = np.where(xhat < 0, -1.0, 1.0)
    a_all = np.abs(xhat)
    b_all = sign * lam
    active = a_all > 0
    const_res = np.abs(lam[~active] - np.rint(lam[~active]))

    def fail(best_t, candidates, why):
        best = certificate_at(best_t, xhat, lam, delta, horizon, candidates)
        raise HorizonExhausted(why, best)

    if const_res.size and const_res.max() >= delta:
        t0 = 0.0 if admissible(np.array(0.0)) else min(max(1.0, lo_t), hi_t)
        fail(t0, 0, "a zero-frequency mode misses its target phase")
    if not active.any():
        t0 = 0.0 if admissible(np.array(0.0)) else min(max(1.0, lo_t), hi_t)
        return certificate_at(t0, xhat, lam, delta, horizon)

    order = np.argsort(a_all[active], kind="stable")
    a = a_all[active][order]
    b = b_all[active][order]
    ap, bp = a[0], b[0]
    y_min = math.floor(lo_t * ap - bp) - 1
    y_max = math.ceil(hi_t * ap - bp) + 1
    y0 = math.ceil(-bp)
    pos_start = max(y0, y_min, math.floor(skip_within * ap - bp) - 1)
    neg_start = min(y0 - 1, y_max, math.ceil(-skip_within * ap - bp) + 1)
    n_pos = max(0, y_max - pos_start + 1)
    n_neg = max(0, neg_start - y_min + 1)

    candidates = 0
    best_fail_t, best_fail_r = None, np.inf
    found_t, found_r = None, np.inf
    stop_after = None
    i = 0
    while i * chunk < max(n_pos, n_neg):
        if stop_after is not None and i > stop_after:
            break
        p = np.arange(pos_start + i * chunk, pos_start + min((i + 1) * chunk, n_pos), dtype=np.int64)
        q = np.arange(neg_start - i * chunk, neg_start - min((i + 1) * chunk, n_neg), -1, dtype=np.int64)
        ys = np.concatenate([p, q])
        candidates += ys.size
        if candidates > max_candidates:
            fail(best_fail_t if best_fail_t is not None else 0.0, candidates,
                 f"candidate cap {max_candidates} reached")
        # best pivot-aligned point, reported if the search fails
        centers = (ys + bp) / ap
        ok = admissible(centers)
        if ok.any():
            u = centers[ok, None] * a - b
            r = np.abs(u - np.rint(u)).max(axis=1)
            j = int(np.argmin(r))
            if r[j] < best_fail_r:
                best_fail_r, best_fail_t = float(r[j]), float(centers[ok][j])
        rows, _, _ = _windows(ys, a, b, delta)
        if rows.shape[0]:
            for s in range(0, rows.shape[0], 2048):
                ts, rs = _minimax(rows[s:s + 2048], a, b)
                ok = admissible(ts) & (rs < delta)
                if not ok.any():
                    continue
                ts, rs = ts[ok], rs[ok]
                if objective == "first":
                    key = np.lexsort((rs, np.abs(ts)))
                    j = int(key[0])
                    if found_t is None or (abs(ts[j]), rs[j]) < (abs(found_t), found_r):
                        found_t, found_r = float(ts[j]), float(rs[j])
                else:
                    key = np.lexsort((np.abs(ts), rs))
                    j = int(key[0])
                    if found_t is None or (rs[j], abs(ts[j])) < (found_r, abs(found_t)):
                        found_t, found_r = float(ts[j]), float(rs[j])
            if objective == "first" and found_t is not None and stop_after is None:
                # windows of the neighbouring chunk can still sit marginally closer to 0
                stop_after = i + 1
        i += 1

    if found_t is None:
        fail(best_fail_t if best_fail_t is not None else 0.0, candidates,
             f"no solution with residual < {delta} for |t| <= {horizon}")
    return certificate_at(found_t, xhat, lam, delta, horizon, candidates)


def initial_horizon(xhat) -> float:
    """``1e3 / min_{k != j} |xhat_k - xhat_j|`` (``1e3 / |xhat|`` for one mode)."""
    a = np.asarray(xhat, dtype=float)
    a = a[a != 0]
    if a.size == 0:
        return 1.0
    if a.size == 1:
        return max(1.0, 1e3 / abs(a[0]))
    d = np.abs(a[:, None] - a[None, :])
    gaps = d[np.triu_indices(a.size, 1)]
    gaps = gaps[gaps > 0]
    g = gaps.min() if gaps.size else np.abs(a).max()
    return max(1.0, 1e3 / g)


def solve_with_doubling(xhat, lam, delta, *, horizon: float | None = None, t_min: float | None = None,
                        max_candidates: int = DEFAULT_MAX_CANDIDATES) -> KroneckerCertificate:
    """``kronecker_solve`` with the horizon doubled on failure until the total
    number of pivot candidates reaches ``max_candidates``.  Each round scans
    only the annulus added by the doubling."""
    h = initial_horizon(xhat) if horizon is None else float(horizon)
    spent, inner = 0, 0.0
    while True:
        try:
            return kronecker_solve(xhat, lam, delta, h, t_min=t_min, skip_within=inner,
                                   max_candidates=max(1, max_candidates - spent))
        except HorizonExhausted as exc:
            spent += exc.best.candidates if exc.best is not None else 0
            if spent >= max_candidates:
                raise
            inner, h = h, h * 2.0


class TorusApprox(NamedTuple):
    t: float
    achieved: float
    certificate: KroneckerCertificate


def _check_independent(spectrum: DriftSpectrum, n: int) -> None:
    verdict = check_rational_independence(spectrum.levels(range(n)))
    if verdict.status is Status.DEPENDENT:
        warnings.warn(f"drift eigenvalues are rationally dependent (relation {verdict.relation}); "
                      "the orbit need not be dense in the torus", IndependenceWarning, stacklevel=3)


def torus_approx(spectrum: DriftSpectrum, target: TorusElement, eps: float, n_modes: int | None = None,
                 *, bound: str = "sum", horizon: float | None = None,
                 max_candidates: int = DEFAULT_MAX_CANDIDATES,
                 check_independence: bool = True) -> TorusApprox:
    """Time ``t`` with ``||(exp(i t H_0) - V) P_n|| < eps`` on the first ``n_modes`` levels.

    ``bound="sum"`` converts ``eps`` to the per-mode tolerance
    ``delta = eps / (4 pi n)`` (the n-term chordal sum kept below eps/2);
    ``bound="max"`` uses ``delta = eps / (2 pi)``, which suffices because
    both operators are diagonal in the drift eigenbasis.  The returned
    ``achieved`` is measured directly as the operator norm of
    ``(exp(i t H_0) - V) P_n``.
    """
    n = spectrum.n_levels if n_modes is None else int(n_modes)
    if not 1 <= n <= spectrum.n_levels:
        raise ValueError(f"n_modes must be in 1..{spectrum.n_levels}")
    if len(target.phases) != spectrum.n_levels:
        raise ValueError("target needs one phase per eigenprojection")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if check_independence and n > 1:
        _check_independent(spectrum, n)
    if bound == "sum":
        delta = eps / (4.0 * math.pi * n)
    elif bound == "max":
        delta = eps / TWO_PI
    else:
        raise ValueError("bound must be 'sum' or 'max'")
    xhat = spectrum.xhat[:n]
    lam = np.asarray(target.phases[:n])
    cert = solve_with_doubling(xhat, lam, delta, horizon=horizon, max_candidates=max_candidates)
    achieved = _measure_torus(spectrum, target, cert.t, n)
    if not achieved < eps:
        raise LarcError(f"direct re-evaluation gave {achieved} >= eps={eps}")
    return TorusApprox(cert.t, achieved, cert)


def _measure_torus(spectrum: DriftSpectrum, target: TorusElement, t: float, n: int) -> float:
    p = sum(spectrum.projections[:n])
    diff = (spectrum.evolution(t) - target.matrix(spectrum)) @ p
    return float(np.linalg.norm(diff, 2))


class Recurrence(NamedTuple):
    t_plus: float
    achieved: float
    n_modes: int
    certificate: KroneckerCertificate


def recurrence_time(spectrum: DriftSpectrum, t_minus: float, nbhd: NeighborhoodSpec, *,
                    horizon: float | None = None, max_candidates: int = DEFAULT_MAX_CANDIDATES,
                    min_time: float = 1e-9) -> Recurrence:
    """Return time ``t_plus > 0`` with ``exp(i t_plus H_0)`` in the neighbourhood of
    ``exp(i t_minus H_0)``.

    The smallest level count ``N`` with tails ``||(1 - P_N) psi_j|| <= eps/3``
    is chosen.  The return-time problem on those levels is then solved with
    per-mode tolerance ``(eps - 2 max tail) / (2 pi)`` and the targets
    ``t_minus * xhat_k``.  Windows whose optimum lies at or below
    ``min_time`` are the trivial continuity solution around ``t = 0`` and
    are skipped.  The result is measured directly against ``nbhd``.
    """
    if t_minus > 0:
        raise ValueError("t_minus must be <= 0")
    ref = spectrum.evolution(t_minus)
    if np.max(np.abs(ref - nbhd.reference)) > 1e-8:
        raise ValueError("neighbourhood reference must be exp(i t_minus H_0)")
    eps = nbhd.eps
    vecs = nbhd.vectors
    n_levels = spectrum.n_levels
    chosen, tail = n_levels, 0.0
    for n in range(1, n_levels + 1):
        p = sum(spectrum.projections[:n])
        tails = [float(np.linalg.norm(v - p @ v)) for v in vecs] or [0.0]
        if max(tails) <= eps / 3.0:
            chosen, tail = n, max(tails)
            break
    delta = (eps - 2.0 * tail) / TWO_PI * (1.0 - 1e-9)
    xhat = spectrum.xhat[:chosen]
    lam = t_minus * xhat
    cert = solve_with_doubling(xhat, lam, delta, horizon=horizon, t_min=min_time,
                               max_candidates=max_candidates)
    achieved = nbhd.distance(spectrum.evolution(cert.t))
    if not achieved < eps:
        raise LarcError(f"direct re-evaluation gave {achieved} >= eps={eps}")
    return Recurrence(cert.t, achieved, chosen, cert)


def random_unit_vectors(dim: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for _ in range(count):
        z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        out.append(z / np.linalg.norm(z))
    return out
