"""Pure point spectrum of the drift: eigenvalues, multiplicities and
eigenprojections, plus rational-independence verdicts.

Rational independence of floating point numbers cannot be decided, so
numerical verdicts are relative to a coefficient bound ``B`` and a
tolerance ``tau``: *Dependent* means an integer vector with ``|c_k| <= B``
and ``|sum c_k x_k| < tau`` was found, *Independent* means none exists.
Exact eigenvalue tags (see :mod:`larckit.exact`) give genuine verdicts.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .config import DEFAULT_TOL
from .exact import ExactValue, integer_vector, rational_nullspace
from .linop import as_matrix, dagger, is_hermitian
from .errors import NotHermitian

TWO_PI = 2.0 * np.pi
_EXHAUSTIVE_MAX_LEVELS = 4
_EPS = np.finfo(float).eps


def default_gap_tol(values) -> float:
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    return 1e-9 * scale if scale > 0 else 1e-9


@dataclass(frozen=True, eq=False)
class DriftSpectrum:
    """Distinct eigenvalues ``x_k`` with multiplicities and eigenprojections.

    ``vectors`` is a unitary whose columns are drift eigenvectors, grouped
    cluster by cluster in the order of ``eigenvalues``; projection ``F_k``
    is the sum of the outer products of cluster ``k``'s columns.
    """

    eigenvalues: np.ndarray
    multiplicities: tuple[int, ...]
    vectors: np.ndarray
    exact: tuple[ExactValue | None, ...] | None = None
    gap_tol: float = 0.0
    projections: tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self):
        x = np.asarray(self.eigenvalues, dtype=float)
        v = np.asarray(self.vectors, dtype=complex)
        mult = tuple(int(m) for m in self.multiplicities)
        if len(mult) != len(x) or any(m < 1 for m in mult):
            raise ValueError("one positive multiplicity per eigenvalue required")
        if v.shape != (sum(mult), sum(mult)):
            raise ValueError(f"eigenvector matrix shape {v.shape} does not match multiplicities")
        if self.exact is not None and len(self.exact) != len(x):
            raise ValueError("one exact tag (or None) per eigenvalue required")
        x.setflags(write=False)
        v.setflags(write=False)
        projs = []
        for sl in _slices(mult):
            block = v[:, sl]
            p = block @ dagger(block)
            p.setflags(write=False)
            projs.append(p)
        object.__setattr__(self, "eigenvalues", x)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "projections", tuple(projs))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_levels(self) -> int:
        return len(self.eigenvalues)

    @property
    def xhat(self) -> np.ndarray:
        return self.eigenvalues / TWO_PI

    @property
    def is_degenerate(self) -> bool:
        return any(m > 1 for m in self.multiplicities)

    @property
    def has_exact(self) -> bool:
        return self.exact is not None and all(e is not None for e in self.exact)

    def slices(self) -> list[slice]:
        return _slices(self.multiplicities)

    def diagonal(self) -> np.ndarray:
        """Eigenvalue attached to each column of ``vectors``."""
        return np.repeat(self.eigenvalues, self.multiplicities)

    def matrix(self) -> np.ndarray:
        """``H_0 = sum_k x_k F_k``."""
        return (self.vectors * self.diagonal()) @ dagger(self.vectors)

    def function(self, values) -> np.ndarray:
        """``sum_k f_k F_k`` for one (complex) value per eigenvalue."""
        values = np.asarray(values)
        if values.shape != (self.n_levels,):
            raise ValueError(f"expected {self.n_levels} values, got shape {values.shape}")
        return (self.vectors * np.repeat(values, self.multiplicities)) @ dagger(self.vectors)

    def evolution(self, t: float) -> np.ndarray:
        """``exp(i t H_0)``."""
        return self.function(np.exp(1j * t * self.eigenvalues))

    def levels(self, which: Sequence[int]) -> "DriftSpectrum":
        """Eigenvalue data of the chosen levels on a fresh diagonal basis.

        Only eigenvalues, multiplicities and tags carry over; meant for
        independence checks on a subset of modes.
        """
        which = list(which)
        mult = tuple(self.multiplicities[k] for k in which)
        exact = None if self.exact is None else tuple(self.exact[k] for k in which)
        return DriftSpectrum(self.eigenvalues[which], mult, np.eye(sum(mult), dtype=complex),
                             exact, self.gap_tol)


def _slices(mult: Sequence[int]) -> list[slice]:
    out, start = [], 0
    for m in mult:
        out.append(slice(start, start + m))
        start += m
    return out


def group_degenerate(raw_eigenvalues, gap_tol: float | None = None, vectors=None,
                     exact: Sequence[ExactValue | None] | None = None) -> DriftSpectrum:
    """Cluster raw eigenvalues whose consecutive sorted gaps are below ``gap_tol``.

    Each cluster contributes its arithmetic mean as eigenvalue, its size as
    multiplicity and the span of the matching columns of ``vectors``
    (identity when omitted, i.e. a diagonal drift) as eigenprojection.
    """
    raw = np.asarray(raw_eigenvalues, dtype=float).ravel()
    if raw.size == 0:
        raise ValueError("no eigenvalues given")
    if gap_tol is None:
        gap_tol = default_gap_tol(raw)
    v = np.eye(raw.size, dtype=complex) if vectors is None else np.asarray(vectors, dtype=complex)
    if v.shape != (raw.size, raw.size):
        raise ValueError(f"eigenvector matrix must be {raw.size}x{raw.size}")
    order = np.argsort(raw, kind="stable")
    clusters: list[list[int]] = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        if raw[cur] - raw[prev] < gap_tol:
            clusters[-1].append(cur)
        else:
            clusters.append([cur])
    values = np.array([raw[c].mean() for c in clusters])
    cols = [i for c in clusters for i in c]
    tags = None
    if exact is not None:
        tags = []
        for c in clusters:
            first = exact[c[0]]
            tags.append(first if all(exact[i] == first for i in c) else None)
        tags = tuple(tags)
    return DriftSpectrum(values, tuple(len(c) for c in clusters), v[:, cols], tags, float(gap_tol))


def spectrum_from_matrix(h, gap_tol: float | None = None, tol: float = DEFAULT_TOL) -> DriftSpectrum:
    h = as_matrix(h, "H0")
    scale = max(1.0, float(np.max(np.abs(h))))
    if not is_hermitian(h, tol * scale):
        raise NotHermitian("drift matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    return group_degenerate(w, gap_tol, v)


def spectrum_from_eigenvalues(values, exact: Sequence[ExactValue | None] | None = None,
                              gap_tol: float | None = None) -> DriftSpectrum:
    """Diagonal drift ``diag(values)`` in the ambient basis."""
    return group_degenerate(values, gap_tol, None, exact)


def eigenprojection(spectrum: DriftSpectrum, k: int) -> np.ndarray:
    if not 0 <= k < spectrum.n_levels:
        raise IndexError(f"eigenprojection index {k} out of range 0..{spectrum.n_levels - 1}")
    return spectrum.projections[k]


class Status(str, enum.Enum):
    INDEPENDENT = "Independent"
    DEPENDENT = "Dependent"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class IndependenceVerdict:
    status: Status
    relation: tuple[int, ...] | None
    coeff_bound: int
    tolerance: float
    method: str
    residual: float | None = None
    detail: str = ""

    @property
    def exact(self) -> bool:
        return self.method == "exact"

    def to_json(self) -> dict:
        return {"status": self.status.value,
                "relation": list(self.relation) if self.relation is not None else None,
                "coeff_bound": self.coeff_bound, "tolerance": self.tolerance,
                "method": self.method, "residual": self.residual, "detail": self.detail}


def relation_value(relation: Sequence[int], values: Sequence[float]) -> Fraction:
    """Exact value of ``sum c_k x_k`` for the given binary floats."""
    return sum((Fraction(int(c)) * Fraction(float(x)) for c, x in zip(relation, values)), Fraction(0))


def relation_value_mp(relation: Sequence[int], values: Sequence, dps: int = 50) -> mpmath.mpf:
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for c, x in zip(relation, values):
            xv = x.mp(dps) if isinstance(x, ExactValue) else mpmath.mpf(float(x))
            total += int(c) * xv
        return +total


def _rounding_slack(relation, values) -> float:
    # eigenvalues carry O(eps * max|x|) error; propagate through the relation
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    return 8.0 * _EPS * scale * float(sum(abs(int(c)) for c in relation))


def _canonical_key(c: Sequence[int]):
    return (sum(1 for v in c if v), sum(abs(v) for v in c), tuple(-abs(v) for v in c), tuple(c))


def _exact_verdict(tags: Sequence[ExactValue], bound: int, tol: float) -> IndependenceVerdict:
    symbols = sorted({s for t in tags for s in t.symbols})
    rows = [[t.coeff(None) for t in tags]] + [[t.coeff(s) for t in tags] for s in symbols]
    null = rational_nullspace(rows)
    if not null:
        return IndependenceVerdict(Status.INDEPENDENT, None, bound, tol, "exact",
                                   detail="linearly independent over Q (exact)")
    cands = [integer_vector(v) for v in null]
    rel = min(cands, key=_canonical_key)
    return IndependenceVerdict(Status.DEPENDENT, rel, bound, tol, "exact", 0.0,
                               detail="exact rational relation")


def _exhaustive(values: np.ndarray, bound: int, tol: float):
    """Scan all integer vectors with ``|c_k| <= bound`` (up to sign).

    Returns ``(definite, ambiguous)``: relations that beat ``tol`` beyond
    rounding slack, and relations too close to ``tol`` to call.
    """
    m = values.size
    rng = np.arange(-bound, bound + 1)
    definite, ambiguous = [], []
    # fix the leading coordinate to cut memory; the sign symmetry halves the work
    for lead in range(m):
        tail = m - lead - 1
        if tail:
            grids = np.array(list(itertools.product(rng, repeat=tail)), dtype=np.int64)
        else:
            grids = np.zeros((1, 0), dtype=np.int64)
        weight = np.abs(grids).sum(axis=1)
        for first in range(1, bound + 1):
            v = first * values[lead] + grids @ values[lead + 1:]
            slack = 8.0 * _EPS * float(np.max(np.abs(values))) * (first + weight)
            hit = np.nonzero(np.abs(v) < tol + slack + 1e-300)[0]
            for i in hit:
                c = (0,) * lead + (first,) + tuple(int(u) for u in grids[i])
                exact_abs = abs(float(relation_value(c, values)))
                sl = _rounding_slack(c, values)
                if exact_abs + sl < tol:
                    definite.append(c)
                elif exact_abs - sl < tol:
                    ambiguous.append(c)
    return definite, ambiguous


def _pslq(values: np.ndarray, bound: int, tol: float):
    with mpmath.workdps(40):
        try:
            rel = mpmath.pslq([mpmath.mpf(float(x)) for x in values], tol=mpmath.mpf(tol),
                              maxcoeff=bound + 1, maxsteps=10_000)
        except ValueError:
            return None
    if rel is None:
        return None
    rel = tuple(int(c) for c in rel)
    if not any(rel):
        return None
    first = next(c for c in rel if c)
    return tuple(-c for c in rel) if first < 0 else rel


def check_rational_independence(spectrum: DriftSpectrum | Sequence[float], coeff_bound: int = 20,
                                tol: float = 1e-9, use_exact: bool = True) -> IndependenceVerdict:
    """Decide rational (in)dependence of the drift eigenvalues.

    With exact tags on every eigenvalue the decision is exact linear algebra
    over Q.  Otherwise PSLQ searches for an integer relation with
    ``|c_k| <= coeff_bound`` and ``|sum c_k x_k| < tol``; for at most four
    eigenvalues an exhaustive scan backs it up and has the final word.
    Dependent witnesses are re-evaluated exactly on the binary floats.
    """
    if coeff_bound < 1 or not tol > 0:
        raise ValueError("need coeff_bound >= 1 and tol > 0")
    if isinstance(spectrum, DriftSpectrum):
        values = np.asarray(spectrum.eigenvalues, dtype=float)
        tags = spectrum.exact if (use_exact and spectrum.has_exact) else None
    else:
        values = np.asarray(spectrum, dtype=float).ravel()
        tags = None
    if values.size == 0:
        raise ValueError("empty spectrum")
    if tags is not None:
        return _exact_verdict(tags, coeff_bound, tol)

    m = values.size
    small = np.nonzero(np.abs(values) < tol)[0]
    if small.size:
        k = int(small[0])
        rel = tuple(1 if i == k else 0 for i in range(m))
        res = abs(float(relation_value(rel, values)))
        return IndependenceVerdict(Status.DEPENDENT, rel, coeff_bound, tol, "trivial", res,
                                   "zero eigenvalue")
    if m == 1:
        return IndependenceVerdict(Status.INDEPENDENT, None, coeff_bound, tol, "trivial",
                                   detail="single nonzero eigenvalue")

    found = _pslq(values, coeff_bound, tol)
    pslq_ok = None
    if found is not None and max(abs(c) for c in found) <= coeff_bound:
        val = abs(float(relation_value(found, values)))
        if val + _rounding_slack(found, values) < tol:
            pslq_ok = (found, val)

    if m <= _EXHAUSTIVE_MAX_LEVELS:
        definite, ambiguous = _exhaustive(values, coeff_bound, tol)
        method = "pslq+exhaustive"
        if definite:
            rel = min(definite, key=_canonical_key)
            return IndependenceVerdict(Status.DEPENDENT, rel, coeff_bound, tol, method,
                                       abs(float(relation_value(rel, values))))
        if ambiguous:
            rel = min(ambiguous, key=_canonical_key)
            return IndependenceVerdict(Status.INCONCLUSIVE, rel, coeff_bound, tol, method,
                                       abs(float(relation_value(rel, values))),
                                       "relation value within rounding slack of tol")
        return IndependenceVerdict(Status.INDEPENDENT, None, coeff_bound, tol, method,
                                   detail=f"no relation with |c_k| <= {coeff_bound}")

    if pslq_ok is not None:
        return IndependenceVerdict(Status.DEPENDENT, pslq_ok[0], coeff_bound, tol, "pslq", pslq_ok[1])
    if found is not None:
        return IndependenceVerdict(Status.INCONCLUSIVE, found, coeff_bound, tol, "pslq",
                                   abs(float(relation_value(found, values))),
                                   "PSLQ candidate fails the bound or sits within rounding slack")
    return IndependenceVerdict(Status.INDEPENDENT, None, coeff_bound, tol, "pslq",
                               detail=f"PSLQ found no relation with |c_k| <= {coeff_bound}")
