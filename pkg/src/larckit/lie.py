"""Lie closure at finite truncation and bracket-word certificates.

Anti-Hermitian matrices are handled as vectors of ``C^(n*n)`` with the real
inner product ``Re tr(A^dagger B)``; the complex variant uses the full
Hilbert-Schmidt product.  The closure loop brackets each newly adjoined
element with every earlier one, so every pair is bracketed exactly once.

Bracket words are nested tuples over generator labels:

* ``"F3"``: eigenprojection ``F_3`` of the drift (0-based),
* ``"H1"``: control ``H_1`` (1-based),
* ``("br", a, b)``: the commutator ``[a, b]``,
* ``("lin", ((c1, a), (c2, b), ...))``: a complex linear combination.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .config import DEFAULT_TOL, max_workers
from .errors import DimensionMismatch, HypothesesNotMet, NotAntiHermitian, PathNotFound
from .graph import CouplingGraph, bfs_path, build_graph, is_connected
from .linop import ControlSystem, as_matrix, commutator, dagger, is_anti_hermitian
from .spectral import Status, check_rational_independence

Word = Union[str, tuple]

_BATCH = 4096


@dataclass(frozen=True)
class LieBasis:
    """HS-orthonormal basis of a closed Lie algebra.

    ``provenance[i]`` names the generator or the pair of earlier basis
    elements (``"[B4,B1]"``) whose bracket contributed element ``i``.
    """

    dim_ambient: int
    elements: tuple[np.ndarray, ...]
    provenance: tuple[str, ...]
    rank_tol: float
    converged: bool
    passes: int
    field: str = "real"

    @property
    def dim(self) -> int:
        return len(self.elements)

    @property
    def max_dim(self) -> int:
        return self.dim_ambient ** 2

    def stack(self) -> np.ndarray:
        n = self.dim_ambient
        if not self.elements:
            return np.zeros((0, n, n), dtype=complex)
        return np.stack(self.elements)


class Verdict(str, enum.Enum):
    FULL = "Full"
    PROPER = "Proper"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class LarcReport:
    closure_dim: int
    ambient_dim: int
    verdict: Verdict
    iterations: int
    history: tuple[dict, ...] = field(default=())

    def to_json(self) -> dict:
        return {"closure_dim": self.closure_dim, "ambient_dim": self.ambient_dim,
                "verdict": self.verdict.value, "iterations": self.iterations,
                "history": list(self.history)}


class _Span:
    """Incremental orthonormal basis of vectors in ``C^m``."""

    def __init__(self, m: int, real: bool, tol: float):
        self.q = np.zeros((m, 0), dtype=complex)
        self.real = real
        self.tol = tol

    def _coef(self, q, x):
        c = dagger(q) @ x
        return c.real if self.real else c

    def project_out(self, x: np.ndarray) -> np.ndarray:
        """Remove the span from the columns of ``x`` (two passes)."""
        if self.q.shape[1] == 0:
            return x
        for _ in range(2):
            x = x - self.q @ self._coef(self.q, x)
        return x

    def try_add(self, x: np.ndarray) -> bool:
        r = self.project_out(x[:, None])[:, 0]
        nrm = np.linalg.norm(r)
        if nrm <= self.tol:
            return False
        self.q = np.column_stack([self.q, r / nrm])
        return True


def _closure(gens: Sequence[np.ndarray], labels: Sequence[str], rank_tol: float, max_passes: int,
             real: bool) -> LieBasis:
    if not gens:
        raise ValueError("no generators")
    n = gens[0].shape[0]
    target = n * n
    span = _Span(n * n, real, rank_tol)
    prov: list[str] = []
    for g, lab in zip(gens, labels):
        if g.shape != (n, n):
            raise DimensionMismatch("generators must share one dimension")
        nrm = np.linalg.norm(g)
        if nrm <= rank_tol:
            continue
        if span.try_add(g.reshape(-1) / nrm):
            prov.append(lab)
        if len(prov) == target:
            break
    passes = 0
    start = 0
    converged = True
    while len(prov) < target:
        if passes >= max_passes:
            converged = False
            break
        passes += 1
        end = len(prov)
        pairs = [(i, j) for i in range(start, end) for j in range(i)]
        start = end
        added = 0
        for s in range(0, len(pairs), _BATCH):
            chunk = pairs[s:s + _BATCH]
            mats = span.q.T.reshape(-1, n, n)
            a = mats[[i for i, _ in chunk]]
            b = mats[[j for _, j in chunk]]
            br = (a @ b - b @ a).reshape(len(chunk), -1).T
            res = span.project_out(br)
            norms = np.linalg.norm(res, axis=0)
            for col in np.flatnonzero(norms > rank_tol):
                if span.try_add(res[:, col]):
                    i, j = chunk[col]
                    prov.append(f"[B{i},B{j}]")
                    added += 1
                    if len(prov) == target:
                        break
            if len(prov) == target:
                break
        if added == 0:
            break
    elements = tuple(span.q.T.reshape(-1, n, n).copy())
    return LieBasis(n, elements, tuple(prov), rank_tol, converged, passes, "real" if real else "complex")


def _default_labels(k: int) -> list[str]:
    return [f"G{i}" for i in range(k)]


def lie_closure(generators: Sequence[np.ndarray], rank_tol: float = 1e-9, max_passes: int = 50,
                labels: Sequence[str] | None = None, tol: float = DEFAULT_TOL) -> LieBasis:
    """Real Lie closure of anti-Hermitian generators.

    Generators are scaled to unit HS norm, so ``rank_tol`` is relative to
    them.  ``converged`` is False when ``max_passes`` ran out first.
    """
    gens = [as_matrix(g, "generator") for g in generators]
    for k, g in enumerate(gens):
        scale = max(1.0, float(np.max(np.abs(g))))
        if not is_anti_hermitian(g, tol * scale):
            raise NotAntiHermitian(f"generator {k} is not anti-Hermitian")
    labels = list(labels) if labels is not None else _default_labels(len(gens))
    return _closure(gens, labels, rank_tol, max_passes, real=True)


def lie_closure_complex(generators: Sequence[np.ndarray], rank_tol: float = 1e-9, max_passes: int = 50,
                        labels: Sequence[str] | None = None) -> LieBasis:
    """Closure over C (any square matrices); its dimension over C equals the
    real dimension of the closure of the anti-Hermitian forms."""
    gens = [as_matrix(g, "generator") for g in generators]
    labels = list(labels) if labels is not None else _default_labels(len(gens))
    return _closure(gens, labels, rank_tol, max_passes, real=False)


def closure_defect(basis: LieBasis) -> float:
    """Largest HS norm of the part of ``[B_i, B_j]`` outside the span."""
    if basis.dim < 2:
        return 0.0
    n = basis.dim_ambient
    span = _Span(n * n, basis.field == "real", basis.rank_tol)
    span.q = basis.stack().reshape(basis.dim, -1).T
    mats = basis.stack()
    worst = 0.0
    pairs = [(i, j) for i in range(basis.dim) for j in range(i)]
    for s in range(0, len(pairs), _BATCH):
        chunk = pairs[s:s + _BATCH]
        a = mats[[i for i, _ in chunk]]
        b = mats[[j for _, j in chunk]]
        br = (a @ b - b @ a).reshape(len(chunk), -1).T
        worst = max(worst, float(np.linalg.norm(span.project_out(br), axis=0).max()))
    return worst


def truncated_generators(system: ControlSystem, n: int) -> tuple[list[np.ndarray], list[str]]:
    """``i F_k`` and ``i H_j`` compressed to the first ``n`` drift eigenvectors
    (in the eigenbasis)."""
    if not 1 <= n <= system.dim:
        raise ValueError(f"truncation {n} outside 1..{system.dim}")
    _, ctrls = system.in_eigenbasis(n)
    gens, labels = [], []
    for k, sl in enumerate(system.drift.slices()):
        lo, hi = sl.start, min(sl.stop, n)
        if lo >= n:
            break
        f = np.zeros((n, n), dtype=complex)
        f[range(lo, hi), range(lo, hi)] = 1.0
        gens.append(1j * f)
        labels.append(f"F{k}")
    for j, h in enumerate(ctrls, start=1):
        gens.append(1j * h)
        labels.append(f"H{j}")
    return gens, labels


def larc_check(system: ControlSystem, truncations: Sequence[int] | None = None, rank_tol: float = 1e-9,
               max_passes: int = 50, workers: int | None = None) -> LarcReport:
    """Lie closure of ``{i F_k} u {i H_j}`` at each truncation.

    The summary fields describe the largest truncation; ``history`` holds
    one entry per truncation in the order given.
    """
    truncs = list(truncations) if truncations else [system.dim]

    def run(n):
        gens, labels = truncated_generators(system, n)
        return n, lie_closure(gens, rank_tol, max_passes, labels)

    workers = max_workers() if workers is None else workers
    if workers > 1 and len(truncs) > 1:
        with ThreadPoolExecutor(min(workers, len(truncs))) as ex:
            results = list(ex.map(run, truncs))
    else:
        results = [run(n) for n in truncs]
    history = []
    for n, basis in results:
        history.append({"n": n, "closure_dim": basis.dim, "ambient_dim": n * n,
                        "verdict": _verdict(basis).value, "passes": basis.passes})
    n_top, top = max(results, key=lambda r: r[0])
    return LarcReport(top.dim, n_top * n_top, _verdict(top), top.passes, tuple(history))


def _verdict(basis: LieBasis) -> Verdict:
    if basis.dim == basis.max_dim:
        return Verdict.FULL
    return Verdict.PROPER if basis.converged else Verdict.MAX_ITERATIONS


def _check_rank_one(f: np.ndarray, name: str) -> None:
    if np.max(np.abs(f @ f - f)) > 1e-9 or np.max(np.abs(f - dagger(f))) > 1e-9:
        raise ValueError(f"{name} is not an orthogonal projection")
    if abs(np.trace(f).real - 1) > 1e-9:
        raise ValueError(f"{name} is not rank one")


def double_bracket(f_v: np.ndarray, h: np.ndarray, f_w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``sym = [F_w, [H, F_v]]`` and ``antisym = [F_v, sym]``.

    For rank-one ``F_v = |v><v|``, ``F_w = |w><w|`` with ``v`` orthogonal to
    ``w`` and ``alpha = <v|H|w>``:
    ``sym = alpha |v><w| + conj(alpha) |w><v|`` and
    ``antisym = alpha |v><w| - conj(alpha) |w><v|``.
    """
    f_v = as_matrix(f_v, "F_v")
    f_w = as_matrix(f_w, "F_w")
    _check_rank_one(f_v, "F_v")
    _check_rank_one(f_w, "F_w")
    if np.max(np.abs(f_v @ f_w)) > 1e-9:
        raise ValueError("F_v and F_w are not orthogonal")
    sym = commutator(f_w, commutator(h, f_v))
    return sym, commutator(f_v, sym)


# --- bracket words ---------------------------------------------------------

def word_to_json(word: Word):
    if isinstance(word, str):
        return word
    if word[0] == "br":
        return ["br", word_to_json(word[1]), word_to_json(word[2])]
    return ["lin", [[complex(c).real, complex(c).imag, word_to_json(w)] for c, w in word[1]]]


def word_from_json(obj) -> Word:
    if isinstance(obj, str):
        return obj
    if obj[0] == "br":
        return ("br", word_from_json(obj[1]), word_from_json(obj[2]))
    if obj[0] == "lin":
        return ("lin", tuple((complex(re, im), word_from_json(w)) for re, im, w in obj[1]))
    raise ValueError(f"unknown word node {obj[0]!r}")


def word_to_str(word: Word) -> str:
    if isinstance(word, str):
        return word
    if word[0] == "br":
        return f"[{word_to_str(word[1])}, {word_to_str(word[2])}]"
    terms = []
    for c, w in word[1]:
        c = complex(c)
        cs = f"({c.real:.6g}{c.imag:+.6g}i)"
        terms.append(f"{cs}*{word_to_str(w)}")
    return "(" + " + ".join(terms) + ")"


def word_depth(word: Word) -> int:
    if isinstance(word, str):
        return 0
    if word[0] == "br":
        return 1 + max(word_depth(word[1]), word_depth(word[2]))
    return max((word_depth(w) for _, w in word[1]), default=0)


def generator_table(system: ControlSystem) -> dict[str, np.ndarray]:
    """Ambient-basis matrices for the labels ``F{k}`` and ``H{j}``."""
    table = {f"F{k}": p for k, p in enumerate(system.drift.projections)}
    for j, h in enumerate(system.controls, start=1):
        table[f"H{j}"] = h
    return table


def evaluate_word(word: Word, table: dict[str, np.ndarray]) -> np.ndarray:
    """Evaluate a word from scratch using only the given generator matrices."""
    cache: dict[int, np.ndarray] = {}

    def ev(w):
        key = id(w)
        if key in cache:
            return cache[key]
        if isinstance(w, str):
            if w not in table:
                raise KeyError(f"unknown generator {w!r}")
            out = np.asarray(table[w], dtype=complex)
        elif w[0] == "br":
            a, b = ev(w[1]), ev(w[2])
            out = a @ b - b @ a
        elif w[0] == "lin":
            out = sum(complex(c) * ev(x) for c, x in w[1])
        else:
            raise ValueError(f"unknown word node {w[0]!r}")
        cache[key] = out
        return out

    return ev(word)


@dataclass(frozen=True)
class CertificateEntry:
    v: int
    w: int
    path: tuple[int, ...]
    word: Word
    error: float

    def to_json(self) -> dict:
        return {"v": self.v, "w": self.w, "path": list(self.path), "depth": word_depth(self.word),
                "word": word_to_json(self.word), "error": self.error}


def matrix_unit_word(system: ControlSystem, graph: CouplingGraph, v: int, w: int) -> Word:
    """Word for ``|phi_v><phi_w|`` along an edge ``v - w``.

    Uses the control with the largest coupling ``alpha = <phi_v|H_l|phi_w>``
    and the combination ``(sym + antisym) / (2 alpha)`` of the two double
    brackets.
    """
    vecs = system.drift.vectors
    best = None
    for l, h in enumerate(system.controls, start=1):
        alpha = complex(np.vdot(vecs[:, v], h @ vecs[:, w]))
        if abs(alpha) > graph.edge_tol and (best is None or abs(alpha) > abs(best[1])):
            best = (l, alpha)
    if best is None:
        raise PathNotFound(f"no control couples {v} and {w}")
    l, alpha = best
    sym = ("br", f"F{w}", ("br", f"H{l}", f"F{v}"))
    antisym = ("br", f"F{v}", sym)
    c = 1.0 / (2.0 * alpha)
    return ("lin", ((c, sym), (c, antisym)))


def path_word(system: ControlSystem, graph: CouplingGraph, path: Sequence[int]) -> Word:
    """Nested bracket ``[E_{k1 k2}, [E_{k2 k3}, [...]]] = E_{k1 kM}`` along a simple path."""
    if len(path) == 1:
        return f"F{path[0]}"
    units = [matrix_unit_word(system, graph, a, b) for a, b in zip(path, path[1:])]
    word = units[-1]
    for u in reversed(units[:-1]):
        word = ("br", u, word)
    return word


def thm2_hypotheses(system: ControlSystem, graph: CouplingGraph | None = None, verdict=None,
                    coeff_bound: int = 20, tol: float = 1e-9) -> dict:
    """Checklist: non-degenerate drift, independent spectrum, connected graph."""
    graph = build_graph(system) if graph is None else graph
    if verdict is None:
        verdict = check_rational_independence(system.drift, coeff_bound, tol)
    connected, comps = is_connected(graph)
    checks = {
        "non_degenerate": not system.drift.is_degenerate,
        "rationally_independent": verdict.status is Status.INDEPENDENT,
        "graph_connected": connected,
    }
    return {"checks": checks, "all": all(checks.values()), "components": comps,
            "independence": verdict}


def thm2_certificate(system: ControlSystem, graph: CouplingGraph | None = None, verdict=None,
                     check_tol: float = 1e-9) -> list[CertificateEntry]:
    """Bracket words producing every matrix unit ``|phi_v><phi_w|``.

    Each word is re-evaluated from the generator matrices and compared with
    the target; a miss above ``check_tol`` raises ``ArithmeticError``.
    """
    graph = build_graph(system) if graph is None else graph
    hyp = thm2_hypotheses(system, graph, verdict)
    if not hyp["all"]:
        failed = [k for k, ok in hyp["checks"].items() if not ok]
        raise HypothesesNotMet("hypotheses not met: " + ", ".join(failed))
    table = generator_table(system)
    vecs = system.drift.vectors
    out = []
    n = system.drift.n_levels
    for v in range(n):
        for w in range(n):
            path = bfs_path(graph, v, w)
            if path is None:
                raise PathNotFound(f"no path from {v} to {w} in a connected graph")
            word = path_word(system, graph, path)
            target = np.outer(vecs[:, v], vecs[:, w].conj())
            err = float(np.max(np.abs(evaluate_word(word, table) - target)))
            if not err < check_tol:
                raise ArithmeticError(f"certificate for ({v}, {w}) misses by {err}")
            out.append(CertificateEntry(v, w, tuple(path), word, err))
    return out
