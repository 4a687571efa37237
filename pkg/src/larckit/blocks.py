"""Commutants, centers and block decomposition of generated matrix *-algebras."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RandomElementDegenerate
from .lie import LieBasis, lie_closure
from .linop import ControlSystem, as_matrix, dagger

DEFAULT_RETRIES = 8


def _with_adjoints(generators: Sequence[np.ndarray], tol: float) -> list[np.ndarray]:
    out = []
    for g in generators:
        g = as_matrix(g, "generator")
        out.append(g)
        if np.max(np.abs(g - dagger(g))) > tol:
            out.append(dagger(g))
    return out


def commutant_basis(generators: Sequence[np.ndarray], tol: float = 1e-9) -> list[np.ndarray]:
    """HS-orthonormal basis of ``{X : XG = GX}`` for all generators and their adjoints.

    With row-major vectorisation ``vec(XG - GX) = (1 (x) G^T - G (x) 1) vec(X)``;
    the commutant is the joint kernel, read off from an SVD.
    """
    gens = _with_adjoints(generators, tol)
    if not gens:
        raise ValueError("no generators")
    n = gens[0].shape[0]
    eye = np.eye(n)
    rows = []
    scale = 1.0
    for g in gens:
        if g.shape != (n, n):
            raise ValueError("generators must share one dimension")
        scale = max(scale, float(np.linalg.norm(g, 2)))
        rows.append(np.kron(eye, g.T) - np.kron(g, eye))
    m = np.vstack(rows)
    _, s, vh = np.linalg.svd(m)
    s = np.concatenate([s, np.zeros(n * n - s.size)])
    null = vh[s <= tol * scale].conj()
    return [v.reshape(n, n) for v in null]


def center_basis(generators: Sequence[np.ndarray], tol: float = 1e-9) -> list[np.ndarray]:
    """Center of the generated algebra: the commutant of generators plus their commutant."""
    comm = commutant_basis(generators, tol)
    return commutant_basis(list(generators) + comm, tol)


def _hermitian_parts(basis: Sequence[np.ndarray]) -> list[np.ndarray]:
    out = []
    for c in basis:
        out.append(0.5 * (c + dagger(c)))
        out.append(-0.5j * (c - dagger(c)))
    return out


def _spectral_clusters(z: np.ndarray, gap: float) -> list[np.ndarray]:
    w, v = np.linalg.eigh(z)
    groups = [[0]]
    for i in range(1, w.size):
        if w[i] - w[i - 1] < gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [v[:, g] for g in groups]


@dataclass(frozen=True)
class Block:
    basis: np.ndarray  # orthonormal columns spanning the central block
    factor_dim: int  # h: the block is C^h (x) C^m with the algebra acting on the first factor
    multiplicity: int  # m
    support: tuple[int, ...]  # ambient basis indices carrying weight

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def projection(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[Block, ...]
    center_dim: int
    commutant_dim: int
    seed: int

    @property
    def central_projections(self) -> list[np.ndarray]:
        return [b.projection for b in self.blocks]

    @property
    def block_dims(self) -> tuple[int, ...]:
        """Dimensions of the central subspaces."""
        return tuple(b.rank for b in self.blocks)

    def assembled_basis(self) -> np.ndarray:
        return np.hstack([b.basis for b in self.blocks])

    def off_block_residual(self, g: np.ndarray) -> float:
        """Largest off-block entry of ``U^dagger G U`` in the assembled basis."""
        u = self.assembled_basis()
        m = dagger(u) @ np.asarray(g, dtype=complex) @ u
        mask = np.ones(m.shape, dtype=bool)
        start = 0
        for b in self.blocks:
            mask[start:start + b.rank, start:start + b.rank] = False
            start += b.rank
        return float(np.max(np.abs(m[mask]), initial=0.0))

    def to_json(self) -> dict:
        return {"center_dim": self.center_dim, "commutant_dim": self.commutant_dim, "seed": self.seed,
                "blocks": [{"dim": b.rank, "factor_dim": b.factor_dim,
                            "multiplicity": b.multiplicity, "support": list(b.support)} for b in self.blocks]}


def block_decompose(generators: Sequence[np.ndarray], seed: int = 0, tol: float = 1e-9,
                    retries: int = DEFAULT_RETRIES) -> BlockDecomposition:
    """Minimal central projections of the *-algebra generated by ``generators``.

    A random Hermitian element of the center (Gaussian coefficients) has as
    many distinct eigenvalues as the center has dimensions, almost surely;
    its eigenspaces are the central blocks.  Inside a block the commutant is
    ``1_h (x) M_m``, which gives the multiplicity ``m`` and ``h = rank / m``.
    Blocks are ordered by the least ambient basis index they touch.
    """
    gens = [as_matrix(g, "generator") for g in generators]
    comm = commutant_basis(gens, tol)
    center = commutant_basis(gens + comm, tol)
    herm = _hermitian_parts(center)
    rng = np.random.default_rng(seed)
    clusters = None
    for _ in range(retries):
        z = sum(c * h for c, h in zip(rng.normal(size=len(herm)), herm))
        z = 0.5 * (z + dagger(z))
        gap = 1e-6 * max(1.0, float(np.linalg.norm(z, 2)))
        found = _spectral_clusters(z, gap)
        if len(found) == len(center):
            clusters = found
            break
    if clusters is None:
        raise RandomElementDegenerate(f"no central element with {len(center)} distinct eigenvalues "
                                      f"after {retries} draws")
    blocks = []
    for v in clusters:
        p = v @ dagger(v)
        support = tuple(int(i) for i in np.flatnonzero(np.abs(np.diagonal(p)) > 1e-9))
        local = [dagger(v) @ g @ v for g in gens]
        mdim = len(commutant_basis(local, tol))
        m = int(round(np.sqrt(mdim)))
        if m * m != mdim or v.shape[1] % m:
            raise ArithmeticError(f"block commutant of dim {mdim} is not a full matrix algebra")
        blocks.append(Block(v, v.shape[1] // m, m, support))
    blocks.sort(key=lambda b: b.support[0] if b.support else 0)
    return BlockDecomposition(tuple(blocks), len(center), len(comm), seed)


def _real_rank(mats: Sequence[np.ndarray], tol: float) -> int:
    if not mats:
        return 0
    a = np.stack([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats], axis=1)
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol))


@dataclass(frozen=True)
class BlockReport:
    decomposition: BlockDecomposition
    generator_indices: tuple[int, ...]
    algebra_dim: int
    per_block: tuple[dict, ...]
    full_dim: int
    ambient_dim: int

    def to_json(self) -> dict:
        out = self.decomposition.to_json()
        out.update({"generators": [f"H{i}" for i in self.generator_indices],
                    "algebra_dim": self.algebra_dim, "per_block": list(self.per_block),
                    "full_closure_dim": self.full_dim, "ambient_dim": self.ambient_dim,
                    "full": self.full_dim == self.ambient_dim})
        return out


def block_local_dims(basis: LieBasis, block: Block, tol: float = 1e-9) -> tuple[int, int, int]:
    """``(local, restricted, derived)`` dimensions of a Lie algebra on a central block.

    ``local`` is ``dim(g intersect u(block))``, the elements supported on the
    block alone; ``restricted`` is the dimension of the compression ``g_k`` of
    ``g`` to the block; ``derived`` is ``dim [g_k, g_k]``, which equals
    ``dim su(h)`` when the block is fully controlled.
    """
    p = block.projection
    mats = list(basis.elements)
    outside = [x - p @ x @ p for x in mats]
    local = basis.dim - _real_rank(outside, tol)
    comp = [dagger(block.basis) @ x @ block.basis for x in mats]
    restricted = _real_rank(comp, tol)
    brackets = [a @ b - b @ a for i, a in enumerate(comp) for b in comp[:i]]
    derived = _real_rank(brackets, tol)
    return local, restricted, derived


def block_lie_closure(system: ControlSystem, algebra_generators: Sequence[int] = (0, 1), seed: int = 0,
                      rank_tol: float = 1e-9, max_passes: int = 50) -> BlockReport:
    """Per-block Lie analysis of a chosen subset of ``H_0, H_1, ..., H_N``.

    Index 0 is the drift.  The remaining generators are then added and the
    closure of the whole set is compared with ``u(n)``.
    """
    hams = [system.drift_matrix()] + list(system.controls)
    idx = tuple(algebra_generators)
    chosen = [hams[i] for i in idx]
    dec = block_decompose(chosen, seed=seed)
    g = lie_closure([1j * h for h in chosen], rank_tol, max_passes, [f"H{i}" for i in idx])
    per_block = []
    for k, b in enumerate(dec.blocks):
        local, restricted, derived = block_local_dims(g, b)
        per_block.append({"block": k, "support": list(b.support), "dim": b.rank,
                          "factor_dim": b.factor_dim, "multiplicity": b.multiplicity,
                          "closure_dim": restricted, "derived_dim": derived, "local_dim": local,
                          "su_dim": b.factor_dim ** 2 - 1, "u_dim": b.factor_dim ** 2})
    full = lie_closure([1j * h for h in hams], rank_tol, max_passes)
    n = system.dim
    return BlockReport(dec, idx, g.dim, tuple(per_block), full.dim, n * n)
