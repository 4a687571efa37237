import numpy as np
import pytest
from hypothesis import given, strategies as st

from larckit.graph import (UnionFind, bfs_path, build_graph, default_edge_tol, graph_from_edges,
                           is_connected)
from larckit.linop import ControlSystem, random_unitary
from larckit.models import tridiagonal_coupling
from larckit.spectral import spectrum_from_eigenvalues, spectrum_from_matrix
from oracles import bfs_components


def _diag_system(n, controls):
    return ControlSystem(spectrum_from_eigenvalues(np.arange(1.0, n + 1)), tuple(controls))


def test_tridiagonal_gives_path_graph():
    g = build_graph(_diag_system(5, [tridiagonal_coupling(5)]))
    assert g.pairs() == {(0, 1), (1, 2), (2, 3), (3, 4)}
    connected, comps = is_connected(g)
    assert connected and comps == [[0, 1, 2, 3, 4]]


def test_diagonal_controls_give_no_edges():
    g = build_graph(_diag_system(3, [np.diag([1.0, 2.0, 3.0]), np.diag([0.0, 1.0, 0.0])]))
    assert g.edges == ()
    assert is_connected(g) == (False, [[0], [1], [2]])


def test_two_controls_union_of_edges():
    h1 = np.zeros((4, 4))
    h1[0, 1] = h1[1, 0] = 1.0
    h2 = np.zeros((4, 4), dtype=complex)
    h2[2, 3], h2[3, 2] = 0.5j, -0.5j
    g = build_graph(_diag_system(4, [h1, h2]))
    assert g.pairs() == {(0, 1), (2, 3)}
    wit = {(e.v, e.w): (e.control, e.alpha) for e in g.edges}
    assert wit[(0, 1)] == (1, 1.0)
    assert wit[(2, 3)] == (2, 0.5j)
    assert is_connected(g)[1] == [[0, 1], [2, 3]]


def test_two_disjoint_triangles():
    g = graph_from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    connected, comps = is_connected(g)
    assert not connected
    assert comps == bfs_components(6, [(e.v, e.w) for e in g.edges]) == [[0, 1, 2], [3, 4, 5]]


@given(st.integers(1, 64), st.data())
def test_connectivity_matches_bfs_oracle(n, data):
    pairs = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    g = graph_from_edges(n, pairs)
    connected, comps = is_connected(g)
    oracle = bfs_components(n, [(a, b) for a, b in pairs if a != b])
    assert comps == oracle
    assert connected == (len(oracle) == 1)


@given(st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_graph_is_symmetric_and_witnesses_hold(seed, n):
    rng = np.random.default_rng(seed)
    h = np.where(rng.random((n, n)) < 0.3, rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), 0)
    h = h + h.conj().T
    sys_a = _diag_system(n, [h])
    sys_b = _diag_system(n, [h.conj()])  # transposed (conjugated) couplings
    ga, gb = build_graph(sys_a), build_graph(sys_b)
    assert ga.pairs() == gb.pairs()
    assert all(e.v < e.w for e in ga.edges)
    vecs = sys_a.drift.vectors
    for e in ga.edges:
        alpha = np.vdot(vecs[:, e.v], sys_a.controls[e.control - 1] @ vecs[:, e.w])
        assert abs(alpha) > ga.edge_tol
        assert alpha == pytest.approx(e.alpha)


def test_graph_uses_drift_eigenbasis(rng):
    u = random_unitary(4, rng)
    h0 = (u * np.array([1.0, 2.0, 3.5, 5.0])) @ u.conj().T
    h1 = u @ tridiagonal_coupling(4) @ u.conj().T
    g = build_graph(ControlSystem(spectrum_from_matrix(h0), (h1,)))
    assert g.pairs() == {(0, 1), (1, 2), (2, 3)}


def test_degenerate_drift_uses_block_edges():
    drift = spectrum_from_eigenvalues([1.0, 1.0, 2.0])
    h = np.zeros((3, 3))
    h[1, 2] = h[2, 1] = 1.0
    g = build_graph(ControlSystem(drift, (h,)))
    assert g.degenerate and g.n_vertices == 2
    assert g.pairs() == {(0, 1)}


def test_edge_tol_and_near_threshold():
    h = tridiagonal_coupling(3) * 1e-11
    sys_ = _diag_system(3, [h])
    assert default_edge_tol(sys_.controls) == pytest.approx(1e-12 * np.sqrt(2) * 1e-11)
    g = build_graph(sys_, edge_tol=1e-12)
    assert len(g.edges) == 2 and len(g.near_threshold) == 2
    assert build_graph(sys_, edge_tol=1e-10).edges == ()


def test_edge_list_export():
    h = np.zeros((3, 3), dtype=complex)
    h[0, 2], h[2, 0] = 1 + 2j, 1 - 2j
    g = build_graph(_diag_system(3, [h]))
    assert g.to_edge_list() == "0 2 1 1 2\n"


def test_bfs_path_and_union_find():
    g = graph_from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    assert bfs_path(g, 0, 4) == [0, 1, 2, 3, 4]
    assert bfs_path(g, 3, 3) == [3]
    assert bfs_path(graph_from_edges(3, [(0, 1)]), 0, 2) is None
    uf = UnionFind(3)
    assert uf.union(0, 2) and not uf.union(2, 0)
    assert uf.find(0) == uf.find(2) != uf.find(1)
    with pytest.raises(IndexError):
        graph_from_edges(2, [(0, 5)])
