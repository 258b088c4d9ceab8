import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conedist.completion import extremal_cycle_matrix
from conedist.graph import Graph, maximal_cliques
from conedist.partial import (PartialMatrix, PartialMatrixError, ZeroApex, block, conjugate,
                              format_partial_matrix, identity, is_partially_positive, normal_form_cycle,
                              parse_partial_matrix, project, read_partial_matrix, restrict,
                              schur_complement_cone, write_partial_matrix, zeros)
from conedist.sampling import sample_partially_positive

from helpers import graphs


def cycle_matrix(diag, edges):
    n = len(diag)
    return PartialMatrix(Graph.cycle(n), np.array(diag, float),
                         {(min(i, (i + 1) % n), max(i, (i + 1) % n)): x for i, x in enumerate(edges)})


def test_partial_matrix_validation():
    g = Graph.path(3)
    with pytest.raises(PartialMatrixError):
        PartialMatrix(g, np.ones(2), {(0, 1): 0.0, (1, 2): 0.0})
    with pytest.raises(PartialMatrixError):
        PartialMatrix(g, np.ones(3), {(0, 1): 0.0})
    with pytest.raises(PartialMatrixError):
        PartialMatrix(g, np.ones(3), {(0, 1): np.nan, (1, 2): 0.0})
    a = PartialMatrix(g, np.ones(3), {(1, 0): 0.5, (1, 2): 0.0})
    assert a.entry(0, 1) == 0.5 and a.entry(1, 0) == 0.5
    with pytest.raises(KeyError):
        a.entry(0, 2)


def test_project_examples():
    a = project(np.ones((4, 4)), Graph.cycle(4))
    assert np.all(a.diag == 1) and all(x == 1 for x in a.off.values())
    a = project(np.eye(5), Graph.wheel(4))
    assert np.all(a.diag == 1) and all(x == 0 for x in a.off.values())
    ang = np.array([0, np.pi / 2, np.pi, 3 * np.pi / 2])
    vecs = np.column_stack([np.cos(ang), np.sin(ang)])
    a = project(vecs @ vecs.T, Graph.cycle(4))
    assert np.allclose(a.diag, 1) and np.allclose(list(a.off.values()), 0, atol=1e-15)
    with pytest.raises(PartialMatrixError):
        project(np.eye(3), Graph.cycle(4))


def test_restrict_examples():
    a = project(np.arange(16.0).reshape(4, 4) + np.arange(16.0).reshape(4, 4).T, Graph.cycle(4))
    one = restrict(a, [2])
    assert one.n == 1 and one.diag[0] == a.diag[2]
    edge = restrict(a, [0, 1])
    assert np.array_equal(edge.to_dense(), block(a, [0, 1]))
    w = project(np.eye(6) + 0.1, Graph.wheel(5))
    tri = restrict(w, [0, 1, 5])
    assert tri.graph == Graph.complete(3)
    with pytest.raises(PartialMatrixError):
        restrict(a, [0, 1], Graph.complete(3))


@given(graphs(max_n=8), st.integers(0, 1000))
@settings(max_examples=40)
def test_project_then_restrict_commutes(g, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((g.n, g.n))
    m = m + m.T
    vs = [v for v in range(g.n) if rng.random() < 0.6] or [0]
    sub = restrict(project(m, g), vs)
    direct = project(m[np.ix_(vs, vs)], sub.graph)
    assert sub.allclose(direct, atol=0)


def test_partial_positivity_examples():
    assert is_partially_positive(extremal_cycle_matrix(6))
    bad = cycle_matrix([1, 1, 1, 1], [2, 0, 0, 0])
    rep = is_partially_positive(bad)
    assert not rep and rep.clique == (0, 1) and rep.min_eigenvalue == pytest.approx(-1.0)
    rng = np.random.default_rng(0)
    x = rng.standard_normal((6, 3))
    assert is_partially_positive(project(x @ x.T, Graph.wheel(5)))
    with pytest.raises(PartialMatrixError):
        is_partially_positive(bad, tol=-1)


def test_first_violating_clique_is_lexicographic():
    a = cycle_matrix([1, 1, 1, 1], [0, 2, 3, 0])
    assert is_partially_positive(a).clique == (1, 2)


def test_normal_form_all_negative_c4(oracles):
    d, b = normal_form_cycle(cycle_matrix([1, 1, 1, 1], [-0.5, -0.5, -0.5, -0.5]))
    assert sum(x < 0 for x in b.off.values()) == oracles["c4_all_negative_min_negatives"]
    assert d[0] == 1


def test_normal_form_examples():
    ext = extremal_cycle_matrix(5)
    d, b = normal_form_cycle(ext)
    assert np.all(d == 1) and b.allclose(ext)
    pos = cycle_matrix([1, 2, 3], [0.1, 0.2, 0.3])
    d, b = normal_form_cycle(pos)
    assert np.all(d == 1) and b.allclose(pos)
    with pytest.raises(PartialMatrixError):
        normal_form_cycle(project(np.eye(4), Graph.path(4)))


@given(st.integers(3, 9), st.integers(0, 10_000))
@settings(max_examples=60)
def test_normal_form_minimizes_negatives(n, seed):
    rng = np.random.default_rng(seed)
    a = cycle_matrix(rng.uniform(0.5, 1.5, n), rng.uniform(-0.4, 0.4, n))
    d, b = normal_form_cycle(a)
    negs = [e for e, x in b.off.items() if x < 0]
    product = np.prod([1 if x >= 0 else -1 for x in a.off.values()])
    assert len(negs) == (0 if product > 0 else 1)
    if negs:
        assert negs == [(0, 1)]
    assert b.allclose(conjugate(a, d))
    # D is orthogonal, so clique eigenvalues are unchanged
    for c in maximal_cliques(a.graph):
        assert np.allclose(np.linalg.eigvalsh(block(a, c)), np.linalg.eigvalsh(block(b, c)))


def test_schur_examples(oracles):
    g = Graph.cycle(4).cone()
    q = np.random.default_rng(2).standard_normal((4, 4))
    m = np.zeros((5, 5))
    m[:4, :4] = q + q.T
    m[4, 4] = 1.0
    s = schur_complement_cone(project(m, g), 4)
    assert s.allclose(project(m[:4, :4], Graph.cycle(4)))
    v = np.array([1.0, -2.0, 0.5, 3.0, 2.0])
    s = schur_complement_cone(project(np.outer(v, v), g), 4)
    assert s.allclose(zeros(Graph.cycle(4)), atol=1e-14)
    w4 = project(0.5 * np.eye(5) + 0.5 * np.ones((5, 5)), g)
    s = schur_complement_cone(w4, 4)
    assert np.allclose(s.diag, oracles["schur_w4"]["diag"])
    assert np.allclose(list(s.off.values()), oracles["schur_w4"]["edge"])


def test_schur_errors():
    g = Graph.complete(3)
    with pytest.raises(PartialMatrixError):
        schur_complement_cone(PartialMatrix(g, np.array([1.0, 1.0, -1.0]), {e: 0.0 for e in g.edges}), 2)
    with pytest.raises(PartialMatrixError):
        schur_complement_cone(PartialMatrix(g, np.array([1.0, 1.0, 0.0]), {(0, 1): 0, (0, 2): 0.1, (1, 2): 0}), 2)
    with pytest.raises(ZeroApex):
        schur_complement_cone(PartialMatrix(g, np.array([1.0, 1.0, 0.0]), {e: 0.0 for e in g.edges}), 2)
    with pytest.raises(PartialMatrixError):
        schur_complement_cone(identity(Graph.path(3)), 0)


@given(graphs(min_n=1, max_n=7), st.integers(0, 10_000))
@settings(max_examples=200)
def test_schur_complement_keeps_partial_positivity(base, seed):
    cone = base.cone()
    a = sample_partially_positive(cone, np.random.default_rng(seed))
    if a.diag[base.n] <= 1e-12:
        return
    s = schur_complement_cone(a, base.n)
    assert is_partially_positive(s, tol=1e-9)
    # the key identity: restricting to a clique through the apex commutes with elimination
    for c in maximal_cliques(cone):
        k = list(c)
        full = block(a, k)
        pos = k.index(base.n)
        rest = [i for i in range(len(k)) if i != pos]
        direct = full[np.ix_(rest, rest)] - np.outer(full[rest, pos], full[rest, pos]) / full[pos, pos]
        assert np.allclose(direct, block(s, [k[i] for i in rest]), atol=1e-12)


def test_text_format_round_trip(tmp_path):
    a = extremal_cycle_matrix(5)
    b = parse_partial_matrix(format_partial_matrix(a))
    assert b.allclose(a, atol=0)
    path = tmp_path / "m.txt"
    write_partial_matrix(a, path)
    assert read_partial_matrix(path, Graph.cycle(5)).allclose(a, atol=0)


@pytest.mark.parametrize("text", [
    "", "2 2\n", "2\n0 0 1\n", "2\n0 0 1\n1 1 1\n0 0 2\n", "2\n0 0 1\n1 1 1\n1 0 0.5\n",
    "2\n0 0 1\n1 1 1\n0 1 x\n", "2\n0 0 1\n1 1 1\n0 1 1\n0 1 1\n", "2\n0 0 1\n1 1 1\n0 3 1\n",
])
def test_malformed_matrix_files(text):
    with pytest.raises(PartialMatrixError):
        parse_partial_matrix(text)


def test_matrix_file_must_match_graph():
    text = format_partial_matrix(extremal_cycle_matrix(4))
    with pytest.raises(PartialMatrixError):
        parse_partial_matrix(text, Graph.complete(4))
    with pytest.raises(PartialMatrixError):
        parse_partial_matrix(text, Graph.cycle(5))


def test_arithmetic_helpers():
    a = extremal_cycle_matrix(4)
    assert a.shifted(1.0).trace == pytest.approx(5.0)
    assert (a + a).allclose(a.scaled(2.0))
    perm = [1, 2, 3, 0]
    r = a.relabel(perm)
    for (u, v), x in a.off.items():
        assert r.entry(perm[u], perm[v]) == x
    assert np.array_equal(a.mask(), a.to_dense(np.nan) == a.to_dense(np.nan))
    for i, j in itertools.product(range(4), repeat=2):
        assert a.mask()[i, j] == (i == j or a.graph.has_edge(i, j))
