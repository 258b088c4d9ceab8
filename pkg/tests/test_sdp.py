import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conedist.completion import complete
from conedist.graph import Graph, maximal_cliques
from conedist.partial import project
from conedist.recognition import is_in_class_G
from conedist.sdp import (MAX_DIM, SdpError, SolverOptions, SparseSdp, bound_gap, decompose, format_sdp, maxcut_sdp,
                          parse_sdp, read_sdp, solve, solve_decomposed, solve_standard, sparsity_graph,
                          write_sdp)

from helpers import graphs, random_class_member

def unit(n, i, j):
    E = np.zeros((n, n))
    E[i, j] = E[j, i] = 1.0
    return E


def test_trivial_programs():
    s = SparseSdp(3, np.eye(3), [], trace_normalized=True)
    r = solve(s)
    assert r.status == "optimal" and r.value == pytest.approx(1.0, abs=1e-7)
    s = SparseSdp(2, unit(2, 0, 0), [], trace_normalized=True)
    r = solve(s)
    assert r.value == pytest.approx(0.0, abs=1e-7)
    assert np.min(np.linalg.eigvalsh(r.X)) >= -1e-8
    assert abs(np.trace(r.X) - 1) <= 1e-8


def test_standard_form_reports_max_iter():
    C = np.diag([1.0, 2.0])
    sol = solve_standard(C, np.array([np.eye(2)]), np.array([1.0]))
    assert sol.status == "optimal" and sol.value == pytest.approx(1.0, abs=1e-7)
    sol = solve_standard(C, np.array([np.eye(2)]), np.array([1.0]), SolverOptions(max_iter=1))
    assert sol.status == "max_iter"


def test_maxcut_examples(oracles):
    r = solve(maxcut_sdp(Graph.path(2)))
    assert r.value == pytest.approx(-1.0, abs=1e-7)
    assert np.allclose(r.X, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-6)
    # exhaustive over the single free entry x = X_01 in [-1/2, 1/2]: objective 2x
    grid = np.linspace(-0.5, 0.5, 10001)
    assert r.value == pytest.approx(np.min(2 * grid), abs=1e-7)
    r = solve(maxcut_sdp(Graph.complete(3)))
    assert r.value == pytest.approx(3 * np.cos(2 * np.pi / 3), abs=1e-6)
    r = solve(maxcut_sdp(Graph.empty(3)))
    assert r.value == pytest.approx(0.0, abs=1e-7)
    r = solve(maxcut_sdp(Graph.cycle(5)))
    assert r.value == pytest.approx(oracles["maxcut_circle"]["C5"], abs=1e-4)
    assert r.value == pytest.approx(-4.0450850, abs=1e-4)
    r = solve(maxcut_sdp(Graph.cycle(7)))
    assert r.value == pytest.approx(oracles["maxcut_circle"]["C7"], abs=1e-6)


def named_graphs(oracles):
    cs10 = Graph.from_edges(10, oracles["clique_sum_10_edges"])
    return {"P2": Graph.path(2), "K3": Graph.complete(3), "C5": Graph.cycle(5), "C7": Graph.cycle(7),
            "W5": Graph.wheel(5), "CS10": cs10}


@pytest.mark.parametrize("name", ["P2", "K3", "C5", "C7", "W5", "CS10"])
def test_maxcut_values_match_external_solver(name, oracles):
    g = named_graphs(oracles)[name]
    alpha, alpha_prime = oracles["maxcut_sdp"][name]
    s = maxcut_sdp(g)
    assert solve(s).value == pytest.approx(alpha, abs=1e-6)
    assert solve_decomposed(decompose(s)).value == pytest.approx(alpha_prime, abs=1e-6)


def test_maxcut_builder_convention():
    g = Graph.cycle(5)
    s = maxcut_sdp(g)
    assert np.trace(s.objective) == 0
    assert s.identity_feasible()
    X = np.eye(5) / 5 + 0.01 * unit(5, 0, 1)
    assert s.objective_at(X) == pytest.approx(5 * 0.01)


def test_sparsity_graph_examples():
    assert sparsity_graph(SparseSdp(4, np.diag([1.0, 2, 3, 4]), [(np.eye(4), 1.0)])).m == 0
    assert sparsity_graph(SparseSdp(4, np.ones((4, 4)))) == Graph.complete(4)
    for g in (Graph.cycle(5), Graph.wheel(4), Graph.complete_bipartite(2, 3)):
        assert sparsity_graph(maxcut_sdp(g)) == g


def test_decompose_examples():
    d = decompose(SparseSdp(4, np.ones((4, 4)), [], trace_normalized=True))
    assert d.graph == Graph.complete(4) and d.clique_blocks == [(0, 1, 2, 3)]
    d = decompose(maxcut_sdp(Graph.cycle(5)))
    assert len(d.clique_blocks) == 5 and all(len(c) == 2 for c in d.clique_blocks)
    assert d.clique_blocks == maximal_cliques(d.graph)
    with pytest.raises(SdpError):
        decompose(maxcut_sdp(Graph.cycle(5)), Graph.path(5))


def test_decomposed_equals_full_on_chordal_and_single_edge():
    for g in (Graph.path(2), Graph.complete(4), Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])):
        s = maxcut_sdp(g)
        assert solve_decomposed(decompose(s)).value == pytest.approx(solve(s).value, abs=2 * 1e-6)


def test_decomposed_relaxes_c5():
    s = maxcut_sdp(Graph.cycle(5))
    r = solve_decomposed(decompose(s))
    assert r.status == "optimal"
    assert r.value <= -4.0450850 + 1e-4
    assert r.value == pytest.approx(-5.0, abs=1e-6)


def test_bound_gap_examples():
    assert bound_gap(-3.0, 0.0, 7.0, 5) == (-3.0, -3.0)
    eps5 = (1 / np.cos(np.pi / 5) - 1) / 5
    lo, hi = bound_gap(-4.0, eps5, 0.0, 5)
    assert lo == -4.0 and hi == pytest.approx(-4.0 / 1.2360680, abs=1e-7)
    _, hi = bound_gap(-4.045, 0.0472136, 0.0, 5)
    assert hi == pytest.approx(-3.2725, abs=1e-4)
    with pytest.raises(SdpError):
        bound_gap(-1.0, -1e-3, 0.0, 5)


def test_bound_contains_c5_optimum():
    s = maxcut_sdp(Graph.cycle(5))
    alpha = solve(s).value
    alpha_prime = solve_decomposed(decompose(s)).value
    lo, hi = bound_gap(alpha_prime, is_in_class_G(Graph.cycle(5)).epsilon, np.trace(s.objective), 5)
    assert lo - 1e-6 <= alpha <= hi + 1e-6


@pytest.mark.parametrize("seed", range(12))
def test_bound_ordering_on_class_members(seed):
    rng = np.random.default_rng(seed)
    g = random_class_member(rng, pieces=int(rng.integers(2, 4)), max_piece=5)
    if g.n > 12 or g.m == 0:
        return
    cert = is_in_class_G(g)
    assert cert.member
    s = maxcut_sdp(g)
    alpha = solve(s).value
    alpha_prime = solve_decomposed(decompose(s)).value
    lo, hi = bound_gap(alpha_prime, cert.epsilon, np.trace(s.objective), g.n)
    slack = 1e-5 * (1 + abs(alpha))
    assert lo <= alpha + slack and alpha <= hi + slack


@given(st.integers(0, 10_000), st.integers(2, 6))
@settings(max_examples=40)
def test_diagonal_programs_have_analytic_optima(seed, n):
    rng = np.random.default_rng(seed)
    c = rng.uniform(-2, 2, n)
    t = float(rng.uniform(0.05, 0.95))
    # minimize sum c_i X_ii, tr X = 1, X_00 = t  ->  c_0 t + (1 - t) min_{i>0} c_i
    E = np.zeros((n, n))
    E[0, 0] = 1.0
    s = SparseSdp(n, np.diag(c), [(E, t)], trace_normalized=True)
    expected = c[0] * t + (1 - t) * np.min(c[1:])
    assert solve(s).value == pytest.approx(expected, abs=1e-6)
    assert solve_decomposed(decompose(s)).value == pytest.approx(expected, abs=1e-6)


@given(graphs(min_n=2, max_n=7), st.integers(0, 1000))
@settings(max_examples=25)
def test_decomposed_value_is_relabel_invariant(g, seed):
    perm = np.random.default_rng(seed).permutation(g.n).tolist()
    a = solve_decomposed(decompose(maxcut_sdp(g))).value
    b = solve_decomposed(decompose(maxcut_sdp(g.relabel(perm)))).value
    assert a == pytest.approx(b, abs=1e-6)


@given(graphs(min_n=2, max_n=7))
@settings(max_examples=25)
def test_relaxation_never_exceeds_full_value(g):
    s = maxcut_sdp(g)
    assert solve_decomposed(decompose(s)).value <= solve(s).value + 1e-6


@pytest.mark.parametrize("g", [Graph.cycle(5), Graph.wheel(5), Graph.complete_bipartite(2, 3),
                               Graph.cycle(4).cone().cone()])
def test_full_optimum_is_reached_over_completable_entries(g):
    # the optimum restricted to the graph entries is completable, and any completion is again optimal
    s = maxcut_sdp(g)
    full = solve(s)
    partial = project(full.X, g)
    M = complete(partial, tol=1e-6)
    assert s.objective_at(M) == pytest.approx(full.value, abs=1e-6)
    assert np.max(np.abs(s.residuals(M))) <= 1e-6
    assert np.min(np.linalg.eigvalsh(M)) >= -1e-6


def test_sdp_file_round_trip(tmp_path):
    s = maxcut_sdp(Graph.wheel(4))
    t = parse_sdp(format_sdp(s))
    assert t.equals(s)
    path = tmp_path / "w4.sdp"
    write_sdp(s, path)
    assert read_sdp(path).equals(s)
    text = "# two by two\n2 1\n0 0 1 1.5\n1 0 0 1  # x00 = 1\nrhs 1\n"
    s = parse_sdp(text)
    assert s.objective[1, 0] == 1.5 and s.constraints[0][1] == 1.0 and not s.trace_normalized


@pytest.mark.parametrize("text", [
    "", "2\n", "0 0\n", "2 1\n0 0 0 1\n", "2 1\n0 0 0 1\nrhs 1 2\n", "2 0\n0 1 0 1\n", "2 0\n0 0 2 1\n",
    "2 0\n1 0 0 1\n", "2 0\n0 0 0 1\n0 0 0 2\n", "2 0\ntrace 2\n", "2 0\ntrace 1\ntrace 1\n", "2 0\n0 0 x 1\n",
    "2 1\n1 0 0 1\nrhs 1\nrhs 1\n", "2 0\n0 0 1\n",
])
def test_malformed_sdp_files(text):
    with pytest.raises(SdpError):
        parse_sdp(text)


def test_size_limits_are_enforced():
    n = MAX_DIM + 1
    with pytest.raises(SdpError):
        solve(SparseSdp(n, np.zeros((n, n)), [], trace_normalized=True))
    with pytest.raises(SdpError):
        SparseSdp(3, np.zeros((2, 2)))
    with pytest.raises(SdpError):
        SparseSdp(2, np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_identity_feasibility_check():
    assert maxcut_sdp(Graph.cycle(4)).identity_feasible()
    E = np.zeros((3, 3))
    E[0, 0] = 1.0
    assert not SparseSdp(3, np.zeros((3, 3)), [(E, 0.5)], trace_normalized=True).identity_feasible()
