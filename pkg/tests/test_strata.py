import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fgadyn.automorphisms import Automorphism
from fgadyn.errors import NotIrreducible, NotNested
from fgadyn.graphs import MarkedGraph, rose_map
from fgadyn.strata import (
    BARBELL,
    CIRCLE,
    EG,
    HANDLE,
    LINEAR,
    NEG,
    FIXED,
    MULTI_EDGE,
    edge_reachability,
    extension_kind,
    free_factor_system,
    is_irreducible,
    is_permutation_matrix,
    maximal_filtration,
    pf_eigenvalue,
    transition_matrix,
)
from oracles import char_poly_root_bisection, spectral_radius_numpy

TRIB_MATRIX = [[1, 1, 0], [1, 0, 1], [1, 0, 0]]


def random_irreducible(rng, max_size=5):
    while True:
        n = rng.randint(1, max_size)
        if rng.random() < 0.3:
            p = list(range(n))
            rng.shuffle(p)
            M = np.zeros((n, n), dtype=np.int64)
            M[range(n), p] = 1
        else:
            M = np.array([[rng.choice([0, 0, 1, 2]) for _ in range(n)] for _ in range(n)])
        if is_irreducible(M):
            return M


def test_pf_tribonacci():
    root = char_poly_root_bisection([1, -1, -1, -1], 1.0, 2.0)
    assert pf_eigenvalue(TRIB_MATRIX) == pytest.approx(root, abs=1e-6)
    assert pf_eigenvalue(TRIB_MATRIX) == pytest.approx(1.839287, abs=1e-6)


def test_pf_periodic_matrix():
    # period-2 irreducible matrix; plain power iteration would oscillate
    assert pf_eigenvalue([[0, 2], [2, 0]]) == pytest.approx(2.0)
    assert pf_eigenvalue([[0, 1], [1, 0]]) == pytest.approx(1.0)


def test_pf_rejects_reducible():
    with pytest.raises(NotIrreducible):
        pf_eigenvalue([[1, 1], [0, 1]])


def test_pf_matches_numpy_on_random_matrices():
    rng = random.Random(0)
    for _ in range(100):
        M = random_irreducible(rng)
        assert pf_eigenvalue(M) == pytest.approx(spectral_radius_numpy(M), abs=1e-6)


@given(st.integers(0, 2 ** 32))
def test_exact_unit_test_agrees_with_numeric(s):
    M = random_irreducible(random.Random(s))
    numeric_one = abs(spectral_radius_numpy(M) - 1.0) < 1e-6
    assert is_permutation_matrix(M) == numeric_one


def test_reachability_and_matrix(trib, fix_a):
    R = edge_reachability(rose_map(trib))
    assert all(len(list(R.successors(e))) >= 1 for e in range(3))
    lengths = dict(__import__("networkx").all_pairs_shortest_path_length(R))
    assert all(lengths[u][v] <= 2 for u in range(3) for v in range(3))
    assert transition_matrix(rose_map(trib)).tolist() == TRIB_MATRIX
    R2 = edge_reachability(rose_map(fix_a))
    assert sorted(R2.edges()) == [(0, 0), (1, 0), (1, 1)]


def test_filtrations(trib, trib4, fix_a):
    f = maximal_filtration(rose_map(trib))
    assert [s.label() for s in f] == [EG]
    assert f.strata[0].eigenvalue == pytest.approx(1.839287, abs=1e-6)
    f4 = maximal_filtration(rose_map(trib4))
    assert [(s.edges, s.label()) for s in f4] == [((0, 1, 2), EG), ((3,), "NEG-fixed")]
    assert f4.is_invariant()
    assert f4.extension_kinds() == [HANDLE]
    fa = maximal_filtration(rose_map(fix_a))
    assert [(s.edges, s.kind, s.subkind) for s in fa] == [((0,), NEG, FIXED), ((1,), NEG, LINEAR)]


def test_extension_kinds():
    # vertices u, v; loops a at u, b at v; arcs c, d from u to v
    g = MarkedGraph(["u", "v"], [("u", "u"), ("v", "v"), ("u", "v"), ("u", "v")], tree=[2])
    assert extension_kind(g, [], [0]) == CIRCLE
    assert extension_kind(g, [0], [0, 1]) == CIRCLE
    assert extension_kind(g, [0, 1], [0, 1, 2]) == BARBELL
    assert extension_kind(g, [0, 2], [0, 2, 3]) == HANDLE
    assert extension_kind(g, [0], [0, 1, 2]) == MULTI_EDGE
    with pytest.raises(NotNested):
        extension_kind(g, [0, 1], [0, 1])
    with pytest.raises(NotNested):
        extension_kind(g, [0, 1], [0])


def test_free_factor_system(trib4):
    g = rose_map(trib4).graph
    ffs = free_factor_system(g, [0, 1, 2])
    assert [[str(w) for w in fac] for fac in ffs] == [["a", "b", "c"]]


def test_zero_stratum_kind():
    # an edge in a tree that collapses has a zero transition row
    g = MarkedGraph(["u", "v"], [("u", "u"), ("u", "v")], tree=[1])
    from fgadyn.graphs import GraphSelfMap

    f = GraphSelfMap(g, ["a", "b"], vertex_map=[0, 1])
    assert [s.kind for s in maximal_filtration(f)] == [NEG, NEG]
    h = GraphSelfMap(g, ["a", ""], vertex_map=[0, 0],
                     induced_class=Automorphism(["a"], ["a"]))
    kinds = sorted(s.kind for s in maximal_filtration(h))
    assert kinds == ["NEG", "ZERO"]
