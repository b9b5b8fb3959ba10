import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fgadyn.automorphisms import Automorphism
from fgadyn.errors import (
    CapExceeded,
    EmptyPath,
    InducedClassMismatch,
    InvalidGraph,
    NonComposable,
    OnlyMarkedEdge,
)
from fgadyn.graphs import (
    GraphSelfMap,
    MarkedGraph,
    Turn,
    bcc_empirical,
    bcc_upper,
    closed_paths,
    default_seg_threshold,
    legal_goodness,
    linear_suffix,
    nielsen_search,
    relative_goodness,
    rose_map,
    tighten,
)
from fgadyn.words import CyclicWord
from autgen import random_automorphism
from oracles import naive_legal_goodness, naive_reduce, substitute


def theta_graph():
    # two vertices joined by three edges, tree = {a}
    return MarkedGraph(["u", "v"], [("u", "v")] * 3, tree=[0])


def test_tighten_matches_oracle():
    g = MarkedGraph(["v"], [("v", "v")] * 3, tree=())
    rng = random.Random(4)
    for _ in range(100):
        raw = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(40)]
        assert tighten(g, raw).letters == naive_reduce(raw)


def test_tighten_rejects_non_path():
    g = theta_graph()
    with pytest.raises(NonComposable):
        tighten(g, "ab")
    assert str(tighten(g, "aBbC")) == "aC"


def test_graph_validation():
    with pytest.raises(InvalidGraph):
        MarkedGraph(["u", "v"], [("u", "u")])
    with pytest.raises(InvalidGraph):
        MarkedGraph(["u", "v"], [("u", "v")])
    with pytest.raises(InvalidGraph):
        MarkedGraph(["v"], [("v", "v")] * 2, marking=["a", "a"])
    g = theta_graph()
    assert g.rank == 2 and g.non_tree_edges() == [1, 2]


def test_map_path_tribonacci(trib):
    f = rose_map(trib)
    assert str(f.map_path(f.graph.path("a"), 2)) == "abac"
    assert str(f.map_path(f.graph.path("a"), 3)) == "abacaba"
    with pytest.raises(CapExceeded):
        f.map_path(f.graph.path("a"), 30, length_cap=1000)


@given(st.integers(0, 2 ** 32))
def test_rose_map_path_matches_substitution(s):
    rng = random.Random(s)
    phi = random_automorphism(rng, 3, 4)
    f = rose_map(phi)
    raw = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(12)]
    path = f.graph.path(raw)
    assert f.map_path(path).letters == substitute([w.letters for w in phi.images], path.letters)


def test_derivative_and_gates(trib):
    f = rose_map(trib)
    df = f.derivative()
    assert df[0] == df[2] == df[4] == 0
    assert not f.is_legal(Turn(0, 2))
    assert f.is_legal(Turn(0, 1))
    gates = sorted(sorted(g) for g in f.gates().gates[0])
    assert gates == [[0, 2, 4], [1], [3], [5]]
    assert not f.is_legal(Turn(3, 3))


def test_theta_graph_induced_class():
    g = theta_graph()
    f = GraphSelfMap(g, ["a", "c", "b"])
    swap = Automorphism(["b", "a"], ["b", "a"])
    for x in ("a", "b", "ab", "aB"):
        h = CyclicWord(x, 2)
        assert f.induced_class.apply_class(h) == swap.apply_class(h)
    GraphSelfMap(g, ["a", "c", "b"], induced_class=swap)
    with pytest.raises(InducedClassMismatch):
        GraphSelfMap(g, ["a", "c", "b"], induced_class=Automorphism(["a", "b"], ["a", "b"]))


def test_self_map_validation():
    g = theta_graph()
    with pytest.raises(InvalidGraph):
        GraphSelfMap(g, ["a", "bBc", "b"])
    with pytest.raises(InvalidGraph):
        GraphSelfMap(g, ["A", "b", "c"])


def test_rose_marking_roundtrip(trib):
    f = rose_map(trib)
    f._check_induced()
    assert f.induced_class == trib


def test_closed_paths_count():
    g = MarkedGraph(["v"], [("v", "v")] * 2, tree=())
    # cyclic words of length <= 3 in F_2 modulo rotation and inversion
    from oracles import cyclic_classes

    assert len(list(closed_paths(g, 3))) == len(cyclic_classes(2, 3))


def test_nielsen_search_tribonacci_empty(trib):
    assert nielsen_search(rose_map(trib), 6, 10) == []


def test_nielsen_brute_force_tribonacci(trib):
    # no reduced word of length <= 4 is fixed by any power up to 10
    imgs = [w.letters for w in trib.images]
    letters = [1, -1, 2, -2, 3, -3]
    for n in range(1, 5):
        for w in itertools.product(letters, repeat=n):
            if naive_reduce(w) != w:
                continue
            cur = w
            for _ in range(10):
                cur = substitute(imgs, cur)
                if len(cur) > 200:
                    break
                assert cur != w


def test_nielsen_search_fix_a(fix_a):
    certs = nielsen_search(rose_map(fix_a), 3, 3)
    assert any(str(c.loop) == "a" and c.period == 1 for c in certs)
    for c in certs:
        f = rose_map(fix_a)
        assert f.map_path(c.based_path, c.period) == c.based_path


def test_linear_suffix(fix_a):
    f = rose_map(fix_a)
    rho, k = linear_suffix(f, 1)
    assert str(rho) == "a" and k == 1
    assert linear_suffix(f, 0) is None


def test_bcc_tribonacci(trib):
    f = rose_map(trib)
    assert bcc_upper(f) == 5
    assert bcc_empirical(f, 4) <= 5


def _brute_bcc(phi, L):
    imgs = [w.letters for w in phi.images]
    letters = [1, -1, 2, -2, 3, -3]
    words = [w for n in range(1, L + 1) for w in itertools.product(letters, repeat=n)
             if naive_reduce(w) == w]
    image = {w: substitute(imgs, w) for w in words}
    best = 0
    for g1 in words:
        for g2 in words:
            if g1[-1] == -g2[0]:
                continue
            joint = substitute(imgs, g1 + g2)
            best = max(best, (len(image[g1]) + len(image[g2]) - len(joint)) // 2)
    return best


def test_bcc_empirical_matches_brute_force(trib):
    assert bcc_empirical(rose_map(trib), 3) == _brute_bcc(trib, 3)
    rng = random.Random(11)
    for _ in range(3):
        phi = random_automorphism(rng, 3, 4)
        assert bcc_empirical(rose_map(phi), 2) == _brute_bcc(phi, 2)


def _rose_illegal(f):
    return lambda d1, d2: not f.is_legal(Turn(_code(d1), _code(d2)))


def _code(x):
    return 2 * (abs(x) - 1) + (x < 0)


def test_legal_goodness_hand_value(trib):
    f = rose_map(trib)
    path = f.map_path(f.graph.path("a"), 3)
    assert str(path) == "abacaba"
    assert legal_goodness(f, path, 2) == 1
    # turn (a, b) is illegal, so Ab splits into two single edges
    assert legal_goodness(f, f.graph.path("Ab"), 2) == 0
    assert legal_goodness(f, f.graph.path("Abac"), 2) == pytest.approx(3 / 4)
    with pytest.raises(EmptyPath):
        legal_goodness(f, f.graph.path(""), 2)


@given(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), min_size=1, max_size=30),
       st.integers(1, 6))
def test_legal_goodness_matches_oracle(raw, thr):
    from fgadyn.fixtures import tribonacci

    f = rose_map(tribonacci())
    w = naive_reduce(raw)
    if not w:
        return
    path = f.graph.path(list(w))
    assert legal_goodness(f, path, thr) == naive_legal_goodness(w, _rose_illegal(f), thr)


def test_relative_goodness_half(trib4):
    f = rose_map(trib4)
    path = f.graph.path("abdAbd")
    assert relative_goodness(f, path, 3, 2) == pytest.approx(0.5)
    with pytest.raises(OnlyMarkedEdge):
        relative_goodness(f, f.graph.path("dd"), 3, 2)


def test_default_threshold(trib):
    assert default_seg_threshold(rose_map(trib)) == 11
