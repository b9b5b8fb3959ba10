"""Filtrations into strata, transition matrices and Perron-Frobenius eigenvalues."""

import networkx as nx
import numpy as np

from .errors import NoConvergence, NotIrreducible, NotNested
from .graphs import linear_suffix
from .words import CODE_DTYPE, Word

EG = "EG"
NEG = "NEG"
ZERO = "ZERO"

FIXED = "fixed"
LINEAR = "linear"
SUPERLINEAR = "superlinear-within-bounds"
PERMUTATION = "permutation"

CIRCLE = "circle"
BARBELL = "barbell"
HANDLE = "handle"
MULTI_EDGE = "multi-edge"


def transition_matrix(f, edges=None):
    """Entry (i, j) counts crossings of edge j (either direction) by [f(edge i)]."""
    if edges is None:
        edges = range(f.graph.num_edges)
    edges = list(edges)
    pos = {e: k for k, e in enumerate(edges)}
    M = np.zeros((len(edges), len(edges)), dtype=np.int64)
    for i, e in enumerate(edges):
        counts = np.bincount(f.edge_images[e].codes >> 1, minlength=f.graph.num_edges)
        for e2, k in pos.items():
            M[i, k] = counts[e2]
    return M


def edge_reachability(f):
    """Digraph on positive edges with an arc e -> e' iff [f(e)] crosses e'."""
    G = nx.DiGraph()
    G.add_nodes_from(range(f.graph.num_edges))
    for e, img in enumerate(f.edge_images):
        for e2 in sorted(set((img.codes >> 1).tolist())):
            G.add_edge(e, int(e2))
    return G


def is_irreducible(M):
    M = np.asarray(M)
    n = M.shape[0]
    if n == 0 or not np.any(M):
        return False
    G = nx.DiGraph()
    G.add_nodes_from(range(n))
    G.add_edges_from(zip(*np.nonzero(M)))
    return nx.is_strongly_connected(G) and (n > 1 or M[0, 0] > 0)


def is_permutation_matrix(M):
    """Exact test for lambda = 1 on irreducible nonnegative integer matrices."""
    M = np.asarray(M)
    return bool(np.all(M.sum(axis=1) == 1) and np.all(M.sum(axis=0) == 1))


def pf_eigenvalue(M, tol=1e-10, max_iters=10 ** 6):
    """Perron-Frobenius eigenvalue of an irreducible nonnegative matrix.

    Power iteration runs on M + I, which is primitive even when M is
    periodic, starting from the all-ones vector.  The iterate stays
    positive, so min and max of (Ax)_i / x_i bracket the eigenvalue; the loop
    stops once the bracket is narrower than ``tol``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if np.any(M < 0) or not is_irreducible(M):
        raise NotIrreducible("pf_eigenvalue needs an irreducible nonnegative matrix")
    A = M + np.eye(M.shape[0])
    x = np.ones(M.shape[0])
    for _ in range(max_iters):
        y = A @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo < tol:
            return (lo + hi) / 2 - 1.0
        x = y / np.max(y)
    raise NoConvergence(max_iters)


class Stratum:
    """One stratum of a filtration: its edges, kind and (for EG) eigenvalue."""

    def __init__(self, edges, kind, matrix, eigenvalue=None, subkind=None, detail=None):
        self.edges = tuple(edges)
        self.kind = kind
        self.matrix = matrix
        self.eigenvalue = eigenvalue
        self.subkind = subkind
        self.detail = detail

    def label(self):
        if self.kind == NEG and self.subkind:
            return f"NEG-{self.subkind}"
        return self.kind

    def __repr__(self):
        lam = f", lambda={self.eigenvalue:.6f}" if self.eigenvalue is not None else ""
        return f"Stratum({list(self.edges)}, {self.label()}{lam})"


def classify_stratum(f, edges, max_period=10):
    """EG / NEG / ZERO classification with NEG single-edge subkinds."""
    edges = sorted(edges)
    M = transition_matrix(f, edges)
    if not np.any(M):
        return Stratum(edges, ZERO, M)
    if not is_irreducible(M):
        raise NotIrreducible("stratum transition matrix is reducible")
    if not is_permutation_matrix(M):
        return Stratum(edges, EG, M, eigenvalue=pf_eigenvalue(M))
    if len(edges) > 1:
        return Stratum(edges, NEG, M, eigenvalue=1.0, subkind=PERMUTATION)
    e = edges[0]
    img = f.edge_images[e]
    if len(img) == 1 and int(img.codes[0]) == 2 * e:
        return Stratum(edges, NEG, M, eigenvalue=1.0, subkind=FIXED)
    if len(img) == 1:
        return Stratum(edges, NEG, M, eigenvalue=1.0, subkind=PERMUTATION)
    lin = linear_suffix(f, e, max_period=max_period)
    if lin is not None:
        return Stratum(edges, NEG, M, eigenvalue=1.0, subkind=LINEAR, detail=lin)
    return Stratum(edges, NEG, M, eigenvalue=1.0, subkind=SUPERLINEAR)


class Filtration:
    """Strata H_1, ..., H_k in order; ``subgraphs[r]`` is the union of the first r+1."""

    def __init__(self, f, strata):
        self.map = f
        self.strata = list(strata)
        acc = []
        self.subgraphs = []
        for s in self.strata:
            acc = sorted(acc + list(s.edges))
            self.subgraphs.append(tuple(acc))

    def is_invariant(self):
        for sub in self.subgraphs:
            allowed = set(sub)
            for e in sub:
                if not set((self.map.edge_images[e].codes >> 1).tolist()) <= allowed:
                    return False
        return True

    def extension_kinds(self):
        """Extension tag for each consecutive pair of filtration elements."""
        g = self.map.graph
        return [extension_kind(g, a, b) for a, b in zip(self.subgraphs, self.subgraphs[1:])]

    def __iter__(self):
        return iter(self.strata)

    def __len__(self):
        return len(self.strata)

    def __repr__(self):
        return f"Filtration({self.strata})"


def maximal_filtration(f, max_period=10):
    """Strata from strongly connected components of edge reachability, bottom up.

    Components are ordered so that the image of every edge lies in its own
    or an earlier stratum; ties break by smallest edge index.
    """
    R = edge_reachability(f)
    C = nx.condensation(R)
    members = C.graph["mapping"]
    comp_edges = {c: sorted(e for e, k in members.items() if k == c) for c in C.nodes}
    order = list(nx.lexicographical_topological_sort(C.reverse(copy=True),
                                                     key=lambda c: comp_edges[c][0]))
    strata = [classify_stratum(f, comp_edges[c], max_period) for c in order]
    return Filtration(f, strata)


def _components(graph, edges):
    """Connected components of the subgraph spanned by ``edges`` as (vertices, edges)."""
    G = nx.MultiGraph()
    for e in edges:
        G.add_edge(int(graph.origin[e]), int(graph.terminus[e]), key=e)
    out = []
    for comp in nx.connected_components(G):
        sub = G.subgraph(comp)
        out.append((set(comp), sorted(k for _, _, k in sub.edges(keys=True))))
    return out


def extension_kind(graph, sub0, sub1):
    """Tag the extension of subgraph ``sub0`` to ``sub1`` (edge index collections)."""
    s0, s1 = set(sub0), set(sub1)
    if not s0 <= s1 or s0 == s1:
        raise NotNested("first subgraph must be a proper subgraph of the second")
    added = s1 - s0
    if len(added) != 1:
        return MULTI_EDGE
    e = added.pop()
    o, t = int(graph.origin[e]), int(graph.terminus[e])
    # only components carrying a loop count: contractible pieces add no free factor
    comps = [vs for vs, es in _components(graph, s0) if len(es) >= len(vs)]

    def comp_of(v):
        for i, vs in enumerate(comps):
            if v in vs:
                return i
        return None

    co, ct = comp_of(o), comp_of(t)
    if o == t and co is None:
        return CIRCLE
    if co is not None and ct is not None:
        return HANDLE if co == ct else BARBELL
    return MULTI_EDGE


def free_factor_system(graph, edges):
    """Generator words of the free factors carried by the noncontractible components.

    Each factor is returned as a list of Words in F_N read through the
    marking, one per edge outside a spanning tree of the component.
    Equality of factor systems up to conjugacy is not decided here.
    """
    out = []
    for vs, es in _components(graph, edges):
        if len(es) < len(vs):
            continue
        base = min(vs)
        T = nx.Graph()
        T.add_nodes_from(vs)
        tree_edges = set()
        for e in es:
            o, t = int(graph.origin[e]), int(graph.terminus[e])
            if o != t and not nx.has_path(T, o, t):
                T.add_edge(o, t, key=e)
                tree_edges.add(e)
        paths = nx.single_source_shortest_path(T, base)

        def tree_codes(v, w):
            # edge codes along the component tree from v to w
            seq = []
            nodes = paths[w] if v == base else paths[v][::-1]
            for a, b in zip(nodes, nodes[1:]):
                for e in tree_edges:
                    if (int(graph.origin[e]), int(graph.terminus[e])) == (a, b):
                        seq.append(2 * e)
                        break
                    if (int(graph.origin[e]), int(graph.terminus[e])) == (b, a):
                        seq.append(2 * e + 1)
                        break
            return seq

        gens = []
        for e in es:
            if e in tree_edges:
                continue
            o, t = int(graph.origin[e]), int(graph.terminus[e])
            codes = tree_codes(base, o) + [2 * e] + tree_codes(t, base)
            path = Word._from_codes(np.array(codes, dtype=CODE_DTYPE), graph.num_edges)
            gens.append(graph.loop_word(path))
        out.append(gens)
    return out
