"""Marked graphs, self graph maps, turns, gates and Nielsen paths.

Oriented edges use the same code scheme as letters: positive edge ``e``
(0-based) has code ``2e`` and its reverse ``2e + 1``.  An edge path is a
:class:`~fgadyn.words.Word` whose rank is the number of edges, so edge
literals are the letters ``a, b, c, ...`` in edge order and tightening a
path is free reduction.
"""

from fractions import Fraction

import numpy as np

from .automorphisms import Automorphism, _ImageTable, identity, nielsen_inverse
from .errors import (
    CapExceeded,
    EmptyPath,
    InducedClassMismatch,
    InvalidGraph,
    NonComposable,
    OnlyMarkedEdge,
)
from .words import (
    CODE_DTYPE,
    CyclicWord,
    Word,
    cyclic_reduce_codes,
    format_codes,
    free_reduce_codes,
    inverse_codes,
    letter_to_code,
    parse_letters,
)

DEFAULT_LENGTH_CAP = 10 ** 6
DEFAULT_PATH_BUDGET = 10 ** 6


class MarkedGraph:
    """A connected graph with a spanning tree and a marking into F_N.

    ``marking[e]`` is the element of F_N read along tree path, edge e, tree
    path.  It must be trivial on tree edges and the non-tree edges must give
    a basis.  When omitted the non-tree edges are sent to x1, x2, ... in order.
    """

    def __init__(self, vertices, edges, tree=None, marking=None, rank=None):
        self.vertices = list(vertices)
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        if len(self._vindex) != len(self.vertices):
            raise InvalidGraph("duplicate vertex names")
        ends = []
        for o, t in edges:
            if o not in self._vindex or t not in self._vindex:
                raise InvalidGraph(f"edge endpoint not a vertex: {o!r}, {t!r}")
            ends.append((self._vindex[o], self._vindex[t]))
        self.origin = np.array([o for o, _ in ends], dtype=np.int64)
        self.terminus = np.array([t for _, t in ends], dtype=np.int64)
        self.num_edges = len(ends)
        if self.num_edges == 0:
            raise InvalidGraph("graph has no edges")
        betti = self.num_edges - len(self.vertices) + 1
        if rank is not None and betti != rank:
            raise InvalidGraph(f"first Betti number {betti} differs from rank {rank}")
        if betti < 1:
            raise InvalidGraph("graph is a tree")
        self.rank = betti
        if not self._connected():
            raise InvalidGraph("graph is not connected")
        self.tree = frozenset(self._spanning_tree() if tree is None else tree)
        self._check_tree()
        if marking is None:
            marking = []
            k = 0
            for e in range(self.num_edges):
                if e in self.tree:
                    marking.append(Word.identity(self.rank))
                else:
                    k += 1
                    marking.append(Word.generator(k, self.rank))
        self.marking = tuple(
            w if isinstance(w, Word) else Word(w, self.rank) for w in marking
        )
        self._check_marking()

    # -- construction checks ------------------------------------------------

    def _connected(self):
        seen = {0}
        stack = [0]
        adj = self._adjacency()
        while stack:
            v = stack.pop()
            for w, _ in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def _adjacency(self):
        adj = [[] for _ in self.vertices]
        for e in range(self.num_edges):
            o, t = int(self.origin[e]), int(self.terminus[e])
            adj[o].append((t, e))
            adj[t].append((o, e))
        return adj

    def _spanning_tree(self):
        adj = self._adjacency()
        seen = {0}
        tree = set()
        queue = [0]
        for v in queue:
            for w, e in adj[v]:
                if w not in seen:
                    seen.add(w)
                    tree.add(e)
                    queue.append(w)
        return tree

    def _check_tree(self):
        if len(self.tree) != len(self.vertices) - 1:
            raise InvalidGraph("tree has the wrong number of edges")
        parent = list(range(len(self.vertices)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.tree:
            if not 0 <= e < self.num_edges:
                raise InvalidGraph(f"tree edge {e} out of range")
            a, b = find(int(self.origin[e])), find(int(self.terminus[e]))
            if a == b:
                raise InvalidGraph("tree contains a cycle")
            parent[a] = b

    def _check_marking(self):
        if len(self.marking) != self.num_edges:
            raise InvalidGraph("marking needs one word per edge")
        for e in self.tree:
            if len(self.marking[e]):
                raise InvalidGraph(f"tree edge {self.edge_name(e)} has nontrivial marking")
        basis = [self.marking[e] for e in self.non_tree_edges()]
        inv = nielsen_inverse(basis, self.rank, max_total_length=10 ** 6)
        if inv is None:
            raise InvalidGraph("marking words of non-tree edges are not a basis")
        self._marking_inverse = tuple(inv)

    # -- basic queries --------------------------------------------------------

    def non_tree_edges(self):
        return [e for e in range(self.num_edges) if e not in self.tree]

    def edge_name(self, e):
        return format_codes([2 * e], self.num_edges)

    def code_origin(self, code):
        e = code >> 1
        return int(self.terminus[e] if code & 1 else self.origin[e])

    def code_terminus(self, code):
        return self.code_origin(code ^ 1)

    def directions(self, vertex=None):
        """Oriented edge codes, optionally only those starting at ``vertex``."""
        codes = range(2 * self.num_edges)
        if vertex is None:
            return list(codes)
        return [c for c in codes if self.code_origin(c) == vertex]

    def path(self, letters):
        """Edge path from a literal or signed-letter sequence, tightened."""
        return tighten(self, letters)

    def is_composable(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        if codes.size < 2:
            return True
        e = codes >> 1
        rev = (codes & 1).astype(bool)
        starts = np.where(rev, self.terminus[e], self.origin[e])
        ends = np.where(rev, self.origin[e], self.terminus[e])
        return bool(np.all(ends[:-1] == starts[1:]))

    def is_closed(self, path):
        if len(path) == 0:
            return True
        return self.code_terminus(int(path.codes[-1])) == self.code_origin(int(path.codes[0]))

    def tree_path(self, v, w):
        """Path inside the tree from vertex v to vertex w."""
        adj = [[] for _ in self.vertices]
        for e in self.tree:
            o, t = int(self.origin[e]), int(self.terminus[e])
            adj[o].append((t, 2 * e))
            adj[t].append((o, 2 * e + 1))
        back = {v: None}
        queue = [v]
        for x in queue:
            for y, code in adj[x]:
                if y not in back:
                    back[y] = (x, code)
                    queue.append(y)
        codes = []
        x = w
        while back[x] is not None:
            x, code = back[x]
            codes.append(code)
        return codes[::-1]

    def loop_word(self, path):
        """Element of F_N read along a path through the marking."""
        out = Word.identity(self.rank)
        for c in path.codes.tolist():
            m = self.marking[c >> 1]
            out = out * (m.inverse() if c & 1 else m)
        return out

    def generator_loop(self, i, base=0):
        """Closed tight path at ``base`` representing generator x_i."""
        expr = self._marking_inverse[i - 1]
        nontree = self.non_tree_edges()
        codes = []
        for x in expr.letters:
            e = nontree[abs(x) - 1]
            o, t = int(self.origin[e]), int(self.terminus[e])
            if x > 0:
                codes += self.tree_path(base, o) + [2 * e] + self.tree_path(t, base)
            else:
                codes += self.tree_path(base, t) + [2 * e + 1] + self.tree_path(o, base)
        return Word._from_codes(free_reduce_codes(np.array(codes, dtype=CODE_DTYPE)), self.num_edges)

    def __repr__(self):
        return f"MarkedGraph(vertices={len(self.vertices)}, edges={self.num_edges}, rank={self.rank})"


def _raw_codes(num_edges, letters):
    if isinstance(letters, Word):
        return letters.codes
    if isinstance(letters, str):
        letters = parse_letters(letters, num_edges)
    return np.array([letter_to_code(int(x), num_edges) for x in letters], dtype=CODE_DTYPE)


def tighten(graph, path):
    """Freely reduce an edge path after checking that consecutive edges meet."""
    codes = _raw_codes(graph.num_edges, path)
    if not graph.is_composable(codes):
        raise NonComposable(f"edges of {format_codes(codes, graph.num_edges)} do not compose")
    return Word._from_codes(free_reduce_codes(codes), graph.num_edges)


class Turn:
    """Unordered pair of directions (oriented edge codes) at one vertex."""

    __slots__ = ("first", "second")

    def __init__(self, d1, d2):
        self.first, self.second = sorted((int(d1), int(d2)))

    def is_degenerate(self):
        return self.first == self.second

    def __eq__(self, other):
        return isinstance(other, Turn) and (self.first, self.second) == (other.first, other.second)

    def __hash__(self):
        return hash((self.first, self.second))

    def __repr__(self):
        return f"Turn({self.first}, {self.second})"


class GateStructure:
    """Partition of directions at each vertex into gates."""

    def __init__(self, graph, stable_image):
        self.graph = graph
        self.gate_of = {}
        self.gates = {}
        for v in range(len(graph.vertices)):
            groups = {}
            for d in graph.directions(v):
                groups.setdefault(stable_image[d], []).append(d)
            self.gates[v] = [frozenset(g) for g in sorted(groups.values())]
            for g in self.gates[v]:
                for d in g:
                    self.gate_of[d] = g

    def same_gate(self, d1, d2):
        return self.gate_of[d1] is self.gate_of[d2]

    def illegal_turns(self):
        out = set()
        for gates in self.gates.values():
            for g in gates:
                ds = sorted(g)
                for i, a in enumerate(ds):
                    for b in ds[i:]:
                        out.add(Turn(a, b))
        return out


class NielsenCertificate:
    """A closed path (as an edge cyclic word) with a based rotation fixed by f^period."""

    __slots__ = ("loop", "period", "based_path")

    def __init__(self, loop, period, based_path):
        self.loop = loop
        self.period = period
        self.based_path = based_path

    def __len__(self):
        return len(self.loop)

    def __repr__(self):
        return f"NielsenCertificate({self.loop}, period={self.period})"


class GraphSelfMap:
    """A self map of a marked graph sending edges to tight edge paths.

    ``induced_class`` is the automorphism the map is claimed to represent;
    the induced action on generator classes is checked through the marking.
    """

    def __init__(self, graph, edge_images, vertex_map=None, induced_class=None, label="",
                 verify=True):
        self.graph = graph
        self.label = label
        E = graph.num_edges
        if len(edge_images) != E:
            raise InvalidGraph(f"{len(edge_images)} edge images for {E} edges")
        images = []
        for e, img in enumerate(edge_images):
            raw = _raw_codes(E, img)
            red = free_reduce_codes(raw)
            if red.size != raw.size:
                raise InvalidGraph(f"image of edge {graph.edge_name(e)} is not tight")
            if not graph.is_composable(raw):
                raise InvalidGraph(f"image of edge {graph.edge_name(e)} is not an edge path")
            images.append(Word._from_codes(red, E))
        self.edge_images = tuple(images)
        if vertex_map is None:
            vertex_map = self._infer_vertex_map()
        self.vertex_map = tuple(v if isinstance(v, int) else graph._vindex[v] for v in vertex_map)
        self._check_endpoints()
        self._table = _ImageTable(self.edge_images)
        self.induced_class = induced_class
        if induced_class is None:
            self.induced_class = self._compute_induced()
        elif verify:
            self._check_induced()
        self._gates = None
        self._derivative = None

    def _infer_vertex_map(self):
        vm = [None] * len(self.graph.vertices)
        g = self.graph
        for e, img in enumerate(self.edge_images):
            if len(img) == 0:
                continue
            for v, w in ((int(g.origin[e]), g.code_origin(int(img.codes[0]))),
                         (int(g.terminus[e]), g.code_terminus(int(img.codes[-1])))):
                if vm[v] is None:
                    vm[v] = w
                elif vm[v] != w:
                    raise InvalidGraph("edge images disagree on a vertex image")
        if any(v is None for v in vm):
            raise InvalidGraph("vertex_map cannot be inferred from edge images")
        return vm

    def _check_endpoints(self):
        g = self.graph
        if len(self.vertex_map) != len(g.vertices):
            raise InvalidGraph("vertex_map needs one entry per vertex")
        for e, img in enumerate(self.edge_images):
            fo = self.vertex_map[int(g.origin[e])]
            ft = self.vertex_map[int(g.terminus[e])]
            if len(img) == 0:
                if fo != ft:
                    raise InvalidGraph(f"edge {g.edge_name(e)} collapses between distinct vertices")
                continue
            if g.code_origin(int(img.codes[0])) != fo or g.code_terminus(int(img.codes[-1])) != ft:
                raise InvalidGraph(f"image of edge {g.edge_name(e)} has wrong endpoints")

    def _generator_image_classes(self):
        N = self.graph.rank
        out = []
        for i in range(1, N + 1):
            loop = self.graph.generator_loop(i)
            img = self.map_path(loop, 1, length_cap=None)
            out.append(self.graph.loop_word(img))
        return out

    def _compute_induced(self):
        # one representative of the induced outer class, read through the marking
        g = self.graph
        base = 0
        fb = self.vertex_map[base]
        back = tighten(g, g.tree_path(fb, base)) if fb != base else Word.identity(g.num_edges)
        images = []
        for i in range(1, g.rank + 1):
            loop = g.generator_loop(i, base)
            img = back.inverse() * self.map_path(loop, 1) * back
            images.append(g.loop_word(img))
        return Automorphism(images, rank=g.rank, label=self.label)

    def _check_induced(self):
        if self.induced_class.rank != self.graph.rank:
            raise InducedClassMismatch("induced class has the wrong rank")
        for i, w in enumerate(self._generator_image_classes(), start=1):
            x = CyclicWord(Word.generator(i, self.graph.rank))
            expected = self.induced_class.apply_class(x)
            if not len(w) or CyclicWord(w) != expected:
                raise InducedClassMismatch(
                    f"map sends class of x{i} to {w}, automorphism gives {expected}"
                )

    # -- paths ------------------------------------------------------------

    def map_path(self, path, k=1, length_cap=DEFAULT_LENGTH_CAP):
        """[f^k(path)]: k rounds of substitution and tightening."""
        codes = path.codes
        for _ in range(k):
            if length_cap is not None and self._table.image_length(codes) > 4 * length_cap:
                raise CapExceeded(length_cap)
            codes = free_reduce_codes(self._table.substitute(codes))
            if length_cap is not None and codes.size > length_cap:
                raise CapExceeded(length_cap)
        return Word._from_codes(codes, self.graph.num_edges)

    def map_loop(self, loop, k=1, length_cap=DEFAULT_LENGTH_CAP):
        """Tightened image of a closed path read as a circuit."""
        codes = loop.rep_codes
        for _ in range(k):
            codes = cyclic_reduce_codes(free_reduce_codes(self._table.substitute(codes)))
            if length_cap is not None and codes.size > length_cap:
                raise CapExceeded(length_cap)
        return CyclicWord._from_codes(codes, self.graph.num_edges)

    # -- derivative and gates ------------------------------------------------

    def derivative(self):
        """Df as a list indexed by direction code."""
        if self._derivative is None:
            df = []
            for code in range(2 * self.graph.num_edges):
                img = self.edge_images[code >> 1]
                if len(img) == 0:
                    raise InvalidGraph("derivative undefined: an edge has trivial image")
                df.append(int(img.codes[-1]) ^ 1 if code & 1 else int(img.codes[0]))
            self._derivative = tuple(df)
        return self._derivative

    def stable_image(self):
        """Df^n of every direction, n = number of directions."""
        df = self.derivative()
        cur = list(range(len(df)))
        for _ in range(len(df)):
            cur = [df[d] for d in cur]
        return cur

    def gates(self):
        if self._gates is None:
            self._gates = GateStructure(self.graph, self.stable_image())
        return self._gates

    def is_legal(self, turn):
        if turn.is_degenerate():
            return False
        return not self.gates().same_gate(turn.first, turn.second)

    def path_turns(self, path):
        codes = path.codes.tolist()
        return [Turn(codes[i] ^ 1, codes[i + 1]) for i in range(len(codes) - 1)]

    def is_legal_path(self, path):
        return all(self.is_legal(t) for t in self.path_turns(path))

    def legal_segments(self, path):
        """Lengths of the maximal legal subpaths, split at illegal turns."""
        if len(path) == 0:
            return []
        gate_of = self.gates().gate_of
        codes = path.codes.tolist()
        segs = []
        run = 1
        for i in range(len(codes) - 1):
            if gate_of[codes[i] ^ 1] is gate_of[codes[i + 1]]:
                segs.append(run)
                run = 1
            else:
                run += 1
        segs.append(run)
        return segs

    # -- misc ----------------------------------------------------------------

    def is_identity(self):
        return all(
            len(img) == 1 and int(img.codes[0]) == 2 * e for e, img in enumerate(self.edge_images)
        ) and all(v == i for i, v in enumerate(self.vertex_map))

    def fixed_edges(self):
        return [e for e, img in enumerate(self.edge_images)
                if len(img) == 1 and int(img.codes[0]) == 2 * e]

    def __repr__(self):
        imgs = ", ".join(str(w) for w in self.edge_images)
        return f"GraphSelfMap([{imgs}], label={self.label!r})"


def rose_map(phi):
    """Self map of the N-petal rose with edge images the generator images."""
    N = phi.rank
    graph = MarkedGraph(["v"], [("v", "v")] * N, tree=(), rank=N)
    images = [Word._from_codes(w.codes, N) for w in phi.images]
    return GraphSelfMap(graph, images, vertex_map=[0], induced_class=phi, label=phi.label)


def map_path(f, path, k=1, length_cap=DEFAULT_LENGTH_CAP):
    return f.map_path(path, k, length_cap)


def derivative(f):
    return f.derivative()


def gates(f):
    return f.gates()


def is_legal(f, turn):
    return f.is_legal(turn)


# -- closed path enumeration and Nielsen search ----------------------------------

def closed_paths(graph, max_len, budget=DEFAULT_PATH_BUDGET):
    """Cyclically tight closed edge paths up to ``max_len``, modulo rotation and inversion.

    Yields edge cyclic words in canonical form.  Raises CapExceeded once more
    than ``budget`` partial paths have been explored.
    """
    ncodes = 2 * graph.num_edges
    out_of = [[c for c in range(ncodes) if graph.code_origin(c) == graph.code_terminus(d)]
              for d in range(ncodes)]
    explored = 0
    for n in range(1, max_len + 1):
        for first in range(ncodes):
            stack = [[first]]
            while stack:
                path = stack.pop()
                explored += 1
                if explored > budget:
                    raise CapExceeded(budget, "closed path enumeration budget exceeded")
                if len(path) == n:
                    if graph.code_terminus(path[-1]) != graph.code_origin(first):
                        continue
                    if n > 1 and path[-1] == first ^ 1:
                        continue
                    t = tuple(path)
                    if any(t[i:] + t[:i] < t for i in range(1, n)):
                        continue
                    inv = tuple(c ^ 1 for c in reversed(t))
                    if min(inv[i:] + inv[:i] for i in range(n)) < t:
                        continue
                    h = CyclicWord._from_codes(np.array(t, dtype=CODE_DTYPE), graph.num_edges)
                    yield h
                    continue
                last = path[-1]
                for c in reversed(out_of[last]):
                    if c != last ^ 1 and c >= first:
                        stack.append(path + [c])


def _fixed_rotation_period(f, codes, max_period, length_cap):
    """Least k <= max_period with [f^k(rho)] = rho for the based path rho."""
    E = f.graph.num_edges
    rho = Word._from_codes(codes, E)
    cur = rho
    target = codes.tobytes()
    for k in range(1, max_period + 1):
        cur = f.map_path(cur, 1, length_cap)
        if cur.codes.tobytes() == target:
            return k
    return None


def verify_nielsen(f, based_path, period, length_cap=DEFAULT_LENGTH_CAP):
    return f.map_path(based_path, period, length_cap) == based_path


def nielsen_search(f, max_len, max_period, length_cap=DEFAULT_LENGTH_CAP,
                   budget=DEFAULT_PATH_BUDGET):
    """Primitive closed Nielsen paths up to ``max_len`` with period ``<= max_period``.

    Every rotation of each candidate circuit is tried as a based path.  An
    empty result only means none exist within these bounds.
    """
    if max_len < 1 or max_period < 1:
        raise ValueError("caps must be positive")
    found = []
    for h in closed_paths(f.graph, max_len, budget):
        _, exp = h.root()
        if exp > 1:
            continue
        # a based fixed path forces the circuit to be fixed, which is cheaper to test
        periods = []
        cur = h
        for k in range(1, max_period + 1):
            cur = f.map_loop(cur, 1, length_cap)
            if cur == h:
                periods.append(k)
        if not periods:
            continue
        codes = h.codes
        best = None
        for r in range(codes.size):
            rot = np.concatenate([codes[r:], codes[:r]])
            k = _fixed_rotation_period(f, rot, periods[-1], length_cap)
            if k is not None and (best is None or k < best[0]):
                best = (k, rot)
        if best is not None:
            based = Word._from_codes(best[1], f.graph.num_edges)
            found.append(NielsenCertificate(h, best[0], based))
    return found


def linear_suffix(f, e, max_period=10, length_cap=DEFAULT_LENGTH_CAP):
    """If f(e) = e.rho (or rho.e) with rho a closed Nielsen path, return (rho, k)."""
    img = f.edge_images[e]
    codes = img.codes
    if codes.size < 2:
        return None
    candidates = []
    if int(codes[0]) == 2 * e:
        candidates.append(codes[1:])
    if int(codes[-1]) == 2 * e:
        candidates.append(codes[:-1])
    for rho in candidates:
        path = Word._from_codes(np.array(rho, dtype=CODE_DTYPE), f.graph.num_edges)
        if not f.graph.is_closed(path) or len(path) == 0:
            continue
        k = _fixed_rotation_period(f, path.codes, max_period, length_cap)
        if k is not None:
            return path, k
    return None


# -- bounded cancellation -----------------------------------------------------------

def bcc_upper(f):
    """Sum of image lengths over positive edges; bounds junction cancellation."""
    return sum(len(w) for w in f.edge_images)


def tight_paths(graph, max_len, budget=DEFAULT_PATH_BUDGET):
    """All tight edge paths of length 1..max_len as code tuples."""
    ncodes = 2 * graph.num_edges
    out_of = [[c for c in range(ncodes) if graph.code_origin(c) == graph.code_terminus(d)
               and c != d ^ 1] for d in range(ncodes)]
    level = [(c,) for c in range(ncodes)]
    paths = list(level)
    for _ in range(max_len - 1):
        level = [p + (c,) for p in level for c in out_of[p[-1]]]
        paths.extend(level)
        if len(paths) > budget:
            raise CapExceeded(budget, "path enumeration budget exceeded")
    return paths


def bcc_empirical(f, L, budget=DEFAULT_PATH_BUDGET):
    """Largest cancellation between [f(g1)] and [f(g2)] over tight g1.g2, |gi| <= L.

    For reduced images the junction cancels exactly the longest common
    prefix of inverse([f(g1)]) and [f(g2)], so for each compatible pair of
    (last edge of g1, first edge of g2) the maximum is found between
    neighbours in the sorted union of both sides.
    """
    if L < 1:
        raise ValueError("L must be positive")
    g = f.graph
    E = g.num_edges
    paths = tight_paths(g, L, budget)
    ends = {}
    starts = {}
    for p in paths:
        img = f.map_path(Word._from_codes(np.array(p, dtype=CODE_DTYPE), E), 1, None).codes
        inv = tuple(inverse_codes(img).tolist())
        fwd = tuple(img.tolist())
        ends.setdefault(p[-1], set()).add(inv)
        starts.setdefault(p[0], set()).add(fwd)
    best = 0
    for last, left in ends.items():
        for first, right in starts.items():
            if first == last ^ 1 or g.code_terminus(last) != g.code_origin(first):
                continue
            merged = sorted([(s, 0) for s in left] + [(s, 1) for s in right])
            for (s1, t1), (s2, t2) in zip(merged, merged[1:]):
                if t1 != t2:
                    best = max(best, _lcp(s1, s2))
    return best


def _lcp(a, b):
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


# -- goodness proxies ----------------------------------------------------------------

def default_seg_threshold(f, nielsen_max_len=4, max_period=4):
    """2C + 1 with C the larger of bcc_upper and the longest Nielsen certificate found."""
    certs = nielsen_search(f, nielsen_max_len, max_period)
    c0 = max((len(c) for c in certs), default=0)
    return 2 * max(bcc_upper(f), c0) + 1


def legal_goodness(f, path, seg_threshold):
    """Fraction of the path covered by maximal legal segments of length >= threshold."""
    if len(path) == 0:
        raise EmptyPath("goodness of the trivial path is undefined")
    if seg_threshold < 1:
        raise ValueError("seg_threshold must be at least 1")
    good = sum(s for s in f.legal_segments(path) if s >= seg_threshold)
    return Fraction(good, len(path))


def relative_goodness(f, path, marked_edge, seg_threshold):
    """Length-weighted legal goodness of the blocks between marked-edge occurrences."""
    if len(path) == 0:
        raise EmptyPath("goodness of the trivial path is undefined")
    img = f.edge_images[marked_edge]
    if not (len(img) == 1 and int(img.codes[0]) == 2 * marked_edge):
        raise ValueError("marked edge must be fixed by the map")
    E = f.graph.num_edges
    blocks = []
    cur = []
    for c in path.codes.tolist():
        if c >> 1 == marked_edge:
            if cur:
                blocks.append(cur)
            cur = []
        else:
            cur.append(c)
    if cur:
        blocks.append(cur)
    if not blocks:
        raise OnlyMarkedEdge("path is a power of the marked edge")
    total = 0
    weighted = Fraction(0)
    for b in blocks:
        w = Word._from_codes(np.array(b, dtype=CODE_DTYPE), E)
        weighted += len(b) * legal_goodness(f, w, seg_threshold)
        total += len(b)
    return weighted / total


def identity_map(rank):
    return rose_map(identity(rank))
