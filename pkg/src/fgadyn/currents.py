"""Finite-window coordinates of rational geodesic currents.

A current is observed through its occurrence numbers on all reduced
patterns of length 1..W, one coordinate per unordered pair {g, g^-1}.  The
coordinate representative of a pair is the lexicographically smaller of
the two code strings.
"""

from functools import lru_cache

import numpy as np

from .errors import NoProvenance, RankMismatch, WindowMismatch
from .words import CyclicWord, Word, format_codes, inverse_codes, reduced_code_sequences

DEFAULT_WINDOW = 2
_CHUNK = 1 << 22


class PatternIndex:
    """Coordinates for all reduced patterns of length 1..window in rank N."""

    def __init__(self, rank, window):
        if window < 1:
            raise ValueError("window must be at least 1")
        self.rank = rank
        self.window = window
        self.base = 2 * rank
        if self.base ** window > 1 << 26:
            raise ValueError("window too large for this rank")
        self.patterns = []
        self.lengths = []
        self.lookup = []
        coord = 0
        for n in range(1, window + 1):
            table = np.full(self.base ** n, -1, dtype=np.int64)
            reps = {}
            for t in reduced_code_sequences(rank, n):
                inv = tuple(c ^ 1 for c in reversed(t))
                rep = min(t, inv)
                if rep not in reps:
                    reps[rep] = None
            for rep in sorted(reps):
                reps[rep] = coord
                self.patterns.append(rep)
                self.lengths.append(n)
                coord += 1
            for t in reduced_code_sequences(rank, n):
                inv = tuple(c ^ 1 for c in reversed(t))
                table[self._value(t)] = reps[min(t, inv)]
            self.lookup.append(table)
        self.size = coord
        self.lengths = np.array(self.lengths, dtype=np.int64)
        self._coord = {p: i for i, p in enumerate(self.patterns)}
        self.literals = [format_codes(p, rank) for p in self.patterns]

    def _value(self, t):
        v = 0
        for c in t:
            v = v * self.base + c
        return v

    def coordinate(self, pattern):
        """Coordinate of a reduced pattern (Word or code tuple) or its inverse."""
        t = tuple(pattern.codes.tolist()) if isinstance(pattern, Word) else tuple(pattern)
        inv = tuple(c ^ 1 for c in reversed(t))
        return self._coord[min(t, inv)]

    def mask(self, n):
        return self.lengths == n

    def count(self, codes):
        """Cyclic window counts of a cyclically reduced code array."""
        counts = np.zeros(self.size, dtype=np.int64)
        n = codes.size
        W = self.window
        ext = np.resize(codes, n + W - 1).astype(np.int64)
        for s in range(0, n, _CHUNK):
            m = min(_CHUNK, n - s)
            val = np.zeros(m, dtype=np.int64)
            for k in range(W):
                val = val * self.base + ext[s + k:s + k + m]
                counts += np.bincount(self.lookup[k][val], minlength=self.size)
        return counts


@lru_cache(maxsize=32)
def pattern_index(rank, window):
    return PatternIndex(rank, window)


class FrequencyVector:
    """Counts divided by simplicial length, on the same index set."""

    __slots__ = ("rank", "window", "values")

    def __init__(self, rank, window, values):
        self.rank = rank
        self.window = window
        self.values = np.asarray(values, dtype=float)

    @property
    def index(self):
        return pattern_index(self.rank, self.window)

    def __getitem__(self, pattern):
        return float(self.values[self.index.coordinate(pattern)])

    def combine(self, other, t):
        """t * self + (1 - t) * other."""
        _compatible(self, other)
        return FrequencyVector(self.rank, self.window, t * self.values + (1 - t) * other.values)

    def to_pairs(self, digits=12):
        """Sorted (pattern literal, value) pairs with fixed rounding."""
        lits = self.index.literals
        return sorted((lits[i], round(float(v), digits)) for i, v in enumerate(self.values))

    def __eq__(self, other):
        return (isinstance(other, FrequencyVector) and self.rank == other.rank
                and self.window == other.window and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"FrequencyVector(rank={self.rank}, window={self.window})"


class CurrentVector:
    """Window coordinates of multiplier * eta_h for a class h."""

    __slots__ = ("rank", "window", "counts", "simplicial_length", "provenance", "multiplier")

    def __init__(self, rank, window, counts, provenance=None, multiplier=1):
        self.rank = rank
        self.window = window
        self.counts = np.asarray(counts, dtype=np.int64)
        self.counts.flags.writeable = False
        idx = pattern_index(rank, window)
        self.simplicial_length = int(self.counts[idx.mask(1)].sum())
        self.provenance = provenance
        self.multiplier = multiplier

    @property
    def index(self):
        return pattern_index(self.rank, self.window)

    def __getitem__(self, pattern):
        return int(self.counts[self.index.coordinate(pattern)])

    def frequencies(self):
        return FrequencyVector(self.rank, self.window, self.counts / self.simplicial_length)

    def items(self):
        """Sorted (pattern literal, count) pairs."""
        lits = self.index.literals
        return sorted((lits[i], int(c)) for i, c in enumerate(self.counts))

    def kolmogorov_consistent(self):
        """Each pattern count equals the sum over its one-letter right extensions."""
        idx = self.index
        for i, p in enumerate(idx.patterns):
            if len(p) >= self.window:
                continue
            last = p[-1]
            total = 0
            for c in range(2 * self.rank):
                if c != last ^ 1:
                    total += self.counts[idx.coordinate(p + (c,))]
            if total != self.counts[i]:
                return False
        return True

    def __eq__(self, other):
        return (isinstance(other, CurrentVector) and self.rank == other.rank
                and self.window == other.window and np.array_equal(self.counts, other.counts))

    def __hash__(self):
        return hash((self.rank, self.window, self.counts.tobytes()))

    def __repr__(self):
        src = f", provenance={self.provenance}" if self.provenance is not None else ""
        if self.provenance is not None and len(self.provenance) > 40:
            src = f", provenance=<class of length {len(self.provenance)}>"
        return (f"CurrentVector(rank={self.rank}, window={self.window}, "
                f"length={self.simplicial_length}{src})")


def from_class(h, window=DEFAULT_WINDOW):
    """Counting current of a class, observed on patterns up to ``window``."""
    if not isinstance(h, CyclicWord):
        raise TypeError("from_class expects a CyclicWord")
    idx = pattern_index(h.rank, window)
    return CurrentVector(h.rank, window, idx.count(h.rep_codes), provenance=h)


def scale(v, k):
    if k < 1 or int(k) != k:
        raise ValueError("scale factor must be a positive integer")
    return CurrentVector(v.rank, v.window, v.counts * int(k), v.provenance, v.multiplier * int(k))


def push_forward(phi, v, length_cap=None):
    """phi_* of a counting current by moving its provenance class."""
    if v.provenance is None:
        raise NoProvenance("push_forward needs the underlying class")
    if phi.rank != v.rank:
        raise RankMismatch(f"automorphism of rank {phi.rank} on current of rank {v.rank}")
    image = from_class(phi.apply_class(v.provenance, length_cap), v.window)
    return scale(image, v.multiplier) if v.multiplier != 1 else image


def _compatible(u, v):
    if u.rank != v.rank:
        raise RankMismatch(f"ranks {u.rank} and {v.rank} differ")
    if u.window != v.window:
        raise WindowMismatch(f"windows {u.window} and {v.window} differ")


def proj_distance(u, v):
    """L1 distance between frequency vectors over all patterns up to the window."""
    _compatible(u, v)
    fu = u.frequencies() if isinstance(u, CurrentVector) else u
    fv = v.frequencies() if isinstance(v, CurrentVector) else v
    return float(np.abs(fu.values - fv.values).sum())


def marked_letter_fraction(v, generator):
    """Share of simplicial length carried by one generator."""
    pattern = Word.generator(generator, v.rank)
    if isinstance(v, FrequencyVector):
        return v[pattern]
    return v[pattern] / v.simplicial_length


def lift(fv, rank, mapping):
    """Re-index a frequency vector into a larger rank via a generator map."""
    big = pattern_index(rank, fv.window)
    small = fv.index
    values = np.zeros(big.size)
    for i, p in enumerate(small.patterns):
        codes = []
        for c in p:
            j = mapping[(c >> 1) + 1]
            codes.append(2 * (j - 1) + (c & 1))
        values[big.coordinate(tuple(codes))] = fv.values[i]
    return FrequencyVector(rank, fv.window, values)


def inverse_pattern(pattern):
    return Word._from_codes(inverse_codes(pattern.codes), pattern.rank)
