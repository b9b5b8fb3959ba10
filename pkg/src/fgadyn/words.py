"""Reduced words and conjugacy classes in a free group F_N.

Letters are signed integers: ``i`` is the generator x_i and ``-i`` its
inverse.  Internally a word is a read-only ``uint8`` array of letter codes,
``code = 2*(i - 1) + (1 if inverse else 0)``.  With this encoding the inverse
of a code is ``code ^ 1`` and the natural order on codes is the fixed letter
order x1 < x1^-1 < x2 < x2^-1 < ..., which is what canonical rotations use.

Literal syntax: for rank <= 26 the letters ``a..z`` with capitals for
inverses (``abA`` = x1 x2 x1^-1); otherwise tokens ``x1 X1 x2 ...``.  The
identity is written ``1``.
"""

import hashlib
import re

import numpy as np

from .errors import EmptyPattern, ParseError, RankMismatch, TrivialClass

MAX_RANK = 128
CODE_DTYPE = np.uint8

# below this length plain Python lists beat numpy call overhead
_SMALL = 48
_MAX_VECTOR_ROUNDS = 12
_EMPTY = np.zeros(0, dtype=CODE_DTYPE)
_EMPTY.flags.writeable = False


def letter_to_code(letter, rank):
    i = abs(letter)
    if letter == 0 or i > rank:
        raise RankMismatch(f"letter {letter} outside rank {rank}")
    return 2 * (i - 1) + (letter < 0)


def code_to_letter(code):
    code = int(code)
    i = (code >> 1) + 1
    return -i if code & 1 else i


def _check_rank(rank):
    if not isinstance(rank, (int, np.integer)) or rank < 1 or rank > MAX_RANK:
        raise RankMismatch(f"rank must be an integer in [1, {MAX_RANK}], got {rank!r}")
    return int(rank)


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=CODE_DTYPE)
    arr.flags.writeable = False
    return arr


# -- low level code-array operations --------------------------------------

def _stack_reduce(seq):
    out = []
    for c in seq:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return out


def free_reduce_codes(codes):
    """Freely reduce a code array; returns a new array.

    A few vectorised cancellation rounds handle the common case of shallow
    cancellation.  Deep nesting falls back to splitting the array in half,
    reducing both sides and cancelling across the junction.
    """
    if codes.size <= _SMALL:
        return np.array(_stack_reduce(codes.tolist()), dtype=CODE_DTYPE)
    c = codes
    for _ in range(_MAX_VECTOR_ROUNDS):
        if c.size < 2:
            break
        hit = (c[:-1] ^ 1) == c[1:]
        idx = np.flatnonzero(hit)
        if idx.size == 0:
            return np.array(c, dtype=CODE_DTYPE)
        # inside a run of consecutive cancelling positions take every other one
        starts = np.ones(idx.size, dtype=bool)
        starts[1:] = idx[1:] != idx[:-1] + 1
        run_start = np.maximum.accumulate(np.where(starts, idx, 0))
        sel = idx[((idx - run_start) & 1) == 0]
        keep = np.ones(c.size, dtype=bool)
        keep[sel] = False
        keep[sel + 1] = False
        c = c[keep]
    if c.size <= _SMALL:
        return np.array(_stack_reduce(c.tolist()), dtype=CODE_DTYPE)
    mid = c.size // 2
    return join_reduced(free_reduce_codes(c[:mid]), free_reduce_codes(c[mid:]))


def join_reduced(left, right):
    """Concatenate two reduced code arrays and cancel across the junction."""
    m = min(left.size, right.size)
    if m == 0:
        return np.concatenate([left, right])
    mismatch = (left[::-1][:m] ^ 1) != right[:m]
    k = int(np.argmax(mismatch)) if mismatch.any() else m
    return np.concatenate([left[:left.size - k], right[k:]])


def cyclic_reduce_codes(codes):
    """Strip a conjugating prefix/suffix from a reduced code array."""
    n = codes.size
    if n < 2:
        return codes
    half = n // 2
    if n <= _SMALL:
        k = 0
        while k < half and codes[k] ^ 1 == codes[n - 1 - k]:
            k += 1
    else:
        mismatch = (codes[:half] ^ 1) != codes[::-1][:half]
        k = int(np.argmax(mismatch)) if mismatch.any() else half
    if k == 0:
        return codes
    return codes[k:n - k]


def inverse_codes(codes):
    return codes[::-1] ^ 1


def least_rotation_index(seq):
    """Booth's algorithm: start index of the lexicographically least rotation."""
    s = list(seq) * 2
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def canonical_rotation_codes(codes):
    n = codes.size
    if n <= 32:
        t = tuple(codes.tolist())
        return np.array(min(t[i:] + t[:i] for i in range(n)), dtype=CODE_DTYPE)
    k = least_rotation_index(codes.tolist())
    return np.concatenate([codes[k:], codes[:k]])


def is_rotation(a, b):
    """True iff code arrays ``a`` and ``b`` are cyclic rotations of each other."""
    if a.size != b.size:
        return False
    if a.size == 0:
        return True
    ab = a.tobytes()
    return (ab + ab).find(b.tobytes()) != -1


def primitive_period(codes):
    """Least p such that the cyclic word is the (n/p)-th power of its length-p prefix."""
    n = codes.size
    s = codes.tobytes()
    p = (s + s).find(s, 1)
    return p if p > 0 else n


# -- literals ---------------------------------------------------------------

_TOKEN = re.compile(r"([xX])(\d+)")


def parse_letters(text, rank):
    """Parse a word literal into its raw signed letters, without reducing."""
    rank = _check_rank(rank)
    text = text.strip()
    if text in ("", "1"):
        return []
    letters = []
    if any(ch.isdigit() for ch in text):
        pos = 0
        compact = re.sub(r"[\s,.*]+", "", text)
        for m in _TOKEN.finditer(compact):
            if m.start() != pos:
                break
            i = int(m.group(2))
            letters.append(i if m.group(1) == "x" else -i)
            pos = m.end()
        if pos != len(compact):
            raise ParseError(f"bad token near {compact[pos:]!r} in word {text!r}")
    else:
        for ch in re.sub(r"[\s.*]+", "", text):
            if not ("a" <= ch.lower() <= "z"):
                raise ParseError(f"bad letter {ch!r} in word {text!r}")
            i = ord(ch.lower()) - ord("a") + 1
            letters.append(-i if ch.isupper() else i)
    for letter in letters:
        if abs(letter) > rank or letter == 0:
            raise ParseError(f"letter {letter} of word {text!r} outside rank {rank}")
    return letters


def parse_word(text, rank):
    """Parse a word literal into a reduced :class:`Word`."""
    return reduce(parse_letters(text, rank), rank)


def format_codes(codes, rank):
    if len(codes) == 0:
        return "1"
    if rank <= 26:
        return "".join(
            chr(ord("A" if c & 1 else "a") + (c >> 1)) for c in np.asarray(codes).tolist()
        )
    return " ".join(
        ("X" if c & 1 else "x") + str((c >> 1) + 1) for c in np.asarray(codes).tolist()
    )


# -- public types ---------------------------------------------------------------

class Word:
    """A freely reduced word in F_N.  Immutable."""

    __slots__ = ("rank", "_codes", "_hash")

    def __init__(self, letters=(), rank=None):
        if rank is None:
            raise RankMismatch("Word needs an explicit rank")
        if isinstance(letters, str):
            other = parse_word(letters, rank)
            codes = other._codes
        else:
            rank = _check_rank(rank)
            raw = np.array([letter_to_code(int(x), rank) for x in letters], dtype=CODE_DTYPE)
            codes = free_reduce_codes(raw)
        self.rank = int(rank)
        self._codes = _frozen(codes)
        self._hash = None

    @classmethod
    def _from_codes(cls, codes, rank, reduced=True):
        w = cls.__new__(cls)
        w.rank = rank
        w._codes = _frozen(codes if reduced else free_reduce_codes(codes))
        w._hash = None
        return w

    @classmethod
    def identity(cls, rank):
        return cls._from_codes(_EMPTY, _check_rank(rank))

    @classmethod
    def generator(cls, i, rank):
        return cls._from_codes(np.array([letter_to_code(i, rank)], dtype=CODE_DTYPE), rank)

    @property
    def codes(self):
        return self._codes

    @property
    def letters(self):
        return tuple(code_to_letter(c) for c in self._codes.tolist())

    def __len__(self):
        return int(self._codes.size)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return self._codes.size > 0

    def is_identity(self):
        return self._codes.size == 0

    def inverse(self):
        return Word._from_codes(inverse_codes(self._codes), self.rank)

    __invert__ = inverse

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        if other.rank != self.rank:
            raise RankMismatch(f"ranks {self.rank} and {other.rank} differ")
        return Word._from_codes(join_reduced(self._codes, other._codes), self.rank)

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0 or not self:
            return Word.identity(self.rank)
        # w^k = u c^k u^-1 with c cyclically reduced
        c = cyclic_reduce_codes(self._codes)
        m = (self._codes.size - c.size) // 2
        u = self._codes[:m]
        return Word._from_codes(
            np.concatenate([u, np.tile(c, k), inverse_codes(u)]), self.rank
        )

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return (
            self.rank == other.rank
            and self._codes.size == other._codes.size
            and self._codes.tobytes() == other._codes.tobytes()
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, self._codes.tobytes()))
        return self._hash

    def sort_key(self):
        return (len(self), self._codes.tobytes())

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return format_codes(self._codes, self.rank)

    def __repr__(self):
        return f"Word({str(self)!r}, rank={self.rank})"

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word._from_codes(self._codes[item], self.rank)
        return code_to_letter(self._codes[item])


def reduce(raw, rank):
    """Free reduction of a raw letter sequence."""
    return Word(raw, rank)


class CyclicWord:
    """A conjugacy class of a nontrivial element of F_N.

    Stores some cyclically reduced representative; the canonical rotation
    (lexicographically least under the letter order) is computed on first use.
    Equality is exact (rotation test), so two classes compare equal iff their
    canonical forms agree.  Orientation matters: (g) and (g^-1) differ.
    """

    __slots__ = ("rank", "_rep", "_canon", "_hash")

    def __init__(self, word, rank=None):
        if isinstance(word, str):
            word = parse_word(word, rank)
        elif not isinstance(word, Word):
            word = Word(word, rank)
        c = cyclic_reduce_codes(word.codes)
        if c.size == 0:
            raise TrivialClass(f"{word} is trivial")
        self.rank = word.rank
        self._rep = _frozen(c)
        self._canon = None
        self._hash = None

    @classmethod
    def _from_codes(cls, codes, rank):
        """From a cyclically reduced, freely reduced code array."""
        if codes.size == 0:
            raise TrivialClass("trivial class")
        h = cls.__new__(cls)
        h.rank = rank
        h._rep = _frozen(codes)
        h._canon = None
        h._hash = None
        return h

    @property
    def rep_codes(self):
        """A cyclically reduced representative, not necessarily canonical."""
        return self._rep

    @property
    def codes(self):
        if self._canon is None:
            self._canon = _frozen(canonical_rotation_codes(self._rep))
        return self._canon

    @property
    def letters(self):
        return tuple(code_to_letter(c) for c in self.codes.tolist())

    def word(self):
        """The canonical rotation as a :class:`Word`."""
        return Word._from_codes(self.codes, self.rank)

    def rep_word(self):
        return Word._from_codes(self._rep, self.rank)

    def __len__(self):
        return int(self._rep.size)

    def inverse(self):
        return CyclicWord._from_codes(inverse_codes(self._rep), self.rank)

    def __pow__(self, k):
        if k == 0:
            raise TrivialClass("zeroth power of a class is trivial")
        base = self if k > 0 else self.inverse()
        return CyclicWord._from_codes(np.tile(base._rep, abs(k)), self.rank)

    def root(self):
        """Return ``(primitive_class, exponent)`` with ``self == primitive**exponent``."""
        p = primitive_period(self._rep)
        n = self._rep.size
        return CyclicWord._from_codes(self._rep[:p], self.rank), n // p

    def is_power_of(self, other):
        """True iff self = other^k for some k != 0 (either orientation)."""
        r1, _ = self.root()
        r2, _ = other.root()
        return r1 == r2 or r1 == r2.inverse()

    def __eq__(self, other):
        if not isinstance(other, CyclicWord):
            return NotImplemented
        if self.rank != other.rank or self._rep.size != other._rep.size:
            return False
        if self._canon is not None and other._canon is not None:
            return self._canon.tobytes() == other._canon.tobytes()
        if self._rep.size > 256 and self._fingerprint() != other._fingerprint():
            return False
        return is_rotation(self._rep, other._rep)

    def _fingerprint(self):
        if self._hash is None:
            n = self._rep.size
            if n <= 256:
                self._hash = hash((self.rank, self.codes.tobytes()))
            else:
                self._hash = hash((self.rank, n, _bigram_counts(self._rep, self.rank).tobytes()))
        return self._hash

    __hash__ = _fingerprint

    def digest(self):
        """Stable hex digest, invariant under rotation (not under inversion)."""
        n = self._rep.size
        h = hashlib.sha256(f"{self.rank}:{n}:".encode())
        if n <= 256:
            h.update(self.codes.tobytes())
        else:
            h.update(b"bigrams:")
            h.update(_bigram_counts(self._rep, self.rank).astype("<i8").tobytes())
        return h.hexdigest()[:16]

    def sort_key(self):
        return (len(self), self.codes.tobytes())

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return format_codes(self.codes, self.rank)

    def __repr__(self):
        return f"CyclicWord({str(self)!r}, rank={self.rank})"


def _bigram_counts(codes, rank):
    base = 2 * rank
    a = codes.astype(np.int64)
    vals = a * base + np.roll(a, -1)
    return np.bincount(vals, minlength=base * base)


def cyclic_canonical(w):
    """Canonical conjugacy-class representative of a nontrivial word."""
    if not isinstance(w, Word):
        raise TypeError("cyclic_canonical expects a Word")
    return CyclicWord(w)


def occurrences(pattern, host):
    """Cyclic occurrences of ``pattern`` plus those of its inverse in ``host``.

    The host is read as the bi-infinite periodic word it determines, so
    patterns longer than the host wrap around more than once.  This is the
    occurrence pairing <pattern, eta_host> of the counting current.
    """
    if not isinstance(pattern, Word):
        raise TypeError("pattern must be a Word")
    if pattern.rank != host.rank:
        raise RankMismatch(f"ranks {pattern.rank} and {host.rank} differ")
    if len(pattern) == 0:
        raise EmptyPattern("pattern must be nonempty")
    return _cyclic_count(pattern.codes, host.rep_codes) + _cyclic_count(
        inverse_codes(pattern.codes), host.rep_codes
    )


def _cyclic_count(p, h):
    n, k = h.size, p.size
    ext = np.resize(h, n + k - 1)
    match = ext[:n] == p[0]
    for j in range(1, k):
        match &= ext[j:j + n] == p[j]
    return int(np.count_nonzero(match))


# -- enumeration and sampling ---------------------------------------------------

def reduced_code_sequences(rank, length, first=None):
    """All reduced code tuples of the given length (optionally fixed first code)."""
    letters = range(2 * rank)
    if length == 0:
        yield ()
        return

    def extend(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        last = prefix[-1]
        for c in letters:
            if c != last ^ 1:
                prefix.append(c)
                yield from extend(prefix)
                prefix.pop()

    for c in ([first] if first is not None else letters):
        yield from extend([c])


def enumerate_classes(rank, max_len, modulo_inversion=True, min_len=1):
    """All conjugacy classes of length min_len..max_len in canonical order.

    Within a length, classes come in lexicographic order of their canonical
    rotation.  With ``modulo_inversion`` only the smaller of (g), (g^-1) is
    produced.
    """
    rank = _check_rank(rank)
    for n in range(min_len, max_len + 1):
        for t in reduced_code_sequences(rank, n):
            if n > 1 and t[-1] == t[0] ^ 1:
                continue
            if any(t[i:] + t[:i] < t for i in range(1, n)):
                continue
            if modulo_inversion:
                inv = tuple(c ^ 1 for c in reversed(t))
                if min(inv[i:] + inv[:i] for i in range(n)) < t:
                    continue
            arr = np.array(t, dtype=CODE_DTYPE)
            h = CyclicWord._from_codes(arr, rank)
            h._canon = h._rep
            yield h


def random_cyclic_word(rng, rank, max_len, min_len=1):
    """Uniform length in [min_len, max_len], then a random cyclically reduced word."""
    n = rng.randint(min_len, max_len)
    while True:
        codes = [rng.randrange(2 * rank)]
        for _ in range(n - 1):
            c = rng.randrange(2 * rank - 1)
            if c >= (codes[-1] ^ 1):
                c += 1
            codes.append(c)
        if n == 1 or codes[-1] != codes[0] ^ 1:
            return CyclicWord._from_codes(np.array(codes, dtype=CODE_DTYPE), rank)


def random_word(rng, rank, length):
    codes = []
    for _ in range(length):
        c = rng.randrange(2 * rank - (1 if codes else 0))
        if codes and c >= (codes[-1] ^ 1):
            c += 1
        codes.append(c)
    return Word._from_codes(np.array(codes, dtype=CODE_DTYPE), rank)


def embed(word, rank, mapping):
    """Rewrite ``word`` letterwise into rank ``rank`` via a generator index map."""
    letters = []
    for x in word.letters:
        j = mapping[abs(x)]
        letters.append(j if x > 0 else -j)
    return Word(letters, rank)


__all__ = [
    "Word",
    "CyclicWord",
    "reduce",
    "cyclic_canonical",
    "occurrences",
    "parse_word",
    "parse_letters",
    "format_codes",
    "enumerate_classes",
    "random_cyclic_word",
    "random_word",
    "letter_to_code",
    "code_to_letter",
]
