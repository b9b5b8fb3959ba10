"""Automorphisms of F_N given by generator images with a verified inverse.

An outer class is always handled through one automorphism representative;
nothing here quotients by inner automorphisms.
"""

import numpy as np

from .errors import FactorNotInvariant, InverseFailed, LengthCapExceeded, RankMismatch
from .words import (
    CODE_DTYPE,
    CyclicWord,
    Word,
    cyclic_reduce_codes,
    free_reduce_codes,
    inverse_codes,
    parse_word,
)

# bound on the number of output letters gathered per numpy pass
_GATHER_CHUNK = 1 << 22
NIELSEN_HELPER_MAX_LENGTH = 64


class _ImageTable:
    """Images of all 2N letter codes packed into one array for vectorised substitution."""

    __slots__ = ("data", "offsets", "lengths", "maxlen")

    def __init__(self, images):
        parts = []
        for w in images:
            parts.append(w.codes)
            parts.append(inverse_codes(w.codes))
        self.lengths = np.array([p.size for p in parts], dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.lengths)[:-1]]).astype(np.int64)
        self.data = np.concatenate(parts).astype(CODE_DTYPE) if parts else np.zeros(0, CODE_DTYPE)
        self.maxlen = int(self.lengths.max()) if self.lengths.size else 0

    def image_length(self, codes):
        """Length of the substituted word before any reduction."""
        if codes.size == 0:
            return 0
        counts = np.bincount(codes, minlength=self.lengths.size)
        return int(counts @ self.lengths)

    def substitute(self, codes):
        """Letterwise substitution without reduction."""
        total = self.image_length(codes)
        out = np.empty(total, dtype=CODE_DTYPE)
        if total == 0:
            return out
        step = max(1, _GATHER_CHUNK // max(1, self.maxlen))
        pos = 0
        for s in range(0, codes.size, step):
            chunk = codes[s:s + step]
            lens = self.lengths[chunk]
            n = int(lens.sum())
            if n == 0:
                continue
            before = np.cumsum(lens) - lens
            idx = np.repeat(self.offsets[chunk] - before, lens) + np.arange(n, dtype=np.int64)
            out[pos:pos + n] = self.data[idx]
            pos += n
        return out


class Automorphism:
    """An automorphism of F_N stored as generator images plus inverse images.

    Both compositions are checked on every generator at construction; a
    failure raises :class:`InverseFailed`.  When ``inverse_images`` is omitted
    a bounded Nielsen-reduction search tries to find it.
    """

    def __init__(self, images, inverse_images=None, rank=None, label="", verify=True):
        if rank is None:
            rank = len(images)
        self.rank = int(rank)
        self.images = tuple(_as_word(w, self.rank) for w in images)
        if len(self.images) != self.rank:
            raise RankMismatch(f"{len(self.images)} images given for rank {self.rank}")
        if inverse_images is None:
            found = nielsen_inverse(self.images, self.rank)
            if found is None:
                raise InverseFailed(
                    "no inverse supplied and the bounded Nielsen helper found none"
                )
            inverse_images = found
        self.inverse_images = tuple(_as_word(w, self.rank) for w in inverse_images)
        if len(self.inverse_images) != self.rank:
            raise RankMismatch("inverse_images has the wrong number of entries")
        self.label = label
        self._table = _ImageTable(self.images)
        self._inv_table = _ImageTable(self.inverse_images)
        if verify:
            self._verify()

    @classmethod
    def _trusted(cls, images, inverse_images, rank, label="", verify=False):
        return cls(images, inverse_images, rank=rank, label=label, verify=verify)

    def _verify(self):
        for i in range(1, self.rank + 1):
            x = Word.generator(i, self.rank)
            if _subst(self._inv_table, self.images[i - 1].codes).tobytes() != x.codes.tobytes():
                raise InverseFailed(f"inverse(image(x{i})) != x{i}")
            if _subst(self._table, self.inverse_images[i - 1].codes).tobytes() != x.codes.tobytes():
                raise InverseFailed(f"image(inverse(x{i})) != x{i}")

    # -- action -----------------------------------------------------------

    def apply(self, w, length_cap=None):
        _same_rank(self, w)
        return Word._from_codes(_subst(self._table, w.codes, length_cap), self.rank)

    def apply_inverse(self, w, length_cap=None):
        _same_rank(self, w)
        return Word._from_codes(_subst(self._inv_table, w.codes, length_cap), self.rank)

    def apply_class(self, h, length_cap=None):
        _same_rank(self, h)
        return _act_class(self._table, h, length_cap)

    def apply_class_inverse(self, h, length_cap=None):
        _same_rank(self, h)
        return _act_class(self._inv_table, h, length_cap)

    def image_length(self, w):
        """Unreduced image length of a word or class, cheap upper bound."""
        codes = w.rep_codes if isinstance(w, CyclicWord) else w.codes
        return self._table.image_length(codes)

    __call__ = apply

    # -- algebra ----------------------------------------------------------

    def inverse(self):
        lab = f"({self.label})^-1" if self.label else ""
        return Automorphism._trusted(self.inverse_images, self.images, self.rank, lab)

    def is_identity(self):
        return all(len(w) == 1 and w[0] == i + 1 for i, w in enumerate(self.images))

    def max_image_length(self):
        return max(len(w) for w in self.images)

    def total_image_length(self):
        return sum(len(w) for w in self.images)

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.rank == other.rank and self.images == other.images

    def __hash__(self):
        return hash((self.rank, self.images))

    def __repr__(self):
        imgs = ", ".join(str(w) for w in self.images)
        return f"Automorphism([{imgs}], rank={self.rank}, label={self.label!r})"


def _as_word(w, rank):
    if isinstance(w, Word):
        if w.rank != rank:
            raise RankMismatch(f"word of rank {w.rank} in automorphism of rank {rank}")
        return w
    if isinstance(w, str):
        return parse_word(w, rank)
    return Word(w, rank)


def _same_rank(phi, w):
    if w.rank != phi.rank:
        raise RankMismatch(f"automorphism of rank {phi.rank} applied to rank {w.rank}")


def _guard(table, codes, length_cap):
    # the cap also bounds the unreduced image, so memory stays proportional to it
    if length_cap is not None and table.image_length(codes) > length_cap:
        raise LengthCapExceeded(length_cap)


def _subst(table, codes, length_cap=None):
    _guard(table, codes, length_cap)
    raw = table.substitute(codes)
    out = free_reduce_codes(raw) if raw.size > 1 else raw
    if length_cap is not None and out.size > length_cap:
        raise LengthCapExceeded(length_cap)
    return out


def _act_class(table, h, length_cap=None):
    _guard(table, h.rep_codes, length_cap)
    raw = table.substitute(h.rep_codes)
    out = cyclic_reduce_codes(free_reduce_codes(raw))
    if length_cap is not None and out.size > length_cap:
        raise LengthCapExceeded(length_cap)
    return CyclicWord._from_codes(out, h.rank)


def apply(phi, w, length_cap=None):
    """Substitute generator images letterwise and freely reduce."""
    return phi.apply(w, length_cap)


def apply_class(phi, h, length_cap=None):
    """Image of a conjugacy class; independent of the representative."""
    return phi.apply_class(h, length_cap)


def identity(rank, label="id"):
    gens = [Word.generator(i, rank) for i in range(1, rank + 1)]
    return Automorphism._trusted(gens, gens, rank, label)


def compose(phi, psi):
    """The automorphism applying ``psi`` first, then ``phi``."""
    if phi.rank != psi.rank:
        raise RankMismatch(f"ranks {phi.rank} and {psi.rank} differ")
    images = [phi.apply(w) for w in psi.images]
    inverse_images = [psi.apply_inverse(w) for w in phi.inverse_images]
    label = f"{phi.label}.{psi.label}" if phi.label and psi.label else ""
    return Automorphism._trusted(images, inverse_images, phi.rank, label)


def power(phi, n):
    """phi^n by repeated squaring; negative n uses the inverse data."""
    exponent = n
    base = phi if n >= 0 else phi.inverse()
    n = abs(n)
    result = identity(phi.rank)
    while n:
        if n & 1:
            result = compose(base, result)
        n >>= 1
        if n:
            base = compose(base, base)
    if phi.label:
        result.label = f"({phi.label})^{exponent}"
    return result


def conjugate(phi, psi):
    """psi phi psi^-1."""
    return compose(psi, compose(phi, psi.inverse()))


def free_product(phi, psi):
    """Block automorphism of F_{k+m}: phi on the first k generators, psi on the rest."""
    k, m = phi.rank, psi.rank
    rank = k + m

    def shift(w, by):
        return Word([x + by if x > 0 else x - by for x in w.letters], rank)

    images = [shift(w, 0) for w in phi.images] + [shift(w, k) for w in psi.images]
    inv = [shift(w, 0) for w in phi.inverse_images] + [shift(w, k) for w in psi.inverse_images]
    label = f"{phi.label}*{psi.label}" if phi.label or psi.label else ""
    return Automorphism._trusted(images, inv, rank, label)


def restrict(phi, generators):
    """Restriction to the free factor spanned by the given generator indices.

    The factor is relabelled with generators 1..len(generators) in the given
    order.  Raises :class:`FactorNotInvariant` when some image leaves it.
    """
    generators = list(generators)
    index = {g: j + 1 for j, g in enumerate(generators)}
    sub_rank = len(generators)

    def relabel(w):
        out = []
        for x in w.letters:
            if abs(x) not in index:
                raise FactorNotInvariant(
                    f"image {w} leaves the factor spanned by generators {generators}"
                )
            j = index[abs(x)]
            out.append(j if x > 0 else -j)
        return Word(out, sub_rank)

    images = [relabel(phi.images[g - 1]) for g in generators]
    inv = [relabel(phi.inverse_images[g - 1]) for g in generators]
    label = f"{phi.label}|A" if phi.label else ""
    return Automorphism(images, inv, rank=sub_rank, label=label)


def abelianization(phi, modulus=None):
    """Integer matrix whose row i is the abelianised image of generator i.

    With this row convention ``abelianization(compose(phi, psi))`` equals
    ``abelianization(psi) @ abelianization(phi)``.
    """
    n = phi.rank
    mat = np.zeros((n, n), dtype=np.int64)
    for i, w in enumerate(phi.images):
        for x in w.letters:
            mat[i, abs(x) - 1] += 1 if x > 0 else -1
    if modulus is not None:
        mat %= modulus
    return mat


def in_IA_mod3(phi):
    """True iff phi acts trivially on H_1(F_N; Z/3)."""
    return bool(np.array_equal(abelianization(phi, 3), np.eye(phi.rank, dtype=np.int64)))


def matrix_order_mod(mat, modulus, max_order=None):
    """Multiplicative order of an invertible integer matrix modulo ``modulus``."""
    n = mat.shape[0]
    ident = np.eye(n, dtype=np.int64)
    base = np.asarray(mat, dtype=np.int64) % modulus
    cur = base.copy()
    if max_order is None:
        max_order = modulus ** (n * n)
    for k in range(1, max_order + 1):
        if np.array_equal(cur, ident):
            return k
        cur = (cur @ base) % modulus
    raise ValueError("matrix is not invertible modulo the given modulus")


def nielsen_inverse(images, rank, max_total_length=NIELSEN_HELPER_MAX_LENGTH, max_steps=10000):
    """Find inverse images by greedy Nielsen reduction of the image tuple.

    Keeps ``current[i] = phi(track[i])`` while applying length-decreasing
    moves ``current[i] <- current[i] * current[j]^(+-1)`` (or on the left).
    When every entry is a single letter the tracked words give the inverse.
    Returns None if the images are too long or the greedy search stalls.
    """
    images = [_as_word(w, rank) for w in images]
    if sum(len(w) for w in images) > max_total_length:
        return None
    current = list(images)
    track = [Word.generator(i, rank) for i in range(1, rank + 1)]
    for _ in range(max_steps):
        if all(len(w) == 1 for w in current):
            break
        best = None
        for i in range(rank):
            for j in range(rank):
                if i == j:
                    continue
                for sign in (1, -1):
                    other = current[j] if sign > 0 else current[j].inverse()
                    for side in ("right", "left"):
                        cand = current[i] * other if side == "right" else other * current[i]
                        gain = len(current[i]) - len(cand)
                        if gain > 0 and (best is None or gain > best[0]):
                            best = (gain, i, j, sign, side, cand)
        if best is None:
            return None
        _, i, j, sign, side, cand = best
        t_other = track[j] if sign > 0 else track[j].inverse()
        track[i] = track[i] * t_other if side == "right" else t_other * track[i]
        current[i] = cand
    else:
        return None
    inverse = [None] * rank
    for i, w in enumerate(current):
        if len(w) != 1:
            return None
        x = w[0]
        if inverse[abs(x) - 1] is not None or len(w) == 0:
            return None
        inverse[abs(x) - 1] = track[i] if x > 0 else track[i].inverse()
    if any(v is None for v in inverse):
        return None
    return inverse


def agree_on_classes(phi, psi, seeds):
    """Semi-decision for equality of outer classes: compare on a seed set."""
    return all(phi.apply_class(h) == psi.apply_class(h) for h in seeds)
