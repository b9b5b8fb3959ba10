"""Random automorphisms built from elementary Nielsen moves, inverses tracked exactly."""

from fgadyn.automorphisms import Automorphism, compose, identity
from fgadyn.words import Word


def elementary(rank, kind, i, j=None, sign=1):
    gens = [Word.generator(k, rank) for k in range(1, rank + 1)]
    images = list(gens)
    inv = list(gens)
    if kind == "invert":
        images[i] = gens[i].inverse()
        inv[i] = gens[i].inverse()
    elif kind == "swap":
        images[i], images[j] = gens[j], gens[i]
        inv[i], inv[j] = gens[j], gens[i]
    elif kind == "right":
        images[i] = gens[i] * gens[j] ** sign
        inv[i] = gens[i] * gens[j] ** -sign
    elif kind == "left":
        images[i] = gens[j] ** sign * gens[i]
        inv[i] = gens[j] ** -sign * gens[i]
    return Automorphism(images, inv, rank=rank)


def random_automorphism(rng, rank, moves=5):
    phi = identity(rank)
    for _ in range(moves):
        i = rng.randrange(rank)
        j = rng.choice([k for k in range(rank) if k != i]) if rank > 1 else i
        kind = rng.choice(["right", "left", "right", "left", "invert", "swap"])
        if rank == 1 and kind != "invert":
            kind = "invert"
        phi = compose(elementary(rank, kind, i, j, rng.choice([1, -1])), phi)
    return phi
