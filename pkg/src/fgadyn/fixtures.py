"""Built-in automorphisms, addressable from the CLI as ``builtin:NAME``."""

from .automorphisms import Automorphism, free_product, identity


def tribonacci():
    return Automorphism(["ab", "ac", "a"], ["c", "Ca", "Cb"], label="tribonacci")


def tribonacci_x_id():
    """Tribonacci on <a,b,c> times the identity on <d>, rank 4."""
    phi = free_product(tribonacci(), identity(1))
    phi.label = "tribonacci*id"
    return phi


def fix_a():
    """a -> a, b -> ba on F_2."""
    return Automorphism(["a", "ba"], ["a", "bA"], label="fix_a")


def pingpong_partner():
    """d -> da on F_4, moving the class fixed by tribonacci*id."""
    return Automorphism(["a", "b", "c", "da"], ["a", "b", "c", "dA"], label="psi")


def abelian_pair():
    """phi*id and id*phi on F_6 for phi = tribonacci."""
    phi = tribonacci()
    one = identity(3)
    left = free_product(phi, one)
    left.label = "tribonacci*id"
    right = free_product(one, phi)
    right.label = "id*tribonacci"
    return [left, right]


BUILTINS = {
    "tribonacci": lambda: [tribonacci()],
    "tribonacci_x_id": lambda: [tribonacci_x_id()],
    "fix_a": lambda: [fix_a()],
    "identity3": lambda: [identity(3)],
    "pingpong_pair": lambda: [tribonacci_x_id(), pingpong_partner()],
    "abelian_pair": abelian_pair,
}


def builtin(name):
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}") from None
