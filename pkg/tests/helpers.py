"""Random construction trees and models shared by several test modules."""

import random
from fractions import Fraction

from fourfold import manifold as M
from fourfold import tree as T
from fourfold.errors import FourfoldError

PIECES = ["S2xS2", "CP2", "CP2bar", "S4"]


def random_tree(rng: random.Random, depth: int) -> T.Tree:
    if depth <= 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.4:
            return T.elliptic(rng.choice([1, 2, 3, 4]))
        if roll < 0.55:
            return T.park(rng.randint(1, 3))
        return T.standard(rng.choice(PIECES))
    op = rng.choice(["csum", "csum", "fsum", "logt", "stab"])
    if op == "csum":
        return T.csum(*(random_tree(rng, depth - 1) for _ in range(rng.randint(2, 3))))
    if op == "fsum":
        return T.fsum(random_tree(rng, depth - 1), random_tree(rng, depth - 1))
    if op == "logt":
        return T.logt(random_tree(rng, depth - 1), "1", rng.choice([1, 3, 5]))
    return T.csum(random_tree(rng, depth - 1), T.standard("S2xS2"))


def random_symplectic(rng: random.Random, depth: int) -> M.ManifoldModel:
    """Random model built only from operations that keep a symplectic form."""
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.5:
            return M.make_elliptic(2)
        if roll < 0.7:
            return M.make_elliptic(4)
        return M.make_park_block(rng.randint(1, 3))
    op = rng.choice(["fsum", "fsum", "logt", "blowup"])
    m = random_symplectic(rng, depth - 1)
    if op == "fsum":
        n = random_symplectic(rng, depth - 1)
        free_m = [x.label for x in m.nuclei if not x.consumed]
        free_n = [x.label for x in n.nuclei if not x.consumed]
        if free_m and free_n:
            return M.fiber_sum(m, n, rng.choice(free_m), rng.choice(free_n))
        return m
    if op == "logt":
        free = [x.label for x in m.nuclei if not x.consumed]
        if free:
            try:
                return M.log_transform(m, rng.choice(free), rng.choice([1, 3, 5]))
            except FourfoldError:
                return m
        return m
    return M.connected_sum(m, M.make_standard("CP2bar"))


# -- data-space toy -----------------------------------------------------------


def random_point(rng: random.Random, n: int, spread: int = 12):
    return tuple(rng.randint(-spread, spread) for _ in range(n))


def random_wall(rng: random.Random, n: int, codim: int):
    from fourfold.dataspace import Wall, rank

    while True:
        rows = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(codim)]
        if rank(rows) == codim:
            offsets = tuple(Fraction(rng.randint(-40, 40), rng.choice([3, 7, 11])) for _ in range(codim))
            signs = tuple(rng.choice([1, -1]) for _ in range(codim))
            return Wall(tuple(rows), offsets, signs)


def random_filling(rng: random.Random, n: int, dim: int, terms: int = 3):
    """A random dim-chain; its boundary is a random (dim - 1)-cycle."""
    from fourfold.dataspace import Chain

    out = Chain.empty(dim)
    for _ in range(terms):
        verts = [random_point(rng, n) for _ in range(dim + 1)]
        out = out + Chain.simplex(*verts, weight=rng.choice([1, -1, 2]))
    return out
