"""Finite-dimensional toy of the perturbation data space.

Walls are affine subspaces ``{x : A x = b}`` of Q^n and chains are integer
combinations of affine simplices.  A family invariant is computed by filling
a cycle with a cone and counting signed crossings of the cone with a wall.
Everything is exact over the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import NotACycle, NotTransverse

# coordinates are ints where integral and Fractions otherwise; both hash and
# compare consistently, and ints keep the common case fast
Point = tuple[int | Fraction, ...]


def _q(x) -> int | Fraction:
    if isinstance(x, bool):
        raise ValueError("booleans are not coordinates")
    if isinstance(x, int):
        return x
    f = x if isinstance(x, Fraction) else Fraction(str(x)) if isinstance(x, str) else Fraction(x)
    return f.numerator if f.denominator == 1 else f


def point(coords: Iterable) -> Point:
    return tuple(_q(c) for c in coords)


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Gauss-Jordan on [rows | rhs].

    Returns ``None`` if inconsistent, ``("unique", x)`` or ``("family", None)``.
    """
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = Fraction(1) / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(all(v == 0 for v in row[:-1]) and row[-1] != 0 for row in aug):
        return None
    if len(pivots) < n:
        return ("family", None)
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][-1]
    return ("unique", x)


def det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(map(_q, r)) for r in m]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            out = -out
        out *= a[c][c]
        for i in range(c + 1, n):
            f = Fraction(a[i][c]) / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    if not m:
        return 0
    a = [list(map(_q, r)) for r in m]
    r = 0
    for c in range(len(a[0])):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, len(a)):
            f = Fraction(a[i][c]) / a[r][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


@dataclass(frozen=True)
class DataSpaceModel:
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("data space dimension must be >= 1")


@dataclass(frozen=True)
class Wall:
    """Affine subspace {A x = b} co-oriented by the ordered signed functionals."""

    A: tuple[Point, ...]
    b: Point
    signs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(point(r) for r in self.A))
        object.__setattr__(self, "b", point(self.b))
        if not self.signs:
            object.__setattr__(self, "signs", (1,) * len(self.A))
        if len(self.b) != len(self.A) or len(self.signs) != len(self.A):
            raise ValueError("wall needs one offset and one sign per functional")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("co-orientation signs must be +1 or -1")
        if len({len(r) for r in self.A}) > 1:
            raise ValueError("functionals have different lengths")
        if rank(self.A) != len(self.A):
            raise ValueError("wall functionals are linearly dependent")

    @property
    def codim(self) -> int:
        return len(self.A)

    @property
    def ambient(self) -> int:
        return len(self.A[0]) if self.A else 0

    def value(self, x: Point) -> tuple[Fraction, ...]:
        return tuple(sum(a * v for a, v in zip(row, x)) - c for row, c in zip(self.A, self.b))

    @classmethod
    def hyperplane(cls, normal, offset, sign: int = 1) -> "Wall":
        return cls((point(normal),), (offset,), (sign,))

    def to_json(self):
        return {
            "functionals": [[str(a) for a in row] + [str(c)] for row, c in zip(self.A, self.b)],
            "signs": list(self.signs),
        }

    @classmethod
    def from_json(cls, d) -> "Wall":
        rows = [point(f) for f in d["functionals"]]
        return cls(tuple(r[:-1] for r in rows), tuple(r[-1] for r in rows), tuple(d.get("signs", ())))


def _canonical(vertices: Sequence[Point]) -> tuple[int, tuple[Point, ...]] | None:
    """Sort vertices, returning the permutation sign; None if a vertex repeats."""
    if len(set(vertices)) != len(vertices):
        return None
    idx = sorted(range(len(vertices)), key=lambda i: vertices[i])
    sign = 1
    seen = [False] * len(idx)
    for i in range(len(idx)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = idx[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign, tuple(vertices[i] for i in idx)


@dataclass(frozen=True)
class Chain:
    """Integer combination of oriented affine simplices of one dimension.

    Simplices are stored with sorted vertices; reordering is absorbed into
    the weight sign.  The (-1)-chain spanned by the empty simplex is the
    augmentation, so a 0-chain is a cycle iff its weights sum to zero.
    """

    dim: int
    terms: tuple[tuple[tuple[Point, ...], int], ...] = ()

    @classmethod
    def of(cls, dim: int, simplices: Iterable[tuple[Sequence, int]]) -> "Chain":
        acc: dict[tuple[Point, ...], int] = {}
        for verts, w in simplices:
            verts = tuple(point(v) for v in verts)
            if len(verts) != dim + 1:
                raise ValueError(f"a {dim}-simplex needs {dim + 1} vertices, got {len(verts)}")
            canon = _canonical(verts)
            if canon is None or w == 0:
                continue
            sign, key = canon
            acc[key] = acc.get(key, 0) + sign * int(w)
        return cls(dim, tuple(sorted((k, v) for k, v in acc.items() if v)))

    @classmethod
    def simplex(cls, *vertices, weight: int = 1) -> "Chain":
        return cls.of(len(vertices) - 1, [(vertices, weight)])

    @classmethod
    def empty(cls, dim: int) -> "Chain":
        return cls(dim)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Chain") -> "Chain":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.dim != other.dim:
            raise ValueError(f"cannot add chains of dimensions {self.dim} and {other.dim}")
        return Chain.of(self.dim, list(self.terms) + list(other.terms))

    def __neg__(self) -> "Chain":
        return Chain(self.dim, tuple((k, -w) for k, w in self.terms))

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, k: int) -> "Chain":
        return Chain.of(self.dim, [(s, k * w) for s, w in self.terms])

    __rmul__ = __mul__

    def boundary(self) -> "Chain":
        if self.dim < 0:
            return Chain(self.dim - 1)
        out = []
        for verts, w in self.terms:
            for i in range(len(verts)):
                out.append((verts[:i] + verts[i + 1:], (-1) ** i * w))
        return Chain.of(self.dim - 1, out)

    def is_cycle(self) -> bool:
        return self.boundary().is_zero()

    def cone(self, apex: Sequence) -> "Chain":
        apex = point(apex)
        return Chain.of(self.dim + 1, [((apex,) + verts, w) for verts, w in self.terms])

    def to_json(self):
        return {
            "dim": self.dim,
            "simplices": [{"weight": w, "vertices": [[str(x) for x in v] for v in verts]} for verts, w in self.terms],
        }

    @classmethod
    def from_json(cls, d) -> "Chain":
        sims = []
        for s in d["simplices"]:
            w = s.get("weight", s.get("weights", 1))
            sims.append((s["vertices"], int(w)))
        return cls.of(int(d["dim"]), sims)


def _barycentric(vertices: Sequence[Point], wall: Wall):
    rows = [[sum(a * x for a, x in zip(row, v)) for v in vertices] for row in wall.A]
    rows.append([Fraction(1)] * len(vertices))
    return _solve(rows, list(wall.b) + [Fraction(1)])


def meets(vertices: Sequence[Point], wall: Wall) -> bool:
    """Does the closed simplex meet the wall?"""
    sol = _barycentric(vertices, wall)
    if sol is None:
        return False
    kind, mu = sol
    if kind == "unique":
        return all(m >= 0 for m in mu)
    # a positive-dimensional slice of a simplex reaches its boundary
    return any(meets(face, wall) for face in combinations(vertices, len(vertices) - 1))


def simplex_crossing(vertices: Sequence[Point], wall: Wall) -> int:
    """Signed crossing of one oriented j-simplex with a codimension-j wall.

    With a unique barycentric solution the affine hull meets the wall in one
    point, so a face meets the wall iff that point has a zero coordinate.
    Otherwise any contact with the wall reaches the boundary.
    """
    j = len(vertices) - 1
    if j != wall.codim:
        raise ValueError(f"{j}-simplex cannot be counted against a codimension-{wall.codim} wall")
    sol = _barycentric(vertices, wall)
    if sol is None:
        return 0
    kind, mu = sol
    if kind != "unique":
        if meets(vertices, wall):
            raise NotTransverse(f"the simplex {vertices} meets the wall in more than a point")
        return 0
    if any(m < 0 for m in mu):
        return 0
    if any(m == 0 for m in mu):
        raise NotTransverse(f"the simplex {vertices} touches the wall on its boundary")
    v0 = vertices[0]
    ad = [
        [s * sum(a * (v[k] - v0[k]) for k, a in enumerate(row)) for v in vertices[1:]]
        for row, s in zip(wall.A, wall.signs)
    ]
    d = det(ad) if j else Fraction(1)
    return 1 if d > 0 else -1


def signed_crossing_count(chain: Chain, wall: Wall) -> int:
    if chain.dim != wall.codim:
        raise ValueError(f"{chain.dim}-chain cannot be counted against a codimension-{wall.codim} wall")
    return sum(w * simplex_crossing(verts, wall) for verts, w in chain.terms)


def bounding_chain(cycle: Chain, basepoint: Sequence | None = None, dimension: int | None = None) -> Chain:
    """Cone over the cycle from the basepoint (the origin by default)."""
    if not cycle.is_cycle():
        raise NotACycle(f"{cycle.dim}-chain has nonzero boundary")
    if cycle.is_zero():
        return Chain(cycle.dim + 1)
    if basepoint is None:
        n = dimension if dimension is not None else len(cycle.terms[0][0][0])
        basepoint = (0,) * n
    out = cycle.cone(basepoint)
    assert out.boundary() == cycle, "cone boundary mismatch"
    return out


def invariant_of_cycle(cycle: Chain, wall: Wall, basepoint: Sequence | None = None, max_tries: int = 64) -> int:
    """Crossings of a filling of the cycle with a wall of codimension dim + 1.

    If the cone is not transverse the basepoint's last coordinate is
    increased by one and the cone rebuilt.  That never helps when the wall
    ignores the last coordinate, so after half the tries the basepoint moves
    along ``basepoint + (s, s^2, ..., s^n)`` with s = 1, 1/2, 1/3, ...
    instead; each bad position solves a polynomial of degree <= n in s, so
    only finitely many of those tries can fail.
    """
    if wall.codim != cycle.dim + 1:
        raise ValueError(f"{cycle.dim}-cycle needs a codimension-{cycle.dim + 1} wall")
    if basepoint is None:
        basepoint = (0,) * wall.ambient
    start = point(basepoint)
    base = start
    for t in range(max_tries):
        beta = bounding_chain(cycle, base)
        try:
            return signed_crossing_count(beta, wall)
        except NotTransverse:
            bumps = t + 1
            if bumps < max_tries // 2:
                base = start[:-1] + (start[-1] + bumps,)
            else:
                s = Fraction(1, bumps - max_tries // 2 + 1)
                base = tuple(x + s ** (i + 1) for i, x in enumerate(start))
    raise NotTransverse(f"no transverse cone found after {max_tries} basepoint shifts")


def standard_crossing() -> tuple[Chain, Wall]:
    """The stabilising path s -> s in [0, 1] against the wall {s = 1/2}."""
    return Chain.simplex((0,), (1,)), Wall.hyperplane((1,), Fraction(1, 2))


@dataclass(frozen=True)
class Scenario:
    model: DataSpaceModel
    walls: tuple[Wall, ...]
    chains: tuple[Chain, ...]

    @classmethod
    def from_json(cls, d: Mapping) -> "Scenario":
        from .errors import SchemaError

        try:
            model = DataSpaceModel(int(d["dimension"]))
            walls = tuple(Wall.from_json(w) for w in d.get("walls", ()))
            chains = tuple(Chain.from_json(c) for c in d.get("chains", ()))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed scenario: {exc}") from exc
        for w in walls:
            if w.ambient != model.dimension:
                raise SchemaError(f"wall lives in dimension {w.ambient}, scenario has {model.dimension}")
        return cls(model, walls, chains)

    def evaluate(self) -> list[dict]:
        """Count every chain against every wall of matching codimension."""
        rows = []
        for ci, c in enumerate(self.chains):
            for wi, w in enumerate(self.walls):
                row = {"chain": ci, "wall": wi, "chain_dim": c.dim, "codim": w.codim}
                try:
                    if w.codim == c.dim:
                        row.update(kind="crossing", value=signed_crossing_count(c, w))
                    elif w.codim == c.dim + 1 and c.is_cycle():
                        row.update(kind="cycle-invariant", value=invariant_of_cycle(c, w))
                    else:
                        continue
                except NotTransverse as exc:
                    row.update(kind="error", value=None, error=f"NotTransverse: {exc}")
                rows.append(row)
        return rows
