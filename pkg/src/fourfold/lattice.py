"""Exact arithmetic on tracked sublattices of H^2.

A manifold is never given a full basis of H^2.  Only the named classes
that some computation touches are tracked (canonical classes, nucleus
tori and sections, exceptional spheres, hyperbolic pairs); everything
else is summarised by the global rank, signature and parity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidHomeoType, NonIntegralDimension, UnknownGenerator

CANONICAL = "canonical"
TORUS = "torus"
SECTION = "section"
EXCEPTIONAL = "exceptional"
HYPERBOLIC_A = "hyperbolic-A"
HYPERBOLIC_B = "hyperbolic-B"
GENERIC = "generic"

KINDS = (CANONICAL, TORUS, SECTION, EXCEPTIONAL, HYPERBOLIC_A, HYPERBOLIC_B, GENERIC)

DEFAULT_SELF_PAIRING = {
    TORUS: 0,
    SECTION: -2,
    EXCEPTIONAL: -1,
    HYPERBOLIC_A: 0,
    HYPERBOLIC_B: 0,
    CANONICAL: 0,
    GENERIC: 0,
}

DEFAULT_R_STAR = 200


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True, order=True)
class CohClass:
    """Finite integer combination of generator symbols.

    ``terms`` is kept sorted by generator id with zero coefficients removed,
    so equal classes compare and hash equal.
    """

    terms: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        merged: dict[str, int] = {}
        for gid, coeff in self.terms:
            merged[gid] = merged.get(gid, 0) + int(coeff)
        norm = tuple(sorted((g, c) for g, c in merged.items() if c))
        object.__setattr__(self, "terms", norm)

    @classmethod
    def of(cls, mapping: Mapping[str, int] | None = None, **coeffs: int) -> "CohClass":
        items = dict(mapping or {})
        for gid, c in coeffs.items():
            items[gid] = items.get(gid, 0) + c
        return cls(tuple(items.items()))

    @classmethod
    def gen(cls, gid: str, coeff: int = 1) -> "CohClass":
        return cls(((gid, coeff),))

    @classmethod
    def zero(cls) -> "CohClass":
        return cls()

    def shift(self, gid: str, k: int) -> "CohClass":
        """self + k*gid, without the general normalisation pass."""
        d = dict(self.terms)
        v = d.get(gid, 0) + k
        if v:
            d[gid] = v
        else:
            d.pop(gid, None)
        out = object.__new__(CohClass)
        object.__setattr__(out, "terms", tuple(sorted(d.items())))
        return out

    def without(self, gid: str) -> "CohClass":
        return self.shift(gid, -self.coeff(gid))

    def coeff(self, gid: str) -> int:
        for g, c in self.terms:
            if g == gid:
                return c
        return 0

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def as_dict(self) -> dict[str, int]:
        return dict(self.terms)

    def __add__(self, other: "CohClass") -> "CohClass":
        if not isinstance(other, CohClass):
            return NotImplemented
        return CohClass(self.terms + other.terms)

    def __neg__(self) -> "CohClass":
        return CohClass(tuple((g, -c) for g, c in self.terms))

    def __sub__(self, other: "CohClass") -> "CohClass":
        if not isinstance(other, CohClass):
            return NotImplemented
        return self + (-other)

    def __mul__(self, k: int) -> "CohClass":
        if not isinstance(k, int):
            return NotImplemented
        return CohClass(tuple((g, k * c) for g, c in self.terms))

    __rmul__ = __mul__

    def relabel(self, mapping: Mapping[str, str]) -> "CohClass":
        return CohClass(tuple((mapping.get(g, g), c) for g, c in self.terms))

    def to_json(self) -> dict[str, int]:
        return dict(self.terms)

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "CohClass":
        return cls(tuple((str(g), int(c)) for g, c in obj.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for g, c in self.terms:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = g if mag == 1 else f"{mag}*{g}"
            out.append(sign + body)
        text = "".join(out)
        return text[1:] if text.startswith("+") else text


@dataclass(frozen=True)
class Generator:
    id: str
    kind: str = GENERIC
    origin: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class PairingTable:
    """Symmetric integer pairing on a finite set of generators.

    Unspecified off-diagonal pairs are 0; unspecified diagonal entries fall
    back to the generator kind's default self-pairing.
    """

    generators: Mapping[str, Generator] = field(default_factory=dict)
    values: Mapping[tuple[str, str], int] = field(default_factory=dict)

    @classmethod
    def build(cls, generators: Iterable[Generator], pairings: Mapping[tuple[str, str], int] | None = None):
        gens = {}
        for g in generators:
            if g.id in gens:
                raise ValueError(f"duplicate generator id {g.id!r}")
            gens[g.id] = g
        vals: dict[tuple[str, str], int] = {}
        for (a, b), v in (pairings or {}).items():
            for x in (a, b):
                if x not in gens:
                    raise UnknownGenerator(x)
            vals[_key(a, b)] = int(v)
        return cls(dict(sorted(gens.items())), vals)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.generators)

    def __contains__(self, gid: str) -> bool:
        return gid in self.generators

    def kind(self, gid: str) -> str:
        try:
            return self.generators[gid].kind
        except KeyError:
            raise UnknownGenerator(gid) from None

    def pair_gen(self, a: str, b: str) -> int:
        if a not in self.generators:
            raise UnknownGenerator(a)
        if b not in self.generators:
            raise UnknownGenerator(b)
        k = _key(a, b)
        if k in self.values:
            return self.values[k]
        if a == b:
            return DEFAULT_SELF_PAIRING[self.generators[a].kind]
        return 0

    def pair(self, c: CohClass, d: CohClass) -> int:
        total = 0
        for g, x in c.terms:
            for h, y in d.terms:
                total += x * y * self.pair_gen(g, h)
        return total

    def pair_with(self, c: CohClass, gid: str) -> int:
        """c . gid for a single generator."""
        return sum(x * self.pair_gen(g, gid) for g, x in c.terms)

    def square(self, c: CohClass) -> int:
        return self.pair(c, c)

    def with_generators(self, generators: Iterable[Generator] = (), pairings=None) -> "PairingTable":
        return PairingTable.build(
            list(self.generators.values()) + list(generators),
            {**self.values, **(pairings or {})},
        )

    def set_pairings(self, pairings: Mapping[tuple[str, str], int]) -> "PairingTable":
        return PairingTable.build(self.generators.values(), {**self.values, **pairings})

    def merge(self, other: "PairingTable") -> "PairingTable":
        clash = set(self.generators) & set(other.generators)
        if clash:
            raise ValueError(f"generator ids collide: {sorted(clash)}")
        return PairingTable.build(
            list(self.generators.values()) + list(other.generators.values()),
            {**self.values, **other.values},
        )

    def drop(self, ids: Iterable[str]) -> "PairingTable":
        gone = set(ids)
        return PairingTable.build(
            [g for g in self.generators.values() if g.id not in gone],
            {k: v for k, v in self.values.items() if k[0] not in gone and k[1] not in gone},
        )

    def rename(self, mapping: Mapping[str, str]) -> "PairingTable":
        gens = [Generator(mapping.get(g.id, g.id), g.kind, g.origin) for g in self.generators.values()]
        vals = {(mapping.get(a, a), mapping.get(b, b)): v for (a, b), v in self.values.items()}
        return PairingTable.build(gens, vals)

    def to_json(self) -> dict:
        return {
            "generators": [
                {"id": g.id, "kind": g.kind, "origin": g.origin, "self": self.pair_gen(g.id, g.id)}
                for g in self.generators.values()
            ],
            "pairing": [[a, b, v] for (a, b), v in sorted(self.values.items()) if a != b and v != 0],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "PairingTable":
        gens = [Generator(d["id"], d["kind"], d.get("origin", "")) for d in obj["generators"]]
        vals = {}
        for d in obj["generators"]:
            if d["self"] != DEFAULT_SELF_PAIRING[d["kind"]]:
                vals[(d["id"], d["id"])] = d["self"]
        for a, b, v in obj.get("pairing", []):
            vals[(a, b)] = v
        return cls.build(gens, vals)

    def __eq__(self, other):
        if not isinstance(other, PairingTable):
            return NotImplemented
        return self.to_json() == other.to_json()

    __hash__ = None


def pair(c: CohClass, d: CohClass, table: PairingTable) -> int:
    return table.pair(c, d)


def square(c: CohClass, table: PairingTable) -> int:
    return table.square(c)


def is_characteristic(c: CohClass, table: PairingTable, generators: Iterable[str] | None = None) -> bool:
    """c.g == g.g (mod 2) for every tracked generator g."""
    ids = table.ids if generators is None else tuple(generators)
    return all((table.pair(c, CohClass.gen(g)) - table.pair_gen(g, g)) % 2 == 0 for g in ids)


@dataclass(frozen=True)
class HomeoType:
    """Rank, signature and parity of a closed simply connected 4-manifold."""

    b2: int
    sigma: int
    parity: str = "odd"

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise InvalidHomeoType(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if self.b2 < 0 or abs(self.sigma) > self.b2:
            raise InvalidHomeoType(f"need |sigma| <= b2, got b2={self.b2}, sigma={self.sigma}")
        if (self.b2 - self.sigma) % 2:
            raise InvalidHomeoType("sigma and b2 must have the same parity")
        if self.parity == "even" and self.sigma % 8:
            raise InvalidHomeoType("even forms have signature divisible by 8")
        if self.b2 == 0 and self.parity != "even":
            raise InvalidHomeoType("the empty form is even")

    @property
    def b_plus(self) -> int:
        return (self.b2 + self.sigma) // 2

    @property
    def b_minus(self) -> int:
        return (self.b2 - self.sigma) // 2

    @property
    def euler(self) -> int:
        return 2 + self.b2

    def connected_sum(self, other: "HomeoType") -> "HomeoType":
        parity = "odd" if "odd" in (self.parity, other.parity) else "even"
        return HomeoType(self.b2 + other.b2, self.sigma + other.sigma, parity)

    def fiber_sum(self, other: "HomeoType") -> "HomeoType":
        parity = "even" if self.parity == other.parity == "even" else "odd"
        return HomeoType(self.b2 + other.b2 + 2, self.sigma + other.sigma, parity)

    def as_tuple(self) -> tuple[int, int, str]:
        return (self.b2, self.sigma, self.parity)

    def to_json(self) -> dict:
        return {"b2": self.b2, "sigma": self.sigma, "parity": self.parity}

    @classmethod
    def from_json(cls, obj) -> "HomeoType":
        return cls(int(obj["b2"]), int(obj["sigma"]), obj["parity"])

    def __str__(self):
        return f"({self.b2}, {self.sigma}, {self.parity})"


def virtual_dimension(c1sq: int, h: HomeoType) -> int:
    """(c1^2 - sigma)/4 - (1 + b+), with b1 = 0."""
    num = c1sq - h.sigma
    if num % 4:
        raise NonIntegralDimension(f"c1^2 - sigma = {num} is not divisible by 4")
    return num // 4 - (1 + h.b_plus)


def family_virtual_dimension(c1sq: int, h: HomeoType, k: int) -> int:
    if k < 0:
        raise ValueError("parameter dimension must be non-negative")
    return virtual_dimension(c1sq, h) + k


def shat_membership(c: CohClass, table: PairingTable, h: HomeoType, k: int) -> bool:
    """True iff c has virtual dimension -(k+1), i.e. it is seen by k-parameter families."""
    return virtual_dimension(table.square(c), h) == -(k + 1)


@dataclass(frozen=True)
class GateResult:
    passed: bool
    reasons: tuple[str, ...] = ()

    @property
    def reason(self) -> str | None:
        return self.reasons[0] if self.reasons else None

    def __bool__(self):
        return self.passed


def realizability_gate(h: HomeoType, r_star: int = DEFAULT_R_STAR) -> GateResult:
    """Sufficient conditions for a symplectic realisation containing a nucleus.

    ``r_star`` is a rank threshold whose true value is not known; the default
    is arbitrary.  All failing clauses are reported, in clause order.
    """
    reasons = []
    if not h.b2 > r_star:
        reasons.append(f"rank {h.b2} <= r_star {r_star}")
    if Fraction(abs(h.sigma)) > Fraction(3, 13) * h.b2:
        reasons.append(f"|sigma| = {abs(h.sigma)} > (3/13)*{h.b2}")
    if h.b_plus % 2 == 0:
        reasons.append(f"b+ = {h.b_plus} is even")
    if h.parity == "even" and h.sigma % 16:
        reasons.append(f"even form with sigma = {h.sigma} not divisible by 16")
    return GateResult(not reasons, tuple(reasons))
