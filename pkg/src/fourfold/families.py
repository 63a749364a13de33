"""Spherical families of diffeomorphisms, represented by their invariants.

A :class:`FamilyElement` never models the diffeomorphisms themselves.  It
stores the finite mod-2 map c -> SW(alpha, c) on its host together with the
flags that decide where that map is defined, and a record of how it was
built.  Invariants are restricted to the host's probe line
``base + 2*l*T1``, which is the only line any computation reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from . import blocks
from .errors import (
    DimensionMismatch,
    IncompatibleFamilies,
    InvalidIndex,
    NoStableContraction,
    NotAnIsometry,
    RecursionObstructed,
    UnsupportedManifold,
)
from .lattice import CohClass, PairingTable, shat_membership
from .manifold import ManifoldModel, Probe, SWFunction, adjunction_obstructs, stabilize

SCHEMA = "fourfold.family/1"


@dataclass(frozen=True)
class Record:
    """How a family was built: Base, Suspend, Commutator, Compose or Conjugate."""

    op: str
    params: tuple[tuple[str, object], ...] = ()
    children: tuple["Record", ...] = ()

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    def to_json(self):
        out = {"op": self.op, "params": dict(self.params)}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    @classmethod
    def from_json(cls, d):
        params = tuple(sorted((k, tuple(map(tuple, v)) if isinstance(v, list) else v) for k, v in d.get("params", {}).items()))
        return cls(d["op"], params, tuple(cls.from_json(c) for c in d.get("children", ())))

    def __str__(self):
        args = [str(c) for c in self.children] + [f"{k}={v}" for k, v in self.params if k != "relabel"]
        return f"{self.op}({', '.join(args)})"


@dataclass(frozen=True)
class FamilyElement:
    host: ManifoldModel
    k: int
    support: frozenset
    construction: Record
    torelli: bool = True
    orientation_preserved: bool = True
    one_stably_trivial: bool = True
    q: int | None = None

    @property
    def integer_defined(self) -> bool:
        return self.torelli or self.orientation_preserved

    def __call__(self, c: CohClass) -> int:
        return 1 if c in self.support else 0

    def sorted_support(self) -> list[CohClass]:
        return sorted(self.support)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "host": self.host.to_json(),
            "k": self.k,
            "invariant": [[c.to_json(), 1] for c in self.sorted_support()],
            "flags": {
                "torelli": self.torelli,
                "orientation_preserved": self.orientation_preserved,
                "integer_defined": self.integer_defined,
                "one_stably_trivial": self.one_stably_trivial,
            },
            "q": self.q,
            "construction": self.construction.to_json(),
        }

    @classmethod
    def from_json(cls, d) -> "FamilyElement":
        from .errors import SchemaError

        if d.get("schema") != SCHEMA:
            raise SchemaError(f"expected schema {SCHEMA!r}, got {d.get('schema')!r}")
        try:
            flags = d["flags"]
            return cls(
                host=ManifoldModel.from_json(d["host"]),
                k=int(d["k"]),
                support=frozenset(CohClass.from_json(c) for c, v in d["invariant"] if int(v) % 2),
                construction=Record.from_json(d["construction"]),
                torelli=bool(flags["torelli"]),
                orientation_preserved=bool(flags["orientation_preserved"]),
                one_stably_trivial=bool(flags["one_stably_trivial"]),
                q=d.get("q"),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed family document: {exc}") from exc


@dataclass(frozen=True)
class EvalResult:
    value: int
    integer_defined: bool

    def __int__(self):
        return self.value


def zero_family(host: ManifoldModel, k: int = 0) -> FamilyElement:
    return FamilyElement(host, k, frozenset(), Record("Zero"))


def probe_class(host: ManifoldModel, ell: int) -> CohClass:
    """The class base + 2*ell*T1 on the host's probe line."""
    return host.probe_line().at(ell)


def _line_index(line: Probe, c: CohClass) -> int | None:
    diff = c - line.base
    if diff.is_zero():
        return 0
    if diff.support == (line.torus,) and diff.coeff(line.torus) % 2 == 0:
        return diff.coeff(line.torus) // 2
    return None


def line_values(f: FamilyElement) -> dict[int, int]:
    """Support of f indexed by l along the host probe line."""
    line = f.host.probe_line()
    out = {}
    for c in f.support:
        ell = _line_index(line, c)
        if ell is not None:
            out[ell] = 1
    return dict(sorted(out.items()))


def _check_dimension(host: ManifoldModel, k: int, classes: Iterable[CohClass]) -> None:
    for c in classes:
        if not shat_membership(c, host.table, host.homeo, k):
            raise DimensionMismatch(
                f"{c} has virtual dimension {host.vdim(c)} on {host.name}, expected {-(k + 1)} for k={k}"
            )


def base_family(q: int, host: ManifoldModel) -> FamilyElement:
    """Difference of the stabilised multiplicity-(2q+1) log transform and the identity.

    Values come from SW(X_q) + SW(X_0) mod 2 carried over to the stabilised
    host, restricted to the probe line.
    """
    if not isinstance(q, int) or q < 1:
        raise InvalidIndex(f"base family index must be >= 1, got {q!r}")
    if host.stable is None:
        raise UnsupportedManifold(f"{host.name} is not a stabilised host")
    line = host.probe_line()
    # only classes already on the line can reach it by shifting along the torus
    axis = line.base.without(line.torus)
    core = SWFunction.of(c for c in host.stable.sw.support if c.without(line.torus) == axis)
    diff = core.log_convolve(line.torus, 2 * q + 1) ^ core
    support = frozenset(c for c in diff.support if _line_index(line, c) is not None)
    _check_dimension(host, 0, support | {line.base})
    return FamilyElement(host, 0, support, Record("Base", (("q", q),)), q=q)


def suspend(f: FamilyElement) -> FamilyElement:
    """Transport along s -> s # s0 into the once-more stabilised host."""
    if not f.one_stably_trivial:
        raise NoStableContraction("family is not known to be trivial after one stabilisation")
    host = stabilize(f.host)
    _check_dimension(host, f.k + 1, f.support)
    return replace(f, host=host, k=f.k + 1, construction=Record("Suspend", (), (f.construction,)))


def commutator_step(f: FamilyElement, block: str | None = None) -> FamilyElement:
    """One level of the recursion: Z^p_{r,s+1} family -> Z^{p+1}_{r,s} family.

    The chosen logged block (default: the last one) becomes a suspension
    block.  Of the two terms in the composition law, the first is f carried
    over by suspension and naturality; the second lives on the host where
    that block is plain, and is checked to vanish there by adjunction.
    """
    host = f.host
    if host.layout is None:
        raise RecursionObstructed(f"{host.name} has no block layout to recurse on")
    lay = host.layout
    if block is None:
        if not lay.logged:
            raise RecursionObstructed(f"{host.name} has no logged block left")
        block = lay.logged[-1]
    if block not in lay.logged:
        raise RecursionObstructed(f"block {block} is not logged on {host.name}")
    config = blocks.config_of(host)
    logged = tuple(b for b in lay.logged if b != block)
    target = blocks.build_layout(config, lay.plain, logged, (block,) + lay.suspension)
    other = blocks.build_layout(config, tuple(sorted(lay.plain + (block,), key=blocks._index)), logged, lay.suspension)
    first = conjugate(suspend(f), {}, host=target)
    line = target.probe_line()
    for c in sorted(first.support | {line.base}):
        if not adjunction_obstructs(other, c):
            raise RecursionObstructed(f"adjunction does not force vanishing of {c} on {other.name}")
    return replace(
        first,
        construction=Record("Commutator", (("block", block),), (f.construction,)),
    )


@lru_cache(maxsize=None)
def _alpha(p: int, q: int, r: int, s: int, config: blocks.ZConfig) -> FamilyElement:
    if p == 0:
        return base_family(q, blocks.build_Z(0, r, s, config))
    return commutator_step(_alpha(p - 1, q, r, s + 1, config))


def clear_caches() -> None:
    """Drop memoised hosts and families, e.g. before a cold timing run."""
    _alpha.cache_clear()
    for fn in (blocks._block, blocks._chain, blocks._logged_chain, blocks.build_layout):
        fn.cache_clear()


def alpha(p: int, q: int, r: int = 0, s: int = 0, config: blocks.ZConfig | None = None) -> FamilyElement:
    """The family alpha^p[q] on Z^p_{r,s}."""
    for name, val in (("p", p), ("r", r), ("s", s)):
        if not isinstance(val, int) or val < 0:
            raise InvalidIndex(f"{name} must be a non-negative integer, got {val!r}")
    return _alpha(p, q, r, s, config or blocks.ZConfig())


def compose(f: FamilyElement, g: FamilyElement) -> FamilyElement:
    if f.k != g.k:
        raise IncompatibleFamilies(f"parameter dimensions differ: {f.k} vs {g.k}")
    if f.host is not g.host and f.host != g.host:
        raise IncompatibleFamilies(f"hosts differ: {f.host.name} vs {g.host.name}")
    return FamilyElement(
        f.host,
        f.k,
        f.support ^ g.support,
        Record("Compose", (), (f.construction, g.construction)),
        torelli=f.torelli and g.torelli,
        orientation_preserved=f.orientation_preserved and g.orientation_preserved,
        one_stably_trivial=f.one_stably_trivial and g.one_stably_trivial,
    )


def _pairing_entries(table: PairingTable, mapping: Mapping[str, str] | None = None) -> dict:
    m = mapping or {}
    out = {}
    for a in table.ids:
        v = table.pair_gen(a, a)
        if v:
            out[(m.get(a, a),) * 2] = v
    for (a, b), v in table.values.items():
        if a != b and v:
            x, y = m.get(a, a), m.get(b, b)
            out[(x, y) if x <= y else (y, x)] = v
    return out


def conjugate(f: FamilyElement, relabel: Mapping[str, str], host: ManifoldModel | None = None) -> FamilyElement:
    """Naturality: push f forward along a pairing-preserving relabelling.

    Ids absent from ``relabel`` map to themselves.  The target defaults to
    f's own host (a self-map).
    """
    target = host if host is not None else f.host
    src = f.host.table
    mapping = {a: relabel.get(a, a) for a in src.ids}
    if len(set(mapping.values())) != len(mapping):
        raise NotAnIsometry("relabelling is not injective")
    if set(mapping.values()) != set(target.table.ids):
        missing = sorted(set(target.table.ids) ^ set(mapping.values()))
        raise NotAnIsometry(f"relabelling is not a bijection onto the target generators: {missing[:5]}")
    if f.host.homeo != target.homeo:
        raise NotAnIsometry(f"homeomorphism types differ: {f.host.homeo} vs {target.homeo}")
    if target is not f.host or any(k != v for k, v in mapping.items()):
        if _pairing_entries(src, mapping) != _pairing_entries(target.table):
            raise NotAnIsometry("relabelling does not preserve the pairing")
    nontrivial = {k: v for k, v in mapping.items() if k != v}
    return replace(
        f,
        host=target,
        support=frozenset(c.relabel(mapping) for c in f.support),
        construction=Record("Conjugate", (("relabel", tuple(sorted(nontrivial.items()))),), (f.construction,)),
    )


def evaluate(f: FamilyElement, c: CohClass) -> EvalResult:
    if not shat_membership(c, f.host.table, f.host.homeo, f.k):
        raise DimensionMismatch(
            f"{c} has virtual dimension {f.host.vdim(c)}, not {-(f.k + 1)} as required for k={f.k}"
        )
    return EvalResult(f(c), f.integer_defined)


def vanishing_threshold(f: FamilyElement) -> int:
    """Smallest Q with SW(f, base + 2lT1) = 0 for all |l| > Q."""
    vals = line_values(f)
    return max((abs(ell) for ell in vals), default=0)


def q_sequence(n: int, strategy: str = "index", threshold: Callable[[int], int] | None = None) -> list[int]:
    """Indices q_1..q_n for a certificate.

    ``index`` is q_i = i.  ``as_printed`` applies q_{i+1} = 1 + min(q_1, Q(q_i))
    literally and ``max`` the reading with max; ``threshold`` gives Q(q).
    """
    if n <= 0:
        return []
    if strategy == "index":
        return list(range(1, n + 1))
    if threshold is None:
        threshold = lambda q: q  # noqa: E731
    pick = {"as_printed": min, "max": max}.get(strategy)
    if pick is None:
        raise ValueError(f"unknown q strategy {strategy!r}")
    qs = [1]
    while len(qs) < n:
        qs.append(1 + pick(qs[0], threshold(qs[-1])))
    return qs


@dataclass(frozen=True)
class IndependenceCertificate:
    families: tuple[str, ...]
    probes: tuple[CohClass, ...]
    ells: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]
    verdict: bool
    rank: int
    integer_defined: bool

    def to_json(self) -> dict:
        return {
            "families": list(self.families),
            "probes": [c.to_json() for c in self.probes],
            "ells": list(self.ells),
            "matrix": [list(r) for r in self.matrix],
            "verdict": self.verdict,
            "rank": self.rank,
            "integer_defined": self.integer_defined,
        }

    def table(self) -> str:
        width = max([len(n) for n in self.families] + [6])
        head = " " * width + " | " + " ".join(f"{e:>3}" for e in self.ells)
        lines = [head, "-" * len(head)]
        for name, row in zip(self.families, self.matrix):
            lines.append(f"{name:<{width}} | " + " ".join(f"{v:>3}" for v in row))
        lines.append(f"verdict: {'unitriangular' if self.verdict else 'not unitriangular'}, rank {self.rank}")
        return "\n".join(lines)


def gf2_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over the two-element field by elimination on integer bitmasks."""
    pivots: dict[int, int] = {}
    for row in rows:
        v = 0
        for bit in row:
            v = (v << 1) | (bit & 1)
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
    return len(pivots)


def is_lower_unitriangular(matrix: Sequence[Sequence[int]]) -> bool:
    n = len(matrix)
    if n == 0 or any(len(r) != n for r in matrix):
        return False
    diagonal = all(matrix[i][i] == 1 for i in range(n))
    upper = all(matrix[i][j] == 0 for i in range(n) for j in range(i + 1, n))
    return diagonal and upper


def independence_certificate(
    families: Sequence[FamilyElement],
    probe: Callable[[int], CohClass] | None = None,
    ells: Sequence[int] | None = None,
    names: Sequence[str] | None = None,
) -> IndependenceCertificate:
    """Evaluate family i at probe(l_j); l_j defaults to the j-th family's index q."""
    families = list(families)
    if families:
        h0, k0 = families[0].host, families[0].k
        for g in families[1:]:
            if g.k != k0 or (g.host is not h0 and g.host != h0):
                raise IncompatibleFamilies("certificate families must share host and parameter dimension")
    if ells is None:
        ells = [g.q if g.q is not None else i + 1 for i, g in enumerate(families)]
    if probe is None:
        probe = (lambda ell: probe_class(families[0].host, ell)) if families else (lambda ell: CohClass.zero())
    probes = [probe(e) for e in ells]
    matrix = tuple(tuple(evaluate(g, c).value for c in probes) for g in families)
    if names is None:
        names = [str(g.construction) for g in families]
    return IndependenceCertificate(
        tuple(names),
        tuple(probes),
        tuple(ells),
        matrix,
        is_lower_unitriangular(matrix),
        gf2_rank(matrix),
        all(g.integer_defined for g in families),
    )


@dataclass(frozen=True)
class DerivedInvariant:
    mode: str
    description: str
    values: Mapping[CohClass, int] = field(default_factory=dict)

    def to_json(self):
        return {
            "mode": self.mode,
            "description": self.description,
            "values": [[c.to_json(), v] for c, v in sorted(self.values.items())],
        }


_DESCRIPTIONS = {
    "embedding": "family of embedded spheres obtained by parameterised surgery",
    "psc": "family of positive scalar curvature metrics on the surgered manifold",
}


def derived_invariant(f: FamilyElement, mode: str) -> DerivedInvariant:
    """The embedding and PSC invariants coincide with the family invariant."""
    if mode not in _DESCRIPTIONS:
        raise ValueError(f"mode must be 'embedding' or 'psc', got {mode!r}")
    return DerivedInvariant(mode, _DESCRIPTIONS[mode], {c: 1 for c in f.sorted_support()})


def validate_family(f: FamilyElement) -> list[str]:
    out = []
    if f.host.homeo.b_plus <= f.k + 2:
        out.append(f"host b+ = {f.host.homeo.b_plus} is not > k + 2 = {f.k + 2}")
    for c in f.sorted_support():
        try:
            if not shat_membership(c, f.host.table, f.host.homeo, f.k):
                out.append(f"{c} is outside the k={f.k} evaluation set")
        except Exception as exc:
            out.append(f"{c}: {exc}")
    return out
