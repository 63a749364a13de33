"""Manifold models and the surgery operations acting on them.

A :class:`ManifoldModel` is homeomorphism-type data plus a tracked
sublattice and a finite mod-2 basic-class function.  Every operation
returns a new model; nothing is mutated in place.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from . import tree as T
from .errors import (
    FourfoldError,
    NonIntegralDimension,
    NucleusConsumed,
    PositivityRequired,
    SchemaError,
    SymplecticRequired,
    UnknownGenerator,
    UnknownNucleus,
    UnsupportedManifold,
    UnsupportedMultiplicity,
)
from .lattice import (
    CANONICAL,
    EXCEPTIONAL,
    GENERIC,
    HYPERBOLIC_A,
    HYPERBOLIC_B,
    SECTION,
    TORUS,
    CohClass,
    Generator,
    HomeoType,
    PairingTable,
    is_characteristic,
    virtual_dimension,
)

SCHEMA = "fourfold.model/1"

INTACT = "intact"
LOGGED = "log"


class AxiomViolation(FourfoldError):
    """A precondition expressed as a pairing axiom does not hold."""


@dataclass(frozen=True)
class SWFunction:
    """Finite mod-2 function on characteristic classes.

    Only classes with value 1 are stored.  ``lift`` optionally carries
    integer values (including even ones) with ``lift_source`` naming where
    they came from.
    """

    support: frozenset = frozenset()
    lift: tuple[tuple[CohClass, int], ...] | None = None
    lift_source: str = ""

    @classmethod
    def of(cls, classes: Iterable[CohClass]) -> "SWFunction":
        return cls(frozenset(classes))

    @classmethod
    def from_counts(cls, counts: Mapping[CohClass, int]) -> "SWFunction":
        return cls(frozenset(c for c, n in counts.items() if n % 2))

    def __call__(self, c: CohClass) -> int:
        return 1 if c in self.support else 0

    def __len__(self) -> int:
        return len(self.support)

    def __iter__(self):
        return iter(self.sorted())

    def sorted(self) -> list[CohClass]:
        return sorted(self.support)

    def integer(self, c: CohClass) -> int | None:
        if self.lift is None:
            return None
        return dict(self.lift).get(c, 0)

    def __xor__(self, other: "SWFunction") -> "SWFunction":
        return SWFunction(self.support ^ other.support)

    def log_convolve(self, torus: str, p: int) -> "SWFunction":
        """Multiply by the step series sum_{i<p} t^(p-1-2i), mod 2."""
        counts: Counter = Counter()
        for c in self.support:
            for i in range(p):
                counts[c.shift(torus, p - 1 - 2 * i)] += 1
        return SWFunction.from_counts(counts)

    def blow_up(self, exceptional: str) -> "SWFunction":
        counts: Counter = Counter()
        for c in self.support:
            counts[c.shift(exceptional, 1)] += 1
            counts[c.shift(exceptional, -1)] += 1
        return SWFunction.from_counts(counts)

    def relabel(self, mapping: Mapping[str, str]) -> "SWFunction":
        lift = None if self.lift is None else tuple(sorted((c.relabel(mapping), v) for c, v in self.lift))
        return SWFunction(frozenset(c.relabel(mapping) for c in self.support), lift, self.lift_source)

    def to_json(self) -> list:
        rows = []
        lift = dict(self.lift) if self.lift is not None else None
        classes = set(self.support) | set(lift or ())
        for c in sorted(classes):
            row = [c.to_json(), self(c)]
            if lift is not None:
                row.append(lift.get(c, 0))
            rows.append(row)
        return rows

    @classmethod
    def from_json(cls, rows, lift_source: str = "") -> "SWFunction":
        support = set()
        lift = []
        has_lift = any(len(r) > 2 for r in rows)
        for r in rows:
            c = CohClass.from_json(r[0])
            if int(r[1]) % 2:
                support.add(c)
            if has_lift:
                lift.append((c, int(r[2])))
        return cls(frozenset(support), tuple(sorted(lift)) if has_lift else None, lift_source if has_lift else "")


@dataclass(frozen=True)
class NucleusMark:
    label: str
    torus: str
    section: str
    state: str = INTACT

    @property
    def consumed(self) -> bool:
        return self.state != INTACT

    def to_json(self):
        return {"label": self.label, "torus": self.torus, "section": self.section, "state": self.state}

    @classmethod
    def from_json(cls, d):
        return cls(d["label"], d["torus"], d["section"], d.get("state", INTACT))


@dataclass(frozen=True)
class StableData:
    """What a stabilised model remembers about its unstabilised summand.

    ``sw`` and ``canonical`` are the summand's data transported along
    s -> s # s0, which is the identity on tracked classes.
    """

    count: int
    sw: SWFunction
    canonical: CohClass | None

    def to_json(self):
        return {
            "count": self.count,
            "sw": self.sw.to_json(),
            "canonical": None if self.canonical is None else self.canonical.to_json(),
        }

    @classmethod
    def from_json(cls, d):
        can = d.get("canonical")
        return cls(int(d["count"]), SWFunction.from_json(d["sw"]), None if can is None else CohClass.from_json(can))


@dataclass(frozen=True)
class Probe:
    """Line of classes base + 2*l*torus used by tables and families."""

    base: CohClass
    torus: str

    def at(self, ell: int) -> CohClass:
        return self.base + CohClass.gen(self.torus, 2 * ell)

    def to_json(self):
        return {"base": self.base.to_json(), "torus": self.torus}

    @classmethod
    def from_json(cls, d):
        return cls(CohClass.from_json(d["base"]), d["torus"])


@dataclass(frozen=True)
class ZLayout:
    """Block roles of a stabilised fiber-sum host (see :mod:`fourfold.blocks`)."""

    config: tuple[tuple[str, object], ...]
    plain: tuple[str, ...]
    logged: tuple[str, ...]
    suspension: tuple[str, ...]
    log_torus: str

    def to_json(self):
        return {
            "config": dict(self.config),
            "plain": list(self.plain),
            "logged": list(self.logged),
            "suspension": list(self.suspension),
            "log_torus": self.log_torus,
        }

    @classmethod
    def from_json(cls, d):
        return cls(
            tuple(sorted(d["config"].items())),
            tuple(d["plain"]),
            tuple(d["logged"]),
            tuple(d["suspension"]),
            d["log_torus"],
        )


@dataclass(frozen=True)
class ManifoldModel:
    name: str
    homeo: HomeoType
    table: PairingTable
    construction: T.Tree
    nuclei: tuple[NucleusMark, ...] = ()
    tori: tuple[str, ...] = ()
    canonical: CohClass | None = None
    sw: SWFunction = field(default_factory=SWFunction)
    symplectic: bool = False
    spin: bool = False
    distinguished: CohClass | None = None
    stable: StableData | None = None
    probe: Probe | None = None
    layout: ZLayout | None = None
    pi1: str = "trivial"

    def nucleus(self, label) -> NucleusMark:
        label = str(label)
        for n in self.nuclei:
            if n.label == label:
                return n
        raise UnknownNucleus(f"{self.name} has no nucleus {label!r}")

    @property
    def marked_tori(self) -> tuple[str, ...]:
        return tuple(n.torus for n in self.nuclei) + self.tori

    def square(self, c: CohClass) -> int:
        return self.table.square(c)

    def pair(self, c: CohClass, d: CohClass) -> int:
        return self.table.pair(c, d)

    def vdim(self, c: CohClass) -> int:
        return virtual_dimension(self.table.square(c), self.homeo)

    def probe_line(self) -> Probe:
        if self.probe is not None:
            return self.probe
        if self.stable is not None:
            base = self.stable.canonical
        else:
            base = self.canonical
        if not self.nuclei:
            raise UnsupportedManifold(f"{self.name} has no nucleus torus to probe along")
        return Probe(base or CohClass.zero(), self.nuclei[0].torus)

    def renamed(self, ids: Mapping[str, str], labels: Mapping[str, str] | None = None) -> "ManifoldModel":
        """Rename generator ids (and optionally nucleus labels) everywhere."""
        labels = labels or {}

        def rc(c):
            return None if c is None else c.relabel(ids)

        return replace(
            self,
            table=self.table.rename(ids),
            nuclei=tuple(
                NucleusMark(labels.get(n.label, n.label), ids.get(n.torus, n.torus), ids.get(n.section, n.section), n.state)
                for n in self.nuclei
            ),
            tori=tuple(ids.get(t, t) for t in self.tori),
            canonical=rc(self.canonical),
            sw=self.sw.relabel(ids),
            distinguished=rc(self.distinguished),
            stable=None if self.stable is None else StableData(self.stable.count, self.stable.sw.relabel(ids), rc(self.stable.canonical)),
            probe=None if self.probe is None else Probe(self.probe.base.relabel(ids), ids.get(self.probe.torus, self.probe.torus)),
            layout=None if self.layout is None else replace(self.layout, log_torus=ids.get(self.layout.log_torus, self.layout.log_torus)),
        )

    def prefixed(self, prefix: str) -> "ManifoldModel":
        ids = {g: f"{prefix}.{g}" for g in self.table.ids}
        labels = {n.label: f"{prefix}.{n.label}" for n in self.nuclei}
        return replace(self.renamed(ids, labels), name=f"{prefix}:{self.name}")

    def to_json(self) -> dict:
        t = self.table.to_json()
        return {
            "schema": SCHEMA,
            "name": self.name,
            "homeo": self.homeo.to_json(),
            "generators": t["generators"],
            "pairing": t["pairing"],
            "nuclei": [n.to_json() for n in self.nuclei],
            "tori": list(self.tori),
            "canonical": None if self.canonical is None else self.canonical.to_json(),
            "sw": self.sw.to_json(),
            "sw_lift_source": self.sw.lift_source,
            "flags": {"symplectic": self.symplectic, "spin": self.spin, "pi1": self.pi1, "b_plus": self.homeo.b_plus},
            "distinguished": None if self.distinguished is None else self.distinguished.to_json(),
            "extension": None if self.stable is None else self.stable.to_json(),
            "probe": None if self.probe is None else self.probe.to_json(),
            "layout": None if self.layout is None else self.layout.to_json(),
            "construction": self.construction.to_json(),
        }

    @classmethod
    def from_json(cls, d) -> "ManifoldModel":
        if d.get("schema") != SCHEMA:
            raise SchemaError(f"expected schema {SCHEMA!r}, got {d.get('schema')!r}")
        try:
            opt = lambda key, f: None if d.get(key) is None else f(d[key])  # noqa: E731
            flags = d["flags"]
            return cls(
                name=d["name"],
                homeo=HomeoType.from_json(d["homeo"]),
                table=PairingTable.from_json({"generators": d["generators"], "pairing": d["pairing"]}),
                construction=T.Tree.from_json(d["construction"]),
                nuclei=tuple(NucleusMark.from_json(n) for n in d["nuclei"]),
                tori=tuple(d.get("tori", ())),
                canonical=opt("canonical", CohClass.from_json),
                sw=SWFunction.from_json(d["sw"], d.get("sw_lift_source", "")),
                symplectic=bool(flags["symplectic"]),
                spin=bool(flags["spin"]),
                pi1=flags.get("pi1", "trivial"),
                distinguished=opt("distinguished", CohClass.from_json),
                stable=opt("extension", StableData.from_json),
                probe=opt("probe", Probe.from_json),
                layout=opt("layout", ZLayout.from_json),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed model document: {exc}") from exc


# ---------------------------------------------------------------------------
# constructors


def _nucleus_generators(labels, origin, prefix=""):
    gens, pairs, marks = [], {}, []
    for a in labels:
        t, s = f"{prefix}T{a}", f"{prefix}S{a}"
        gens += [Generator(t, TORUS, origin), Generator(s, SECTION, origin)]
        pairs[(t, s)] = 1
        marks.append(NucleusMark(f"{prefix.rstrip('.')}{a}" if prefix else str(a), t, s))
    return gens, pairs, marks


def make_elliptic(n: int) -> ManifoldModel:
    """E(2) with three nuclei, or the E(4) fixture."""
    if n == 2:
        gens, pairs, marks = _nucleus_generators((1, 2, 3), "E(2)")
        zero = CohClass.zero()
        return ManifoldModel(
            name="E(2)",
            homeo=HomeoType(22, -16, "even"),
            table=PairingTable.build(gens, pairs),
            construction=T.elliptic(2),
            nuclei=tuple(marks),
            canonical=zero,
            sw=SWFunction.of([zero]),
            symplectic=True,
            spin=True,
        )
    if n == 4:
        # E(4) = E(2) #_F E(2): two spare nuclei from each copy plus the glued fiber F.
        gens, pairs, marks = _nucleus_generators((1, 2, 3, 4), "E(4)")
        gens.append(Generator("F", TORUS, "E(4)"))
        f2 = CohClass.gen("F", 2)
        lift = ((f2, 1), (CohClass.zero(), -2), (-f2, 1))
        return ManifoldModel(
            name="E(4)",
            homeo=HomeoType(46, -32, "even"),
            table=PairingTable.build(gens, pairs),
            construction=T.elliptic(4),
            nuclei=tuple(marks),
            tori=("F",),
            canonical=f2,
            sw=SWFunction(frozenset({f2, -f2}), tuple(sorted(lift)), "fixture"),
            symplectic=True,
            spin=True,
            probe=Probe(CohClass.zero(), "F"),
        )
    raise UnsupportedManifold(f"E({n}) is not modelled; use n = 2 or 4")


def make_standard(piece: str) -> ManifoldModel:
    if piece not in T.STANDARD_PIECES:
        raise UnsupportedManifold(f"unknown standard piece {piece!r}")
    tree = T.standard(piece)
    homeo = T.STANDARD_PIECES[piece]
    if piece == "S2xS2":
        table = PairingTable.build(
            [Generator("A", HYPERBOLIC_A, piece), Generator("B", HYPERBOLIC_B, piece)], {("A", "B"): 1}
        )
        return ManifoldModel(
            piece, homeo, table, tree,
            canonical=CohClass.of(A=-2, B=-2), symplectic=True, spin=True,
            distinguished=CohClass.zero(),
        )
    if piece == "CP2":
        table = PairingTable.build([Generator("H", GENERIC, piece)], {("H", "H"): 1})
        return ManifoldModel(piece, homeo, table, tree, canonical=CohClass.gen("H", -3), symplectic=True)
    if piece == "CP2bar":
        table = PairingTable.build([Generator("E", EXCEPTIONAL, piece)])
        return ManifoldModel(piece, homeo, table, tree)
    if piece == "S4":
        return ManifoldModel(piece, homeo, PairingTable(), tree, spin=True)
    raise UnsupportedManifold(f"unknown standard piece {piece!r}")


def make_park_block(n: int = 2) -> ManifoldModel:
    """Spin symplectic block homeomorphic to (2n+1)(S2xS2) with two nuclei.

    Only the canonical class is recorded as a basic class.
    """
    if n < 1:
        raise UnsupportedManifold("park block needs n >= 1 so that b+ > 1")
    homeo = HomeoType(2 * (2 * n + 1), 0, "even")
    gens, pairs, marks = _nucleus_generators((1, 2), f"P({n})", prefix="P.")
    marks = [NucleusMark(f"P{i + 1}", m.torus, m.section) for i, m in enumerate(marks)]
    gens.append(Generator("P.K", CANONICAL, f"P({n})"))
    pairs[("P.K", "P.K")] = 2 * homeo.euler + 3 * homeo.sigma
    k = CohClass.gen("P.K")
    return ManifoldModel(
        name=f"P({n})",
        homeo=homeo,
        table=PairingTable.build(gens, pairs),
        construction=T.park(n),
        nuclei=tuple(marks),
        canonical=k,
        sw=SWFunction.of([k]),
        symplectic=True,
        spin=True,
    )


# ---------------------------------------------------------------------------
# operations


def _avoid_collisions(m: ManifoldModel, n: ManifoldModel) -> tuple[ManifoldModel, dict]:
    """Rename n's ids and nucleus labels that clash with m by appending primes.

    Returns the renamed model and the nucleus-label map.
    """
    taken = set(m.table.ids)
    ids = {}
    for g in n.table.ids:
        new = g
        while new in taken:
            new += "'"
        taken.add(new)
        if new != g:
            ids[g] = new
    taken_l = {x.label for x in m.nuclei}
    labels = {}
    for x in n.nuclei:
        new = x.label
        while new in taken_l:
            new += "'"
        taken_l.add(new)
        if new != x.label:
            labels[x.label] = new
    if not ids and not labels:
        return n, labels
    return n.renamed(ids, labels), labels


def _is_blowup_piece(m: ManifoldModel) -> bool:
    return (
        m.homeo.b_plus == 0
        and m.homeo.b2 > 0
        and len(m.table.ids) == m.homeo.b2
        and all(m.table.kind(g) == EXCEPTIONAL for g in m.table.ids)
    )


def _is_stabilizer(m: ManifoldModel) -> bool:
    return m.homeo.as_tuple() == (2, 0, "even") and m.distinguished is not None


def connected_sum(m: ManifoldModel, n: ManifoldModel, prefix: str | None = None) -> ManifoldModel:
    """Connected sum with the blow-up, stabilisation and vanishing rules."""
    if n.homeo.b2 == 0:
        return m
    if m.homeo.b2 == 0:
        return n
    if _is_blowup_piece(m) and not _is_blowup_piece(n):
        # keep the non-trivial summand on the left so the blow-up rule applies
        return connected_sum(n, m, prefix)
    if prefix:
        n = n.prefixed(prefix)
    n, _ = _avoid_collisions(m, n)
    homeo = m.homeo.connected_sum(n.homeo)
    common = dict(
        name=f"{m.name}#{n.name}",
        homeo=homeo,
        table=m.table.merge(n.table),
        construction=T.csum(m.construction, n.construction),
        nuclei=m.nuclei + n.nuclei,
        tori=m.tori + n.tori,
        spin=m.spin and n.spin,
        distinguished=m.distinguished,
        probe=m.probe,
        pi1=m.pi1,
    )
    if _is_blowup_piece(n):
        sw = m.sw
        canonical = m.canonical
        for e in n.table.ids:
            sw = sw.blow_up(e)
            if canonical is not None:
                canonical = canonical + CohClass.gen(e)
        return ManifoldModel(**common, canonical=canonical, sw=sw, symplectic=m.symplectic)
    stable = None
    if _is_stabilizer(n) and m.homeo.b_plus > 0:
        if m.stable is not None:
            stable = StableData(m.stable.count + 1, m.stable.sw, m.stable.canonical)
        else:
            stable = StableData(1, m.sw, m.canonical)
    # both summands have b+ > 0 (or the sum has b+ <= 1): invariants vanish
    return ManifoldModel(**common, stable=stable, layout=m.layout)


def stabilize(m: ManifoldModel) -> ManifoldModel:
    """m # (S2 x S2) with the new hyperbolic pair named h<i>.A, h<i>.B."""
    idx = m.stable.count if m.stable is not None else 0
    return connected_sum(m, make_standard("S2xS2"), prefix=f"h{idx}")


def _intact(m: ManifoldModel, label) -> NucleusMark:
    nuc = m.nucleus(label)
    if nuc.consumed:
        raise NucleusConsumed(f"nucleus {nuc.label} of {m.name} is already used ({nuc.state})")
    return nuc


def log_transform(m: ManifoldModel, nucleus, p: int) -> ManifoldModel:
    """Multiplicity-p log transform on the torus of an unused nucleus."""
    if not isinstance(p, int) or p < 1 or p % 2 == 0:
        raise UnsupportedMultiplicity(f"log transform multiplicity must be odd and >= 1, got {p}")
    if m.homeo.b_plus <= 1:
        raise PositivityRequired(f"{m.name} has b+ = {m.homeo.b_plus}")
    nuc = _intact(m, nucleus)
    t = CohClass.gen(nuc.torus)
    if m.canonical is not None and m.pair(m.canonical, t) != 0:
        raise AxiomViolation(f"K.T = {m.pair(m.canonical, t)} on nucleus {nuc.label}")
    nuclei = tuple(replace(x, state=LOGGED) if x.label == nuc.label else x for x in m.nuclei)
    canonical = None if m.canonical is None else m.canonical + CohClass.gen(nuc.torus, p - 1)
    name = m.name[:-1] + f";{p})" if m.name.endswith(")") and ";" not in m.name and m.name.startswith("E(") else f"{m.name}[{nuc.label};{p}]"
    return replace(
        m,
        name=name,
        nuclei=nuclei,
        canonical=canonical,
        sw=m.sw.log_convolve(nuc.torus, p),
        construction=T.logt(m.construction, nuc.label, p),
        probe=Probe(m.canonical if m.canonical is not None else CohClass.zero(), nuc.torus),
    )


def fiber_sum(m: ManifoldModel, n: ManifoldModel, nucleus_m, nucleus_n) -> ManifoldModel:
    """Sum along the square-zero tori of one nucleus in each summand.

    The result gets a fresh atomic canonical class with K.t = 0 for marked
    tori and sections, K.E = -1 for exceptional spheres and K.K = 2e + 3sigma.
    """
    for x in (m, n):
        if not x.symplectic:
            raise SymplecticRequired(f"{x.name} is not symplectic")
    num = _intact(m, nucleus_m)
    label_n = _intact(n, nucleus_n).label
    n, labels = _avoid_collisions(m, n)
    nun = n.nucleus(labels.get(label_n, label_n))
    for x, nu in ((m, num), (n, nun)):
        if x.table.pair_gen(nu.torus, nu.torus) != 0:
            raise AxiomViolation(f"torus {nu.torus} has nonzero square")
    homeo = m.homeo.fiber_sum(n.homeo)
    tree = T.fsum(m.construction, n.construction, (num.label, nun.label))
    gone = {num.torus, num.section, nun.torus, nun.section}
    gone |= {g for x in (m, n) for g in x.table.ids if x.table.kind(g) == CANONICAL}
    table = m.table.merge(n.table).drop(gone)
    glued = f"T@{tree.digest()}"
    kid = f"K@{tree.digest()}"
    pairs = {(kid, kid): 2 * homeo.euler + 3 * homeo.sigma}
    for g in table.ids:
        if table.kind(g) == EXCEPTIONAL:
            pairs[(kid, g)] = -1
    table = table.with_generators(
        [Generator(glued, TORUS, f"fiber sum of {num.torus} and {nun.torus}"), Generator(kid, CANONICAL, "fiber sum")], pairs
    )
    k = CohClass.gen(kid)
    return ManifoldModel(
        name=f"{m.name}#T{n.name}",
        homeo=homeo,
        table=table,
        construction=tree,
        nuclei=tuple(x for x in m.nuclei if x.label != num.label) + tuple(x for x in n.nuclei if x.label != nun.label),
        tori=tuple(t for t in m.tori + n.tori if t not in gone) + (glued,),
        canonical=k,
        sw=SWFunction.of([k]),
        symplectic=True,
        spin=m.spin and n.spin,
        pi1=m.pi1 if n.pi1 == "trivial" else n.pi1,
    )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def to_json(self):
        return {"kind": self.kind, "detail": self.detail}

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def adjunction_obstructs(m: ManifoldModel, c: CohClass) -> bool:
    """True if the adjunction inequality forces SW(c) = 0 on m (b+ > 1).

    Checks square-zero tori T and, for intact nuclei, T + sigma as well.
    """
    if m.homeo.b_plus <= 1:
        return False
    table = m.table
    for t in m.marked_tori:
        if table.pair_with(c, t) != 0:
            return True
    for nuc in m.nuclei:
        if nuc.state == INTACT and table.pair_with(c, nuc.section) != 0:
            return True
    return False


def validate_model(m: ManifoldModel) -> list[Violation]:
    out: list[Violation] = []
    try:
        tree_h = T.evaluate_homeo(m.construction)
        if tree_h != m.homeo:
            out.append(Violation("ConstructionMismatch", f"tree gives {tree_h}, model has {m.homeo}"))
    except Exception as exc:  # malformed tree
        out.append(Violation("ConstructionMismatch", str(exc)))
    if m.spin and m.homeo.parity != "even":
        out.append(Violation("SpinParityViolation", "spin flag on an odd form"))
    for nuc in m.nuclei:
        try:
            tt = m.table.pair_gen(nuc.torus, nuc.torus)
            ss = m.table.pair_gen(nuc.section, nuc.section)
            ts = m.table.pair_gen(nuc.torus, nuc.section)
        except UnknownGenerator as exc:
            out.append(Violation("UnknownGenerator", f"nucleus {nuc.label}: {exc}"))
            continue
        if (tt, ss, ts) != (0, -2, 1):
            out.append(Violation("NucleusAxiomViolation", f"nucleus {nuc.label}: t.t={tt}, s.s={ss}, t.s={ts}"))
    for c in m.sw.sorted():
        try:
            sq = m.square(c)
        except UnknownGenerator as exc:
            out.append(Violation("UnknownGenerator", f"{c}: {exc}"))
            continue
        if not is_characteristic(c, m.table):
            out.append(Violation("CharacteristicViolation", f"{c} is not characteristic"))
        if adjunction_obstructs(m, c):
            out.append(Violation("AdjunctionViolation", f"{c} pairs nontrivially with a marked torus or intact section"))
        try:
            d = virtual_dimension(sq, m.homeo)
        except NonIntegralDimension as exc:
            out.append(Violation("SimpleTypeViolation", f"{c}: {exc}"))
        else:
            if d != 0:
                out.append(Violation("SimpleTypeViolation", f"{c} has virtual dimension {d}"))
    if m.symplectic and m.homeo.b_plus > 1:
        k = m.canonical
        if k is None:
            out.append(Violation("SymplecticCanonicalViolation", "symplectic model without canonical class"))
        else:
            if m.sw(k) != 1:
                out.append(Violation("SymplecticCanonicalViolation", f"SW({k}) = 0 mod 2"))
            ksq = m.square(k)
            if ksq != 2 * m.homeo.euler + 3 * m.homeo.sigma:
                out.append(Violation("CanonicalAxiomViolation", f"K.K = {ksq} != 2e + 3sigma"))
            for t in m.marked_tori:
                if m.pair(k, CohClass.gen(t)) != 0:
                    out.append(Violation("CanonicalAxiomViolation", f"K.{t} != 0"))
            for nuc in m.nuclei:
                if nuc.state == INTACT and m.pair(k, CohClass.gen(nuc.section)) != 0:
                    out.append(Violation("CanonicalAxiomViolation", f"K.{nuc.section} != 0"))
    return out
