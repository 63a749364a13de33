import random
from dataclasses import replace
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from fourfold import manifold as M
from fourfold import tree as T
from fourfold.errors import (
    NucleusConsumed,
    PositivityRequired,
    SchemaError,
    SymplecticRequired,
    UnknownNucleus,
    UnsupportedManifold,
    UnsupportedMultiplicity,
)
from fourfold.lattice import GENERIC, CohClass, Generator, HomeoType, dumps, is_characteristic, virtual_dimension

from helpers import random_symplectic

GOLDEN = Path(__file__).parent / "golden"
T1 = CohClass.gen("T1")


def line(m, ell, torus="T1"):
    return CohClass.gen(torus, 2 * ell)


def test_e2():
    e2 = M.make_elliptic(2)
    assert e2.homeo == HomeoType(22, -16, "even")
    assert e2.sw.sorted() == [CohClass.zero()]
    assert [n.label for n in e2.nuclei] == ["1", "2", "3"]
    assert e2.canonical == CohClass.zero() and e2.symplectic and e2.spin
    assert M.validate_model(e2) == []


def test_e2_golden_json():
    text = dumps(M.make_elliptic(2).to_json())
    assert text == (GOLDEN / "e2_model.json").read_text(encoding="utf-8")


def test_e4_fixture():
    e4 = M.make_elliptic(4)
    f2 = CohClass.gen("F", 2)
    assert e4.homeo == HomeoType(46, -32, "even")
    assert set(e4.sw.support) == {f2, -f2}
    assert e4.canonical == f2
    assert e4.sw.lift_source == "fixture"
    assert [e4.sw.integer(c) for c in (f2, CohClass.zero(), -f2)] == [1, -2, 1]
    # the integer fixture reduces to the stored mod-2 function
    assert {c for c, v in e4.sw.lift if v % 2} == set(e4.sw.support)
    assert M.validate_model(e4) == []


def test_e4_agrees_with_fiber_sum_axioms():
    e2 = M.make_elliptic(2)
    summed = M.fiber_sum(e2, e2, "1", "1")
    e4 = M.make_elliptic(4)
    assert summed.homeo == e4.homeo
    # both canonical classes square to 2e + 3 sigma = 0 and satisfy adjunction on every torus
    for m in (summed, e4):
        assert m.square(m.canonical) == 2 * m.homeo.euler + 3 * m.homeo.sigma == 0
        for c in m.sw.support:
            assert all(not m.pair(c, CohClass.gen(t)) for t in m.marked_tori)
            assert virtual_dimension(m.square(c), m.homeo) == 0


def test_unsupported_elliptic():
    with pytest.raises(UnsupportedManifold):
        M.make_elliptic(3)


def test_standard_pieces():
    s = M.make_standard("S2xS2")
    assert s.homeo == HomeoType(2, 0, "even") and len(s.sw) == 0
    assert s.distinguished == CohClass.zero()
    assert s.square(CohClass.of(A=1, B=1)) == 2
    bar = M.make_standard("CP2bar")
    assert bar.homeo == HomeoType(1, -1, "odd")
    for k in range(-5, 6):
        assert is_characteristic(CohClass.gen("E", k), bar.table) == (k % 2 == 1)
    assert M.make_standard("S4").homeo == HomeoType(0, 0, "even")
    assert M.make_standard("CP2").homeo == HomeoType(1, 1, "odd")
    with pytest.raises(UnsupportedManifold):
        M.make_standard("T4")


def test_park_block():
    p = M.make_park_block(2)
    assert p.homeo == HomeoType(10, 0, "even") and p.spin
    assert p.sw.sorted() == [p.canonical]
    assert virtual_dimension(p.square(p.canonical), p.homeo) == 0
    assert M.validate_model(p) == []


def test_log_transform_examples():
    e2 = M.make_elliptic(2)
    assert M.log_transform(e2, 1, 1).sw == e2.sw
    x = M.log_transform(e2, 1, 3)
    assert set(x.sw.support) == {line(x, -1), CohClass.zero(), line(x, 1)}
    assert x.homeo == e2.homeo
    assert x.canonical == CohClass.gen("T1", 2)
    assert x.nucleus("1").consumed and "T1" in x.table
    for q in range(6):
        xq = M.log_transform(e2, 1, 2 * q + 1)
        for ell in range(-q - 3, q + 4):
            assert xq.sw(line(xq, ell)) == (1 if abs(ell) <= q else 0)
        assert M.validate_model(xq) == []


def test_log_transform_errors():
    e2 = M.make_elliptic(2)
    with pytest.raises(UnsupportedMultiplicity):
        M.log_transform(e2, 1, 4)
    with pytest.raises(UnsupportedMultiplicity):
        M.log_transform(e2, 1, -1)
    with pytest.raises(NucleusConsumed):
        M.log_transform(M.log_transform(e2, 1, 3), 1, 3)
    with pytest.raises(UnknownNucleus):
        M.log_transform(e2, 7, 3)
    with pytest.raises(PositivityRequired):
        M.log_transform(M.make_standard("S2xS2"), 1, 3)


def test_log_transforms_commute():
    e2 = M.make_elliptic(2)
    a = M.log_transform(M.log_transform(e2, 1, 3), 2, 5)
    b = M.log_transform(M.log_transform(e2, 2, 5), 1, 3)
    assert a.sw == b.sw and a.canonical == b.canonical


@given(st.sampled_from([1, 3, 5, 7, 9]), st.sampled_from([1, 3, 5]))
def test_log_support_width(p, p0):
    start = M.log_transform(M.make_elliptic(2), 2, p0)
    out = M.log_transform(start, 1, p)
    allowed = {c.shift("T1", p - 1 - 2 * i) for c in start.sw.support for i in range(p)}
    assert set(out.sw.support) <= allowed
    assert max(c.coeff("T1") for c in out.sw.support) == p - 1


def test_connected_sum_rules():
    e2 = M.make_elliptic(2)
    s = M.make_standard("S2xS2")
    z = M.connected_sum(e2, s)
    assert len(z.sw) == 0 and not z.symplectic
    assert z.stable.count == 1 and z.stable.sw == e2.sw and z.stable.canonical == e2.canonical
    assert z.homeo == HomeoType(24, -16, "even")
    assert M.connected_sum(e2, M.make_standard("S4")) is e2
    assert M.connected_sum(M.make_standard("S4"), e2) is e2
    both = M.connected_sum(e2, e2)
    assert len(both.sw) == 0 and both.stable is None
    assert {"T1", "T1'"} <= set(both.table.ids)


def test_blow_up_rule():
    x = M.log_transform(M.make_elliptic(2), 1, 3)
    b = M.connected_sum(x, M.make_standard("CP2bar"))
    e = CohClass.gen("E")
    expected = {CohClass.gen("T1", 2 * ell) + s * e for ell in (-1, 0, 1) for s in (1, -1)}
    assert set(b.sw.support) == expected
    assert b.symplectic and b.canonical == x.canonical + e
    assert b.homeo == HomeoType(23, -17, "odd")
    assert M.validate_model(b) == []
    # summand order does not matter
    assert M.connected_sum(M.make_standard("CP2bar"), x).sw == b.sw


def test_fiber_sum():
    e2 = M.make_elliptic(2)
    w = M.fiber_sum(e2, e2, 2, 3)
    assert w.homeo == HomeoType(46, -32, "even")
    assert w.sw(w.canonical) == 1
    assert virtual_dimension(w.square(w.canonical), w.homeo) == 0
    assert len(w.nuclei) == 4
    glued = [t for t in w.tori if t.startswith("T@")]
    assert len(glued) == 1 and w.table.kind(glued[0]) == "torus"
    assert M.validate_model(w) == []
    assert w.construction == T.fsum(T.elliptic(2), T.elliptic(2), ("2", "3'"))


def test_fiber_sum_errors():
    e2 = M.make_elliptic(2)
    with pytest.raises(SymplecticRequired):
        M.fiber_sum(M.connected_sum(e2, M.make_standard("S2xS2")), e2, 1, 1)
    with pytest.raises(NucleusConsumed):
        M.fiber_sum(M.log_transform(e2, 1, 3), e2, 1, 1)
    with pytest.raises(UnknownNucleus):
        M.fiber_sum(e2, M.make_standard("CP2"), 1, 1)


def test_fresh_canonical_ids_are_content_addressed():
    e2 = M.make_elliptic(2)
    a = M.fiber_sum(e2, M.make_park_block(2), "3", "P1")
    b = M.fiber_sum(e2, M.make_park_block(2), "3", "P1")
    c = M.fiber_sum(e2, M.make_park_block(3), "3", "P1")
    assert a.canonical == b.canonical != c.canonical


def test_validator_catches_constructed_failures():
    e2 = M.make_elliptic(2)
    bad_adj = replace(e2, sw=M.SWFunction.of([CohClass.zero(), CohClass.of(S1=2)]))
    kinds = {v.kind for v in M.validate_model(bad_adj)}
    assert "AdjunctionViolation" in kinds
    # an extra even generator G with G.G = 8 gives 2G virtual dimension 8 and no torus pairing
    table = e2.table.with_generators([Generator("G", GENERIC)], {("G", "G"): 8})
    bad_dim = replace(e2, table=table, sw=M.SWFunction.of([CohClass.zero(), CohClass.gen("G", 2)]))
    assert {v.kind for v in M.validate_model(bad_dim)} == {"SimpleTypeViolation"}
    assert "SimpleTypeViolation" in {v.kind for v in M.validate_model(bad_dim)}
    bad_char = replace(e2, sw=M.SWFunction.of([CohClass.zero(), CohClass.of(S2=1)]))
    assert "CharacteristicViolation" in {v.kind for v in M.validate_model(bad_char)}
    no_k = replace(e2, sw=M.SWFunction())
    assert "SymplecticCanonicalViolation" in {v.kind for v in M.validate_model(no_k)}
    bad_tree = replace(e2, construction=T.elliptic(4))
    assert "ConstructionMismatch" in {v.kind for v in M.validate_model(bad_tree)}


def test_model_json_roundtrip():
    x = M.connected_sum(M.log_transform(M.make_elliptic(2), 1, 5), M.make_standard("CP2bar"))
    for m in (x, M.make_elliptic(4), M.connected_sum(x, M.make_standard("S2xS2"))):
        back = M.ManifoldModel.from_json(m.to_json())
        assert back == m
        assert dumps(back.to_json()) == dumps(m.to_json())
    with pytest.raises(SchemaError):
        M.ManifoldModel.from_json({"schema": "nope"})
    with pytest.raises(SchemaError):
        M.ManifoldModel.from_json({"schema": M.SCHEMA})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_symplectic_models(seed):
    rng = random.Random(seed)
    m = random_symplectic(rng, 4)
    assert T.evaluate_homeo(m.construction) == m.homeo
    assert virtual_dimension(m.square(m.canonical), m.homeo) == 0
    assert M.validate_model(m) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_homeo_additivity(seed):
    rng = random.Random(seed)
    a, b = random_symplectic(rng, 2), random_symplectic(rng, 2)
    c = M.connected_sum(a, b)
    assert (c.homeo.b2, c.homeo.sigma) == (a.homeo.b2 + b.homeo.b2, a.homeo.sigma + b.homeo.sigma)
    free_a = [x.label for x in a.nuclei if not x.consumed]
    free_b = [x.label for x in b.nuclei if not x.consumed]
    if free_a and free_b:
        f = M.fiber_sum(a, b, free_a[0], free_b[0])
        assert (f.homeo.b2, f.homeo.sigma) == (a.homeo.b2 + b.homeo.b2 + 2, a.homeo.sigma + b.homeo.sigma)
