from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from fourfold import families as F
from fourfold.blocks import ZConfig, build_Z
from fourfold.errors import (
    DimensionMismatch,
    IncompatibleFamilies,
    InvalidIndex,
    NoStableContraction,
    NotAnIsometry,
    RecursionObstructed,
    SchemaError,
    UnsupportedManifold,
)
from fourfold.lattice import CohClass, dumps
from fourfold.manifold import make_elliptic


def expected_line(q):
    return {ell: 1 for ell in range(-q, q + 1) if ell}


@pytest.mark.parametrize("q", [1, 2, 3, 7])
def test_base_family_support(q):
    z = build_Z(0)
    f = F.base_family(q, z)
    assert F.line_values(f) == expected_line(q)
    assert len(f.support) == 2 * q
    assert f(F.probe_class(z, 0)) == 0
    assert f.k == 0 and f.q == q and f.integer_defined


def test_base_family_errors():
    with pytest.raises(InvalidIndex):
        F.base_family(0, build_Z(0))
    with pytest.raises(UnsupportedManifold):
        F.base_family(1, make_elliptic(2))


@pytest.mark.parametrize("cfg", [ZConfig(), ZConfig(v="E2")])
def test_alpha_small_table(cfg):
    for p in range(4):
        for q in (1, 4):
            f = F.alpha(p, q, 1, 1, cfg)
            assert f.k == p
            assert len(f.host.layout.suspension) == p
            assert F.line_values(f) == expected_line(q)
            assert F.vanishing_threshold(f) == q


def test_alpha_layout_after_recursion():
    f = F.alpha(2, 3, r=1, s=1)
    lay = f.host.layout
    assert lay.plain == ("B1",) and lay.logged == ("B2",) and lay.suspension == ("B3", "B4")
    assert f.host.homeo == build_Z(2, 1, 1).homeo
    assert f.construction.op == "Commutator"
    assert f.construction.children[0].op == "Commutator"
    assert f.construction.children[0].children[0].op == "Base"


def test_alpha_memoised_and_indices_checked():
    assert F.alpha(3, 2) is F.alpha(3, 2)
    with pytest.raises(InvalidIndex):
        F.alpha(-1, 2)
    with pytest.raises(InvalidIndex):
        F.alpha(1, 0)


def test_suspend_requires_stable_triviality():
    f = F.base_family(2, build_Z(0, 0, 1))
    g = F.suspend(f)
    assert g.k == 1 and g.host.stable.count == f.host.stable.count + 1
    assert g.support == f.support
    with pytest.raises(NoStableContraction):
        F.suspend(replace(f, one_stably_trivial=False))


def test_commutator_step_obstructions():
    f = F.base_family(2, build_Z(0))
    with pytest.raises(RecursionObstructed):
        F.commutator_step(f)
    g = F.base_family(2, build_Z(0, 1, 2))
    with pytest.raises(RecursionObstructed):
        F.commutator_step(g, block="B1")
    # explicit choice of block gives the same line values
    h = F.commutator_step(g, block="B2")
    assert F.line_values(h) == expected_line(2)
    assert h.host.layout.suspension == ("B2",)


def test_evaluate_dimension_guard():
    f = F.alpha(1, 2)
    good = F.probe_class(f.host, 1)
    assert F.evaluate(f, good).value == 1
    with pytest.raises(DimensionMismatch):
        F.evaluate(f, CohClass.zero())


def test_compose_homomorphism_small():
    z = build_Z(0)
    for a in range(1, 6):
        for b in range(1, 6):
            c = F.compose(F.base_family(a, z), F.base_family(b, z))
            want = {ell for ell in expected_line(a)} ^ {ell for ell in expected_line(b)}
            assert set(F.line_values(c)) == want
    with pytest.raises(IncompatibleFamilies):
        F.compose(F.alpha(0, 1), F.alpha(1, 1))
    with pytest.raises(IncompatibleFamilies):
        F.compose(F.alpha(0, 1), F.alpha(0, 1, r=1))


def test_zero_family_is_identity_for_compose():
    f = F.alpha(1, 3)
    zero = F.zero_family(f.host, f.k)
    assert F.compose(f, zero).support == f.support
    assert F.compose(f, f).support == frozenset()


def test_conjugate():
    f = F.alpha(0, 2, s=1)
    same = F.conjugate(f, {})
    assert same.support == f.support
    # swapping the two hyperbolic generators of a stabilisation swaps A.A with B.B: both zero, so it is an isometry
    with pytest.raises(NotAnIsometry):
        F.conjugate(f, {"h0.A": "h0.B"})
    swapped = F.conjugate(f, {"h0.A": "h0.B", "h0.B": "h0.A"})
    assert swapped.support == f.support
    with pytest.raises(NotAnIsometry):
        F.conjugate(f, {"B1.T1": "B1.S1", "B1.S1": "B1.T1"})
    # same blocks with another role assignment share the pairing table
    moved = F.conjugate(f, {}, host=build_Z(0, 1, 0))
    assert moved.host.layout.plain == ("B1",) and moved.support == f.support
    with pytest.raises(NotAnIsometry):
        F.conjugate(f, {}, host=build_Z(0, 0, 2))


def test_q_sequences():
    assert F.q_sequence(5) == [1, 2, 3, 4, 5]
    assert F.q_sequence(5, "max") == [1, 2, 3, 4, 5]
    assert F.q_sequence(5, "as_printed") == [1, 2, 2, 2, 2]
    assert F.q_sequence(0) == []
    with pytest.raises(ValueError):
        F.q_sequence(3, "other")


def test_gf2_rank_and_triangularity():
    assert F.gf2_rank([[1, 0], [1, 1]]) == 2
    assert F.gf2_rank([[1, 1], [1, 1]]) == 1
    assert F.gf2_rank([[0, 0, 0]]) == 0
    assert F.is_lower_unitriangular([[1, 0], [1, 1]])
    assert not F.is_lower_unitriangular([[1, 1], [0, 1]])
    assert not F.is_lower_unitriangular([[1, 0], [0, 0]])
    assert not F.is_lower_unitriangular([])


def test_certificate_small():
    fams = [F.alpha(2, q) for q in range(1, 6)]
    cert = F.independence_certificate(fams)
    assert cert.verdict and cert.rank == 5 and cert.integer_defined
    assert cert.ells == (1, 2, 3, 4, 5)
    assert "unitriangular" in cert.table()
    assert cert.to_json()["matrix"][0] == [1, 0, 0, 0, 0]
    # reversed order is upper triangular: same rank, failed verdict
    rev = F.independence_certificate(fams[::-1], ells=[5, 4, 3, 2, 1])
    assert not rev.verdict and rev.rank == 5
    with pytest.raises(IncompatibleFamilies):
        F.independence_certificate([F.alpha(1, 1), F.alpha(2, 1)])


def test_family_json_roundtrip():
    f = F.alpha(1, 3, r=1)
    back = F.FamilyElement.from_json(f.to_json())
    assert back.support == f.support and back.k == f.k and back.host == f.host
    assert back.construction == f.construction
    assert dumps(back.to_json()) == dumps(f.to_json())
    with pytest.raises(SchemaError):
        F.FamilyElement.from_json({"schema": "fourfold.model/1"})


def test_derived_invariants_and_validation():
    f = F.alpha(1, 2)
    for mode in ("embedding", "psc"):
        d = F.derived_invariant(f, mode)
        assert set(d.values) == set(f.support)
    with pytest.raises(ValueError):
        F.derived_invariant(f, "other")
    assert F.validate_family(f) == []
    assert F.validate_family(replace(f, k=5))


def test_integer_defined_flag():
    f = F.alpha(0, 1)
    assert not replace(f, torelli=False, orientation_preserved=False).integer_defined
    assert replace(f, torelli=False).integer_defined


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.integers(1, 8), st.integers(0, 2), st.integers(0, 2))
def test_alpha_line_property(p, q, r, s):
    f = F.alpha(p, q, r, s)
    assert F.line_values(f) == expected_line(q)
    assert F.validate_family(f) == []
    for c in f.support:
        assert f.host.vdim(c) == -(p + 1)


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(1, 12), max_size=5), st.sets(st.integers(1, 12), max_size=5))
def test_compose_is_xor_of_supports(a, b):
    z = build_Z(1)

    def combo(qs):
        out = F.zero_family(z, 1)
        for q in qs:
            out = F.compose(out, F.alpha(1, q))
        return out

    lhs = F.compose(combo(a), combo(b))
    rhs = combo(a ^ b)
    assert lhs.support == rhs.support
