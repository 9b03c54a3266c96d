"""Refinement morphisms, relative cohomology, and twisted direct images."""

from fractions import Fraction

import pytest

from torich import (
    BoundaryData,
    DifferentialForms,
    LatticeContext,
    LogForms,
    MorphismError,
    QQ,
    PrimeField,
    StructureSheaf,
    Twist,
    build_fan,
    cartier_from_divisor,
    identity_morphism,
    induced_matrix,
    pullback_bundle,
    relative_cohomology,
    sheaf_cohomology,
    twisted_direct_image_cohomology,
    validate_fan_morphism,
    whole_fan_star,
)
from torich.dirimage import max_fiber_degree

F2 = PrimeField(2)


@pytest.fixture(scope="module")
def blowup_morphism(blowup_fan, p2_fan):
    return validate_fan_morphism(blowup_fan, p2_fan)


@pytest.fixture(scope="module")
def blowup_boundary(blowup_fan):
    # exceptional ray marked as A, one strict transform as B
    return BoundaryData.make(blowup_fan, [(1, 1)], [(1, 0)])


def o_of(p2_fan, d):
    return cartier_from_divisor(p2_fan, {(1, 0): d, (0, 1): 0, (-1, -1): 0})


# -- validation --------------------------------------------------------------------------


def test_blowup_morphism_certificate(blowup_morphism, blowup_fan, p2_fan):
    fmor = blowup_morphism
    assert not fmor.is_identity()
    quadrant = p2_fan.cone_id(((1, 0), (0, 1)))
    tiles = fmor.certificate["tiles"]
    assert len(tiles[quadrant]) == 2
    for mid in p2_fan.max_ids:
        if mid != quadrant:
            assert len(tiles[mid]) == 1
    assert fmor.certificate["walls_checked"] > 0
    # container of every source cone really contains it
    for zid, tid in enumerate(fmor.container):
        for r in blowup_fan.cones[zid].rays:
            assert p2_fan.cones[tid].contains(r)


def test_identity_morphism(p2_fan):
    ident = identity_morphism(p2_fan)
    assert ident.is_identity()
    assert max_fiber_degree(ident) == 1
    for mid in p2_fan.max_ids:
        assert ident.tiles[mid] == (mid,)


def test_coarsening_is_rejected(blowup_fan, p2_fan):
    with pytest.raises(MorphismError) as info:
        validate_fan_morphism(p2_fan, blowup_fan)
    assert info.value.code == "E_NOT_COMPATIBLE"


def test_support_mismatch_is_rejected(p2_fan):
    lat = LatticeContext(2)
    quadrant_only = build_fan(lat, [[(1, 0), (0, 1)]])
    with pytest.raises(MorphismError):
        validate_fan_morphism(p2_fan, quadrant_only)


def test_rank_mismatch_is_rejected(p1_fan, p2_fan):
    with pytest.raises(MorphismError):
        validate_fan_morphism(p1_fan, p2_fan)


def test_lattice_map_must_be_identity(blowup_fan, p2_fan):
    ident = [[1, 0], [0, 1]]
    fmor = validate_fan_morphism(blowup_fan, p2_fan, lattice_map=ident)
    assert fmor.certificate["walls_checked"] > 0
    with pytest.raises(MorphismError):
        validate_fan_morphism(blowup_fan, p2_fan, lattice_map=[[2, 0], [0, 1]])


# -- fibers ------------------------------------------------------------------------------


def test_fiber_covers(blowup_morphism, blowup_fan, p2_fan):
    fmor = blowup_morphism
    quadrant = p2_fan.cone_id(((1, 0), (0, 1)))
    cover = fmor.fiber_cover(quadrant)
    assert len(cover) == 2
    assert set(cover) == {
        blowup_fan.cone_id(((1, 0), (1, 1))),
        blowup_fan.cone_id(((0, 1), (1, 1))),
    }
    ray = p2_fan.cone_id(((1, 0),))
    assert fmor.fiber_cover(ray) == (blowup_fan.cone_id(((1, 0),)),)
    origin = p2_fan.cone_id(())
    assert fmor.fiber_cover(origin) == (blowup_fan.cone_id(()),)
    assert max_fiber_degree(fmor) == 2


def test_relative_cohomology_over_the_blown_up_chart(blowup_morphism, blowup_fan):
    spec = DifferentialForms(whole_fan_star(blowup_fan), 0)
    quadrant = blowup_morphism.target.cone_id(((1, 0), (0, 1)))
    rel = relative_cohomology(blowup_morphism, spec, quadrant, (0, 0), QQ)
    assert rel["h"] == (1, 0)
    assert len(rel["cover"]) == 2
    assert rel["dims"][0] == 2  # one scalar per tile
    # a weight with no sections anywhere over this chart
    rel = relative_cohomology(blowup_morphism, spec, quadrant, (-1, -1), QQ)
    assert rel["h"] == (0, 0)


def test_induced_matrix_restricts_global_sections(blowup_morphism, blowup_fan, p2_fan):
    spec = DifferentialForms(whole_fan_star(blowup_fan), 0)
    src = p2_fan.cone_id(((1, 0), (0, 1)))
    dst = p2_fan.cone_id(((1, 0),))
    mat = induced_matrix(
        blowup_morphism, spec, src, dst, (0, 0), (0, 0), QQ, 0
    )
    assert (mat.nrows, mat.ncols) == (1, 1)
    assert mat.rows == ((Fraction(1),),)


def test_induced_matrix_needs_nested_bases(blowup_morphism, p2_fan):
    spec = DifferentialForms(whole_fan_star(blowup_morphism.source), 0)
    a = p2_fan.cone_id(((1, 0), (0, 1)))
    b = p2_fan.cone_id(((0, 1), (-1, -1)))
    with pytest.raises(MorphismError):
        induced_matrix(blowup_morphism, spec, a, b, (0, 0), (0, 0), QQ, 0)


# -- pullbacks ---------------------------------------------------------------------------


def test_pullback_bundle_reads_anchors_through_containers(
    blowup_morphism, blowup_fan, p2_fan
):
    o1 = o_of(p2_fan, 1)
    pulled = pullback_bundle(blowup_morphism, o1)
    assert pulled.fan is blowup_fan
    for zid in blowup_fan.max_ids:
        assert pulled.per_max[zid] == o1.anchor(blowup_morphism.container[zid])
    # ample upstairs it is not: the exceptional wall pairs equally
    assert o1.is_ample()
    assert not pulled.is_ample()


def test_pullback_bundle_checks_the_fan(blowup_morphism, blowup_fan):
    foreign = cartier_from_divisor(
        blowup_fan, {(1, 0): 0, (1, 1): 0, (0, 1): 0, (-1, -1): 0}
    )
    with pytest.raises(MorphismError):
        pullback_bundle(blowup_morphism, foreign)


def test_pullback_preserves_sections(blowup_morphism, blowup_fan, p2_fan):
    # sections of an ample bundle match sections of its pullback
    for d in (1, 2):
        bundle = o_of(p2_fan, d)
        pulled = pullback_bundle(blowup_morphism, bundle)
        down = sheaf_cohomology(
            Twist(StructureSheaf(whole_fan_star(p2_fan)), bundle), QQ
        )["h"]
        up = sheaf_cohomology(
            Twist(StructureSheaf(whole_fan_star(blowup_fan)), pulled), QQ
        )["h"]
        assert down[0] == up[0]


# -- twisted direct images ------------------------------------------------------------------


def test_direct_image_tables_for_log_forms(
    blowup_morphism, blowup_boundary, p2_fan
):
    frozen = {
        (0, 1): ((2, 0, 0), (0, 0, 0)),
        (1, 1): ((1, 0, 0), (0, 0, 0)),
        (2, 1): ((0, 0, 0), (0, 0, 0)),
        (0, 2): ((5, 0, 0), (0, 0, 0)),
        (1, 2): ((5, 0, 0), (0, 0, 0)),
        (2, 2): ((1, 0, 0), (0, 0, 0)),
    }
    for (a, d), want in frozen.items():
        out = twisted_direct_image_cohomology(
            blowup_morphism, LogForms(blowup_boundary, a), o_of(p2_fan, d), QQ
        )
        assert out["h"] == want, (a, d)
        assert out["J"] == 2


def test_direct_image_of_structure_counts_ideal_sections(
    blowup_morphism, blowup_boundary, p2_fan
):
    # log 0-forms vanish on the exceptional divisor, so their pushforward
    # is the ideal of the blown-up point: one linear condition on sections
    o1 = o_of(p2_fan, 1)
    plain = sheaf_cohomology(
        Twist(StructureSheaf(whole_fan_star(p2_fan)), o1), QQ
    )["h"]
    out = twisted_direct_image_cohomology(
        blowup_morphism, LogForms(blowup_boundary, 0), o1, QQ
    )
    assert plain[0] - out["h"][0][0] == 1


def test_identity_reduction(p2_fan):
    ident = identity_morphism(p2_fan)
    spec0 = DifferentialForms(whole_fan_star(p2_fan), 0)
    for d, h0 in ((1, 3), (2, 6)):
        bundle = o_of(p2_fan, d)
        out = twisted_direct_image_cohomology(ident, spec0, bundle, QQ)
        direct = sheaf_cohomology(Twist(spec0, bundle), QQ)["h"]
        assert out["h"][0] == direct == (h0, 0, 0)


def test_direct_image_euler_consistency(
    blowup_morphism, blowup_boundary, blowup_fan, p2_fan
):
    # the signed sum over the table equals the Euler characteristic of the
    # twisted sheaf computed upstairs in one go
    o1 = o_of(p2_fan, 1)
    pulled = pullback_bundle(blowup_morphism, o1)
    for a in range(3):
        spec = LogForms(blowup_boundary, a)
        out = twisted_direct_image_cohomology(blowup_morphism, spec, o1, QQ)
        chi_table = sum(
            (-1) ** (i + j) * x
            for j, row in enumerate(out["h"])
            for i, x in enumerate(row)
        )
        up = sheaf_cohomology(Twist(spec, pulled), QQ)["h"]
        chi_up = sum((-1) ** i * x for i, x in enumerate(up))
        assert chi_table == chi_up, a


def test_direct_image_checks_fan_homes(blowup_morphism, blowup_fan, p2_fan):
    spec_on_target = DifferentialForms(whole_fan_star(p2_fan), 0)
    with pytest.raises(MorphismError):
        twisted_direct_image_cohomology(
            blowup_morphism, spec_on_target, o_of(p2_fan, 1), QQ
        )
    spec_on_source = DifferentialForms(whole_fan_star(blowup_fan), 0)
    foreign = cartier_from_divisor(
        blowup_fan, {(1, 0): 1, (1, 1): 0, (0, 1): 0, (-1, -1): 0}
    )
    with pytest.raises(MorphismError):
        twisted_direct_image_cohomology(blowup_morphism, spec_on_source, foreign, QQ)


def test_direct_image_over_f2(blowup_morphism, blowup_boundary, p2_fan):
    out = twisted_direct_image_cohomology(
        blowup_morphism, LogForms(blowup_boundary, 0), o_of(p2_fan, 1), F2
    )
    assert out["h"] == ((2, 0, 0), (0, 0, 0))
    assert out["field"] == "F2"
