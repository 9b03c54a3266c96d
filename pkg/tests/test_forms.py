"""Per-chart weight components, restrictions, and the exterior derivative."""

import itertools
from fractions import Fraction

import pytest

import oracles
from torich import (
    BoundaryData,
    ChartError,
    DifferentialForms,
    IdealSheaf,
    LatticeContext,
    LogForms,
    PrimeField,
    QQ,
    StructureSheaf,
    Twist,
    build_fan,
    cartier_from_divisor,
    chart_component,
    restriction_matrix,
    whole_fan_star,
)
from torich.forms import derivative_matrix, exterior_derivative, wedge_matrix

F2 = PrimeField(2)
F3 = PrimeField(3)

BOX2 = [
    (x, y) for x in range(-2, 3) for y in range(-2, 3)
]


def chart_of(fan, fix, simplex):
    return fan.cone_id(oracles.chart_rays(fix, simplex))


def p2_simplices():
    return [s for k in (1, 2, 3) for s in itertools.combinations(range(3), k)]


# -- single components pinned by hand ------------------------------------------------


def test_forms_component_on_quadrant_chart(p2_fan, whole_p2):
    cid = p2_fan.cone_id(((1, 0), (0, 1)))
    forms1 = DifferentialForms(whole_p2, 1)
    # weight (2,0) leaves only the e2-ray of the chart; sections are
    # multiples of the first coordinate form
    comp = chart_component(forms1, cid, (2, 0), QQ)
    assert comp.rows == ((Fraction(1), Fraction(0)),)
    # interior weight: the zero face, all of M survives
    comp = chart_component(forms1, cid, (1, 1), QQ)
    assert comp.dim == 2
    # weight outside the dual cone
    assert chart_component(forms1, cid, (-1, 0), QQ).dim == 0


def test_structure_vs_ideal_on_triangle(p2_fan, tri_star, whole_p2):
    cid = p2_fan.cone_id(((1, 0), (0, 1)))
    struct = StructureSheaf(tri_star)
    ideal = IdealSheaf(tri_star)
    ambient = StructureSheaf(whole_p2)
    # interior weight: dies on the boundary polyhedron, lives in the ideal
    assert chart_component(struct, cid, (1, 1), QQ).dim == 0
    assert chart_component(ideal, cid, (1, 1), QQ).dim == 1
    # boundary weight: the other way around
    assert chart_component(struct, cid, (2, 0), QQ).dim == 1
    assert chart_component(ideal, cid, (2, 0), QQ).dim == 0
    # the two always add up to the ambient structure sheaf
    for m in BOX2:
        for simplex in p2_simplices():
            c = chart_of(p2_fan, oracles.P2, simplex)
            total = (
                chart_component(struct, c, m, QQ).dim
                + chart_component(ideal, c, m, QQ).dim
            )
            assert total == chart_component(ambient, c, m, QQ).dim


def test_forms_degree_zero_is_structure(p2_fan, tri_star):
    forms0 = DifferentialForms(tri_star, 0)
    struct = StructureSheaf(tri_star)
    for m in BOX2:
        for cid in range(len(p2_fan.cones)):
            a = chart_component(forms0, cid, m, QQ)
            b = chart_component(struct, cid, m, QQ)
            assert a.dim == b.dim


def test_log_forms_on_affine_line():
    lat = LatticeContext(1)
    line = build_fan(lat, [[(1,)]])
    cid = line.cone_id(((1,),))

    marked = LogForms(BoundaryData.make(line, [(1,)], []), 1)
    assert chart_component(marked, cid, (1,), QQ).dim == 1
    assert chart_component(marked, cid, (0,), QQ).dim == 0

    log_b = LogForms(BoundaryData.make(line, [], [(1,)]), 1)
    assert chart_component(log_b, cid, (0,), QQ).dim == 1
    assert chart_component(log_b, cid, (-1,), QQ).dim == 0

    plain = LogForms(BoundaryData.make(line, [], []), 1)
    assert chart_component(plain, cid, (0,), QQ).dim == 0
    assert chart_component(plain, cid, (1,), QQ).dim == 1


def test_log_forms_without_boundary_match_plain_forms(p2_fan, whole_p2):
    empty = BoundaryData.make(p2_fan, [], [])
    for a in range(3):
        log = LogForms(empty, a)
        plain = DifferentialForms(whole_p2, a)
        for m in BOX2:
            for cid in range(len(p2_fan.cones)):
                assert (
                    chart_component(log, cid, m, QQ).rows
                    == chart_component(plain, cid, m, QQ).rows
                )


def test_log_forms_on_singular_chart_via_smooth_faces(p112_fan):
    # degree 0 with empty boundary is the structure sheaf, even where the
    # chart itself is singular and the sections come from the smooth locus
    empty = BoundaryData.make(p112_fan, [], [])
    log0 = LogForms(empty, 0)
    struct = StructureSheaf(whole_fan_star(p112_fan))
    for m in BOX2:
        for cid in range(len(p112_fan.cones)):
            assert (
                chart_component(log0, cid, m, QQ).dim
                == chart_component(struct, cid, m, QQ).dim
            )


def test_degree_out_of_range_raises(tri_star, pxp_fan):
    with pytest.raises(ChartError):
        DifferentialForms(tri_star, 3)
    with pytest.raises(ChartError):
        LogForms(BoundaryData.make(pxp_fan, [], []), -1)


def test_unknown_chart_raises(p2_fan, whole_p2):
    spec = DifferentialForms(whole_p2, 0)
    with pytest.raises(ChartError):
        chart_component(spec, 99, (0, 0), QQ)


# -- sweeps against the oracle --------------------------------------------------------


def test_components_match_oracle_on_triangle(p2_fan, tri_star, whole_p2):
    specs = [
        ("structure", StructureSheaf(tri_star), oracles.TRIANGLE_PHI, 0),
        ("ideal", IdealSheaf(tri_star), oracles.TRIANGLE_PHI, 0),
        ("structure", StructureSheaf(whole_p2), None, 0),
        ("forms", DifferentialForms(tri_star, 1), oracles.TRIANGLE_PHI, 1),
        ("forms", DifferentialForms(whole_p2, 1), None, 1),
        ("forms", DifferentialForms(whole_p2, 2), None, 2),
    ]
    for field, p in ((QQ, 0), (F2, 2)):
        for kind, spec, phi, a in specs:
            for simplex in p2_simplices():
                cid = chart_of(p2_fan, oracles.P2, simplex)
                for m in BOX2:
                    want = oracles.component_basis(
                        kind, oracles.P2, phi, simplex, m, a, p
                    )
                    got = chart_component(spec, cid, m, field)
                    assert got.rows == tuple(tuple(r) for r in want), (
                        kind,
                        simplex,
                        m,
                        p,
                    )


def test_log_components_match_oracle_on_p1xp1(pxp_fan):
    a_rays, b_rays = [(1, 0)], [(0, 1)]
    boundary = BoundaryData.make(pxp_fan, a_rays, b_rays)
    simplices = [s for k in (1, 2) for s in itertools.combinations(range(4), k)]
    for field, p in ((QQ, 0), (F3, 3)):
        for a in range(3):
            spec = LogForms(boundary, a)
            for simplex in simplices:
                rays = oracles.chart_rays(oracles.P1XP1, simplex)
                cid = pxp_fan.cone_id(rays)
                for m in BOX2:
                    want = oracles.component_basis(
                        "log",
                        oracles.P1XP1,
                        None,
                        simplex,
                        m,
                        a,
                        p,
                        A=[tuple(r) for r in a_rays],
                        B=[tuple(r) for r in b_rays],
                    )
                    got = chart_component(spec, cid, m, field)
                    assert got.rows == tuple(tuple(r) for r in want), (simplex, m, a)


def test_twisted_components_match_oracle(p2_fan, whole_p2, o1_p2):
    coeffs = {(1, 0): 1, (0, 1): 0, (-1, -1): 0}
    anchors = oracles.divisor_anchors(oracles.P2, coeffs)
    spec = Twist(DifferentialForms(whole_p2, 1), o1_p2)
    for simplex in p2_simplices():
        cid = chart_of(p2_fan, oracles.P2, simplex)
        for m in BOX2:
            want = oracles.component_basis(
                "forms", oracles.P2, None, simplex, m, 1, 0, anchors=anchors
            )
            got = chart_component(spec, cid, m, QQ)
            assert got.rows == tuple(tuple(r) for r in want), (simplex, m)


# -- restriction maps -----------------------------------------------------------------


def face_pairs(fan):
    out = []
    for src in range(len(fan.cones)):
        for dst in fan.face_ids(src):
            if dst != src:
                out.append((src, dst))
    return out


def test_restriction_is_subspace_inclusion(p2_fan, tri_star):
    spec = DifferentialForms(tri_star, 1)
    for src, dst in face_pairs(p2_fan):
        for m in BOX2:
            mat = restriction_matrix(spec, src, dst, m, QQ)
            s = chart_component(spec, src, m, QQ)
            d = chart_component(spec, dst, m, QQ)
            assert (mat.nrows, mat.ncols) == (d.dim, s.dim)
            if s.dim == 0 or d.dim == 0:
                continue
            for j, row in enumerate(s.rows):
                coords = [mat.rows[i][j] for i in range(d.dim)]
                rebuilt = [
                    sum(coords[i] * d.rows[i][c] for i in range(d.dim))
                    for c in range(len(row))
                ]
                assert tuple(rebuilt) == tuple(row)


def test_restriction_composes_along_chains(p2_fan, tri_star):
    spec = DifferentialForms(tri_star, 1)
    chains = []
    for src in p2_fan.max_ids:
        for mid in p2_fan.face_ids(src):
            if mid == src:
                continue
            for dst in p2_fan.face_ids(mid):
                if dst != mid:
                    chains.append((src, mid, dst))
    for src, mid, dst in chains:
        for m in BOX2:
            direct = restriction_matrix(spec, src, dst, m, QQ)
            first = restriction_matrix(spec, src, mid, m, QQ)
            second = restriction_matrix(spec, mid, dst, m, QQ)
            assert second.mul(first, QQ).rows == direct.rows


def test_restriction_to_non_face_raises(p2_fan, whole_p2):
    spec = StructureSheaf(whole_p2)
    a = p2_fan.cone_id(((1, 0),))
    b = p2_fan.cone_id(((0, 1),))
    from torich import NotFaceError

    with pytest.raises(NotFaceError):
        restriction_matrix(spec, a, b, (0, 0), QQ)


def test_restriction_can_be_the_zero_map(p2_fan, tri_star):
    # weight (1,0) lives on the quadrant chart via the e2-ray face, but on
    # the e1-ray chart its face is the zero cone, which is not in the star
    spec = StructureSheaf(tri_star)
    src = p2_fan.cone_id(((1, 0), (0, 1)))
    dst = p2_fan.cone_id(((1, 0),))
    assert chart_component(spec, src, (1, 0), QQ).dim == 1
    assert chart_component(spec, dst, (1, 0), QQ).dim == 0
    mat = restriction_matrix(spec, src, dst, (1, 0), QQ)
    assert (mat.nrows, mat.ncols) == (0, 1)


# -- exterior derivative ---------------------------------------------------------------


def test_wedge_matrix_squares_to_zero():
    lat = LatticeContext(3)
    for m in [(1, 2, 3), (0, 1, -1), (2, 0, 0)]:
        for a in range(3):
            first = wedge_matrix(lat, m, a, QQ)
            second = wedge_matrix(lat, m, a + 1, QQ)
            assert second.mul(first, QQ).is_zero(QQ)


def test_exterior_derivative_of_scalar_is_the_weight():
    lat = LatticeContext(2)
    out = exterior_derivative(lat, (3, -1), (Fraction(1),), 0, QQ)
    assert tuple(out) == (Fraction(3), Fraction(-1))


def test_derivative_matrix_squares_to_zero(p2_fan, tri_star):
    for m in BOX2:
        for cid in range(len(p2_fan.cones)):
            d0 = derivative_matrix(DifferentialForms(tri_star, 0), cid, m, QQ)
            d1 = derivative_matrix(DifferentialForms(tri_star, 1), cid, m, QQ)
            if d0.nrows and d1.nrows:
                assert d1.mul(d0, QQ).is_zero(QQ)


def test_derivative_commutes_with_restriction(p2_fan, tri_star):
    spec0 = DifferentialForms(tri_star, 0)
    spec1 = DifferentialForms(tri_star, 1)
    for src, dst in face_pairs(p2_fan):
        for m in BOX2:
            d_src = derivative_matrix(spec0, src, m, QQ)
            d_dst = derivative_matrix(spec0, dst, m, QQ)
            r0 = restriction_matrix(spec0, src, dst, m, QQ)
            r1 = restriction_matrix(spec1, src, dst, m, QQ)
            assert d_dst.mul(r0, QQ).rows == r1.mul(d_src, QQ).rows


def test_derivative_rejects_twists(p2_fan, whole_p2, o1_p2):
    spec = Twist(DifferentialForms(whole_p2, 0), o1_p2)
    with pytest.raises(AssertionError):
        derivative_matrix(spec, 0, (0, 0), QQ)


# -- twists ----------------------------------------------------------------------------


def test_twist_collapse_and_scaling(p2_fan, whole_p2, o1_p2):
    base = DifferentialForms(whole_p2, 1)
    double = Twist(Twist(base, o1_p2), o1_p2)
    assert double.key() == Twist(base, o1_p2.add(o1_p2)).key()
    assert Twist(base, o1_p2).scale_twist(3).key() == Twist(base, o1_p2.scale(3)).key()
    assert base.scale_twist(5).key() == base.key()
    assert Twist(base, o1_p2).base_spec() is base


def test_twist_shifts_components(p2_fan, whole_p2, o1_p2):
    base = StructureSheaf(whole_p2)
    spec = Twist(base, o1_p2)
    for cid in range(len(p2_fan.cones)):
        anchor = o1_p2.anchor(cid)
        for m in BOX2:
            shifted = tuple(x - y for x, y in zip(m, anchor))
            assert (
                chart_component(spec, cid, m, QQ).dim
                == chart_component(base, cid, shifted, QQ).dim
            )


def test_top_log_forms_are_a_line_bundle(p1_fan, pxp_fan):
    # with full boundary B the top log forms are the trivial bundle, with
    # empty boundary the canonical one; compare against structure twists
    from torich import sheaf_cohomology

    cases = [
        (p1_fan, [], [(1,), (-1,)], {(1,): 0, (-1,): 0}),
        (p1_fan, [(1,)], [(-1,)], {(1,): -1, (-1,): 0}),
        (p1_fan, [], [], {(1,): -1, (-1,): -1}),
        (
            pxp_fan,
            [(1, 0)],
            [(0, 1)],
            {(1, 0): -1, (-1, 0): -1, (0, 1): 0, (0, -1): -1},
        ),
    ]
    for fan, a_rays, b_rays, coeffs in cases:
        n = fan.lattice.rank
        log_top = LogForms(BoundaryData.make(fan, a_rays, b_rays), n)
        bundle = cartier_from_divisor(fan, coeffs)
        line = Twist(StructureSheaf(whole_fan_star(fan)), bundle)
        got = sheaf_cohomology(log_top, QQ)["h"]
        want = sheaf_cohomology(line, QQ)["h"]
        assert got == want
