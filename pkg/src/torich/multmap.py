"""Weight-scaling section maps for the degree-l torus endomorphism.

Multiplication by l on the cocharacter lattice fixes every cone, so it
induces a finite surjection from the toric variety (or any invariant
polyhedron in it) onto a copy of itself. Pushing a sheaf forward along
that map and splitting off the original sheaf is entirely combinatorial:
on graded pieces the embedding multiplies weights by l and the splitting
divides when possible and kills the rest. This module exposes those two
section-level maps plus exhaustive certificate checkers used by the
vanishing arguments.
"""

from .errors import ChartError
from .fields import QQ, field_name
from .linalg import solve_coords
from .forms import (
    Twist,
    chart_component,
    restriction_matrix,
    derivative_matrix,
)
from .cohomology import default_radius, sheaf_cohomology


class MultiplicationContext:
    """The integer l >= 2 and the fan shared by source and target."""

    __slots__ = ("fan", "l")

    def __init__(self, fan, l):
        if l < 2:
            raise ChartError("multiplication degree must be at least 2", l=l)
        self.fan = fan
        self.l = l

    def phi(self, m_prime, omega):
        """Embed a graded section: weight m' goes to l*m', form part fixed."""
        return tuple(self.l * x for x in m_prime), omega

    def psi(self, m, omega):
        """Split a pushed-forward section: divide the weight by l, or kill.

        Returns None for weights outside the sublattice l*M; the zero
        section has no graded representative.
        """
        if any(x % self.l for x in m):
            return None
        return tuple(x // self.l for x in m), omega


def _box_weights(n, radius):
    out = [()]
    for _ in range(n):
        out = [m + (c,) for m in out for c in range(-radius, radius + 1)]
    return out


def _face_pairs(fan):
    pairs = []
    for src in range(len(fan.cones)):
        for dst in fan.face_ids(src):
            if dst != src:
                pairs.append((src, dst))
    return pairs


def verify_split(spec, ctx, field, radius=None, psi_rule=None):
    """Certify that phi and psi split the pushforward of spec.

    Exhausts a weight box: on every chart the embedded component must
    land inside the pushforward component, the splitting must be defined
    on all of it, the composite must be the identity, and both maps must
    commute with every restriction. psi_rule lets tests inject a broken
    weight rule; the default divides by ctx.l exactly on the sublattice
    l*M.
    """
    fan = spec.fan
    n = fan.lattice.rank
    l = ctx.l
    if radius is None:
        radius = default_radius(spec)
    target = spec.scale_twist(l)
    if psi_rule is None:
        def psi_rule(m):
            if any(x % l for x in m):
                return None
            return tuple(x // l for x in m)

    counts = {"charts": len(fan.cones), "weights": 0, "pairs": 0}
    pairs = _face_pairs(fan)

    def fail(kind, **witness):
        witness["kind"] = kind
        return {
            "pass": False,
            "l": l,
            "field": field_name(field),
            "radius": radius,
            "checked": counts,
            "witness": witness,
        }

    for m_src in _box_weights(n, radius):
        counts["weights"] += 1
        m_tgt = tuple(l * x for x in m_src)
        if psi_rule(m_tgt) != m_src:
            return fail("splitting_not_left_inverse", weight=m_src,
                        scaled_weight=m_tgt, rule_value=psi_rule(m_tgt))
        for cid in range(len(fan.cones)):
            src = chart_component(spec, cid, m_src, field)
            tgt = chart_component(target, cid, m_tgt, field)
            # components are stored in canonical form, so the split
            # inclusion plus surjectivity of psi is row-for-row equality
            if src.rows != tgt.rows:
                return fail("component_mismatch", weight=m_src,
                            scaled_weight=m_tgt,
                            chart=fan.cones[cid].rays,
                            source_dim=src.dim, target_dim=tgt.dim)
        for s, d in pairs:
            counts["pairs"] += 1
            r_src = restriction_matrix(spec, s, d, m_src, field)
            r_tgt = restriction_matrix(target, s, d, m_tgt, field)
            if r_src.rows != r_tgt.rows:
                return fail("restriction_mismatch", weight=m_src,
                            chart=fan.cones[s].rays,
                            face=fan.cones[d].rays)

    # exercise the kill branch of the rule on weights outside l*M
    for m in _box_weights(n, radius):
        claimed = psi_rule(m)
        if claimed is None:
            continue
        if tuple(l * x for x in claimed) == m:
            continue
        for cid in range(len(fan.cones)):
            comp = chart_component(target, cid, m, field)
            if comp.dim == 0:
                continue
            image = chart_component(spec, cid, claimed, field)
            bad = any(
                solve_coords(image.rows, row, field) is None
                for row in comp.rows
            )
            if bad:
                return fail("splitting_not_well_defined", weight=m,
                            claimed_weight=claimed,
                            chart=fan.cones[cid].rays)

    return {
        "pass": True,
        "l": l,
        "field": field_name(field),
        "radius": radius,
        "checked": counts,
        "witness": None,
    }


def verify_complex_morphism_char_p(family, ctx, field, radius=None):
    """Certify that phi and psi are maps of complexes when char = l.

    The embedded and split-off complexes carry zero differentials, so
    being a morphism of complexes means the exterior derivative vanishes
    after phi and before psi. Both reduce to: the derivative matrix is
    zero on every component whose weight lies in l*M. Over the rationals
    the same matrices are generically nonzero; the first such weight is
    recorded as a control witness.
    """
    if isinstance(family, Twist):
        raise ChartError("derivative checks need an untwisted family",
                         spec=family.key())
    fan = family.fan
    n = fan.lattice.rank
    l = ctx.l
    p = field.characteristic
    if p != l:
        raise ChartError("field characteristic must equal the scaling degree",
                         characteristic=p, l=l)
    if radius is None:
        radius = default_radius(family)

    counts = {"charts": len(fan.cones), "weights": 0, "matrices": 0}
    witness = None
    qq_witness = None
    for m_src in _box_weights(n, radius):
        counts["weights"] += 1
        m = tuple(l * x for x in m_src)
        for cid in range(len(fan.cones)):
            for a in range(n):
                counts["matrices"] += 1
                dmat = derivative_matrix(family.with_degree(a), cid, m, field)
                if not dmat.is_zero(field) and witness is None:
                    witness = {
                        "chart": fan.cones[cid].rays,
                        "weight": m,
                        "degree": a,
                    }
                if qq_witness is None:
                    dq = derivative_matrix(family.with_degree(a), cid, m, QQ)
                    if not dq.is_zero(QQ):
                        qq_witness = {
                            "chart": fan.cones[cid].rays,
                            "weight": m,
                            "degree": a,
                        }
    return {
        "pass": witness is None,
        "l": l,
        "field": field_name(field),
        "radius": radius,
        "checked": counts,
        "witness": witness,
        "rational_control_witness": qq_witness,
    }


def frobenius_dim_chain(spec, bundle, i, l, r, field, policy=None):
    """Cohomology dimensions of spec twisted by successive l-th powers.

    Returns (h^i(spec x L), h^i(spec x L^l), ..., h^i(spec x L^{l^r})).
    Each entry is computed independently; the split embedding forces the
    chain to be nondecreasing, which callers assert.
    """
    if l < 2:
        raise ChartError("multiplication degree must be at least 2", l=l)
    if r < 0:
        raise ChartError("chain length must be nonnegative", r=r)
    dims = []
    for k in range(r + 1):
        twisted = spec.twisted_by(bundle.scale(l ** k))
        h = sheaf_cohomology(twisted, field, policy=policy)["h"]
        dims.append(h[i] if i < len(h) else 0)
    return tuple(dims)
