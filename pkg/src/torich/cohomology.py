"""Exact cohomology engines over the per-weight Čech complexes.

The torus action splits everything into finite weight pieces, so each
weight m contributes an honest finite chain complex over the chosen field.
Global tables are sums over a weight box whose sufficiency is certified by
box doubling: the table for radius R must equal the one for 2R+1.

Weights with the same chart signature (the clamped pairings of the shifted
weight against the cover's rays) produce literally identical complexes, so
each box is scanned with numpy once and exact linear algebra runs only per
distinct signature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import StabilizationError, UnboundedError
from .fields import field_name
from .fan import whole_fan_star
from .forms import (
    StructureSheaf,
    Twist,
    chart_component,
    derivative_matrix,
    restriction_matrix,
)
from .lattice import dot
from .linalg import Mat, mat_rank, nullspace, rank


class ChainComplex:
    """A finite cochain complex with exact matrices; d² = 0 is asserted."""

    def __init__(self, dims, diffs, field):
        self.dims = tuple(dims)
        self.diffs = tuple(diffs)
        self.field = field
        assert len(self.diffs) == max(len(self.dims) - 1, 0)
        for k, d in enumerate(self.diffs):
            assert d.nrows == self.dims[k + 1] and d.ncols == self.dims[k]
        for k in range(len(self.diffs) - 1):
            assert self.diffs[k + 1].mul(self.diffs[k], field).is_zero(field), (
                f"d^2 != 0 between degrees {k} and {k + 2}"
            )

    def cohomology_dims(self):
        ranks = [mat_rank(d, self.field) for d in self.diffs]
        out = []
        for k, dim in enumerate(self.dims):
            r_out = ranks[k] if k < len(ranks) else 0
            r_in = ranks[k - 1] if k >= 1 else 0
            out.append(dim - r_out - r_in)
        return tuple(out)

    def euler(self):
        return sum((-1) ** k * d for k, d in enumerate(self.dims))


def _scaled(mat: Mat, c, field):
    if c == 1:
        return mat
    return Mat(
        mat.nrows,
        mat.ncols,
        [[field.mul(field.of(c), x) for x in row] for row in mat.rows],
    )


def _block_matrix(row_dims, col_dims, blocks, field):
    """Assemble Mat from a {(i, j): Mat} dict of blocks (zero elsewhere)."""
    nrows = sum(row_dims)
    ncols = sum(col_dims)
    row_off = [0]
    for d in row_dims:
        row_off.append(row_off[-1] + d)
    col_off = [0]
    for d in col_dims:
        col_off.append(col_off[-1] + d)
    rows = [[field.of(0)] * ncols for _ in range(nrows)]
    for (i, j), b in blocks.items():
        r0, c0 = row_off[i], col_off[j]
        for r in range(b.nrows):
            brow = b.rows[r]
            target = rows[r0 + r]
            for c in range(b.ncols):
                target[c0 + c] = brow[c]
    return Mat(nrows, ncols, rows)


def _cover_simplices(fan, cover_ids):
    """Charts of all nonempty intersections of the ordered cover."""
    P = len(cover_ids)
    simplices = [tuple(itertools.combinations(range(P), p + 1)) for p in range(P)]
    charts = {}
    for p in range(P):
        for S in simplices[p]:
            charts[S] = fan.intersect_many([cover_ids[i] for i in S])
    return simplices, charts


def cech_data(spec, m, field, cover_ids=None):
    """Weight-m Čech complex plus its simplex layout and chart components."""
    fan = spec.fan
    cover = list(cover_ids) if cover_ids is not None else list(fan.max_ids)
    m = tuple(m)
    simplices, charts = _cover_simplices(fan, cover)
    P = len(cover)
    comps = {S: chart_component(spec, charts[S], m, field) for S in charts}
    dims = [sum(comps[S].dim for S in simplices[p]) for p in range(P)]
    diffs = []
    for p in range(P - 1):
        src_index = {S: i for i, S in enumerate(simplices[p])}
        blocks = {}
        for ti, T in enumerate(simplices[p + 1]):
            if comps[T].dim == 0:
                continue
            for j in range(len(T)):
                S = T[:j] + T[j + 1 :]
                if comps[S].dim == 0:
                    continue
                block = restriction_matrix(spec, charts[S], charts[T], m, field)
                blocks[(ti, src_index[S])] = _scaled(block, (-1) ** j, field)
        diffs.append(
            _block_matrix(
                [comps[T].dim for T in simplices[p + 1]],
                [comps[S].dim for S in simplices[p]],
                blocks,
                field,
            )
        )
    return ChainComplex(dims, diffs, field), simplices, charts, comps


def cech_complex(spec, m, field, cover_ids=None) -> ChainComplex:
    """The weight-m Čech complex of the sheaf over the given chart cover."""
    return cech_data(spec, m, field, cover_ids)[0]


def per_weight_cohomology(spec, m, field, cover_ids=None):
    return cech_complex(spec, m, field, cover_ids).cohomology_dims()


# -- weight boxes and signatures ---------------------------------------------------


@dataclass(frozen=True)
class BoxPolicy:
    """How the weight support is swept.

    explicit_radius: trust the caller, single pass over that box.
    initial_radius: override the default starting radius for stabilization.
    max_doublings: how many R -> 2R+1 growths may be tried before giving up.
    """

    explicit_radius: int | None = None
    initial_radius: int | None = None
    max_doublings: int = 4


def default_radius(spec) -> int:
    fan = spec.fan
    ray_max = max((abs(x) for r in fan.rays for x in r), default=0)
    cart = spec.bundle.max_abs_coord() if isinstance(spec, Twist) else 0
    return 1 + ray_max + cart


def _box_array(radius, n):
    axes = [np.arange(-radius, radius + 1, dtype=np.int64)] * n
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack(grid, axis=-1).reshape(-1, n)


def _signature_groups(spec, cover_ids, weights, sig_pairs=None):
    """Group box weights by chart signature.

    The signature clamps <v, m - anchor> to {-1, 0, 1} for every ray v of
    every cover cone, with that cone's twist anchor. Components, restriction
    matrices and kill decisions of every chart in the simplex lattice are
    functions of the signature alone, so one exact computation per group is
    enough for h-tables. Callers with a different chart structure may pass
    explicit (anchor, ray) pairs instead.
    """
    if sig_pairs is None:
        fan = spec.fan
        sig_pairs = [
            (spec.anchor(cid), v)
            for cid in cover_ids
            for v in fan.cones[cid].rays
        ]
    cols = []
    for anchor, v in sig_pairs:
        va = np.asarray(v, dtype=np.int64)
        shift = dot(v, anchor)
        cols.append(np.clip(weights @ va - shift, -1, 1).astype(np.int8))
    if cols:
        sig = np.stack(cols, axis=1)
    else:
        sig = np.zeros((weights.shape[0], 0), dtype=np.int8)
    _, first_idx, counts = np.unique(
        sig, axis=0, return_index=True, return_counts=True
    )
    return first_idx, counts


def _summed_table(spec, field, cover_ids, radius, per_weight, sig_pairs=None):
    """Sum per_weight(m) over the box, one exact evaluation per signature."""
    n = spec.fan.lattice.rank
    weights = _box_array(radius, n)
    first_idx, counts = _signature_groups(spec, cover_ids, weights, sig_pairs)
    total = None
    for idx, count in zip(first_idx.tolist(), counts.tolist()):
        m = tuple(int(x) for x in weights[idx])
        contrib = per_weight(m)
        if total is None:
            total = [int(count) * x for x in contrib]
        else:
            for i, x in enumerate(contrib):
                total[i] += int(count) * x
    work = {"weights": int(weights.shape[0]), "signatures": int(len(first_idx))}
    return tuple(total) if total is not None else (), work


def _stabilized(spec, field, cover_ids, policy, per_weight, sig_pairs=None):
    """Run the box-doubling loop; returns (table, box_report)."""
    policy = policy or BoxPolicy()
    if policy.explicit_radius is not None:
        table, work = _summed_table(
            spec, field, cover_ids, policy.explicit_radius, per_weight, sig_pairs
        )
        return table, {
            "mode": "explicit",
            "radius": policy.explicit_radius,
            "work": work,
        }
    if not spec.fan.is_complete():
        raise UnboundedError(
            "weight support of a non-complete fan needs an explicit box"
        )
    radius = policy.initial_radius
    if radius is None:
        radius = default_radius(spec)
    table, work = _summed_table(spec, field, cover_ids, radius, per_weight, sig_pairs)
    history = [radius]
    for _ in range(policy.max_doublings):
        bigger = 2 * radius + 1
        table2, work2 = _summed_table(
            spec, field, cover_ids, bigger, per_weight, sig_pairs
        )
        for k in work2:
            work[k] += work2[k]
        history.append(bigger)
        if table2 == table:
            return table, {
                "mode": "stabilized",
                "radius": radius,
                "confirmed_radius": bigger,
                "radii": history,
                "work": work,
            }
        radius, table = bigger, table2
    raise StabilizationError(
        "weight table kept changing under box doubling",
        radii=history,
        last_table=list(table),
    )


# -- public engines ------------------------------------------------------------------


def sheaf_cohomology(spec, field, policy=None, cover_ids=None):
    """Global h^i table with a certified weight box."""
    cover = list(cover_ids) if cover_ids is not None else list(spec.fan.max_ids)

    def per_weight(m):
        return per_weight_cohomology(spec, m, field, cover)

    table, box = _stabilized(spec, field, cover, policy, per_weight)
    if not table:
        table = (0,) * len(cover)
    return {"h": table, "field": field_name(field), "box": box}


def euler_crosscheck(bundle, field, policy=None):
    """χ via cohomology vs χ via cochain dimensions, plus the ample count."""
    fan = bundle.fan
    spec = Twist(StructureSheaf(whole_fan_star(fan)), bundle)
    cover = list(fan.max_ids)

    def per_weight(m):
        cx = cech_complex(spec, m, field, cover)
        return tuple(cx.cohomology_dims()) + (cx.euler(),)

    table, box = _stabilized(spec, field, cover, policy, per_weight)
    if not table:
        table = (0,) * (len(cover) + 1)
    h, chi_cochains = table[:-1], table[-1]
    chi = sum((-1) ** i * x for i, x in enumerate(h))
    out = {
        "h": h,
        "chi": chi,
        "chi_cochains": chi_cochains,
        "chi_consistent": chi == chi_cochains,
        "field": field_name(field),
        "box": box,
    }
    if bundle.is_ample():
        points = len(bundle.polytope_points())
        out["polytope_points"] = points
        out["h0_matches_points"] = h[0] == points
    return out


def _hyper_weight_data(family, m, field, cover, simplices, charts, degrees):
    """Per-weight E1 rows and total-complex cohomology for the form family."""
    fan = family.fan
    P = len(cover)
    comps = {}
    for a in degrees:
        spec_a = family.with_degree(a)
        for S in charts:
            comps[(a, S)] = chart_component(spec_a, charts[S], m, field)

    e1_rows = []
    for a in degrees:
        spec_a = family.with_degree(a)
        dims = [sum(comps[(a, S)].dim for S in simplices[p]) for p in range(P)]
        diffs = []
        for p in range(P - 1):
            src_index = {S: i for i, S in enumerate(simplices[p])}
            blocks = {}
            for ti, T in enumerate(simplices[p + 1]):
                if comps[(a, T)].dim == 0:
                    continue
                for j in range(len(T)):
                    S = T[:j] + T[j + 1 :]
                    if comps[(a, S)].dim == 0:
                        continue
                    blk = restriction_matrix(spec_a, charts[S], charts[T], m, field)
                    blocks[(ti, src_index[S])] = _scaled(blk, (-1) ** j, field)
            diffs.append(
                _block_matrix(
                    [comps[(a, T)].dim for T in simplices[p + 1]],
                    [comps[(a, S)].dim for S in simplices[p]],
                    blocks,
                    field,
                )
            )
        e1_rows.append(ChainComplex(dims, diffs, field).cohomology_dims())

    # total complex: block (a, p, S), D = Čech + (-1)^p d
    n_total = degrees[-1] + P - 1  # top total degree
    layout = []
    for k in range(n_total + 1):
        layout.append(
            [
                (a, S)
                for a in degrees
                if 0 <= k - a < P
                for S in simplices[k - a]
            ]
        )
    dims = [sum(comps[(a, S)].dim for a, S in layer) for layer in layout]
    diffs = []
    for k in range(n_total):
        src_index = {key: i for i, key in enumerate(layout[k])}
        blocks = {}
        for ti, (a, T) in enumerate(layout[k + 1]):
            if comps[(a, T)].dim == 0:
                continue
            p_t = len(T) - 1
            if a in degrees and p_t >= 1:
                # Čech piece from (a, S) with S = T minus one index
                spec_a = family.with_degree(a)
                for j in range(len(T)):
                    S = T[:j] + T[j + 1 :]
                    if comps[(a, S)].dim == 0:
                        continue
                    blk = restriction_matrix(spec_a, charts[S], charts[T], m, field)
                    blocks[(ti, src_index[(a, S)])] = _scaled(blk, (-1) ** j, field)
            if a - 1 in degrees:
                # derivative piece from (a-1, T), sign (-1)^p
                S = T
                if comps[(a - 1, S)].dim != 0:
                    spec_prev = family.with_degree(a - 1)
                    blk = derivative_matrix(spec_prev, charts[S], m, field)
                    blocks[(ti, src_index[(a - 1, S)])] = _scaled(
                        blk, (-1) ** (len(S) - 1), field
                    )
        diffs.append(
            _block_matrix(
                [comps[key].dim for key in layout[k + 1]],
                [comps[key].dim for key in layout[k]],
                blocks,
                field,
            )
        )
    total_h = ChainComplex(dims, diffs, field).cohomology_dims()
    return e1_rows, total_h


def hypercohomology(family, field, policy=None, cover_ids=None):
    """The de Rham family's E1 table and total (hyper)cohomology dimensions.

    family: an untwisted form spec whose degree is reinterpreted over
    0..n via with_degree. Returns the summed E1[a][b] table, the vector of
    total-complex dimensions, and the degeneration comparison.
    """
    fan = family.fan
    n = fan.lattice.rank
    degrees = list(range(n + 1))
    cover = list(cover_ids) if cover_ids is not None else list(fan.max_ids)
    simplices, charts = _cover_simplices(fan, cover)
    P = len(cover)
    n_total = n + P
    memo = {}
    char = field.characteristic

    def per_weight(m):
        if char > 0:
            key = tuple(x % char for x in m) + _clamp_key(family, cover, m)
            if key in memo:
                return memo[key]
        e1_rows, total_h = _hyper_weight_data(
            family, m, field, cover, simplices, charts, degrees
        )
        flat = tuple(x for row in e1_rows for x in row) + tuple(total_h)
        if char > 0:
            memo[key] = flat
        return flat

    table, box = _stabilized(family, field, cover, policy, per_weight)
    if not table:
        table = (0,) * ((n + 1) * P + n_total)
    e1 = tuple(tuple(table[a * P : (a + 1) * P]) for a in range(n + 1))
    hyper = tuple(table[(n + 1) * P :])
    sums = []
    for k in range(n_total):
        sums.append(sum(e1[a][k - a] for a in degrees if 0 <= k - a < P))
    return {
        "E1": e1,
        "H": hyper,
        "diagonal_sums": tuple(sums),
        "degenerate": tuple(sums) == tuple(hyper[:n_total]),
        "field": field_name(field),
        "box": box,
    }


def _clamp_key(spec, cover_ids, m):
    fan = spec.fan
    out = []
    for cid in cover_ids:
        anchor = spec.anchor(cid)
        for v in fan.cones[cid].rays:
            x = dot(v, m) - dot(v, anchor)
            out.append(-1 if x < 0 else (1 if x > 0 else 0))
    return tuple(out)


def extension_rank(bundle, star, field, policy=None):
    """Ranks of the twisted global-section restriction to the polyhedron.

    Returns h0 of the ambient variety, h0 of the polyhedron, and the rank
    of the restriction between them, with the usual box certification.
    """
    fan = bundle.fan
    x_spec = Twist(StructureSheaf(whole_fan_star(fan)), bundle)
    y_spec = Twist(StructureSheaf(star), bundle)
    cover = list(fan.max_ids)
    simplices, charts = _cover_simplices(fan, cover)
    degree_zero = simplices[0]

    def per_weight(m):
        cx = cech_complex(x_spec, m, field, cover)
        cy = cech_complex(y_spec, m, field, cover)
        hx = cx.dims[0] - (mat_rank(cx.diffs[0], field) if cx.diffs else 0)
        hy = cy.dims[0] - (mat_rank(cy.diffs[0], field) if cy.diffs else 0)
        if hx == 0 or hy == 0:
            return (hx, hy, 0)
        kernel = nullspace(
            [list(r) for r in cx.diffs[0].rows], field, cx.dims[0]
        ) if cx.diffs else tuple(
            tuple(field.of(1) if i == j else field.of(0) for j in range(cx.dims[0]))
            for i in range(cx.dims[0])
        )
        # per-chart identity-or-kill map C0_X -> C0_Y
        blocks = {}
        xdims, ydims = [], []
        for i, S in enumerate(degree_zero):
            cxx = chart_component(x_spec, charts[S], m, field)
            cyy = chart_component(y_spec, charts[S], m, field)
            xdims.append(cxx.dim)
            ydims.append(cyy.dim)
            if cxx.dim and cyy.dim:
                blocks[(i, i)] = Mat.identity(cxx.dim)
        phi = _block_matrix(ydims, xdims, blocks, field)
        image_rows = [list(phi.apply(list(v), field)) for v in kernel]
        return (hx, hy, rank(image_rows, field))

    table, box = _stabilized(x_spec, field, cover, policy, per_weight)
    if not table:
        table = (0, 0, 0)
    h0_x, h0_y, rk = table
    return {
        "h0_ambient": h0_x,
        "h0_polyhedron": h0_y,
        "restriction_rank": rk,
        "surjective": rk == h0_y,
        "field": field_name(field),
        "box": box,
    }
