"""Subdivision morphisms and cohomology of their higher direct images.

A refinement of fans with the same support induces a proper birational
toric morphism. Over an invariant affine chart of the base, sections of
the j-th higher direct image of a sheaf are the j-th Čech cohomology of
the preimage cover, weight by weight. This module certifies the
refinement combinatorially, computes those relative groups with explicit
bases, derives the induced maps between them, and assembles the base
Čech complex that yields the twisted global groups
h^i(base, L (x) R^j f_* F).
"""

import itertools

from .errors import MorphismError
from .fields import field_name
from .lattice import dot, vsub
from .linalg import Mat, nullspace, quotient_reps, coords_in_quotient
from .fan import CartierData
from .forms import chart_component, restriction_matrix
from .cohomology import (
    ChainComplex,
    cech_data,
    _block_matrix,
    _scaled,
    _cover_simplices,
    _stabilized,
)


class FanMorphism:
    """A certified refinement of the target fan by the source fan.

    container maps each source cone id to the id of the smallest target
    cone containing it; tiles maps each maximal target cone id to the
    source maximal cones that pave it.
    """

    __slots__ = ("source", "target", "container", "tiles", "certificate", "_cache")

    def __init__(self, source, target, container, tiles, certificate):
        self.source = source
        self.target = target
        self.container = container
        self.tiles = tiles
        self.certificate = certificate
        self._cache = {}

    def is_identity(self):
        return self.source is self.target or (
            len(self.source.cones) == len(self.target.cones)
            and all(
                self.source.cones[i].rays == self.target.cones[i].rays
                for i in range(len(self.source.cones))
            )
        )

    def fiber_cover(self, base_cid):
        """Maximal source cones contained in the given target cone.

        Their charts cover the preimage of the base chart.
        """
        key = ("fiber", base_cid)
        if key in self._cache:
            return self._cache[key]
        members = [
            zid
            for zid in range(len(self.source.cones))
            if self.target.is_face(self.container[zid], base_cid)
        ]
        mset = set(members)
        cover = tuple(
            z
            for z in members
            if not any(w != z and self.source.is_face(z, w) for w in mset)
        )
        self._cache[key] = cover
        return cover


def _contains_cone(big, rays):
    return all(big.contains(r) for r in rays)


def validate_fan_morphism(source, target, lattice_map=None):
    """Certify that source refines target with equal support.

    Only the identity lattice map is supported. Every source cone must
    lie in some target cone, and every maximal target cone must be paved
    exactly by the source cones it contains: each wall between tiles is
    shared by two of them and each wall on the boundary by one.
    """
    if lattice_map is not None:
        n = source.lattice.rank
        ident = tuple(
            tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
        )
        if tuple(tuple(row) for row in lattice_map) != ident:
            raise MorphismError(
                "only identity lattice maps are supported",
                lattice_map=[list(r) for r in lattice_map],
            )
    if source.lattice.rank != target.lattice.rank:
        raise MorphismError(
            "source and target lattices have different ranks",
            source_rank=source.lattice.rank,
            target_rank=target.lattice.rank,
        )

    container = []
    for zc in source.cones:
        holders = [
            tid
            for tid, xc in enumerate(target.cones)
            if _contains_cone(xc, zc.rays)
        ]
        if not holders:
            raise MorphismError(
                "source cone leaves the target support",
                cone=[list(r) for r in zc.rays],
            )
        container.append(target.intersect_many(holders))
    container = tuple(container)

    for zid in source.max_ids:
        mc = container[zid]
        if source.cones[zid].dim != target.cones[mc].dim:
            raise MorphismError(
                "maximal source cone has lower dimension than its carrier",
                cone=[list(r) for r in source.cones[zid].rays],
                carrier=[list(r) for r in target.cones[mc].rays],
            )

    tiles = {}
    walls_checked = 0
    for sid in target.max_ids:
        scone = target.cones[sid]
        d = scone.dim
        sig_tiles = tuple(
            zid
            for zid in source.max_ids
            if target.is_face(container[zid], sid)
            and source.cones[zid].dim == d
        )
        if not sig_tiles:
            raise MorphismError(
                "maximal target cone receives no tiles",
                cone=[list(r) for r in scone.rays],
            )
        tiles[sid] = sig_tiles
        tile_set = set(sig_tiles)
        walls = set()
        for zid in sig_tiles:
            for fid in source.face_ids(zid):
                if source.cones[fid].dim == d - 1:
                    walls.add(fid)
        for wid in walls:
            wrays = source.cones[wid].rays
            owners = sum(
                1 for zid in tile_set if source.is_face(wid, zid)
            )
            on_boundary = any(
                all(dot(u, r) == 0 for r in wrays) for u in scone.dual_rays
            )
            expected = 1 if on_boundary else 2
            if owners != expected:
                raise MorphismError(
                    "tiles do not pave the target cone",
                    wall=[list(r) for r in wrays],
                    cone=[list(r) for r in scone.rays],
                    owners=owners,
                    expected=expected,
                )
            walls_checked += 1

    certificate = {
        "tiles": {sid: list(t) for sid, t in tiles.items()},
        "walls_checked": walls_checked,
    }
    return FanMorphism(source, target, container, tiles, certificate)


def identity_morphism(fan):
    return validate_fan_morphism(fan, fan)


def relative_cohomology(fmor, spec, base_cid, m, field):
    """Per-weight cohomology of the preimage of a base chart.

    Returns the Čech layout of the fiber cover together with dimensions,
    representative cocycles and coboundary generators for every degree,
    so induced maps can be expressed in these bases.
    """
    m = tuple(m)
    key = ("rel", spec.key(), base_cid, m, field.key())
    if key in fmor._cache:
        return fmor._cache[key]
    cover = fmor.fiber_cover(base_cid)
    cx, simplices, charts, comps = cech_data(spec, m, field, cover)
    P = len(cover)
    h, reps, boundaries = [], [], []
    for j in range(P):
        dim_j = cx.dims[j]
        if dim_j == 0:
            h.append(0)
            reps.append(())
            boundaries.append(())
            continue
        if j < P - 1:
            kernel = nullspace(cx.diffs[j].rows, field, dim_j)
        else:
            one, zero = field.of(1), field.of(0)
            kernel = tuple(
                tuple(one if i == k else zero for i in range(dim_j))
                for k in range(dim_j)
            )
        if j > 0 and cx.dims[j - 1] > 0:
            prev = cx.diffs[j - 1]
            bnd = tuple(
                tuple(prev.rows[r][c] for r in range(prev.nrows))
                for c in range(prev.ncols)
            )
        else:
            bnd = ()
        rj = quotient_reps(kernel, bnd, field, dim_j)
        h.append(len(rj))
        reps.append(rj)
        boundaries.append(bnd)
    out = {
        "cover": cover,
        "simplices": simplices,
        "charts": charts,
        "dims": tuple(cx.dims),
        "block_dims": tuple(
            tuple(comps[S].dim for S in simplices[p]) for p in range(P)
        ),
        "h": tuple(h),
        "reps": tuple(reps),
        "boundaries": tuple(boundaries),
    }
    fmor._cache[key] = out
    return out


def _perm_sign(seq):
    inversions = sum(
        1
        for i in range(len(seq))
        for j in range(i + 1, len(seq))
        if seq[i] > seq[j]
    )
    return -1 if inversions % 2 else 1


def induced_matrix(fmor, spec, src_base, dst_base, w_src, w_dst, field, j):
    """Matrix of H^j restriction between two base charts.

    dst_base must be a face of src_base; the fiber cover of the smaller
    chart refines that of the larger one. Each finer cover member is
    assigned the first coarser member containing it, cochains are pulled
    through that assignment with restriction maps and permutation signs,
    and the result is projected to the chosen cohomology basis. The two
    trivializing weights pair equally on the smaller chart, so both sides
    may be read in the same coordinates.
    """
    if not fmor.target.is_face(dst_base, src_base):
        raise MorphismError(
            "base charts are not nested",
            src=[list(r) for r in fmor.target.cones[src_base].rays],
            dst=[list(r) for r in fmor.target.cones[dst_base].rays],
        )
    w_src, w_dst = tuple(w_src), tuple(w_dst)
    key = ("ind", spec.key(), src_base, dst_base, w_src, field.key(), j)
    if key in fmor._cache:
        return fmor._cache[key]
    rel_s = relative_cohomology(fmor, spec, src_base, w_src, field)
    rel_d = relative_cohomology(fmor, spec, dst_base, w_dst, field)
    h_s = rel_s["h"][j] if j < len(rel_s["h"]) else 0
    h_d = rel_d["h"][j] if j < len(rel_d["h"]) else 0
    if h_s == 0 or h_d == 0:
        mat = Mat.zero(h_d, h_s)
        fmor._cache[key] = mat
        return mat

    Z = fmor.source
    assign = []
    for z in rel_d["cover"]:
        g = next(i for i, w in enumerate(rel_s["cover"]) if Z.is_face(z, w))
        assign.append(g)

    src_simp = rel_s["simplices"][j]
    dst_simp = rel_d["simplices"][j]
    src_index = {S: i for i, S in enumerate(src_simp)}
    blocks = {}
    for ti, T in enumerate(dst_simp):
        if rel_d["block_dims"][j][ti] == 0:
            continue
        mapped = tuple(assign[t] for t in T)
        if len(set(mapped)) < len(mapped):
            continue
        S = tuple(sorted(mapped))
        si = src_index[S]
        if rel_s["block_dims"][j][si] == 0:
            continue
        block = restriction_matrix(
            spec, rel_s["charts"][S], rel_d["charts"][T], w_src, field
        )
        blocks[(ti, si)] = _scaled(block, _perm_sign(mapped), field)
    cochain_map = _block_matrix(
        list(rel_d["block_dims"][j]), list(rel_s["block_dims"][j]), blocks, field
    )

    cols = []
    for rep in rel_s["reps"][j]:
        image = cochain_map.apply(list(rep), field)
        coords = coords_in_quotient(
            rel_d["reps"][j], rel_d["boundaries"][j], image, field
        )
        assert coords is not None, "restricted cocycle outside the cocycle space"
        cols.append(coords)
    mat = Mat.from_rows(
        [tuple(cols[c][r] for c in range(h_s)) for r in range(h_d)], h_s
    )
    fmor._cache[key] = mat
    return mat


def pullback_bundle(fmor, bundle):
    """The same Cartier data read on the refined fan."""
    if bundle.fan is not fmor.target:
        raise MorphismError("bundle does not live on the target fan")
    per_max = {
        zid: bundle.anchor(fmor.container[zid]) for zid in fmor.source.max_ids
    }
    return CartierData(fmor.source, per_max)


def max_fiber_degree(fmor):
    """Largest Čech length over the charts the base cover can produce."""
    X = fmor.target
    base_cover = list(X.max_ids)
    _, charts = _cover_simplices(X, base_cover)
    return max(len(fmor.fiber_cover(cid)) for cid in set(charts.values()))


def twisted_direct_image_cohomology(fmor, spec, bundle, field, policy=None):
    """Table of h^i(target, L (x) R^j f_* spec) for all i and j.

    spec lives on the source fan, the bundle on the target fan. For each
    weight the base Čech complex of the j-th relative groups is built
    with induced restriction maps and its cohomology summed over the
    certified weight box.
    """
    X = fmor.target
    Z = fmor.source
    if bundle.fan is not X:
        raise MorphismError("bundle does not live on the target fan")
    if spec.fan is not Z:
        raise MorphismError("sheaf does not live on the source fan")
    base_cover = list(X.max_ids)
    simplices_b, charts_b = _cover_simplices(X, base_cover)
    P = len(base_cover)
    J = max_fiber_degree(fmor)

    def per_weight(m):
        flat = []
        w_of = {
            cid: vsub(m, bundle.anchor(cid)) for cid in set(charts_b.values())
        }
        for j in range(J):
            dims = []
            per_p_h = []
            for p in range(P):
                hs = []
                for S in simplices_b[p]:
                    cid = charts_b[S]
                    rel = relative_cohomology(fmor, spec, cid, w_of[cid], field)
                    hs.append(rel["h"][j] if j < len(rel["h"]) else 0)
                per_p_h.append(hs)
                dims.append(sum(hs))
            diffs = []
            for p in range(P - 1):
                src_index = {S: i for i, S in enumerate(simplices_b[p])}
                blocks = {}
                for ti, T in enumerate(simplices_b[p + 1]):
                    if per_p_h[p + 1][ti] == 0:
                        continue
                    for k in range(len(T)):
                        S = T[:k] + T[k + 1 :]
                        si = src_index[S]
                        if per_p_h[p][si] == 0:
                            continue
                        block = induced_matrix(
                            fmor,
                            spec,
                            charts_b[S],
                            charts_b[T],
                            w_of[charts_b[S]],
                            w_of[charts_b[T]],
                            field,
                            j,
                        )
                        blocks[(ti, si)] = _scaled(block, (-1) ** k, field)
                diffs.append(
                    _block_matrix(per_p_h[p + 1], per_p_h[p], blocks, field)
                )
            flat.extend(ChainComplex(dims, diffs, field).cohomology_dims())
        return tuple(flat)

    sig_pairs = [
        (bundle.per_max[cid], v) for cid in base_cover for v in Z.rays
    ]
    carrier = spec.twisted_by(pullback_bundle(fmor, bundle))
    table, box = _stabilized(carrier, field, base_cover, policy, per_weight, sig_pairs)
    if not table:
        table = (0,) * (J * P)
    rows = tuple(tuple(table[j * P : (j + 1) * P]) for j in range(J))
    return {
        "h": rows,
        "J": J,
        "field": field_name(field),
        "box": box,
    }
