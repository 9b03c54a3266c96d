"""Weight components of the toric sheaves, restriction maps, derivative.

Every sheaf here is modeled per invariant affine chart and per character
weight m. A component is a subspace of the fixed wedge space Λ^a(M⊗F)
(a = 0 giving the 0/1-dimensional scalar case), stored as canonical basis
rows. Restriction between nested charts is then literally subspace
inclusion, or the zero map when the target component vanishes; the
exterior derivative is wedging by the weight itself.
"""

from __future__ import annotations

import itertools

from .errors import ChartError, NotFaceError
from .fan import BoundaryData, CartierData, Fan, StarSet
from .lattice import vsub
from .linalg import Mat, canonical_rows, intersect_rowspaces, solve_coords


class SheafSpec:
    """Base for the sheaf descriptions; instances are immutable."""

    def key(self):
        raise NotImplementedError

    @property
    def fan(self) -> Fan:
        raise NotImplementedError

    @property
    def degree(self) -> int:
        return 0

    def anchor(self, cid):
        """Weight shift of the chart trivialization (nonzero only on twists)."""
        return tuple([0] * self.fan.lattice.rank)

    def base_spec(self) -> "SheafSpec":
        return self

    def twisted_by(self, bundle: CartierData) -> "SheafSpec":
        return Twist(self, bundle)

    def scale_twist(self, l: int) -> "SheafSpec":
        """The same sheaf with any twist replaced by its l-th power."""
        return self


class StructureSheaf(SheafSpec):
    """Structure sheaf of the union of orbit closures indexed by a star set."""

    def __init__(self, star: StarSet):
        self.star = star

    @property
    def fan(self):
        return self.star.fan

    def key(self):
        return ("structure", self.star.members)


class IdealSheaf(SheafSpec):
    """Defining ideal of the same union inside the ambient toric variety."""

    def __init__(self, star: StarSet):
        self.star = star

    @property
    def fan(self):
        return self.star.fan

    def key(self):
        return ("ideal", self.star.members)


class DifferentialForms(SheafSpec):
    """Degree-a weight-graded differential forms on the orbit-closure union.

    The component at (chart γ, weight m) is Λ^a(M[ρ]⊗F) for the face
    ρ = γ∩m^⊥, when that face belongs to the star set, and 0 otherwise.
    With the star set equal to the whole fan this is the form sheaf of the
    ambient variety itself.
    """

    def __init__(self, star: StarSet, degree: int):
        n = star.fan.lattice.rank
        if not 0 <= degree <= n:
            raise ChartError(f"form degree {degree} out of range 0..{n}")
        self.star = star
        self._degree = degree

    @property
    def fan(self):
        return self.star.fan

    @property
    def degree(self):
        return self._degree

    def with_degree(self, a: int) -> "DifferentialForms":
        return DifferentialForms(self.star, a)

    def key(self):
        return ("forms", self.star.members, self._degree)


class LogForms(SheafSpec):
    """Forms with log poles along both boundary divisors, vanishing on the
    first; pushed forward from the smooth locus on singular charts."""

    def __init__(self, boundary: BoundaryData, degree: int):
        n = boundary.fan.lattice.rank
        if not 0 <= degree <= n:
            raise ChartError(f"form degree {degree} out of range 0..{n}")
        self.boundary = boundary
        self._degree = degree

    @property
    def fan(self):
        return self.boundary.fan

    @property
    def degree(self):
        return self._degree

    def with_degree(self, a: int) -> "LogForms":
        return LogForms(self.boundary, a)

    def key(self):
        return ("log", self.boundary.key(), self._degree)


class Twist(SheafSpec):
    """A sheaf twisted by a line bundle; nested twists collapse to one."""

    def __init__(self, inner: SheafSpec, bundle: CartierData):
        if isinstance(inner, Twist):
            bundle = inner.bundle.add(bundle)
            inner = inner.inner
        self.inner = inner
        self.bundle = bundle

    @property
    def fan(self):
        return self.inner.fan

    @property
    def degree(self):
        return self.inner.degree

    def anchor(self, cid):
        return self.bundle.anchor(cid)

    def base_spec(self):
        return self.inner

    def scale_twist(self, l: int):
        return Twist(self.inner, self.bundle.scale(l))

    def with_degree(self, a: int):
        return Twist(self.inner.with_degree(a), self.bundle)

    def key(self):
        return ("twist", self.inner.key(), self.bundle.key())


class WeightComponent:
    """Canonical basis rows of one chart-weight section space."""

    __slots__ = ("rows", "ambient")

    def __init__(self, rows, ambient):
        self.rows = tuple(tuple(r) for r in rows)
        self.ambient = ambient

    @property
    def dim(self):
        return len(self.rows)

    def __repr__(self):
        return f"WeightComponent(dim={self.dim}, ambient={self.ambient})"


def _empty(ambient):
    return WeightComponent((), ambient)


def _scalar(field):
    return WeightComponent(((field.of(1),),), 1)


def chart_component(spec: SheafSpec, cid: int, m, field) -> WeightComponent:
    """Weight-m sections of the sheaf over the chart of cone cid."""
    fan = spec.fan
    if not 0 <= cid < len(fan.cones):
        raise ChartError("chart cone is not in the fan", cone_id=cid)
    m = tuple(m)
    key = ("comp", spec.key(), cid, m, field.key())
    cache = fan.cache()
    if key not in cache:
        shifted = vsub(m, spec.anchor(cid))
        cache[key] = _core_component(spec.base_spec(), cid, shifted, field)
    return cache[key]


def _core_component(core, cid, m, field):
    fan = core.fan
    lattice = fan.lattice
    if isinstance(core, LogForms):
        return _log_component(core, cid, m, field)
    cone = fan.cones[cid]
    scalar_kind = isinstance(core, (StructureSheaf, IdealSheaf))
    ambient = 1 if scalar_kind else lattice.wedge_dim(core.degree)
    if not cone.dual_contains(m):
        return _empty(ambient)
    rho_id = fan.cone_id(cone.perp_rays(m))
    on_body = rho_id in core.star.member_set()
    if isinstance(core, StructureSheaf):
        return _scalar(field) if on_body else _empty(1)
    if isinstance(core, IdealSheaf):
        return _empty(1) if on_body else _scalar(field)
    if not on_body:
        return _empty(ambient)
    a = core.degree
    gens = fan.lattice.perp_sublattice(fan.cones[rho_id].rays).generators
    if a > len(gens):
        return _empty(ambient)
    rows = [
        lattice.wedge_coordinates([gens[j] for j in sub], field)
        for sub in itertools.combinations(range(len(gens)), a)
    ]
    return WeightComponent(canonical_rows(rows, field), ambient)


def _max_smooth_faces(fan, cid):
    cache = fan.cache()
    key = ("maxsmooth", cid)
    if key not in cache:
        smooth = [f for f in fan.face_ids(cid) if fan.cones[f].is_smooth()]
        maximal = [
            f
            for f in smooth
            if not any(g != f and fan.is_face(f, g) for g in smooth)
        ]
        cache[key] = tuple(maximal)
    return cache[key]


def _adapted(fan, rays):
    cache = fan.cache()
    key = ("adapted", rays)
    if key not in cache:
        cache[key] = fan.lattice.adapted_basis(rays)
    return cache[key]


def _log_component(core, cid, m, field):
    fan = core.fan
    lattice = fan.lattice
    n = lattice.rank
    a = core.degree
    ambient = lattice.wedge_dim(a)
    if ambient == 0:
        return _empty(ambient)
    a_rays, b_rays = core.boundary.a_rays, core.boundary.b_rays
    space = None
    for fid in _max_smooth_faces(fan, cid):
        rays = fan.cones[fid].rays
        b_n, b_m = _adapted(fan, rays)
        k = len(rays)
        rows = []
        for sub in itertools.combinations(range(n), a):
            ok = True
            for i in range(k):
                ray = b_n[i]
                if ray in a_rays:
                    theta = 1
                elif i in sub and ray not in b_rays:
                    theta = 1
                else:
                    theta = 0
                if lattice.pairing(ray, m) < theta:
                    ok = False
                    break
            if ok:
                rows.append(lattice.wedge_coordinates([b_m[j] for j in sub], field))
        rows = canonical_rows(rows, field)
        space = rows if space is None else intersect_rowspaces(space, rows, field, ambient)
        if not space:
            break
    # the zero cone is a smooth face of everything, so space is never None
    return WeightComponent(space, ambient)


def restriction_matrix(spec: SheafSpec, src_cid: int, dst_cid: int, m, field) -> Mat:
    """Matrix of Γ(U_src) → Γ(U_dst) in weight m, dst a face of src.

    Column convention: shape (dst dim, src dim), columns are images of the
    source basis vectors in the target basis.
    """
    fan = spec.fan
    if not fan.is_face(dst_cid, src_cid):
        raise NotFaceError(
            "restriction target is not a face of the source chart",
            src=list(map(list, fan.cones[src_cid].rays)),
            dst=list(map(list, fan.cones[dst_cid].rays)),
        )
    m = tuple(m)
    cache = fan.cache()
    key = ("res", spec.key(), src_cid, dst_cid, m, field.key())
    if key in cache:
        return cache[key]
    src = chart_component(spec, src_cid, m, field)
    dst = chart_component(spec, dst_cid, m, field)
    if src.dim == 0 or dst.dim == 0:
        mat = Mat.zero(dst.dim, src.dim)
        cache[key] = mat
        return mat
    cols = []
    for row in src.rows:
        coords = solve_coords(dst.rows, row, field)
        # containment src ⊆ dst holds whenever dst ≠ 0; see module docstring
        assert coords is not None
        cols.append(coords)
    mat = Mat.from_rows(
        [[cols[j][i] for j in range(src.dim)] for i in range(dst.dim)], src.dim
    )
    cache[key] = mat
    return mat


def wedge_matrix(lattice, m, a: int, field) -> Mat:
    """Ambient matrix of (m ∧ −): Λ^a(M⊗F) → Λ^{a+1}(M⊗F)."""
    src = lattice.wedge_indices(a)
    dst = lattice.wedge_indices(a + 1)
    dst_pos = {s: i for i, s in enumerate(dst)}
    rows = [[field.of(0)] * len(src) for _ in range(len(dst))]
    for j, s in enumerate(src):
        sset = set(s)
        for idx, coeff in enumerate(m):
            if idx in sset or coeff == 0:
                continue
            target = tuple(sorted(sset | {idx}))
            sign = (-1) ** sum(1 for x in s if x < idx)
            rows[dst_pos[target]][j] = field.of(sign * coeff)
    return Mat.from_rows(rows, len(src))


def exterior_derivative(lattice, m, coords, a: int, field):
    """d(x^m ⊗ ω) = x^m ⊗ (m ∧ ω) on wedge coordinates."""
    return wedge_matrix(lattice, m, a, field).apply(list(coords), field)


def derivative_matrix(spec: SheafSpec, cid: int, m, field) -> Mat:
    """Matrix of the exterior derivative between chart components.

    Defined for the untwisted form families; the wedge weight is the honest
    chart weight m. Shape (dim degree a+1 component, dim degree a component).
    """
    assert not isinstance(spec, Twist)
    a = spec.degree
    src = chart_component(spec, cid, m, field)
    n = spec.fan.lattice.rank
    if a >= n:
        return Mat.zero(0, src.dim)
    tgt = chart_component(spec.with_degree(a + 1), cid, m, field)
    if src.dim == 0:
        return Mat.zero(tgt.dim, 0)
    wm = wedge_matrix(spec.fan.lattice, m, a, field)
    cols = []
    for row in src.rows:
        img = wm.apply(list(row), field)
        if tgt.dim == 0:
            # d preserves components, so the image must already be zero
            assert all(field.is_zero(x) for x in img)
            cols.append([])
            continue
        coords = solve_coords(tgt.rows, img, field)
        assert coords is not None
        cols.append(coords)
    if tgt.dim == 0:
        return Mat.zero(0, src.dim)
    return Mat.from_rows(
        [[cols[j][i] for j in range(src.dim)] for i in range(tgt.dim)], src.dim
    )
