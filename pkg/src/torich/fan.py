"""Cones, fans, star-closed subsets and Cartier data.

Cones are canonicalized on construction: the double description method
turns the generating rays into the dual inequality description, and a
second pass recovers the unique extreme primitive rays. Duals of
lower-dimensional cones carry lineality, represented by plus/minus pairs
of basis vectors. Everything downstream (face lattices, fan axioms, chart
intersections) reduces to integer dot products against these descriptions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    CartierError,
    FanAxiomError,
    NotConeError,
    NotFaceError,
    SceneError,
    StarClosureError,
    UnboundedError,
)
from .fields import QQ
from .lattice import (
    LatticeContext,
    dot,
    lattice_rank_of,
    primitive,
    row_hnf,
    vadd,
    vneg,
    vsub,
)


def dual_description(ineqs, n):
    """Extreme rays and lineality of {x in R^n : <a, x> >= 0 for all a}.

    Incremental double description. Zero sets are recomputed exactly at
    every step (inherited zero sets can undercount ties, which would break
    the combinatorial adjacency test). Returns (lineality_rows, rays): the
    lineality basis in row HNF and the primitive extreme rays sorted
    lexicographically.
    """
    cleaned = []
    seen = set()
    for a in ineqs:
        a = tuple(a)
        if not any(a):
            continue
        a = primitive(a)
        if a not in seen:
            seen.add(a)
            cleaned.append(a)
    lin = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    rays = []
    done = []
    for a in cleaned:
        src = next((l for l in lin if dot(a, l) != 0), None)
        if src is not None:
            pier = src if dot(a, src) > 0 else vneg(src)
            s0 = dot(a, pier)
            new_lin = []
            for l in lin:
                if l == src:
                    continue
                s = dot(a, l)
                if s == 0:
                    new_lin.append(l)
                else:
                    new_lin.append(
                        primitive(vsub(tuple(s0 * x for x in l), tuple(s * x for x in pier)))
                    )
            new_rays = [primitive(pier)]
            for r in rays:
                s = dot(a, r)
                if s == 0:
                    new_rays.append(r)
                else:
                    new_rays.append(
                        primitive(vsub(tuple(s0 * x for x in r), tuple(s * x for x in pier)))
                    )
            lin = new_lin
            rays = sorted(set(new_rays))
            done.append(a)
            continue
        zsets = {r: frozenset(i for i, c in enumerate(done) if dot(c, r) == 0) for r in rays}
        pos = [r for r in rays if dot(a, r) > 0]
        zero = [r for r in rays if dot(a, r) == 0]
        neg = [r for r in rays if dot(a, r) < 0]
        combos = []
        for rp, rn in itertools.product(pos, neg):
            common = zsets[rp] & zsets[rn]
            if any(r3 != rp and r3 != rn and common <= zsets[r3] for r3 in rays):
                continue
            sp, sn = dot(a, rp), dot(a, rn)
            combos.append(primitive(vsub(tuple(sp * x for x in rn), tuple(sn * x for x in rp))))
        rays = sorted(set(pos + zero + combos))
        done.append(a)
    lin_canon = row_hnf(lin) if lin else ()
    return tuple(lin_canon), tuple(sorted(set(rays)))


class Cone:
    """A strongly convex rational polyhedral cone in N, canonical form."""

    __slots__ = ("lattice", "rays", "dim", "dual_rays", "dual_lin", "_faces", "_smooth")

    def __init__(self, lattice, rays, dual_rays, dual_lin):
        self.lattice = lattice
        self.rays = rays
        self.dim = lattice_rank_of(rays)
        self.dual_rays = dual_rays
        self.dual_lin = dual_lin
        self._faces = None
        self._smooth = None

    @classmethod
    def from_rays(cls, lattice: LatticeContext, rays) -> "Cone":
        n = lattice.rank
        gens = []
        for r in rays:
            r = tuple(r)
            if len(r) != n:
                raise NotConeError(f"ray {r} has wrong length", ray=r)
            if any(r):
                gens.append(primitive(r))
        gens = sorted(set(gens))
        dlin, drays = dual_description(gens, n)
        span_rows = list(dlin) + list(drays)
        if lattice_rank_of(span_rows) != n:
            raise NotConeError("cone contains a line", rays=gens)
        constraints = list(drays) + [l for l in dlin] + [vneg(l) for l in dlin]
        plin, prays = dual_description(constraints, n)
        if plin:
            raise NotConeError("cone contains a line", rays=gens)
        return cls(lattice, tuple(sorted(prays)), drays, dlin)

    def dual_generators(self):
        """Generators of the dual cone; lineality shows up as ± pairs."""
        out = list(self.dual_rays)
        for l in self.dual_lin:
            out.append(l)
            out.append(vneg(l))
        return tuple(out)

    def contains(self, v) -> bool:
        return all(dot(v, u) >= 0 for u in self.dual_rays) and all(
            dot(v, l) == 0 for l in self.dual_lin
        )

    def dual_contains(self, m) -> bool:
        """Membership of a weight in the dual cone."""
        return all(dot(r, m) >= 0 for r in self.rays)

    def perp_rays(self, m):
        """Rays of this cone annihilated by the weight m (m in dual assumed)."""
        return tuple(r for r in self.rays if dot(r, m) == 0)

    def faces_with_witness(self):
        """All faces as ray subsets, each with a witness weight m.

        The face of a witness m is exactly the rays it kills; the cone
        itself is witnessed by 0. Faces are intersections of the facets cut
        out by the extreme dual rays.
        """
        if self._faces is None:
            facets = []
            for u in self.dual_rays:
                facets.append(frozenset(r for r in self.rays if dot(r, u) == 0))
            found = {frozenset(self.rays)}
            frontier = [frozenset(self.rays)]
            while frontier:
                nxt = []
                for g in frontier:
                    for f in facets:
                        h = g & f
                        if h not in found:
                            found.add(h)
                            nxt.append(h)
                frontier = nxt
            faces = {}
            for g in found:
                witness = tuple([0] * self.lattice.rank)
                for u in self.dual_rays:
                    if all(dot(r, u) == 0 for r in g):
                        witness = vadd(witness, u)
                faces[tuple(sorted(g))] = witness
            self._faces = faces
        return self._faces

    def face_raysets(self):
        return tuple(sorted(self.faces_with_witness().keys()))

    def has_face(self, rayset) -> bool:
        return tuple(sorted(rayset)) in self.faces_with_witness()

    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim

    def is_smooth(self) -> bool:
        """Do the rays extend to a basis of N? Tested via gcd of maximal minors."""
        if self._smooth is None:
            from .lattice import minors_gcd

            self._smooth = self.is_simplicial() and (
                self.dim == 0 or minors_gcd(self.rays) == 1
            )
        return self._smooth

    def key(self):
        return self.rays

    def __eq__(self, other):
        return isinstance(other, Cone) and other.rays == self.rays

    def __hash__(self):
        return hash(self.rays)

    def __repr__(self):
        return f"Cone{list(map(list, self.rays))}"


def face_lattice(cone: Cone):
    """The faces of a cone, each paired with a witness weight."""
    items = sorted(cone.faces_with_witness().items(), key=lambda kv: (len(kv[0]), kv[0]))
    return [
        (Cone.from_rays(cone.lattice, rays), witness) for rays, witness in items
    ]


def intersect_raysets(lattice, cone_a: Cone, cone_b: Cone):
    """Canonical rays of the intersection cone."""
    constraints = list(cone_a.dual_generators()) + list(cone_b.dual_generators())
    lin, rays = dual_description(constraints, lattice.rank)
    if lin:
        raise NotConeError("intersection contains a line (inputs were not cones?)")
    return tuple(sorted(rays))


class Fan:
    """A finite fan: cones closed under faces with pairwise face intersections."""

    def __init__(self, lattice: LatticeContext, cones, check=True):
        self.lattice = lattice
        order = sorted(cones, key=lambda c: (c.dim, c.rays))
        self.cones = tuple(order)
        self._id_by_rays = {c.rays: i for i, c in enumerate(self.cones)}
        if len(self._id_by_rays) != len(self.cones):
            raise FanAxiomError("duplicate cones")
        self._intersections = {}
        self._face_ids = {}
        self.max_ids = tuple(
            i for i, c in enumerate(self.cones) if not self._is_proper_face(i)
        )
        self.rays = tuple(sorted({r for c in self.cones for r in c.rays}))
        self._caches = {}
        if check:
            self._check_pairwise()

    # -- construction helpers -------------------------------------------------

    def _is_proper_face(self, i) -> bool:
        ci = self.cones[i]
        for j, cj in enumerate(self.cones):
            if j != i and len(cj.rays) >= len(ci.rays) and cj.has_face(ci.rays):
                if cj.rays != ci.rays:
                    return True
        return False

    def _check_pairwise(self):
        for i, j in itertools.combinations(range(len(self.cones)), 2):
            ci, cj = self.cones[i], self.cones[j]
            rays = intersect_raysets(self.lattice, ci, cj)
            if rays not in self._id_by_rays:
                raise FanAxiomError(
                    "intersection of two cones is not in the fan",
                    pair=[list(map(list, ci.rays)), list(map(list, cj.rays))],
                    intersection=list(map(list, rays)),
                )
            if not (ci.has_face(rays) and cj.has_face(rays)):
                raise FanAxiomError(
                    "intersection of two cones is not a common face",
                    pair=[list(map(list, ci.rays)), list(map(list, cj.rays))],
                    intersection=list(map(list, rays)),
                )
            self._intersections[(i, j)] = self._id_by_rays[rays]

    # -- lookups ---------------------------------------------------------------

    def cone_id(self, rayset) -> int:
        key = tuple(sorted(tuple(r) for r in rayset))
        if key not in self._id_by_rays:
            raise NotFaceError("no such cone in the fan", rays=list(map(list, key)))
        return self._id_by_rays[key]

    def cone(self, cid: int) -> Cone:
        return self.cones[cid]

    def intersection_id(self, i: int, j: int) -> int:
        if i == j:
            return i
        a, b = min(i, j), max(i, j)
        if (a, b) not in self._intersections:
            rays = intersect_raysets(self.lattice, self.cones[a], self.cones[b])
            self._intersections[(a, b)] = self._id_by_rays[rays]
        return self._intersections[(a, b)]

    def intersect_many(self, ids) -> int:
        ids = list(ids)
        cur = ids[0]
        for j in ids[1:]:
            cur = self.intersection_id(cur, j)
        return cur

    def is_face(self, small: int, big: int) -> bool:
        return self.cones[big].has_face(self.cones[small].rays)

    def face_ids(self, cid: int):
        """Ids of all faces of the given cone."""
        if cid not in self._face_ids:
            self._face_ids[cid] = tuple(
                self._id_by_rays[rays] for rays in self.cones[cid].face_raysets()
            )
        return self._face_ids[cid]

    def star_ids(self, cid: int):
        """Ids of all cones having the given cone as a face."""
        rays = self.cones[cid].rays
        return tuple(i for i, c in enumerate(self.cones) if c.has_face(rays))

    def first_max_containing(self, cid: int) -> int:
        rays = self.cones[cid].rays
        for mid in self.max_ids:
            if self.cones[mid].has_face(rays):
                return mid
        raise NotFaceError("cone is not a face of any maximal cone")

    # -- global predicates -------------------------------------------------------

    def dim(self) -> int:
        return self.lattice.rank

    def is_complete(self) -> bool:
        """Wall pairing: every (n-1)-cone borders exactly two n-cones and the
        n-cones are wall-connected. Degenerate fans (no full-dimensional
        cones) are not complete."""
        n = self.lattice.rank
        if n == 0:
            return True
        tops = [i for i in self.max_ids if self.cones[i].dim == n]
        if not tops or len(tops) != len(self.max_ids):
            return False
        walls = [i for i, c in enumerate(self.cones) if c.dim == n - 1]
        adj = {t: [] for t in tops}
        for w in walls:
            owners = [t for t in tops if self.cones[t].has_face(self.cones[w].rays)]
            if len(owners) != 2:
                return False
            adj[owners[0]].append(owners[1])
            adj[owners[1]].append(owners[0])
        seen = {tops[0]}
        frontier = [tops[0]]
        while frontier:
            nxt = []
            for t in frontier:
                for u in adj[t]:
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return len(seen) == len(tops)

    def is_smooth(self) -> bool:
        return all(c.is_smooth() for c in self.cones)

    def is_simplicial(self) -> bool:
        return all(c.is_simplicial() for c in self.cones)

    def cache(self):
        return self._caches

    def __repr__(self):
        return f"Fan(rank={self.lattice.rank}, cones={len(self.cones)}, max={len(self.max_ids)})"


def build_fan(lattice: LatticeContext, generating_raysets, check=True) -> Fan:
    """Close the given cones under faces and validate the fan axioms."""
    by_rays = {}
    for rayset in generating_raysets:
        cone = Cone.from_rays(lattice, rayset)
        stack = [cone]
        while stack:
            c = stack.pop()
            if c.rays in by_rays:
                continue
            by_rays[c.rays] = c
            for rays in c.face_raysets():
                if rays not in by_rays:
                    stack.append(Cone.from_rays(lattice, rays))
    if not by_rays:
        by_rays[()] = Cone.from_rays(lattice, [])
    return Fan(lattice, list(by_rays.values()), check=check)


def validate_fan(lattice, raysets) -> Fan:
    return build_fan(lattice, raysets, check=True)


# -- star-closed subsets --------------------------------------------------------


@dataclass(frozen=True)
class StarSet:
    """A star-closed set of cones: with each member, every coface is in."""

    fan: Fan
    members: tuple  # sorted cone ids

    def __contains__(self, cid):
        return cid in set(self.members)

    def member_set(self):
        return frozenset(self.members)

    def max_member_ids(self):
        return tuple(i for i in self.fan.max_ids if i in self.member_set())

    def is_whole_fan(self) -> bool:
        return len(self.members) == len(self.fan.cones)

    def restricted_to(self, cid):
        """Members that are faces of the given cone."""
        faces = set(self.fan.face_ids(cid))
        return tuple(i for i in self.members if i in faces)

    def dims(self):
        return tuple(sorted({self.fan.cones[i].dim for i in self.members}))


def validate_star_set(fan: Fan, member_ids) -> StarSet:
    members = sorted(set(int(i) for i in member_ids))
    for cid in members:
        if cid < 0 or cid >= len(fan.cones):
            raise StarClosureError("unknown cone id", cone=cid)
    mset = set(members)
    for cid in members:
        for sid in fan.star_ids(cid):
            if sid not in mset:
                raise StarClosureError(
                    "set is not closed under passing to cofaces",
                    member=list(map(list, fan.cones[cid].rays)),
                    missing_coface=list(map(list, fan.cones[sid].rays)),
                )
    return StarSet(fan, tuple(members))


def whole_fan_star(fan: Fan) -> StarSet:
    return StarSet(fan, tuple(range(len(fan.cones))))


def skeleton_star_set(fan: Fan, m: int):
    """The cones of dimension >= m, with a purity report.

    Returns (StarSet, report) where the report records the member
    dimensions and whether every minimal member has dimension exactly m.
    """
    members = tuple(i for i, c in enumerate(fan.cones) if c.dim >= m)
    star = validate_star_set(fan, members)
    mset = set(members)
    minimal_dims = set()
    for cid in members:
        faces = [f for f in fan.face_ids(cid) if f != cid and f in mset]
        if not faces:
            minimal_dims.add(fan.cones[cid].dim)
    report = {
        "threshold": m,
        "member_dims": star.dims(),
        "minimal_dims": tuple(sorted(minimal_dims)),
        "pure": minimal_dims <= {m},
    }
    return star, report


def star_closure(fan: Fan, seed_ids) -> StarSet:
    """Smallest star-closed set containing the given cones."""
    members = set()
    for cid in seed_ids:
        members.update(fan.star_ids(cid))
    return StarSet(fan, tuple(sorted(members)))


# -- boundary data ---------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryData:
    """Two disjoint reduced toric divisors, each a set of rays of the fan."""

    fan: Fan
    a_rays: frozenset
    b_rays: frozenset

    @classmethod
    def make(cls, fan: Fan, a_rays, b_rays):
        a = frozenset(tuple(r) for r in a_rays)
        b = frozenset(tuple(r) for r in b_rays)
        known = set(fan.rays)
        for r in sorted(a | b):
            if r not in known:
                raise SceneError("boundary ray is not a ray of the fan", ray=list(r))
        if a & b:
            raise SceneError(
                "boundary divisors must be disjoint",
                overlap=sorted(list(r) for r in a & b),
            )
        return cls(fan, a, b)

    def key(self):
        return (tuple(sorted(self.a_rays)), tuple(sorted(self.b_rays)))


# -- Cartier data -----------------------------------------------------------------


class CartierData:
    """A line bundle presented by one weight per maximal cone.

    Section convention: over the chart of a maximal cone s the weight m has
    a section iff m - m_s lies in the dual cone of s. Compatibility is
    checked on every pair of maximal cones (equality of the two weights as
    functionals on every ray of the intersection), which also makes chart
    anchoring coherent on non-maximal cones.
    """

    def __init__(self, fan: Fan, per_max):
        self.fan = fan
        self.per_max = {int(k): tuple(v) for k, v in per_max.items()}
        missing = [mid for mid in fan.max_ids if mid not in self.per_max]
        extra = [mid for mid in self.per_max if mid not in fan.max_ids]
        if missing or extra:
            raise CartierError(
                "data must cover exactly the maximal cones",
                missing=missing,
                extra=extra,
            )
        for i, j in itertools.combinations(fan.max_ids, 2):
            k = fan.intersection_id(i, j)
            for r in fan.cones[k].rays:
                if dot(r, self.per_max[i]) != dot(r, self.per_max[j]):
                    raise CartierError(
                        "weights disagree on a shared face",
                        pair=[i, j],
                        ray=list(r),
                    )

    def anchor(self, cid: int):
        """Trivializing weight for an arbitrary chart: the datum of the
        first maximal cone containing it in the fixed cover order."""
        return self.per_max[self.fan.first_max_containing(cid)]

    def scale(self, k: int) -> "CartierData":
        return CartierData(
            self.fan, {i: tuple(k * x for x in m) for i, m in self.per_max.items()}
        )

    def add(self, other: "CartierData") -> "CartierData":
        if other.fan is not self.fan:
            raise CartierError("cannot add bundles on different fans")
        return CartierData(
            self.fan,
            {i: vadd(self.per_max[i], other.per_max[i]) for i in self.per_max},
        )

    def max_abs_coord(self) -> int:
        return max((abs(x) for m in self.per_max.values() for x in m), default=0)

    def key(self):
        return tuple(sorted(self.per_max.items()))

    def is_ample(self) -> bool:
        """Strict convexity across every wall of a complete fan."""
        fan = self.fan
        n = fan.lattice.rank
        if not fan.is_complete():
            return False
        tops = list(fan.max_ids)
        for w, cone in enumerate(fan.cones):
            if cone.dim != n - 1:
                continue
            owners = [t for t in tops if fan.cones[t].has_face(cone.rays)]
            if len(owners) != 2:
                return False
            for s, t in ((owners[0], owners[1]), (owners[1], owners[0])):
                m_s, m_t = self.per_max[s], self.per_max[t]
                srays = set(fan.cones[s].rays)
                for v in fan.cones[t].rays:
                    if v in srays:
                        continue
                    if not dot(v, m_t) < dot(v, m_s):
                        return False
        return True

    def polytope_points(self):
        """All weights m with m - m_s in every maximal dual cone.

        Runs the double description method on the homogenized inequality
        system to certify boundedness; an unbounded section polytope (or an
        incomplete fan) raises UnboundedError.
        """
        fan = self.fan
        n = fan.lattice.rank
        if not fan.is_complete():
            raise UnboundedError("section polytope of a non-complete fan")
        ineqs = []
        for mid in fan.max_ids:
            anchor = self.per_max[mid]
            for v in fan.cones[mid].rays:
                # <v, m> - <v, anchor> t >= 0 on (m, t)
                ineqs.append(tuple(list(v) + [-dot(v, anchor)]))
        ineqs.append(tuple([0] * n + [1]))
        lin, rays = dual_description(ineqs, n + 1)
        if lin or any(r[n] == 0 for r in rays):
            raise UnboundedError("section polytope is unbounded")
        if not rays:
            return ()
        verts = [tuple(Fraction(x, r[n]) for x in r[:n]) for r in rays]
        lo = [min(v[i] for v in verts) for i in range(n)]
        hi = [max(v[i] for v in verts) for i in range(n)]
        points = []
        ranges = [range(math.ceil(l), math.floor(h) + 1) for l, h in zip(lo, hi)]
        for m in itertools.product(*ranges):
            ok = True
            for mid in fan.max_ids:
                shifted = vsub(m, self.per_max[mid])
                if not fan.cones[mid].dual_contains(shifted):
                    ok = False
                    break
            if ok:
                points.append(tuple(m))
        return tuple(sorted(points))


def cartier_validate(fan: Fan, per_max) -> CartierData:
    return CartierData(fan, per_max)


def cartier_from_divisor(fan: Fan, coeff_by_ray) -> CartierData:
    """Convert ray coefficients a_r into per-cone weights.

    Solves <v_r, m_s> = -a_r over every maximal cone s; failure to admit an
    integral consistent solution raises CartierError.
    """
    coeffs = {tuple(r): int(a) for r, a in coeff_by_ray.items()}
    for r in fan.rays:
        if r not in coeffs:
            raise CartierError("divisor misses a ray of the fan", ray=list(r))
    n = fan.lattice.rank
    per_max = {}
    for mid in fan.max_ids:
        cone = fan.cones[mid]
        rows = [list(r) + [-coeffs[r]] for r in cone.rays]
        sol = _solve_integer(rows, n)
        if sol is None:
            raise CartierError(
                "divisor is not Cartier on a chart",
                cone=list(map(list, cone.rays)),
            )
        if cone.dim < n:
            # underdetermined: any solution works, compatibility is on faces
            pass
        per_max[mid] = sol
    return CartierData(fan, per_max)


def _solve_integer(aug_rows, n):
    """One integer solution of A x = b given rows [a | b], or None."""
    from .linalg import rref

    red, pivots = rref([r[:] for r in aug_rows], QQ)
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        if pc == n:
            return None
        x[pc] = red[r][n]
    for row in aug_rows:
        if sum(Fraction(c) * x[i] for i, c in enumerate(row[:n])) != row[n]:
            return None
    if any(v.denominator != 1 for v in x):
        return None
    return tuple(int(v) for v in x)
