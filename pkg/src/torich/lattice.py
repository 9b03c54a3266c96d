"""Integer lattice kernel: the dual pair N/M, HNF, perps, adapted bases, wedges.

Vectors are plain int tuples. N-vectors live in the cocharacter lattice
(where rays live), M-vectors in the character lattice (where weights live);
the two only ever meet through ``pairing``. Sublattices are stored by a
canonical row-style Hermite basis with positive pivots, so equal lattices
compare equal syntactically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import NotSmoothError, RankMismatchError
from .fields import QQ
from .linalg import rank as _rank


def vec_gcd(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v):
    """Divide an integer vector by the gcd of its entries (direction kept)."""
    g = vec_gcd(v)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a):
    return tuple(c * x for x in a)


def vneg(a):
    return tuple(-x for x in a)


def dot(a, b) -> int:
    if len(a) != len(b):
        raise RankMismatchError(f"length {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def row_hnf(rows):
    """Row-style Hermite normal form with positive pivots, zero rows dropped.

    Entries above each pivot are reduced into [0, pivot). Canonical for the
    row lattice: two generating sets of the same sublattice agree here.
    """
    m = [list(r) for r in rows]
    if not m:
        return ()
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        # gcd sweep down the column
        changed = True
        while changed:
            changed = False
            for i in range(r + 1, len(m)):
                if m[i][c] != 0:
                    if abs(m[i][c]) < abs(m[r][c]):
                        m[r], m[i] = m[i], m[r]
                    q = m[i][c] // m[r][c]
                    if q:
                        m[i] = [x - q * y for x, y in zip(m[i], m[r])]
                    if m[i][c] != 0:
                        changed = True
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
        for i in range(r):
            q = m[i][c] // m[r][c]
            if q:
                m[i] = [x - q * y for x, y in zip(m[i], m[r])]
        r += 1
    return tuple(tuple(row) for row in m[:r] if any(row))


def row_hnf_transform(rows):
    """HNF with transformation: returns (H, U, U_inv) with U @ A = H.

    U is unimodular and U_inv its exact inverse, both maintained through the
    same row operations. H keeps its full row count (zero rows included) so
    the row correspondence with U stays aligned.
    """
    a = [list(r) for r in rows]
    n = len(a)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    uinv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for row in uinv:
            row[i], row[j] = row[j], row[i]

    def axpy(i, q, j):
        # row_i -= q * row_j on (a, u); inverse column op on uinv
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]
        for row in uinv:
            row[j] += q * row[i]

    def negate(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for row in uinv:
            row[i] = -row[i]

    ncols = len(a[0]) if a else 0
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, n):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            swap(r, piv)
        changed = True
        while changed:
            changed = False
            for i in range(r + 1, n):
                if a[i][c] != 0:
                    if abs(a[i][c]) < abs(a[r][c]):
                        swap(r, i)
                    q = a[i][c] // a[r][c]
                    if q:
                        axpy(i, q, r)
                    if a[i][c] != 0:
                        changed = True
        if a[r][c] < 0:
            negate(r)
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                axpy(i, q, r)
        r += 1
    H = tuple(tuple(row) for row in a)
    U = tuple(tuple(row) for row in u)
    Uinv = tuple(tuple(row) for row in uinv)
    return H, U, Uinv


def minors_gcd(rows, k=None) -> int:
    """gcd of all k x k minors (k = number of rows by default)."""
    rows = [tuple(r) for r in rows]
    if not rows:
        return 1
    k = len(rows) if k is None else k
    n = len(rows[0])
    from .linalg import int_det

    g = 0
    for cols in itertools.combinations(range(n), k):
        sub = [[row[c] for c in cols] for row in rows]
        g = gcd(g, abs(int_det(sub)))
    return g


@dataclass(frozen=True)
class Sublattice:
    """Saturated or plain sublattice of M (or N), canonical HNF generators."""

    ambient_rank: int
    generators: tuple  # tuple of int tuples, row HNF

    @property
    def rank(self) -> int:
        return len(self.generators)

    def contains(self, vec) -> bool:
        if len(vec) != self.ambient_rank:
            raise RankMismatchError("ambient rank mismatch")
        # back-substitution against the HNF rows
        v = list(vec)
        for row in self.generators:
            pc = next((c for c, x in enumerate(row) if x != 0), None)
            if pc is None:
                continue
            if v[pc] % row[pc]:
                return False
            q = v[pc] // row[pc]
            v = [x - q * y for x, y in zip(v, row)]
        return not any(v)


class LatticeContext:
    """A dual pair of lattices N and M of the given rank."""

    def __init__(self, rank: int):
        if rank < 0:
            raise RankMismatchError("rank must be nonnegative")
        self.rank = rank

    def _check(self, v):
        if len(v) != self.rank:
            raise RankMismatchError(f"vector {v} has length {len(v)}, rank is {self.rank}")
        return tuple(v)

    def pairing(self, n_vec, m_vec) -> int:
        return dot(self._check(n_vec), self._check(m_vec))

    def perp_sublattice(self, n_vectors) -> Sublattice:
        """The saturated sublattice {m in M : <v, m> = 0 for all given v}.

        Kernel vectors come from the unimodular transform of the transposed
        HNF, hence they span a direct summand (saturation is built in).
        """
        vs = [self._check(v) for v in n_vectors]
        if not vs:
            return Sublattice(self.rank, row_hnf([tuple(1 if i == j else 0 for j in range(self.rank)) for i in range(self.rank)]))
        at = [[v[i] for v in vs] for i in range(self.rank)]  # A^T, n x s
        H, U, _ = row_hnf_transform(at)
        kernel = [U[i] for i in range(self.rank) if not any(H[i])]
        return Sublattice(self.rank, row_hnf(kernel))

    def adapted_basis(self, rays):
        """Bases (B_N, B_M) of N and M with the given rays first in B_N.

        B_N extends the rays to a ZZ-basis; B_M is the dual basis, so
        B_N @ B_M^T = I. Raises NotSmoothError when the rays are not part
        of any ZZ-basis (dependent, imprimitive, or index > 1).
        """
        rays = [self._check(r) for r in rays]
        k = len(rays)
        n = self.rank
        if k > n:
            raise NotSmoothError("more rays than the rank", rays=rays)
        if k == 0:
            ident = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
            return tuple(ident), tuple(ident)
        at = [[r[i] for r in rays] for i in range(n)]  # A^T, n x k
        H, U, Uinv = row_hnf_transform(at)
        nonzero = [i for i in range(n) if any(H[i])]
        if len(nonzero) != k:
            raise NotSmoothError("rays are linearly dependent", rays=rays)
        # With rank k the pivots sit on the diagonal of H[:k]; the span of
        # the rays is a direct summand iff every pivot is 1.
        pivots = [next(x for x in H[i] if x != 0) for i in range(k)]
        if any(p != 1 for p in pivots):
            raise NotSmoothError("rays do not extend to a lattice basis", rays=rays)
        # A @ U^T = [T | 0]; completing rows are the last n-k columns of
        # U_inv read as vectors.
        completion = [tuple(Uinv[i][j] for i in range(n)) for j in range(k, n)]
        b_n = [tuple(r) for r in rays] + completion
        b_m = self._dual_basis(b_n)
        return tuple(b_n), tuple(b_m)

    def _dual_basis(self, b_n):
        n = self.rank
        # invert exactly over QQ; determinant is ±1 so the inverse is integral
        m = [[Fraction(x) for x in row] for row in b_n]
        aug = [row + [Fraction(1 if i == j else 0) for j in range(n)] for i, row in enumerate(m)]
        # gauss-jordan
        for c in range(n):
            piv = next(i for i in range(c, n) if aug[i][c] != 0)
            aug[c], aug[piv] = aug[piv], aug[c]
            inv = 1 / aug[c][c]
            aug[c] = [x * inv for x in aug[c]]
            for i in range(n):
                if i != c and aug[i][c] != 0:
                    f = aug[i][c]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
        inv_rows = [[aug[i][n + j] for j in range(n)] for i in range(n)]
        # dual basis vectors are the columns of the inverse
        b_m = []
        for j in range(n):
            col = [inv_rows[i][j] for i in range(n)]
            assert all(x.denominator == 1 for x in col)
            b_m.append(tuple(int(x) for x in col))
        return b_m

    def wedge_indices(self, a: int):
        """Lexicographic index sets for the degree-a wedge basis of M."""
        return tuple(itertools.combinations(range(self.rank), a))

    def wedge_dim(self, a: int) -> int:
        return len(self.wedge_indices(a))

    def wedge_coordinates(self, m_vectors, field=QQ):
        """Coordinates of m_1 ∧ ... ∧ m_a in the lexicographic wedge basis.

        The coordinate at an index set S is the a x a minor with columns S.
        An empty input is the empty wedge, giving the scalar 1 in degree 0.
        """
        vs = [self._check(v) for v in m_vectors]
        a = len(vs)
        from .linalg import det

        coords = []
        for cols in self.wedge_indices(a):
            sub = [[v[c] for c in cols] for v in vs]
            coords.append(field.of(det(sub, QQ)))
        return tuple(coords)


def lattice_rank_of(vectors) -> int:
    if not vectors:
        return 0
    return _rank([list(v) for v in vectors], QQ)
