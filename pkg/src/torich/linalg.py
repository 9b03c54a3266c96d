"""Dense exact linear algebra over the coefficient fields.

Pivots are chosen first-nonzero in row-major order everywhere, so every
rank, kernel and canonical basis this module produces is reproducible.
Ranks over QQ run fraction-free (Bareiss) elimination after clearing row
denominators; F_p uses straightforward modular elimination. Matrices are
small (desk scale), clarity wins over asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


class Mat:
    """Immutable dense matrix with explicit shape; rows may be empty."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows, ncols, rows):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(tuple(r) for r in rows)
        if len(self.rows) != nrows or any(len(r) != ncols for r in self.rows):
            raise ValueError("shape mismatch")

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, n):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, rows, ncols=None):
        rows = [tuple(r) for r in rows]
        if rows:
            return cls(len(rows), len(rows[0]), rows)
        if ncols is None:
            raise ValueError("empty matrix needs explicit ncols")
        return cls(0, ncols, [])

    def mul(self, other, field):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in mul")
        out = []
        zero = field.of(0)
        for i in range(self.nrows):
            srow = self.rows[i]
            row = [zero] * other.ncols
            for k in range(self.ncols):
                a = srow[k]
                if field.is_zero(a):
                    continue
                orow = other.rows[k]
                for j in range(other.ncols):
                    if not field.is_zero(orow[j]):
                        row[j] = field.add(row[j], field.mul(a, orow[j]))
            out.append(row)
        return Mat(self.nrows, other.ncols, out)

    def apply(self, vec, field):
        """Matrix times column vector."""
        if len(vec) != self.ncols:
            raise ValueError("shape mismatch in apply")
        return tuple(
            _dot(row, vec, field) for row in self.rows
        )

    def is_zero(self, field):
        return all(field.is_zero(x) for row in self.rows for x in row)

    def key(self):
        return (self.nrows, self.ncols, self.rows)

    def __eq__(self, other):
        return isinstance(other, Mat) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Mat({self.nrows}x{self.ncols})"


def _dot(row, vec, field):
    s = field.of(0)
    for a, b in zip(row, vec):
        s = field.add(s, field.mul(a, b))
    return s


def _clear_row(row):
    """Scale a rational row to a primitive integer row (rank-preserving)."""
    den = 1
    for x in row:
        if isinstance(x, Fraction):
            den = lcm(den, x.denominator)
    ints = [int(x * den) if isinstance(x, Fraction) else x * den for x in row]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def _rank_bareiss(rows):
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    r = 0
    prev = 1
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        pivot = m[r][c]
        for i in range(r + 1, nrows):
            f = m[i][c]
            mi, mr = m[i], m[r]
            for j in range(c, ncols):
                mi[j] = (pivot * mi[j] - f * mr[j]) // prev
        prev = pivot
        r += 1
        if r == nrows:
            break
    return r


def _rank_modp(rows, field):
    p = field.p
    m = [[x % p for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        for i in range(r + 1, nrows):
            f = (m[i][c] * inv) % p
            if f:
                mi, mr = m[i], m[r]
                for j in range(c, ncols):
                    mi[j] = (mi[j] - f * mr[j]) % p
        r += 1
        if r == nrows:
            break
    return r


def rank(rows, field):
    rows = [r for r in rows if any(not field.is_zero(x) for x in r)]
    if not rows:
        return 0
    if field.characteristic == 0:
        return _rank_bareiss([_clear_row(r) for r in rows])
    return _rank_modp(rows, field)


def mat_rank(mat: Mat, field):
    if mat.nrows == 0 or mat.ncols == 0:
        return 0
    return rank(mat.rows, field)


def rref(rows, field):
    """Reduced row echelon form. Returns (rows, pivot_columns)."""
    m = [[field.of(x) for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if not field.is_zero(m[i][c]):
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        inv = field.inv(m[r][c])
        m[r] = [field.mul(inv, x) for x in m[r]]
        for i in range(nrows):
            if i != r and not field.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def canonical_rows(rows, field, ncols=None):
    """Canonical basis of the row span: RREF, integer-primitive over QQ."""
    rows = list(rows)
    if not rows:
        return ()
    red, _ = rref(rows, field)
    if field.characteristic == 0:
        return tuple(tuple(_clear_row(r)) for r in red)
    return tuple(tuple(r) for r in red)


def nullspace(rows, field, ncols):
    """Canonical basis of {x : rows @ x = 0} (right kernel)."""
    red, pivots = rref(rows, field) if rows else ([], [])
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for fc in free:
        v = [field.of(0)] * ncols
        v[fc] = field.of(1)
        for r, pc in enumerate(pivots):
            # x_pc = -sum over free columns of red[r][fc]
            v[pc] = field.neg(red[r][fc])
        basis.append(tuple(v))
    if field.characteristic == 0:
        basis = [tuple(_clear_row(list(v))) for v in basis]
    return tuple(basis)


def solve_coords(basis_rows, target, field):
    """Coordinates of ``target`` in the given independent row basis, or None.

    Solves sum_i x_i * basis_rows[i] = target exactly.
    """
    k = len(basis_rows)
    if k == 0:
        return () if all(field.is_zero(field.of(t)) for t in target) else None
    ncols = len(target)
    aug = []
    for c in range(ncols):
        aug.append([field.of(basis_rows[i][c]) for i in range(k)] + [field.of(target[c])])
    red, pivots = rref(aug, field)
    coords = [field.of(0)] * k
    for r, pc in enumerate(pivots):
        if pc == k:
            return None  # inconsistent
        coords[pc] = red[r][k]
    # consistency: pivots beyond k impossible (k+1 columns), residual check:
    for c in range(ncols):
        s = field.of(0)
        for i in range(k):
            s = field.add(s, field.mul(coords[i], field.of(basis_rows[i][c])))
        if not field.is_zero(field.sub(s, field.of(target[c]))):
            return None
    return tuple(coords)


def intersect_rowspaces(a_rows, b_rows, field, ncols):
    """Canonical basis of rowspan(a) ∩ rowspan(b)."""
    if not a_rows or not b_rows:
        return ()
    p, q = len(a_rows), len(b_rows)
    stacked = []
    for c in range(ncols):
        stacked.append(
            [field.of(a_rows[i][c]) for i in range(p)]
            + [field.neg(field.of(b_rows[j][c])) for j in range(q)]
        )
    kern = nullspace(stacked, field, p + q)
    vecs = []
    for v in kern:
        w = [field.of(0)] * ncols
        for i in range(p):
            if not field.is_zero(v[i]):
                for c in range(ncols):
                    w[c] = field.add(w[c], field.mul(v[i], field.of(a_rows[i][c])))
        vecs.append(tuple(w))
    vecs = [v for v in vecs if any(not field.is_zero(x) for x in v)]
    return canonical_rows(vecs, field, ncols) if vecs else ()


def quotient_reps(cycle_rows, boundary_rows, field, ncols):
    """Representatives of rowspan(cycles)/rowspan(boundaries).

    Walks the cycle basis in order and keeps each vector that enlarges the
    span of boundaries plus the vectors kept so far. Deterministic.
    """
    kept = []
    base = list(boundary_rows)
    r0 = rank(base, field) if base else 0
    for z in cycle_rows:
        cand = base + kept + [list(z)]
        if rank(cand, field) > r0 + len(kept):
            kept.append(list(z))
    return tuple(tuple(z) for z in kept)


def coords_in_quotient(rep_rows, boundary_rows, vec, field):
    """Coordinates of a cycle's class in the quotient basis ``rep_rows``."""
    k = len(rep_rows)
    combined = list(rep_rows) + list(boundary_rows)
    coords = solve_coords(combined, vec, field)
    if coords is None:
        return None
    return tuple(coords[:k])


def det(rows, field):
    """Determinant of a small square matrix, exact."""
    n = len(rows)
    if n == 0:
        return field.of(1)
    m = [[field.of(x) for x in row] for row in rows]
    sign = 1
    acc = field.of(1)
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not field.is_zero(m[i][c]):
                piv = i
                break
        if piv is None:
            return field.of(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        acc = field.mul(acc, m[c][c])
        inv = field.inv(m[c][c])
        for i in range(c + 1, n):
            if not field.is_zero(m[i][c]):
                f = field.mul(m[i][c], inv)
                m[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(m[i], m[c])]
    return acc if sign == 1 else field.neg(acc)


def int_det(rows):
    """Determinant of a small square integer matrix, stays in ZZ."""
    from .fields import QQ

    d = det(rows, QQ)
    num = Fraction(d)
    assert num.denominator == 1
    return int(num)
