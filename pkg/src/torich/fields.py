"""Coefficient fields: the rationals and prime fields F_p.

Field objects are tiny stateless arithmetic providers. Elements of QQ are
python ints or Fractions (mixing is fine, arithmetic stays exact); elements
of F_p are ints reduced into range(p). Fields are hashable so they can key
caches, and ``parse_field`` accepts the spellings used by scene files.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FieldSpecError


def is_prime(p) -> bool:
    if not isinstance(p, int) or p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Rationals:
    characteristic = 0

    def of(self, k):
        if isinstance(k, (int, Fraction)):
            return k
        raise FieldSpecError(f"cannot coerce {k!r} into QQ")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in QQ")
        return Fraction(1, 1) / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / Fraction(b)

    def is_zero(self, a):
        return a == 0

    def key(self):
        return "Q"

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("torich.QQ")


class PrimeField:
    def __init__(self, p):
        if not is_prime(p):
            raise FieldSpecError(f"F_p needs a prime, got {p!r}", p=p)
        self.p = p
        self.characteristic = p

    def of(self, k):
        if isinstance(k, Fraction):
            return (k.numerator * pow(k.denominator, -1, self.p)) % self.p
        if isinstance(k, int):
            return k % self.p
        raise FieldSpecError(f"cannot coerce {k!r} into F_{self.p}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"inverse of 0 in F_{self.p}")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return a % self.p == 0

    def key(self):
        return ("Fp", self.p)

    def __repr__(self):
        return f"F{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("torich.Fp", self.p))


QQ = Rationals()


def parse_field(value):
    """Turn a scene-file field spelling into a Field object.

    Accepts "Q"/"QQ", "F<p>"/"Fp:<p>", {"type": "Q"}, {"type": "Fp", "p": p},
    or an already-built field. Anything else raises FieldSpecError.
    """
    if isinstance(value, (Rationals, PrimeField)):
        return value
    if isinstance(value, str):
        s = value.strip()
        if s.upper() in ("Q", "QQ"):
            return QQ
        up = s.upper()
        if up.startswith("FP:"):
            body = s[3:]
        elif up.startswith("F"):
            body = s[1:]
        else:
            raise FieldSpecError(f"unknown field {value!r}")
        if not body.isdigit():
            raise FieldSpecError(f"unknown field {value!r}")
        return PrimeField(int(body))
    if isinstance(value, dict):
        kind = value.get("type")
        if kind in ("Q", "QQ"):
            return QQ
        if kind == "Fp":
            p = value.get("p")
            if not isinstance(p, int):
                raise FieldSpecError(f"F_p wants an integer p, got {p!r}", p=p)
            return PrimeField(p)
        raise FieldSpecError(f"unknown field type {kind!r}")
    raise FieldSpecError(f"unknown field {value!r}")


def field_name(field) -> str:
    return "Q" if field.characteristic == 0 else f"F{field.characteristic}"
