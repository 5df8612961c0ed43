"""Exact scalar arithmetic over Q and over prime fields F_p.

Scalars are plain Python values: ``fractions.Fraction`` over Q, canonical
integer representatives ``0..p-1`` over F_p.  A ``Field`` object carries the
arithmetic so matrices never have to branch on the scalar type.
"""

from fractions import Fraction


class FieldMismatch(Exception):
    pass


class ShapeMismatch(Exception):
    pass


def _is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Field:
    """The rationals (``p is None``) or the prime field F_p."""

    def __init__(self, p=None):
        if p is not None:
            p = int(p)
            if not _is_prime(p):
                raise ValueError("modulus %r is not prime" % (p,))
            if p >= 2 ** 31:
                raise ValueError("modulus %r too large" % (p,))
        self.p = p

    @property
    def is_rational(self):
        return self.p is None

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else "GF(%d)" % self.p

    # -- element constructors -------------------------------------------------

    def zero(self):
        return Fraction(0) if self.p is None else 0

    def one(self):
        return Fraction(1) if self.p is None else 1

    def of(self, n, d=1):
        """The element n/d of this field."""
        if isinstance(n, Fraction):
            n, d = n.numerator, d * n.denominator
        if self.p is None:
            return Fraction(n, d)
        n, d = int(n) % self.p, int(d) % self.p
        if d == 0:
            raise ZeroDivisionError("denominator divisible by %d" % self.p)
        return n * pow(d, -1, self.p) % self.p

    def parse(self, text):
        """Parse "a" or "a/b" (exact, decimal-free)."""
        text = str(text).strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return self.of(int(num), int(den))
        return self.of(int(text))

    def to_str(self, x):
        return str(x)

    # -- arithmetic -----------------------------------------------------------

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def inv(self, a):
        if self.p is None:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / Fraction(a)
        return pow(int(a), -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))


QQ = Field()


def GF(p):
    return Field(p)
