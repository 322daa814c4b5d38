"""Exact scalar coefficient types.

Jet coefficients are duck-typed: anything supporting +, -, *, /, ==
works.  The default exact coefficient is ``fractions.Fraction``; the two
small field extensions here cover the complex (Kaehler) computations and
the 3-form algebra, whose structure constants live in Q(i) and Q(sqrt(d))
respectively.  ``float`` coefficients are accepted everywhere for
non-polynomial inputs; exactness predicates then take a tolerance.
"""

from __future__ import annotations

from fractions import Fraction


def Q(p, q=1):
    """Shorthand rational constructor."""
    return Fraction(p, q)


class GaussRational:
    """Element a + b*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _gauss(other).__sub__(self)

    def __mul__(self, other):
        other = _gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussRational(self.re * other.re - self.im * other.im,
                             self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _gauss(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussRational((self.re * other.re + self.im * other.im) / n,
                             (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        return _gauss(other).__truediv__(self)

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __eq__(self, other):
        other = _gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self):
        return GaussRational(self.re, -self.im)

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


I_UNIT = GaussRational(0, 1)


def _gauss(x):
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussRational(x, 0)
    return NotImplemented


class SqrtRational:
    """Element a + b*sqrt(d) of the real quadratic field Q(sqrt(d)).

    d must be a positive non-square integer; instances with mismatched d
    do not mix.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=3):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)

    def _coerce(self, x):
        if isinstance(x, SqrtRational):
            if x.d != self.d:
                raise ValueError(f"mixing Q(sqrt({self.d})) with Q(sqrt({x.d}))")
            return x
        if isinstance(x, (int, Fraction)):
            return SqrtRational(x, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return SqrtRational(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return SqrtRational(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return SqrtRational(self.a * o.a + self.d * self.b * o.b,
                            self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.a * o.a - self.d * o.b * o.b
        if n == 0:
            raise ZeroDivisionError(f"division by zero in Q(sqrt({self.d}))")
        return SqrtRational((self.a * o.a - self.d * self.b * o.b) / n,
                            (self.b * o.a - self.a * o.b) / n, self.d)

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __neg__(self):
        return SqrtRational(-self.a, -self.b, self.d)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def is_positive(self):
        # sign of a + b*sqrt(d), exactly
        if self.b == 0:
            return self.a > 0
        if self.a == 0:
            return self.b > 0
        if self.a > 0 and self.b > 0:
            return True
        if self.a < 0 and self.b < 0:
            return False
        # opposite signs: compare a^2 against d*b^2
        if self.a > 0:
            return self.a * self.a > self.d * self.b * self.b
        return self.a * self.a < self.d * self.b * self.b

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*sqrt({self.d}))"


def scalar_is_zero(c, tol=0.0):
    """Exact zero test for rationals/field elements, tolerance test for floats."""
    if isinstance(c, float):
        return abs(c) <= tol
    if isinstance(c, complex):
        return abs(c) <= tol
    return not bool(c) if isinstance(c, (GaussRational, SqrtRational)) else c == 0
