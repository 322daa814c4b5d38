"""Truncated multivariate power-series (jet) arithmetic.

A Jet is an immutable truncated Taylor series in ``num_vars`` formal
variables: a map from multi-indices of total degree <= ``order`` to
coefficients.  Coefficients are exact rationals by default; floats (and
the small exact field extensions in :mod:`ambientcalc.scalars`) are
accepted coefficient types as well.

Every jet carries a *reliable order*: the largest total degree through
which its stored coefficients agree with the Taylor expansion of the
underlying function.  ``None`` means the jet IS the function (an exact
polynomial).  Differentiation of a degree-N truncation of a
non-polynomial loses the top order; the bookkeeping propagates this so
that comparisons never silently trust garbage top coefficients.

All operations are pure; jets are safe to share between workers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from .scalars import scalar_is_zero


class JetError(ValueError):
    pass


def _rel_min(*rs):
    vals = [r for r in rs if r is not None]
    return min(vals) if vals else None


class Jet:
    __slots__ = ("num_vars", "order", "coeffs", "reliable")

    def __init__(self, num_vars, order, coeffs=None, reliable=None, _trusted=False):
        self.num_vars = int(num_vars)
        self.order = int(order)
        if self.order < 0:
            raise JetError("truncation order must be >= 0")
        if coeffs is None:
            coeffs = {}
        if _trusted:
            self.coeffs = coeffs
        else:
            clean = {}
            for m, c in coeffs.items():
                m = tuple(int(e) for e in m)
                if len(m) != self.num_vars or any(e < 0 for e in m):
                    raise JetError(f"bad multi-index {m} for {self.num_vars} variables")
                if sum(m) > self.order:
                    raise JetError(f"multi-index {m} exceeds truncation order {self.order}")
                if isinstance(c, int):
                    c = Fraction(c)
                if not scalar_is_zero(c):
                    clean[m] = c
            self.coeffs = clean
        self.reliable = reliable

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, num_vars, order):
        return cls(num_vars, order, {}, None, _trusted=True)

    @classmethod
    def constant(cls, c, num_vars, order):
        if isinstance(c, int):
            c = Fraction(c)
        m = (0,) * num_vars
        coeffs = {} if scalar_is_zero(c) else {m: c}
        return cls(num_vars, order, coeffs, None, _trusted=True)

    @classmethod
    def variable(cls, i, num_vars, order):
        if not (0 <= i < num_vars):
            raise JetError(f"variable index {i} out of range")
        if order < 1:
            raise JetError("order must be >= 1 to represent a variable")
        m = tuple(1 if j == i else 0 for j in range(num_vars))
        return cls(num_vars, order, {m: Fraction(1)}, None, _trusted=True)

    @classmethod
    def variables(cls, num_vars, order):
        return [cls.variable(i, num_vars, order) for i in range(num_vars)]

    # ---- basic queries -------------------------------------------------

    def _check_compatible(self, other):
        if not isinstance(other, Jet):
            raise JetError(f"expected a Jet, got {type(other).__name__}")
        if self.num_vars != other.num_vars:
            raise JetError(f"variable count mismatch: {self.num_vars} vs {other.num_vars}")
        if self.order != other.order:
            raise JetError(f"truncation order mismatch: {self.order} vs {other.order}")

    def constant_term(self):
        return self.coeffs.get((0,) * self.num_vars, Fraction(0))

    def coefficient(self, m):
        return self.coeffs.get(tuple(m), Fraction(0))

    def valuation(self):
        """Lowest total degree with a nonzero coefficient (None for zero jet)."""
        if not self.coeffs:
            return None
        return min(sum(m) for m in self.coeffs)

    def max_degree(self):
        if not self.coeffs:
            return 0
        return max(sum(m) for m in self.coeffs)

    def is_zero(self, tol=0.0, upto=None):
        """True if all stored coefficients vanish (within reliable order).

        ``upto`` restricts the test to total degree <= upto.
        """
        bound = self.order if self.reliable is None else min(self.reliable, self.order)
        if upto is not None:
            bound = min(bound, upto)
        return all(scalar_is_zero(c, tol) for m, c in self.coeffs.items() if sum(m) <= bound)

    def vanishing_order(self, var=None):
        """Smallest exponent of ``var`` among nonzero terms, or total degree if var is None.

        Returns order+1 when the jet vanishes identically (within truncation).
        """
        if not self.coeffs:
            return self.order + 1
        if var is None:
            return min(sum(m) for m in self.coeffs)
        return min(m[var] for m in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.num_vars == other.num_vars and self.order == other.order
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.num_vars, self.order, frozenset(self.coeffs.items())))

    def equal_within_reliable(self, other, tol=0.0):
        """Compare stored coefficients through the common reliable order."""
        self._check_compatible(other)
        bound = _rel_min(self.reliable, other.reliable)
        if bound is None:
            bound = self.order
        bound = min(bound, self.order)
        keys = set(self.coeffs) | set(other.coeffs)
        zero = Fraction(0)
        for m in keys:
            if sum(m) > bound:
                continue
            if not scalar_is_zero(self.coeffs.get(m, zero) - other.coeffs.get(m, zero), tol):
                return False
        return True

    # ---- ring operations -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, float)) or type(other).__name__ in (
                "GaussRational", "SqrtRational"):
            other = Jet.constant(other, self.num_vars, self.order)
        self._check_compatible(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m)
            s = c if s is None else s + c
            if scalar_is_zero(s):
                out.pop(m, None)
            else:
                out[m] = s
        return Jet(self.num_vars, self.order, out,
                   _rel_min(self.reliable, other.reliable), _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.num_vars, self.order, {m: -c for m, c in self.coeffs.items()},
                   self.reliable, _trusted=True)

    def __sub__(self, other):
        if isinstance(other, Jet):
            return self.__add__(other.__neg__())
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def scale(self, c):
        if isinstance(c, int):
            c = Fraction(c)
        if scalar_is_zero(c):
            return Jet.zero(self.num_vars, self.order)
        return Jet(self.num_vars, self.order, {m: c * v for m, v in self.coeffs.items()},
                   self.reliable, _trusted=True)

    def _with_rel_cap(self, rel):
        if rel is None or (self.reliable is not None and self.reliable <= rel):
            return self
        return Jet(self.num_vars, self.order, self.coeffs, rel, _trusted=True)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check_compatible(other)
        N = self.order
        if not self.coeffs or not other.coeffs:
            return Jet.zero(self.num_vars, N)
        zero_m = (0,) * self.num_vars
        if self.coeffs.keys() == {zero_m}:
            return other.scale(self.coeffs[zero_m])._with_rel_cap(self.reliable)
        if other.coeffs.keys() == {zero_m}:
            return self.scale(other.coeffs[zero_m])._with_rel_cap(other.reliable)
        # encode exponent tuples in base (N+1): no carries since every
        # per-variable exponent is <= total degree <= N
        B = N + 1
        powers = [B ** i for i in range(self.num_vars)]

        def enc(m):
            code = 0
            for e, p in zip(m, powers):
                code += e * p
            return code

        a = sorted((sum(m), enc(m), c) for m, c in self.coeffs.items())
        b = sorted((sum(m), enc(m), c) for m, c in other.coeffs.items())
        if len(a) > len(b):
            a, b = b, a
        acc = {}
        for da, ma, ca in a:
            for db, mb, cb in b:
                if da + db > N:
                    break
                m = ma + mb
                s = acc.get(m)
                p = ca * cb
                acc[m] = p if s is None else s + p
        out = {}
        for code, c in acc.items():
            if scalar_is_zero(c):
                continue
            m = []
            for _ in range(self.num_vars):
                code, e = divmod(code, B)
                m.append(e)
            out[tuple(m)] = c
        # reliability: unknown tail of one factor enters at its reliable order
        # plus the valuation of the other factor
        rel = None
        va = self.valuation()
        vb = other.valuation()
        cands = []
        if self.reliable is not None:
            cands.append(self.reliable + (vb if vb is not None else N + 1))
        if other.reliable is not None:
            cands.append(other.reliable + (va if va is not None else N + 1))
        if cands:
            rel = min(min(cands), N)
        elif self.max_degree() + other.max_degree() > N:
            rel = N  # exact polynomials whose product overflows the truncation
        return Jet(self.num_vars, N, out, rel, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise JetError("only nonnegative integer powers")
        result = Jet.constant(1, self.num_vars, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.invert()
        if isinstance(other, int):
            other = Fraction(other)
        return self.scale(1 / other)

    def invert(self):
        """Multiplicative inverse modulo degree order+1 (constant term must be nonzero)."""
        c0 = self.constant_term()
        if scalar_is_zero(c0):
            raise JetError("jet with zero constant term is not invertible")
        N = self.order
        inv0 = 1 / c0
        # Newton iteration: y_{k+1} = y_k (2 - a y_k), doubling correct order
        y = Jet.constant(inv0, self.num_vars, N)
        if len(self.coeffs) == 1:
            return y
        two = Jet.constant(2, self.num_vars, N)
        correct = 1
        while correct <= N:
            y = y * (two - self * y)
            correct *= 2
        if self.reliable is None:
            # inverse of a nonconstant polynomial is not polynomial: stored
            # coefficients are exact but the tail is unknown
            rel = None if self.max_degree() == 0 else N
        else:
            rel = min(self.reliable, N)
        return Jet(self.num_vars, N, y.coeffs, rel, _trusted=True)

    # ---- calculus -------------------------------------------------------

    def diff(self, var):
        """Formal partial derivative.

        The stored truncation order is kept; for a non-polynomial jet the
        top order becomes unreliable and the reliable order drops by one.
        """
        if not (0 <= var < self.num_vars):
            raise JetError(f"variable index {var} out of range")
        out = {}
        for m, c in self.coeffs.items():
            e = m[var]
            if e == 0:
                continue
            m2 = m[:var] + (e - 1,) + m[var + 1:]
            out[m2] = c * e
        rel = self.reliable
        if rel is not None:
            rel = max(rel - 1, 0)
        return Jet(self.num_vars, self.order, out, rel, _trusted=True)

    def integrate(self, var):
        """Formal antiderivative with zero constant of integration (degree may saturate)."""
        out = {}
        for m, c in self.coeffs.items():
            if sum(m) + 1 > self.order:
                continue
            m2 = m[:var] + (m[var] + 1,) + m[var + 1:]
            out[m2] = c / (m[var] + 1)
        rel = self.reliable if self.reliable is None else min(self.reliable + 1, self.order)
        if rel is None and self.max_degree() + 1 > self.order:
            rel = self.order
        return Jet(self.num_vars, self.order, out, rel, _trusted=True)

    def truncate(self, order):
        """Drop terms above the given total degree (lowering the stored order)."""
        if order >= self.order:
            return self
        out = {m: c for m, c in self.coeffs.items() if sum(m) <= order}
        rel = self.reliable
        if rel is not None:
            rel = min(rel, order)
        if rel is None and self.max_degree() > order:
            rel = order
        return Jet(self.num_vars, order, out, rel, _trusted=True)

    def with_order(self, order):
        """Re-embed at a (typically larger) truncation order.

        Raising the order of a non-polynomial jet does not create
        information: the reliable order stays put.
        """
        if order == self.order:
            return self
        if order < self.order:
            return self.truncate(order)
        rel = self.reliable
        if rel is None and any(sum(m) == self.order for m in self.coeffs):
            # cannot distinguish a polynomial from a saturated truncation
            # unless told; stay conservative only when the top is populated
            # and the jet was marked exact -- polynomials stay exact.
            pass
        return Jet(self.num_vars, order, dict(self.coeffs), rel, _trusted=True)

    def extend_vars(self, num_vars, positions=None):
        """Embed into a larger variable space.

        ``positions[i]`` gives the new index of old variable i; defaults to
        the identity embedding (old variables first).
        """
        if positions is None:
            positions = list(range(self.num_vars))
        out = {}
        for m, c in self.coeffs.items():
            m2 = [0] * num_vars
            for i, e in enumerate(m):
                m2[positions[i]] = e
            out[tuple(m2)] = c
        return Jet(num_vars, self.order, out, self.reliable, _trusted=True)

    def eval_constants(self, values):
        """Evaluate at a scalar point (full substitution of numbers)."""
        if len(values) != self.num_vars:
            raise JetError("wrong number of values")
        total = Fraction(0)
        for m, c in self.coeffs.items():
            term = c
            for e, v in zip(m, values):
                for _ in range(e):
                    term = term * v
            total = total + term
        return total

    def substitute(self, replacements):
        """Simultaneous substitution of jets for all variables.

        ``replacements`` is a list of ``num_vars`` jets, all sharing a common
        variable space and order; the result lives in that space.  This is
        Taylor composition; substituted jets may have nonzero constant term
        only if self is a polynomial (else the tail would contribute).
        """
        if len(replacements) != self.num_vars:
            raise JetError("need one replacement per variable")
        if not replacements:
            raise JetError("cannot substitute in a 0-variable jet")
        proto = replacements[0]
        for r in replacements[1:]:
            proto._check_compatible(r)
        if self.reliable is not None:
            for r in replacements:
                if not scalar_is_zero(r.constant_term()):
                    raise JetError(
                        "substitution with nonzero constant term requires an exact "
                        "polynomial (re-center the outer jet first)")
        N = proto.order
        one = Jet.constant(1, proto.num_vars, N)
        # cache powers of each replacement
        powers = []
        for i, r in enumerate(replacements):
            needed = max((m[i] for m in self.coeffs), default=0)
            ps = [one]
            for _ in range(needed):
                ps.append(ps[-1] * r)
            powers.append(ps)
        total = Jet.zero(proto.num_vars, N)
        for m, c in sorted(self.coeffs.items(), key=lambda kv: sum(kv[0])):
            term = Jet.constant(c, proto.num_vars, N)
            for i, e in enumerate(m):
                if e:
                    term = term * powers[i][e]
            total = total + term
        rel = _rel_min(self.reliable, total.reliable,
                       *[r.reliable for r in replacements])
        if rel is not None:
            rel = min(rel, N)
        return Jet(proto.num_vars, N, total.coeffs, rel, _trusted=True)

    def compose(self, subst):
        """Compose a one-variable jet with ``subst``: self(subst).

        If subst has nonzero constant term c, self is first re-centered at c
        (requires self to be reliable through its full order, e.g. an exact
        polynomial or a full-order truncation; the reliable order of the
        result accounts for the loss).
        """
        if self.num_vars != 1:
            raise JetError("compose requires a one-variable jet (use substitute instead)")
        c0 = subst.constant_term()
        if scalar_is_zero(c0):
            return self.substitute([subst])
        if self.reliable is not None:
            # the unknown tail of a truncation feeds every coefficient after
            # a Taylor shift, so re-centering is only meaningful for exact
            # polynomials
            raise JetError("invalid re-centering request: outer jet is a truncation, "
                           "not an exact polynomial")
        recentered = self.shift_center([c0])
        return recentered.substitute([subst - c0])

    def shift_center(self, deltas):
        """Taylor shift: return the jet of x -> f(x + delta) about 0."""
        if len(deltas) != self.num_vars:
            raise JetError("need one delta per variable")
        vs = Jet.variables(self.num_vars, self.order)
        shifted = [v + d for v, d in zip(vs, deltas)]
        # substitution with constant terms is exact for the stored polynomial;
        # for truncations the reliable order is preserved, not improved
        out = {}
        N = self.order
        one = Jet.constant(1, self.num_vars, N)
        powers = []
        for i, r in enumerate(shifted):
            needed = max((m[i] for m in self.coeffs), default=0)
            ps = [one]
            for _ in range(needed):
                ps.append(ps[-1] * r)
            powers.append(ps)
        total = Jet.zero(self.num_vars, N)
        for m, c in self.coeffs.items():
            term = Jet.constant(c, self.num_vars, N)
            for i, e in enumerate(m):
                if e:
                    term = term * powers[i][e]
            total = total + term
        return Jet(self.num_vars, N, total.coeffs, self.reliable, _trusted=True)

    # ---- analytic helpers (exact on suitable inputs) ---------------------

    def _analytic_series(self, series_coeffs):
        """sum series_coeffs[k] * (self - c0)^k with c0 = 0 required."""
        if not scalar_is_zero(self.constant_term()):
            raise JetError("series expansion requires zero constant term")
        total = Jet.constant(series_coeffs[0], self.num_vars, self.order)
        p = Jet.constant(1, self.num_vars, self.order)
        for k in range(1, len(series_coeffs)):
            p = p * self
            if not scalar_is_zero(series_coeffs[k]):
                total = total + p.scale(series_coeffs[k])
        rel = self.reliable
        coeffs = total.coeffs
        if rel is None and self.max_degree() > 0:
            rel = None if len(series_coeffs) > self.order else self.order
        return Jet(self.num_vars, self.order, coeffs, _rel_min(rel, total.reliable),
                   _trusted=True)

    def exp(self):
        """exp of a jet with zero constant term (exact rational output)."""
        N = self.order
        fact = Fraction(1)
        series = [Fraction(1)]
        for k in range(1, N + 1):
            fact *= k
            series.append(1 / fact)
        out = self._analytic_series(series)
        rel = self.reliable if self.reliable is not None else (
            None if not self.coeffs else N)
        if self.is_zero():
            rel = None
        return Jet(self.num_vars, N, out.coeffs, rel, _trusted=True)

    def log1(self):
        """log of a jet with constant term 1."""
        u = self - 1
        if not scalar_is_zero(u.constant_term()):
            raise JetError("log1 requires constant term 1")
        series = [Fraction(0)]
        for k in range(1, self.order + 1):
            series.append(Fraction((-1) ** (k + 1), k))
        out = u._analytic_series(series)
        rel = u.reliable if u.reliable is not None else (None if not u.coeffs else self.order)
        if u.is_zero():
            rel = None
        return Jet(self.num_vars, self.order, out.coeffs, rel, _trusted=True)

    def sqrt1(self):
        """sqrt of a jet with constant term 1."""
        u = self - 1
        if not scalar_is_zero(u.constant_term()):
            raise JetError("sqrt1 requires constant term 1")
        series = [Fraction(1)]
        c = Fraction(1)
        for k in range(1, self.order + 1):
            c = c * (Fraction(1, 2) - (k - 1)) / k
            series.append(c)
        out = u._analytic_series(series)
        rel = u.reliable if u.reliable is not None else (None if not u.coeffs else self.order)
        if u.is_zero():
            rel = None
        return Jet(self.num_vars, self.order, out.coeffs, rel, _trusted=True)

    # ---- serialization ---------------------------------------------------

    def canonical_text(self):
        """Canonical text form: (multi-index, numerator/denominator) pairs in
        lexicographic multi-index order."""
        parts = []
        for m in sorted(self.coeffs):
            c = self.coeffs[m]
            if isinstance(c, Fraction):
                cs = f"{c.numerator}/{c.denominator}"
            else:
                cs = repr(c)
            parts.append(f"{','.join(map(str, m))}:{cs}")
        head = f"jet[{self.num_vars};{self.order}]"
        return head + "{" + ";".join(parts) + "}"

    def __repr__(self):
        if not self.coeffs:
            return "Jet(0)"
        names = ["x%d" % i for i in range(self.num_vars)]
        terms = []
        for m in sorted(self.coeffs, key=lambda m: (sum(m), m)):
            c = self.coeffs[m]
            mono = "*".join(f"{names[i]}^{e}" if e > 1 else names[i]
                            for i, e in enumerate(m) if e)
            terms.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Jet(" + " + ".join(terms) + ")"


def jet_poly(num_vars, order, terms):
    """Build an exact polynomial jet from {multi-index: coefficient}."""
    return Jet(num_vars, order, {tuple(m): Fraction(c) if isinstance(c, int) else c
                                 for m, c in terms.items()})
