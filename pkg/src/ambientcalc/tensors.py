"""Pseudo-Riemannian tensor calculus on jets at a point.

Curvature conventions (pinned once, used everywhere):

* Levi-Civita connection  Gamma^k_ij = (1/2) g^kl (d_i g_jl + d_j g_il - d_l g_ij).
* Covariant Riemann tensor R_ijkl normalized so that for g = delta + h with
  h small,  R_ijkl = (1/2)(h_il,jk - h_jl,ik - h_ik,jl + h_jk,il).
  It is antisymmetric in (ij) and (kl), symmetric under pair exchange.
* Ric_jl = g^ik R_ijkl; with this sign the round unit n-sphere has
  Ric = (n-1) g.
* Schouten: (n-2) P_ij = Ric_ij - R/(2(n-1)) g_ij;  J = g^ij P_ij.
* Weyl: W = R - (P kn g), the Kulkarni-Nomizu product chosen so W is
  trace-free in every pair.
* Cotton: C_jkl = P_jk,l - P_jl,k (comma = Levi-Civita covariant
  derivative, differentiation indices appended on the right).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple

from .jets import Jet, JetError
from .linalg import jet_mat_inverse, signature_of_symmetric


class TensorJet:
    """Covariant tensor with Jet components at a point.

    Components are stored sparsely: missing index tuples are zero.  All
    entries share the variable count and truncation order of the
    prototype.
    """

    __slots__ = ("dim", "rank", "num_vars", "order", "comps")

    def __init__(self, dim, rank, num_vars, order, comps=None):
        self.dim = dim
        self.rank = rank
        self.num_vars = num_vars
        self.order = order
        self.comps = {}
        if comps:
            for idx, jet in comps.items():
                self[tuple(idx)] = jet

    @classmethod
    def zeros(cls, dim, rank, num_vars, order):
        return cls(dim, rank, num_vars, order)

    def zero_jet(self):
        return Jet.zero(self.num_vars, self.order)

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        return self.comps.get(tuple(idx)) or self.zero_jet()

    def __setitem__(self, idx, jet):
        if isinstance(idx, int):
            idx = (idx,)
        idx = tuple(idx)
        if len(idx) != self.rank or any(not 0 <= i < self.dim for i in idx):
            raise JetError(f"bad index {idx} for rank-{self.rank} dim-{self.dim} tensor")
        if jet.num_vars != self.num_vars or jet.order != self.order:
            raise JetError("component jet has mismatched variables or order")
        if jet.coeffs:
            self.comps[idx] = jet
        else:
            self.comps.pop(idx, None)

    def indices(self):
        from itertools import product
        return product(range(self.dim), repeat=self.rank)

    def map(self, f):
        out = TensorJet(self.dim, self.rank, self.num_vars, self.order)
        for idx, jet in self.comps.items():
            out[idx] = f(jet)
        return out

    def __add__(self, other):
        self._compat(other)
        out = TensorJet(self.dim, self.rank, self.num_vars, self.order)
        for idx in set(self.comps) | set(other.comps):
            out[idx] = self[idx] + other[idx]
        return out

    def __sub__(self, other):
        self._compat(other)
        out = TensorJet(self.dim, self.rank, self.num_vars, self.order)
        for idx in set(self.comps) | set(other.comps):
            out[idx] = self[idx] - other[idx]
        return out

    def __neg__(self):
        return self.map(lambda j: -j)

    def scale(self, c):
        if isinstance(c, Jet):
            return self.map(lambda j: j * c)
        return self.map(lambda j: j.scale(c))

    def _compat(self, other):
        if (self.dim, self.rank, self.num_vars, self.order) != (
                other.dim, other.rank, other.num_vars, other.order):
            raise JetError("tensor shape mismatch")

    def is_zero(self, tol=0.0, upto=None):
        return all(j.is_zero(tol, upto) for j in self.comps.values())

    def equal_within_reliable(self, other, tol=0.0):
        self._compat(other)
        for idx in set(self.comps) | set(other.comps):
            if not self[idx].equal_within_reliable(other[idx], tol):
                return False
        return True

    def symmetric_in(self, slots=None):
        slots = slots or (0, 1)
        a, b = slots
        for idx, jet in self.comps.items():
            jdx = list(idx)
            jdx[a], jdx[b] = jdx[b], jdx[a]
            if not (self[tuple(jdx)] - jet).is_zero():
                return False
        return True

    def antisymmetric_in(self, slots):
        a, b = slots
        for idx, jet in self.comps.items():
            jdx = list(idx)
            jdx[a], jdx[b] = jdx[b], jdx[a]
            if not (self[tuple(jdx)] + jet).is_zero():
                return False
        return True

    def diff(self, var):
        """Componentwise partial derivative (not covariant)."""
        return self.map(lambda j: j.diff(var))

    def value_at_origin(self):
        """Constant terms as a nested plain array (dict index -> scalar)."""
        return {idx: self[idx].constant_term() for idx in self.indices()}

    def serialize(self):
        lines = [f"tensor dim={self.dim} rank={self.rank}"]
        for idx in sorted(self.comps):
            lines.append(f"  {','.join(map(str, idx))} = {self.comps[idx].canonical_text()}")
        return "\n".join(lines)


def tensor_from_rows(rows, num_vars, order):
    """Rank-2 TensorJet from a nested list of Jets/scalars."""
    dim = len(rows)
    t = TensorJet(dim, 2, num_vars, order)
    for i in range(dim):
        for j in range(dim):
            v = rows[i][j]
            if not isinstance(v, Jet):
                v = Jet.constant(v, num_vars, order)
            t[i, j] = v
    return t


class MetricJet:
    """Symmetric invertible metric with cached inverse and signature."""

    def __init__(self, g: TensorJet):
        if g.rank != 2:
            raise JetError("metric must be rank 2")
        if not g.symmetric_in((0, 1)):
            raise JetError("metric must be symmetric")
        self.g = g
        self.dim = g.dim
        self.num_vars = g.num_vars
        self.order = g.order
        const = [[g[i, j].constant_term() for j in range(self.dim)] for i in range(self.dim)]
        p, q = signature_of_symmetric(const)
        if p + q != self.dim:
            raise JetError("metric is degenerate at the base point")
        self.signature = (p, q)
        rows = [[g[i, j] for j in range(self.dim)] for i in range(self.dim)]
        inv_rows = jet_mat_inverse(rows)
        self.g_inv = TensorJet(self.dim, 2, self.num_vars, self.order)
        for i in range(self.dim):
            for j in range(self.dim):
                self.g_inv[i, j] = inv_rows[i][j]

    def __getitem__(self, idx):
        return self.g[idx]

    def inv(self, i, j):
        return self.g_inv[i, j]

    def serialize(self):
        return self.g.serialize()

    def fingerprint(self):
        import hashlib
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:16]


def metric_from_rows(rows, num_vars, order):
    return MetricJet(tensor_from_rows(rows, num_vars, order))


def flat_metric(diag, num_vars, order):
    """Constant diagonal metric with the given diagonal entries."""
    dim = len(diag)
    t = TensorJet(dim, 2, num_vars, order)
    for i, d in enumerate(diag):
        t[i, i] = Jet.constant(d, num_vars, order)
    return MetricJet(t)


# ---- connection and curvature ------------------------------------------------


def christoffel(g: MetricJet) -> TensorJet:
    """Levi-Civita symbols Gamma^k_ij stored at index (k, i, j)."""
    n = g.dim
    dg = [g.g.diff(l) for l in range(n)]
    out = TensorJet(n, 3, g.num_vars, g.order)
    half = Fraction(1, 2)
    for i in range(n):
        for j in range(i, n):
            # lower symbol [ij,l]
            lowered = []
            for l in range(n):
                lowered.append((dg[i][j, l] + dg[j][i, l] - dg[l][i, j]).scale(half))
            for k in range(n):
                acc = Jet.zero(g.num_vars, g.order)
                for l in range(n):
                    gl = g.inv(k, l)
                    if gl.coeffs and lowered[l].coeffs:
                        acc = acc + gl * lowered[l]
                out[k, i, j] = acc
                if i != j:
                    out[k, j, i] = acc
    return out


def covariant_derivative(T: TensorJet, gamma: TensorJet) -> TensorJet:
    """Covariant derivative of a covariant tensor; new index appended last."""
    n = T.dim
    out = TensorJet(n, T.rank + 1, T.num_vars, T.order)
    for idx in T.indices():
        jet = T[idx]
        has = bool(jet.coeffs)
        for m in range(n):
            acc = jet.diff(m) if has else T.zero_jet()
            for s in range(T.rank):
                for k in range(n):
                    gam = gamma[k, m, idx[s]]
                    if not gam.coeffs:
                        continue
                    rep = idx[:s] + (k,) + idx[s + 1:]
                    tv = T[rep]
                    if tv.coeffs:
                        acc = acc - gam * tv
            if acc.coeffs:
                out[idx + (m,)] = acc
    return out


def gradient(g: MetricJet, f: Jet) -> TensorJet:
    out = TensorJet(g.dim, 1, g.num_vars, g.order)
    for i in range(g.dim):
        out[(i,)] = f.diff(i)
    return out


def hessian(g: MetricJet, f: Jet, gamma=None) -> TensorJet:
    """Covariant Hessian of a scalar."""
    gamma = gamma if gamma is not None else christoffel(g)
    return covariant_derivative(gradient(g, f), gamma)


def laplacian(g: MetricJet, f: Jet, gamma=None) -> Jet:
    h = hessian(g, f, gamma)
    acc = Jet.zero(g.num_vars, g.order)
    for i in range(g.dim):
        for j in range(g.dim):
            gij = g.inv(i, j)
            if gij.coeffs and h[i, j].coeffs:
                acc = acc + gij * h[i, j]
    return acc


def riemann(g: MetricJet, gamma=None) -> TensorJet:
    """Covariant curvature R_ijkl in the convention documented above."""
    n = g.dim
    gamma = gamma if gamma is not None else christoffel(g)
    dgamma = [gamma.diff(a) for a in range(n)]
    # up[m,k,i,j] = d_i Gamma^m_jk - d_j Gamma^m_ik
    #              + Gamma^m_ip Gamma^p_jk - Gamma^m_jp Gamma^p_ik
    up = TensorJet(n, 4, g.num_vars, g.order)
    for m in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(i + 1, n):
                    acc = dgamma[i][m, j, k] - dgamma[j][m, i, k]
                    for p in range(n):
                        a1 = gamma[m, i, p]
                        b1 = gamma[p, j, k]
                        if a1.coeffs and b1.coeffs:
                            acc = acc + a1 * b1
                        a2 = gamma[m, j, p]
                        b2 = gamma[p, i, k]
                        if a2.coeffs and b2.coeffs:
                            acc = acc - a2 * b2
                    if acc.coeffs:
                        up[m, k, i, j] = acc
                        up[m, k, j, i] = -acc
    out = TensorJet(n, 4, g.num_vars, g.order)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    acc = Jet.zero(g.num_vars, g.order)
                    for m in range(n):
                        gl = g[l, m]
                        um = up[m, k, j, i]
                        if gl.coeffs and um.coeffs:
                            acc = acc + gl * um
                    if acc.coeffs:
                        out[i, j, k, l] = acc
    return out


def ricci(g: MetricJet, riem=None) -> TensorJet:
    n = g.dim
    riem = riem if riem is not None else riemann(g)
    out = TensorJet(n, 2, g.num_vars, g.order)
    for j in range(n):
        for l in range(j, n):
            acc = Jet.zero(g.num_vars, g.order)
            for i in range(n):
                for k in range(n):
                    gik = g.inv(i, k)
                    r = riem[i, j, k, l]
                    if gik.coeffs and r.coeffs:
                        acc = acc + gik * r
            out[j, l] = acc
            out[l, j] = acc
    return out


def scalar_curvature(g: MetricJet, ric=None) -> Jet:
    ric = ric if ric is not None else ricci(g)
    acc = Jet.zero(g.num_vars, g.order)
    for j in range(g.dim):
        for l in range(g.dim):
            gjl = g.inv(j, l)
            if gjl.coeffs and ric[j, l].coeffs:
                acc = acc + gjl * ric[j, l]
    return acc


def schouten(g: MetricJet, ric=None) -> TensorJet:
    n = g.dim
    if n < 3:
        raise JetError("Schouten tensor needs dimension >= 3")
    ric = ric if ric is not None else ricci(g)
    R = scalar_curvature(g, ric)
    out = TensorJet(n, 2, g.num_vars, g.order)
    c = Fraction(1, 2 * (n - 1))
    inv = Fraction(1, n - 2)
    for i in range(n):
        for j in range(i, n):
            val = (ric[i, j] - (R * g[i, j]).scale(c)).scale(inv)
            out[i, j] = val
            out[j, i] = val
    return out


def schouten_trace(g: MetricJet, P=None) -> Jet:
    """J = g^ij P_ij = R / (2(n-1))."""
    P = P if P is not None else schouten(g)
    acc = Jet.zero(g.num_vars, g.order)
    for i in range(g.dim):
        for j in range(g.dim):
            gij = g.inv(i, j)
            if gij.coeffs and P[i, j].coeffs:
                acc = acc + gij * P[i, j]
    return acc


def kulkarni_nomizu(a: TensorJet, b: TensorJet) -> TensorJet:
    """(a kn b)_ijkl = a_ik b_jl + a_jl b_ik - a_il b_jk - a_jk b_il."""
    n = a.dim
    out = TensorJet(n, 4, a.num_vars, a.order)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    acc = a[i, k] * b[j, l] + a[j, l] * b[i, k] \
                        - a[i, l] * b[j, k] - a[j, k] * b[i, l]
                    if acc.coeffs:
                        out[i, j, k, l] = acc
    return out


def weyl(g: MetricJet, riem=None, P=None) -> TensorJet:
    n = g.dim
    if n < 3:
        raise JetError("Weyl tensor needs dimension >= 3")
    riem = riem if riem is not None else riemann(g)
    if n == 3:
        return TensorJet.zeros(n, 4, g.num_vars, g.order)
    P = P if P is not None else schouten(g)
    return riem - kulkarni_nomizu(P, g.g)


def cotton(g: MetricJet, P=None, gamma=None) -> TensorJet:
    """C_jkl = P_jk,l - P_jl,k."""
    n = g.dim
    gamma = gamma if gamma is not None else christoffel(g)
    P = P if P is not None else schouten(g)
    dP = covariant_derivative(P, gamma)
    out = TensorJet(n, 3, g.num_vars, g.order)
    for j in range(n):
        for k in range(n):
            for l in range(k + 1, n):
                val = dP[j, k, l] - dP[j, l, k]
                if val.coeffs:
                    out[j, k, l] = val
                    out[j, l, k] = -val
    return out


def trace_free_part(g: MetricJet, S: TensorJet) -> TensorJet:
    """tf(S) = S - (tr_g S / n) g for symmetric 2-tensors."""
    tr = Jet.zero(g.num_vars, g.order)
    for i in range(g.dim):
        for j in range(g.dim):
            gij = g.inv(i, j)
            if gij.coeffs and S[i, j].coeffs:
                tr = tr + gij * S[i, j]
    return S - g.g.scale(tr.scale(Fraction(1, g.dim)))


def conformal_rescale(g: MetricJet, upsilon: Jet) -> MetricJet:
    """ghat = e^{2 Upsilon} g (Upsilon must have zero constant term in exact mode)."""
    factor = upsilon.scale(2).exp()
    return MetricJet(g.g.map(lambda j: j * factor))
