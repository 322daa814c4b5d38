"""Standard tractor calculus in the splitting induced by a metric.

A rank-r cotractor field has components indexed over the alphabet
{0, 1..n, INF} (INF = n+1), entries jets on the base manifold.  The
splitting scale is recorded; mixed-scale operations are rejected rather
than silently converted.

The connection acts on cotractor components as

    (nabla_i chi)_0   = d_i chi_0 - chi_i
    (nabla_i chi)_j   = nabla^g_i chi_j + P_ij chi_0 + g_ij chi_INF
    (nabla_i chi)_INF = d_i chi_INF - P_i^k chi_k

extended to higher rank by the Leibniz rule; for vector (contravariant)
tractors the dual formulas hold.  The tractor metric in the splitting is
h(U, V) = U^0 V^INF + U^INF V^0 + g_ij U^i V^j.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Dict, Optional, Tuple

from .jets import Jet, JetError
from .tensors import (MetricJet, TensorJet, christoffel, covariant_derivative,
                      laplacian, gradient, hessian, schouten, schouten_trace,
                      trace_free_part)


class TractorError(ValueError):
    pass


class TractorField:
    """Rank-r cotractor (all indices down) in the splitting of ``scale``."""

    __slots__ = ("scale", "rank", "comps", "n")

    def __init__(self, scale: MetricJet, rank: int,
                 comps: Optional[Dict[Tuple[int, ...], Jet]] = None):
        self.scale = scale
        self.rank = rank
        self.n = scale.dim
        self.comps: Dict[Tuple[int, ...], Jet] = {}
        if comps:
            for idx, jet in comps.items():
                self[idx] = jet

    @property
    def alphabet(self):
        return self.n + 2

    def zero_jet(self):
        return Jet.zero(self.scale.num_vars, self.scale.order)

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        return self.comps.get(tuple(idx)) or self.zero_jet()

    def __setitem__(self, idx, jet):
        if isinstance(idx, int):
            idx = (idx,)
        idx = tuple(idx)
        if len(idx) != self.rank or any(not 0 <= a < self.alphabet for a in idx):
            raise TractorError(f"bad tractor index {idx}")
        if not isinstance(jet, Jet):
            jet = Jet.constant(jet, self.scale.num_vars, self.scale.order)
        if jet.coeffs:
            self.comps[idx] = jet
        else:
            self.comps.pop(idx, None)

    def indices(self):
        return product(range(self.alphabet), repeat=self.rank)

    def _same_scale(self, other):
        if self.scale is not other.scale and self.scale.g.comps != other.scale.g.comps:
            raise TractorError("tractor operands live in different splitting scales")

    def __add__(self, other):
        self._same_scale(other)
        out = TractorField(self.scale, self.rank)
        for idx in set(self.comps) | set(other.comps):
            out[idx] = self[idx] + other[idx]
        return out

    def __sub__(self, other):
        self._same_scale(other)
        out = TractorField(self.scale, self.rank)
        for idx in set(self.comps) | set(other.comps):
            out[idx] = self[idx] - other[idx]
        return out

    def __neg__(self):
        return self.map(lambda j: -j)

    def map(self, f):
        out = TractorField(self.scale, self.rank)
        for idx, jet in self.comps.items():
            out[idx] = f(jet)
        return out

    def scale_by(self, c):
        return self.map(lambda j: j.scale(c))

    def is_zero(self, tol=0.0, upto=None):
        return all(j.is_zero(tol, upto) for j in self.comps.values())

    def equal_within_reliable(self, other, tol=0.0):
        self._same_scale(other)
        for idx in set(self.comps) | set(other.comps):
            if not self[idx].equal_within_reliable(other[idx], tol):
                return False
        return True

    def antisymmetric(self):
        if self.rank != 2:
            raise TractorError("antisymmetry check implemented for rank 2")
        for (a, b), jet in self.comps.items():
            if not (self[b, a] + jet).is_zero():
                return False
        return True

    def serialize(self):
        lines = [f"tractor rank={self.rank} scale={self.scale.fingerprint()}"]
        for idx in sorted(self.comps):
            lines.append(f"  {','.join(map(str, idx))} = {self.comps[idx].canonical_text()}")
        return "\n".join(lines)


def tractor_metric_field(g: MetricJet) -> TractorField:
    """The tractor metric h as a rank-2 cotractor: h_0INF = 1, h_ij = g_ij."""
    n = g.dim
    h = TractorField(g, 2)
    one = Jet.constant(1, g.num_vars, g.order)
    h[0, n + 1] = one
    h[n + 1, 0] = one
    for i in range(n):
        for j in range(n):
            h[i + 1, j + 1] = g[i, j]
    return h


def tractor_metric(U: TractorField, V: TractorField) -> Jet:
    """h(U, V) = U^0 V^INF + U^INF V^0 + g_ij U^i V^j for rank-1 tractors
    (components interpreted against the splitting of their common scale)."""
    if U.rank != 1 or V.rank != 1:
        raise TractorError("tractor_metric pairs rank-1 tractors")
    U._same_scale(V)
    g = U.scale
    n = g.dim
    INF = n + 1
    acc = U[0] * V[INF] + U[INF] * V[0]
    for i in range(n):
        for j in range(n):
            gij = g[i, j]
            if gij.coeffs and U[(i + 1,)].coeffs and V[(j + 1,)].coeffs:
                acc = acc + gij * U[(i + 1,)] * V[(j + 1,)]
    return acc


class _ScaleData:
    """Cached per-scale geometry used by the connection."""

    def __init__(self, g: MetricJet):
        self.g = g
        self.gamma = christoffel(g)
        self.P = schouten(g)
        self.J = schouten_trace(g, self.P)
        n = g.dim
        self.P_up = TensorJet(n, 2, g.num_vars, g.order)  # P_i^k
        for i in range(n):
            for k in range(n):
                acc = Jet.zero(g.num_vars, g.order)
                for l in range(n):
                    acc = acc + g.inv(k, l) * self.P[i, l]
                self.P_up[i, k] = acc


_scale_cache: Dict[int, _ScaleData] = {}


def scale_data(g: MetricJet) -> _ScaleData:
    key = id(g)
    if key not in _scale_cache:
        _scale_cache[key] = _ScaleData(g)
    return _scale_cache[key]


def tractor_derivative(chi: TractorField) -> "TractorDerivative":
    """nabla chi: rank-r cotractor with one extra covariant manifold slot.

    Returned object indexes as D[idx, i] with idx a tractor index tuple and
    i a manifold direction (0..n-1)."""
    g = chi.scale
    data = scale_data(g)
    n = g.dim
    INF = n + 1
    out = TractorDerivative(g, chi.rank)
    # correction of a single slot: value at alphabet index a from component b
    #   slot 0:   -chi_i        (from component at slot value i+1, direction i)
    #   slot j:   +P_ij chi_0 + g_ij chi_INF + Levi-Civita on manifold slots
    #   slot INF: -P_i^k chi_k
    for idx in _support_with_neighbors(chi):
        for i in range(n):
            acc = chi[idx].diff(i) if chi[idx].coeffs else chi.zero_jet()
            for s in range(chi.rank):
                a = idx[s]
                if a == 0:
                    v = chi[idx[:s] + (i + 1,) + idx[s + 1:]]
                    if v.coeffs:
                        acc = acc - v
                elif a == INF:
                    for k in range(n):
                        pik = data.P_up[i, k]
                        v = chi[idx[:s] + (k + 1,) + idx[s + 1:]]
                        if pik.coeffs and v.coeffs:
                            acc = acc - pik * v
                else:
                    j = a - 1
                    v0 = chi[idx[:s] + (0,) + idx[s + 1:]]
                    if v0.coeffs:
                        acc = acc + data.P[i, j] * v0
                    vinf = chi[idx[:s] + (INF,) + idx[s + 1:]]
                    if vinf.coeffs:
                        acc = acc + g[i, j] * vinf
                    for k in range(n):
                        gam = data.gamma[k, i, j]
                        v = chi[idx[:s] + (k + 1,) + idx[s + 1:]]
                        if gam.coeffs and v.coeffs:
                            acc = acc - gam * v
            if acc.coeffs:
                out.comps[idx + (i,)] = acc
    return out


def _support_with_neighbors(chi: TractorField):
    """Index tuples where nabla chi can be nonzero: the support itself plus
    every index reachable from it through one connection correction (a
    manifold slot feeds 0, INF and manifold values; 0 and INF slots feed
    manifold values)."""
    n = chi.n
    INF = n + 1
    seen = set(chi.comps)
    receive = set(seen)
    for idx in seen:
        for s in range(chi.rank):
            a = idx[s]
            if 1 <= a <= n:
                receive.add(idx[:s] + (0,) + idx[s + 1:])
                receive.add(idx[:s] + (INF,) + idx[s + 1:])
                for k in range(n):
                    receive.add(idx[:s] + (k + 1,) + idx[s + 1:])
            else:
                for k in range(n):
                    receive.add(idx[:s] + (k + 1,) + idx[s + 1:])
    return receive


class TractorDerivative(TractorField):
    """nabla chi; tractor indices plus one manifold direction index."""

    def __init__(self, scale, rank):
        self.scale = scale
        self.rank = rank
        self.n = scale.dim
        self.comps = {}

    def __getitem__(self, idx):
        return self.comps.get(tuple(idx)) or self.zero_jet()

    def is_zero(self, tol=0.0, upto=None):
        return all(j.is_zero(tol, upto) for j in self.comps.values())


def conformal_change(chi: TractorField, upsilon: Jet, new_scale: MetricJet) -> TractorField:
    """Components of chi in the splitting of ghat = e^{2 upsilon} g.

    Cotractor slots transform as
      chi_0   -> e^{U} chi_0
      chi_j   -> e^{U} (chi_j + U_j chi_0)
      chi_INF -> e^{-U} (chi_INF - U^i chi_i - (1/2) U_k U^k chi_0).
    """
    g = chi.scale
    n = g.dim
    INF = n + 1
    nv, order = g.num_vars, g.order
    eU = upsilon.exp()
    eUm = (-upsilon).exp()
    du = [upsilon.diff(i) for i in range(n)]
    du_up = []
    for i in range(n):
        acc = Jet.zero(nv, order)
        for l in range(n):
            acc = acc + g.inv(i, l) * du[l]
        du_up.append(acc)
    half_du2 = Jet.zero(nv, order)
    for k in range(n):
        half_du2 = half_du2 + du[k] * du_up[k]
    half_du2 = half_du2.scale(Fraction(1, 2))

    def slot_transform(values):
        # values: list over the alphabet of jets for one slot; returns new list
        new = [Jet.zero(nv, order) for _ in range(n + 2)]
        new[0] = eU * values[0]
        for j in range(n):
            new[j + 1] = eU * (values[j + 1] + du[j] * values[0])
        acc = values[INF] - half_du2 * values[0]
        for i in range(n):
            acc = acc - du_up[i] * values[i + 1]
        new[INF] = eUm * acc
        return new

    out = TractorField(new_scale, chi.rank)
    # transform slot by slot
    current: Dict[Tuple[int, ...], Jet] = dict(chi.comps)
    for s in range(chi.rank):
        transformed: Dict[Tuple[int, ...], Jet] = {}
        groups: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], list] = {}
        for idx in set(current):
            key = (idx[:s], idx[s + 1:])
            groups.setdefault(key, None)
        for (pre, post) in groups:
            values = [current.get(pre + (a,) + post, Jet.zero(nv, order))
                      for a in range(n + 2)]
            for a, v in enumerate(slot_transform(values)):
                if v.coeffs:
                    transformed[pre + (a,) + post] = v
        current = transformed
    for idx, jet in current.items():
        out[idx] = jet
    return out


# ---- parallel tractor builders ------------------------------------------------


def parallel_1form_from_sigma(sigma: Jet, g: MetricJet):
    """chi = (sigma, sigma_i, -(1/n)(Lap sigma + J sigma)); residual is the
    trace-free part of (Hess + P) sigma, zero exactly when chi is parallel."""
    data = scale_data(g)
    n = g.dim
    chi = TractorField(g, 1)
    chi[(0,)] = sigma
    for i in range(n):
        chi[(i + 1,)] = sigma.diff(i)
    lap = laplacian(g, sigma, data.gamma)
    chi[(n + 1,)] = (lap + data.J * sigma).scale(Fraction(-1, n))
    hess = hessian(g, sigma, data.gamma)
    resid = trace_free_part(g, hess + data.P.map(lambda j: j * sigma))
    return chi, resid


def parallel_2form_from_alpha(alpha: TensorJet, g: MetricJet):
    """Antisymmetric rank-2 tractor from a 1-form:
    chi_0j = -alpha_j, chi_ij = alpha_[i,j], chi_0INF = (1/n) div alpha,
    chi_jINF = (1/n) (div alpha)_,j + P_j^k alpha_k; the residual is the
    conformal Killing defect alpha_(i,j) - (1/n)(div alpha) g_ij."""
    data = scale_data(g)
    n = g.dim
    INF = n + 1
    nv, order = g.num_vars, g.order
    dalpha = covariant_derivative(alpha, data.gamma)
    div = Jet.zero(nv, order)
    for k in range(n):
        for l in range(n):
            gkl = g.inv(k, l)
            if gkl.coeffs and dalpha[k, l].coeffs:
                div = div + gkl * dalpha[k, l]
    chi = TractorField(g, 2)
    for j in range(n):
        chi[0, j + 1] = -alpha[(j,)]
        chi[j + 1, 0] = alpha[(j,)]
    half = Fraction(1, 2)
    for i in range(n):
        for j in range(i + 1, n):
            v = (dalpha[i, j] - dalpha[j, i]).scale(half)
            chi[i + 1, j + 1] = v
            chi[j + 1, i + 1] = -v
    chi[0, INF] = div.scale(Fraction(1, n))
    chi[INF, 0] = -chi[0, INF]
    div_n = div.scale(Fraction(1, n))
    for j in range(n):
        acc = div_n.diff(j)
        for k in range(n):
            pjk = data.P_up[j, k]
            if pjk.coeffs and alpha[(k,)].coeffs:
                acc = acc + pjk * alpha[(k,)]
        chi[j + 1, INF] = acc
        chi[INF, j + 1] = -acc
    resid = TensorJet(n, 2, nv, order)
    for i in range(n):
        for j in range(i, n):
            v = (dalpha[i, j] + dalpha[j, i]).scale(half) - div_n * g[i, j]
            resid[i, j] = v
            resid[j, i] = v
    return chi, resid


# ---- insertion and determining maps --------------------------------------------


def insertion_endomorphism(eta: TensorJet, g: MetricJet):
    """The adjoint tractor I(eta): nonzero blocks I(eta)^0_i = eta_i and
    I(eta)^j_INF = -eta^j; returned as a dict (upper, lower) -> Jet."""
    n = g.dim
    INF = n + 1
    out: Dict[Tuple[int, int], Jet] = {}
    for i in range(n):
        if eta[(i,)].coeffs:
            out[(0, i + 1)] = eta[(i,)]
    for j in range(n):
        acc = Jet.zero(g.num_vars, g.order)
        for l in range(n):
            acc = acc + g.inv(j, l) * eta[(l,)]
        if acc.coeffs:
            out[(j + 1, INF)] = -acc
    return out


def determining_map(chi: TractorField, eta: TensorJet, g: MetricJet) -> TractorField:
    """F_chi(eta) = I(eta) . chi, the adjoint action on cotractors:
    (K . chi)_{I1..Ir} = - sum_s K^J_{I_s} chi_{..J..}."""
    K = insertion_endomorphism(eta, g)
    out = TractorField(g, chi.rank)
    for (upper, lower), kjet in K.items():
        for idx, cjet in chi.comps.items():
            for s in range(chi.rank):
                if idx[s] == upper:
                    tgt = idx[:s] + (lower,) + idx[s + 1:]
                    out[tgt] = out[tgt] - kjet * cjet
    return out


def determining_rank(chi: TractorField, g: MetricJet) -> int:
    """Pointwise rank at the base point of eta -> F_chi(eta).

    The section-level injectivity that defines a determining tractor is
    replaced by this decidable pointwise surrogate."""
    from .linalg import mat_rank
    n = g.dim
    rows = []
    cols = []
    for b in range(n):
        eta = TensorJet(n, 1, g.num_vars, g.order)
        eta[(b,)] = Jet.constant(1, g.num_vars, g.order)
        F = determining_map(chi, eta, g)
        col = {idx: jet.constant_term() for idx, jet in F.comps.items()}
        cols.append(col)
    support = sorted(set().union(*[set(c) for c in cols]) if cols else set())
    matrix = [[cols[b].get(idx, Fraction(0)) for b in range(n)] for idx in support]
    if not matrix:
        return 0
    return mat_rank(matrix)
