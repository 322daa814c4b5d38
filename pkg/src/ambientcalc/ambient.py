"""Normal-form ambient metrics on the t = 1 slice.

An ambient metric in normal form relative to g is
``2 t dt drho + 2 rho dt^2 + t^2 g_rho`` on R_+ x M x R.  Everything here
is stored on the slice t = 1 as jets in (x^1..x^n, rho); the t-dependence
is reconstructed from homogeneity: a component of a weight-w object with
``z`` covariant and ``u`` contravariant 0-indices carries the implicit
factor t^(w - z + u), so d/dt at t = 1 is multiplication by that
exponent.  Index alphabet: 0 = dilation (t) direction, 1..n = base
manifold, n+1 = rho (written ``INF`` below).

Curvature follows the conventions of :mod:`ambientcalc.tensors`.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Tuple

from .jets import Jet, JetError
from .linalg import jet_mat_inverse, solve_affine_exact
from .tensors import MetricJet, TensorJet, christoffel, ricci, schouten


class AmbientError(ValueError):
    pass


def embed_base_jet(jet: Jet, joint_order: int) -> Jet:
    """Embed an x-jet into the (x, rho) variable space."""
    out = jet.extend_vars(jet.num_vars + 1)
    return out.with_order(joint_order)


def rho_coefficient(jet: Jet, m: int, x_order: int) -> Jet:
    """Extract the coefficient of rho^m as an x-jet."""
    nx = jet.num_vars - 1
    out = {}
    for mono, c in jet.coeffs.items():
        if mono[nx] == m and sum(mono[:nx]) <= x_order:
            out[mono[:nx]] = c
    rel = jet.reliable
    if rel is not None:
        rel = rel - m
        if rel < 0:
            return Jet(nx, x_order, {}, 0, _trusted=True)
    return Jet(nx, x_order, out, rel, _trusted=True)


def rho_vanishing_order(jet: Jet, cap: int) -> int:
    """Largest m <= cap with jet = O(rho^m), honoring the reliable order."""
    nx = jet.num_vars - 1
    bound = jet.order if jet.reliable is None else min(jet.reliable, jet.order)
    best = cap
    for mono, c in jet.coeffs.items():
        if sum(mono) > bound:
            continue
        if mono[nx] < best:
            best = mono[nx]
    return best


class AmbientTensor:
    """Covariant tensor on the ambient space at t = 1.

    ``weight`` is the homogeneity degree w in (dilation pullback) = s^w.
    Components are jets in (x, rho); missing entries are zero.
    """

    __slots__ = ("n", "rank", "weight", "num_vars", "order", "comps")

    def __init__(self, n, rank, weight, num_vars, order, comps=None):
        self.n = n
        self.rank = rank
        self.weight = weight
        self.num_vars = num_vars
        self.order = order
        self.comps: Dict[Tuple[int, ...], Jet] = {}
        if comps:
            for idx, jet in comps.items():
                self[idx] = jet

    @property
    def alphabet(self):
        return self.n + 2

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
        if len(idx) != self.rank or any(not 0 <= i < self.alphabet for i in idx):
            raise AmbientError(f"bad ambient index {idx}")
        if jet.coeffs:
            self.comps[idx] = jet
        else:
            self.comps.pop(idx, None)

    def indices(self):
        return product(range(self.alphabet), repeat=self.rank)

    def __add__(self, other):
        out = AmbientTensor(self.n, self.rank, self.weight, self.num_vars, self.order)
        for idx in set(self.comps) | set(other.comps):
            out[idx] = self[idx] + other[idx]
        return out

    def __sub__(self, other):
        out = AmbientTensor(self.n, self.rank, self.weight, self.num_vars, self.order)
        for idx in set(self.comps) | set(other.comps):
            out[idx] = self[idx] - other[idx]
        return out

    def __neg__(self):
        return self.map(lambda j: -j)

    def map(self, f):
        out = AmbientTensor(self.n, self.rank, self.weight, self.num_vars, self.order)
        for idx, jet in self.comps.items():
            out[idx] = f(jet)
        return out

    def is_zero(self, tol=0.0, upto=None):
        return all(j.is_zero(tol, upto) for j in self.comps.values())

    def min_rho_order(self, cap):
        """Componentwise rho-vanishing order, minimized."""
        best = cap
        for jet in self.comps.values():
            best = min(best, rho_vanishing_order(jet, cap))
        return best

    def serialize(self):
        lines = [f"ambient-tensor n={self.n} rank={self.rank} weight={self.weight}"]
        for idx in sorted(self.comps):
            lines.append(f"  {','.join(map(str, idx))} = {self.comps[idx].canonical_text()}")
        return "\n".join(lines)


class AmbientMetric:
    """Normal-form ambient metric data: base metric and the rho-series of g_rho.

    ``rho_series[m]`` is the coefficient of rho^m (a symmetric TensorJet on
    the base).  ``ambiguity`` records an injected trace-free order-n/2
    coefficient for even n; its divergence constraint is accepted, not
    checked.
    """

    def __init__(self, g: MetricJet, rho_series: List[TensorJet],
                 joint_order: Optional[int] = None, ambiguity: Optional[TensorJet] = None):
        self.g = g
        self.n = g.dim
        self.rho_series = list(rho_series)
        self.parity = "even" if self.n % 2 == 0 else "odd"
        self.ambiguity = ambiguity
        x_order = g.order
        self.x_order = x_order
        self.rho_order = len(rho_series) - 1
        if joint_order is None:
            joint_order = x_order + self.rho_order
        self.joint_order = joint_order
        nv = g.num_vars + 1
        self.num_vars = nv
        rho = Jet.variable(nv - 1, nv, joint_order)
        grho = TensorJet(self.n, 2, nv, joint_order)
        for i in range(self.n):
            for j in range(i, self.n):
                acc = Jet.zero(nv, joint_order)
                p = Jet.constant(1, nv, joint_order)
                for m, coef in enumerate(self.rho_series):
                    cij = coef[i, j]
                    if cij.coeffs:
                        acc = acc + embed_base_jet(cij, joint_order) * p
                    if m < len(self.rho_series) - 1:
                        p = p * rho
                grho[i, j] = acc
                grho[j, i] = acc
        self.g_rho = grho
        rows = [[grho[i, j] for j in range(self.n)] for i in range(self.n)]
        inv = jet_mat_inverse(rows)
        self.g_rho_inv = TensorJet(self.n, 2, nv, joint_order)
        for i in range(self.n):
            for j in range(self.n):
                self.g_rho_inv[i, j] = inv[i][j]
        self.g_rho_prime = grho.map(lambda j: j.diff(nv - 1))
        self._christoffels = None
        self._curvature_cache: Dict[int, AmbientTensor] = {}

    # ---- the metric and its inverse as slice tensors ----------------------

    def metric_tensor(self) -> AmbientTensor:
        n, nv, N = self.n, self.num_vars, self.joint_order
        gt = AmbientTensor(n, 2, 2, nv, N)
        rho = Jet.variable(nv - 1, nv, N)
        gt[0, 0] = rho.scale(2)
        gt[0, n + 1] = Jet.constant(1, nv, N)
        gt[n + 1, 0] = Jet.constant(1, nv, N)
        for i in range(n):
            for j in range(n):
                gt[i + 1, j + 1] = self.g_rho[i, j]
        return gt

    def inverse_components(self) -> Dict[Tuple[int, int], Jet]:
        n, nv, N = self.n, self.num_vars, self.joint_order
        rho = Jet.variable(nv - 1, nv, N)
        out = {(0, n + 1): Jet.constant(1, nv, N), (n + 1, 0): Jet.constant(1, nv, N),
               (n + 1, n + 1): rho.scale(-2)}
        for i in range(n):
            for j in range(n):
                jet = self.g_rho_inv[i, j]
                if jet.coeffs:
                    out[(i + 1, j + 1)] = jet
        return out

    # ---- Christoffel symbols of the normal form ---------------------------

    def christoffels(self) -> Dict[Tuple[int, int, int], Jet]:
        """Gamma~^K_IJ at t = 1, keyed (K, I, J); zeros omitted.

        Block formulas of the normal form: the only nonzero entries are
        Gamma~^0_ij = -(1/2) g'_ij, Gamma~^k_0j = delta_j^k,
        Gamma~^k_ij = Gamma(g_rho), Gamma~^k_(i,rho) = (1/2) g^kl g'_il,
        Gamma~^rho_(0,rho) = 1, Gamma~^rho_ij = -g_ij + rho g'_ij
        (t-powers implicit via homogeneity).
        """
        if self._christoffels is not None:
            return self._christoffels
        n, nv, N = self.n, self.num_vars, self.joint_order
        INF = n + 1
        rho = Jet.variable(nv - 1, nv, N)
        out: Dict[Tuple[int, int, int], Jet] = {}
        half = Fraction(1, 2)

        # base Christoffels of g_rho (x-derivatives only, rho a parameter)
        dg = [self.g_rho.map(lambda j, a=a: j.diff(a)) for a in range(n)]
        for i in range(n):
            for j in range(i, n):
                lowered = [(dg[i][j, l] + dg[j][i, l] - dg[l][i, j]).scale(half)
                           for l in range(n)]
                for k in range(n):
                    acc = Jet.zero(nv, N)
                    for l in range(n):
                        gl = self.g_rho_inv[k, l]
                        if gl.coeffs and lowered[l].coeffs:
                            acc = acc + gl * lowered[l]
                    if acc.coeffs:
                        out[(k + 1, i + 1, j + 1)] = acc
                        if i != j:
                            out[(k + 1, j + 1, i + 1)] = acc

        one = Jet.constant(1, nv, N)
        for i in range(n):
            for j in range(n):
                gp = self.g_rho_prime[i, j]
                if gp.coeffs:
                    out[(0, i + 1, j + 1)] = gp.scale(-half)
                val = -self.g_rho[i, j] + rho * gp
                if val.coeffs:
                    out[(INF, i + 1, j + 1)] = val
        for k in range(n):
            out[(k + 1, 0, k + 1)] = one
            out[(k + 1, k + 1, 0)] = one
        out[(INF, 0, INF)] = one
        out[(INF, INF, 0)] = one
        for k in range(n):
            for j in range(n):
                acc = Jet.zero(nv, N)
                for l in range(n):
                    gl = self.g_rho_inv[k, l]
                    gp = self.g_rho_prime[j, l]
                    if gl.coeffs and gp.coeffs:
                        acc = acc + gl * gp
                if acc.coeffs:
                    val = acc.scale(half)
                    out[(k + 1, j + 1, INF)] = val
                    out[(k + 1, INF, j + 1)] = val
        self._christoffels = out
        return out

    def serialize(self):
        lines = [f"ambient-metric n={self.n} rho-order={self.rho_order} "
                 f"parity={self.parity} ambiguity={'yes' if self.ambiguity else 'no'}"]
        for m, coef in enumerate(self.rho_series):
            lines.append(f"[rho^{m}]")
            lines.append(coef.serialize())
        return "\n".join(lines)


def _gamma_t_exponent(key):
    k, i, j = key
    return (1 if k == 0 else 0) - (1 if i == 0 else 0) - (1 if j == 0 else 0)


def ambient_partial(A: AmbientMetric, T: AmbientTensor, direction: int) -> AmbientTensor:
    """Coordinate derivative of a slice tensor in the given alphabet direction."""
    n = A.n
    out = AmbientTensor(n, T.rank, T.weight, T.num_vars, T.order)
    if direction == 0:
        for idx, jet in T.comps.items():
            z = sum(1 for a in idx if a == 0)
            e = T.weight - z
            if e:
                out[idx] = jet.scale(e)
        return out
    var = direction - 1 if direction <= n else T.num_vars - 1
    for idx, jet in T.comps.items():
        d = jet.diff(var)
        if d.coeffs:
            out[idx] = d
    return out


def ambient_covariant_derivative(A: AmbientMetric, T: AmbientTensor) -> AmbientTensor:
    """nabla~ T with the differentiation index appended last."""
    n = A.n
    gam = A.christoffels()
    out = AmbientTensor(n, T.rank + 1, T.weight, T.num_vars, T.order)
    partials = [ambient_partial(A, T, M) for M in range(n + 2)]
    # candidate result indices: partial-derivative terms keep the component
    # index; a correction -Gamma^K_{M J} T[.. K ..] lands on slot value J
    candidates = set()
    comp_idx = set(T.comps)
    for M in range(n + 2):
        for idx in comp_idx:
            candidates.add(idx + (M,))
        for (K, I, J) in gam:
            if I != M:
                continue
            for idx in comp_idx:
                for s in range(T.rank):
                    if idx[s] == K:
                        candidates.add(idx[:s] + (J,) + idx[s + 1:] + (M,))
    for full in candidates:
        idx, M = full[:-1], full[-1]
        acc = partials[M][idx]
        for s in range(T.rank):
            for K in range(n + 2):
                gjet = gam.get((K, M, idx[s]))
                if gjet is None:
                    continue
                tv = T[idx[:s] + (K,) + idx[s + 1:]]
                if tv.coeffs:
                    acc = acc - gjet * tv
        if acc.coeffs:
            out[full] = acc
    return out


def ambient_ricci(A: AmbientMetric) -> AmbientTensor:
    """Ricci tensor of the normal-form metric at t = 1 (weight 0 object...
    stored with weight 2 metric conventions: Ric has weight 0 + the index
    rule; as a covariant 2-tensor of a homothety-invariant connection its
    weight is 0)."""
    n, nv, N = A.n, A.num_vars, A.joint_order
    gam = A.christoffels()
    out = AmbientTensor(n, 2, 0, nv, N)

    def dgamma(direction, key):
        jet = gam.get(key)
        if jet is None:
            return None
        if direction == 0:
            e = _gamma_t_exponent(key)
            return jet.scale(e) if e else None
        var = direction - 1 if direction <= n else nv - 1
        d = jet.diff(var)
        return d if d.coeffs else None

    alphabet = n + 2
    for Jd in range(alphabet):
        for L in range(Jd, alphabet):
            acc = Jet.zero(nv, N)
            for M in range(alphabet):
                d1 = dgamma(M, (M, L, Jd))
                if d1 is not None:
                    acc = acc + d1
                d2 = dgamma(L, (M, M, Jd))
                if d2 is not None:
                    acc = acc - d2
                for P in range(alphabet):
                    a = gam.get((M, M, P))
                    b = gam.get((P, L, Jd))
                    if a is not None and b is not None:
                        acc = acc + a * b
                    a = gam.get((M, L, P))
                    b = gam.get((P, M, Jd))
                    if a is not None and b is not None:
                        acc = acc - a * b
            if acc.coeffs:
                out[Jd, L] = acc
                out[L, Jd] = acc
    return out


def ambient_curvature(A: AmbientMetric, derivs: int = 0) -> List[AmbientTensor]:
    """Covariant curvature R~_IJKL and its first ``derivs`` covariant
    derivatives (differentiation indices trailing), all at t = 1."""
    if derivs in A._curvature_cache:
        return [A._curvature_cache[k] for k in range(derivs + 1)]
    n, nv, N = A.n, A.num_vars, A.joint_order
    gam = A.christoffels()
    alphabet = n + 2

    def dgamma(direction, key):
        jet = gam.get(key)
        if jet is None:
            return None
        if direction == 0:
            e = _gamma_t_exponent(key)
            return jet.scale(e) if e else None
        var = direction - 1 if direction <= n else nv - 1
        d = jet.diff(var)
        return d if d.coeffs else None

    if 0 not in A._curvature_cache:
        gt = A.metric_tensor()
        R = AmbientTensor(n, 4, 2, nv, N)
        # up[M][K][I][J] for I < J, then lower and fill symmetries
        for K in range(alphabet):
            for I in range(alphabet):
                for Jd in range(I + 1, alphabet):
                    up = {}
                    for M in range(alphabet):
                        acc = Jet.zero(nv, N)
                        d1 = dgamma(I, (M, Jd, K))
                        if d1 is not None:
                            acc = acc + d1
                        d2 = dgamma(Jd, (M, I, K))
                        if d2 is not None:
                            acc = acc - d2
                        for P in range(alphabet):
                            a = gam.get((M, I, P))
                            b = gam.get((P, Jd, K))
                            if a is not None and b is not None:
                                acc = acc + a * b
                            a = gam.get((M, Jd, P))
                            b = gam.get((P, I, K))
                            if a is not None and b is not None:
                                acc = acc - a * b
                        if acc.coeffs:
                            up[M] = acc
                    if not up:
                        continue
                    for L in range(alphabet):
                        acc = Jet.zero(nv, N)
                        for M, u in up.items():
                            gl = gt[L, M]
                            if gl.coeffs:
                                acc = acc + gl * u
                        if acc.coeffs:
                            # low[I,J,K,L] = g_LM up^M_{K, J, I}; our loop built
                            # up for the ordered pair (I, J) playing (j, i)
                            R[Jd, I, K, L] = acc
                            R[I, Jd, K, L] = -acc
        A._curvature_cache[0] = R
    highest = max(A._curvature_cache)
    current = A._curvature_cache[highest]
    for k in range(highest + 1, derivs + 1):
        current = ambient_covariant_derivative(A, current)
        A._curvature_cache[k] = current
    return [A._curvature_cache[k] for k in range(derivs + 1)]


# ---- the order-by-order solver ---------------------------------------------


def _sym_basis(n):
    basis = []
    for a in range(n):
        for b in range(a, n):
            basis.append((a, b))
    return basis


def _ricci_residual_rows(g: MetricJet, series: List[TensorJet], m: int):
    """Residual rows that see the order-m coefficient pointwise: the
    rho^(m-1) coefficient of the manifold block of Ric(g~), plus (for
    m >= 2) the rho^(m-2) coefficient of the rho-rho component, which
    carries the trace.  Both are algebraic in the unknown coefficient, so
    constant probes recover the exact pointwise map."""
    A = AmbientMetric(g, series)
    ric = ambient_ricci(A)
    n = g.dim
    rows = []
    for i in range(n):
        for j in range(i, n):
            rows.append(rho_coefficient(ric[i + 1, j + 1], m - 1, g.order))
    if m >= 2:
        rows.append(rho_coefficient(ric[n + 1, n + 1], m - 2, g.order))
    return rows


def fg_expand(g: MetricJet, order: int, ambiguity: Optional[TensorJet] = None,
              probe_shuffle=None) -> AmbientMetric:
    """Solve Ric(g~) = O(rho^order) for the rho-series of g_rho.

    At each order m the unknown coefficient enters the rho^(m-1) residual
    affinely and pointwise; the affine map is recovered by probing with the
    constant symmetric unit tensors and the resulting linear system is
    solved exactly over the jet ring, degree by degree in x.

    Odd n: any order.  Even n: orders above n/2 - 1 need the trace-free
    ``ambiguity`` injected at n/2 (its divergence constraint is accepted
    unchecked); without it the request is refused.
    """
    n = g.dim
    if n < 3:
        raise AmbientError("ambient expansion needs base dimension >= 3")
    even = n % 2 == 0
    if even and order > n // 2 - 1 and ambiguity is None:
        raise AmbientError(
            f"ambiguity not determined: even n = {n} leaves the trace-free part "
            f"of the order-{n // 2} coefficient free; orders beyond {n // 2 - 1} "
            "require an explicit ambiguity tensor")
    series = [g.g]
    basis = _sym_basis(n)
    s = len(basis)
    nv, x_order = g.num_vars, g.order
    zero_x = Jet.zero(nv, x_order)

    for m in range(1, order + 1):
        zero_coef = TensorJet(n, 2, nv, x_order)
        base = _ricci_residual_rows(g, series + [zero_coef], m)
        probes = list(range(s))
        if probe_shuffle is not None:
            probes = list(probe_shuffle(probes))
        columns = {}
        for pi in probes:
            a, b = basis[pi]
            E = TensorJet(n, 2, nv, x_order)
            one = Jet.constant(1, nv, x_order)
            E[a, b] = one
            E[b, a] = one
            res = _ricci_residual_rows(g, series + [E], m)
            columns[pi] = [res[r] - base[r] for r in range(len(base))]
        mat = [[columns[c][r] for c in range(s)] for r in range(len(base))]
        rhs = [-base[r] for r in range(len(base))]
        critical = even and m == n // 2
        if critical:
            # the pointwise map kills the trace-free part: determine the trace
            # from the residual and splice in the prescribed ambiguity
            coef = _solve_jet_system_layered(mat, rhs, nv, x_order,
                                             order_label=m, allow_deficient=True)
            coef_t = TensorJet(n, 2, nv, x_order)
            for c, (a, b) in enumerate(basis):
                coef_t[a, b] = coef[c]
                coef_t[b, a] = coef[c]
            from .tensors import trace_free_part
            trace_part = coef_t - trace_free_part(g, coef_t)
            coef_t = trace_part + ambiguity
        else:
            coef = _solve_jet_system_layered(mat, rhs, nv, x_order, order_label=m)
            coef_t = TensorJet(n, 2, nv, x_order)
            for c, (a, b) in enumerate(basis):
                coef_t[a, b] = coef[c]
                coef_t[b, a] = coef[c]
        series.append(coef_t)
    return AmbientMetric(g, series, ambiguity=ambiguity if even and order >= (n // 2) else None)


def _solve_jet_system_layered(mat, rhs, nv, x_order, order_label, allow_deficient=False):
    """Solve the (possibly rectangular) system M(x) c(x) = b(x) for jet
    vectors, degree by degree in x.

    The constant part of M leads each layer; column-rank deficiency is
    rejected unless ``allow_deficient`` (free variables are then zeroed).
    Inconsistent layers raise, which is exactly the obstruction check at
    the even-dimensional critical order."""
    nrows = len(mat)
    s = len(mat[0])
    M0 = [[mat[i][j].constant_term() for j in range(s)] for i in range(nrows)]
    from .linalg import mat_rank
    rank = mat_rank(M0)
    if rank < s and not allow_deficient:
        raise AmbientError(f"singular coefficient system at rho-order {order_label}")
    from itertools import product as iproduct
    all_monos = sorted((m for m in iproduct(range(x_order + 1), repeat=nv)
                        if sum(m) <= x_order), key=lambda m: (sum(m), m))
    rel = None
    for row in mat:
        for e in row:
            rel = e.reliable if rel is None else (
                rel if e.reliable is None else min(rel, e.reliable))
    for e in rhs:
        rel = e.reliable if rel is None else (
            rel if e.reliable is None else min(rel, e.reliable))
    sol = [dict() for _ in range(s)]
    for mono in all_monos:
        if rel is not None and sum(mono) > rel:
            continue
        rhs_layer = []
        for i in range(nrows):
            acc = rhs[i].coefficient(mono)
            for j in range(s):
                ej = mat[i][j]
                for m2, c2 in ej.coeffs.items():
                    if sum(m2) == 0:
                        continue
                    m1 = tuple(a - b for a, b in zip(mono, m2))
                    if any(e < 0 for e in m1):
                        continue
                    cj = sol[j].get(m1)
                    if cj is not None:
                        acc = acc - c2 * cj
            rhs_layer.append(acc)
        try:
            layer_sol, _free = solve_affine_exact(M0, rhs_layer)
        except ValueError as exc:
            raise AmbientError(
                f"obstruction at rho-order {order_label}: residual cannot be "
                f"cancelled ({exc})") from exc
        for j in range(s):
            if layer_sol[j] != 0:
                sol[j][mono] = layer_sol[j]
    return [Jet(nv, x_order, d, rel) for d in sol]


# ---- diagnostics ------------------------------------------------------------


def check_ricci_order(A: AmbientMetric):
    """Largest verified m with Ric(g~) = O(rho^m) componentwise, plus the
    trace / trace-free breakdown of the leading manifold-block coefficient."""
    ric = ambient_ricci(A)
    cap = A.rho_order + 1
    order = ric.min_rho_order(cap)
    breakdown = None
    if order < cap:
        lead = TensorJet(A.n, 2, A.g.num_vars, A.g.order)
        for i in range(A.n):
            for j in range(A.n):
                lead[i, j] = rho_coefficient(ric[i + 1, j + 1], order, A.g.order)
        from .tensors import trace_free_part
        tf = trace_free_part(A.g, lead)
        tr = lead - tf
        breakdown = {
            "leading_order": order,
            "trace_free_nonzero": not tf.is_zero(),
            "trace_nonzero": not tr.is_zero(),
        }
    return {"order": order, "truncation_limited": order >= cap, "cap": cap,
            "leading_breakdown": breakdown}


def index_strength(idx_list, n):
    """Strength of an ambient index list: 0 for the dilation index, 1 for
    manifold indices, 2 for the rho index."""
    s = 0
    for a in idx_list:
        if a == 0:
            continue
        s += 1 if 1 <= a <= n else 2
    return s


def verify_curvature_identities(A: AmbientMetric, derivs: int = 2):
    """Residual report for the homogeneity identities of the curvature of a
    straight pre-ambient metric (all derivative counts up to ``derivs``) and
    the normal-form divergence identity at rho = 0 (k = 1..derivs), with the
    even-dimension strength bound respected."""
    n = A.n
    INF = n + 1
    tensors = ambient_curvature(A, derivs)
    report = {"dilation_contraction": {}, "derivative_contraction": {},
              "divergence": {}, "all_zero": True}

    # dilation vector contracted into the last curvature slot: the component
    # with that slot equal to 0 balances the terms where each derivative
    # index moves into the curvature slot
    for r in range(derivs + 1):
        T = tensors[r]
        ok = True
        for idx in product(range(n + 2), repeat=3 + r):
            I, Jd, K = idx[0], idx[1], idx[2]
            Ms = idx[3:]
            lhs = T[(I, Jd, K, 0) + Ms]
            for spos in range(r):
                rest = Ms[:spos] + Ms[spos + 1:]
                lhs = lhs + tensors[r - 1][(I, Jd, K, Ms[spos]) + rest]
            if not lhs.is_zero():
                ok = False
                break
        report["dilation_contraction"][r] = ok
        report["all_zero"] &= ok

    # dilation vector contracted into the innermost derivative slot
    for r in range(1, derivs + 1):
        T = tensors[r]
        ok = True
        for idx in product(range(n + 2), repeat=3 + r):
            I, Jd, K, L = idx[0], idx[1], idx[2], idx[3]
            Ms = idx[4:]
            lhs = T[(I, Jd, K, L, 0) + Ms] + tensors[r - 1][(I, Jd, K, L) + Ms].scale(2)
            for spos in range(len(Ms)):
                rest = Ms[:spos] + Ms[spos + 1:]
                lhs = lhs + tensors[r - 1][(I, Jd, K, L, Ms[spos]) + rest]
            if not lhs.is_zero():
                ok = False
                break
        report["derivative_contraction"][r] = ok
        report["all_zero"] &= ok

    inv = A.inverse_components()
    for k in range(1, derivs + 1):
        T = tensors[k]
        ok = True
        checked = 0
        for I, Jd, Aa in product(range(n + 2), repeat=3):
            if A.parity == "even":
                if index_strength([I, Jd, Aa], n) + 2 * k > n + 1:
                    continue
            tail = (INF,) * (k - 1)
            lhs = T[(I, Jd, Aa, INF) + tail].scale(2 * k + 1)
            rhs = Jet.zero(A.num_vars, A.joint_order)
            for p in range(1, n + 1):
                for q in range(1, n + 1):
                    gpq = inv.get((p, q))
                    if gpq is None:
                        continue
                    comp = T[(I, Jd, Aa, q, p) + tail]
                    if comp.coeffs:
                        rhs = rhs + gpq * comp
            resid = lhs - rhs
            checked += 1
            # identity holds at rho = 0, t = 1
            if not rho_coefficient(resid, 0, A.x_order).is_zero():
                ok = False
                break
        report["divergence"][k] = {"holds": ok, "components_checked": checked}
        report["all_zero"] &= ok
    return report
