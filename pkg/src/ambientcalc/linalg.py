"""Exact linear algebra over rational scalars and over jet rings.

Matrices are lists of lists.  Scalar routines assume entries support
exact field arithmetic (Fraction or the field extensions).  The jet
routines do Gaussian elimination over the local ring of jets, pivoting
on entries whose constant term is invertible.
"""

from __future__ import annotations

from fractions import Fraction

from .jets import Jet, JetError
from .scalars import scalar_is_zero


def mat_rank(rows, tol=0.0):
    """Rank of a scalar matrix by fraction-free-ish elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if not scalar_is_zero(m[r][col], tol):
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        for r in range(row + 1, nrows):
            if scalar_is_zero(m[r][col], tol):
                continue
            f = m[r][col] / pv
            for c in range(col, ncols):
                m[r][c] = m[r][c] - f * m[row][c]
        row += 1
        rank += 1
        if row == nrows:
            break
    return rank


def mat_solve(rows, rhs):
    """Solve square system A x = b exactly; raises on singular A."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not scalar_is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        for r in range(n):
            if r == col or scalar_is_zero(m[r][col]):
                continue
            f = m[r][col] / pv
            for c in range(col, n + 1):
                m[r][c] = m[r][c] - f * m[col][c]
    return [m[i][n] / m[i][i] for i in range(n)]


def mat_det(rows):
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    sign = 1
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not scalar_is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            return Fraction(0) * det
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pv = m[col][col]
        det = det * pv
        for r in range(col + 1, n):
            if scalar_is_zero(m[r][col]):
                continue
            f = m[r][col] / pv
            for c in range(col, n):
                m[r][c] = m[r][c] - f * m[col][c]
    return det * sign


def solve_affine_exact(rows, rhs, free_value=None):
    """General (possibly rank-deficient) exact linear solve.

    Returns (solution, free_columns).  Inconsistent systems raise
    ValueError.  Free variables are set to ``free_value`` entries (zero by
    default).
    """
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if not scalar_is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        for r in range(nrows):
            if r == row or scalar_is_zero(m[r][col]):
                continue
            f = m[r][col] / pv
            for c in range(col, ncols + 1):
                m[r][c] = m[r][c] - f * m[row][c]
        pivots.append((row, col))
        row += 1
        if row == nrows:
            break
    for r in range(row, nrows):
        if not scalar_is_zero(m[r][ncols]):
            raise ValueError("inconsistent linear system")
    piv_cols = {c for _, c in pivots}
    free_cols = [c for c in range(ncols) if c not in piv_cols]
    sol = [Fraction(0)] * ncols
    if free_value is not None:
        for c in free_cols:
            sol[c] = free_value[c]
    for r, c in reversed(pivots):
        s = m[r][ncols]
        for c2 in range(c + 1, ncols):
            if not scalar_is_zero(m[r][c2]) and not scalar_is_zero(sol[c2]):
                s = s - m[r][c2] * sol[c2]
        sol[c] = s / m[r][c]
    return sol, free_cols


def signature_of_symmetric(rows):
    """(p, q) signature of an exact symmetric matrix via congruence diagonalization."""
    n = len(rows)
    m = [list(r) for r in rows]
    p = q = 0
    k = 0
    while k < n:
        # find a nonzero diagonal entry at or after k, else create one
        piv = None
        for r in range(k, n):
            if not scalar_is_zero(m[r][r]):
                piv = r
                break
        if piv is None:
            found = False
            for r in range(k, n):
                for c in range(r + 1, n):
                    if not scalar_is_zero(m[r][c]):
                        # congruence by adding row/col c to r creates a
                        # nonzero diagonal entry; retry the same k
                        for j in range(n):
                            m[r][j] = m[r][j] + m[c][j]
                        for j in range(n):
                            m[j][r] = m[j][r] + m[j][c]
                        found = True
                        break
                if found:
                    break
            if not found:
                break  # remaining block is zero
            continue
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            for j in range(n):
                m[j][k], m[j][piv] = m[j][piv], m[j][k]
        d = m[k][k]
        if d > 0:
            p += 1
        else:
            q += 1
        for r in range(k + 1, n):
            if scalar_is_zero(m[r][k]):
                continue
            f = m[r][k] / d
            for j in range(n):
                m[r][j] = m[r][j] - f * m[k][j]
            for j in range(n):
                m[j][r] = m[j][r] - f * m[j][k]
        k += 1
    return p, q


# ---- jet-valued matrices --------------------------------------------------


def jet_mat_solve(rows, rhs):
    """Solve A x = b where entries are Jets, pivoting on unit constant terms.

    The matrix must be invertible over the jet local ring, i.e. its
    constant-term matrix invertible.
    """
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not scalar_is_zero(m[r][col].constant_term()):
                piv = r
                break
        if piv is None:
            raise JetError("jet matrix not invertible: no unit pivot")
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].invert()
        for r in range(n):
            if r == col:
                continue
            if m[r][col].is_zero() and not m[r][col].coeffs:
                continue
            f = m[r][col] * inv
            for c in range(col, n + 1):
                m[r][c] = m[r][c] - f * m[col][c]
    return [m[i][n] * m[i][i].invert() for i in range(n)]


def jet_mat_inverse(rows):
    """Inverse of a jet matrix with invertible constant part."""
    n = len(rows)
    cols = []
    for j in range(n):
        e = [Jet.zero(rows[0][0].num_vars, rows[0][0].order) for _ in range(n)]
        e[j] = Jet.constant(1, rows[0][0].num_vars, rows[0][0].order)
        cols.append(jet_mat_solve(rows, e))
    # cols[j] is the j-th column of the inverse
    return [[cols[j][i] for j in range(n)] for i in range(n)]
