"""Symmetric eigenvalue routines.

``tridiagonalize`` + ``tql_eigenvalues`` is a self-contained Householder /
implicit-shift QL solver. ``inertia_count`` + ``bisection_eigenvalues``
form an independent oracle working on the dense matrix directly.
"""

import math

import numpy as np


class EigenConvergenceError(RuntimeError):
    pass


def tridiagonalize(a):
    """Householder reduction of a real symmetric matrix.

    Returns ``(d, e)``: the diagonal and the subdiagonal (``e[0] = 0``,
    ``e[i]`` couples rows ``i-1`` and ``i``) of a similar tridiagonal matrix.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vnorm2 = v @ v
        if vnorm2 == 0.0:
            continue
        # A <- H A H with H = I - 2 v v^T / (v^T v), applied to the trailing block
        sub = a[k + 1:, k + 1:]
        w = sub @ v * (2.0 / vnorm2)
        kappa = (v @ w) / vnorm2
        w -= kappa * v
        sub -= np.outer(v, w) + np.outer(w, v)
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
    d = np.diag(a).copy()
    e = np.zeros(n)
    if n > 1:
        e[1:] = np.diag(a, -1)
    return d, e


def tql_eigenvalues(d, e, max_iter=50, rel_tol=1e-12):
    """Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.

    ``e[i]`` is the entry coupling ``i-1`` and ``i``; ``e[0]`` is ignored.
    Raises :class:`EigenConvergenceError` if one eigenvalue needs more than
    ``max_iter`` sweeps.
    """
    d = [float(v) for v in d]
    n = len(d)
    e = [float(v) for v in e[1:]] + [0.0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= rel_tol * dd or abs(e[m]) < 1e-300:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise EigenConvergenceError(f"no convergence for eigenvalue {l} after {max_iter} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.array(d))


def symmetric_eigenvalues(h, method="lapack"):
    """Sorted eigenvalues of a real symmetric matrix.

    ``method="householder-ql"`` uses the routines above; ``"lapack"`` defers
    to ``numpy.linalg.eigvalsh``.
    """
    h = np.asarray(h, dtype=np.float64)
    if method == "lapack":
        return np.linalg.eigvalsh(h)
    if method == "householder-ql":
        return tql_eigenvalues(*tridiagonalize(h))
    raise ValueError(f"unknown eigen method {method!r}")


def inertia_count(h, x):
    """Number of eigenvalues of ``h`` strictly below ``x``.

    Counts negative pivots of the LDL^T factorization of ``h - x I``
    (Sylvester's law of inertia); zero pivots are nudged to -tiny.
    """
    a = np.array(h, dtype=np.float64) - x * np.eye(len(h))
    n = len(a)
    count = 0
    for k in range(n):
        piv = a[k, k]
        if piv == 0.0:
            piv = -1e-300
        if piv < 0:
            count += 1
        if k + 1 < n:
            col = a[k + 1:, k] / piv
            a[k + 1:, k + 1:] -= np.outer(col, a[k, k + 1:])
    return count


def bisection_eigenvalues(h, tol=1e-13):
    """All eigenvalues by bisection on :func:`inertia_count`. Oracle use, small matrices."""
    h = np.asarray(h, dtype=np.float64)
    n = len(h)
    radius = np.max(np.sum(np.abs(h), axis=1)) if n else 0.0
    lo0, hi0 = -radius - 1.0, radius + 1.0
    out = []
    for j in range(n):
        lo, hi = lo0, hi0
        while hi - lo > tol * max(1.0, abs(lo) + abs(hi)):
            mid = 0.5 * (lo + hi)
            if inertia_count(h, mid) > j:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return np.array(out)
