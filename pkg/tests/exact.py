"""Exact rational re-implementations used as shadow oracles.

These follow the defining sums term by term with ``Fraction`` arithmetic and
share no code with the library.
"""

from fractions import Fraction


def lam_power(d, n):
    return [Fraction(k + 1) ** d for k in range(n)]


def lambda_bar(lam, N):
    """Dense triangle with rows n < N, built from the closed-form entries."""
    out = []
    for n in range(N):
        row = []
        for k in range(N):
            if k > n:
                row.append(Fraction(0))
                continue
            prev = lam[k - 1] if k >= 1 else Fraction(0)
            if k == n:
                row.append((lam[n] - prev) / lam[n])
            else:
                row.append(((lam[k] - prev) - (lam[k + 1] - lam[k])) / lam[n])
        out.append(row)
    return out


def transform(lam, x):
    """y_k = (1/lam_k) sum_{j<=k} (lam_j - lam_{j-1})(x_j - x_{j-1})."""
    y = []
    for k in range(len(x)):
        acc = Fraction(0)
        for j in range(k + 1):
            dl = lam[j] - (lam[j - 1] if j else 0)
            dx = x[j] - (x[j - 1] if j else 0)
            acc += dl * dx
        y.append(acc / lam[k])
    return y


def associated(lam, a):
    """a-bar_k = lam_k [a_k/d_k + (1/d_k - 1/d_{k+1}) sum_{j>k} a_j] for finite a."""
    n = len(a)
    d = [lam[k] - (lam[k - 1] if k else 0) for k in range(n + 1)]
    out = []
    for k in range(n):
        tail = sum((a[j] for j in range(k + 1, n)), Fraction(0))
        out.append(lam[k] * (a[k] / d[k] + (1 / d[k] - 1 / d[k + 1]) * tail))
    return out
