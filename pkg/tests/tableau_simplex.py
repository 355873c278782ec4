"""Independent textbook oracle for LP cross-checks: full-tableau primal
simplex with Bland's rule, for max c.x s.t. Ax <= b, x >= 0 with b >= 0
(origin-feasible problems, which the random LP generator guarantees)."""

import numpy as np


def tableau_simplex_max(c, A, b, max_pivots=100_000):
    """Returns the optimal objective value, or None when unbounded."""
    A = np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise ValueError("origin must be feasible (b >= 0)")
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_pivots):
        enter = -1
        for j in range(n + m):  # Bland: smallest eligible index
            if T[m, j] < -1e-12:
                enter = j
                break
        if enter < 0:
            return float(T[m, -1])
        leave, best = -1, (np.inf, np.inf)
        for i in range(m):
            if T[i, enter] > 1e-12:
                key = (T[i, -1] / T[i, enter], basis[i])
                if key < best:
                    best, leave = key, i
        if leave < 0:
            return None  # unbounded direction
        T[leave] /= T[leave, enter]
        for i in range(m + 1):
            if i != leave:
                T[i] -= T[i, enter] * T[leave]
        basis[leave] = enter
    raise RuntimeError("pivot limit hit")
