"""Independent reference computations used only by the test suite.

These deliberately avoid the library's divided-difference path: the classical
Pade oracle solves the Taylor-matching linear system directly, and the
divided-difference closed form for Cauchy kernels comes from the standard
recursion identity dd[x0..xk] 1/(t-a) = (-1)^k / prod (x_j - a).
"""

import numpy as np


def classical_pade_from_taylor(taylor, n, m):
    """Solve the classical Pade conditions on Taylor coefficients c_0..c_{n+m}.

    Denominator q (deg <= m, q(0)=1 after normalization) solves
    sum_j q_j c_{n+1+k-j} = 0 for k = 0..m-1; numerator p = (c * q) truncated
    to degree n. Returns (p, q) as ascending coefficient arrays with q[0] = 1.
    """
    c = np.asarray(taylor, dtype=complex)
    assert len(c) >= n + m + 1
    if m == 0:
        q = np.array([1.0 + 0j])
    else:
        A = np.zeros((m, m + 1), dtype=complex)
        for k in range(m):
            for j in range(m + 1):
                idx = n + 1 + k - j
                A[k, j] = c[idx] if idx >= 0 else 0.0
        _, _, vh = np.linalg.svd(A)
        q = np.conj(vh[-1])
    if abs(q[0]) < 1e-13 * np.max(np.abs(q)):
        raise ValueError("degenerate block: q(0) ~ 0, cannot normalize classically")
    p = np.convolve(c[: n + m + 1], q)[: n + 1]
    p = p / q[0]
    q = q / q[0]
    return p, q


def cauchy_divided_difference(nodes, pole):
    """Closed form of the divided difference of 1/(z - pole) over the nodes."""
    nodes = np.asarray(nodes, dtype=complex)
    k = len(nodes) - 1
    return (-1.0) ** k / np.prod(nodes - pole)


def lagrange_interpolant_values(nodes, values, z):
    """Barycentric-free direct Lagrange evaluation for tiny node counts."""
    total = 0.0 + 0j
    for i, (xi, yi) in enumerate(zip(nodes, values)):
        term = yi
        for j, xj in enumerate(nodes):
            if j != i:
                term *= (z - xj) / (xi - xj)
        total += term
    return total
