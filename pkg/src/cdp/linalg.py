"""Cyclic Jacobi eigensolver for small dense symmetric matrices."""

import numpy as np


def jacobi_eigh(a, tol=1e-14, max_sweeps=64):
    """Eigen-decomposition ``a = Z diag(w) Z^T`` by cyclic Jacobi rotations.

    Returns ``(w, Z)`` in the order the diagonal ends up in; callers sort.
    Sweeps stop once the off-diagonal Frobenius norm falls below
    ``tol * ||a||_F``.
    """
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    Z = np.eye(n)
    scale = np.linalg.norm(A)
    if n == 1 or scale == 0.0:
        return np.diag(A).copy(), Z

    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                h = A[q, q] - A[p, p]
                if abs(h) + 1e3 * abs(apq) == abs(h):
                    # rotation angle below float resolution of the diagonal gap
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.hypot(theta, 1.0))
                    if theta < 0:
                        t = -t
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c

                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0

                zp, zq = Z[:, p].copy(), Z[:, q].copy()
                Z[:, p] = c * zp - s * zq
                Z[:, q] = s * zp + c * zq
    return np.diag(A).copy(), Z
