"""
Symmetric eigendecomposition and matrix square root.

Matrices handled here are small (at most 21x21 for the covariance
features), so a cyclic Jacobi method is used for the eigendecomposition.
It is accurate to machine precision on symmetric input and produces
exactly orthonormal eigenvectors.

"""

import numpy as np

from WellClass.errors import DataError, TrainingError

def jacobi_eigh(a, tol=1e-12, max_sweeps=100):
    """
    Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Each sweep visits all pairs ``(p, q)`` with ``p < q`` in row order and
    applies the plane rotation that annihilates ``a[p, q]``. Iteration
    stops when the Frobenius norm of the off-diagonal part falls below
    ``tol * max(1, ||a||_F)``.

    Parameters
    ----------
    a : array_like
        mxm symmetric matrix.
    tol : float, optional
        Relative convergence tolerance.
    max_sweeps : int, optional
        Maximum number of sweeps.

    Returns
    -------
    eigenvalues : numpy array
        Eigenvalues sorted in non-increasing order. Ties keep the order of
        their diagonal position.
    eigenvectors : numpy array
        mxm matrix whose columns are the corresponding orthonormal
        eigenvectors.

    Raises
    ------
    DataError
        If `a` is not square or not symmetric within 1e-10 (relative to
        its norm).
    TrainingError
        If convergence is not reached within `max_sweeps`.

    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DataError("matrix should be square, got shape {}".format(
            a.shape))
    m = a.shape[0]
    scale = max(1.0, np.linalg.norm(a))
    if np.max(np.abs(a - a.T), initial=0.) > 1e-10*scale:
        raise DataError("matrix is not symmetric")
    a = 0.5*(a + a.T)
    v = np.eye(m)

    def off_norm(x):
        return np.sqrt(max(np.sum(x*x) - np.sum(np.diag(x)**2), 0.))

    for sweep in range(max_sweeps):
        if off_norm(a) < tol*scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if apq == 0.:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.*apq)
                if theta == 0.:
                    t = 1.
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta*theta + 1.))
                c = 1. / np.sqrt(t*t + 1.)
                s = t*c

                # A <- J^T A J, applied as column then row rotations
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c*ap - s*aq
                a[:, q] = s*ap + c*aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c*ap - s*aq
                a[q, :] = s*ap + c*aq
                a[p, q] = 0.
                a[q, p] = 0.

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c*vp - s*vq
                v[:, q] = s*vp + c*vq
    else:
        if off_norm(a) >= tol*scale:
            raise TrainingError("Jacobi iteration did not converge in {} "
                                "sweeps".format(max_sweeps))

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind='stable')
    return eigenvalues[order], v[:, order]

def sym_sqrt(a, tol=1e-10):
    """
    Square root of a symmetric positive semi-definite matrix.

    Computes ``R = V diag(sqrt(lambda)) V^T`` from the eigendecomposition
    of `a`, so that R is symmetric PSD and ``R @ R = a``.

    Parameters
    ----------
    a : array_like
        mxm symmetric PSD matrix.
    tol : float, optional
        Negative eigenvalues not below ``-tol`` are treated as round-off
        and clamped to zero.

    Returns
    -------
    numpy array
        mxm symmetric PSD square root.

    Raises
    ------
    DataError
        If `a` has an eigenvalue below ``-tol``.

    """
    eigenvalues, eigenvectors = jacobi_eigh(a)
    if eigenvalues.size and eigenvalues[-1] < -tol:
        raise DataError("matrix is not positive semi-definite (smallest "
                        "eigenvalue {:g})".format(eigenvalues[-1]))
    eigenvalues = np.clip(eigenvalues, 0., None)
    r = np.dot(eigenvectors * np.sqrt(eigenvalues), eigenvectors.T)
    return 0.5*(r + r.T)
