"""Small dense linear-algebra helpers shared by the other modules."""
from __future__ import annotations

import numpy as np


def numerical_kernel(mat, tol=1e-8):
    """Orthonormal basis (columns) of the numerical kernel of ``mat``.

    Singular values below ``tol * s_max`` count as zero.  Returns the basis
    and the full singular spectrum (padded with zeros up to the number of
    columns).
    """
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    ncols = mat.shape[1]
    if ncols == 0:
        return np.zeros((0, 0)), np.zeros(0)
    if mat.shape[0] == 0 or not np.any(mat):
        return np.eye(ncols), np.zeros(ncols)
    _, s, vt = np.linalg.svd(mat, full_matrices=True)
    spectrum = np.zeros(ncols)
    spectrum[: s.size] = s
    cutoff = tol * s[0]
    rank = int(np.sum(s > cutoff))
    return vt[rank:].T.copy(), spectrum


def numerical_image(mat, tol=1e-8):
    """Orthonormal basis (columns) of the column space of ``mat``."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0 or not np.any(mat):
        return np.zeros((mat.shape[0], 0))
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > tol * s[0]))
    return u[:, :rank].copy()


def orthonormalize(vectors, gram=None, tol=1e-10):
    """Gram-orthonormal basis of the span of the columns of ``vectors``.

    ``gram`` is the inner product matrix (identity when omitted).  Dependent
    columns are dropped.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    dim = vectors.shape[0]
    if gram is None:
        gram = np.eye(dim)
    if vectors.shape[1] == 0:
        return np.zeros((dim, 0))
    root = sqrt_psd(gram)
    image = numerical_image(root @ vectors, tol)
    return np.linalg.solve(root, image)


def sqrt_psd(mat):
    """Symmetric square root of a symmetric positive semi-definite matrix."""
    w, v = np.linalg.eigh((mat + mat.T) / 2)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def intersect(basis_a, basis_b, tol=1e-8):
    """Orthonormal basis of the intersection of two subspaces.

    Both inputs must have orthonormal columns (standard dot product).  A
    direction is kept when its principal angle is below ``tol``.
    """
    if basis_a.shape[1] == 0 or basis_b.shape[1] == 0:
        return np.zeros((basis_a.shape[0], 0))
    off = basis_a - basis_b @ (basis_b.T @ basis_a)
    _, s, vt = np.linalg.svd(off, full_matrices=True)
    sines = np.zeros(basis_a.shape[1])
    sines[: s.size] = s
    keep = vt[sines <= tol]
    return basis_a @ keep.T


def principal_angles(basis_a, basis_b):
    """Principal angles (radians, ascending) between orthonormal column bases."""
    if basis_a.shape[1] == 0 or basis_b.shape[1] == 0:
        return np.zeros(0)
    s = np.linalg.svd(basis_a.T @ basis_b, compute_uv=False)
    return np.arccos(np.clip(s, -1.0, 1.0))


def cluster_values(values, tol):
    """Group sorted real values into runs whose neighbours differ by <= tol.

    Returns a list of index lists into ``values``.
    """
    order = np.argsort(values, kind="stable")
    groups: list[list[int]] = []
    last = None
    for idx in order:
        if last is None or values[idx] - last > tol:
            groups.append([int(idx)])
        else:
            groups[-1].append(int(idx))
        last = values[idx]
    return groups
