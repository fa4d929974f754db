"""Closed-form eigenvalues of small (d <= 3) matrices, batched over cells.

Real-spectrum extraction goes through the characteristic polynomial (quadratic
formula / Cardano-trigonometric cubic), symmetric spectra through the standard
analytic formulas.  No iterative eigensolver is involved; tests cross-check
against numpy.linalg on random batches.
"""

from __future__ import annotations

import numpy as np

_REAL_DISC_TOL = 1e-12


def real_eigenvalues(mats):
    """Real eigenvalues of a (..., d, d) batch; complex pairs become NaN.

    Returns shape (..., d) with NaN slots where the eigenvalue is not real.
    """
    mats = np.asarray(mats, dtype=float)
    d = mats.shape[-1]
    if mats.shape[-2] != d or d not in (1, 2, 3):
        raise ValueError("expected (..., d, d) with d in {1,2,3}")
    if d == 1:
        return mats[..., 0, 0][..., None]
    if d == 2:
        return _real_eig_2(mats)
    return _real_eig_3(mats)


def _real_eig_2(m):
    tr = m[..., 0, 0] + m[..., 1, 1]
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    half = 0.5 * tr
    disc = half * half - det
    scale = np.maximum(half * half + np.abs(det), 1.0)
    real = disc >= -_REAL_DISC_TOL * scale
    root = np.sqrt(np.maximum(disc, 0.0))
    out = np.stack([half - root, half + root], axis=-1)
    out[~real] = np.nan
    return out


def _cubic_real_roots(c2, c1, c0):
    """Real roots of x^3 + c2 x^2 + c1 x + c0, NaN-padded to 3 slots."""
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    shift = -c2 / 3.0
    scale = np.maximum(np.abs(p) ** 3, 1e-300)
    disc = -(4.0 * p**3 + 27.0 * q * q)

    out = np.full(c2.shape + (3,), np.nan)

    # three real roots (trigonometric form); also covers the p ~ 0, q ~ 0 case
    three = disc >= -_REAL_DISC_TOL * np.maximum(scale, q * q)
    if np.any(three):
        p3 = p[three]
        q3 = q[three]
        r = np.sqrt(np.maximum(-p3 / 3.0, 0.0))
        # arccos argument clipped against roundoff at the discriminant boundary
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = np.where(r > 0, 3.0 * q3 / (2.0 * p3 * np.where(r > 0, r, 1.0)), 0.0)
        theta = np.arccos(np.clip(arg, -1.0, 1.0))
        roots = np.stack(
            [2.0 * r * np.cos((theta - 2.0 * np.pi * k) / 3.0) for k in range(3)],
            axis=-1,
        )
        out[three] = roots + shift[three][..., None]

    one = ~three
    if np.any(one):
        p1 = p[one]
        q1 = q[one]
        s = np.sqrt(np.maximum(q1 * q1 / 4.0 + p1**3 / 27.0, 0.0))
        root = np.cbrt(-q1 / 2.0 + s) + np.cbrt(-q1 / 2.0 - s)
        block = np.full(root.shape + (3,), np.nan)
        block[..., 0] = root + shift[one]
        out[one] = block
    return out


def _real_eig_3(m):
    c2 = -(m[..., 0, 0] + m[..., 1, 1] + m[..., 2, 2])
    minors = (
        m[..., 1, 1] * m[..., 2, 2]
        - m[..., 1, 2] * m[..., 2, 1]
        + m[..., 0, 0] * m[..., 2, 2]
        - m[..., 0, 2] * m[..., 2, 0]
        + m[..., 0, 0] * m[..., 1, 1]
        - m[..., 0, 1] * m[..., 1, 0]
    )
    det = (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
        - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    )
    return _cubic_real_roots(c2, minors, -det)


def symmetric_part(mats):
    mats = np.asarray(mats, dtype=float)
    return 0.5 * (mats + np.swapaxes(mats, -1, -2))


def symmetric_eigenvalues(mats):
    """Ascending eigenvalues of the symmetric part of a (..., d, d) batch."""
    s = symmetric_part(mats)
    d = s.shape[-1]
    if d == 1:
        return s[..., 0, 0][..., None]
    if d == 2:
        mean = 0.5 * (s[..., 0, 0] + s[..., 1, 1])
        r = np.sqrt((0.5 * (s[..., 0, 0] - s[..., 1, 1])) ** 2 + s[..., 0, 1] ** 2)
        return np.stack([mean - r, mean + r], axis=-1)
    if d == 3:
        return _sym_eig_3(s)
    raise ValueError("d must be 1, 2 or 3")


def _sym_eig_3(a):
    """Trigonometric eigenvalues of symmetric 3x3 batches (always real)."""
    q = (a[..., 0, 0] + a[..., 1, 1] + a[..., 2, 2]) / 3.0
    b = a - q[..., None, None] * np.eye(3)
    p2 = np.sum(b * b, axis=(-2, -1)) / 6.0
    p = np.sqrt(np.maximum(p2, 0.0))
    safe = np.where(p > 0, p, 1.0)
    detb = (
        b[..., 0, 0] * (b[..., 1, 1] * b[..., 2, 2] - b[..., 1, 2] * b[..., 2, 1])
        - b[..., 0, 1] * (b[..., 1, 0] * b[..., 2, 2] - b[..., 1, 2] * b[..., 2, 0])
        + b[..., 0, 2] * (b[..., 1, 0] * b[..., 2, 1] - b[..., 1, 1] * b[..., 2, 0])
    )
    r = np.clip(detb / (2.0 * safe**3), -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    lam_hi = q + 2.0 * p * np.cos(phi)
    lam_lo = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    lam_mid = 3.0 * q - lam_hi - lam_lo
    return np.stack([lam_lo, lam_mid, lam_hi], axis=-1)


def min_symmetric_eigenvalue(mats):
    """Smallest eigenvalue of the symmetric part = inf over unit xi of A:xi@xi."""
    return symmetric_eigenvalues(mats)[..., 0]


def symmetric_eigenvector(mat, lam):
    """Unit eigenvector of a single symmetric d x d matrix for eigenvalue lam.

    Closed form: null vector of A - lam*I via row cross products (d=3) or the
    orthogonal complement of the least-degenerate row (d=2).
    """
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[0]
    if d == 1:
        return np.array([1.0])
    a = mat - lam * np.eye(d)
    if d == 2:
        cands = [np.array([-a[r, 1], a[r, 0]]) for r in range(2)]
    else:
        rows = [a[0], a[1], a[2]]
        cands = [np.cross(rows[i], rows[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    norms = [np.linalg.norm(v) for v in cands]
    best = int(np.argmax(norms))
    if norms[best] < 1e-300:
        # (near-)repeated eigenvalue: any unit vector orthogonal to the
        # nonzero rows works; fall back to the dominant row complement
        rn = np.linalg.norm(a, axis=1)
        r = int(np.argmax(rn))
        if rn[r] < 1e-300:
            e = np.zeros(d)
            e[0] = 1.0
            return e
        v = np.zeros(d)
        v[(r + 1) % d] = 1.0
        v -= (v @ a[r]) / (rn[r] ** 2) * a[r]
        return v / np.linalg.norm(v)
    return cands[best] / norms[best]
