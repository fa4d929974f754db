"""Closed-form eigenvalue helpers against the LAPACK oracle."""

import numpy as np
import pytest

from eulerlab import eig


def sorted_real(vals):
    return np.sort(vals[np.isfinite(vals)])


class TestRealEigenvalues:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_lapack_oracle(self, d, rng):
        mats = rng.standard_normal((500, d, d))
        ours = eig.real_eigenvalues(mats)
        for k in range(500):
            lam = np.linalg.eigvals(mats[k])
            real = np.sort(lam[np.abs(lam.imag) < 1e-9].real)
            mine = sorted_real(ours[k])
            assert mine.size == real.size, f"count mismatch at {k}"
            if real.size:
                assert np.allclose(mine, real, atol=1e-8 * max(1, np.max(np.abs(lam))))

    def test_rotation_has_no_real_spectrum(self):
        th = 0.7
        rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        lam = eig.real_eigenvalues(rot[None])
        assert np.all(np.isnan(lam))

    def test_identity_and_diag(self):
        lam = eig.real_eigenvalues(np.diag([3.0, -2.0, 0.5])[None])[0]
        assert np.allclose(np.sort(lam), [-2.0, 0.5, 3.0])

    def test_repeated_roots(self):
        lam = eig.real_eigenvalues(np.eye(3)[None])[0]
        assert np.allclose(lam, 1.0)


class TestSymmetricEigenvalues:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_eigvalsh(self, d, rng):
        mats = rng.standard_normal((500, d, d))
        sym = eig.symmetric_part(mats)
        ours = eig.symmetric_eigenvalues(mats)
        oracle = np.linalg.eigvalsh(sym)
        assert np.max(np.abs(np.sort(ours, axis=-1) - oracle)) < 1e-9

    def test_min_eigenvalue_is_quadratic_form_infimum(self, rng):
        # min over unit xi of A : xi (x) xi equals the smallest symmetric-part
        # eigenvalue; cross-check by dense direction sampling
        a = rng.standard_normal((3, 3))
        lam = eig.min_symmetric_eigenvalue(a[None])[0]
        th = rng.uniform(0, np.pi, 4000)
        ph = rng.uniform(0, 2 * np.pi, 4000)
        xi = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
        quad = np.einsum("ki,ij,kj->k", xi, a, xi)
        assert quad.min() >= lam - 1e-9
        assert quad.min() <= lam + 0.05  # sampled minimum approaches it

    def test_eigenvector_closed_form(self, rng):
        for _ in range(100):
            a = rng.standard_normal((3, 3))
            s = eig.symmetric_part(a)[0] if a.ndim == 3 else 0.5 * (a + a.T)
            lams = eig.symmetric_eigenvalues(s[None])[0]
            for lam in lams:
                v = eig.symmetric_eigenvector(s, lam)
                assert np.linalg.norm(s @ v - lam * v) < 1e-7
                assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-12)
