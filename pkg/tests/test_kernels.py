"""The compiled screening path against plain numpy recomputation.

Every claim the screening kernel makes is re-derived here the slow way:
decode a deviate row with the reference ensemble functions, diagonalize
both sector blocks with numpy, and compare weights, couplings, and the
accept/reject decision.  The Jacobi routines get the same treatment on
standalone symmetric matrices.
"""

import numpy as np
import pytest

from centronet import _kernels, ensemble


def _screen(gauss, n, xi, alpha_thr, fixed_v=None, fixed_epv=None):
    """Run the kernel over pre-decoded deviate rows, returning its outputs."""
    half = n // 2
    sig_off, sig_diag = ensemble.sigma_pair(n, xi)
    rows = gauss.shape[0]
    y = np.empty(rows)
    v = np.empty(rows)
    e = np.empty(rows)
    _kernels.screen_block(
        gauss, half, sig_off, sig_diag, alpha_thr,
        fixed_v is not None, fixed_v if fixed_v is not None else 0.0,
        fixed_epv is not None, fixed_epv if fixed_epv is not None else 0.0,
        y, v, e)
    return y, v, e


def _exact_row(flat, n, xi, fixed_v=None, fixed_epv=None):
    """Reference weights and identified couplings for one deviate row."""
    a, c = ensemble.blocks_from_gaussians(flat, n, xi)
    ensemble.canonicalize_blocks(a, c, fixed_v_star=fixed_v,
                                 fixed_e_plus_v=fixed_epv)
    w_plus = np.linalg.eigh(a + c)[1][0] ** 2
    w_minus = np.linalg.eigh(a - c)[1][0] ** 2
    return float(w_plus.max()), float(w_minus.max()), c[0, 0], a[0, 0]


def _random_symmetric(rng, n, scale=1.0):
    g = rng.standard_normal((n, n)) * scale
    return (g + g.T) / 2.0


class TestJacobi:

    def test_eigenvalues_match_numpy(self):
        rng = np.random.default_rng(11)
        for n in (2, 3, 5, 8, 13):
            mat = _random_symmetric(rng, n, scale=3.0)
            work = mat.copy()
            vec = np.eye(n)
            sweeps = _kernels.jacobi_full(work, vec)
            assert sweeps >= 0
            mine = np.sort(np.diag(work))
            ref = np.linalg.eigvalsh(mat)
            np.testing.assert_allclose(mine, ref, rtol=0,
                                       atol=1e-12 * np.abs(ref).max())

    def test_eigenvectors_diagonalize_the_input(self):
        rng = np.random.default_rng(12)
        mat = _random_symmetric(rng, 9)
        work = mat.copy()
        vec = np.eye(9)
        _kernels.jacobi_full(work, vec)
        lam = np.diag(work).copy()
        np.testing.assert_allclose(vec.T @ vec, np.eye(9), atol=1e-13)
        np.testing.assert_allclose(vec @ np.diag(lam) @ vec.T, mat, atol=1e-12)

    def test_row_only_variant_tracks_the_full_solver(self):
        """Both routines apply the identical rotation sequence, so the
        first eigenvector row must come out bit for bit the same."""
        rng = np.random.default_rng(13)
        for _ in range(5):
            mat = _random_symmetric(rng, 7)
            full_work = mat.copy()
            vec = np.eye(7)
            _kernels.jacobi_full(full_work, vec)
            row_work = mat.copy()
            row0 = np.empty(7)
            _kernels.jacobi_row0(row_work, row0)
            assert np.array_equal(row0, vec[0])
            assert np.array_equal(np.diag(row_work), np.diag(full_work))

    def test_diagonal_input_converges_immediately(self):
        mat = np.diag([3.0, -1.0, 0.5])
        vec = np.eye(3)
        assert _kernels.jacobi_full(mat, vec) == 0
        assert np.array_equal(vec, np.eye(3))


@pytest.fixture(scope="module")
def deviates():
    return ensemble.block_gaussians(3001, 0, ensemble.gauss_count(8),
                                    n_rows=4000)


class TestScreenBlock:

    N = 8
    XI = 2.0

    def test_identified_couplings_match_reference(self, deviates):
        y, v, e = _screen(deviates, self.N, self.XI, 0.9)
        for r in range(0, deviates.shape[0], 7):
            _, _, v_ref, e_ref = _exact_row(deviates[r], self.N, self.XI)
            assert v[r] == v_ref
            assert e[r] == e_ref

    def test_exact_weights_for_computed_rows(self, deviates):
        """Wherever the kernel reports a weight it must equal the true
        maximal squared overlap of the corresponding sector."""
        alpha = 0.9
        y, _, _ = _screen(deviates, self.N, self.XI, alpha)
        checked = 0
        for r in np.flatnonzero(y >= 0.0):
            wp, wm, _, _ = _exact_row(deviates[r], self.N, self.XI)
            expected = min(wp, wm) if wp > alpha else wp
            assert y[r] == pytest.approx(expected, abs=1e-10)
            checked += 1
        assert checked > 100

    def test_prescreen_never_drops_an_acceptable_row(self, deviates):
        """Rows the cheap bound discards must truly fail the threshold."""
        alpha = 0.9
        y, _, _ = _screen(deviates, self.N, self.XI, alpha)
        skipped = np.flatnonzero(y == -1.0)
        assert skipped.size > 0
        for r in skipped:
            wp, wm, _, _ = _exact_row(deviates[r], self.N, self.XI)
            assert min(wp, wm) <= alpha + 1e-10

    def test_survivor_set_matches_brute_force(self, deviates):
        alpha = 0.9
        y, _, _ = _screen(deviates, self.N, self.XI, alpha)
        kernel_set = set(np.flatnonzero(y > alpha).tolist())
        brute = set()
        for r in range(deviates.shape[0]):
            wp, wm, _, _ = _exact_row(deviates[r], self.N, self.XI)
            if min(wp, wm) > alpha:
                brute.add(r)
        assert kernel_set == brute
        assert brute, "the fixture block should contain survivors"

    def test_all_outcome_kinds_occur(self, deviates):
        y, _, _ = _screen(deviates, self.N, self.XI, 0.9)
        assert np.any(y == -1.0)
        assert np.any((y >= 0.0) & (y <= 0.9))
        assert np.any(y > 0.9)

    def test_statistics_mode_skips_spectral_work(self, deviates):
        y, v, e = _screen(deviates[:256], self.N, self.XI, 2.0)
        assert np.all(y == -1.0)
        for r in range(0, 256, 11):
            _, _, v_ref, e_ref = _exact_row(deviates[r], self.N, self.XI)
            assert v[r] == v_ref
            assert e[r] == e_ref

    def test_pinned_coupling_path(self, deviates):
        rows = deviates[:512]
        y, v, e = _screen(rows, self.N, self.XI, 0.5, fixed_v=0.25)
        assert np.all(v == 0.25)
        for r in range(0, 512, 13):
            wp, wm, _, e_ref = _exact_row(rows[r], self.N, self.XI,
                                          fixed_v=0.25)
            assert e[r] == e_ref
            if y[r] >= 0.0:
                expected = min(wp, wm) if wp > 0.5 else wp
                assert y[r] == pytest.approx(expected, abs=1e-10)

    def test_pinned_site_energy_path(self, deviates):
        rows = deviates[:512]
        y, v, e = _screen(rows, self.N, self.XI, 0.5, fixed_epv=1.0)
        np.testing.assert_allclose(e + v, 1.0, atol=1e-15)
        for r in range(0, 512, 17):
            wp, wm, v_ref, e_ref = _exact_row(rows[r], self.N, self.XI,
                                              fixed_epv=1.0)
            assert v[r] == v_ref
            assert e[r] == e_ref
            if y[r] >= 0.0:
                expected = min(wp, wm) if wp > 0.5 else wp
                assert y[r] == pytest.approx(expected, abs=1e-10)

    def test_repeat_run_is_bit_identical(self, deviates):
        first = _screen(deviates[:1024], self.N, self.XI, 0.9)
        second = _screen(deviates[:1024], self.N, self.XI, 0.9)
        for a, b in zip(first, second):
            assert np.array_equal(a, b)

    def test_low_threshold_accepts_generously(self, deviates):
        """At alpha near zero nearly every realization passes, and the
        kernel must report the exact minimum weight for each."""
        rows = deviates[:128]
        alpha = 0.05
        y, _, _ = _screen(rows, self.N, self.XI, alpha)
        for r in range(rows.shape[0]):
            wp, wm, _, _ = _exact_row(rows[r], self.N, self.XI)
            expected = min(wp, wm) if wp > alpha else wp
            assert y[r] == pytest.approx(expected, abs=1e-10)
        assert np.mean(y > alpha) > 0.9
