"""Model validation, state space, determinant/adjugate polynomials, roots."""

import numpy as np
import pytest

import mcarma as mc
from mcarma.model import _cluster_roots, _detp_coeffs, _roots_of

from conftest import random_stable_model


class TestValidateModel:
    def test_m1_accepted_with_roots(self, m1):
        roots = sorted(lam.real for lam, _ in mc.char_roots(m1).roots)
        assert roots == pytest.approx([-3.0, -2.0], abs=1e-9)

    def test_m2_accepted_with_roots(self, m2):
        roots = sorted(lam.real for lam, _ in mc.char_roots(m2).roots)
        assert roots == pytest.approx([-2.0, -1.0], abs=1e-9)

    def test_unstable_reports_offending_root(self):
        with pytest.raises(mc.Unstable) as err:
            mc.validate_model({"p": 1, "q": 0, "d": 2,
                               "A": [[[-3.0, 0.0], [0.0, 2.0]]],
                               "B": [[[1.0, 0.0], [0.0, 1.0]]],
                               "SigmaL": [[1.0, 0.0], [0.0, 1.0]]})
        assert err.value.root.real == pytest.approx(3.0, abs=1e-8)

    def test_bad_orders(self):
        with pytest.raises(mc.BadOrders):
            mc.validate_model({"p": 1, "q": 1, "d": 1,
                               "A": [[[1.0]]], "B": [[[1.0]], [[1.0]]],
                               "SigmaL": [[1.0]]})

    def test_asymmetric_covariance(self):
        with pytest.raises(mc.BadCovariance):
            mc.validate_model({"p": 1, "q": 0, "d": 2,
                               "A": [[[3.0, 1.0], [0.0, 2.0]]],
                               "B": [[[1.0, 0.0], [0.0, 1.0]]],
                               "SigmaL": [[1.0, 0.5], [0.1, 1.0]]})

    def test_indefinite_covariance(self):
        with pytest.raises(mc.BadCovariance):
            mc.validate_model({"p": 1, "q": 0, "d": 2,
                               "A": [[[3.0, 1.0], [0.0, 2.0]]],
                               "B": [[[1.0, 0.0], [0.0, 1.0]]],
                               "SigmaL": [[1.0, 0.0], [0.0, -1.0]]})

    def test_ragged_rejected(self):
        with pytest.raises(ValueError):
            mc.validate_model({"p": 1, "q": 0, "d": 2,
                               "A": [[[3.0, 1.0], [0.0]]],
                               "B": [[[1.0, 0.0], [0.0, 1.0]]],
                               "SigmaL": [[1.0, 0.0], [0.0, 1.0]]})

    def test_arrays_read_only(self, m1):
        with pytest.raises(ValueError):
            m1.ar_coeffs[0, 0, 0] = 99.0


class TestStateSpace:
    def test_m1(self, m1):
        ss = mc.state_space(m1)
        np.testing.assert_allclose(ss.a_mat, -m1.ar_coeffs[0])
        np.testing.assert_allclose(ss.c_mat, np.eye(2))
        np.testing.assert_allclose(ss.b_mat, -np.eye(2))

    def test_m2(self, m2):
        ss = mc.state_space(m2)
        np.testing.assert_allclose(ss.a_mat, [[0.0, 1.0], [-2.0, -3.0]])
        np.testing.assert_allclose(ss.c_mat, [[1.0, 0.0]])
        np.testing.assert_allclose(ss.b_mat, [[0.0], [-1.0]])

    def test_unrolled_recursion_p2_q1(self):
        # beta_1 = -B_0 and beta_2 = A_1 B_0 - B_1: the recursion taken
        # verbatim, which is also the reading that makes the state-space
        # transfer function equal -P^{-1} Q (see the Lyapunov/residue
        # autocovariance agreement test below).
        a1, b0, b1 = 3.0, 0.7, -0.4
        model = mc.validate_model({"p": 2, "q": 1, "d": 1,
                                   "A": [[[a1]], [[2.0]]],
                                   "B": [[[b0]], [[b1]]],
                                   "SigmaL": [[1.0]]})
        ss = mc.state_space(model)
        np.testing.assert_allclose(ss.b_mat, [[-b0], [a1 * b0 - b1]])

    @pytest.mark.parametrize("seed", range(6))
    def test_eigenvalues_match_char_roots(self, seed):
        model = random_stable_model(np.random.default_rng(seed))
        eig = np.sort_complex(np.linalg.eigvals(mc.state_space(model).a_mat))
        roots = np.sort_complex(mc.char_roots(model).expanded())
        np.testing.assert_allclose(eig, roots, atol=1e-6)


class TestDetPoly:
    def test_m1(self, m1):
        np.testing.assert_allclose(mc.det_poly(m1).coeffs, [6.0, 5.0, 1.0],
                                   rtol=0, atol=1e-12)

    def test_m2(self, m2):
        np.testing.assert_allclose(mc.det_poly(m2).coeffs, [2.0, 3.0, 1.0],
                                   rtol=0, atol=1e-12)

    def test_unstable_bypass_z_squared(self):
        # P(z) = z I_2 directly through the raw helper (no validation)
        coeffs = _detp_coeffs(1, 2, np.zeros((1, 2, 2)))
        np.testing.assert_allclose(coeffs, [0.0, 0.0, 1.0], atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_pointwise_against_direct_determinant(self, seed):
        rng = np.random.default_rng(100 + seed)
        model = random_stable_model(rng)
        poly = mc.det_poly(model)
        assert poly.degree == model.p * model.d
        assert poly.coeffs[-1] == 1.0
        pc = [model.ar_coeffs[model.p - 1 - j] for j in range(model.p)]
        pc.append(np.eye(model.d))
        for _ in range(10):
            z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            direct = np.linalg.det(sum(c * z ** j for j, c in enumerate(pc)))
            assert poly(z) == pytest.approx(direct, rel=1e-10)


class TestAdjugateQ:
    def test_m1(self, m1):
        s = mc.adjugate_q(m1)
        np.testing.assert_allclose(s.coeffs[1], np.eye(2), atol=1e-12)
        np.testing.assert_allclose(s.coeffs[0], [[2.0, -1.0], [0.0, 3.0]], atol=1e-12)

    def test_m2_scalar(self, m2):
        s = mc.adjugate_q(m2)
        np.testing.assert_allclose(s.coeffs, [[[1.0]]], atol=1e-12)

    def test_d1_general_reverses_ma(self):
        model = mc.validate_model({"p": 3, "q": 2, "d": 1,
                                   "A": [[[6.0]], [[11.0]], [[6.0]]],
                                   "B": [[[2.0]], [[3.0]], [[5.0]]],
                                   "SigmaL": [[1.0]]})
        s = mc.adjugate_q(model)
        np.testing.assert_allclose(s.coeffs[:, 0, 0], [5.0, 3.0, 2.0], atol=1e-10)

    @pytest.mark.parametrize("seed", range(5))
    def test_adjugate_identity(self, seed):
        rng = np.random.default_rng(200 + seed)
        model = random_stable_model(rng)
        d = model.d
        detp = mc.det_poly(model)
        pc = np.concatenate([model.ar_coeffs[::-1], np.eye(d)[None]])
        qc = model.ma_coeffs[::-1]
        spoly = mc.adjugate_q(model)
        assert spoly.coeffs[-1] == pytest.approx(model.ma_coeffs[0], abs=1e-9)
        for _ in range(10):
            z = complex(rng.uniform(-2, 2), rng.uniform(0.5, 2))
            pval = sum(c * z ** j for j, c in enumerate(pc))
            qval = sum(c * z ** j for j, c in enumerate(qc))
            target = detp(z) * np.linalg.solve(pval, qval)
            scale = max(np.abs(target).max(), 1.0)
            assert np.abs(spoly(z) - target).max() <= 1e-9 * scale


class TestSTilde:
    def test_m1_values(self, m1):
        st = mc.s_tilde(m1)
        np.testing.assert_allclose(st[2], -np.eye(2), atol=1e-12)
        np.testing.assert_allclose(st[1], [[0.0, 1.0], [-1.0, 0.0]], atol=1e-12)
        np.testing.assert_allclose(st[0], [[5.0, -3.0], [-3.0, 9.0]], atol=1e-12)

    def test_m2_single(self, m2):
        np.testing.assert_allclose(mc.s_tilde(m2), [[[1.0]]], atol=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_odd_coefficients_vanish_for_d1(self, seed):
        model = random_stable_model(np.random.default_rng(300 + seed), d=1)
        st = mc.s_tilde(model)
        assert np.abs(st[1::2]).max(initial=0.0) == 0.0

    @pytest.mark.parametrize("seed", range(4))
    def test_parity_and_top_coefficient(self, seed):
        model = random_stable_model(np.random.default_rng(400 + seed))
        st = mc.s_tilde(model)
        for j, coeff in enumerate(st):
            np.testing.assert_array_equal(coeff, (-1) ** j * coeff.T)
        ell = (model.d - 1) * model.p + model.q
        b0 = model.ma_coeffs[0]
        top = (-1) ** ell * b0 @ model.sigma_l @ b0.T
        np.testing.assert_allclose(st[-1], top, atol=1e-9 * max(1.0, np.abs(top).max()))


class TestCharRoots:
    def test_repeated_root(self, repeated_root):
        roots = mc.char_roots(repeated_root).roots
        assert len(roots) == 1
        lam, nu = roots[0]
        assert nu == 2
        assert lam == pytest.approx(-1.0, abs=1e-6)

    def test_multiplicities_sum(self, m1, m2):
        assert mc.char_roots(m1).total == 2
        assert mc.char_roots(m2).total == 2

    def test_conjugate_pairs_exact(self):
        model = mc.validate_model({"p": 2, "q": 0, "d": 1,
                                   "A": [[[2.0]], [[2.0]]],
                                   "B": [[[1.0]]], "SigmaL": [[1.0]]})
        roots = mc.char_roots(model).expanded()
        assert roots[0] == roots[1].conjugate()
        assert roots[0].real == pytest.approx(-1.0, abs=1e-10)

    def test_cluster_mean_and_multiplicity(self):
        raw = np.array([-1.0 + 1e-9, -1.0 - 1e-9, -2.0])
        reps, mults = _cluster_roots(raw.astype(complex))
        assert sorted(mults) == [1, 2]
        rep = reps[mults.index(2)]
        assert rep == pytest.approx(-1.0, abs=1e-12)

    def test_ambiguous_clusters_raise(self):
        from numpy.polynomial import polynomial as npoly
        coeffs = npoly.polyfromroots([-1.0, -1.0 - 5e-7])
        with pytest.raises(mc.RootClusterAmbiguous):
            _roots_of(coeffs)

    def test_polish_flag(self, m1):
        roots = mc.char_roots(m1, polish=True).expanded()
        np.testing.assert_allclose(np.sort(roots.real), [-3.0, -2.0], atol=1e-12)


class TestModelFile:
    def test_round_trip(self, tmp_path, m1):
        import json
        path = tmp_path / "model.json"
        path.write_text(json.dumps(mc.model_to_dict(m1)))
        loaded = mc.load_model(path)
        np.testing.assert_array_equal(loaded.ar_coeffs, m1.ar_coeffs)
        np.testing.assert_array_equal(loaded.ma_coeffs, m1.ma_coeffs)
        np.testing.assert_array_equal(loaded.sigma_l, m1.sigma_l)
