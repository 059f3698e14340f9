"""Eulerian numbers, series coefficients, packaged polynomials, root maps."""

import cmath
import math

import numpy as np
import pytest

import mcarma as mc
from mcarma.eulerian import K_MAX, N_MAX


# Integer tables printed with the packaged polynomials; exact by contract.
Q_TABLE = {
    1: (1,),
    2: (2, 4),
    3: (4, 52, 64),
    4: (8, 480, 2376, 2176),
    5: (16, 4016, 58416, 173456, 126976),
    6: (32, 32576, 1221056, 8781376, 18560416, 11321344),
}
R_TABLE = {
    1: (2,),
    2: (4, 20),
    3: (8, 224, 488),
    4: (16, 1968, 16176, 22160),
    5: (32, 16192, 374592, 1621312, 1616672),
    6: (64, 130624, 7586944, 77577344, 220729664, 172976960),
}


class TestEulerianTable:
    def test_row_three(self):
        assert mc.eulerian_table(3).row(3) == (1, 4, 1)

    def test_row_four_and_sum(self):
        tab = mc.eulerian_table(4)
        assert tab.row(4) == (1, 11, 11, 1)
        assert sum(tab.row(4)) == 24

    def test_reduced_row_from_row_four(self):
        assert mc.eulerian_table(4).reduced_row(2) == (1, 10, 1)

    @pytest.mark.parametrize("n", range(1, 26))
    def test_invariants_exact(self, n):
        tab = mc.eulerian_table(26)
        row = tab.row(n)
        assert row[0] == 1 and row[-1] == 1
        assert row == tuple(reversed(row))
        assert sum(row) == math.factorial(n)

    @pytest.mark.parametrize("k", range(1, 13))
    def test_reduced_reconstructs_even_row(self, k):
        tab = mc.eulerian_table(26)
        red = tab.reduced_row(k)
        rebuilt = [0] * (2 * k)
        for i, c in enumerate(red):
            rebuilt[i] += c
            rebuilt[i + 1] += c
        assert tuple(rebuilt) == tab.row(2 * k)

    def test_bounds(self):
        with pytest.raises(ValueError):
            mc.eulerian_table(0)
        with pytest.raises(ValueError):
            mc.eulerian_table(N_MAX + 1)


class TestCTilde:
    def test_known_values(self):
        assert mc.c_tilde(1, math.pi) == pytest.approx(-0.25, abs=1e-14)
        assert mc.c_tilde(2, math.pi / 2) == pytest.approx(-0.25j, abs=1e-14)
        assert mc.c_tilde(3, math.pi) == pytest.approx(1.0 / 48.0, abs=1e-15)

    def test_omega_zero_rejected(self):
        with pytest.raises(mc.OmegaZero):
            mc.c_tilde(2, 0.0)

    def test_even_orders_purely_imaginary(self):
        for k in (1, 2, 3, 5):
            for omega in (0.4, -1.3, 2.8):
                val = mc.c_tilde(2 * k, omega)
                assert abs(val.real) <= 1e-12 * abs(val)

    def test_reflected_coefficient_relation(self):
        for k in range(6):
            omega = 0.9
            assert mc.d_tilde(k, omega) == (-1) ** (k + 1) * mc.c_tilde(k, omega)

    @pytest.mark.parametrize("k", range(1, 13))
    def test_packaging_identities(self, k):
        # (2k-1)! [2(1-cos w)]^k  c_{2k-1} = (-1)^k q_{k-1}(cos w)
        # (2k)!   [2(1-cos w)]^(k+1) c_{2k} = (-1)^k i sin(w) r_{k-1}(cos w)
        qp, rp = mc.qr_polys(k)
        rng = np.random.default_rng(k)
        for omega in rng.uniform(-3.0, 3.0, 50):
            if abs(omega) < 1e-2:
                continue
            x = math.cos(omega)
            base = 2.0 * (1.0 - x)
            lhs_odd = math.factorial(2 * k - 1) * base ** k * mc.c_tilde(2 * k - 1, omega)
            rhs_odd = (-1) ** k * qp(x)
            assert lhs_odd == pytest.approx(rhs_odd, rel=1e-10)
            lhs_even = math.factorial(2 * k) * base ** (k + 1) * mc.c_tilde(2 * k, omega)
            rhs_even = (-1) ** k * 1j * math.sin(omega) * rp(x)
            assert lhs_even == pytest.approx(rhs_even, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("omega", [0.7, -1.9, 2.5])
    def test_against_cauchy_integral_quadrature(self, omega):
        # independent oracle: contour quadrature of the kernel on |z| = |omega|/2
        nodes = 256
        radius = abs(omega) / 2.0
        thetas = 2.0 * np.pi * np.arange(nodes) / nodes
        zs = radius * np.exp(1j * thetas)
        fvals = 1.0 / (1.0 - np.exp(zs + 1j * omega))
        for k in range(11):
            oracle = np.mean(fvals * np.exp(-1j * k * thetas)) / radius ** k
            assert mc.c_tilde(k, omega) == pytest.approx(oracle, rel=1e-8)


class TestPackagedPolynomials:
    @pytest.mark.parametrize("k", sorted(Q_TABLE))
    def test_exact_integer_tables(self, k):
        qp, rp = mc.qr_polys(k)
        assert qp.descending() == Q_TABLE[k]
        assert rp.descending() == R_TABLE[k]

    @pytest.mark.parametrize("k", range(1, 13))
    def test_degree_and_leading_coefficients(self, k):
        qp, rp = mc.qr_polys(k)
        assert qp.degree == k - 1
        assert rp.degree == k - 1
        assert qp.coeffs[-1] == 2 ** (k - 1)
        assert rp.coeffs[-1] == 2 ** k

    @pytest.mark.parametrize("k", range(2, 13))
    def test_no_root_inside_unit_interval(self, k):
        for poly in mc.qr_polys(k):
            roots = np.roots([float(c) for c in poly.descending()])
            real = roots[np.abs(roots.imag) < 1e-9]
            assert not np.any((real.real > -1.0) & (real.real < 1.0))

    def test_bounds(self):
        with pytest.raises(ValueError):
            mc.qr_polys(0)
        with pytest.raises(ValueError):
            mc.qr_polys(K_MAX + 1)

    def test_chebyshev_values(self):
        assert mc.chebyshev_t(0).coeffs == (1,)
        assert mc.chebyshev_t(1).coeffs == (0, 1)
        assert mc.chebyshev_t(2).coeffs == (-1, 0, 2)
        assert mc.chebyshev_t(5).coeffs == (0, 5, 0, -20, 0, 16)


class TestXiEta:
    def test_k2_odd(self):
        res = mc.xi_roots(2, "odd")
        np.testing.assert_allclose(res.xi, [3.0], atol=1e-12)
        assert np.prod(res.xi) == pytest.approx(math.factorial(3) / 2.0, rel=1e-12)

    def test_k3_odd_matches_printed_roots(self):
        res = mc.xi_roots(3, "odd")
        np.testing.assert_allclose(sorted(res.xi.real), [2.377, 12.623], atol=1e-3)

    def test_k4_even_matches_printed_roots(self):
        res = mc.xi_roots(4, "even")
        xs = sorted((1.0 - res.xi).real)
        np.testing.assert_allclose(xs, [-114.258, -7.014, -1.728], atol=1e-3)

    @pytest.mark.parametrize("k,which", [(2, "odd"), (5, "odd"), (3, "even"), (8, "even")])
    def test_product_invariant(self, k, which):
        res = mc.xi_roots(k, which)
        target = math.factorial(2 * k - 1) / 2 ** (k - 1) if which == "odd" \
            else math.factorial(2 * k) / 2 ** k
        assert complex(np.prod(res.xi)) == pytest.approx(target, rel=1e-9)

    @pytest.mark.parametrize("k,which", [(3, "odd"), (4, "even"), (7, "odd")])
    def test_xi_avoids_zero_two_interval(self, k, which):
        res = mc.xi_roots(k, which)
        real = res.xi[np.abs(res.xi.imag) == 0.0].real
        assert not np.any((real > 0.0) & (real < 2.0))

    def test_eta_matched_inside_disc(self):
        res = mc.xi_roots(6, "odd")
        assert np.all(np.abs(res.eta) < 1.0)


class TestEta:
    def test_eta_three(self):
        assert mc.eta(3.0) == pytest.approx(-2.0 + math.sqrt(3.0), abs=1e-14)

    def test_eta_of_printed_root(self):
        assert mc.eta(12.623) == pytest.approx(-0.04337, abs=5e-6)

    def test_candidates_multiply_to_one(self):
        for xi in (3.0, 7.5, -4.0, 2.5 + 1.0j):
            e = mc.eta(xi)
            other = 2.0 * (1.0 - xi) - e
            assert e * other == pytest.approx(1.0, rel=1e-12)

    def test_conjugation_symmetry(self):
        xi = 3.0 + 4.0j
        assert mc.eta(xi.conjugate()) == pytest.approx(mc.eta(xi).conjugate(), rel=1e-14)

    @pytest.mark.parametrize("xi", [0.0, 2.0, 1.0, 0.5])
    def test_unit_modulus_rejected(self, xi):
        with pytest.raises(mc.UnitModulusEta):
            mc.eta(xi)
