import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonmol import (ScattererCoefficients, chain_response, chain_transmission, optical_depth,
                       three_level_coefficients, two_level_coefficients)


class TestCoefficients:
    def test_resonant_equal_rates(self):
        c = two_level_coefficients(1.0, 1.0)
        assert c.r == -0.5 and c.t == 0.5

    def test_uncoupled(self):
        c = two_level_coefficients(0.0, 1.0, 0.3)
        assert c.r == 0 and c.t == 1

    def test_mirror_limit(self):
        assert two_level_coefficients(1e6, 1.0).r == pytest.approx(-1, abs=1e-5)

    def test_eit_transparency(self):
        c = three_level_coefficients(2.0, 1.0, 1.5, 0.0)
        assert c.r == 0 and c.t == 1

    def test_no_control_reduces_to_two_level(self):
        for d in (-0.7, 0.2, 1.3):
            three = three_level_coefficients(0.8, 1.0, 0.0, d)
            two = two_level_coefficients(0.8, 1.0, d)
            assert three.r == pytest.approx(two.r, rel=1e-14)

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            three_level_coefficients(1.0, 1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            three_level_coefficients(1.0, 1.0, 1.0, 0.1, control_detuning=0.5)

    def test_t_equals_one_plus_r(self):
        c = three_level_coefficients(0.3, 1.0, 1.1, 0.4)
        assert c.t == 1 + c.r

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0, 20), st.floats(0.01, 5), st.floats(0.01, 5), st.floats(-5, 5))
    def test_energy_bound(self, g1d, gp, om, d):
        c = three_level_coefficients(g1d, gp, om, d)
        assert abs(c.t) ** 2 + abs(c.r) ** 2 <= 1 + 1e-12


class TestChain:
    def test_single_element(self):
        t = chain_transmission(two_level_coefficients(1.0, 1.0), 1)
        assert abs(t) ** 2 == pytest.approx(0.25)

    def test_beer_lambert_unit_depth(self):
        t = chain_transmission(two_level_coefficients(0.05, 1.0), 10)
        assert abs(t) ** 2 == pytest.approx(np.exp(-1), rel=0.03)

    def test_eit_chain_transparent(self):
        for n in (1, 7, 100):
            t = chain_transmission(three_level_coefficients(2.0, 1.0, 1.0, 0.0), n)
            assert abs(t) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_phase_accumulation(self):
        # weak scatterers: total response is the product of single-atom factors
        g1d, om, d, n = 0.01, 1.0, 0.05, 50
        t = chain_transmission(three_level_coefficients(g1d, 1.0, om, d), n)
        free = chain_transmission(three_level_coefficients(0.0, 1.0, om, d), n)
        expected = np.exp(-n * g1d * d / ((1.0 - 2j * d) * d + 2j * om**2))
        assert t / free == pytest.approx(expected, rel=1e-6)

    def test_brute_force_two_atoms(self):
        # two scatterers with explicit multiple reflections
        c = two_level_coefficients(0.7, 1.0, 0.3)
        phi = 1.5 * np.pi
        p = np.exp(1j * phi)
        expected = c.t * p * c.t / (1 - c.r * p * c.r * p)
        assert chain_transmission(c, 2) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, 3), st.floats(-3, 3), st.integers(1, 60))
    def test_chain_energy_bound(self, g1d, d, n):
        t, r = chain_response(two_level_coefficients(g1d, 1.0, d), n)
        assert abs(t) ** 2 + abs(r) ** 2 <= 1 + 1e-9

    def test_singular_scatterer(self):
        with pytest.raises(ZeroDivisionError):
            ScattererCoefficients.from_reflection(-1.0).transfer_matrix()

    def test_depth_equivalence_in_eit_regime(self):
        om, d = 1.0, 0.02
        a = chain_transmission(three_level_coefficients(0.1, 1.0, om, d), 40)
        b = chain_transmission(three_level_coefficients(0.2, 1.0, om, d), 20)
        assert abs(a) ** 2 == pytest.approx(abs(b) ** 2, rel=0.02)

    @pytest.mark.parametrize("g1d, depth", [(0.05, 0.5), (0.05, 1), (0.05, 2), (0.05, 5),
                                            (0.05, 10), (0.1, 10), (0.2, 2), (0.2, 4)])
    def test_beer_lambert_regime(self, g1d, depth):
        n = int(round(depth / (2 * g1d)))
        t = chain_transmission(two_level_coefficients(g1d, 1.0), n)
        assert abs(t) ** 2 == pytest.approx(np.exp(-depth), rel=0.05)

    @pytest.mark.xfail(strict=True, reason="exact chain sits 8.9% above exp(-D) at G1d = 0.2, "
                                           "D = 10; the 5% claim fails at this corner only")
    def test_beer_lambert_upper_coupling(self):
        t = chain_transmission(two_level_coefficients(0.2, 1.0), 25)
        assert abs(t) ** 2 == pytest.approx(np.exp(-10), rel=0.05)


class TestOpticalDepth:
    @pytest.mark.parametrize("n, g, d", [(100, 2.0, 400), (200, 1.0, 400), (50, 0.0, 0)])
    def test_values(self, n, g, d):
        assert optical_depth(n, g) == d
