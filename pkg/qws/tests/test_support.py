"""
Unit tests for positive supports of Grover walk powers and their zeta poles.

Run with: pytest tests/test_support.py
"""

import numpy as np
import pytest
from qws import GraphError, ParameterError, named_graph
from qws.operators import eig, matching_distance
from qws.support import (
    flip_support_form,
    grover_support_matrix,
    intertwiner_check_cube,
    lambda_block,
    render_pole_svg,
    s1,
    s3,
    scaled_grover_matrix,
    support_matches_flip_form,
    support_spectrum,
    verify_cube_identity,
    zeta_poles,
)


class TestClosedForms:
    """Test s1, s3 and the Lambda block."""

    def test_s1(self):
        """Test s1(3) on a 3-regular graph gives 2 and 1."""
        plus, minus = s1(3, 3)
        assert plus == pytest.approx(2.0)
        assert minus == pytest.approx(1.0)

    def test_lambda_block(self):
        """Test Lambda(3) for kappa = 3."""
        np.testing.assert_array_equal(lambda_block(3.0, 3), [[-3, -5], [13, 15]])

    def test_s3_matches_block(self):
        """Test s3 gives the eigenvalues of Lambda."""
        for lam in (3.0, 1.0, -2.0, 0.5):
            assert matching_distance(np.linalg.eigvals(lambda_block(lam, 3)), s3(lam, 3)) < 1e-9
        assert matching_distance(s3(3.0, 3), [10.0, 2.0]) < 1e-12


class TestSupportMatrices:
    """Test the integer support matrices."""

    def test_scaled_grover_integer(self):
        """Test kappa U is an integer matrix equal to 2 S D - kappa S."""
        g = named_graph("K4")
        m = scaled_grover_matrix(g)
        assert m.dtype == np.int64
        assert set(np.unique(m).tolist()) <= {-1, 0, 2}

    @pytest.mark.parametrize("name", ["K4", "petersen", "C5", "K3,3"])
    def test_flip_form(self, name):
        """Test U+ = S(d*d - 1) with unit weights."""
        assert support_matches_flip_form(named_graph(name))

    def test_cycle_support_is_permutation(self):
        """Test U+ on a cycle is the non-backtracking permutation."""
        m = grover_support_matrix(named_graph("C5"), 1)
        np.testing.assert_array_equal(m.sum(axis=0), np.ones(10))
        np.testing.assert_array_equal(m.sum(axis=1), np.ones(10))
        np.testing.assert_array_equal(m, flip_support_form(named_graph("C5")))

    def test_bad_order(self):
        """Test orders other than 1, 2, 3 raise."""
        with pytest.raises(ParameterError):
            grover_support_matrix(named_graph("K4"), 4)

    def test_non_regular(self):
        """Test non-regular graphs raise."""
        with pytest.raises(GraphError):
            support_spectrum(named_graph("P5"), 1)


class TestSupportSpectrum:
    """Test closed-form support spectra against the assembled matrices."""

    @pytest.mark.parametrize("name", ["K4", "K3,3", "petersen", "C6"])
    def test_first_power(self, name):
        """Test sigma(U+) on several regular graphs."""
        g = named_graph(name)
        result = support_spectrum(g, 1)
        assert result.theorem_applies
        assert result.matches
        assert result.total == g.num_arcs

    @pytest.mark.parametrize("name", ["K4", "petersen", "dodecahedron"])
    def test_second_power(self, name):
        """Test sigma((U^2)+) for kappa >= 3."""
        result = support_spectrum(named_graph(name), 2)
        assert result.theorem_applies
        assert result.matches

    def test_petersen_cube(self):
        """Test sigma((U^3)+) on Petersen: 2 x10, -2 x5, 0 x4."""
        result = support_spectrum(named_graph("petersen"), 3)
        assert result.matches
        spectrum = result.to_spectrum()
        assert spectrum.multiplicity_of(2.0, 1e-6) == 10
        assert spectrum.multiplicity_of(-2.0, 1e-6) == 5
        assert spectrum.multiplicity_of(0.0, 1e-6) == 4
        assert result.trace == int(round(np.trace(grover_support_matrix(named_graph("petersen"), 3))))

    def test_cube_needs_girth(self):
        """Test j = 3 on K4 (girth 3) raises."""
        with pytest.raises(GraphError, match="girth"):
            support_spectrum(named_graph("K4"), 3)

    def test_degree_two_outside_hypotheses(self):
        """Test kappa = 2 is outside the hypotheses for j = 2."""
        result = support_spectrum(named_graph("C7"), 2)
        assert not result.theorem_applies

    def test_degenerate_flags(self):
        """Test coincident s1 pairs are flagged at lambda = +-2 sqrt(kappa - 1)."""
        result = support_spectrum(named_graph("C6"), 1)
        assert sorted(result.degenerate_flags) == pytest.approx([-2.0, 2.0])


class TestCubeIdentity:
    """Test (U^3)+ = (U+)^3 + transpose(U+) and the intertwining."""

    def test_petersen_identity(self):
        """Test the identity holds on Petersen."""
        report = verify_cube_identity(named_graph("petersen"))
        assert report.theorem_applies
        assert report.holds
        assert report.mismatches == 0

    def test_small_girth_not_covered(self):
        """Test girth 3 is outside the hypotheses."""
        report = verify_cube_identity(named_graph("K4"))
        assert not report.theorem_applies
        assert not report.holds
        assert report.consistent

    def test_dodecahedron_identity(self):
        """Test the identity holds on the dodecahedron."""
        assert verify_cube_identity(named_graph("dodecahedron")).holds

    def test_intertwiner(self):
        """Test the cube intertwining on Petersen and the dodecahedron."""
        for name in ("petersen", "dodecahedron"):
            report = intertwiner_check_cube(named_graph(name))
            assert report.holds, name

    def test_intertwiner_needs_girth(self):
        """Test the intertwining check rejects girth below 5."""
        with pytest.raises(GraphError):
            intertwiner_check_cube(named_graph("K3,3"))


class TestZetaPoles:
    """Test zeta poles and the SVG rendering."""

    def test_petersen_poles(self):
        """Test Petersen (U^3)+ has 26 poles; zero eigenvalues contribute none."""
        poles = zeta_poles(named_graph("petersen"), 3)
        assert poles.dimension == 26
        assert poles.multiplicity_of(0.5, 1e-6) == 10
        assert poles.multiplicity_of(-0.5, 1e-6) == 5

    def test_poles_are_reciprocals(self):
        """Test poles of U+ on K4 are reciprocals of its eigenvalues."""
        g = named_graph("K4")
        eigenvalues = eig(grover_support_matrix(g, 1).astype(float)).values()
        reciprocals = [1.0 / v for v in eigenvalues if abs(v) > 1e-6]
        assert matching_distance(zeta_poles(g, 1).values(), reciprocals) < 1e-6

    def test_fallback_to_matrix_poles(self):
        """Test C5 (U^3)+ poles come from the support matrix itself."""
        g = named_graph("C5")
        assert not support_spectrum(g, 3).matches
        eigenvalues = eig(grover_support_matrix(g, 3).astype(float)).values()
        reciprocals = [1.0 / v for v in eigenvalues if abs(v) > 1e-6]
        poles = zeta_poles(g, 3)
        assert poles.dimension == len(reciprocals)
        assert matching_distance(poles.values(), reciprocals) < 1e-6

    def test_svg_is_stable(self):
        """Test the SVG is deterministic for equal input."""
        poles = zeta_poles(named_graph("petersen"), 1)
        first = render_pole_svg(poles, "petersen")
        second = render_pole_svg(poles, "petersen")
        assert first == second
        assert "<svg" in first
        assert 'width="600pt"' in first or 'width="600' in first


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
