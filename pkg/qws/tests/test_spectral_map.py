"""
Unit tests for the spectral map from d S d* to W, eigenvector lifting and
the Szegedy specializations.

Run with: pytest tests/test_spectral_map.py
"""

import numpy as np
import pytest
from qws import (
    LiftError,
    ParameterError,
    SchemeError,
    SpectralMapParams,
    WeightScheme,
    assemble_W,
    discriminant,
    eig,
    lift_eigenvector,
    mapped_spectrum,
    named_graph,
    phi,
    phi_inverse,
    random_connected_graph,
    szegedy_spectrum,
)
from qws.operators import matching_distance
from qws.spectral_map import birth_counts, intertwining_residual, setting1_birth_set, setting2_birth_set
from qws.szegedy import (
    random_setting1_weights,
    simple_random_walk_weights,
    transition_operator_T,
    uniform_setting1_weights,
)


def _grover(g):
    return WeightScheme(np.ones(g.num_vertices), np.ones(g.num_arcs), uniform_setting1_weights(g))


class TestPhi:
    """Test phi and its inverse."""

    def test_inverse_roots(self):
        """Test lambda^2 - 3 lambda + 2 has roots 2 and 1."""
        lp, lm = phi_inverse(SpectralMapParams(1.0, 3.0), 3.0)
        assert lp == pytest.approx(2.0)
        assert lm == pytest.approx(1.0)

    def test_round_trip(self):
        """Test phi maps both roots back to nu."""
        params = SpectralMapParams(2.0 + 0.5j, 1.3)
        for nu in (0.2, -0.7 + 0.1j, 1.9):
            for lam in phi_inverse(params, nu):
                assert abs(phi(params, lam) - nu) < 1e-12

    def test_root_order(self):
        """Test lambda_plus has the larger imaginary part."""
        lp, lm = phi_inverse(SpectralMapParams(2.0, 1.0), 0.5)
        assert lp.imag > 0 > lm.imag
        assert abs(lp) == pytest.approx(1.0)

    def test_degenerate_params(self):
        """Test c c' = 1 is rejected."""
        with pytest.raises(SchemeError):
            SpectralMapParams(0.5, 2.0)

    def test_phi_at_zero(self):
        """Test phi is undefined at 0."""
        with pytest.raises(ParameterError):
            phi(SpectralMapParams(2.0, 1.0), 0.0)


class TestMappedSpectrum:
    """Test the mapped spectrum against dense eigensolves."""

    @pytest.mark.parametrize("name", ["P5", "C5", "K4", "K3,3", "petersen", "K1,3"])
    def test_grover_matches_eig(self, name):
        """Test the Grover walk spectrum equals the mapped spectrum."""
        g = named_graph(name)
        ws = _grover(g)
        mapped = mapped_spectrum(g, ws)
        assert mapped.total == g.num_arcs
        assert matching_distance(mapped.values(), eig(assemble_W(g, ws)).values()) < 1e-7

    def test_petersen_births(self):
        """Test Petersen gives +1 from T = 1 plus six births and five -1 births."""
        g = named_graph("petersen")
        mapped = mapped_spectrum(g, _grover(g))
        assert mapped.birth_plus == 6
        assert mapped.birth_minus == 5
        assert len(mapped.exceptional) == 1
        assert mapped.exceptional[0].value == pytest.approx(1.0)
        assert mapped.exceptional[0].multiplicity == 1
        assert not mapped.formula_diverges
        spectrum = mapped.to_spectrum()
        assert spectrum.multiplicity_of(1.0) == 7
        assert spectrum.multiplicity_of(-1.0) == 5

    def test_tree_has_no_births(self):
        """Test a path carries no ker(d) eigenvalues."""
        g = named_graph("P5")
        assert birth_counts(g, _grover(g)) == (0, 0)

    def test_weighted_complex_c(self):
        """Test a general complex c on a regular graph."""
        g = named_graph("K3,3")
        ws = WeightScheme(np.ones(6), np.ones(18), np.full(18, 0.7 - 0.2j), c=1.0 + 1.0j)
        mapped = mapped_spectrum(g, ws)
        assert matching_distance(mapped.values(), eig(assemble_W(g, ws)).values()) < 1e-7

    def test_phase(self):
        """Test a global phase rotates every value."""
        g = named_graph("C4")
        base = mapped_spectrum(g, _grover(g)).values()
        rotated = mapped_spectrum(g, _grover(g), phase=1j).values()
        assert matching_distance(1j * base, rotated) < 1e-12

    def test_intertwining(self):
        """Test W [d*, S d*] = [d*, S d*] T~."""
        g = random_connected_graph(7, 10, seed=8)
        assert intertwining_residual(g, _grover(g)) < 1e-10


class TestLifting:
    """Test eigenvector lifting."""

    def test_lift_every_eigenvector(self):
        """Test all lifts of C5 discriminant eigenvectors are W eigenvectors."""
        g = named_graph("C5")
        ws = _grover(g)
        _, values, vectors = eig(discriminant(g, ws), vectors=True)
        for idx in range(values.size):
            lifted = lift_eigenvector(g, ws, values[idx], vectors[:, idx])
            exceptional = abs(values[idx] - 1.0) < 1e-7
            assert len(lifted) == (1 if exceptional else 2)
            for item in lifted:
                assert item.residual < 1e-8
                assert np.sum(np.abs(item.vector) ** 2 * ws.m_A) == pytest.approx(1.0)

    def test_exceptional_provenance(self):
        """Test nu = c' lifts to d* f with eigenvalue cc' - 1."""
        g = named_graph("C4")
        lifted = lift_eigenvector(g, _grover(g), 1.0, np.ones(4))
        assert len(lifted) == 1
        assert lifted[0].provenance == "exceptional"
        assert lifted[0].value == pytest.approx(1.0)

    def test_zero_vector(self):
        """Test the zero vector cannot be lifted."""
        g = named_graph("C4")
        with pytest.raises(LiftError):
            lift_eigenvector(g, _grover(g), 1.0, np.zeros(4))

    def test_not_an_eigenvector(self):
        """Test vectors that are not eigenvectors are rejected."""
        g = named_graph("C4")
        with pytest.raises(LiftError):
            lift_eigenvector(g, _grover(g), 0.5, np.array([1.0, 0.0, 0.0, 0.0]))


class TestSzegedy:
    """Test the Szegedy spectra and case tables."""

    def test_setting1_random_phases(self):
        """Test setting 1 with complex weights maps conj(sigma(T))."""
        g = random_connected_graph(6, 9, seed=11)
        w1 = random_setting1_weights(g, seed=11)
        result = szegedy_spectrum(g, 1, w1)
        assert result.total == g.num_arcs

    def test_setting2_random_walk(self):
        """Test setting 2 on a non-regular graph matches the walk."""
        g = random_connected_graph(8, 10, seed=6)
        result = szegedy_spectrum(g, 2, simple_random_walk_weights(g))
        assert result.total == g.num_arcs
        assert result.birth_set == setting2_birth_set(g)

    def test_unknown_setting(self):
        """Test settings other than 1 and 2 raise."""
        g = named_graph("C4")
        with pytest.raises(ParameterError):
            szegedy_spectrum(g, 3, uniform_setting1_weights(g))

    def test_setting2_case_table(self):
        """Test tree, odd unicyclic and other graphs."""
        assert setting2_birth_set(named_graph("P5")) == frozenset()
        assert setting2_birth_set(named_graph("C5")) == frozenset({1})
        assert setting2_birth_set(named_graph("C4")) == frozenset({1, -1})
        assert setting2_birth_set(named_graph("petersen")) == frozenset({1, -1})

    def test_setting1_case_table(self):
        """Test odd cycle gives {1} and even cycle {1, -1}."""
        for name, expected in (("C5", {1}), ("C6", {1, -1}), ("P3", set())):
            g = named_graph(name)
            t = eig(np.conj(transition_operator_T(g, uniform_setting1_weights(g))))
            assert setting1_birth_set(g, t) == frozenset(expected)

    def test_birth_set_matches_observed(self):
        """Test the case table agrees with the rank-based births on a cycle."""
        g = named_graph("C5")
        result = szegedy_spectrum(g, 2, simple_random_walk_weights(g))
        assert result.birth_set == frozenset({1})
        assert (result.birth_plus, result.birth_minus) == (1, 0)
        assert result.to_spectrum().multiplicity_of(1.0) == 2


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
