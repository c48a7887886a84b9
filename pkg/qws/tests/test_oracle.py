"""
Unit tests for multiset comparison and the corpus-wide check suite.

Run with: pytest tests/test_oracle.py
"""

import pytest
from qws import ParameterError, compare_multisets, named_graph, random_connected_graph, run_theorem_suite
from qws import oracle
from qws.oracle import BUILTIN_NAMES, THEOREMS, builtin_corpus, identity_report


class TestCompareMultisets:
    """Test eigenvalue multiset matching."""

    def test_equal_multisets(self):
        """Test permuted equal multisets pass."""
        report = compare_multisets([1.0, 1j, -1.0], [-1.0, 1.0, 1j])
        assert report.passed
        assert report.verdict == "pass"
        assert len(report.matched_pairs) == 3
        assert report.max_error == 0.0

    def test_multiplicity_difference(self):
        """Test a missing copy fails."""
        report = compare_multisets([1.0, 1.0], [1.0])
        assert not report.passed
        assert report.unmatched_claimed == (1.0 + 0j,)

    def test_outside_tolerance(self):
        """Test values further apart than tol are unmatched."""
        report = compare_multisets([0.0], [1e-3], tol=1e-6)
        assert not report.passed
        assert report.unmatched_observed == (1e-3 + 0j,)

    def test_optimal_fallback(self):
        """Test the assignment fallback fixes a greedy mismatch."""
        report = compare_multisets([0.0, 0.2], [0.15, -0.3], tol=0.35)
        assert report.passed
        assert report.max_error == pytest.approx(0.3)

    def test_labelled(self):
        """Test labels are attached without changing the verdict."""
        report = compare_multisets([2.0], [2.0]).labelled("K4", "spectral-map/setting1", "note")
        assert (report.graph, report.theorem, report.note) == ("K4", "spectral-map/setting1", "note")
        assert report.passed

    def test_identity_report(self):
        """Test scalar residual reports."""
        assert identity_report(1e-12, 1e-10, "C4", "intertwining").passed
        assert not identity_report(1e-3, 1e-10, "C4", "intertwining").passed


class TestCorpus:
    """Test the builtin corpus."""

    def test_builtin_names(self):
        """Test named graphs come first, then seeded random graphs."""
        corpus = builtin_corpus(random_count=3)
        names = [name for name, _ in corpus]
        assert names[:len(BUILTIN_NAMES)] == list(BUILTIN_NAMES)
        assert names[len(BUILTIN_NAMES):] == ["random-0", "random-1", "random-2"]

    def test_random_reproducible(self):
        """Test the random members are reproducible."""
        assert builtin_corpus(2) == builtin_corpus(2)


class TestSuite:
    """Test run_theorem_suite."""

    @pytest.mark.parametrize("which", THEOREMS)
    def test_each_check_passes_on_petersen(self, which):
        """Test every check passes on Petersen."""
        reports = run_theorem_suite([("petersen", named_graph("petersen"))], which, threads=1)
        assert reports
        failed = [(r.theorem, r.max_error, r.note) for r in reports if not r.passed]
        assert not failed

    def test_non_regular_graph(self):
        """Test spectral-map, conjugation and szegedy pass on a random graph."""
        g = random_connected_graph(7, 10, seed=3)
        for which in ("spectral-map", "conjugation", "szegedy"):
            reports = run_theorem_suite([g], which, threads=2)
            assert all(r.passed for r in reports), which
            assert all(r.graph == "graph-0" for r in reports)

    def test_regular_only_checks_skipped(self):
        """Test non-regular graphs are filtered out of qgraph and supports."""
        assert run_theorem_suite([named_graph("P5")], "qgraph") == []
        assert run_theorem_suite([named_graph("K1,3")], "supports") == []

    def test_negative_controls_pass(self):
        """Test K4 and K3,3 report the cube identity as a consistent negative control."""
        corpus = [("K4", named_graph("K4")), ("K3,3", named_graph("K3,3"))]
        reports = run_theorem_suite(corpus, "supports", threads=1)
        cube = [r for r in reports if r.theorem == "supports/cube-identity"]
        assert len(cube) == 2
        assert all(r.note == "negative control" for r in cube)

    def test_builtin_corpus_passes(self):
        """Test every check passes on the whole built-in corpus."""
        reports = run_theorem_suite(builtin_corpus(), "all")
        graphs = {r.graph for r in reports}
        assert {"K1,3", "C5", "petersen", "random-0"} <= graphs
        assert any(r.theorem == "conjugation/operator" and r.graph == "K1,3" for r in reports)
        failed = [(r.graph, r.theorem, r.max_error, r.note) for r in reports if not r.passed]
        assert not failed

    def test_order_independent_of_threads(self):
        """Test report order follows the corpus for any worker count."""
        corpus = [("C4", named_graph("C4")), ("C5", named_graph("C5")), ("K4", named_graph("K4"))]
        one = run_theorem_suite(corpus, "qgraph", threads=1)
        many = run_theorem_suite(corpus, "qgraph", threads=3)
        assert [(r.graph, r.theorem) for r in one] == [(r.graph, r.theorem) for r in many]

    def test_errors_become_failures(self, monkeypatch):
        """Test a raised QWSError becomes a failed report instead of aborting."""
        def broken(name, g, tol):
            raise ParameterError("broken check")

        monkeypatch.setitem(oracle._CHECKS, "qgraph", broken)
        reports = run_theorem_suite([("C4", named_graph("C4"))], "qgraph")
        assert len(reports) == 1
        assert not reports[0].passed
        assert reports[0].note == "broken check"

    def test_unknown_check(self):
        """Test unknown check names raise."""
        with pytest.raises(ParameterError):
            run_theorem_suite([named_graph("C4")], "bogus")


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
