"""
Unit tests for the qws command-line interface.

Run with: pytest tests/test_cli.py
"""

import json

import pytest
from qws import SchemeError, named_graph
from qws.cli import main, parse_spectrum_csv, parse_weight_csv, spectrum_csv
from qws.operators import Spectrum


def _write_graph(path, name):
    path.write_text(named_graph(name).edge_list_text(), encoding="utf-8")
    return str(path)


class TestInfo:
    """Test the info command."""

    def test_petersen(self, capsys):
        """Test the profile line for Petersen."""
        assert main(["info", "petersen"]) == 0
        out = capsys.readouterr().out.strip()
        assert out == "vertices=10 edges=15 girth=5 regular=3 bipartite=false cycle_rank=6"

    def test_tree_from_file(self, tmp_path, capsys):
        """Test a path read from an edge-list file."""
        path = _write_graph(tmp_path / "path.txt", "P5")
        assert main(["info", path]) == 0
        out = capsys.readouterr().out
        assert "girth=inf" in out
        assert "regular=false" in out
        assert "bipartite=true" in out

    def test_json(self, capsys):
        """Test --json emits one document."""
        assert main(["--json", "info", "K3,3"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["girth"] == 4
        assert doc["regular"] == 3
        assert doc["bipartite"] is True

    def test_unknown_graph(self, capsys):
        """Test an unreadable graph is a usage error."""
        assert main(["info", "no-such-graph"]) == 2
        assert capsys.readouterr().err.startswith("Error: ")

    def test_invalid_file(self, tmp_path, capsys):
        """Test a disconnected graph file fails with exit code 1."""
        path = tmp_path / "bad.txt"
        path.write_text("4\n0 1\n2 3\n", encoding="utf-8")
        assert main(["info", str(path)]) == 1
        assert "disconnected" in capsys.readouterr().err


class TestSpectrum:
    """Test the spectrum command."""

    def test_setting1_csv(self, capsys):
        """Test the Grover spectrum of C4 has |A| = 8 values."""
        assert main(["spectrum", "--setting", "1", "C4"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "re,im,multiplicity,provenance"
        assert parse_spectrum_csv(out).dimension == 8

    def test_setting2_eig(self, capsys):
        """Test the dense method on a tree."""
        assert main(["spectrum", "--setting", "2", "--method", "eig", "P5"]) == 0
        spectrum = parse_spectrum_csv(capsys.readouterr().out)
        assert spectrum.dimension == 8
        assert all(e.provenance == "observed" for e in spectrum.entries)

    def test_support_cube(self, capsys):
        """Test the (U^3)+ closed form on Petersen."""
        assert main(["spectrum", "--construction", "support", "--j", "3", "petersen"]) == 0
        spectrum = parse_spectrum_csv(capsys.readouterr().out)
        assert spectrum.dimension == 30
        assert spectrum.multiplicity_of(-2.0, 1e-6) == 5

    def test_qgraph_needs_k(self, capsys):
        """Test the qgraph construction without --k is a usage error."""
        assert main(["spectrum", "--construction", "qgraph", "C4"]) == 2

    def test_matrix_output(self, tmp_path, capsys):
        """Test --matrix-output writes |A|^2 rows in long format."""
        target = tmp_path / "u.csv"
        assert main(["spectrum", "--setting", "1", "--matrix-output", str(target), "C4"]) == 0
        lines = target.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "row,col,re,im"
        assert len(lines) == 1 + 64

    def test_weights_file(self, tmp_path, capsys):
        """Test setting-1 weights read from CSV."""
        g = named_graph("C4")
        rows = ["arc,re,im"] + [f"{e},{2 ** -0.5},0" for e in range(g.num_arcs)]
        weights = tmp_path / "w.csv"
        weights.write_text("\n".join(rows) + "\n", encoding="utf-8")
        assert main(["spectrum", "--setting", "1", "--weights", str(weights), "C4"]) == 0
        assert parse_spectrum_csv(capsys.readouterr().out).dimension == 8

    def test_bad_weights(self, tmp_path, capsys):
        """Test weights violating the normalization exit with 1."""
        rows = ["arc,re,im"] + [f"{e},1,0" for e in range(8)]
        weights = tmp_path / "w.csv"
        weights.write_text("\n".join(rows) + "\n", encoding="utf-8")
        assert main(["spectrum", "--setting", "1", "--weights", str(weights), "C4"]) == 1
        assert "normalization" in capsys.readouterr().err

    def test_custom_complex_c(self, capsys):
        """Test the custom construction accepts a complex c."""
        assert main(["--json", "spectrum", "--construction", "custom", "--c", "0.5+0.5j",
                     "--method", "eig", "C4"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["dimension"] == 8

    def test_json(self, capsys):
        """Test the JSON document of a spectrum."""
        assert main(["--json", "spectrum", "--construction", "grover", "K4"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["dimension"] == 12
        assert sum(entry["multiplicity"] for entry in doc["spectrum"]) == 12


class TestFormats:
    """Test CSV helpers."""

    def test_weight_csv_missing_arc(self):
        """Test a weight file must cover every arc."""
        with pytest.raises(SchemeError, match="arc 1"):
            parse_weight_csv("arc,re,im\n0,1,0\n", 2)

    def test_weight_csv_repeated_arc(self):
        """Test repeated arcs are rejected."""
        with pytest.raises(SchemeError, match="twice"):
            parse_weight_csv("arc,re\n0,1\n0,1\n", 2)

    def test_weight_csv_header(self):
        """Test the header is required."""
        with pytest.raises(SchemeError):
            parse_weight_csv("0,1,0\n1,1,0\n", 2)

    def test_spectrum_csv_precision(self):
        """Test values survive the CSV exactly."""
        spectrum = Spectrum.from_values([1 / 3, 1j / 7, 1 / 3])
        parsed = parse_spectrum_csv(spectrum_csv(spectrum))
        assert sorted(e.value.real for e in parsed.entries) == sorted(e.value.real for e in spectrum.entries)
        assert parsed.dimension == 3


class TestWalk:
    """Test the walk command."""

    def test_distributions(self, capsys):
        """Test each step's vertex distribution sums to 1."""
        assert main(["walk", "--setting", "1", "--steps", "4", "petersen"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "step,vertex,probability"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 5 * 10
        for step in range(5):
            total = sum(float(p) for s, _, p in rows if int(s) == step)
            assert total == pytest.approx(1.0)

    def test_random_state(self, capsys):
        """Test a seeded random start on the setting-2 walk."""
        assert main(["--json", "walk", "--setting", "2", "--seed", "3", "--steps", "2", "P5"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["distributions"]) == 3
        assert sum(doc["distributions"][2]) == pytest.approx(1.0)

    def test_bad_start(self, capsys):
        """Test a start arc outside the graph is a usage error."""
        assert main(["walk", "--start", "99", "C4"]) == 2

    def test_negative_steps(self, capsys):
        """Test a negative step count is a usage error."""
        assert main(["walk", "--steps", "-1", "C4"]) == 2
        assert "--steps" in capsys.readouterr().err

    def test_support_not_a_walk(self, capsys):
        """Test the support matrix is refused for simulation."""
        assert main(["walk", "--construction", "support", "K4"]) == 1


class TestQGraph:
    """Test the qgraph command."""

    def test_spectrum(self, capsys):
        """Test the quantum-graph spectrum has |A| values."""
        assert main(["qgraph", "--k", "2", "--L", "1", "--alpha", "1", "petersen"]) == 0
        assert parse_spectrum_csv(capsys.readouterr().out).dimension == 30

    def test_json_scaling(self, capsys):
        """Test the JSON document records kappa / sqrt(kappa^2 + q^2)."""
        assert main(["--json", "qgraph", "--k", "2", "--alpha", "1", "petersen"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["random_walk_scaling"] == pytest.approx(3 / 9.25 ** 0.5)

    def test_scan(self, capsys):
        """Test the scan reports the root k = pi / 2 on C4."""
        assert main(["qgraph", "--L", "1", "--scan", "0.5:2:100", "C4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "k_root,multiplicity,source"
        roots = [float(line.split(",")[0]) for line in lines[1:] if line.endswith("scan")]
        assert any(abs(k - 1.5707963267948966) < 1e-6 for k in roots)

    def test_bad_scan(self, capsys):
        """Test malformed scan ranges are usage errors."""
        assert main(["qgraph", "--scan", "1:2", "C4"]) == 2

    def test_missing_k(self, capsys):
        """Test qgraph needs --k or --scan."""
        assert main(["qgraph", "C4"]) == 2

    def test_non_regular(self, capsys):
        """Test non-regular graphs exit with 1."""
        assert main(["qgraph", "--k", "1", "P5"]) == 1


class TestSupport:
    """Test the support command."""

    def test_poles_and_svg(self, tmp_path, capsys):
        """Test pole CSV and SVG files for Petersen."""
        csv_path = tmp_path / "poles.csv"
        svg_path = tmp_path / "poles.svg"
        assert main(["support", "--j", "3", "--poles", "--csv", str(csv_path),
                     "--svg", str(svg_path), "petersen"]) == 0
        lines = csv_path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "re,im,multiplicity"
        assert sum(int(line.split(",")[2]) for line in lines[1:]) == 26
        assert "<svg" in svg_path.read_text(encoding="utf-8")

    def test_verify_identity(self, capsys):
        """Test the cube identity on Petersen."""
        assert main(["support", "--verify-identity", "petersen"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("cube_identity=holds")
        assert "intertwining_residual" in out

    def test_verify_identity_negative_control(self, capsys):
        """Test K4 reports a failing identity that its hypotheses predict."""
        assert main(["support", "--verify-identity", "K4"]) == 0
        assert "cube_identity=fails" in capsys.readouterr().out

    def test_identity_with_poles_needs_csv(self, capsys):
        """Test the verdict and the pole table cannot share stdout."""
        assert main(["support", "--verify-identity", "--poles", "petersen"]) == 2

    def test_json_keeps_csv_file(self, tmp_path, capsys):
        """Test --json still writes the pole table to --csv."""
        csv_path = tmp_path / "poles.csv"
        assert main(["--json", "support", "--poles", "--csv", str(csv_path), "K4"]) == 0
        doc = json.loads(capsys.readouterr().out)
        lines = csv_path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "re,im,multiplicity"
        assert len(lines) - 1 == len(doc["poles"])

    def test_girth_too_small(self, capsys):
        """Test j = 3 on K4 exits with 1."""
        assert main(["support", "--j", "3", "K4"]) == 1


class TestVerify:
    """Test the verify command."""

    def test_corpus_directory(self, tmp_path, capsys):
        """Test a corpus directory run writes a CSV and passes."""
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        _write_graph(corpus / "c5.txt", "C5")
        _write_graph(corpus / "star.txt", "K1,3")
        report = tmp_path / "report.csv"
        assert main(["verify", "--corpus", str(corpus), "--which", "spectral-map",
                     "--csv", str(report)]) == 0
        rows = report.read_text(encoding="utf-8").splitlines()
        assert rows[0] == "graph,check,verdict,max_error,tol,note"
        assert {row.split(",")[0] for row in rows[1:]} == {"c5.txt", "star.txt"}
        assert "0 failed" in capsys.readouterr().out

    def test_needs_source(self, capsys):
        """Test verify needs --builtin or --corpus."""
        assert main(["verify"]) == 2

    def test_bad_tolerance(self, capsys):
        """Test non-positive tolerances are rejected."""
        assert main(["verify", "--builtin", "--tol", "-1"]) == 2


class TestGlobal:
    """Test global flags."""

    def test_version(self, capsys):
        """Test --version exits cleanly."""
        assert main(["--version"]) == 0
        assert "Quantum Walk Spectra" in capsys.readouterr().out

    def test_unknown_command(self, capsys):
        """Test argparse errors map to exit code 2."""
        assert main(["frobnicate"]) == 2

    def test_usage_names_program(self, capsys):
        """Test usage text is headed by the package code."""
        assert main(["--help"]) == 0
        assert capsys.readouterr().out.startswith("usage: qws ")


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
