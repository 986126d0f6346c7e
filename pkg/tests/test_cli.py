import csv
import io
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from compoundkit import io as kio
from compoundkit.cli import main
from compoundkit.compound import add_compound, mult_compound
from compoundkit.spectral import alpha_add_compound, alpha_mult_compound

EX_2POS = [[2, 1, -0.5], [0, -1, 0.5], [-1, 0, 5]]


@pytest.fixture
def matfile(tmp_path):
    def make(M, name="m.json"):
        p = tmp_path / name
        kio.write_matrix(np.asarray(M, dtype=float), p)
        return str(p)
    return make


def run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def complex_entries(entries):
    if isinstance(entries, dict):
        return np.array(entries["real"]) + 1j * np.array(entries["imag"])
    return np.array(entries)


class TestCompound:
    def test_additive_example(self, capsys, matfile):
        code, rep = run_json(capsys, ["compound", matfile(EX_2POS), "--k", "2", "--additive"])
        assert code == 0
        assert rep["entries"] == [[1.0, 0.5, 0.5], [0.0, 7.0, 1.0], [1.0, 0.0, 4.0]]
        assert rep["row_index"] == ["(1,2)", "(1,3)", "(2,3)"]

    def test_text_table(self, capsys, matfile):
        assert main(["compound", matfile(EX_2POS), "--k", "2", "--additive"]) == 0
        out = capsys.readouterr().out
        assert "(1,3)" in out and "7" in out

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_identity(self, capsys, matfile, k):
        code, rep = run_json(capsys, ["compound", matfile(np.eye(3)), "--k", str(k)])
        assert code == 0
        assert_allclose(rep["entries"], np.eye(len(rep["row_index"])))

    def test_multiplicative(self, capsys, matfile, rng):
        A = rng.standard_normal((4, 4))
        code, rep = run_json(capsys, ["compound", matfile(A), "--k", "2", "--multiplicative"])
        assert_allclose(rep["entries"], mult_compound(A, 2), rtol=1e-15)

    def test_alpha_round_trip(self, capsys, matfile, rng):
        A = rng.standard_normal((3, 3)) + 3 * np.eye(3)
        code, rep = run_json(capsys, ["compound", matfile(A), "--alpha", "2.2", "--additive"])
        assert code == 0
        assert_allclose(complex_entries(rep["entries"]), alpha_add_compound(A, 2.2), atol=1e-15)
        code, rep = run_json(capsys, ["compound", matfile(A), "--alpha", "2.2"])
        assert code == 0
        assert_allclose(complex_entries(rep["entries"]), alpha_mult_compound(A, 2.2), atol=1e-12)

    def test_alpha_complex_csv(self, capsys, matfile):
        # complex eigenvalues force the complex code path
        A = np.array([[0.0, 2.0, 0.0], [-2.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        assert main(["compound", matfile(A), "--alpha", "1.5", "--format", "csv"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        vals = np.array([[complex(v) for v in r[1:]] for r in rows[1:]])
        assert_allclose(vals, alpha_mult_compound(A, 1.5), atol=1e-12)
        assert all("j" in v for v in rows[1][1:])

    def test_csv(self, capsys, matfile, rng):
        A = rng.standard_normal((3, 3))
        assert main(["compound", matfile(A), "--k", "2", "--additive", "--format", "csv"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert len(rows) == 4 and rows[0][1:] == ["(1,2)", "(1,3)", "(2,3)"]
        vals = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
        assert np.array_equal(vals, add_compound(A, 2))


class TestOtherCommands:
    def test_classify(self, capsys, matfile):
        code, rep = run_json(capsys, ["classify", matfile([[1, 2], [3, 4]])])
        assert rep["summary"]["sign_regularity"]["per_order"] == {"1": "SSR(+1)", "2": "SSR(-1)"}

    def test_classify_fuzz(self, capsys, matfile):
        code, rep = run_json(capsys, ["classify", matfile([[2, 1], [1, 3]]), "--svdp-fuzz", "500"])
        names = {v["name"]: v["passed"] for v in rep["verdicts"]}
        assert any("svdp" in n and ok for n, ok in names.items())

    def test_contract_alpha(self, capsys):
        code, rep = run_json(capsys, ["contract", "thomas", "--alpha", "2.5", "--norm", "L1",
                                      "--eta", "0.01", "--param", "b=0.1"])
        assert code == 1
        code, rep = run_json(capsys, ["contract", "thomas", "--alpha", "2.8", "--norm", "L1",
                                      "--eta", "0.01", "--param", "b=0.1"])
        assert code == 0

    def test_contract_squares(self, capsys):
        code, rep = run_json(capsys, ["contract", "squares_ltv", "--k", "2", "--eta", "1",
                                      "--norm", "L1"])
        assert code == 0

    def test_simulate_area(self, capsys):
        code, rep = run_json(capsys, ["simulate", "squares_ltv", "--frame", "unit-square",
                                      "--volume", "--tspan", "0,3", "--every", "100"])
        assert code == 0
        rows = np.array(rep["series"]["rows"])
        assert_allclose(rows[:, 1], np.exp(-rows[:, 0]), atol=1e-5)

    def test_simulate_system_file(self, capsys, tmp_path):
        spec = tmp_path / "sys.json"
        spec.write_text(json.dumps({"tag": "LTI", "A": [[-1, 0], [0, -2]]}))
        code, rep = run_json(capsys, ["simulate", str(spec), "--x0", "1,1", "--tspan", "0,1"])
        assert code == 0
        last = rep["series"]["rows"][-1]
        assert_allclose(last[1:], [np.exp(-1), np.exp(-2)], atol=1e-8)

    def test_diagstab(self, capsys, matfile):
        code, rep = run_json(capsys, ["diagstab", matfile([[0.2, 0.3], [0.1, 0.4]]), "--k", "1",
                                      "--certificate", "[0.7777777777777778, 1.2222222222222223]"])
        assert code == 0

    def test_diagstab_fail(self, capsys, matfile):
        code, _ = run_json(capsys, ["diagstab", matfile(2 * np.eye(2)), "--k", "1",
                                    "--certificate", "1,1"])
        assert code == 1

    def test_hankel(self, capsys, tmp_path):
        lag = tmp_path / "lag.json"
        lag.write_text(json.dumps({"A": [[0.5]], "b": [1], "c": [2]}))
        code, rep = run_json(capsys, ["hankel", str(lag), "--k", "1"])
        assert code == 0
        assert rep["verdicts"][0]["witness"]["tail_bound"] < 1e-9
        bad = tmp_path / "alt.json"
        bad.write_text(json.dumps({"A": [[-0.5]], "b": [1], "c": [1]}))
        code, _ = run_json(capsys, ["hankel", str(bad), "--k", "1"])
        assert code == 1

    def test_hankel_csv(self, capsys, tmp_path):
        ir = tmp_path / "ir.csv"
        ir.write_text("\n".join(str(0.5 ** j) for j in range(60)))
        code, _ = run_json(capsys, ["hankel", str(ir), "--k", "2"])
        assert code == 0


class TestErrors:
    def test_missing_file(self, capsys):
        assert main(["compound", "/nonexistent.json", "--k", "1"]) == 2

    def test_bad_matrix(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"rows": 2, "cols": 2, "data": [[1, 2]]}')
        assert main(["compound", str(p), "--k", "1"]) == 2

    def test_bad_k(self, capsys, matfile):
        assert main(["compound", matfile(np.eye(2)), "--k", "3"]) == 2

    def test_unknown_system(self, capsys):
        assert main(["contract", "lorenz", "--k", "2"]) == 2

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["contract", "thomas"])
        assert exc.value.code == 2


class TestDeterminism:
    def test_byte_identical(self, capsys, matfile):
        path = matfile([[2, 1], [1, 3]])
        outs = []
        for _ in range(2):
            main(["classify", path, "--svdp-fuzz", "300", "--format", "json", "--seed", "7"])
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]

    def test_out_file(self, tmp_path, matfile):
        out = tmp_path / "r.json"
        assert main(["compound", matfile(np.eye(2)), "--k", "1", "--format", "json",
                     "--out", str(out)]) == 0
        assert json.loads(out.read_text())["entries"] == [[1.0, 0.0], [0.0, 1.0]]


class TestRoundTrip:
    def test_json(self, tmp_path, rng):
        M = rng.standard_normal((4, 3)) * 10.0 ** rng.integers(-12, 12, (4, 3))
        p = tmp_path / "m.json"
        kio.write_matrix(M, p)
        assert np.array_equal(kio.read_matrix(p), M)

    def test_csv(self, rng):
        M = rng.standard_normal((3, 5)) * 10.0 ** rng.integers(-12, 12, (3, 5))
        assert np.array_equal(kio.parse_matrix(kio.matrix_to_csv(M)), M)

    def test_vector_forms(self, tmp_path):
        assert_allclose(kio.read_vector("1, 2 3"), [1, 2, 3])
        p = tmp_path / "d.json"
        p.write_text('{"d": [0.5, 2]}')
        assert_allclose(kio.read_vector(str(p)), [0.5, 2])
