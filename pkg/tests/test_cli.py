import json

import numpy as np
import pytest

from trilattice.basis import build_basis, tri_to_cart
from trilattice.cli import main, solve_file
from trilattice.cvp import lin_cv
from trilattice.vecio import VectorFileError, format_vector, parse_vectors, read_vectors


@pytest.fixture
def vecfile(tmp_path):
    def make(text, name="in.txt"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p
    return make


def test_parse_skips_comments_and_blanks():
    arr = parse_vectors(["# header\n", "\n", "1,2.5\n", "  \n", "-3e-1,4\n"])
    assert arr.tolist() == [[1.0, 2.5], [-0.3, 4.0]]


def test_parse_reports_line_numbers():
    with pytest.raises(VectorFileError, match="line 3"):
        parse_vectors(["1,2", "# c", "1,,2"])
    with pytest.raises(VectorFileError, match="line 2"):
        parse_vectors(["1,2", "1,2,3"])
    with pytest.raises(VectorFileError, match="line 1"):
        parse_vectors(["nan,1"])


def test_float_format_roundtrips():
    v = np.random.default_rng(0).uniform(-100, 100, 50)
    assert np.array_equal(parse_vectors([format_vector(v)])[0], v)


def test_solve_empty_input(vecfile, tmp_path):
    out = tmp_path / "out.txt"
    assert solve_file(vecfile("# nothing\n\n"), out) == 0
    assert out.read_text() == ""


def test_solve_lattice_point(vecfile, tmp_path):
    b = build_basis(4)
    y = tri_to_cart(b, [2, -1, 0, 3])
    out = tmp_path / "out.txt"
    assert solve_file(vecfile(format_vector(y) + "\n"), out) == 1
    np.testing.assert_allclose(read_vectors(out)[0], y, rtol=0, atol=1e-9)


@pytest.mark.parametrize("algo", ["cv", "qlin", "lin"])
def test_solve_matches_library(vecfile, tmp_path, algo):
    b = build_basis(8)
    targets = np.random.default_rng(8).uniform(-100, 100, (100, 8))
    src = vecfile("".join(format_vector(t) + "\n" for t in targets))
    out = tmp_path / "out.txt"
    assert solve_file(src, out, algo) == 100
    got = read_vectors(out)
    expected = np.array([lin_cv(b, t).point for t in targets])
    if algo == "lin":
        assert np.array_equal(got, expected)
    else:
        np.testing.assert_allclose(got, expected, rtol=0, atol=1e-9)


def test_solve_json(vecfile, tmp_path):
    out = tmp_path / "out.json"
    assert solve_file(vecfile("0.9,0.1\n0,0\n"), out, "qlin", "json") == 2
    data = json.loads(out.read_text())
    assert data[0]["coeffs"] == [1, 0] and data[0]["k"] == 1
    assert data[1] == {"point": [0.0, 0.0], "coeffs": [0, 0], "k": 0}


def test_cli_exit_codes(vecfile, tmp_path, capsys):
    bad = vecfile("1,2\n1,2,3\n", "bad.txt")
    assert main(["solve", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["solve", str(tmp_path / "missing.txt")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--algo", "bogus"])
    assert exc.value.code == 2


def test_cli_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["gen", "--n", "6", "--count", "20", "--seed", "77", "--out", str(a)]) == 0
    assert main(["gen", "--n", "6", "--trials", "20", "--seed", "77", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    arr = read_vectors(a)
    assert arr.shape == (20, 6) and np.abs(arr).max() <= 100


def test_cli_gen_bad_range(capsys):
    assert main(["gen", "--n", "3", "--lo", "5", "--hi", "1"]) == 2


def test_cli_solve_roundtrip(tmp_path):
    src, out = tmp_path / "t.txt", tmp_path / "s.txt"
    main(["gen", "--n", "5", "--count", "10", "--out", str(src)])
    assert main(["solve", str(src), "--algo", "cv", "--out", str(out)]) == 0
    assert read_vectors(out).shape == (10, 5)


def test_cli_bench_csv_and_json(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--n", "8,16", "--algo", "lin", "--trials", "20",
                 "--warmup", "0", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("schema,algorithm,n,")
    assert [ln.split(",")[2] for ln in lines[1:]] == ["8", "16"]
    jout = tmp_path / "bench.json"
    assert main(["bench", "--n", "4", "--trials", "5", "--format", "json", "--out", str(jout)]) == 0
    assert [r["algorithm"] for r in json.loads(jout.read_text())] == ["cv", "qlin", "lin"]


def test_cli_verify_small(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--n", "8", "--trials", "30", "--format", "json", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["ok"] and report["schema"] == 1
    assert {p["property"] for p in report["properties"]} >= {"oracle_exact", "triple_agreement", "popcount"}
