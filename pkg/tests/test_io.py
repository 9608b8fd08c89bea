from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from codiff.cli import main
from codiff.deform import is_deformation
from codiff.io import (NotCodifferentialError, ParseError, check_codifferential, format_rational,
                       parse_deformation, parse_input, parse_rational, run, serialize, verify)

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
CORPUS_FILES = sorted(CORPUS.glob("*.alg"))

TWO_DIM = """\
kind lie
basis e1 even
basis e2 even
part 2: e1 e2 -> 1 e2
"""

NON_JACOBI = """\
kind lie
basis a even
basis b even
basis c even
part 2: a b -> 1 a
part 2: b c -> 1 b
part 2: a c -> 1 c
"""


def test_two_dim_lie_input():
    inp = parse_input(TWO_DIM)
    assert inp.kind == "lie" and inp.names == ("e1", "e2")
    assert inp.parts[0].inputs == ("e1", "e2") and inp.parts[0].output == (("e2", Fraction(1)),)
    assert (inp.weight_cap, inp.order, inp.strict) == (3, 3, False)
    check_codifferential(inp)


def test_assoc_input():
    inp = parse_input("kind assoc\nbasis e1 even\nbasis e2 even\npart 2: e1 e1 -> 1 e1\npart 2: e1 e2 -> 1 e2\n")
    assert inp.coalgebra == "tensor"
    check_codifferential(inp)


@pytest.mark.parametrize("text,line,fragment", [
    ("kind lie\nbasis a even\npart 2: a a -> 1/0 a\n", 3, "zero denominator"),
    ("kind lie\nbasis a even\npart 2: a a -> x/2 a\n", 3, "malformed coefficient"),
    ("kind lie\nbasis a even\npart 3: a a a -> 1 a\n", 3, "arity 2 only"),
    ("kind lie\nbasis a even\nbasis b odd\npart 2: a a -> 1 b\n", 4, "parity mismatch"),
    ("kind lie\nbasis a even\nbasis a odd\n", 3, "declared twice"),
    ("kind foo\n", 1, "unknown kind"),
    ("kind lie\nbasis a even\nfrobnicate\n", 3, "unknown directive"),
    ("kind lie\nbasis a even\npart 2: a -> 1 a\n", 3, "2 but 1 inputs"),
    ("kind linf\nbasis a even\nweight_cap 2\npart 3: a a a -> 1 a\n", 4, "exceeds weight_cap"),
    ("kind lie\nbasis a even\nstrict maybe\n", 3, "yes or no"),
])
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_input(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_graded_symmetry_violations_are_rejected():
    with pytest.raises(ParseError, match="graded symmetry"):
        parse_input("kind lie\nbasis a even\nbasis b even\npart 2: a a -> 1 b\n")
    with pytest.raises(ParseError, match="inconsistent"):
        parse_input("kind lie\nbasis a even\nbasis b even\npart 2: a b -> 1 b\npart 2: b a -> 1 b\n")
    # consistent antisymmetric pair is fine
    parse_input("kind lie\nbasis a even\nbasis b even\npart 2: a b -> 1 b\npart 2: b a -> -1 b\n")


def test_combination_syntax():
    inp = parse_input("kind lie\nbasis a even\nbasis b even\npart 2: a b -> a + -1/2 b 2 a  # comment\n")
    assert inp.parts[0].output == (("a", Fraction(3)), ("b", Fraction(-1, 2)))
    assert parse_input("kind lie\nbasis a b even\npart 2: a b -> 0\n").parts[0].output == ()


@given(st.fractions(max_denominator=50))
def test_rational_round_trip(x):
    assert parse_rational(format_rational(x)) == x


def test_rational_rendering():
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        parse_rational("1.5")


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.name)
def test_round_trip(path):
    inp = parse_input(path.read_text())
    assert parse_input(serialize(inp)) == inp
    assert serialize(parse_input(serialize(inp))) == serialize(inp)


def test_sl2_report_is_rigid():
    r = run(parse_input((CORPUS / "sl2.alg").read_text()))
    assert r.dims[(2, 1)][2] == 0
    assert r.generators == [] and r.relations == [] and r.base_basis == []


def test_abelian2_order_two():
    inp = parse_input((CORPUS / "abelian2.alg").read_text())
    inp.order = 2
    r = run(inp)
    assert len(r.generators) == 2 and r.relations == []


def test_non_jacobi_names_weight_three_defect():
    with pytest.raises(NotCodifferentialError) as info:
        run(parse_input(NON_JACOBI))
    assert info.value.weight == 3
    assert "weight-3" in str(info.value) and "Jacobi" in str(info.value)


def test_deformation_file_and_verify():
    inp = parse_input((CORPUS / "abelian3.alg").read_text())
    so3 = "generator s even\ndelta s: a b -> 1 c\ndelta s: b c -> 1 a\ndelta s: a c -> -1 b\n"
    target = parse_deformation(so3, inp)
    assert is_deformation(target)
    _, res = verify(inp, target)
    assert res.success
    with pytest.raises(ParseError, match="line 2"):
        parse_deformation("generator s even\ndelta q: a b -> 1 c\n", inp)


def run_cli(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_exit_codes(tmp_path, capsys):
    good = CORPUS / "nonabelian2.alg"
    bad = tmp_path / "bad.alg"
    bad.write_text(NON_JACOBI)
    broken = tmp_path / "broken.alg"
    broken.write_text("kind lie\nbasis a even\npart 2: a a -> 1/0 a\n")
    assert run_cli(["check", good], capsys)[0] == 0
    code, _, err = run_cli(["check", bad], capsys)
    assert code == 2 and "not a codifferential" in err and "weight-3" in err
    code, _, err = run_cli(["miniversal", broken], capsys)
    assert code == 1 and "line 3" in err
    assert run_cli(["nonsense"], capsys)[0] == 1
    assert run_cli(["miniversal", tmp_path / "missing.alg"], capsys)[0] == 1


def test_cli_reports(capsys):
    code, out, _ = run_cli(["cohomology", CORPUS / "heisenberg.alg", "--format", "machine"], capsys)
    assert code == 0 and "cohomology.weight2.odd = Z 8 B 3 H 5" in out
    code, out, _ = run_cli(["miniversal", CORPUS / "abelian2.alg", "--order", "2", "--no-strict"], capsys)
    assert code == 0 and "homotopy" in out
    code, out, _ = run_cli(["miniversal", CORPUS / "heisenberg.alg", "--weight-cap", "3"], capsys)
    assert code == 0 and "relations:" in out


def test_cli_verify(tmp_path, capsys):
    good = tmp_path / "so3.def"
    good.write_text("generator s even\ndelta s: a b -> 1 c\ndelta s: b c -> 1 a\ndelta s: a c -> -1 b\n")
    bad = tmp_path / "bad.def"
    bad.write_text("generator s even\ndelta s: a b -> 1 a\ndelta s: b c -> 1 b\ndelta s: a c -> 1 c\n")
    alg = CORPUS / "abelian3.alg"
    code, out, _ = run_cli(["verify", alg, good, "--format", "machine"], capsys)
    assert code == 0 and "result = factors" in out
    code, _, err = run_cli(["verify", alg, bad], capsys)
    assert code == 2 and "Maurer-Cartan" in err
