import json

import jsonschema
import pytest

from fgadyn import cli
from fgadyn.errors import InverseFailed, ParseError
from fgadyn.fixtures import BUILTINS, builtin
from fgadyn.io import (
    format_automorphism,
    is_graph_text,
    parse_automorphisms,
    parse_graph_maps,
    read_source,
)
from fgadyn.records import RECORD_SCHEMA
from fgadyn.strata import maximal_filtration

TRIB_TEXT = """# tribonacci substitution
label: tribonacci
rank: 3
images: ab ac a
inverse_images: c Ca Cb
"""

THETA_TEXT = """label: theta swap
rank: 2
vertices: u v
edges: a=u>v b=u>v c=u>v
tree: a
images: a=a b=c c=b
"""


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    records = [json.loads(line) for line in out.splitlines() if line.strip()]
    for r in records:
        jsonschema.validate(r, RECORD_SCHEMA)
    return code, records, out


def test_parse_roundtrip():
    phi = parse_automorphisms(TRIB_TEXT)[0]
    assert phi == builtin("tribonacci")[0]
    again = parse_automorphisms(format_automorphism(phi))[0]
    assert again == phi and again.label == "tribonacci"


def test_parse_without_inverse_and_multiple_blocks():
    autos = parse_automorphisms("rank: 2\nimages: a ba\n---\nrank: 2\nimages: b a\n")
    assert len(autos) == 2 and str(autos[0].inverse_images[1]) == "bA"


def test_parse_errors_carry_line():
    with pytest.raises(ParseError) as info:
        parse_automorphisms("rank: 3\nimages: ab ac\n")
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_automorphisms("rank: 3\nbogus: 1\n")
    with pytest.raises(ParseError):
        parse_automorphisms("# only a comment\n")
    with pytest.raises(InverseFailed):
        parse_automorphisms("rank: 2\nimages: ab b\ninverse_images: ab b\n")


def test_token_syntax_rank_30():
    imgs = ", ".join(f"x{i}" for i in range(2, 31)) + ", x1"
    phi = parse_automorphisms(f"rank: 30\nimages: {imgs}\n")[0]
    assert parse_automorphisms(format_automorphism(phi))[0] == phi


def test_graph_text():
    assert is_graph_text(THETA_TEXT) and not is_graph_text(TRIB_TEXT)
    f = parse_graph_maps(THETA_TEXT)[0]
    assert f.label == "theta swap"
    assert [s.label() for s in maximal_filtration(f)] == ["NEG-fixed", "NEG-permutation"]


def test_builtins_readable():
    for name in BUILTINS:
        text, digest = read_source(f"builtin:{name}")
        assert len(digest) == 64
        assert parse_automorphisms(text) == builtin(name)


def test_cli_check(capsys):
    code, recs, _ = run_cli(capsys, "check", "builtin:tribonacci")
    assert code == 0
    assert recs[0]["kind"] == "manifest"
    assert recs[1]["valid"] and recs[1]["in_ia_mod3"] is False
    code, recs, _ = run_cli(capsys, "check", "builtin:tribonacci", "--rank", "4")
    assert code == 1 and recs[1]["valid"] is False


def test_cli_check_bad_inverse(tmp_path, capsys):
    p = tmp_path / "bad.aut"
    p.write_text("rank: 2\nimages: ab b\ninverse_images: ab b\n")
    code, recs, _ = run_cli(capsys, "check", str(p))
    assert code == 1 and recs[-1]["kind"] == "check_error"


def test_cli_parse_error_and_missing_file(tmp_path, capsys):
    p = tmp_path / "broken.aut"
    p.write_text("rank: x\nimages: a\n")
    code, recs, _ = run_cli(capsys, "scan", str(p))
    assert code == 2 and recs[-1]["error"] == "ParseError"
    code = cli.main(["scan", str(tmp_path / "missing.aut")])
    capsys.readouterr()
    assert code == 2


def test_cli_strata_graph_file(tmp_path, capsys):
    p = tmp_path / "theta.map"
    p.write_text(THETA_TEXT)
    code, recs, _ = run_cli(capsys, "strata", str(p))
    assert code == 0 and recs[1]["kind"] == "filtration"
    code, recs, _ = run_cli(capsys, "strata", "builtin:tribonacci_x_id")
    labels = [s["label"] for s in recs[1]["strata"]]
    assert labels == ["EG", "NEG-fixed"] and recs[1]["extensions"] == ["handle"]


def test_cli_orbit_and_scan(capsys):
    code, recs, _ = run_cli(capsys, "orbit", "builtin:tribonacci", "--class", "a", "--iters", "5")
    assert code == 0 and [s["length"] for s in recs[1]["steps"]] == [1, 2, 4, 7, 13, 24]
    code, recs, _ = run_cli(capsys, "scan", "builtin:fix_a", "--max-seed-len", "3", "--iters", "4")
    v = recs[1]["verdict"]
    assert v["tag"] == "PeriodicClassFound" and v["periodic_class"]["literal"] == "a"


def test_cli_gns_error_record(capsys):
    code, recs, _ = run_cli(capsys, "gns", "builtin:tribonacci", "--iters", "3")
    assert code == 3 and recs[-1]["error"] == "MarkedClassNotFixed"


def test_cli_budget(monkeypatch, capsys):
    monkeypatch.setenv("FGADYN_BUDGET", "20")
    code, recs, _ = run_cli(capsys, "scan", "builtin:tribonacci", "--max-seed-len", "3")
    assert code == 3 and recs[-1]["error"] == "BudgetExceeded"
    assert recs[-1]["partial"]["classes_checked"] >= 1


def test_cli_pingpong_and_subgroup(capsys):
    code, recs, _ = run_cli(capsys, "pingpong", "builtin:pingpong_pair", "-m", "1", "-n", "1")
    assert code == 0 and recs[1]["kind"] == "automorphism"
    code, recs, _ = run_cli(capsys, "pingpong", "builtin:tribonacci")
    assert code == 2
    code, recs, _ = run_cli(capsys, "subgroup", "builtin:fix_a", "--max-seed-len", "3")
    assert recs[1]["tag"] == "FiniteOrbitFound"


def test_cli_power_flag(capsys):
    code, recs, _ = run_cli(capsys, "orbit", "builtin:tribonacci", "--class", "a",
                            "--iters", "2", "--power", "2")
    assert [s["length"] for s in recs[1]["steps"]] == [1, 4, 13]


def test_manifest_ids_stable(capsys):
    _, a, _ = run_cli(capsys, "check", "builtin:tribonacci", "--seed", "3")
    _, b, _ = run_cli(capsys, "check", "builtin:tribonacci", "--seed", "3")
    _, c, _ = run_cli(capsys, "check", "builtin:tribonacci", "--seed", "4")
    assert a[0]["manifest_id"] == b[0]["manifest_id"] != c[0]["manifest_id"]
    assert all(r["manifest_id"] == a[0]["manifest_id"] for r in a)


def test_cli_budget_flag(capsys):
    code, recs, _ = run_cli(capsys, "scan", "builtin:tribonacci", "--max-seed-len", "3",
                            "--budget", "20")
    assert code == 3 and recs[-1]["error"] == "BudgetExceeded"


def test_cli_ns_scan_flags(capsys):
    code, recs, _ = run_cli(capsys, "ns", "builtin:fix_a", "--iters", "3", "--scan-max-len", "2",
                            "--scan-iters", "2")
    assert code == 3 and recs[-1]["error"] == "NotEmpiricallyAtoroidal"
    assert recs[0]["config"]["scan_max_len"] == 2
