from __future__ import annotations

import json

import pytest

from uniconstruct.cli import main
from uniconstruct.groups import GroupHom, cyclic, group_to_json, hom_to_json
from uniconstruct.structures import dumps, structure_from_json

from .conftest import directed_cycle, two_sorted


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def cycle3_path(tmp_path):
    return write(tmp_path, "cyc3.json", dumps(directed_cycle(3)))


@pytest.fixture
def c4toc2_path(tmp_path):
    hom = GroupHom(cyclic(4), cyclic(2), [0, 1, 0, 1])
    return write(tmp_path, "c4toc2.json", json.dumps(hom_to_json(hom)))


class TestAutCommand:
    def test_reports_three_automorphisms(self, cycle3_path, capsys):
        assert main(["aut", "--structure", cycle3_path]) == 0
        out = capsys.readouterr().out
        assert "3 automorphisms" in out

    def test_json_output_round_trips(self, cycle3_path, tmp_path):
        out_path = tmp_path / "report.json"
        assert main([
            "aut", "--structure", cycle3_path, "--format", "json", "--out", str(out_path)
        ]) == 0
        doc = json.loads(out_path.read_text())
        assert doc["count"] == 3
        assert doc["automorphisms"][0] == [[0, 1, 2]]

    def test_missing_file_is_input_error(self, tmp_path, capsys):
        assert main(["aut", "--structure", str(tmp_path / "nope.json")]) == 1
        assert "nope.json" in capsys.readouterr().err

    def test_invalid_structure_is_input_error(self, tmp_path, capsys):
        path = write(
            tmp_path,
            "bad.json",
            json.dumps(
                {
                    "sorts": [{"name": "p", "size": 2}],
                    "relations": [
                        {"name": "R", "signature": ["p"], "tuples": [[7]]}
                    ],
                    "functions": [],
                    "constants": [],
                }
            ),
        )
        assert main(["aut", "--structure", path]) == 1
        assert "out of range" in capsys.readouterr().err


class TestIsoCommand:
    def test_identical_structures(self, cycle3_path, capsys):
        assert main(["iso", "--left", cycle3_path, "--right", cycle3_path]) == 0
        assert "3 isomorphisms" in capsys.readouterr().out


class TestSplitCommands:
    def test_c4_to_c2_reports_neither(self, c4toc2_path, capsys):
        assert main(["split", "--hom", c4toc2_path]) == 0
        out = capsys.readouterr().out
        assert "splitting: no" in out and "weak splitting: no" in out

    def test_weak_split_backtracking(self, c4toc2_path, tmp_path):
        out_path = tmp_path / "r.json"
        assert main([
            "weak-split", "--hom", c4toc2_path, "--format", "json", "--out", str(out_path)
        ]) == 0
        doc = json.loads(out_path.read_text())
        assert doc["mode"] == "backtracking"
        assert doc["has_weak_splitting"] is False


class TestUcpCommands:
    def test_ucp_check_passes(self, tmp_path):
        b = two_sorted((2, 1), [("R", (0, 1), [(0, 0), (1, 0)])])
        path = write(tmp_path, "b.json", dumps(b))
        assert main(["ucp-check", "--structure", path]) == 0

    def test_ucp_check_clause_failure_exit_2(self, tmp_path):
        b = two_sorted((2, 1), [("R", (0, 1), [(0, 0)])])
        path = write(tmp_path, "b.json", dumps(b))
        assert main(["ucp-check", "--structure", path]) == 2

    def test_derive_triple(self, tmp_path):
        from uniconstruct.encode import GroupTriple, encode_three_sorted

        c2 = cyclic(2)
        ident = GroupHom(c2, c2, [0, 1])
        s = encode_three_sorted(GroupTriple(c2, c2, c2, ident, ident))
        path = write(tmp_path, "c.json", dumps(s))
        assert main(["derive-triple", "--structure", path]) == 0


class TestSkewCommands:
    def test_mul_inline(self, capsys):
        assert main([
            "skew", "--base", "c2", "--op", "mul",
            "--lhs", '{"shift": 2, "support": [[0, 1]]}',
            "--rhs", '{"shift": -2, "support": [[1, 1]]}',
        ]) == 0

    def test_mul_json_result(self, tmp_path):
        out_path = tmp_path / "r.json"
        assert main([
            "skew", "--base", "c2", "--op", "mul",
            "--lhs", '{"shift": 2, "support": [[0, 1]]}',
            "--rhs", '{"shift": -2, "support": [[1, 1]]}',
            "--format", "json", "--out", str(out_path),
        ]) == 0
        doc = json.loads(out_path.read_text())
        assert doc["result"] == {"shift": 0, "support": [[-2, 1], [1, 1]]}

    def test_witness_verified(self):
        assert main([
            "skew", "--base", "s3", "--op", "witness",
            "--element", '{"shift": 1, "support": []}',
        ]) == 0

    def test_pow_and_projections(self, tmp_path):
        out_path = tmp_path / "r.json"
        assert main([
            "skew", "--base", "c3", "--op", "pow",
            "--element", '{"shift": 1, "support": [[0, 1]]}', "--exp", "3",
            "--format", "json", "--out", str(out_path),
        ]) == 0
        doc = json.loads(out_path.read_text())
        assert doc["result"]["shift"] == 3
        assert main([
            "skew", "--base", "c3", "--op", "phi23",
            "--element", '{"shift": 5, "support": [[2, 2]]}',
        ]) == 0
        assert main(["skew", "--base", "c3", "--op", "psi0", "--exp", "2"]) == 0

    def test_laws_exit_zero(self, tmp_path):
        out_path = tmp_path / "laws.json"
        assert main([
            "skew", "--base", "s3", "--op", "laws", "--samples", "200",
            "--seed", "3", "--format", "json", "--out", str(out_path),
        ]) == 0
        doc = json.loads(out_path.read_text())
        assert doc["seed"] == 3 and doc["associativity"] is True
        assert doc["hom_violations_found"] > 0

    def test_cyclic_skew_identifies_catalog_match(self, tmp_path):
        out_path = tmp_path / "cs.json"
        assert main([
            "cyclic-skew", "--k", "2", "--base", "c2",
            "--format", "json", "--out", str(out_path),
        ]) == 0
        doc = json.loads(out_path.read_text())
        assert doc["order"] == 8 and doc["catalog_match"] == "D4"


class TestEncodeAttach:
    def test_encode3(self, tmp_path):
        c2 = cyclic(2)
        doc = {
            "g1": group_to_json(c2),
            "g2": group_to_json(c2),
            "g3": group_to_json(cyclic(4)),
            "phi12": [0, 1],
            "phi23": [0, 1, 0, 1],
        }
        path = write(tmp_path, "triple.json", json.dumps(doc))
        out_path = tmp_path / "enc.json"
        assert main([
            "encode3", "--triple", path, "--format", "json", "--out", str(out_path)
        ]) == 0
        report = json.loads(out_path.read_text())
        assert report["ok"] is True
        s = structure_from_json(report["structure"])
        assert s.sort_sizes == (2, 2, 4)

    def test_attach(self, tmp_path):
        b = two_sorted((2, 1), [("R", (0, 1), [(0, 0), (1, 0)])])
        b_path = write(tmp_path, "b.json", dumps(b))
        g3_path = write(tmp_path, "g3.json", json.dumps(group_to_json(cyclic(2))))
        phi_path = write(tmp_path, "phi.json", json.dumps({"map": [0, 1]}))
        out_path = tmp_path / "att.json"
        assert main([
            "attach", "--structure", b_path, "--g3", g3_path,
            "--phi23", phi_path, "--format", "json", "--out", str(out_path),
        ]) == 0
        doc = json.loads(out_path.read_text())
        assert doc["c23_has_splitting"] is True

    def test_attach_with_explicit_phi13(self, tmp_path):
        b = two_sorted((2, 1), [("R", (0, 1), [(0, 0), (1, 0)])])
        b_path = write(tmp_path, "b.json", dumps(b))
        g3_path = write(tmp_path, "g3.json", json.dumps(group_to_json(cyclic(2))))
        phi23_path = write(tmp_path, "phi23.json", json.dumps({"map": [0, 1]}))
        phi13_path = write(tmp_path, "phi13.json", json.dumps({"map": [0, 1]}))
        assert main([
            "attach", "--structure", b_path, "--g3", g3_path,
            "--phi23", phi23_path, "--phi13", phi13_path,
        ]) == 0


class TestUniformize:
    def test_uniformize_emits_structure(self, tmp_path):
        b = two_sorted((2, 1), [("R", (0, 1), [(0, 0), (1, 0)])])
        b_path = write(tmp_path, "b.json", dumps(b))
        a_doc = {
            "sorts": [{"name": "p", "size": 2}],
            "relations": [],
            "functions": [],
            "constants": [],
        }
        a_path = write(tmp_path, "a.json", json.dumps(a_doc))
        out_path = tmp_path / "f.json"
        code = main([
            "uniformize", "--structure", b_path, "--target", a_path,
            "--copies", "2", "--format", "json", "--out", str(out_path),
        ])
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["claims_all_pass"] is True
        f = structure_from_json(doc["structure"])
        assert f.sort_sizes == (2, 1)

    def test_verify_standalone(self, tmp_path):
        b = two_sorted((2, 1), [("R", (0, 1), [(0, 0), (1, 0)])])
        b_path = write(tmp_path, "b.json", dumps(b))
        a_path = write(
            tmp_path,
            "a.json",
            json.dumps(
                {
                    "sorts": [{"name": "p", "size": 2}],
                    "relations": [],
                    "functions": [],
                    "constants": [],
                }
            ),
        )
        assert main([
            "verify", "--structure", b_path, "--target", a_path, "--copies", "2"
        ]) == 0

    def test_full_mode_agrees_with_representative(self, tmp_path):
        b = two_sorted((2, 1), [("R", (0, 1), [(0, 0), (1, 0)])])
        b_path = write(tmp_path, "b.json", dumps(b))
        a_path = write(
            tmp_path,
            "a.json",
            json.dumps(
                {
                    "sorts": [{"name": "p", "size": 2}],
                    "relations": [],
                    "functions": [],
                    "constants": [],
                }
            ),
        )
        docs = []
        for mode in ("representative", "full"):
            out_path = tmp_path / f"{mode}.json"
            assert main([
                "uniformize", "--structure", b_path, "--target", a_path,
                "--copies", "2", "--mode", mode,
                "--format", "json", "--out", str(out_path),
            ]) == 0
            docs.append(json.loads(out_path.read_text()))
        assert docs[0]["structure"] == docs[1]["structure"]

    def test_determinism_byte_identical(self, tmp_path):
        b = two_sorted((2, 1), [("R", (0, 1), [(0, 0), (1, 0)])])
        b_path = write(tmp_path, "b.json", dumps(b))
        a_path = write(
            tmp_path,
            "a.json",
            json.dumps(
                {
                    "sorts": [{"name": "p", "size": 2}],
                    "relations": [],
                    "functions": [],
                    "constants": [],
                }
            ),
        )
        outs = []
        for name in ("one.json", "two.json"):
            out_path = tmp_path / name
            assert main([
                "uniformize", "--structure", b_path, "--target", a_path,
                "--copies", "2", "--format", "json", "--out", str(out_path),
            ]) == 0
            outs.append(out_path.read_bytes())
        assert outs[0] == outs[1]


class TestVerificationExitCode:
    def test_uniformize_kernel_family_exits_2(self, tmp_path):
        # two copies over a kernel-nontrivial structure: claims fail honestly
        b = two_sorted((1, 2), [("Eq", (1, 1), [(0, 0), (1, 1)])])
        b_path = write(tmp_path, "b.json", dumps(b))
        a_path = write(
            tmp_path,
            "a.json",
            json.dumps(
                {
                    "sorts": [{"name": "p", "size": 1}],
                    "relations": [],
                    "functions": [],
                    "constants": [],
                }
            ),
        )
        assert main([
            "verify", "--structure", b_path, "--target", a_path, "--copies", "2"
        ]) == 2


class TestCatalogSearch:
    def test_small_search_runs(self, tmp_path):
        out_path = tmp_path / "cs.json"
        assert main([
            "catalog-search", "--max-order", "8",
            "--format", "json", "--out", str(out_path),
        ]) == 0
        doc = json.loads(out_path.read_text())
        assert "witness_count" in doc
