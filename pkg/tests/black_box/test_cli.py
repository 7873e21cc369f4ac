"""
Tests de caja negra de la CLI: argumentos, salida JSON y códigos de salida
"""
import json

import pytest

from app.main import main

pytestmark = pytest.mark.integration


@pytest.fixture
def gog_config():
    return {
        "groups": [
            {"name": "Za", "kind": "cyclic", "letter": "a"},
            {"name": "Zb", "kind": "cyclic", "letter": "b"},
            {"name": "One", "kind": "cyclic", "order": 1},
            {
                "name": "Seg",
                "kind": "gog",
                "vertices": {"P": "Za", "Q": "Zb"},
                "edges": [{"name": "e", "source": "P", "target": "Q", "sigma": "One", "s": ["1"], "r": ["1"]}],
            },
        ]
    }


@pytest.fixture
def modular_config():
    """ℤ/2 ∗ ℤ/3 con letras s y r."""
    return {
        "groups": [
            {"name": "Z2", "kind": "cyclic", "order": 2, "letter": "s"},
            {"name": "Z3", "kind": "cyclic", "order": 3, "letter": "r"},
            {"name": "One", "kind": "cyclic", "order": 1},
            {"name": "M", "kind": "amalgam", "factors": ["Z2", "Z3"], "sigma": "One", "embeddings": [["1"], ["1"]]},
        ]
    }


class TestRadoCommand:

    def test_adjacency(self, run_cli):
        code, data = run_cli(["rado", "adjacent", "0", "1"])
        assert code == 0
        assert data == {"backend": "bit", "x": "0", "y": "1", "adjacent": True}

    def test_witness(self, run_cli):
        code, data = run_cli(["rado", "witness", "-U", "0", "-V", "1"])
        assert code == 0
        assert data["witness"] == "5"
        assert data["verified"]

    def test_enumeration_with_deletion(self, run_cli):
        code, data = run_cli(["rado", "enum", "-n", "3", "--delete", "0"])
        assert code == 0
        assert data["vertices"] == ["1", "2", "3"]

    def test_limit_backend(self, run_cli, seed_file):
        code, data = run_cli(["rado", "enum", "--backend", f"limit:{seed_file}:1", "-n", "4"])
        assert code == 0
        assert data["vertices"] == ["b0", "b1", "b2", "{b0}"]

    def test_loop_query_is_an_error(self, run_cli):
        code, data = run_cli(["rado", "adjacent", "3", "3"])
        assert code == 2
        assert data["error"] == "loop_query"

    def test_text_output(self, capsys):
        assert main(["rado", "witness", "-U", "0", "-V", "1"]) == 0
        assert capsys.readouterr().out.strip() == "5"


class TestGroupAndGogCommands:

    def test_group_info(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "info", "-c", path, "--group", "G"])
        assert code == 0
        assert data["finite"] is False
        assert data["letters"] == ["a", "b"]

    def test_normal_form(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "nf", "-c", path, "--group", "Za", "a^3 a^-1"])
        assert code == 0
        assert data["normal_form"] == "a^2"
        assert data["order"] is None

    def test_normal_form_long_name_still_accepted(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "normal-form", "-c", path, "--group", "Zb", "b b"])
        assert code == 0
        assert data["normal_form"] == "b^2"

    def test_undeclared_group(self, run_cli, write_config, amalgam_config):
        code, data = run_cli(["group", "enum", "-c", write_config(amalgam_config), "--group", "H", "-n", "2"])
        assert code == 2
        assert data["error"] == "invalid_input"

    def test_gog_decompose(self, run_cli, write_config, gog_config):
        path = write_config(gog_config)
        code, data = run_cli(["gog", "decompose", "-c", path, "--group", "Seg", "--edge", "e"])
        assert code == 0
        assert data["kind"] == "amalgam"
        code, data = run_cli(["gog", "show", "-c", path, "--group", "Seg"])
        assert data["tree"] == ["e"]

    def test_missing_config_file(self, run_cli, tmp_path):
        code, data = run_cli(["group", "info", "-c", str(tmp_path / "missing.json"), "--group", "G"])
        assert code == 2
        assert data["error"] == "io_error"


class TestGroupActionCommands:

    def test_act_on_base_vertex(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "act", "-c", path, "-g", "Za", "--element", "a", "--vertex", "b(a^2)"])
        assert code == 0
        assert data["image"] == "b(a^3)"
        assert data["adjacent"] is False
        assert data["l"] == 1

    def test_act_moves_set_terms_member_by_member(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "act", "-c", path, "-g", "Za", "-e", "a", "-x", "{b(1),b(a)}"])
        assert code == 0
        assert data["image"].startswith("{")
        assert "b(a)" in data["image"] and "b(a^2)" in data["image"]
        assert "b(1)" not in data["image"]

    def test_act_rejects_finite_group(self, run_cli, write_config, modular_config):
        path = write_config(modular_config)
        code, data = run_cli(["group", "act", "-c", path, "-g", "Z2", "-e", "s", "-x", "b(1)"])
        assert code == 2
        assert data["error"] == "finite_group_rejected"

    def test_witness_homogeneity(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "witness", "-c", path, "-g", "Za", "--kind", "homogeneity", "--phi", "b(1):b(a^2)"])
        assert code == 0
        assert data["witness"] == "a^2"
        assert data["verified"]

    def test_witness_disconnect(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "witness", "-c", path, "-g", "Za", "--kind", "disconnect", "--F", "b(1),b(a)"])
        assert code == 0
        assert data["witness"] not in {"1", "a", "a^-1"}
        assert data["verified"]
        assert sorted(data["F"]) == ["b(1)", "b(a)"]

    def test_witness_highly_core_free(self, run_cli, write_config, modular_config):
        path = write_config(modular_config)
        code, data = run_cli(["group", "witness", "-c", path, "-g", "M", "--kind", "hcf", "--sigma", "s", "--F", "b(1)"])
        assert code == 0
        assert data["l"] == 2
        assert data["verified"]

    def test_witness_property_f(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "witness", "-c", path, "-g", "G", "--kind", "property-f", "--S", "a,b", "--F", "b(1)"])
        assert code == 0
        assert data["verified"]
        assert data["witness"] != "b(1)"

    def test_witness_singularity_reports_window(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "witness", "-c", path, "-g", "Za", "--kind", "singularity", "-n", "4", "--budget", "5"])
        assert code == 0
        assert data["window"] == 4
        assert data["exhaustive"] is False
        assert "found" in data

    def test_witness_budget_exhausted(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        argv = ["group", "witness", "-c", path, "-g", "Za", "--kind", "homogeneity", "--phi", "b(1):b(a^50)", "--budget", "3"]
        code, data = run_cli(argv)
        assert code == 3
        assert data["error"] == "budget_exhausted"

    def test_witness_homogeneity_needs_a_map(self, run_cli, write_config, amalgam_config):
        path = write_config(amalgam_config)
        code, data = run_cli(["group", "witness", "-c", path, "-g", "Za", "--kind", "homogeneity"])
        assert code == 2
        assert data["error"] == "invalid_input"


class TestLimitAndExtendCommands:

    def test_stage_sizes(self, run_cli, seed_file):
        code, data = run_cli(["limit", "stage", "--seed", seed_file, "--upto", "1"])
        assert code == 0
        assert data["stages"] == [3, 10]
        assert data["edges"] == 13

    def test_fixed_points_of_a_swap(self, run_cli, seed_file):
        code, data = run_cli(["limit", "fix", "--seed", seed_file, "--perm", "1,0,2"])
        assert code == 0
        assert sorted(data["fixed"]) == sorted(["{b2}", "{b0,b1}", "{b0,b1,b2}"])

    def test_extend(self, run_cli):
        code, data = run_cli(["extend", "--map", "0:2", "-n", "8", "--query", "1"])
        assert code == 0
        assert data["queries"] == {"1": "1"}
        assert data["window"]["passed"]
        assert {"x": "0", "y": "2"} in data["committed"]
        assert {"x": "1", "y": "1"} in data["committed"]

    def test_extend_prints_committed_pairs_as_json_lines(self, capsys):
        assert main(["extend", "--map", "0:2,5:7", "-n", "4", "--query", "1,3,9"]) == 0
        pairs = [json.loads(line) for line in capsys.readouterr().out.strip().splitlines()]
        assert {"x": "0", "y": "2"} in pairs
        assert {"x": "5", "y": "7"} in pairs
        assert {p["x"] for p in pairs} >= {"0", "1", "2", "3", "5", "9"}
        assert len({p["y"] for p in pairs}) == len(pairs)

    def test_extend_accepts_phi_spelling(self, run_cli):
        code, data = run_cli(["extend", "--phi", "0:2", "-n", "2"])
        assert code == 0
        assert data["phi_size"] == 1

    def test_extend_rejects_invalid_map(self, run_cli):
        code, data = run_cli(["extend", "--map", "0:0,1:2"])
        assert code == 2
        assert data["error"] == "invalid_partial_iso"

    def test_equivariant_extend(self, run_cli, write_config, modular_config):
        path = write_config(modular_config)
        argv = ["extend", "-c", path, "-g", "M", "--sigma", "s", "--map", "b(1):b(r),b(s):b(s r)", "-n", "6"]
        code, data = run_cli(argv)
        assert code == 0
        assert data["equivariant"] is True
        assert data["window"]["passed"]
        assert len(data["sigma"]) == 2
        assert data["phi_size"] == 2
        assert data["backend"].startswith("limit:group=M:2")

    def test_equivariant_extend_needs_closed_orbits(self, run_cli, write_config, modular_config):
        path = write_config(modular_config)
        code, data = run_cli(["extend", "-c", path, "-g", "M", "--sigma", "s", "--map", "b(1):b(r)"])
        assert code == 2
        assert data["error"] == "equivariance_violated"

    def test_sigma_needs_a_group(self, run_cli):
        code, data = run_cli(["extend", "--sigma", "s", "--map", "0:2"])
        assert code == 2
        assert data["error"] == "invalid_input"


class TestGenericAndVerifyCommands:

    def test_run_then_replay(self, run_cli, write_config, amalgam_config, tmp_path):
        path = write_config(amalgam_config)
        certs = tmp_path / "certs.jsonl"
        code, data = run_cli(["generic", "run", "-c", path, "--out", str(certs)])
        assert code == 0
        assert data["steps"] == 2
        lines = certs.read_text(encoding="utf-8").splitlines()
        assert [json.loads(line)["step"] for line in lines] == [0, 1]
        code, data = run_cli(["generic", "replay", "-c", path, "--certs", str(certs)])
        assert code == 0
        assert data == {"replayed": 2, "failed": [], "run_status": "passed"}

    def test_verify_backends(self, run_cli, write_config, tmp_path):
        path = write_config({"budgets": {"backend_window": 5, "pair_samples": 100, "window": 6}})
        out = tmp_path / "report.json"
        code, data = run_cli(["verify", "--suite", "backends", "-c", path, "--out", str(out)])
        assert code == 0
        assert data["status"] == "passed"
        assert data["checks"][0]["instances"] == 100
        assert json.loads(out.read_text(encoding="utf-8")) == data

    def test_unknown_suite(self, run_cli):
        code, data = run_cli(["verify", "--suite", "nope"])
        assert code == 2
        assert data["error"] == "unknown_suite"


class TestExportAndFreeCommands:

    def test_export_to_stdout(self, run_cli):
        code, data = run_cli(["export", "-n", "3", "--format", "jsonl"])
        assert code == 0
        assert data["content"].splitlines() == ['{"u": "0", "v": "1"}', '{"u": "1", "v": "2"}']

    def test_export_to_file(self, run_cli, tmp_path):
        out = tmp_path / "window.dot"
        code, data = run_cli(["export", "--vertices", "0,1,2,3", "--format", "dot", "--out", str(out)])
        assert code == 0
        assert data["edges"] == 4
        assert out.read_text(encoding="utf-8").startswith("// vertices:")

    def test_free_faithful(self, run_cli):
        code, data = run_cli(["free", "faithful", "--word", "a1 a2", "--rounds", "1"])
        assert code == 0
        assert data["vertex"] != data["image"]

    def test_free_schreier(self, run_cli):
        code, data = run_cli(["free", "schreier", "--center", "0", "--radius", "2", "--rounds", "1"])
        assert code == 0
        assert data["passed"]
        assert data["cycles"] == []

    def test_free_homogeneity_with_explicit_guard(self, run_cli):
        code, data = run_cli(["free", "homogeneity", "--phi", "3:3", "--F", "0,1", "--rounds", "1"])
        assert code == 0
        assert data["element"] == "1"
        assert data["details"] == {"fast_path": True}

    def test_free_homogeneity_rejects_bad_guard(self, run_cli):
        code, data = run_cli(["free", "homogeneity", "--phi", "0:1", "--F", "b0", "--rounds", "1"])
        assert code == 2

    @pytest.mark.slow
    def test_free_homogeneity_keeps_alphas_on_guard(self, run_cli):
        code, data = run_cli(["free", "homogeneity", "--phi", "0:1", "--F", "0", "--rounds", "1"])
        assert code == 0
        assert data["phi"] == [["0", "1"]]
        assert data["checks"][-1] == "omega_j^(+-1) = alpha_j^(+-1) on F (2 vertices)"
