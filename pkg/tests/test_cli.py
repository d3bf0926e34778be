import json
import os
import subprocess
import sys

from cvcsp import INF, Instance, Language, Term, cost_function, instance_to_json, language_to_json, unary
from helpers import cut_language, diseq_language, submodular_language


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    env.setdefault("PYTHONHASHSEED", "0")
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "cvcsp.cli", *args],
                          capture_output=True, text=True, env=env)


def write_language(tmp_path, language, name="lang.json"):
    path = tmp_path / name
    path.write_text(json.dumps(language_to_json(language)))
    return str(path)


def write_instance(tmp_path, instance, name="inst.json"):
    path = tmp_path / name
    path.write_text(json.dumps(instance_to_json(instance)))
    return str(path)


class TestClassifyCommand:
    def test_tractable_exit_zero_and_certificate(self, tmp_path):
        lang = write_language(tmp_path, submodular_language())
        cert = tmp_path / "cert.json"
        result = run_cli(["classify", lang, "--emit-certificate", str(cert)])
        assert result.returncode == 0
        assert json.loads(result.stdout)["verdict"] == "tractable"
        assert cert.exists()

        verify = run_cli(["verify", str(cert), lang])
        assert verify.returncode == 0
        assert "certificate valid" in verify.stdout

    def test_np_hard_exit_two(self, tmp_path):
        lang = write_language(tmp_path, cut_language())
        result = run_cli(["classify", lang])
        assert result.returncode == 2
        assert json.loads(result.stdout)["reason"] == "soft-self-loop"

    def test_byte_identical_across_hash_seeds(self, tmp_path):
        # determinism must not depend on interpreter hash randomization
        lang = write_language(tmp_path, diseq_language())
        cert_a, cert_b = tmp_path / "a.json", tmp_path / "b.json"
        ra = run_cli(["classify", lang, "--seed", "7", "--emit-certificate", str(cert_a)],
                     {"PYTHONHASHSEED": "1"})
        rb = run_cli(["classify", lang, "--seed", "7", "--emit-certificate", str(cert_b)],
                     {"PYTHONHASHSEED": "2"})
        assert ra.returncode == rb.returncode == 0
        assert ra.stdout == rb.stdout and ra.stderr == rb.stderr
        assert cert_a.read_bytes() == cert_b.read_bytes()


class TestSolveCommand:
    def test_prints_assignment_and_exact_cost(self, tmp_path):
        lang = write_language(tmp_path, Language(2, (unary([3, 1]),), "finite"))
        inst = write_instance(tmp_path, Instance(1, (Term(0, (0,)),)))
        result = run_cli(["solve", inst, lang])
        assert result.returncode == 0
        payload = json.loads(result.stdout)
        assert payload == {"assignment": [1], "cost": "1", "feasible": True}


class TestCheckMmCommand:
    def test_pair_holds_and_violates(self, tmp_path):
        ops = tmp_path / "ops.json"
        ops.write_text(json.dumps(
            {"pair": {"meet": [0, 0, 0, 1], "join": [0, 1, 1, 1]}}))
        good = run_cli(["check-mm", write_language(tmp_path, submodular_language()), str(ops)])
        assert good.returncode == 0 and json.loads(good.stdout)["holds"]
        bad = run_cli(["check-mm", write_language(tmp_path, cut_language(), "cut.json"), str(ops)])
        assert bad.returncode == 1
        assert not json.loads(bad.stdout)["holds"]


class TestErrors:
    def test_malformed_json_exit_64_with_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"domain_size": 2,,}')
        result = run_cli(["classify", str(path)])
        assert result.returncode == 64
        assert ":1:" in result.stderr  # line:column annotation

    def test_bad_cost_exit_64(self, tmp_path):
        path = tmp_path / "lang.json"
        path.write_text(json.dumps({"domain_size": 2, "unary_closure": "finite",
                                    "functions": [{"arity": 1, "table": [0.25, 1]}]}))
        result = run_cli(["classify", str(path)])
        assert result.returncode == 64

    def test_capability_exit_65(self, tmp_path):
        lang = write_language(tmp_path, submodular_language())
        result = run_cli(["classify", lang, "--max-domain", "1"])
        assert result.returncode == 65


class TestExpressAndGraph:
    def test_express_emits_members_with_provenance(self, tmp_path):
        lang = write_language(tmp_path, diseq_language())
        result = run_cli(["express", lang, "--budget-rounds", "2"])
        assert result.returncode == 0
        payload = json.loads(result.stdout)
        assert payload["members"] and all("provenance" in m for m in payload["members"])

    def test_graph_emits_m_set_and_dot(self, tmp_path):
        lang = write_language(tmp_path, submodular_language())
        dot = tmp_path / "g.dot"
        result = run_cli(["graph", lang, "--dot", str(dot)])
        assert result.returncode == 0
        payload = json.loads(result.stdout)
        assert payload["m_set"] == [[0, 1]]
        assert "graph pairs {" in dot.read_text()


class TestReduceCommand:
    def test_feas_mode(self, tmp_path):
        lang = write_language(tmp_path, submodular_language())
        result = run_cli(["reduce", "--mode", "feas", lang])
        assert result.returncode == 0
        payload = json.loads(result.stdout)
        assert payload["functions"][0]["table"] == [0, 0, 0, 0]

    def test_cap_mode(self, tmp_path):
        lang_obj = Language(2, (unary([0, INF]), cost_function(2, 2, [0, 0, 0, 0])),
                            "general")
        lang = write_language(tmp_path, lang_obj)
        inst = write_instance(tmp_path, Instance(2, (Term(0, (0,)), Term(1, (0, 1)))))
        result = run_cli(["reduce", "--mode", "cap", lang, inst])
        assert result.returncode == 0
        payload = json.loads(result.stdout)
        assert payload["cap"] == "1" and payload["copies"] == 2
        assert payload["threshold"] == "2"


class TestGenCommand:
    def test_language_generation_deterministic(self, tmp_path):
        a = run_cli(["gen", "--kind", "language", "--seed", "5"], {"PYTHONHASHSEED": "1"})
        b = run_cli(["gen", "--kind", "language", "--seed", "5"], {"PYTHONHASHSEED": "2"})
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout
        assert json.loads(a.stdout)["domain_size"] == 2

    def test_instance_generation_validates(self, tmp_path):
        lang = write_language(tmp_path, diseq_language())
        result = run_cli(["gen", "--kind", "instance", "--seed", "3",
                          "--language", lang, "--num-vars", "3", "--terms", "4"])
        assert result.returncode == 0
        payload = json.loads(result.stdout)
        assert payload["num_vars"] == 3 and len(payload["terms"]) == 4
