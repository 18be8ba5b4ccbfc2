import json

import pytest

from ebs.cli import CliConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSpecCommands:
    def test_parse_text(self, capsys):
        code, out, _ = run(capsys, "spec", "parse", "--spec", " C(3;2) x C(1;4)")
        assert code == 0
        assert "spec: C(3;2)xC(1;4)" in out
        assert "elements: 16" in out
        assert "idempotent: [4, 4]" in out

    def test_parse_json(self, capsys):
        code, out, _ = run(capsys, "spec", "parse", "--spec", "C(2;3)", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload == {"spec": "C(2;3)", "arity": 1, "elements": 4,
                           "idempotent": [3]}

    def test_format(self, capsys):
        code, out, _ = run(capsys, "spec", "format", "--spec", "C( 2 ; 3 )")
        assert (code, out.strip()) == (0, "C(2;3)")

    def test_parse_error_exit_1(self, capsys):
        code, _, err = run(capsys, "spec", "parse", "--spec", "C(0;2)")
        assert code == 1
        assert "index must be >= 1" in err


class TestConstCommands:
    def test_eb_both_text(self, capsys):
        code, out, _ = run(capsys, "const", "eb", "--spec", "C(3;2)",
                           "--method", "both")
        assert code == 0
        assert "value: 4" in out and "rule: COR31_R1" in out

    def test_eb_parse_error(self, capsys):
        code, _, err = run(capsys, "const", "eb", "--spec", "C(0;2)")
        assert code == 1 and "error" in err

    def test_eb_budget_exit_2(self, capsys):
        code, _, err = run(capsys, "const", "eb", "--spec", "C(30;1)xC(1;29)",
                           "--method", "brute", "--node-budget", "100")
        assert code == 2 and "budget" in err

    def test_davenport_brute(self, capsys):
        code, out, _ = run(capsys, "const", "davenport", "--group", "2,2",
                           "--method", "brute")
        assert code == 0 and "value: 3" in out

    def test_davenport_echoes_invariant_factors(self, capsys):
        code, out, _ = run(capsys, "const", "davenport", "--group", "4,6", "--json")
        payload = json.loads(out)
        assert code == 0
        assert payload["invariant_factors"] == [2, 12]
        assert payload["value"] == 13

    def test_davenport_bad_group(self, capsys):
        code, _, err = run(capsys, "const", "davenport", "--group", "2,x")
        assert code == 1

    def test_lhat(self, capsys):
        code, out, _ = run(capsys, "const", "lhat", "--spec", "C(5;1)")
        assert code == 0 and "value: 3" in out

    def test_lhat_rejects_products(self, capsys):
        code, _, err = run(capsys, "const", "lhat", "--spec", "C(2;1)xC(1;2)")
        assert code == 1 and "single" in err

    def test_l_mismatch_flag_in_json(self, capsys):
        code, out, _ = run(capsys, "const", "lhat", "--spec", "C(1;5)",
                           "--method", "both", "--json")
        payload = json.loads(out)
        assert code == 0
        assert payload["value"] == 1
        assert payload["flags"] == ["formula-brute-mismatch"]

    def test_json_is_single_object(self, capsys):
        code, out, _ = run(capsys, "const", "eb", "--spec", "C(1;2)xC(4;3)",
                           "--method", "both", "--json")
        payload = json.loads(out)
        assert payload["value"] == 7 and payload["upper"] == 8
        assert payload["flags"] == ["formula-refuted"]


class TestCache:
    def test_round_trip(self, capsys, tmp_path):
        cache = str(tmp_path / "cache.json")
        code1, out1, _ = run(capsys, "const", "eb", "--spec", "C(3;2)xC(1;4)",
                             "--method", "both", "--cache", cache, "--json")
        code2, out2, _ = run(capsys, "const", "eb", "--spec", "C(3;2)xC(1;4)",
                             "--method", "both", "--cache", cache, "--json")
        assert code1 == code2 == 0
        assert json.loads(out1) == json.loads(out2)
        store = json.loads(open(cache).read())
        assert "C(3;2)xC(1;4)|eb|both" in store

    def test_methods_cached_separately(self, capsys, tmp_path):
        cache = str(tmp_path / "cache.json")
        run(capsys, "const", "eb", "--spec", "C(3;2)", "--cache", cache)
        run(capsys, "const", "eb", "--spec", "C(3;2)", "--method", "brute",
            "--cache", cache)
        store = json.loads(open(cache).read())
        assert len(store) == 2

    def test_version_mismatch_recomputes(self, capsys, tmp_path):
        cache = tmp_path / "cache.json"
        cache.write_text(json.dumps({
            "C(3;2)|eb|formula": {"version": "0.0.0", "result": {"value": 99}}
        }))
        code, out, _ = run(capsys, "const", "eb", "--spec", "C(3;2)",
                           "--cache", str(cache), "--json")
        assert code == 0 and json.loads(out)["value"] == 4
        assert json.loads(cache.read_text())["C(3;2)|eb|formula"]["version"] != "0.0.0"

    def test_corrupt_cache_warns_and_continues(self, capsys, tmp_path):
        cache = tmp_path / "cache.json"
        cache.write_text("not json")
        code, out, err = run(capsys, "const", "eb", "--spec", "C(3;2)",
                             "--cache", str(cache), "--json")
        assert code == 0 and json.loads(out)["value"] == 4
        assert "cache" in err

    def test_env_cache_used(self, capsys, tmp_path, monkeypatch):
        cache = tmp_path / "envcache.json"
        monkeypatch.setenv("EBS_CACHE", str(cache))
        code, _, _ = run(capsys, "const", "eb", "--spec", "C(3;2)")
        assert code == 0 and cache.exists()


class TestSeqCommand:
    def test_free_true(self, capsys, tmp_path):
        f = tmp_path / "t.seq"
        f.write_text("1\n1\n")
        code, out, _ = run(capsys, "seq", "check", "--spec", "C(2;3)",
                           "--predicate", "free", "--file", str(f))
        assert code == 0 and "result: true" in out

    def test_free_false_prints_witness(self, capsys, tmp_path):
        f = tmp_path / "t.seq"
        f.write_text("1\n1\n1\n")
        code, out, _ = run(capsys, "seq", "check", "--spec", "C(2;3)",
                           "--predicate", "free", "--file", str(f))
        assert code == 0
        assert "result: false" in out
        assert "witness:" in out
        assert out.count("\n1") >= 3

    def test_idempotent_predicate(self, capsys, tmp_path):
        f = tmp_path / "t.seq"
        f.write_text("1\n1\n1\n")
        code, out, _ = run(capsys, "seq", "check", "--spec", "C(2;3)",
                           "--predicate", "idempotent", "--file", str(f))
        assert code == 0 and "result: true" in out

    def test_minimal_predicate_json(self, capsys, tmp_path):
        f = tmp_path / "t.seq"
        f.write_text("1\n1\n1\n1\n")
        code, out, _ = run(capsys, "seq", "check", "--spec", "C(3;2)",
                           "--predicate", "minimal", "--file", str(f), "--json")
        assert code == 0
        assert json.loads(out)["result"] is True

    def test_malformed_line_exit_1(self, capsys, tmp_path):
        f = tmp_path / "t.seq"
        f.write_text("1\n2;3\n")
        code, _, err = run(capsys, "seq", "check", "--spec", "C(2;3)",
                           "--predicate", "free", "--file", str(f))
        assert code == 1 and "line 2" in err

    def test_missing_file_exit_1(self, capsys, tmp_path):
        code, _, err = run(capsys, "seq", "check", "--spec", "C(2;3)",
                           "--predicate", "free", "--file", str(tmp_path / "no.seq"))
        assert code == 1


class TestStructCommands:
    def test_behaving_true(self, capsys):
        code, out, _ = run(capsys, "struct", "behaving", "--ints", "1,1,2")
        assert code == 0
        assert "behaving: true" in out and "class: behaving" in out

    def test_behaving_eq_twos(self, capsys):
        code, out, _ = run(capsys, "struct", "behaving", "--ints", "2,2")
        assert code == 0
        assert "behaving: false" in out and "class: eq_twos" in out

    def test_classify_from_file(self, capsys, tmp_path):
        f = tmp_path / "t.seq"
        f.write_text("2\n2\n")
        code, out, _ = run(capsys, "struct", "classify", "--spec", "C(5;1)",
                           "--file", str(f))
        assert code == 0 and "tag: N1_TWOS_V" in out

    def test_classify_precondition_exit_1(self, capsys, tmp_path):
        f = tmp_path / "t.seq"
        f.write_text("2\n3\n")  # not idempotent-sum free over C(5;1)
        code, _, err = run(capsys, "struct", "classify", "--spec", "C(5;1)",
                           "--file", str(f))
        assert code == 1 and "free" in err

    def test_savchev_chen(self, capsys):
        code, out, _ = run(capsys, "struct", "savchev-chen", "--group", "5",
                           "--ints", "3,3,3")
        assert code == 0 and "c: 3" in out and "H: 1,1,1" in out

    def test_savchev_chen_none(self, capsys):
        code, out, _ = run(capsys, "struct", "savchev-chen", "--group", "7",
                           "--ints", "1,3")
        assert code == 0 and "result: none" in out

    def test_savchev_chen_multi_modulus_rejected(self, capsys):
        code, _, err = run(capsys, "struct", "savchev-chen", "--group", "5,7",
                           "--ints", "1")
        assert code == 1


class TestExplore:
    def test_conjecture_report(self, capsys, tmp_path):
        out_path = tmp_path / "rows.jsonl"
        code, out, _ = run(capsys, "explore", "conjecture41", "--max-k", "2",
                           "--max-n", "3", "--out", str(out_path))
        assert code == 0
        rows = [json.loads(line) for line in out_path.read_text().splitlines()]
        assert len(rows) == 21
        assert out.startswith("summary:")
        assert "counterexamples=0" in out

    def test_lhat_gap_stdout(self, capsys):
        code, out, _ = run(capsys, "explore", "lhat-gap", "--max-k", "4",
                           "--max-n", "2")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[-1].startswith("summary:")
        assert all(json.loads(x) for x in lines[:-1])

    def test_empty_range_empty_file(self, capsys, tmp_path):
        out_path = tmp_path / "rows.jsonl"
        code, out, _ = run(capsys, "explore", "l-gap", "--max-k", "1",
                           "--max-n", "1", "--out", str(out_path))
        assert code == 0
        assert out_path.read_text() == ""
        assert "rows=0" in out


class TestUsage:
    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 1

    def test_missing_required_flag(self, capsys):
        code, _, err = run(capsys, "const", "eb")
        assert code == 1

    def test_bad_method_value(self, capsys):
        code, _, err = run(capsys, "const", "eb", "--spec", "C(2;2)",
                           "--method", "magic")
        assert code == 1

    def test_nonpositive_budget(self, capsys):
        code, _, err = run(capsys, "const", "eb", "--spec", "C(2;2)",
                           "--node-budget", "-5")
        assert code == 1


class TestCliConfig:
    def test_env_threads(self, monkeypatch):
        monkeypatch.setenv("EBS_THREADS", "3")

        class Args:
            pass

        cfg = CliConfig.from_args(Args())
        assert cfg.threads == 3

    def test_flag_beats_env(self, monkeypatch):
        monkeypatch.setenv("EBS_THREADS", "3")

        class Args:
            threads = 2

        cfg = CliConfig.from_args(Args())
        assert cfg.threads == 2
        assert cfg.budget().threads == 2
