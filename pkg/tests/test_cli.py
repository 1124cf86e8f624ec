import csv
import io
import json
import re
import shlex
import subprocess
import sys
from pathlib import Path

import pytest

from fermispin.cli import main

README = Path(__file__).resolve().parents[1] / "README.md"


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke(*argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


def lookup(doc, dotted):
    for part in dotted.split("."):
        doc = doc[int(part)] if isinstance(doc, list) else doc[part]
    return doc


COMMAND_ARGS = {
    "build": ["--n", "4"],
    "reduce": ["--n", "4", "--mask", "keep=0,1"],
    "correlate": ["--n", "6"],
    "negativity": ["--n", "4", "--split", "0,1|2,3"],
    "witness": ["--n", "6", "--split", "0,1,2|3,4,5"],
    "chsh": ["--n", "4"],
    "entropy": ["--n", "4"],
    "report": [],
}

EXPECTED_KEYS = {
    "build": {"command", "n", "builder", "denom", "dimension", "trace", "rank", "nonzero_entries", "checksum", "cache"},
    "reduce": {"command", "n", "keep", "dimension", "denom", "trace", "matrix", "two_spin_weights"},
    "correlate": {"command", "n", "pair", "correlation", "correlation_float", "numeric", "agree"},
    "negativity": {"command", "n", "keep", "split", "eigenvalues", "negativity", "entangled"},
    "witness": {"command", "n", "keep", "split", "found", "witness"},
    "chsh": {
        "command", "n", "value", "value_over_sqrt2", "classical_bound", "tsirelson_bound",
        "violated", "route", "operator_norms",
    },
    "entropy": {"command", "n", "builder", "keep", "entropy_nats", "rank"},
    "report": {"command", "checks", "all_passed"},
}


@pytest.fixture(autouse=True)
def no_env_cache(monkeypatch):
    monkeypatch.delenv("FERMISPIN_CACHE_DIR", raising=False)


class TestCommands:
    @pytest.mark.parametrize("command", sorted(COMMAND_ARGS))
    def test_json_key_set(self, command):
        doc = invoke_json(command, *COMMAND_ARGS[command])
        assert set(doc) == EXPECTED_KEYS[command]
        assert doc["command"] == command

    @pytest.mark.parametrize("command", sorted(COMMAND_ARGS))
    def test_csv(self, command):
        code, out, _ = invoke(command, *COMMAND_ARGS[command], "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] in (["key", "value"], ["name", "expected", "computed", "passed"])
        assert len(rows) > 1

    @pytest.mark.parametrize("command", sorted(COMMAND_ARGS))
    def test_pretty(self, command):
        code, out, _ = invoke(command, *COMMAND_ARGS[command], "--format", "pretty")
        assert code == 0
        assert out.strip()

    def test_report_all_pass(self):
        doc = invoke_json("report")
        assert doc["all_passed"]
        assert len(doc["checks"]) >= 11

    def test_negativity_values(self):
        doc = invoke_json("negativity", "--n", "4", "--split", "0,1|2,3")
        assert doc["negativity"] == pytest.approx(1.0, abs=1e-10)
        assert doc["entangled"] is True

    def test_mask_uses_original_labels(self):
        doc = invoke_json("negativity", "--n", "4", "--mask", "keep=1,2,3", "--split", "3|1,2")
        assert doc["keep"] == [1, 2, 3]
        assert doc["negativity"] == pytest.approx(1 / 3, abs=1e-10)

    def test_witness_outside_sz0_support_not_found(self):
        # reduced 3-spin state has no zero-diagonal S_z blocks to land in
        doc = invoke_json("witness", "--n", "4", "--mask", "keep=1,2,3", "--split", "1|2,3")
        assert doc["found"] is False
        assert doc["witness"] is None

    def test_negativity_three_spin_regression(self):
        doc = invoke_json("negativity", "--n", "4", "--mask", "keep=0,1,2", "--split", "0|1,2")
        assert doc["negativity"] == pytest.approx(1 / 3, abs=1e-10)

    def test_correlate_beyond_dense_limit(self):
        doc = invoke_json("correlate", "--n", "1000000")
        assert doc["correlation"] == {"num": "-1", "den": "999999"}
        assert doc["numeric"] is None

    def test_chsh_reduced_large(self):
        doc = invoke_json("chsh", "--n", "1000000", "--route", "reduced")
        assert doc["value_over_sqrt2"] == {"num": "2", "den": "1"}
        assert doc["violated"] is True

    @pytest.mark.parametrize("builder", ["pairing", "slater", "projector"])
    def test_builders_agree(self, builder):
        assert invoke_json("build", "--n", "4", "--builder", builder)["checksum"] == invoke_json(
            "build", "--n", "4"
        )["checksum"]

    def test_cache_dir(self, tmp_path):
        assert invoke_json("build", "--n", "4", "--cache-dir", str(tmp_path))["cache"] == "miss"
        assert invoke_json("build", "--n", "4", "--cache-dir", str(tmp_path))["cache"] == "hit"

    def test_float_digits(self):
        doc = invoke_json("entropy", "--n", "6")
        assert doc["entropy_nats"] == float(f"{doc['entropy_nats']:.15g}")


class TestErrors:
    @pytest.mark.parametrize(
        "argv,code",
        [
            (["negativity", "--n", "4", "--split", "0,1"], 2),
            (["negativity", "--n", "4", "--split", "0|5"], 2),
            (["negativity", "--n", "4"], 2),
            (["reduce", "--n", "4", "--mask", "0,1"], 2),
            (["reduce", "--n", "4", "--mask", "keep=0,0"], 2),
            (["build", "--n", "5"], 2),
            (["build"], 2),
            (["correlate", "--n", "4", "--pair", "0"], 2),
            (["chsh", "--n", "4", "--alice", "7"], 2),
            (["bogus"], 2),
            (["build", "--n", "four"], 2),
            (["build", "--n", "14"], 3),
            (["negativity", "--n", "8", "--split", "0|1,2,3,4,5,6,7", "--max-n", "6"], 3),
        ],
    )
    def test_exit_code_and_single_json_line(self, argv, code):
        rc, out, err = invoke(*argv)
        assert rc == code
        assert out == ""
        lines = err.strip().splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert set(record) == {"error", "message", "exit"}
        assert record["exit"] == code

    def test_resource_message_names_limit(self):
        _, _, err = invoke("build", "--n", "14")
        assert "max_n=12" in json.loads(err)["message"]

    def test_subprocess_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "fermispin", "correlate", "--n", "4"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["correlation"] == {"num": "-1", "den": "3"}


def readme_examples():
    """Rows of the README table: | `fermispin ...` | key | expected JSON |."""
    rows = []
    for line in README.read_text(encoding="utf-8").splitlines():
        m = re.match(r"^\|\s*`fermispin ([^`]+)`\s*\|\s*`([^`]+)`\s*\|\s*`([^`]+)`\s*\|$", line)
        if m:
            rows.append(m.groups())
    return rows


def test_readme_has_examples():
    assert len(readme_examples()) >= 6


@pytest.mark.parametrize("args,key,expected", readme_examples())
def test_readme_example(args, key, expected):
    doc = invoke_json(*shlex.split(args))
    assert lookup(doc, key) == json.loads(expected)
