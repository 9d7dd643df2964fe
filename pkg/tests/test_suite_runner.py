import json
from pathlib import Path

from ftspanner.suite import run_case, run_suite

REPO = Path(__file__).resolve().parent.parent


def test_smoke_manifest(tmp_path):
    assert run_suite(REPO / "suites" / "smoke.json", workdir=tmp_path) == 0


def test_expected_fail_mismatch_detected(tmp_path):
    case = {
        "name": "tree-should-not-fail",
        "kind": "build-verify",
        "generator": {"kind": "tree", "n": 10},
        "algo": "meta-seq",
        "f": 1,
        "k": 2,
        "seeds": [0],
        "expect": "fail",
    }
    ok, detail = run_case(case, tmp_path)
    assert not ok
    assert "expected fail, got pass" in detail


def test_manifest_files_are_valid_json():
    for name in ("smoke.json", "exhaustive.json"):
        cases = json.loads((REPO / "suites" / name).read_text())
        assert isinstance(cases, list) and cases
        for case in cases:
            assert {"name", "generator", "expect"} <= set(case)
