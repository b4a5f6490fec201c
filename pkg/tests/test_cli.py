import json
from pathlib import Path

import pytest

from relmdim.cli import main, run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj, indent=1) if not isinstance(obj, str) else obj)
    return str(p)


def test_entropy_tables(tmp_path, capsys):
    code, report, _ = run(["entropy", "--config", str(CONFIGS / "entropy_projection.json")])
    assert code == 0
    rows = report["results"]["entropy"]["rows"]
    assert [r["count"] for r in rows] == [4, 16, 64, 256]
    code, report, _ = run(["entropy", "--config", str(CONFIGS / "entropy_identity.json")])
    assert code == 0 and all(r["count"] == 1 for r in report["results"]["entropy"]["rows"])


def test_entropy_csv_output(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["entropy", "--config", str(CONFIGS / "entropy_projection.json"), "--format", "csv",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n,eps,count") and len(lines) == 5


@pytest.mark.parametrize("bad, needle", [
    ('{"schema": 1, "windows": [2], "eps": "3/5", "period": 4,\n "system": {"alphabet": "two"}}', "system.alphabet"),
    ('{"schema": 2}', "schema"),
    ('{"schema": 1, "windows": [2,', "invalid JSON"),
    ('{"schema": 1, "windows": [0], "eps": "3/5", "period": 4, "system": {"alphabet": 2, "code": {"rule": {"kind": "identity"}}}}', "windows"),
    ('{"schema": 1, "windows": [2], "eps": "3/5", "period": 4, "system": {"alphabet": 2, "code": {"rule": {"kind": "nope"}}}}', "kind"),
])
def test_malformed_configs_exit_2(tmp_path, capsys, bad, needle):
    assert main(["entropy", "--config", write(tmp_path, bad)]) == 2
    err = capsys.readouterr().err
    assert needle in err and "cfg.json" in err


def test_mdim_identity_named_failure(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["mdim-lower", "--config", str(CONFIGS / "mdim_identity.json"), "--out", str(out)])
    assert code == 1
    report = json.loads(out.read_text())
    assert report["results"]["runs"][0]["failure"]["kind"] == "independence-shortfall"


def test_mdim_requires_seed(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "mdim_identity.json").read_text())
    del cfg["seed"]
    assert main(["mdim-lower", "--config", write(tmp_path, cfg)]) == 2


def test_budget_exhaustion_exit_3(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "mdim_full_shift.json").read_text())
    cfg["runs"] = cfg["runs"][:1]
    assert main(["mdim-lower", "--config", write(tmp_path, cfg), "--budget", "5"]) == 3


def test_transport_reports(tmp_path, capsys):
    code, report, _ = run(["transport", "--config", str(CONFIGS / "transport_pair.json")])
    res = report["results"]
    assert code == 0 and res["primal_equals_dual"] and res["potential_is_1_lipschitz"]
    assert res["distance"] == res["dual_value"]
    code, report, _ = run(["transport", "--config", str(CONFIGS / "transport_relation.json")])
    assert report["results"]["relation"]["n"] == 3
    same = {"schema": 1, "mu": {"atoms": [{"word": "01", "weight": "1"}]}, "nu": {"atoms": [{"word": "10", "weight": "1"}]}}
    code, report, _ = run(["transport", "--config", write(tmp_path, same)])
    assert report["results"]["distance"] == "1"
    same["nu"] = same["mu"]
    code, report, _ = run(["transport", "--config", write(tmp_path, same)])
    assert report["results"]["distance"] == "0"


def test_verify_lemmas_zero_budget(capsys):
    code, report, _ = run(["verify-lemmas", "--seed", "3", "--budget", "0"])
    assert code == 0
    assert {i["status"] for i in report["results"]["items"]} == {"skipped"}
    assert "warning" in capsys.readouterr().err


def test_verify_lemmas_subset(tmp_path, capsys):
    cfg = {"schema": 1, "seed": 5, "items": ["lebesgue-oracle", "shatter-agreement"],
           "params": {"shatter-agreement": {"families": 5}}}
    code, report, _ = run(["verify-lemmas", "--config", write(tmp_path, cfg)])
    assert code == 0
    items = report["results"]["items"]
    assert [i["name"] for i in items] == ["lebesgue-oracle", "shatter-agreement"]
    leb = items[0]["details"]
    assert leb["min_ord_found"] == 1 and "(n-1)*k" in leb["relation"]


def test_unknown_item_is_config_error(tmp_path, capsys):
    cfg = {"schema": 1, "seed": 5, "items": ["nonsense"]}
    assert main(["verify-lemmas", "--config", write(tmp_path, cfg)]) == 2
