import hashlib
from datetime import datetime, timezone

from utils.ledger import RunLedger


def test_record_and_read_back(tmp_path):
    ledger = RunLedger(str(tmp_path / "runs.db"))
    stamp = datetime(2024, 5, 1, 12, 0, tzinfo=timezone.utc)
    run_id = ledger.record_run("table", {"id": 1, "command": "table"}, b"k,normal\n", recorded_at=stamp)

    [run] = ledger.get_runs()
    assert run["id"] == run_id
    assert run["command"] == "table"
    assert run["config"] == {"command": "table", "id": 1}
    assert run["output_sha256"] == hashlib.sha256(b"k,normal\n").hexdigest()
    assert run["recorded_at"] == "2024-05-01T12:00:00+00:00"


def test_newest_first_with_filter_and_limit(tmp_path):
    ledger = RunLedger(str(tmp_path / "runs.db"))
    for command in ("compute", "table", "compute", "check"):
        ledger.record_run(command, {"command": command}, command.encode())

    assert [r["command"] for r in ledger.get_runs()] == ["check", "compute", "table", "compute"]
    assert [r["command"] for r in ledger.get_runs(limit=2)] == ["check", "compute"]
    computes = ledger.get_runs(command="compute")
    assert len(computes) == 2
    assert computes[0]["id"] > computes[1]["id"]


def test_reopening_keeps_history(tmp_path):
    path = str(tmp_path / "runs.db")
    RunLedger(path).record_run("check", {"command": "check"}, b"")
    assert len(RunLedger(path).get_runs()) == 1
