import json

from src.run_logger import log_step, read_steps


def test_log_step_appends_json_lines(tmp_path):
    out = tmp_path / "sweep"
    log_step(out, "sweep_start", {"cases": 2})
    log_step(out, "case", {"index": 0, "levels": {3, 1, 2}})
    lines = (out / "run.log").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    first = json.loads(lines[0])
    assert first["step"] == "sweep_start"
    assert first["payload"] == {"cases": 2}
    assert isinstance(first["ts"], float)
    steps = read_steps(out)
    assert [step["step"] for step in steps] == ["sweep_start", "case"]
    assert steps[1]["payload"]["levels"] == [1, 2, 3]


def test_read_steps_without_log(tmp_path):
    assert read_steps(tmp_path / "missing") == []
