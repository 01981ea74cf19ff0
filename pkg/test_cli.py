"""配置校验、总体判定与命令行入口"""
import json
import os

import pytest

from app.agents.base_agent import BaseAgent
from app.agents.pipeline_agent import StabilityPipelineAgent
from app.cli import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main
from app.schemas.config_schemas import load_config, parse_config
from app.schemas.report_schemas import INCONCLUSIVE, NECESSARY_VIOLATED, SUFFICIENT_MET, Verdicts, conclude
from app.utils.errors import ConfigError, ProfileSolveError

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
CONFIG_FILES = sorted(f for f in os.listdir(CONFIG_DIR) if f.endswith(".json"))

FLAGS = ("spectral_weak", "spectral_strong", "structural", "refined_weak", "refined_strong")
T, F, N = True, False, None

CONCLUSION_TABLE = [
    ((T, T, T, T, T), SUFFICIENT_MET),
    ((N, T, T, N, T), SUFFICIENT_MET),
    ((F, T, T, T, T), NECESSARY_VIOLATED),
    ((T, T, T, F, T), NECESSARY_VIOLATED),
    ((F, N, N, N, N), NECESSARY_VIOLATED),
    ((N, N, N, F, N), NECESSARY_VIOLATED),
    ((F, F, F, F, F), NECESSARY_VIOLATED),
    ((T, T, F, T, T), INCONCLUSIVE),
    ((T, T, N, T, T), INCONCLUSIVE),
    ((T, F, T, T, T), INCONCLUSIVE),
    ((T, N, T, T, T), INCONCLUSIVE),
    ((T, T, T, T, F), INCONCLUSIVE),
    ((T, T, T, T, N), INCONCLUSIVE),
    ((N, N, N, N, N), INCONCLUSIVE),
]


@pytest.mark.parametrize("values, expected", CONCLUSION_TABLE)
def test_conclusion_truth_table(values, expected):
    assert conclude(Verdicts(**dict(zip(FLAGS, values)))) == expected


def test_verdicts_reject_unknown_fields():
    with pytest.raises(ValueError):
        Verdicts(stable=True)


@pytest.mark.parametrize("name", CONFIG_FILES)
def test_config_files_round_trip(name):
    config = load_config(os.path.join(CONFIG_DIR, name))
    again = parse_config(json.loads(config.canonical_json()))
    assert again == config
    assert again.config_hash() == config.config_hash()


def _base_config():
    with open(os.path.join(CONFIG_DIR, "burgers.json"), "r", encoding="utf-8") as f:
        return json.load(f)


def _config_error(raw):
    with pytest.raises(ConfigError) as info:
        parse_config(raw)
    return info.value


def test_unknown_key_reports_path():
    raw = _base_config()
    raw["numerics"]["foo"] = 1
    error = _config_error(raw)
    assert error.message.startswith("配置校验失败")
    assert any(item["loc"] == "numerics.foo" for item in error.witness)


def test_invalid_configs_rejected():
    raw = _base_config()
    raw["numerics"]["profile_tol"] = 0
    assert any(item["loc"] == "numerics.profile_tol" for item in _config_error(raw).witness)

    raw = _base_config()
    raw["shock"]["closure"] = {"plus_state": [-1.0], "speed": 0.0}
    assert any(item["loc"].startswith("shock.closure") for item in _config_error(raw).witness)

    raw = _base_config()
    raw["model"] = {"name": "no_such_model"}
    assert any(item["loc"] == "model" for item in _config_error(raw).witness)

    raw = _base_config()
    raw["model"]["params"]["gamma"] = 1.4
    _config_error(raw)


def test_config_hash_ignores_key_order():
    raw = _base_config()
    reordered = dict(reversed(list(raw.items())))
    assert parse_config(raw).config_hash() == parse_config(reordered).config_hash()


def test_missing_config_exits_with_config_code(tmp_path):
    assert main(["lopatinski", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_missing_dependency_without_auto_resolve(tmp_path, capsys):
    code = main(["evans", "--config", os.path.join(CONFIG_DIR, "burgers.json"),
                 "--output", str(tmp_path), "--no-auto-resolve"])
    assert code == EXIT_FAILURE
    assert "solve-profile required" in capsys.readouterr().err


def test_spinodal_structure_check(tmp_path):
    code = main(["check-structure", "--config", os.path.join(CONFIG_DIR, "ns_spinodal.json"),
                 "--output", str(tmp_path)])
    assert code == EXIT_OK
    with open(tmp_path / "report.json", "r", encoding="utf-8") as f:
        report = json.load(f)
    assert report["stages"]["check-structure"]["success"] is True
    assert report["verdicts"]["structure_certified"] is False
    witnesses = [w for w in report["witnesses"] if w["stage"] == "check-structure"]
    assert [w["label"] for w in witnesses] == ["state_0"]
    assert report["conclusion"] == INCONCLUSIVE


def test_reports_are_deterministic(tmp_path):
    outputs = []
    for name in ("first", "second"):
        directory = tmp_path / name
        assert main(["lopatinski", "--config", os.path.join(CONFIG_DIR, "burgers.json"),
                     "--output", str(directory)]) == EXIT_OK
        outputs.append(directory)
    first, second = outputs
    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()
    csvs = sorted(p.name for p in first.glob("*.csv"))
    assert "lopatinski_scan.csv" in csvs
    for name in csvs:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_models_command(capsys):
    assert main(["models"]) == EXIT_OK
    assert "burgers" in capsys.readouterr().out


@pytest.mark.slow
def test_burgers_pipeline_sufficient(tmp_path):
    """Burgers 激波：谱、横截性与精化条件全部成立"""
    config = load_config(os.path.join(CONFIG_DIR, "burgers.json"))
    agent = StabilityPipelineAgent(config, str(tmp_path))
    report = agent.run(["check-structure", "solve-profile", "lopatinski", "evans", "low-freq"])
    assert not agent.failed_codes
    assert report.verdicts.structure_certified is True
    assert report.conclusion == SUFFICIENT_MET
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "profile.csv").exists()


def test_plot_command(tmp_path):
    assert main(["lopatinski", "--config", os.path.join(CONFIG_DIR, "burgers.json"),
                 "--output", str(tmp_path)]) == EXIT_OK
    assert main(["plot", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "charts" / "lopatinski_scan.png").exists()
    assert (tmp_path / "report.md").exists()
    assert (tmp_path / "report.html").exists()
    assert main(["plot", str(tmp_path / "missing")]) == EXIT_FAILURE


def test_agent_memory_records_every_task_without_timestamps():
    """执行记录只含任务ID与成败，依赖失败被跳过的任务同样记录"""
    agent = BaseAgent("memory")

    def broken():
        raise ProfileSolveError("剖面求解失败")

    agent.register_tool("a", lambda: 1)
    agent.register_tool("b", broken, depends_on=["a"])
    agent.register_tool("c", lambda: 3, depends_on=["b"])
    results = agent.execute_plan(agent.plan(["c"]))
    assert [results[k]["success"] for k in ("a", "b", "c")] == [True, False, False]
    assert agent.memory == [{"task": "a", "success": True}, {"task": "b", "success": False},
                            {"task": "c", "success": False}]
