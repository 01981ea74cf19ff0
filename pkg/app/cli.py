"""
命令行入口

    python -m app.cli full --config configs/burgers.json
    python -m app.cli evans --config configs/ns_mach105.json --no-auto-resolve
    python -m app.cli plot workspace/reports/burgers_0123456789ab

退出码：0 分析完成（与稳定性结论无关），1 计算失败或依赖缺失，2 配置错误
"""
import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence

from app.schemas.config_schemas import STAGES, load_config
from app.settings.config import config, setup_logging
from app.utils.errors import ConfigError, DependencyError, WorkbenchError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

STAGE_HELP = {
    "check-structure": "端点结构证书（对称化、真耦合、补偿矩阵、耗散性）",
    "solve-profile": "求解 Rankine–Hugoniot 闭包与粘性激波剖面",
    "lopatinski": "无粘 Lopatinski 行列式扫描与掠射集",
    "evans": "Evans 函数绕数判定（需要剖面）",
    "low-freq": "低频系数 γ、β 与根追踪（需要剖面与 Lopatinski 扫描）",
    "evolve": "线性化/非线性演化与常系数衰减实验（需要剖面）",
    "full": "按依赖顺序执行全部阶段",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shockbench", description="粘性激波稳定性分析工作台")
    parser.add_argument("--log-level", default=None, help=f"日志级别，默认 LOG_LEVEL（{config.LOG_LEVEL}）")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in STAGE_HELP.items():
        stage = sub.add_parser(name, help=text, description=text)
        stage.add_argument("--config", required=True, help="AnalysisConfig JSON 文件路径")
        stage.add_argument("--output", default=None,
                           help="报告目录，默认取配置 output_dir 或 <OUTPUT_DIR>/reports/<模型>_<摘要>")
        stage.add_argument("--threads", type=int, default=None,
                           help=f"网格扫描线程数，覆盖环境变量 SHOCK_NUM_THREADS（当前 {config.SHOCK_NUM_THREADS}）")
        stage.add_argument("--no-auto-resolve", action="store_true",
                           help="依赖阶段缺失时报错而不是自动执行")

    plot = sub.add_parser("plot", help="根据报告目录中的 CSV 绘制图表")
    plot.add_argument("report_dir", help="包含 report.json 与 CSV 的报告目录")

    serve = sub.add_parser("serve", help="启动 HTTP 服务")
    serve.add_argument("--host", default=config.HOST)
    serve.add_argument("--port", type=int, default=config.PORT)

    sub.add_parser("models", help="列出模型目录")
    return parser


def run_stages(command: str, args: argparse.Namespace) -> int:
    """执行分析阶段并返回退出码"""
    from app.agents.pipeline_agent import StabilityPipelineAgent, default_output_dir

    try:
        analysis = load_config(args.config)
    except ConfigError as exc:
        print(f"配置错误: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG
    if args.no_auto_resolve:
        analysis = analysis.model_copy(update={"auto_resolve": False})

    threads = args.threads if args.threads is not None else config.SHOCK_NUM_THREADS
    if threads < 1:
        print("配置错误: --threads 必须 ≥ 1", file=sys.stderr)
        return EXIT_CONFIG
    output_dir = args.output or default_output_dir(analysis, os.path.join(config.OUTPUT_DIR, "reports"))
    stages: List[str] = list(STAGES) if command == "full" else [command]

    try:
        agent = StabilityPipelineAgent(analysis, output_dir, threads)
        report = agent.run(stages)
    except DependencyError as exc:
        print(f"依赖缺失: {exc.message}", file=sys.stderr)
        return EXIT_FAILURE
    except ConfigError as exc:
        print(f"配置错误: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG
    except WorkbenchError as exc:
        print(f"计算失败 [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_FAILURE

    print(f"报告目录: {output_dir}")
    for name, result in report.stages.items():
        status = "成功" if result.success else f"失败 [{result.code}] {result.error}"
        print(f"  {name}: {status}")
    print(f"结论: {report.conclusion}")

    codes = agent.failed_codes
    if not codes:
        return EXIT_OK
    if all(code == ConfigError.code for code in codes):
        return EXIT_CONFIG
    return EXIT_FAILURE


def run_plot(report_dir: str) -> int:
    from app.utils.chart_generator import ChartGenerator

    if not os.path.isdir(report_dir):
        print(f"报告目录不存在: {report_dir}", file=sys.stderr)
        return EXIT_FAILURE
    charts = ChartGenerator(os.path.join(report_dir, "charts")).generate_all(report_dir)
    for path in charts:
        print(path)
    return EXIT_OK


def run_serve(host: str, port: int) -> int:
    import uvicorn

    print(f"服务地址: http://{host}:{port}")
    print(f"API文档: http://{host}:{port}/docs")
    uvicorn.run("app:app", host=host, port=port, reload=config.DEBUG)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    if args.command == "plot":
        return run_plot(args.report_dir)
    if args.command == "serve":
        return run_serve(args.host, args.port)
    if args.command == "models":
        from app.dao import ModelCatalogDAO
        for entry in ModelCatalogDAO.describe():
            print(f"{entry['name']}: {entry['description']}")
        return EXIT_OK
    return run_stages(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
