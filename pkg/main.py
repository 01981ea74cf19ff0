"""
激波稳定性工作台服务入口

    python main.py                 # 按 HOST / PORT 启动 HTTP 服务
    python main.py --port 9000

分析任务请使用命令行 python -m app.cli。
"""
import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))


def main() -> int:
    """等价于 python -m app.cli serve，额外参数原样转交"""
    from app.cli import main as cli_main

    return cli_main(["serve", *sys.argv[1:]])


if __name__ == '__main__':
    sys.exit(main())
