"""报告文档工具模块 - 稳定性报告的 Markdown 渲染与 HTML 转换"""
import json
import logging
import os
from typing import Any, Dict, List

import markdown

logger = logging.getLogger(__name__)

STAGE_TITLES = {
    "check-structure": "结构检验",
    "solve-profile": "剖面求解",
    "lopatinski": "无粘 Lopatinski 稳定性",
    "evans": "Evans 函数谱判定",
    "low-freq": "低频分析",
    "evolve": "时间演化",
}

VERDICT_TITLES = {
    "structure_certified": "端点结构证书",
    "structural": "横截性 γ ≠ 0",
    "inviscid_weak": "弱 Lopatinski 稳定",
    "inviscid_strong": "强 Lopatinski 稳定",
    "spectral_weak": "弱谱稳定",
    "spectral_strong": "强谱稳定",
    "refined_weak": "弱精化稳定",
    "refined_strong": "强精化稳定",
}

HTML_TEMPLATE = """<!DOCTYPE html>
<html>
<head>
    <meta charset="UTF-8">
    <title>激波稳定性分析报告</title>
    <style>
        body {{ font-family: 'Arial', sans-serif; line-height: 1.6; color: #333; max-width: 900px;
               margin: 0 auto; padding: 20px; }}
        h1, h2, h3 {{ color: #2c3e50; border-bottom: 1px solid #eee; padding-bottom: 10px; }}
        pre {{ background-color: #f5f5f5; padding: 15px; border-radius: 5px; overflow-x: auto; }}
        table {{ border-collapse: collapse; width: 100%; margin: 20px 0; }}
        th, td {{ border: 1px solid #ddd; padding: 8px 12px; text-align: left; }}
        th {{ background-color: #f2f2f2; }}
    </style>
</head>
<body>
{body}
</body>
</html>
"""


def _mark(value: Any) -> str:
    if value is None:
        return "—"
    return "✔" if value else "✘"


class ReportWriter:
    """
    报告写出工具类：Markdown 正文与 HTML 版本
    """

    def __init__(self, output_dir: str):
        """
        Args:
            output_dir: 报告目录
        """
        self.output_dir = output_dir
        os.makedirs(self.output_dir, exist_ok=True)

    def render(self, report: Dict[str, Any], files: List[str]) -> str:
        """
        把报告字典渲染为 Markdown

        Args:
            report: StabilityReport 的 JSON 形式
            files: 已写出的数据文件名
        """
        provenance = report.get("provenance", {})
        lines = ["# 激波稳定性分析报告", "", "[TOC]", "",
                 f"**总体判定：{report.get('conclusion', '')}**", "",
                 "## 判定", "", "| 条件 | 结论 |", "|---|---|"]
        for key, title in VERDICT_TITLES.items():
            lines.append(f"| {title} | {_mark(report.get('verdicts', {}).get(key))} |")
        lines += ["", "## 阶段", "", "| 阶段 | 状态 | 说明 |", "|---|---|---|"]
        for stage, result in report.get("stages", {}).items():
            status = "完成" if result.get("success") else f"失败 ({result.get('code')})"
            lines.append(f"| {STAGE_TITLES.get(stage, stage)} | {status} | {result.get('error') or ''} |")
        if report.get("witnesses"):
            lines += ["", "## 见证", "", "```json",
                      json.dumps(report["witnesses"], ensure_ascii=False, indent=2, sort_keys=True), "```"]
        lines += ["", "## 来源", "", f"- 配置摘要: `{provenance.get('config_hash', '')}`",
                  f"- 随机种子: {provenance.get('seed', '')}"]
        for name, version in sorted(provenance.get("versions", {}).items()):
            lines.append(f"- {name} {version}")
        if files:
            lines += ["", "## 数据文件", ""] + [f"- `{name}`" for name in files]
        return "\n".join(lines) + "\n"

    def markdown_to_file(self, markdown_content: str, filename: str = "report.md") -> str:
        """保存 Markdown 文件"""
        file_path = os.path.join(self.output_dir, filename)
        with open(file_path, 'w', encoding='utf-8') as f:
            f.write(markdown_content)
        logger.info("Markdown 报告已保存: %s", file_path)
        return file_path

    def markdown_to_html(self, markdown_content: str, filename: str = "report.html") -> str:
        """将 Markdown 内容转换为 HTML 文件"""
        body = markdown.markdown(markdown_content, extensions=[
            'fenced_code',  # 支持代码块
            'tables',       # 支持表格
            'toc',          # 支持目录
        ])
        file_path = os.path.join(self.output_dir, filename)
        with open(file_path, 'w', encoding='utf-8') as f:
            f.write(HTML_TEMPLATE.format(body=body))
        logger.info("HTML 报告已生成: %s", file_path)
        return file_path

    def convert_and_save(self, report: Dict[str, Any], files: List[str]) -> Dict[str, str]:
        """
        一步完成 Markdown 渲染、保存与 HTML 转换

        Returns:
            包含 md_path 和 html_path 的字典
        """
        content = self.render(report, files)
        return {"md_path": self.markdown_to_file(content), "html_path": self.markdown_to_html(content)}
