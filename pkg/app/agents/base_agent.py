"""Agent基类模块 - 提供工具注册、依赖规划与计划执行"""
import logging
from typing import Any, Callable, Dict, List, Sequence

from app.utils.errors import DependencyError, WorkbenchError

logger = logging.getLogger(__name__)


class BaseAgent:
    """
    Agent基类，提供Agent的通用功能
    包括：记忆机制、工具注册、按依赖关系生成计划并逐项执行
    """

    def __init__(self, agent_name: str):
        """
        初始化Agent

        Args:
            agent_name: Agent名称
        """
        self.agent_name = agent_name
        self.memory: List[Dict[str, Any]] = []  # 执行记录
        self.tools: Dict[str, Callable[..., Any]] = {}  # 可用工具
        self.dependencies: Dict[str, List[str]] = {}  # 工具间依赖
        self.descriptions: Dict[str, str] = {}

    def add_memory(self, content: Dict[str, Any]):
        """
        添加记忆

        Args:
            content: 要存储的记忆内容（任务ID与是否成功）
        """
        self.memory.append(dict(content))

    def register_tool(self, tool_name: str, tool_func: Callable[..., Any], depends_on: Sequence[str] = (),
                      description: str = ""):
        """
        注册工具

        Args:
            tool_name: 工具名称
            tool_func: 工具函数
            depends_on: 依赖的工具名称
            description: 任务描述
        """
        self.tools[tool_name] = tool_func
        self.dependencies[tool_name] = list(depends_on)
        self.descriptions[tool_name] = description or tool_name

    def use_tool(self, tool_name: str, **kwargs) -> Any:
        """
        使用工具

        Args:
            tool_name: 工具名称
            **kwargs: 工具参数

        Returns:
            工具执行结果
        """
        if tool_name in self.tools:
            return self.tools[tool_name](**kwargs)
        raise ValueError(f"工具 {tool_name} 未注册")

    def resolve(self, tool_name: str) -> bool:
        """
        依赖缺失时的处理；返回 True 表示已就绪，False 表示需要把依赖加入计划

        子类可覆盖，例如从磁盘读取已有结果。
        """
        return False

    def plan(self, goals: Sequence[str], auto_resolve: bool = True) -> List[Dict[str, Any]]:
        """
        根据目标生成按依赖排序的执行计划

        Args:
            goals: 目标工具名称
            auto_resolve: 是否自动加入缺失的依赖

        Returns:
            任务计划列表

        Raises:
            DependencyError: 依赖缺失且不允许自动补全
        """
        ordered: List[str] = []

        def visit(name: str, requested: bool):
            if name in ordered:
                return
            if name not in self.tools:
                raise ValueError(f"工具 {name} 未注册")
            for dep in self.dependencies[name]:
                if dep in goals:
                    visit(dep, True)
                elif not self.resolve(dep):
                    if not auto_resolve:
                        raise DependencyError(f"{dep} required：阶段 {name} 依赖 {dep}，且未开启自动补全",
                                              witness={"stage": name, "missing": dep})
                    visit(dep, False)
            ordered.append(name)
            if not requested:
                logger.info("自动补全依赖阶段: %s", name)

        for goal in goals:
            visit(goal, True)
        return [{"id": name, "description": self.descriptions[name], "tool": name, "tool_params": {},
                 "depends_on": [d for d in self.dependencies[name] if d in ordered]} for name in ordered]

    def execute_plan(self, plan: List[Dict[str, Any]]) -> Dict[str, Any]:
        """
        执行计划；阶段失败被记录而不向上抛出，依赖失败的阶段不再执行

        Args:
            plan: 任务计划列表

        Returns:
            {任务ID: {success, result | error, code, description}}
        """
        results: Dict[str, Any] = {}

        for task in plan:
            task_id = task.get('id', 'unknown')
            description = task.get('description', '')
            failed = [d for d in task.get('depends_on', []) if not results.get(d, {}).get("success", False)]
            if failed:
                results[task_id] = {"success": False, "error": f"依赖阶段失败: {', '.join(failed)}",
                                    "code": DependencyError.code, "description": description}
                logger.warning("跳过任务 %s：依赖阶段 %s 失败", task_id, failed)
                self.add_memory({"task": task_id, "success": False})
                continue

            logger.info("执行任务 %s: %s", task_id, description)
            try:
                result = self.use_tool(task['tool'], **task.get('tool_params', {}))
                results[task_id] = {"success": True, "result": result, "description": description}
            except WorkbenchError as exc:
                results[task_id] = {"success": False, **exc.to_dict(), "description": description}
                logger.error("任务 %s 执行失败 [%d]: %s", task_id, exc.code, exc.message)
            except Exception as exc:  # 数值库内部异常同样记为阶段失败
                results[task_id] = {"success": False, "error": f"{type(exc).__name__}: {exc}", "code": 5000,
                                    "description": description}
                logger.exception("任务 %s 执行异常", task_id)
            self.add_memory({"task": task_id, "success": results[task_id]["success"]})

        return results
