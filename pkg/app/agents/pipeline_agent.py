"""稳定性分析流水线 Agent - 按依赖顺序执行各阶段并汇总报告"""
import hashlib
import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from app.agents.base_agent import BaseAgent
from app.analysis.evans import EvansFunction, high_frequency_radius, limiting_splitting, spectral_verdict
from app.analysis.inviscid_stability import GlancingSet, glancing_set, lopatinski_scan
from app.analysis.low_frequency import analyze_low_frequency, branch_expansion
from app.analysis.profile_solver import ShockProfile, ShockTriple, shock_from_closure, solve_profile
from app.analysis.structure_checks import structure_certificate
from app.analysis.timeevolution import (discrete_spectrum_and_resolvent, endpoint_decay, evolve_linearized_mode,
                                        evolve_nonlinear_1d)
from app.dao import ModelCatalogDAO, ProfileDAO, ReportDAO
from app.schemas.config_schemas import STAGES, AnalysisConfig, LinearRunConfig
from app.schemas.report_schemas import Provenance, StabilityReport, StageResult
from app.utils.errors import ConfigError, WorkbenchError
from app.utils.linalg import to_jsonable
from app.utils.plotdata import PlotBundle, emit_plotdata
from app.utils.report_writer import ReportWriter

logger = logging.getLogger(__name__)

STAGE_DESCRIPTIONS = {
    "check-structure": "端点结构证书：对称化、真耦合、补偿矩阵与耗散性",
    "solve-profile": "Rankine–Hugoniot 闭包与驻波剖面",
    "lopatinski": "无粘 Lopatinski 稳定性扫描与掠射集",
    "evans": "Evans 函数绕数与谱稳定性判定",
    "low-freq": "低频展开：ℓ、γ、β 与根追踪",
    "evolve": "线性化/非线性演化与常系数衰减",
}

STAGE_DEPENDENCIES = {
    "check-structure": [],
    "solve-profile": [],
    "lopatinski": [],
    "evans": ["solve-profile"],
    "low-freq": ["solve-profile", "lopatinski"],
    "evolve": ["solve-profile"],
}


class StabilityPipelineAgent(BaseAgent):
    """
    激波稳定性分析流水线

    各阶段注册为工具，plan 按依赖排序，execute_plan 记录阶段失败而不中断其余阶段。
    """

    def __init__(self, config: AnalysisConfig, output_dir: str, threads: int = 1):
        """
        Args:
            config: 已验证的分析配置
            output_dir: 报告目录
            threads: 频率网格扫描线程数
        """
        super().__init__("stability_pipeline")
        self.config = config
        self.output_dir = output_dir
        self.threads = max(1, int(threads))
        self.system = ModelCatalogDAO.create(config.model.name, config.model.params)
        self.triple: Optional[ShockTriple] = None
        self.profile: Optional[ShockProfile] = None
        self.scan = None
        self.glancing: Optional[List[GlancingSet]] = None
        self.glancing_states: List[np.ndarray] = []
        self.evans: Optional[EvansFunction] = None
        self.spectral = None
        self.low_frequency = None
        self.runs: List[Any] = []
        self.decay: List[Any] = []
        self.report = StabilityReport(
            provenance=Provenance(config_hash=config.config_hash(), seed=config.seed),
            model={"name": config.model.name, "params": config.model.params, "n": self.system.n,
                   "r": self.system.r, "d": self.system.d},
        )
        handlers = {
            "check-structure": self.check_structure,
            "solve-profile": self.solve_profile,
            "lopatinski": self.lopatinski,
            "evans": self.evans_stage,
            "low-freq": self.low_freq,
            "evolve": self.evolve,
        }
        for name in STAGES:
            self.register_tool(name, handlers[name], STAGE_DEPENDENCIES[name], STAGE_DESCRIPTIONS[name])

    # ------------------------------------------------------------------
    # 公共辅助
    # ------------------------------------------------------------------

    def _state(self, values: Sequence[float]) -> np.ndarray:
        """按 shock.variables 约定转换为守恒变量"""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.system.n,):
            raise ConfigError(f"状态维数 {values.size} 与模型 n = {self.system.n} 不符", witness=values)
        if self.config.shock.variables == "natural":
            return self.system.check_admissible(self.system.from_natural(values))
        return self.system.check_admissible(values)

    def profile_key(self) -> str:
        """决定剖面能否复用的配置摘要"""
        numerics = self.config.numerics
        payload = {"model": self.config.model.model_dump(mode="json"),
                   "shock": self.config.shock.model_dump(mode="json"),
                   "L": numerics.L, "tol": numerics.profile_tol, "grid_points": numerics.grid_points}
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def resolve_triple(self) -> ShockTriple:
        if self.triple is None:
            closure = self.config.shock.closure
            plus = self._state(closure.plus_state) if closure.plus_state is not None else None
            self.triple = shock_from_closure(self.system, self._state(self.config.shock.minus_state),
                                             speed=closure.speed, plus_state=plus, mach=closure.mach)
        return self.triple

    def resolve(self, tool_name: str) -> bool:
        """已有剖面（内存或输出目录中摘要一致的文件）时不重新求解"""
        if tool_name != "solve-profile":
            return False
        if self.profile is None:
            self.profile = ProfileDAO.load(self.output_dir, self.system, self.profile_key())
            if self.profile is not None:
                self.triple = self.profile.triple
        return self.profile is not None

    def _witness(self, stage: str, payload: Dict[str, Any]):
        self.report.witnesses.append(to_jsonable({"stage": stage, **payload}))

    # ------------------------------------------------------------------
    # 阶段
    # ------------------------------------------------------------------

    def check_structure(self) -> Dict[str, Any]:
        """结构证书：端点与附加状态"""
        states, notes = [], []
        if self.config.structure.include_endpoints:
            states.append(("U_minus", self._state(self.config.shock.minus_state)))
            try:
                states.append(("U_plus", self.resolve_triple().U_plus))
            except WorkbenchError as exc:
                notes.append(f"右端状态不可用: {exc.message}")
        for i, values in enumerate(self.config.structure.states):
            states.append((f"state_{i}", self._state(values)))
        if not states:
            raise ConfigError("structure 阶段没有可检验的状态")
        certificates = []
        for label, U in states:
            cert = structure_certificate(self.system, U, threads=self.threads)
            cert["label"] = label
            certificates.append(cert)
            coupling = cert.get("genuine_coupling", {})
            if not cert["passed"]:
                self._witness("check-structure", {"label": label, "state": cert["state"],
                                                  "genuine_coupling": coupling})
        passed = all(c["passed"] for c in certificates)
        self.report.verdicts.structure_certified = passed
        logger.info("结构检验: %d 个状态，全部通过=%s", len(certificates), passed)
        return {"passed": passed, "certificates": certificates, "notes": notes}

    def solve_profile(self) -> Dict[str, Any]:
        """闭包、分类与剖面边值问题"""
        triple = self.resolve_triple()
        numerics = self.config.numerics
        self.profile = solve_profile(self.system, triple, L=numerics.L, tol=numerics.profile_tol,
                                     grid_points=numerics.grid_points)
        ProfileDAO.save(self.profile, self.output_dir, self.profile_key())
        data = self.profile.metadata()
        data["decay_rate_agreement"] = list(self.profile.decay_rate_agreement())
        return data

    def lopatinski(self) -> Dict[str, Any]:
        """球面扫描；d ≥ 2 时先计算两端各特征族的掠射集"""
        triple = self.resolve_triple()
        numerics = self.config.numerics
        d = self.system.d
        self.glancing, self.glancing_states = [], []
        if d > 1:
            xi_grid = [xi for xi in self.config.xi_grid(d) if np.linalg.norm(xi) > 0] or [[1.0] + [0.0] * (d - 2)]
            for U in (triple.U_minus, triple.U_plus):
                for family in range(self.system.n):
                    gset = glancing_set(self.system, U, family, xi_grid, s=triple.s,
                                        samples=numerics.glancing_samples)
                    if gset.curves:
                        self.glancing.append(gset)
                        self.glancing_states.append(U)
        self.scan = lopatinski_scan(self.system, triple, points=numerics.lopatinski_points, threads=self.threads,
                                    glancing=self.glancing, glancing_tolerance=numerics.glancing_tolerance)
        self.report.verdicts.inviscid_weak = self.scan.weak_stable
        self.report.verdicts.inviscid_strong = self.scan.strong_stable
        for item in self.scan.unstable_witnesses:
            self._witness("lopatinski", item)
        data = self.scan.to_dict()
        data["glancing"] = [{"family": g.family, "points": len(g.points()), "multiplicities": g.multiplicities}
                            for g in self.glancing]
        return data

    def _evans_function(self) -> EvansFunction:
        if self.evans is None:
            self.evans = EvansFunction(self.profile, self.config.numerics.evans_method)
        return self.evans

    def evans_stage(self) -> Dict[str, Any]:
        """绕数判定、原点平移零点与极限矩阵分裂证书"""
        numerics = self.config.numerics
        evans = self._evans_function()
        d = self.system.d
        radius = numerics.contour_radius or high_frequency_radius(self.profile)
        self.spectral = spectral_verdict(self.profile, self.config.xi_grid(d), radius=radius,
                                         shift=numerics.contour_shift, initial_points=numerics.contour_points,
                                         max_points=numerics.contour_max_points, axis_points=numerics.axis_points,
                                         method=numerics.evans_method, threads=self.threads, evans=evans)
        self.report.verdicts.spectral_weak = self.spectral.weak_spectral
        self.report.verdicts.spectral_strong = self.spectral.strong_spectral
        for item in self.spectral.witnesses:
            self._witness("evans", item)
        data = self.spectral.to_dict()
        origin = evans.evaluate(np.zeros(d - 1), 0.0)
        data["D_origin"] = origin.to_dict()
        data["splitting"] = limiting_splitting(evans.system(np.zeros(d - 1), complex(radius))).to_dict()
        return data

    def low_freq(self) -> Dict[str, Any]:
        """低频分析；d ≥ 2 时附带首个掠射点处的分支展开"""
        numerics = self.config.numerics
        evans = self._evans_function()
        self.low_frequency = analyze_low_frequency(evans, self.scan, self.glancing,
                                                   gamma_rhos=numerics.gamma_rhos, beta_rhos=numerics.beta_rhos,
                                                   track_rhos=numerics.track_rhos,
                                                   glancing_tolerance=numerics.glancing_tolerance)
        report = self.low_frequency
        self.report.verdicts.structural = report.transversal
        self.report.verdicts.refined_weak = report.weak_refined
        self.report.verdicts.refined_strong = report.strong_refined
        for beta in report.beta:
            if beta.beta.real <= 0:
                self._witness("low-freq", beta.to_dict())
        data = report.to_dict()
        branches = []
        triple = self.resolve_triple()
        for gset, U in zip(self.glancing or [], self.glancing_states):
            xi, _, x1 = gset.curves[0][0]
            try:
                expansion = branch_expansion(self.system, U, gset.family, xi, x1, s=triple.s,
                                             seed=self.config.seed)
                branches.append(expansion.to_dict())
            except WorkbenchError as exc:
                branches.append({"family": gset.family, "xi_tilde": xi, **exc.to_dict()})
        data["branch_expansion"] = branches
        return data

    def evolve(self) -> Dict[str, Any]:
        """演化实验；未配置时运行一次默认的单模线性化演化"""
        evolution = self.config.evolution
        numerics = self.config.numerics
        linear = evolution.linear
        if not linear and not evolution.nonlinear and evolution.decay is None:
            linear = [LinearRunConfig()]
        runs, oracles, decays = [], [], []
        for item in linear:
            run = evolve_linearized_mode(self.profile, item.xi_tilde, initial=item.initial, T=item.T,
                                         nodes=item.nodes, check_refinement=item.check_refinement)
            self.runs.append(run)
            runs.append(run.to_dict())
            oracle = discrete_spectrum_and_resolvent(self.profile, item.xi_tilde, resolvent_at=[1.0 + 0j],
                                                     re_min=numerics.discrete_re_min,
                                                     nodes=numerics.discrete_nodes,
                                                     tolerance=numerics.discrete_tolerance)
            oracles.append(oracle.to_dict())
            if run.flags:
                self._witness("evolve", {"run": run.name, "flags": run.flags})
        for item in evolution.nonlinear:
            run = evolve_nonlinear_1d(self.system, self.profile, epsilon=item.epsilon, T=item.T,
                                      cells=item.cells, perturbation=item.perturbation)
            self.runs.append(run)
            runs.append(run.to_dict())
        if evolution.decay is not None:
            triple = self.resolve_triple()
            U = triple.U_plus if evolution.decay.endpoint == "plus" else triple.U_minus
            for d in evolution.decay.dimensions:
                experiment = endpoint_decay(self.system, U, d, T=evolution.decay.T, kind=evolution.decay.kind)
                self.decay.append(experiment)
                decays.append(experiment.to_dict())
        return {"runs": runs, "discrete_spectrum": oracles, "decay": decays}

    # ------------------------------------------------------------------
    # 执行与输出
    # ------------------------------------------------------------------

    def run(self, stages: Optional[Sequence[str]] = None) -> StabilityReport:
        """
        执行所请求的阶段并写出报告

        Args:
            stages: 阶段名称，默认取配置中的 stages

        Returns:
            StabilityReport

        Raises:
            DependencyError: 依赖缺失且 auto_resolve 关闭
        """
        goals = list(stages or self.config.stages)
        plan = self.plan(goals, auto_resolve=self.config.auto_resolve)
        logger.info("执行计划: %s", [task["id"] for task in plan])
        results = self.execute_plan(plan)
        for stage, outcome in results.items():
            if outcome["success"]:
                data = to_jsonable(outcome["result"])
            else:
                data = to_jsonable({k: outcome[k] for k in ("witness", "location") if k in outcome}) or None
            self.report.stages[stage] = StageResult(success=outcome["success"], code=outcome.get("code"),
                                                    error=outcome.get("error"), data=data)
        self.report.finalize()
        self.write_outputs()
        logger.info("分析完成，总体判定: %s", self.report.conclusion)
        return self.report

    def write_outputs(self) -> Dict[str, Any]:
        """report.json、CSV 绘图数据与 Markdown/HTML 报告"""
        bundle = PlotBundle(d=self.system.d, lopatinski=self.scan, glancing=self.glancing, spectral=self.spectral,
                            evans=self.evans, low_frequency=self.low_frequency, runs=self.runs, decay=self.decay)
        emitted = emit_plotdata(self.output_dir, bundle)
        text = self.report.to_json()
        ReportDAO.save(text, self.output_dir)
        ReportWriter(self.output_dir).convert_and_save(json.loads(text), emitted["written"])
        return emitted

    @property
    def failed_codes(self) -> List[int]:
        return [r.code or 5000 for r in self.report.stages.values() if not r.success]


def default_output_dir(config: AnalysisConfig, base: str) -> str:
    """配置未指定输出目录时按模型名与配置摘要生成"""
    if config.output_dir:
        return config.output_dir
    return os.path.join(base, f"{config.model.name}_{config.config_hash()[:12]}")


def confined_output_dir(config: AnalysisConfig, base: str) -> str:
    """
    HTTP 请求使用的报告目录

    配置中的 output_dir 按相对于 base 的路径解析，解析结果必须位于 base 之下。

    Raises:
        ConfigError: 路径为绝对路径、含 .. 或经符号链接越出 base
    """
    root = os.path.realpath(base)
    if not config.output_dir:
        return default_output_dir(config, root)
    target = os.path.realpath(os.path.join(root, config.output_dir))
    if os.path.isabs(config.output_dir) or target == root or os.path.commonpath([root, target]) != root:
        raise ConfigError(f"output_dir 必须是报告根目录 {root} 下的相对路径",
                          witness=[{"loc": "output_dir", "msg": "路径越出报告根目录"}])
    return target
