import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, asdict, replace
from datetime import datetime
from typing import Any, Dict, List, Optional

import numpy as np

from edgepose.pipeline.pipeline_runner import PipelineRunner
from edgepose.pose.pose_error import PoseError, match_to_truth, pose_error
from edgepose.rules.acceptance_rules import AcceptanceEngine, TrialStatus
from edgepose.scene.scene_generator import SceneSpec, gen_clutter_scene
from edgepose.utils.params import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class TrialResult:
    """Result for a single seeded scene"""
    seed: int
    status: str  # TrialStatus value
    summary: str
    points: int = 0
    segments: int = 0
    poses: int = 0
    rotation_error_deg: Optional[float] = None
    translation_error_m: Optional[float] = None
    initial_rotation_error_deg: Optional[float] = None
    corner_count: int = 0
    edge_support: int = 0
    edge_points_s: float = 0.0
    all_edges_s: float = 0.0
    model_fitting_s: float = 0.0
    error_message: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class EvaluationReport:
    """Overall evaluation report"""
    kind: str
    trials: int
    passed: int
    status: str
    summary: str
    start_time: str
    duration_seconds: float
    mean_rotation_error_deg: Optional[float] = None
    mean_initial_rotation_error_deg: Optional[float] = None
    trial_results: List[TrialResult] = None

    def __post_init__(self):
        if self.trial_results is None:
            self.trial_results = []

    def to_dict(self) -> Dict[str, Any]:
        result = asdict(self)
        result["trial_results"] = [t.to_dict() for t in self.trial_results]
        return result


def _normalized_error(error: PoseError, engine: AcceptanceEngine) -> float:
    return max(error.rotation_deg / engine.rules["rotation_error"].pass_threshold,
               error.translation_m / engine.rules["translation_error"].pass_threshold)


def run_trial(scene: SceneSpec, config: RunConfig) -> TrialResult:
    """Generate one scene, run the pipeline and score the best-matching pose."""
    engine = AcceptanceEngine()
    try:
        cloud, truth = gen_clutter_scene(scene)
        result = PipelineRunner(config, dims=scene.dims).run(cloud)
    except Exception as e:
        return TrialResult(seed=scene.seed, status=TrialStatus.FAIL.value, summary="trial failed",
                           error_message=str(e))

    timings = result.timings
    trial = TrialResult(
        seed=scene.seed, status=TrialStatus.NO_POSE.value, summary="No pose estimated",
        points=len(cloud), segments=len(result.segments), poses=len(result.candidates),
        edge_points_s=timings.get("edge_points", 0.0), all_edges_s=timings.get("all_edges", 0.0),
        model_fitting_s=timings.get("model_fitting", 0.0),
    )
    best = None
    for candidate in result.candidates:
        match = match_to_truth(candidate.pose, truth.poses, scene.dims)
        if match is None:
            continue
        index, error = match
        score = _normalized_error(error, engine)
        if best is None or score < best[0]:
            best = (score, candidate, index, error)
    if best is None:
        return trial

    _, candidate, index, error = best
    status, summary = engine.evaluate_pose_error(error)
    trial.status = status.value
    trial.summary = summary
    trial.rotation_error_deg = round(error.rotation_deg, 6)
    trial.translation_error_m = round(error.translation_m, 9)
    initial = pose_error(candidate.initial, truth.poses[index], scene.dims)
    trial.initial_rotation_error_deg = round(initial.rotation_deg, 6)
    trial.corner_count = candidate.quality.corner_count
    trial.edge_support = candidate.quality.edge_support
    return trial


class BatchEvaluator:
    """Runs seeded trials with optional parallelization"""

    def __init__(self, scene: SceneSpec, config: RunConfig, trials: int = 10,
                 parallel: int = 1, kind: str = "isolated", verbose: bool = False):
        if trials < 1:
            raise ValueError(f"trials must be >= 1, got {trials}")
        self.scene = scene
        self.config = config
        self.trials = trials
        self.parallel = parallel
        self.kind = kind
        self.verbose = verbose
        self.results: List[TrialResult] = []

    def _scenes(self) -> List[SceneSpec]:
        return [replace(self.scene, seed=self.scene.seed + i) for i in range(self.trials)]

    def run_all(self) -> EvaluationReport:
        start_time = datetime.now()
        started = time.perf_counter()
        scenes = self._scenes()
        self.results = []

        if self.parallel > 1:
            with ProcessPoolExecutor(max_workers=self.parallel) as executor:
                futures = {executor.submit(run_trial, scene, self.config): scene.seed for scene in scenes}
                for future in as_completed(futures):
                    self.results.append(future.result())
        else:
            for idx, scene in enumerate(scenes):
                if self.verbose:
                    print(f"[{idx + 1}/{len(scenes)}] Trial seed {scene.seed}")
                self.results.append(run_trial(scene, self.config))

        # completion order is not deterministic with a pool
        self.results.sort(key=lambda r: r.seed)
        engine = AcceptanceEngine()
        status, summary = engine.evaluate_batch([TrialStatus(r.status) for r in self.results])
        rotations = [r.rotation_error_deg for r in self.results if r.rotation_error_deg is not None]
        initials = [r.initial_rotation_error_deg for r in self.results
                    if r.initial_rotation_error_deg is not None]
        report = EvaluationReport(
            kind=self.kind,
            trials=len(self.results),
            passed=sum(r.status == TrialStatus.PASS.value for r in self.results),
            status=status.value,
            summary=summary,
            start_time=start_time.isoformat(),
            duration_seconds=time.perf_counter() - started,
            mean_rotation_error_deg=float(np.mean(rotations)) if rotations else None,
            mean_initial_rotation_error_deg=float(np.mean(initials)) if initials else None,
            trial_results=self.results,
        )
        logger.info(f"Evaluation ({self.kind}): {summary}")
        return report


def report_to_json(report: EvaluationReport) -> str:
    return json.dumps(report.to_dict(), indent=2)
