"""
Pipeline Runner for edgepose

Runs the pose workflow: edge points -> all edges -> model fitting, timing
each stage the same way so runs can be compared across radii and scenes.
"""

import json
import logging
import time
from dataclasses import dataclass, field, asdict, replace
from typing import Any, Dict, List, Optional

import numpy as np

from edgepose.analyzer.edge_detector import EdgeDetector, ScoredCloud
from edgepose.extractor.line_extractor import LineExtractor, LineSegment
from edgepose.index.kdtree import SpatialIndex
from edgepose.parser.pointcloud import PointCloud
from edgepose.pose.clubbing import EdgeGroup, club_all
from edgepose.pose.estimator import GroupDiagnostic, PoseCandidate, PoseEstimator
from edgepose.pose.types import CuboidDims
from edgepose.utils.params import RunConfig

logger = logging.getLogger(__name__)

STAGES = ("edge_points", "all_edges", "model_fitting")


@dataclass
class PipelineStep:
    """Represents a single pipeline step"""
    name: str
    status: str  # "pending", "running", "success", "failed", "skipped"
    output: Optional[str] = None
    error: Optional[str] = None
    duration_seconds: Optional[float] = None


@dataclass
class PipelineResult:
    """Complete pipeline execution result"""
    source: str
    point_count: int
    edge_cloud: PointCloud
    index_map: np.ndarray
    scored: ScoredCloud
    segments: List[LineSegment] = field(default_factory=list)
    groups: List[EdgeGroup] = field(default_factory=list)
    candidates: List[PoseCandidate] = field(default_factory=list)
    diagnostics: List[GroupDiagnostic] = field(default_factory=list)
    steps: List[PipelineStep] = field(default_factory=list)

    @property
    def timings(self) -> Dict[str, float]:
        return {s.name: s.duration_seconds or 0.0 for s in self.steps}

    @property
    def total_seconds(self) -> float:
        return float(sum(self.timings.values()))

    def summary(self) -> Dict[str, Any]:
        return {
            "source": self.source,
            "points": self.point_count,
            "edge_points": len(self.edge_cloud),
            "segments": len(self.segments),
            "groups": len(self.groups),
            "poses": len(self.candidates),
            "steps": [asdict(s) for s in self.steps],
        }

    def to_json(self) -> str:
        """Convert to JSON string"""
        return json.dumps(self.summary(), indent=2)


class PipelineRunner:
    """
    Runs the complete edgepose pipeline on one cloud.

    Workflow:
    1. Score every point and keep the edge points (optionally inside a crop box)
    2. Extract straight segments from the edge points
    3. Club segments per cuboid, fit and refine one pose per group
    """

    def __init__(self, config: RunConfig, dims: Optional[CuboidDims] = None, verbose: bool = False):
        self.config = config
        self.dims = dims if dims is not None else (
            CuboidDims.from_sequence(config.dims) if config.dims is not None else None)
        self.verbose = verbose
        self.steps: List[PipelineStep] = []

    def _add_step(self, step: PipelineStep):
        self.steps.append(step)
        if self.verbose:
            status_icon = {"success": "✓", "failed": "✗", "skipped": "⊘"}.get(step.status, "•")
            print(f"{status_icon} {step.name}: {step.status.upper()} ({step.duration_seconds or 0.0:.3f} s)")

    def _timed(self, name: str, action):
        step = PipelineStep(name=name, status="running")
        started = time.perf_counter()
        try:
            value, step.output = action()
            step.status = "success"
        except Exception as e:
            step.status = "failed"
            step.error = str(e)
            step.duration_seconds = time.perf_counter() - started
            self._add_step(step)
            raise RuntimeError(f"Stage {name} failed: {e}") from e
        step.duration_seconds = time.perf_counter() - started
        self._add_step(step)
        return value

    def run(self, cloud: PointCloud, stop_after: Optional[str] = None) -> PipelineResult:
        """Run the stages in order, stopping after ``stop_after`` when given."""
        if stop_after is not None and stop_after not in STAGES:
            raise ValueError(f"unknown stage '{stop_after}', expected one of {STAGES}")
        self.steps = []
        config = self.config
        logger.info(f"Running pipeline on {len(cloud)} points from {cloud.source or 'memory'}")

        def edge_points():
            edges, index_map, scored = EdgeDetector(config.edge).extract(cloud, crop=config.crop)
            return (edges, index_map, scored), f"{len(edges)} edge points"

        edges, index_map, scored = self._timed("edge_points", edge_points)
        result = PipelineResult(source=cloud.source, point_count=len(cloud), edge_cloud=edges,
                                index_map=index_map, scored=scored)

        if stop_after != "edge_points":
            def all_edges():
                segments = LineExtractor(config.extract).extract(edges, seed=config.seed)
                return segments, f"{len(segments)} segments"

            result.segments = self._timed("all_edges", all_edges)

        if stop_after is None or stop_after == "model_fitting":
            if self.dims is None:
                raise ValueError("model fitting needs cuboid dims")

            def model_fitting():
                groups = club_all(result.segments, config.pose)
                candidates, diagnostics = PoseEstimator(self.dims, config.pose).estimate(result.segments, groups)
                return (groups, candidates, diagnostics), f"{len(candidates)} poses"

            result.groups, result.candidates, result.diagnostics = self._timed("model_fitting", model_fitting)

        result.steps = list(self.steps)
        return result


def estimate_poses(cloud: PointCloud, dims: CuboidDims, config: Optional[RunConfig] = None,
                   seed: Optional[int] = None) -> List[PoseCandidate]:
    """Poses of the cuboids in ``cloud``, nearest the camera first (empty list when none)."""
    config = config or RunConfig()
    if seed is not None:
        config = replace(config, seed=seed)
    return PipelineRunner(config, dims=dims).run(cloud).candidates


def warm_up_kernels():
    """Compile the numba kernels on a tiny cloud so that later timings exclude JIT time."""
    rng = np.random.default_rng(0)
    cloud = PointCloud(points=rng.uniform(-0.05, 0.05, size=(64, 3)))
    index = SpatialIndex.build(cloud)
    EdgeDetector().score(cloud, index)
    index.knn(4)
    index.radius_neighbors_batch(0.02)
    LineExtractor().extract(cloud, seed=0)
