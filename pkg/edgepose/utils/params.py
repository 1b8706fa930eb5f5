"""
Parameter dataclasses shared by the pipeline stages.

Every dataclass validates its invariants on construction and can be built
from the merged YAML configuration via ``from_dict``.
"""

import os
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Tuple


@dataclass
class EdgeParams:
    """Edge classification parameters (scoring radius, threshold, min neighbors)."""
    radius: float = 0.02
    threshold: float = 0.35
    min_neighbors: int = 3

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"edge radius must be positive, got {self.radius}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"edge threshold must lie in [0, 1], got {self.threshold}")
        if self.min_neighbors < 1:
            raise ValueError(f"min_neighbors must be >= 1, got {self.min_neighbors}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EdgeParams':
        return cls(
            radius=float(data.get('radius', 0.02)),
            threshold=float(data.get('threshold', 0.35)),
            min_neighbors=int(data.get('min_neighbors', 3)),
        )


@dataclass
class ExtractParams:
    """RANSAC and segment-loop parameters."""
    ransac_threshold: float = 0.01
    max_iterations: int = 1000
    min_inliers: int = 30
    min_inliers_floor: int = 10
    max_segments: int = 64
    radius: float = 0.02

    def __post_init__(self):
        if not self.ransac_threshold > 0:
            raise ValueError(f"ransac threshold must be positive, got {self.ransac_threshold}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.min_inliers < 2 or self.min_inliers_floor < 2:
            raise ValueError("min inliers must be >= 2")
        if self.max_segments < 1:
            raise ValueError(f"max_segments must be >= 1, got {self.max_segments}")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def min_inliers_for(self, n_points: int) -> int:
        # real-scale clouds use min_inliers; small clouds scale down to 1% with a floor
        return min(self.min_inliers, max(self.min_inliers_floor, n_points // 100))

    @classmethod
    def from_dict(cls, data: Dict[str, Any], radius: float = 0.02) -> 'ExtractParams':
        return cls(
            ransac_threshold=float(data.get('ransac_threshold', 0.01)),
            max_iterations=int(data.get('max_iterations', 1000)),
            min_inliers=int(data.get('min_inliers', 30)),
            min_inliers_floor=int(data.get('min_inliers_floor', 10)),
            max_segments=int(data.get('max_segments', 64)),
            radius=float(data.get('radius', radius)),
        )


@dataclass
class PoseParams:
    """Tolerances for clubbing, labelling and refinement."""
    orthogonality_tol: float = 0.1
    intersection_tol: float = 0.01
    dimension_rel_tol: float = 0.2
    refine_gate: float = 0.02
    grazing_tol: float = 0.05
    camera: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ('orthogonality_tol', 'intersection_tol', 'dimension_rel_tol',
                     'refine_gate', 'grazing_tol'):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        self.camera = tuple(float(c) for c in self.camera)
        if len(self.camera) != 3:
            raise ValueError("camera must have three coordinates")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PoseParams':
        return cls(
            orthogonality_tol=float(data.get('orthogonality_tol', 0.1)),
            intersection_tol=float(data.get('intersection_tol', 0.01)),
            dimension_rel_tol=float(data.get('dimension_rel_tol', 0.2)),
            refine_gate=float(data.get('refine_gate', 0.02)),
            grazing_tol=float(data.get('grazing_tol', 0.05)),
            camera=tuple(data.get('camera', (0.0, 0.0, 0.0))),
        )


@dataclass
class CropBox:
    """Axis-aligned pre-filter box, camera frame."""
    lower: Tuple[float, float, float]
    upper: Tuple[float, float, float]

    def __post_init__(self):
        self.lower = tuple(float(v) for v in self.lower)
        self.upper = tuple(float(v) for v in self.upper)
        if len(self.lower) != 3 or len(self.upper) != 3:
            raise ValueError("crop box needs three lower and three upper bounds")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"crop box lower bound exceeds upper bound: {self.lower} > {self.upper}")

    @classmethod
    def parse(cls, text: str) -> 'CropBox':
        values = [float(v) for v in text.replace(' ', '').split(',') if v]
        if len(values) != 6:
            raise ValueError(f"--crop expects 6 comma-separated numbers, got '{text}'")
        return cls(lower=tuple(values[:3]), upper=tuple(values[3:]))


@dataclass
class RunConfig:
    """Everything one CLI command needs to run a pipeline."""
    input_paths: List[str] = field(default_factory=list)
    output_dir: str = "edgepose_output"
    edge: EdgeParams = field(default_factory=EdgeParams)
    extract: ExtractParams = field(default_factory=ExtractParams)
    pose: PoseParams = field(default_factory=PoseParams)
    dims: Optional[Tuple[float, float, float]] = None
    seed: int = 0
    crop: Optional[CropBox] = None
    object_name: str = "custom"

    def __post_init__(self):
        for path in self.input_paths:
            if not os.path.exists(path):
                raise FileNotFoundError(path)
        if self.dims is not None:
            self.dims = tuple(float(d) for d in self.dims)
            if len(self.dims) != 3 or any(not d > 0 for d in self.dims):
                raise ValueError(f"dims must be three positive lengths, got {self.dims}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], **overrides) -> 'RunConfig':
        edge = EdgeParams.from_dict(data.get('edge', {}))
        extract = ExtractParams.from_dict(data.get('extract', {}), radius=edge.radius)
        crop = data.get('crop')
        values = dict(
            edge=edge,
            extract=extract,
            pose=PoseParams.from_dict(data.get('pose', {})),
            dims=tuple(data['dims']) if data.get('dims') else None,
            seed=int(data.get('seed', 0)),
            crop=CropBox(lower=crop[:3], upper=crop[3:]) if crop else None,
            object_name=data.get('object_name', 'custom'),
        )
        values.update(overrides)
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
