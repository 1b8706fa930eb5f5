"""
Synthetic cuboid scenes with ground truth.

Faces are grid-sampled at a fixed pitch in the local frame, faces turned
away from the camera are culled, and isotropic Gaussian noise is added in
the camera frame. Every point carries its cuboid id, face id and its nominal
distance to the nearest border of its face.

Face ids: 0 +x, 1 -x, 2 +y, 3 -y, 4 +z, 5 -z (local frame).
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation

from edgepose.parser.pointcloud import PointCloud
from edgepose.pose.geometry import boxes_overlap
from edgepose.pose.types import CuboidDims, Pose

logger = logging.getLogger(__name__)

FACE_AXES: Tuple[Tuple[int, float], ...] = ((0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0), (2, 1.0), (2, -1.0))
TOP_FACE = 4

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


class PlacementError(ValueError):
    """The requested cuboids do not fit in the position box."""


@dataclass
class SceneSpec:
    dims: CuboidDims
    count: int = 1
    position_lower: Tuple[float, float, float] = (-0.15, -0.15, 0.6)
    position_upper: Tuple[float, float, float] = (0.15, 0.15, 0.9)
    max_tilt_deg: float = 15.0
    pitch: float = 0.002
    noise: float = 0.0
    camera: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    seed: int = 0
    min_gap: float = 0.03
    max_attempts: int = 1000

    def __post_init__(self):
        if not isinstance(self.dims, CuboidDims):
            self.dims = CuboidDims.from_sequence(self.dims)
        self.position_lower = tuple(float(v) for v in self.position_lower)
        self.position_upper = tuple(float(v) for v in self.position_upper)
        self.camera = tuple(float(v) for v in self.camera)
        if not self.pitch > 0:
            raise ValueError(f"pitch must be positive, got {self.pitch}")
        if self.noise < 0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")
        if any(lo > hi for lo, hi in zip(self.position_lower, self.position_upper)):
            raise ValueError("position box lower bound exceeds upper bound")
        if not 0 <= self.max_tilt_deg <= 90:
            raise ValueError(f"max_tilt_deg must lie in [0, 90], got {self.max_tilt_deg}")
        if self.min_gap < 0 or self.max_attempts < 1:
            raise ValueError("min_gap must be >= 0 and max_attempts >= 1")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], **overrides) -> 'SceneSpec':
        values = dict(
            dims=data.get('dims'),
            count=int(data.get('count', 1)),
            position_lower=tuple(data.get('position_lower', (-0.15, -0.15, 0.6))),
            position_upper=tuple(data.get('position_upper', (0.15, 0.15, 0.9))),
            max_tilt_deg=float(data.get('max_tilt_deg', 15.0)),
            pitch=float(data.get('pitch', 0.002)),
            noise=float(data.get('noise', 0.0)),
            camera=tuple(data.get('camera', (0.0, 0.0, 0.0))),
            seed=int(data.get('seed', 0)),
            min_gap=float(data.get('min_gap', 0.03)),
            max_attempts=int(data.get('max_attempts', 1000)),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        if values['dims'] is None:
            raise ValueError("scene needs cuboid dims")
        return cls(**values)


@dataclass
class SurfaceLabels:
    cuboid_id: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    face_id: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    border_distance: np.ndarray = field(default_factory=lambda: np.zeros(0))
    pitch: float = 0.002

    def __post_init__(self):
        self.cuboid_id = np.asarray(self.cuboid_id, dtype=np.int64)
        self.face_id = np.asarray(self.face_id, dtype=np.int64)
        self.border_distance = np.asarray(self.border_distance, dtype=np.float64)
        if not (len(self.cuboid_id) == len(self.face_id) == len(self.border_distance)):
            raise ValueError("label arrays must have the same length")

    def __len__(self) -> int:
        return int(self.cuboid_id.shape[0])

    @property
    def boundary(self) -> np.ndarray:
        """Within one pitch of a face border."""
        return self.border_distance <= self.pitch + 1e-12

    def interior(self, guard: float) -> np.ndarray:
        return self.border_distance > guard

    @classmethod
    def concat(cls, parts: Sequence['SurfaceLabels'], pitch: float) -> 'SurfaceLabels':
        if not parts:
            return cls(pitch=pitch)
        return cls(
            cuboid_id=np.concatenate([p.cuboid_id for p in parts]),
            face_id=np.concatenate([p.face_id for p in parts]),
            border_distance=np.concatenate([p.border_distance for p in parts]),
            pitch=pitch,
        )


def rle_encode(values: np.ndarray) -> List[List[int]]:
    """[[value, run length], ...]"""
    values = np.asarray(values).astype(np.int64)
    if values.size == 0:
        return []
    change = np.flatnonzero(np.diff(values)) + 1
    starts = np.concatenate([[0], change])
    lengths = np.diff(np.concatenate([starts, [values.size]]))
    return [[int(values[s]), int(n)] for s, n in zip(starts, lengths)]


def rle_decode(runs: Sequence[Sequence[int]]) -> np.ndarray:
    if not runs:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate([np.full(int(n), int(v), dtype=np.int64) for v, n in runs])


@dataclass
class SceneGroundTruth:
    dims: CuboidDims
    poses: List[Pose]
    labels: SurfaceLabels
    noise: float = 0.0
    seed: int = 0

    @property
    def boundary(self) -> np.ndarray:
        return self.labels.boundary

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dims": self.dims.to_list(),
            "pitch": self.labels.pitch,
            "noise": self.noise,
            "seed": self.seed,
            "poses": [p.to_dict() for p in self.poses],
            "labels": {
                "cuboid_id": rle_encode(self.labels.cuboid_id),
                "face_id": rle_encode(self.labels.face_id),
                "boundary": rle_encode(self.labels.boundary),
            },
            "border_distance": [round(float(v), 6) for v in self.labels.border_distance],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SceneGroundTruth':
        labels = SurfaceLabels(
            cuboid_id=rle_decode(data["labels"]["cuboid_id"]),
            face_id=rle_decode(data["labels"]["face_id"]),
            border_distance=np.array(data["border_distance"], dtype=np.float64),
            pitch=float(data["pitch"]),
        )
        return cls(
            dims=CuboidDims.from_sequence(data["dims"]),
            poses=[Pose.from_dict(p) for p in data["poses"]],
            labels=labels,
            noise=float(data.get("noise", 0.0)),
            seed=int(data.get("seed", 0)),
        )

    def save(self, path: str):
        with open(path, 'w') as f:
            f.write(self.to_json())

    @classmethod
    def load(cls, path: str) -> 'SceneGroundTruth':
        with open(path, 'r') as f:
            return cls.from_dict(json.load(f))


def _as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def face_grid(dims: CuboidDims, face: int, pitch: float) -> Tuple[np.ndarray, np.ndarray]:
    """Local-frame grid samples of one face and their distance to the face border."""
    axis, sign = FACE_AXES[face]
    u_axis, v_axis = [a for a in range(3) if a != axis]
    half = dims.half
    nu = int(round(2 * half[u_axis] / pitch)) + 1
    nv = int(round(2 * half[v_axis] / pitch)) + 1
    uu, vv = np.meshgrid(np.linspace(-half[u_axis], half[u_axis], nu),
                         np.linspace(-half[v_axis], half[v_axis], nv), indexing='ij')
    points = np.zeros((nu * nv, 3))
    points[:, axis] = sign * half[axis]
    points[:, u_axis] = uu.ravel()
    points[:, v_axis] = vv.ravel()
    border = np.minimum(half[u_axis] - np.abs(uu), half[v_axis] - np.abs(vv)).ravel()
    return points, np.maximum(border, 0.0)


def visible_faces(dims: CuboidDims, pose: Pose, camera: Sequence[float] = (0.0, 0.0, 0.0)) -> List[int]:
    """Faces whose outward normal has a positive dot with the direction to the camera."""
    camera = np.asarray(camera, dtype=np.float64)
    faces = []
    for face, (axis, sign) in enumerate(FACE_AXES):
        normal = sign * pose.rotation[:, axis]
        center_local = np.zeros(3)
        center_local[axis] = sign * dims.half[axis]
        center = pose.apply(center_local)
        if float(normal @ (camera - center)) > 0:
            faces.append(face)
    return faces


def _sample_faces(dims: CuboidDims, pose: Pose, faces: Sequence[int], pitch: float, noise: float,
                  rng: np.random.Generator, cuboid_id: int) -> Tuple[np.ndarray, SurfaceLabels]:
    local_parts, border_parts, face_parts = [], [], []
    for face in faces:
        local, border = face_grid(dims, face, pitch)
        local_parts.append(local)
        border_parts.append(border)
        face_parts.append(np.full(len(local), face, dtype=np.int64))
    if not local_parts:
        return np.zeros((0, 3)), SurfaceLabels(pitch=pitch)
    points = pose.apply(np.vstack(local_parts))
    if noise > 0:
        points = points + rng.normal(0.0, noise, size=points.shape)
    labels = SurfaceLabels(
        cuboid_id=np.full(len(points), cuboid_id, dtype=np.int64),
        face_id=np.concatenate(face_parts),
        border_distance=np.concatenate(border_parts),
        pitch=pitch,
    )
    return points, labels


def sample_cuboid_surface(dims: CuboidDims, pose: Pose, pitch: float = 0.002, noise: float = 0.0,
                          camera: Sequence[float] = (0.0, 0.0, 0.0), seed: SeedLike = 0,
                          cuboid_id: int = 0) -> Tuple[PointCloud, SurfaceLabels]:
    if not pitch > 0:
        raise ValueError(f"pitch must be positive, got {pitch}")
    if noise < 0:
        raise ValueError(f"noise must be >= 0, got {noise}")
    faces = visible_faces(dims, pose, camera)
    points, labels = _sample_faces(dims, pose, faces, pitch, noise, _as_rng(seed), cuboid_id)
    logger.debug(f"Cuboid {cuboid_id}: faces {faces}, {len(points)} points")
    return PointCloud(points=points), labels


def random_rotation(rng: np.random.Generator, max_tilt_deg: float) -> np.ndarray:
    """Tilt about a random horizontal axis, after a uniform yaw, after a half-turn about x."""
    yaw = rng.uniform(0.0, 2.0 * math.pi)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    tilt = math.radians(rng.uniform(0.0, max_tilt_deg))
    tilt_rot = Rotation.from_rotvec(tilt * np.array([math.cos(heading), math.sin(heading), 0.0]))
    yaw_rot = Rotation.from_rotvec([0.0, 0.0, yaw])
    flip = Rotation.from_rotvec([math.pi, 0.0, 0.0])
    return (tilt_rot * yaw_rot * flip).as_matrix()


def place_cuboids(spec: SceneSpec, rng: np.random.Generator) -> List[Pose]:
    """Rejection-sample non-overlapping poses (boxes inflated by half the minimum gap)."""
    inflated = spec.dims.half + spec.min_gap / 2.0
    lower = np.asarray(spec.position_lower)
    upper = np.asarray(spec.position_upper)
    poses: List[Pose] = []
    for i in range(spec.count):
        for _ in range(spec.max_attempts):
            position = rng.uniform(lower, upper)
            rotation = random_rotation(rng, spec.max_tilt_deg)
            if not any(boxes_overlap(rotation, position, inflated, p.rotation, p.translation, inflated)
                       for p in poses):
                poses.append(Pose(rotation, position))
                break
        else:
            raise PlacementError(
                f"could not place cuboid {i + 1} of {spec.count} after {spec.max_attempts} attempts")
    return poses


def gen_clutter_scene(spec: SceneSpec) -> Tuple[PointCloud, SceneGroundTruth]:
    """Scene of ``spec.count`` cuboids; deterministic for a given seed."""
    children = np.random.SeedSequence(spec.seed).spawn(spec.count + 1)
    poses = place_cuboids(spec, np.random.default_rng(children[0]))
    clouds, labels = [], []
    for i, pose in enumerate(poses):
        cloud, part = sample_cuboid_surface(spec.dims, pose, spec.pitch, spec.noise, spec.camera,
                                            seed=children[i + 1], cuboid_id=i)
        clouds.append(cloud.points)
        labels.append(part)
    points = np.vstack(clouds) if clouds else np.zeros((0, 3))
    truth = SceneGroundTruth(dims=spec.dims, poses=poses, labels=SurfaceLabels.concat(labels, spec.pitch),
                             noise=spec.noise, seed=spec.seed)
    logger.info(f"Generated {spec.count} cuboids, {len(points)} points (seed {spec.seed})")
    return PointCloud(points=points, source=f"synthetic:seed={spec.seed}"), truth


def sample_planar_grid(size: float = 0.2, pitch: float = 0.002, noise: float = 0.0, distance: float = 0.75,
                       seed: SeedLike = 0) -> Tuple[PointCloud, SceneGroundTruth]:
    """Square plate of side ``size`` facing the camera at ``distance`` along z; only its front face."""
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance}")
    dims = CuboidDims(size, size, pitch)
    flip = Rotation.from_rotvec([math.pi, 0.0, 0.0]).as_matrix()
    pose = Pose(flip, [0.0, 0.0, distance + pitch / 2.0])
    points, labels = _sample_faces(dims, pose, [TOP_FACE], pitch, noise, _as_rng(seed), 0)
    seed_value = seed if isinstance(seed, int) else 0
    truth = SceneGroundTruth(dims=dims, poses=[pose], labels=labels, noise=noise, seed=seed_value)
    return PointCloud(points=points, source="synthetic:plane"), truth
