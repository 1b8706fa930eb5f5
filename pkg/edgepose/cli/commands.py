"""
Command implementations behind the ``edgepose`` subcommands.

Each ``cmd_*`` takes the parsed arguments and the merged configuration
(defaults, object profile, scene preset and user YAML), writes its files
into ``--output`` and returns the process exit code.
"""

import json
import logging
from typing import Any, Dict, List, Optional

import numpy as np

from edgepose.analyzer.edge_metrics import evaluate_edge_flags
from edgepose.extractor.line_extractor import segments_to_json
from edgepose.motion.waypoints import plan_pick_waypoints
from edgepose.parser.cloud_loader import load_cloud
from edgepose.parser.pointcloud import PointCloud
from edgepose.pipeline.baseline_comparison import compare_baseline, compare_on_scene
from edgepose.pipeline.batch_evaluator import BatchEvaluator, report_to_json
from edgepose.pipeline.pipeline_runner import PipelineRunner
from edgepose.pipeline.radius_sweep import sweep_radii
from edgepose.pose.estimator import poses_to_json
from edgepose.pose.types import CuboidDims
from edgepose.reporter.cloud_writer import (PointCategory, wireframe_points, write_annotated, write_pcd,
                                            write_ply)
from edgepose.reporter.report_generator import Reporter
from edgepose.rules.acceptance_rules import AcceptanceEngine
from edgepose.scene.scene_generator import SceneGroundTruth, SceneSpec, gen_clutter_scene, sample_planar_grid
from edgepose.utils.params import CropBox, RunConfig
from edgepose.utils.profile_loader import ProfileLoader, deep_merge

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NO_POSE = 4


def _banner(title: str) -> List[str]:
    return [
        "",
        "//================================\\\\",
        f"||{title:^32s}||",
        "\\\\================================//",
        "",
    ]


def _footer(paths: List[str]) -> List[str]:
    lines = ["", "//================================\\\\"]
    for path in paths:
        lines.append(f"   Output saved to : {path}")
    lines.extend(["\\\\================================//", ""])
    return lines


def _print(lines: List[str]):
    print("\n".join(lines))


def _arg(args, name: str, default=None):
    value = getattr(args, name, None)
    return default if value is None else value


def parse_point(text: str, name: str) -> List[float]:
    values = [v for v in text.replace(' ', '').split(',') if v]
    if len(values) != 3:
        raise ValueError(f"--{name} expects x,y,z, got '{text}'")
    return [float(v) for v in values]


def resolve_dims(args, config: Dict[str, Any], required: bool = True) -> Optional[CuboidDims]:
    """``--dims`` wins over the object profile; missing dims is a usage error when required."""
    if _arg(args, 'dims'):
        return CuboidDims.parse(args.dims)
    if config.get('dims'):
        return CuboidDims.from_sequence(config['dims'])
    if required:
        raise ValueError("cuboid dims are required: pass --dims L,B,H or --object <name>")
    return None


def build_run_config(args, config: Dict[str, Any]) -> RunConfig:
    """Merged config with CLI flag overrides applied."""
    data = deep_merge(config, {})
    if _arg(args, 'rs') is not None:
        data['edge']['radius'] = args.rs
        # RANSAC reference and extreme-point radius follow r_s
        data['extract'].pop('radius', None)
    if _arg(args, 'th') is not None:
        data['edge']['threshold'] = args.th
    if _arg(args, 'ransac_thresh') is not None:
        data['extract']['ransac_threshold'] = args.ransac_thresh
    dims = resolve_dims(args, data, required=False)
    data['dims'] = dims.to_list() if dims is not None else None

    overrides: Dict[str, Any] = {
        'output_dir': _arg(args, 'output', 'edgepose_output'),
        'seed': int(_arg(args, 'seed', data.get('seed', 0))),
    }
    if _arg(args, 'input'):
        overrides['input_paths'] = [args.input]
    if _arg(args, 'crop'):
        overrides['crop'] = CropBox.parse(args.crop)
    return RunConfig.from_dict(data, **overrides)


def _crop_map(cloud: PointCloud, crop: Optional[CropBox]) -> np.ndarray:
    if crop is None:
        return np.arange(len(cloud), dtype=np.int64)
    _, index_map = cloud.crop(crop.lower, crop.upper)
    return index_map


def _edge_labels(n: int, index_map: np.ndarray) -> List[PointCategory]:
    labels = [PointCategory.NON_EDGE] * n
    for i in index_map.tolist():
        labels[i] = PointCategory.EDGE
    return labels


# ---------------- gen-scene ----------------

def cmd_gen_scene(args, config: Dict[str, Any]) -> int:
    scene = dict(config.get('scene', {}))
    seed = int(_arg(args, 'seed', config.get('seed', 0)))
    noise = float(_arg(args, 'noise', scene.get('noise', 0.0)))

    if scene.get('kind') == 'plane':
        cloud, truth = sample_planar_grid(size=float(scene.get('size', 0.2)),
                                          pitch=float(scene.get('pitch', 0.002)), noise=noise,
                                          distance=float(scene.get('distance', 0.75)), seed=seed)
    else:
        dims = resolve_dims(args, config)
        spec = SceneSpec.from_dict(scene, dims=dims, count=_arg(args, 'count'), noise=noise, seed=seed)
        cloud, truth = gen_clutter_scene(spec)

    reporter = Reporter(_arg(args, 'output', 'edgepose_output'))
    if _arg(args, 'format', 'ply') == 'pcd':
        cloud_path = reporter.write_bytes("cloud.pcd", write_pcd(cloud))
    else:
        cloud_path = reporter.write_bytes("cloud.ply", write_ply(cloud))
    truth_path = reporter.write_json("truth.json", truth.to_json())

    lines = _banner("Synthetic Scene")
    lines.append(f"        Cuboids : {len(truth.poses)}")
    lines.append(f"           Dims : {truth.dims.to_list()}")
    lines.append(f"         Points : {len(cloud)}")
    lines.append(f"          Noise : {noise * 1000:.1f} mm")
    lines.append(f"           Seed : {seed}")
    lines.extend(_footer([cloud_path, truth_path]))
    _print(lines)
    return EXIT_OK


# ---------------- detect-edges ----------------

def cmd_detect_edges(args, config: Dict[str, Any]) -> int:
    run = build_run_config(args, config)
    cloud = load_cloud(args.input)
    reporter = Reporter(run.output_dir)
    verbose = bool(_arg(args, 'verbose', False))

    result = PipelineRunner(run, verbose=verbose).run(cloud, stop_after="edge_points")
    written = [
        reporter.write_bytes("edges_annotated.ply",
                             write_annotated(cloud, _edge_labels(len(cloud), result.index_map))),
        reporter.write_scores(result.scored, _crop_map(cloud, run.crop)),
        reporter.write_histogram(result.scored),
    ]

    lines = _banner("Edge Detection Report")
    lines.append(f"         Source : {cloud.source}")
    lines.append(f"         Points : {len(cloud)}")
    lines.append(f"    Edge points : {len(result.edge_cloud)}")
    lines.append(f"            r_s : {run.edge.radius:.3f} m")
    lines.append(f"      Threshold : {run.edge.threshold:.2f}")

    if _arg(args, 'truth'):
        truth = SceneGroundTruth.load(args.truth)
        if len(truth.labels) != len(cloud):
            raise ValueError(f"truth has {len(truth.labels)} labels for {len(cloud)} points")
        flags = np.zeros(len(cloud), dtype=bool)
        flags[result.index_map] = True
        metrics = evaluate_edge_flags(flags, truth.boundary, truth.labels.border_distance, run.edge.radius)
        status, summary = AcceptanceEngine().evaluate_edge_metrics(metrics)
        data = metrics.to_dict()
        data["status"] = status.value
        written.append(reporter.write_json("edge_metrics.json", json.dumps(data, indent=2)))
        lines.append("")
        lines.append(f"   [{status.value.upper()}] {summary}")

    if _arg(args, 'sweep', False):
        sweep = config.get('sweep', {})
        rows = sweep_radii(cloud, sweep.get('radii', (0.010, 0.015, 0.020, 0.025, 0.030)),
                           repeats=int(sweep.get('repeats', 3)), edge=run.edge)
        written.append(reporter.write_timings([r.to_dict() for r in rows], name="sweep_timings.csv"))
        lines.extend(_banner("Radius Sweep"))
        for row in rows:
            lines.append(f"   r_s {row.radius:.3f} : {row.seconds:8.4f} s  {row.edge_points:7d} edge points")

    lines.extend(_footer(written))
    _print(lines)
    return EXIT_OK


# ---------------- extract-lines ----------------

def cmd_extract_lines(args, config: Dict[str, Any]) -> int:
    run = build_run_config(args, config)
    cloud = load_cloud(args.input)
    reporter = Reporter(run.output_dir)

    result = PipelineRunner(run, verbose=bool(_arg(args, 'verbose', False))).run(cloud, stop_after="all_edges")
    labels = _edge_labels(len(cloud), result.index_map)
    for segment in result.segments:
        for i in result.index_map[segment.members].tolist():
            labels[i] = PointCategory.SEGMENT_INLIER

    written = [
        reporter.write_json("segments.json", segments_to_json(result.segments)),
        reporter.write_bytes("lines_annotated.ply", write_annotated(cloud, labels)),
    ]

    lines = _banner("Line Extraction Report")
    lines.append(f"    Edge points : {len(result.edge_cloud)}")
    lines.append(f"       Segments : {len(result.segments)}")
    lines.append("")
    for i, segment in enumerate(result.segments[:12], 1):
        tag = " (one-sided)" if segment.one_sided else ""
        lines.append(f"   {i:2d}. {segment.length * 100:6.1f} cm, {segment.member_count} points{tag}")
    if len(result.segments) > 12:
        lines.append(f"   ... ({len(result.segments) - 12} more segments)")
    lines.extend(_footer(written))
    _print(lines)
    return EXIT_OK


# ---------------- estimate-pose ----------------

def cmd_estimate_pose(args, config: Dict[str, Any]) -> int:
    run = build_run_config(args, config)
    dims = resolve_dims(args, config)
    cloud = load_cloud(args.input)
    reporter = Reporter(run.output_dir)

    result = PipelineRunner(run, dims=dims, verbose=bool(_arg(args, 'verbose', False))).run(cloud)

    labels = _edge_labels(len(cloud), result.index_map)
    extra_points, extra_labels = [], []
    for candidate in result.candidates:
        frame = wireframe_points(candidate.pose.corners(dims))
        extra_points.append(frame)
        extra_labels.extend([PointCategory.WIREFRAME] * len(frame))
        if len(candidate.corners):
            extra_points.append(candidate.corners)
            extra_labels.extend([PointCategory.CORNER] * len(candidate.corners))
    annotated = PointCloud(points=np.vstack([cloud.points] + extra_points) if extra_points else cloud.points)

    timings = result.timings
    timing_row = {
        "source": cloud.source,
        "points": len(cloud),
        "edge_points_s": timings.get("edge_points", 0.0),
        "all_edges_s": timings.get("all_edges", 0.0),
        "model_fitting_s": timings.get("model_fitting", 0.0),
        "total_s": result.total_seconds,
    }
    written = [
        reporter.write_json("poses.json", poses_to_json(result.candidates, result.diagnostics, dims)),
        reporter.write_bytes("pose_annotated.ply", write_annotated(annotated, labels + extra_labels)),
        reporter.write_timings([timing_row]),
    ]

    lines = _banner("Pose Estimation Report")
    lines.append(f"           Dims : {dims.to_list()} ({dims.symmetry})")
    lines.append(f"    Edge points : {len(result.edge_cloud)}")
    lines.append(f"       Segments : {len(result.segments)}")
    lines.append(f"         Groups : {len(result.groups)}")
    lines.append(f"          Poses : {len(result.candidates)}")
    lines.append("")
    for i, candidate in enumerate(result.candidates, 1):
        t = candidate.pose.translation
        lines.append(f"   {i}. t = ({t[0]:+.3f}, {t[1]:+.3f}, {t[2]:+.3f}) m, "
                     f"{candidate.quality.corner_count} corners matched, "
                     f"{candidate.quality.edge_support} edges supported")
    for diagnostic in result.diagnostics:
        lines.append(f"   [SKIP] group {diagnostic.group_index}: {diagnostic.reason}")
    lines.append("")
    lines.append(f"   Timing : edge points {timing_row['edge_points_s']:.3f} s, "
                 f"all edges {timing_row['all_edges_s']:.3f} s, "
                 f"model fitting {timing_row['model_fitting_s']:.3f} s")
    lines.extend(_footer(written))
    _print(lines)

    if not result.candidates:
        logger.warning("No pose could be estimated")
        return EXIT_NO_POSE
    return EXIT_OK


# ---------------- compare-baseline ----------------

def cmd_compare_baseline(args, config: Dict[str, Any]) -> int:
    run = build_run_config(args, config)
    baseline = config.get('baseline', {})
    ks = [int(k) for k in baseline.get('ks', (4, 5, 10, 30))]
    guard = baseline.get('guard')

    if _arg(args, 'input'):
        if not _arg(args, 'truth'):
            raise ValueError("compare-baseline on a cloud needs --truth truth.json")
        cloud = load_cloud(args.input)
        truth = SceneGroundTruth.load(args.truth)
        rows = compare_on_scene(cloud, truth, truth.noise, run.edge, ks, guard)
    else:
        noise_levels = [args.noise] if _arg(args, 'noise') is not None else baseline.get(
            'noise_levels', (0.0, 0.001, 0.002))
        rows = compare_baseline(noise_levels=[float(s) for s in noise_levels], ks=ks, edge=run.edge,
                                size=float(baseline.get('size', 0.2)), pitch=float(baseline.get('pitch', 0.002)),
                                guard=guard, seed=run.seed)

    reporter = Reporter(run.output_dir)
    path = reporter.write_table("comparison.csv", [r.to_dict() for r in rows])

    lines = _banner("Baseline Comparison")
    lines.append("   noise(mm)   k   proposed FP   baseline FP   recall")
    for row in rows:
        lines.append(f"   {row.noise * 1000:8.1f} {row.k:3d}   {row.proposed_interior_fp:11.4f}   "
                     f"{row.baseline_interior_fp:11.4f}   {row.proposed_recall:6.3f}")
    lines.extend(_footer([path]))
    _print(lines)
    return EXIT_OK


# ---------------- plan-pick ----------------

def cmd_plan_pick(args, config: Dict[str, Any]) -> int:
    motion = config.get('motion', {})
    waypoints = plan_pick_waypoints(
        goal=parse_point(args.goal, "goal"),
        approach=float(_arg(args, 'approach', motion.get('approach', 0.1))),
        lift=float(_arg(args, 'lift', motion.get('lift', 0.2))),
        initial=parse_point(args.initial, "initial"),
        final=parse_point(args.final, "final"),
        up=motion.get('up', (0.0, 0.0, 1.0)),
    )
    reporter = Reporter(_arg(args, 'output', 'edgepose_output'))
    path = reporter.write_json("waypoints.json", waypoints.to_json())

    lines = _banner("Pick Waypoints")
    for name, point in waypoints.to_dict().items():
        lines.append(f"   {name} : ({point[0]:+.3f}, {point[1]:+.3f}, {point[2]:+.3f})")
    lines.extend(_footer([path]))
    _print(lines)
    return EXIT_OK


# ---------------- list-objects ----------------

def cmd_list_objects(args, config: Dict[str, Any]) -> int:
    loader = ProfileLoader()
    objects = loader.list_objects()

    print(f"\nAvailable Object Profiles ({len(objects)}):")
    print("=" * 70)
    for key in objects:
        profile = loader.load_object_profile(key)
        if profile:
            dims = CuboidDims.from_sequence(profile.dims)
            print(f"  {key:15s} {str(profile.dims):24s} {dims.symmetry:13s} {profile.description}")
        else:
            print(f"  {key:15s} - Could not load profile")

    scenes = loader.list_scenes()
    print(f"\nScene presets: {', '.join(scenes)}")
    print("=" * 70)
    print("Usage: edgepose estimate-pose --input cloud.ply --object <name>\n")
    return EXIT_OK


# ---------------- evaluate ----------------

def cmd_evaluate(args, config: Dict[str, Any]) -> int:
    run = build_run_config(args, config)
    dims = resolve_dims(args, config)
    scene = dict(config.get('scene', {}))
    if scene.get('kind') == 'plane':
        raise ValueError("evaluate needs a cuboid scene preset (isolated or clutter)")
    spec = SceneSpec.from_dict(scene, dims=dims, count=_arg(args, 'count'), noise=_arg(args, 'noise'),
                               seed=run.seed)

    evaluator = BatchEvaluator(spec, run, trials=int(_arg(args, 'trials', 10)),
                               parallel=int(_arg(args, 'parallel', 1)),
                               kind=config.get('scene_name', 'isolated'),
                               verbose=bool(_arg(args, 'verbose', False)))
    report = evaluator.run_all()

    reporter = Reporter(run.output_dir)
    written = [
        reporter.write_table("trials.csv", [t.to_dict() for t in report.trial_results]),
        reporter.write_json("evaluation.json", report_to_json(report)),
    ]

    lines = _banner("Evaluation Summary")
    lines.append(f"          Scene : {report.kind} ({spec.count} cuboids, noise {spec.noise * 1000:.1f} mm)")
    lines.append(f"         Trials : {report.trials}")
    lines.append(f"         Status : {report.status.upper()} - {report.summary}")
    if report.mean_rotation_error_deg is not None:
        lines.append(f"   Rotation err : {report.mean_rotation_error_deg:.2f} deg refined, "
                     f"{report.mean_initial_rotation_error_deg:.2f} deg from 3 points")
    lines.append("")
    for trial in report.trial_results[:20]:
        lines.append(f"   [{trial.status.upper():7s}] seed {trial.seed}: {trial.summary}")
    if len(report.trial_results) > 20:
        lines.append(f"   ... ({len(report.trial_results) - 20} more trials)")
    lines.extend(_footer(written))
    _print(lines)
    return EXIT_OK
