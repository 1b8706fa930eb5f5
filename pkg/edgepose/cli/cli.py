# edgepose/cli/cli.py
import argparse
import logging
import sys
from typing import List, Optional

from edgepose.cli.commands import (EXIT_INPUT, EXIT_UNEXPECTED, EXIT_USAGE, cmd_compare_baseline,
                                   cmd_detect_edges, cmd_estimate_pose, cmd_evaluate, cmd_extract_lines,
                                   cmd_gen_scene, cmd_list_objects, cmd_plan_pick)
from edgepose.parser.pointcloud import ParseError
from edgepose.utils.profile_loader import ProfileLoader


def _add_profile_args(sub):
    sub.add_argument("--object", type=str, help="Object profile (use 'edgepose list-objects'), fuzzy matching supported")
    sub.add_argument("--scene", type=str, help="Scene preset: isolated, clutter or plane")
    sub.add_argument("--config", type=str, help="YAML file merged over the defaults and profiles")
    sub.add_argument("--seed", type=int, default=None, help="Random seed (default from config: 0)")
    sub.add_argument("--verbose", action="store_true", help="Verbose logging")


def _add_edge_args(sub):
    sub.add_argument("--rs", type=float, default=None, help="Scoring radius r_s in meters (default: 0.02)")
    sub.add_argument("--th", type=float, default=None, help="Edge score threshold (default: 0.35)")
    sub.add_argument("--crop", type=str, default=None,
                     help="Crop box xmin,ymin,zmin,xmax,ymax,zmax applied before scoring")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgepose",
        description="edgepose: edge and corner detection in point clouds and 6D pose of cuboids"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # ---------------- List Objects ----------------
    subparsers.add_parser("list-objects", help="List all available object profiles")

    # ---------------- Gen Scene ----------------
    gen_parser = subparsers.add_parser("gen-scene", help="Generate a synthetic cuboid scene with ground truth")
    gen_parser.add_argument("--dims", type=str, help="Cuboid dims L,B,H in meters")
    gen_parser.add_argument("--count", type=int, default=None, help="Number of cuboids (default from scene preset)")
    gen_parser.add_argument("--noise", type=float, default=None, help="Gaussian noise sigma in meters")
    gen_parser.add_argument("--format", choices=["ply", "pcd"], default="ply", help="Cloud file format")
    gen_parser.add_argument("--output", type=str, default="edgepose_output", help="Output directory")
    _add_profile_args(gen_parser)

    # ---------------- Detect Edges ----------------
    detect_parser = subparsers.add_parser("detect-edges", help="Score points and write the edge annotation")
    detect_parser.add_argument("--input", type=str, required=True, help="Input .pcd or .ply cloud")
    detect_parser.add_argument("--output", type=str, default="edgepose_output", help="Output directory")
    detect_parser.add_argument("--sweep", action="store_true", help="Also time the edge stage across r_s values")
    detect_parser.add_argument("--truth", type=str, help="Ground truth JSON from gen-scene, enables edge metrics")
    _add_edge_args(detect_parser)
    _add_profile_args(detect_parser)

    # ---------------- Extract Lines ----------------
    lines_parser = subparsers.add_parser("extract-lines", help="Extract straight edge segments")
    lines_parser.add_argument("--input", type=str, required=True, help="Input .pcd or .ply cloud")
    lines_parser.add_argument("--output", type=str, default="edgepose_output", help="Output directory")
    lines_parser.add_argument("--ransac-thresh", type=float, default=None,
                              help="RANSAC inlier distance in meters (default: 0.01)")
    _add_edge_args(lines_parser)
    _add_profile_args(lines_parser)

    # ---------------- Estimate Pose ----------------
    pose_parser = subparsers.add_parser("estimate-pose", help="Run the full pipeline and fit cuboid poses")
    pose_parser.add_argument("--input", type=str, required=True, help="Input .pcd or .ply cloud")
    pose_parser.add_argument("--output", type=str, default="edgepose_output", help="Output directory")
    pose_parser.add_argument("--dims", type=str, help="Cuboid dims L,B,H in meters (or use --object)")
    pose_parser.add_argument("--ransac-thresh", type=float, default=None,
                             help="RANSAC inlier distance in meters (default: 0.01)")
    _add_edge_args(pose_parser)
    _add_profile_args(pose_parser)

    # ---------------- Compare Baseline ----------------
    compare_parser = subparsers.add_parser("compare-baseline",
                                           help="Interior false positives versus the covariance baseline")
    compare_parser.add_argument("--input", type=str, help="Labeled cloud (default: generated planar scenes)")
    compare_parser.add_argument("--truth", type=str, help="Ground truth JSON for --input")
    compare_parser.add_argument("--noise", type=float, default=None, help="Single noise level instead of 0, 1, 2 mm")
    compare_parser.add_argument("--output", type=str, default="edgepose_output", help="Output directory")
    _add_edge_args(compare_parser)
    _add_profile_args(compare_parser)

    # ---------------- Plan Pick ----------------
    pick_parser = subparsers.add_parser("plan-pick", help="Compute the five pick-and-place waypoints")
    pick_parser.add_argument("--goal", type=str, required=True, help="Goal point G as x,y,z")
    pick_parser.add_argument("--initial", type=str, required=True, help="Initial point I as x,y,z")
    pick_parser.add_argument("--final", type=str, required=True, help="Final point F as x,y,z")
    pick_parser.add_argument("--approach", type=float, default=None, help="Approach height d above G (default: 0.1)")
    pick_parser.add_argument("--lift", type=float, default=None, help="Retrieval height above G (default: 0.2)")
    pick_parser.add_argument("--output", type=str, default="edgepose_output", help="Output directory")
    _add_profile_args(pick_parser)

    # ---------------- Evaluate ----------------
    eval_parser = subparsers.add_parser("evaluate", help="Seeded trials against generated ground truth")
    eval_parser.add_argument("--dims", type=str, help="Cuboid dims L,B,H in meters (or use --object)")
    eval_parser.add_argument("--trials", type=int, default=10, help="Number of seeded trials (default: 10)")
    eval_parser.add_argument("--parallel", type=int, default=1, help="Number of parallel processes (default: 1)")
    eval_parser.add_argument("--count", type=int, default=None, help="Cuboids per scene")
    eval_parser.add_argument("--noise", type=float, default=None, help="Gaussian noise sigma in meters")
    eval_parser.add_argument("--ransac-thresh", type=float, default=None,
                             help="RANSAC inlier distance in meters (default: 0.01)")
    eval_parser.add_argument("--output", type=str, default="edgepose_output", help="Output directory")
    _add_edge_args(eval_parser)
    _add_profile_args(eval_parser)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    verbose = getattr(args, 'verbose', False)
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="[%(levelname)s] %(message)s")

    # Friendly fuzzy matching for object and scene names
    fuzzy_loader = ProfileLoader()

    if getattr(args, 'object', None):
        original_input = args.object
        matched = fuzzy_loader.resolve_object(args.object)
        if matched and matched != original_input:
            print(f"[INFO] Using object profile '{matched}' (matched from '{original_input}')")
        if matched:
            args.object = matched

    if getattr(args, 'scene', None):
        original_input = args.scene
        matched = fuzzy_loader.resolve_scene(args.scene)
        if matched and matched != original_input:
            print(f"[INFO] Using scene preset '{matched}' (matched from '{original_input}')")
        if matched:
            args.scene = matched

    try:
        config = fuzzy_loader.get_combined_config(
            object_name=getattr(args, 'object', None),
            scene=getattr(args, 'scene', None),
            user_config_path=getattr(args, 'config', None),
        )

        if args.command == "list-objects":
            return cmd_list_objects(args, config)
        elif args.command == "gen-scene":
            return cmd_gen_scene(args, config)
        elif args.command == "detect-edges":
            return cmd_detect_edges(args, config)
        elif args.command == "extract-lines":
            return cmd_extract_lines(args, config)
        elif args.command == "estimate-pose":
            return cmd_estimate_pose(args, config)
        elif args.command == "compare-baseline":
            return cmd_compare_baseline(args, config)
        elif args.command == "plan-pick":
            return cmd_plan_pick(args, config)
        elif args.command == "evaluate":
            return cmd_evaluate(args, config)

    # ParseError is a ValueError, so it must be caught first
    except FileNotFoundError as e:
        print(f"[ERROR] File not found: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as e:
        print(f"[ERROR] Invalid point cloud: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"[ERROR] Invalid input: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        print(f"[ERROR] Unexpected error: {e}", file=sys.stderr)
        if verbose:
            import traceback
            traceback.print_exc()
        return EXIT_UNEXPECTED
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
