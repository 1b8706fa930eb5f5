from typing import Dict, List, Optional, Tuple
from dataclasses import dataclass
from enum import Enum

from edgepose.analyzer.edge_metrics import EdgeMetrics
from edgepose.pose.pose_error import PoseError


class TrialStatus(Enum):
    """Outcome of one evaluation trial"""
    PASS = "pass"
    WARN = "warn"
    FAIL = "fail"
    NO_POSE = "no_pose"


@dataclass
class AcceptanceRule:
    """A single acceptance rule with thresholds"""
    name: str
    description: str
    pass_threshold: float
    warn_threshold: float
    higher_is_better: bool = True  # If False, lower values are better

    def status(self, value: float) -> TrialStatus:
        if self.higher_is_better:
            if value >= self.pass_threshold:
                return TrialStatus.PASS
            return TrialStatus.WARN if value >= self.warn_threshold else TrialStatus.FAIL
        if value < self.pass_threshold:
            return TrialStatus.PASS
        return TrialStatus.WARN if value < self.warn_threshold else TrialStatus.FAIL


ACCEPTANCE_RULES = {
    "rotation_error": AcceptanceRule(
        name="Rotation Error",
        description="Rotation error in degrees, modulo the cuboid symmetry group",
        pass_threshold=5.0,
        warn_threshold=10.0,
        higher_is_better=False
    ),

    "translation_error": AcceptanceRule(
        name="Translation Error",
        description="Centroid error in meters",
        pass_threshold=0.01,
        warn_threshold=0.02,
        higher_is_better=False
    ),

    "boundary_recall": AcceptanceRule(
        name="Boundary Recall",
        description="Fraction of boundary points flagged as edges",
        pass_threshold=0.90,
        warn_threshold=0.80,
        higher_is_better=True
    ),

    "interior_fp_rate": AcceptanceRule(
        name="Interior False Positives",
        description="Fraction of interior points flagged as edges",
        pass_threshold=0.05,
        warn_threshold=0.10,
        higher_is_better=False
    ),

    # share of trials in a batch that must pass
    "pose_yield": AcceptanceRule(
        name="Pose Yield",
        description="Fraction of trials whose best pose passes",
        pass_threshold=0.90,
        warn_threshold=0.80,
        higher_is_better=True
    ),
}


def _worst(statuses: List[TrialStatus]) -> TrialStatus:
    order = [TrialStatus.NO_POSE, TrialStatus.FAIL, TrialStatus.WARN, TrialStatus.PASS]
    return min(statuses, key=order.index)


class AcceptanceEngine:

    def __init__(self, custom_rules: Optional[Dict[str, AcceptanceRule]] = None):
        self.rules = ACCEPTANCE_RULES.copy()
        if custom_rules:
            self.rules.update(custom_rules)

    def evaluate_pose_error(self, error: Optional[PoseError]) -> Tuple[TrialStatus, str]:
        if error is None:
            return TrialStatus.NO_POSE, "No pose estimated"
        rotation = self.rules["rotation_error"].status(error.rotation_deg)
        translation = self.rules["translation_error"].status(error.translation_m)
        status = _worst([rotation, translation])
        summary = f"rotation {error.rotation_deg:.2f} deg, translation {error.translation_m * 1000:.1f} mm"
        return status, summary

    def evaluate_edge_metrics(self, metrics: EdgeMetrics) -> Tuple[TrialStatus, str]:
        recall = self.rules["boundary_recall"].status(metrics.boundary_recall)
        fp_rate = self.rules["interior_fp_rate"].status(metrics.interior_fp_rate)
        summary = (f"boundary recall {metrics.boundary_recall:.1%}, "
                   f"interior false positives {metrics.interior_fp_rate:.2%}")
        return _worst([recall, fp_rate]), summary

    def evaluate_batch(self, statuses: List[TrialStatus]) -> Tuple[TrialStatus, str]:
        if not statuses:
            return TrialStatus.FAIL, "No trials run"
        passed = sum(s is TrialStatus.PASS for s in statuses)
        fraction = passed / len(statuses)
        status = self.rules["pose_yield"].status(fraction)
        return status, f"{passed}/{len(statuses)} trials passed ({fraction:.0%})"
