"""
Grouping of segments into the edges of one cuboid.

Starting from one segment, the walk repeatedly looks for an unconsumed
segment that is orthogonal to the current one and shares a corner with it,
adds it to the group and moves on to it. When the chain ends, the walk
resumes from earlier members so that three edges meeting at one corner stay
together.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np

from edgepose.extractor.line_extractor import LineSegment
from edgepose.pose.geometry import segments_intersect, segments_orthogonal
from edgepose.utils.params import PoseParams

logger = logging.getLogger(__name__)


@dataclass
class EdgeLink:
    """Two clubbed segments and their shared corner."""
    first: int
    second: int
    corner: np.ndarray


@dataclass
class EdgeGroup:
    members: List[int] = field(default_factory=list)
    links: List[EdgeLink] = field(default_factory=list)

    @property
    def posable(self) -> bool:
        return len(self.members) >= 2

    def __len__(self) -> int:
        return len(self.members)

    def segments(self, segments: Sequence[LineSegment]) -> List[LineSegment]:
        return [segments[i] for i in self.members]


def _partner(segments: Sequence[LineSegment], current: int, available: List[int],
             params: PoseParams) -> Optional[Tuple[int, np.ndarray]]:
    for candidate in available:
        if not segments_orthogonal(segments[current], segments[candidate], params.orthogonality_tol):
            continue
        corner = segments_intersect(segments[current], segments[candidate], params.intersection_tol)
        if corner is not None:
            return candidate, corner
    return None


def club_edges(segments: Sequence[LineSegment], start: int, params: Optional[PoseParams] = None,
               consumed: Optional[Set[int]] = None) -> EdgeGroup:
    """Group of segments reachable from ``start``; ``consumed`` is updated in place."""
    params = params or PoseParams()
    if not 0 <= start < len(segments):
        raise IndexError(f"start index {start} out of range for {len(segments)} segments")
    consumed = consumed if consumed is not None else set()
    consumed.add(start)
    group = EdgeGroup(members=[start])
    current = start

    while True:
        available = [i for i in range(len(segments)) if i not in consumed]
        found = _partner(segments, current, available, params)
        if found is None:
            # chain ended; branch off an earlier member if one still has a partner
            for member in group.members:
                if member == current:
                    continue
                found = _partner(segments, member, available, params)
                if found is not None:
                    current = member
                    break
        if found is None:
            break
        partner, corner = found
        group.links.append(EdgeLink(first=current, second=partner, corner=corner))
        group.members.append(partner)
        consumed.add(partner)
        current = partner

    if not group.posable:
        logger.debug(f"Segment {start} has no orthogonal intersecting partner; singleton group")
    return group


def club_all(segments: Sequence[LineSegment], params: Optional[PoseParams] = None) -> List[EdgeGroup]:
    """Disjoint groups, one per unconsumed start index in order."""
    consumed: Set[int] = set()
    groups = []
    for start in range(len(segments)):
        if start in consumed:
            continue
        groups.append(club_edges(segments, start, params, consumed))
    logger.info(f"Clubbed {len(segments)} segments into {len(groups)} groups "
                f"({sum(g.posable for g in groups)} posable)")
    return groups
