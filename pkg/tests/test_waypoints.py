"""
Tests for pick-and-place waypoints
"""

import json

import numpy as np
import pytest

from edgepose.motion.waypoints import WAYPOINT_ORDER, plan_pick_waypoints


def test_approach_and_retrieval_points():
    waypoints = plan_pick_waypoints((0.4, 0.1, 0.05), 0.1, 0.2, (0.0, 0.0, 0.5), (0.2, -0.3, 0.3))
    np.testing.assert_allclose(waypoints.approach, [0.4, 0.1, 0.15])
    np.testing.assert_allclose(waypoints.retrieval, [0.4, 0.1, 0.25])
    np.testing.assert_array_equal(waypoints.goal, [0.4, 0.1, 0.05])


def test_non_positive_distances_fail():
    with pytest.raises(ValueError):
        plan_pick_waypoints((0.4, 0.1, 0.05), 0.0, 0.2, (0, 0, 0.5), (0, 0, 0.5))
    with pytest.raises(ValueError):
        plan_pick_waypoints((0.4, 0.1, 0.05), 0.1, -0.2, (0, 0, 0.5), (0, 0, 0.5))


def test_bad_points_fail():
    with pytest.raises(ValueError):
        plan_pick_waypoints((0.4, 0.1), 0.1, 0.2, (0, 0, 0.5), (0, 0, 0.5))
    with pytest.raises(ValueError):
        plan_pick_waypoints((0.4, 0.1, float("nan")), 0.1, 0.2, (0, 0, 0.5), (0, 0, 0.5))
    with pytest.raises(ValueError):
        plan_pick_waypoints((0.4, 0.1, 0.05), 0.1, 0.2, (0, 0, 0.5), (0, 0, 0.5), up=(0, 0, 0))


def test_custom_up_is_normalized():
    waypoints = plan_pick_waypoints((0, 0, 1.0), 0.1, 0.2, (0, 0, 0), (0, 0, 0), up=(0, 0, -2.0))
    np.testing.assert_allclose(waypoints.approach, [0, 0, 0.9])
    np.testing.assert_allclose(waypoints.retrieval, [0, 0, 0.8])


def test_order_is_always_imgrf():
    waypoints = plan_pick_waypoints((0.4, 0.1, 0.05), 0.1, 0.2, (0.0, 0.0, 0.5), (0.2, -0.3, 0.3))
    data = json.loads(waypoints.to_json())
    assert WAYPOINT_ORDER == ("I", "M", "G", "R", "F")
    assert data["order"] == ["I", "M", "G", "R", "F"]
    assert list(data["waypoints"]) == ["I", "M", "G", "R", "F"]
    assert data["waypoints"]["M"] == [0.4, 0.1, 0.15]
    assert len(waypoints.as_list()) == 5
