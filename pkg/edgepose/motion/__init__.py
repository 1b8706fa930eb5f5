"""Pick waypoints"""

from edgepose.motion.waypoints import WAYPOINT_ORDER, Waypoints, plan_pick_waypoints

__all__ = ['WAYPOINT_ORDER', 'Waypoints', 'plan_pick_waypoints']
