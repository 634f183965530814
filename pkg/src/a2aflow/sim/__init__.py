from .arm import (
    ArmEnv,
    ArmState,
    DEFAULT_LINKS,
    MAX_JOINT_STEP,
    forward_kinematics,
    inverse_kinematics,
    judge_success,
    success_radius,
)
from .render import RenderSpec, render
from .expert import Trajectory, expert_demo, min_jerk

__all__ = [
    "ArmEnv",
    "ArmState",
    "DEFAULT_LINKS",
    "MAX_JOINT_STEP",
    "forward_kinematics",
    "inverse_kinematics",
    "judge_success",
    "success_radius",
    "RenderSpec",
    "render",
    "Trajectory",
    "expert_demo",
    "min_jerk",
]
