"""Two-link planar arm: kinematics, position-controlled stepping, success judging.

Joint angles live in [-pi, pi]. Actions are absolute joint targets plus a
gripper command in [0, 1]; each control step moves every joint toward its
target by at most MAX_JOINT_STEP radians. Success means dwelling near the
target with the gripper closed.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError, RolloutError

DEFAULT_LINKS = (1.0, 1.0)
MAX_JOINT_STEP = 0.15
JOINT_LIMIT = np.pi
SUCCESS_DWELL = 5
GRIPPER_CLOSED = 0.5
# Targets are sampled this far (in units of total reach) away from both
# workspace boundaries.
REACH_MARGIN = 0.05


def success_radius(links=DEFAULT_LINKS) -> float:
    return 0.05 * (links[0] + links[1])


def forward_kinematics(joints, links=DEFAULT_LINKS) -> np.ndarray:
    t1, t2 = float(joints[0]), float(joints[1])
    l1, l2 = links
    return np.array(
        [l1 * np.cos(t1) + l2 * np.cos(t1 + t2), l1 * np.sin(t1) + l2 * np.sin(t1 + t2)]
    )


def _wrap(angle: float) -> float:
    return (angle + np.pi) % (2.0 * np.pi) - np.pi


def inverse_kinematics(target, links=DEFAULT_LINKS):
    """Both joint solutions for a reachable point: (elbow_up, elbow_down).

    elbow_up has joint2 > 0. Raises InputError for unreachable targets.
    """
    l1, l2 = links
    x, y = float(target[0]), float(target[1])
    r2 = x * x + y * y
    r = np.sqrt(r2)
    if r > l1 + l2 + 1e-12 or r < abs(l1 - l2) - 1e-12:
        raise InputError(f"target {(x, y)} outside reachable annulus for links {links}")
    c2 = np.clip((r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0)
    alpha = np.arccos(c2)
    phi = np.arctan2(y, x)
    beta = np.arctan2(l2 * np.sin(alpha), l1 + l2 * np.cos(alpha))
    up = np.array([_wrap(phi - beta), alpha])
    down = np.array([_wrap(phi + beta), -alpha])
    return up, down


@dataclass
class ArmState:
    joints: np.ndarray  # (2,) radians in [-pi, pi]
    gripper: float  # in [0, 1]
    target: np.ndarray  # (2,) meters, inside the reachable annulus

    def copy(self) -> "ArmState":
        return ArmState(self.joints.copy(), self.gripper, self.target.copy())


def sample_target(rng, links=DEFAULT_LINKS) -> np.ndarray:
    """Area-uniform point in the reachable annulus, margin away from both rims."""
    l1, l2 = links
    margin = REACH_MARGIN * (l1 + l2)
    r_lo, r_hi = abs(l1 - l2) + margin, l1 + l2 - margin
    r = np.sqrt(rng.uniform(r_lo**2, r_hi**2))
    phi = rng.uniform(-np.pi, np.pi)
    return np.array([r * np.cos(phi), r * np.sin(phi)])


@dataclass
class ArmEnv:
    links: tuple = DEFAULT_LINKS
    max_step: float = MAX_JOINT_STEP
    state: ArmState = field(default=None)

    def reset(self, joints, target, gripper=0.0) -> ArmState:
        self.state = ArmState(
            np.clip(np.asarray(joints, dtype=float), -JOINT_LIMIT, JOINT_LIMIT),
            float(np.clip(gripper, 0.0, 1.0)),
            np.asarray(target, dtype=float),
        )
        return self.state

    def step(self, action) -> ArmState:
        action = np.asarray(action, dtype=float)
        if not np.all(np.isfinite(action)):
            raise RolloutError(f"non-finite action {action}")
        tgt = np.clip(action[:2], -JOINT_LIMIT, JOINT_LIMIT)
        delta = np.clip(tgt - self.state.joints, -self.max_step, self.max_step)
        self.state = ArmState(
            self.state.joints + delta,
            float(np.clip(action[2], 0.0, 1.0)),
            self.state.target,
        )
        return self.state

    def ee_position(self) -> np.ndarray:
        return forward_kinematics(self.state.joints, self.links)


def judge_success(joint_seq, gripper_seq, target, links=DEFAULT_LINKS,
                  dwell=SUCCESS_DWELL) -> bool:
    """True iff the end effector stays within the success radius of the target
    for at least ``dwell`` consecutive steps while the gripper is closed."""
    eps = success_radius(links)
    run = 0
    for joints, grip in zip(joint_seq, gripper_seq):
        ee = forward_kinematics(joints, links)
        if np.linalg.norm(ee - np.asarray(target)) <= eps and grip > GRIPPER_CLOSED:
            run += 1
            if run >= dwell:
                return True
        else:
            run = 0
    return False


def judge_trajectory(actions, start_joints, target, links=DEFAULT_LINKS) -> bool:
    """Judge a commanded action sequence by rolling it through the env."""
    env = ArmEnv(links=links)
    env.reset(start_joints, target)
    joints, grips = [], []
    for a in np.asarray(actions, dtype=float):
        s = env.step(a)
        joints.append(s.joints)
        grips.append(s.gripper)
    return judge_success(joints, grips, target, links)
