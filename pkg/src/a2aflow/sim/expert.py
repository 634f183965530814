"""Scripted expert demonstrations for the reach-and-grasp task.

Episodes start near a common home pose, pick one of the two inverse-kinematics
elbow branches by a fair coin flip (the deliberate multi-modality of the
dataset), follow a minimum-jerk joint profile to the target, then dwell there
with the gripper closed. Commanded actions always respect the per-step joint
limit, so the executed trajectory equals the commanded one.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..seeding import substream, subseed
from .arm import ArmState, DEFAULT_LINKS, MAX_JOINT_STEP, inverse_kinematics, sample_target
from .render import RenderSpec, render

T_DEMO = 64
DWELL_STEPS = 8
HOME_POSE = np.array([0.0, 0.0])
START_JITTER = 0.05
MAX_SAMPLE_TRIES = 200
TASK_ID = "reach"


@dataclass
class Trajectory:
    actions: np.ndarray  # (T, 3) float32: joint1, joint2, gripper
    frames: np.ndarray  # (T, H, W) uint8
    task_id: str
    seed: int
    level: int
    success: bool
    start_joints: np.ndarray = None
    target: np.ndarray = None

    @property
    def length(self) -> int:
        return self.actions.shape[0]


def min_jerk(u):
    """Minimum-jerk profile: s(0)=0, s(1)=1, zero velocity/acceleration at ends."""
    u = np.asarray(u, dtype=float)
    return 10 * u**3 - 15 * u**4 + 6 * u**5


def _joint_plan(start, goal, motion_steps):
    u = np.arange(1, motion_steps + 1) / motion_steps
    return start[None, :] + min_jerk(u)[:, None] * (goal - start)[None, :]


@dataclass
class EpisodeSetup:
    start: np.ndarray  # (2,) start joints
    target: np.ndarray  # (2,) target point
    goal: np.ndarray  # (2,) goal joints on the chosen elbow branch
    plan: np.ndarray  # (motion_steps, 2) commanded joint positions
    elbow_up: bool


def sample_episode_setup(seed: int, links=DEFAULT_LINKS, t_demo: int = T_DEMO) -> EpisodeSetup:
    """Sample a feasible (start, target, branch) triple for one episode.

    The elbow branch is a fair coin flip; (start, target) are rejection-sampled
    until the minimum-jerk command sequence for that branch respects the
    per-step joint limit, so the branch marginal stays exactly 50/50.
    """
    rng = substream(seed, "episode")
    elbow_up = bool(rng.random() < 0.5)
    motion_steps = t_demo - DWELL_STEPS
    for _ in range(MAX_SAMPLE_TRIES):
        target = sample_target(rng, links)
        start = HOME_POSE + rng.uniform(-START_JITTER, START_JITTER, size=2)
        up, down = inverse_kinematics(target, links)
        goal = up if elbow_up else down
        plan = _joint_plan(start, goal, motion_steps)
        steps = np.diff(np.vstack([start, plan]), axis=0)
        if np.abs(steps).max() <= MAX_JOINT_STEP:
            return EpisodeSetup(start=start, target=target, goal=goal, plan=plan,
                                elbow_up=elbow_up)
    raise InputError(f"could not sample a feasible episode for seed {seed}")


def expert_demo(seed: int, level: int = 0, links=DEFAULT_LINKS, t_demo: int = T_DEMO,
                spec: RenderSpec = None) -> Trajectory:
    """Generate one seeded demonstration episode."""
    setup = sample_episode_setup(seed, links, t_demo)
    start, goal, target, plan = setup.start, setup.goal, setup.target, setup.plan
    motion_steps = t_demo - DWELL_STEPS

    actions = np.zeros((t_demo, 3), dtype=np.float32)
    actions[:motion_steps, :2] = plan
    actions[motion_steps:, :2] = goal
    actions[motion_steps:, 2] = 1.0

    if spec is None:
        spec = RenderSpec(level=level, seed=subseed(seed, "render"))
    frames = np.zeros((t_demo, spec.height, spec.width), dtype=np.uint8)
    joints = start.copy()
    gripper = 0.0
    for k in range(t_demo):
        frames[k] = render(ArmState(joints, gripper, target), spec, links)
        joints = actions[k, :2].astype(float)
        gripper = float(actions[k, 2])

    return Trajectory(
        actions=actions,
        frames=frames,
        task_id=TASK_ID,
        seed=seed,
        level=spec.level,
        success=True,
        start_joints=start,
        target=target,
    )
