"""Forward simulation of the guarding game under feedback policies.

Simple motion, forward Euler: each step every player moves ``speed * dt``
along the unit heading its policy returns. Events are located inside the
step by chord interpolation (positions move linearly between samples, so
capture and arrival times solve exactly there): capture when a defender
closes within ``eps_capture`` of the attacker, arrival when the attacker's
height crosses zero. Capture is checked first and wins within-step ties.

Policies are callables ``policy(state, own) -> unit heading`` where
``state`` carries the time and all three positions and ``own`` is the
controlled player's position. A policy may return the zero vector to hold
position (the run-to-point policy does this when it starts already at its
target and has no heading to hold).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import _backend
from ._text import fmt as _fmt, jvec as _jvec
from .config import DEFAULT_TOLS, Tolerances
from .errors import InvalidPolicyError, ScenarioFormatError
from .geometry import Scenario, _as_vector, _require_canonical
from .kind import ATTACKER_WINS, DEFENDERS_WIN, evaluate_kind

EVENT_CAPTURED = "captured"
EVENT_ARRIVED = "arrived"
EVENT_TIMEOUT = "timeout"


class GameState(NamedTuple):
    """Snapshot handed to policies each step."""

    t: float
    x_d1: np.ndarray
    x_d2: np.ndarray
    x_a: np.ndarray


Policy = Callable[[GameState, np.ndarray], np.ndarray]


class ToPointPolicy:
    """Run straight at a fixed target; hold the last heading once there.

    Holding (rather than re-aiming) within ``tol`` of the target avoids
    heading chatter in discrete time. Starting exactly at the target with
    no heading yet means holding position (zero heading).
    """

    def __init__(self, target, tol: float = 1e-9):
        self.target = np.array(np.asarray(target, dtype=float))
        self.tol = float(tol)
        self._last = np.zeros(self.target.shape[0])

    def __call__(self, state: GameState, own: np.ndarray) -> np.ndarray:
        diff = self.target - own
        norm = float(np.linalg.norm(diff))
        if norm > self.tol:
            self._last = diff / norm
        return self._last


class FixedHeadingPolicy:
    """Cruise along one fixed unit heading forever."""

    def __init__(self, u):
        u = np.array(np.asarray(u, dtype=float))
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            raise InvalidPolicyError("fixed heading must be nonzero")
        self.u = u / norm

    def __call__(self, state: GameState, own: np.ndarray) -> np.ndarray:
        return self.u


def to_point_policy(target, tol: float = 1e-9) -> ToPointPolicy:
    return ToPointPolicy(target, tol)


def fixed_heading_policy(u) -> FixedHeadingPolicy:
    return FixedHeadingPolicy(u)


@dataclass(frozen=True)
class Trajectory:
    """Sampled run of the game.

    ``positions[k]`` stacks (defender 1, defender 2, attacker) at
    ``times[k]``. The last sample sits at the event time (a partial step
    when the event fires mid-step). ``event_point`` is the attacker's
    position at the event; ``captured_by`` the capturing defender
    (1-based) or None.
    """

    dt: float
    times: np.ndarray
    positions: np.ndarray
    event: str
    t_event: float
    event_point: np.ndarray | None
    captured_by: int | None

    @property
    def capture_height(self) -> float | None:
        if self.event_point is None:
            return None
        return float(self.event_point[-1])


def _validate_heading(u, n: int, who: str) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (n,):
        raise InvalidPolicyError(f"{who} policy returned shape {u.shape}, expected ({n},)")
    norm = float(np.linalg.norm(u))
    if norm != 0.0 and abs(norm - 1.0) > 1e-12:
        raise InvalidPolicyError(f"{who} policy returned non-unit heading (norm {norm})")
    return u


def _chord_capture(prev, cur, eps: float):
    """Earliest in-step fraction where a defender closes to ``eps``."""
    s_cap, by = math.inf, None
    for k in range(2):
        d0 = prev[k] - prev[2]
        d1 = cur[k] - cur[2]
        e = d1 - d0
        a = float(e @ e)
        b = 2.0 * float(d0 @ e)
        c = float(d0 @ d0) - eps * eps
        s = math.inf
        if c <= 0.0:
            s = 0.0
        elif a > 0.0:
            disc = b * b - 4.0 * a * c
            if disc >= 0.0:
                root = (-b - math.sqrt(disc)) / (2.0 * a)
                if 0.0 <= root <= 1.0:
                    s = root
        if s < s_cap:
            s_cap, by = s, k + 1
    return s_cap, by


def _chord_arrival(prev, cur):
    a1 = float(cur[2][-1])
    if a1 > 0.0:
        return math.inf
    a0 = float(prev[2][-1])
    return a0 / (a0 - a1) if a0 > 0.0 else 0.0


def simulate(scenario: Scenario, policies, dt: float, t_max: float,
             eps_capture: float | None = None, record: bool = True) -> Trajectory:
    """Run the game forward until capture, arrival, or timeout.

    ``policies`` is the triple (defender 1, defender 2, attacker).
    ``eps_capture`` defaults to one defender step, ``speed_d * dt``. With
    ``record=False`` only the initial and terminal samples are kept, and
    runs whose three policies are the built-in point/heading policies take
    a compiled fast path with identical stepping.
    """
    _require_canonical(scenario)
    if dt <= 0.0:
        raise ScenarioFormatError(f"dt must be positive, got {dt}")
    if t_max <= 0.0:
        raise ScenarioFormatError(f"t_max must be positive, got {t_max}")
    if eps_capture is None:
        eps_capture = scenario.speed_d * dt
    eps_capture = float(eps_capture)
    if eps_capture < 0.0:
        raise ScenarioFormatError("eps_capture must be nonnegative")
    if len(policies) != 3:
        raise InvalidPolicyError("need exactly three policies (d1, d2, attacker)")

    n = scenario.n
    pos0 = np.stack([scenario.x_d1, scenario.x_d2, scenario.x_a]).astype(float)
    speeds = np.array([scenario.speed_d, scenario.speed_d, scenario.speed_a])

    builtin = all(isinstance(p, (ToPointPolicy, FixedHeadingPolicy)) for p in policies)
    if not record and builtin:
        mode = np.array([0 if isinstance(p, ToPointPolicy) else 1 for p in policies],
                        dtype=np.int64)
        vec = np.stack([p.target if isinstance(p, ToPointPolicy) else p.u
                        for p in policies])
        arrive_tol = max(p.tol for p in policies if isinstance(p, ToPointPolicy)) \
            if any(isinstance(p, ToPointPolicy) for p in policies) else 1e-9
        code, t_event, epos, by, _ = _backend.run_linear(
            pos0, speeds, mode, vec, float(dt), float(t_max), eps_capture,
            float(arrive_tol))
        event = (EVENT_TIMEOUT, EVENT_CAPTURED, EVENT_ARRIVED)[int(code)]
        return Trajectory(
            dt=float(dt), times=np.array([0.0, t_event]),
            positions=np.stack([pos0, epos]), event=event, t_event=float(t_event),
            event_point=None if event == EVENT_TIMEOUT else np.array(epos[2]),
            captured_by=None if by < 0 else int(by) + 1)

    nsteps = int(math.ceil(t_max / dt - 1e-12))
    times = np.empty(nsteps + 2)
    traj = np.empty((nsteps + 2, 3, n))
    pos = pos0.copy()
    times[0] = 0.0
    traj[0] = pos
    rows = 1

    def finish(event, t_event, epos, by):
        nonlocal rows
        times[rows] = t_event
        traj[rows] = epos
        rows += 1
        keep = slice(None) if record else [0, rows - 1]
        return Trajectory(
            dt=float(dt), times=times[:rows][keep].copy(),
            positions=traj[:rows][keep].copy(),
            event=event, t_event=float(t_event),
            event_point=None if event == EVENT_TIMEOUT else np.array(epos[2]),
            captured_by=by)

    # capture can hold at t = 0 (players spawned within eps of each other)
    s0, by0 = _chord_capture(pos, pos, eps_capture)
    if s0 == 0.0:
        return finish(EVENT_CAPTURED, 0.0, pos.copy(), by0)

    for step in range(nsteps):
        t = step * dt
        prev = pos.copy()
        # policies see the pre-step state only, never partial updates
        state = GameState(t=t, x_d1=prev[0], x_d2=prev[1], x_a=prev[2])
        for k, (who, policy) in enumerate(zip(("defender 1", "defender 2", "attacker"),
                                              policies)):
            u = _validate_heading(policy(state, prev[k]), n, who)
            pos[k] = prev[k] + speeds[k] * dt * u
        s_cap, by = _chord_capture(prev, pos, eps_capture)
        s_arr = _chord_arrival(prev, pos)
        if s_cap <= 1.0 and s_cap <= s_arr:
            epos = prev + s_cap * (pos - prev)
            return finish(EVENT_CAPTURED, (step + s_cap) * dt, epos, by)
        if s_arr <= 1.0:
            epos = prev + s_arr * (pos - prev)
            return finish(EVENT_ARRIVED, (step + s_arr) * dt, epos, None)
        times[rows] = (step + 1) * dt
        traj[rows] = pos
        rows += 1

    keep = slice(None) if record else [0, rows - 1]
    return Trajectory(
        dt=float(dt), times=times[:rows][keep].copy(),
        positions=traj[:rows][keep].copy(),
        event=EVENT_TIMEOUT, t_event=float(nsteps * dt), event_point=None,
        captured_by=None)


@dataclass(frozen=True)
class PolicyBundle:
    """Policies for all players plus the target they steer by.

    ``saddle_optimal`` is True when the bundle realizes the saddle point
    (defender-winning or barrier states). From attacker-winning states the
    defense has no optimal strategy; the bundle then chases the oracle's
    breach point and is explicitly labeled non-optimal.
    """

    d1: Policy
    d2: Policy
    a: Policy
    target: np.ndarray
    case: str
    saddle_optimal: bool

    @property
    def triple(self) -> tuple[Policy, Policy, Policy]:
        return (self.d1, self.d2, self.a)


def optimal_policies(scenario: Scenario, tols: Tolerances = DEFAULT_TOLS) -> PolicyBundle:
    """Equilibrium point policies for the scenario's winner region.

    Defender-winning: everyone runs at the optimal target point (the
    ineffective defender too, a deterministic tie-break among its many
    harmless choices). Barrier: everyone runs at the equal-time point on
    the hyperplane. Attacker-winning: the attacker runs at the oracle's
    best breach point and the defenders chase it; marked non-optimal since
    no saddle exists for the defense there.
    """
    from .degree import barrier_solution, solve_dws
    from .oracle import oracle_aws_target

    outcome = evaluate_kind(scenario, tols)
    if outcome.outcome == DEFENDERS_WIN:
        sol = solve_dws(scenario, tols)
        target, case, optimal = sol.otp, sol.case, True
    elif outcome.outcome == ATTACKER_WINS:
        target, case, optimal = oracle_aws_target(scenario), ATTACKER_WINS, False
    else:
        sol = barrier_solution(scenario, tols)
        target, case, optimal = sol.otp, sol.case, True
    return PolicyBundle(
        d1=to_point_policy(target), d2=to_point_policy(target),
        a=to_point_policy(target), target=np.array(target), case=case,
        saddle_optimal=optimal)


# ---------------------------------------------------------------------------
# trajectory wire formats
# ---------------------------------------------------------------------------

def trajectory_to_csv(traj: Trajectory) -> str:
    n = traj.positions.shape[2]
    cols = (["t"] + [f"xD1_{i + 1}" for i in range(n)]
            + [f"xD2_{i + 1}" for i in range(n)]
            + [f"xA_{i + 1}" for i in range(n)] + ["event"])
    lines = [",".join(cols)]
    last = len(traj.times) - 1
    for k in range(len(traj.times)):
        row = [_fmt(traj.times[k])]
        for p in range(3):
            row.extend(_fmt(v) for v in traj.positions[k, p])
        row.append(traj.event if k == last else "")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def trajectory_to_json(traj: Trajectory) -> str:
    last = len(traj.times) - 1
    samples = []
    for k in range(len(traj.times)):
        ev = traj.event if k == last else ""
        samples.append(
            f'{{"t": {_fmt(traj.times[k])}, "xD1": {_jvec(traj.positions[k, 0])}, '
            f'"xD2": {_jvec(traj.positions[k, 1])}, "xA": {_jvec(traj.positions[k, 2])}, '
            f'"event": "{ev}"}}')
    by = "null" if traj.captured_by is None else str(traj.captured_by)
    return (f'{{"dt": {_fmt(traj.dt)}, "event": "{traj.event}", '
            f'"t_event": {_fmt(traj.t_event)}, "captured_by": {by}, '
            '"samples": [' + ", ".join(samples) + "]}\n")
