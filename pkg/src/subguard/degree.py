"""Game of degree: optimal play when the defenders win.

From a defender-winning state the saddle point is pure straight-line play:
everyone runs at full speed toward a single optimal target point on the
boundary of the attacker's dominance region, and the guaranteed capture
height above the target hyperplane is that point's height.

The target point is the lowest point of the intersection of the attacker's
two dominance balls. Depending on the configuration the minimum sits either
at the bottom of one ball (only that defender matters) or on the seam where
both spheres meet; the seam minimizer has closed forms split by whether the
defenders share a height. Degenerate states exactly on the barrier get
their own construction with the target on the hyperplane itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._text import fmt as _fmt, jvec as _jvec
from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    CoincidentPointsError,
    NotInDWSError,
    NotOnBarrierError,
    NumericalDegeneracyError,
)
from .geometry import (
    CanonicalTransform,
    Scenario,
    _as_vector,
    _require_canonical,
    apollonius,
    pair_geometry,
)
from .kind import (
    DEFENDERS_WIN,
    ON_BARRIER,
    PIECE_B3,
    _governing_piece,
    evaluate_kind,
)

CASE_ONE_EFFECTIVE = "one_effective"
CASE_TWO_M_NONZERO = "two_effective_m12_nonzero"
CASE_TWO_M_ZERO = "two_effective_m12_zero"
CASE_BARRIER = "barrier"


def heading(frm, to, tol: float = DEFAULT_TOLS.abs) -> np.ndarray:
    """Unit vector from one point toward another."""
    frm = _as_vector(frm, name="start point")
    to = _as_vector(to, n=frm.shape[0], name="end point")
    diff = to - frm
    norm = float(np.linalg.norm(diff))
    if norm <= tol:
        raise CoincidentPointsError("heading between coincident points is undefined")
    return diff / norm


def effective_defenders(scenario: Scenario,
                        tols: Tolerances = DEFAULT_TOLS) -> tuple[str, tuple[int, ...]]:
    """Which defenders bind the attacker's best breach point.

    A defender is solely effective when the bottom of its dominance ball
    lies strictly inside the other's ball (the intersection's lowest point
    is then that bottom, and only that defender's sphere is active there).
    Otherwise both defenders matter and the minimizer sits on the seam;
    the two-defender case splits on the defenders' height difference.
    Bottoms exactly on the other sphere count as two-effective.

    Requires a defender-winning state.
    """
    _require_canonical(scenario)
    if evaluate_kind(scenario, tols).outcome != DEFENDERS_WIN:
        raise NotInDWSError("state is not strictly defender-winning")
    ball1 = apollonius(scenario.x_a, scenario.x_d1, scenario.alpha)
    ball2 = apollonius(scenario.x_a, scenario.x_d2, scenario.alpha)
    depth1 = ball2.delta - float(np.linalg.norm(ball1.bottom() - ball2.theta))
    depth2 = ball1.delta - float(np.linalg.norm(ball2.bottom() - ball1.theta))
    if max(depth1, depth2) > tols.abs:
        # both cannot be strictly interior; keep the deeper one defensively
        index = 1 if depth1 >= depth2 else 2
        return CASE_ONE_EFFECTIVE, (index,)
    m12 = float(scenario.x_d1[-1] - scenario.x_d2[-1])
    scale = 1.0 + abs(float(scenario.x_d1[-1])) + abs(float(scenario.x_d2[-1]))
    if abs(m12) <= tols.abs * scale:
        return CASE_TWO_M_ZERO, (1, 2)
    return CASE_TWO_M_NONZERO, (1, 2)


@dataclass(frozen=True)
class DegreeSolution:
    """Saddle-point summary: target point, guaranteed height, unit headings.

    ``effective`` lists the binding defenders (1-based). Headings are None
    only when a player already stands on the target point.
    """

    case: str
    effective: tuple[int, ...]
    otp: np.ndarray
    value: float
    d1: np.ndarray | None
    d2: np.ndarray | None
    a: np.ndarray


def _heading_or_none(frm, to) -> np.ndarray | None:
    try:
        return heading(frm, to)
    except CoincidentPointsError:
        return None


def _seam_minimizer_tilted(a, m, w, ball, tols: Tolerances) -> np.ndarray:
    """Lowest seam point when the first-listed defender sits higher (m > 0).

    Solves the equal-distance constraint ``m z_n + a . z_lat = w`` against
    the sphere of the first defender's ball via its stationarity system:
    ``R1 = a a^T + m^2 I`` (positive definite for m != 0) carries the
    lateral solve, and the sign of the square root picks the lower of the
    two stationary points.
    """
    d = a.shape[0]
    theta, delta = ball.theta, ball.delta
    r1 = np.outer(a, a) + m**2 * np.eye(d)
    if np.linalg.cond(r1) > tols.cond_cap:
        raise NumericalDegeneracyError(
            f"seam system condition {np.linalg.cond(r1):.3g} beyond cap")
    r2 = (theta[-1] * m - w) * a - m**2 * theta[:-1]
    r3 = w**2 - 2.0 * theta[-1] * w * m + m**2 * (float(theta @ theta) - delta**2)
    sol_a = np.linalg.solve(r1, a)
    sol_r2 = np.linalg.solve(r1, r2)
    num = float(r2 @ sol_r2) - r3
    den = float(a @ sol_a)
    scale = 1.0 + abs(r3)
    if num < -tols.rel * scale:
        raise NumericalDegeneracyError(f"seam radicand {num} is negative")
    s = float(np.sqrt(max(num, 0.0) / den))
    p_lat = s * sol_a - sol_r2
    p_n = (w - float(a @ p_lat)) / m
    return np.append(p_lat, p_n)


def _seam_minimizer_level(geo, ball, tols: Tolerances) -> np.ndarray:
    """Lowest seam point for height-matched defenders (m = 0).

    The bisector is then vertical, fixing the lateral coordinates outright;
    the height drops out of the sphere equation.
    """
    aa = float(geo.a @ geo.a)
    p_lat = (geo.a * geo.w + geo.c @ ball.theta[:-1]) / aa
    rad = ball.delta**2 - float(np.sum((p_lat - ball.theta[:-1]) ** 2))
    if rad < -tols.rel * (1.0 + ball.delta**2):
        raise NumericalDegeneracyError(f"level-seam radicand {rad} is negative")
    p_n = ball.theta[-1] - float(np.sqrt(max(rad, 0.0)))
    return np.append(p_lat, p_n)


def solve_dws(scenario: Scenario, tols: Tolerances = DEFAULT_TOLS) -> DegreeSolution:
    """Saddle-point solution from a defender-winning state.

    Returns the optimal target point (lowest point of the dominance-ball
    intersection), the guaranteed capture height (its last coordinate), and
    unit headings for all players. Under optimal play every player runs
    straight at the target and capture happens there simultaneously with
    the binding defenders.
    """
    case, effective = effective_defenders(scenario, tols)
    if case == CASE_ONE_EFFECTIVE:
        i = effective[0]
        ball = apollonius(scenario.x_a, scenario.x_d1 if i == 1 else scenario.x_d2,
                          scenario.alpha)
        otp = ball.bottom()
    elif case == CASE_TWO_M_ZERO:
        geo = pair_geometry(scenario.x_d1, scenario.x_d2, scenario.alpha)
        ball = apollonius(scenario.x_a, scenario.x_d1, scenario.alpha)
        otp = _seam_minimizer_level(geo, ball, tols)
    else:
        m12 = float(scenario.x_d1[-1] - scenario.x_d2[-1])
        if m12 > 0.0:
            geo = pair_geometry(scenario.x_d1, scenario.x_d2, scenario.alpha)
            ball = apollonius(scenario.x_a, scenario.x_d1, scenario.alpha)
        else:
            geo = pair_geometry(scenario.x_d2, scenario.x_d1, scenario.alpha)
            ball = apollonius(scenario.x_a, scenario.x_d2, scenario.alpha)
        otp = _seam_minimizer_tilted(geo.a, abs(m12), geo.w, ball, tols)
    return DegreeSolution(
        case=case, effective=effective, otp=otp, value=float(otp[-1]),
        d1=_heading_or_none(scenario.x_d1, otp),
        d2=_heading_or_none(scenario.x_d2, otp),
        a=_heading_or_none(scenario.x_a, otp))


def otp_on_barrier(scenario: Scenario, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Optimal target point for a state exactly on the barrier.

    The equal-time point sits on the target hyperplane itself: directly
    below the governing dominance-ball center on a single-defender piece,
    or at the closed-form seam foot on the composite piece. All binding
    defenders and the attacker arrive simultaneously.
    """
    _require_canonical(scenario)
    outcome = evaluate_kind(scenario, tols)
    if outcome.outcome != ON_BARRIER:
        raise NotOnBarrierError(
            f"state classifies as {outcome.outcome}, not on the barrier")
    piece, _, owner, _ = _governing_piece(scenario, tols)
    if piece == PIECE_B3:
        geo = pair_geometry(scenario.x_d1, scenario.x_d2, scenario.alpha)
        ball1 = apollonius(scenario.x_a, scenario.x_d1, scenario.alpha)
        aa = float(geo.a @ geo.a)
        p_lat = (geo.c @ ball1.theta[:-1] + geo.a * geo.w) / aa
    else:
        x_d = scenario.x_d1 if owner == 1 else scenario.x_d2
        ball = apollonius(scenario.x_a, x_d, scenario.alpha)
        p_lat = ball.theta[:-1]
    return np.append(p_lat, 0.0)


def barrier_solution(scenario: Scenario, tols: Tolerances = DEFAULT_TOLS) -> DegreeSolution:
    """Degree solution for an on-barrier state (value zero)."""
    otp = otp_on_barrier(scenario, tols)
    piece, _, owner, _ = _governing_piece(scenario, tols)
    effective = (1, 2) if piece == PIECE_B3 else (owner,)
    return DegreeSolution(
        case=CASE_BARRIER, effective=effective, otp=otp, value=float(otp[-1]),
        d1=_heading_or_none(scenario.x_d1, otp),
        d2=_heading_or_none(scenario.x_d2, otp),
        a=_heading_or_none(scenario.x_a, otp))


# ---------------------------------------------------------------------------
# payoffs
# ---------------------------------------------------------------------------

def payoff_capture_height(point) -> float:
    """Terminal payoff at capture: distance from the capture point to the
    guarded hyperplane (zero if capture happens on or past it)."""
    p = _as_vector(point, name="capture point")
    return max(float(p[-1]), 0.0)


def payoff_final_separation(x_d1, x_d2, x_a) -> float:
    """Terminal payoff at breach: closest defender's distance to the attacker."""
    x_a = _as_vector(x_a, name="attacker position")
    d1 = float(np.linalg.norm(_as_vector(x_d1, n=x_a.shape[0], name="defender 1") - x_a))
    d2 = float(np.linalg.norm(_as_vector(x_d2, n=x_a.shape[0], name="defender 2") - x_a))
    return min(d1, d2)


# ---------------------------------------------------------------------------
# solution wire format
# ---------------------------------------------------------------------------

def solution_to_json(sol: DegreeSolution,
                     transform: CanonicalTransform | None = None) -> str:
    """Serialize a solution; with a transform, adds the world-frame view."""

    def headings_block(d1, d2, a):
        parts = []
        parts.append(f'"d1": {_jvec(d1) if d1 is not None else "null"}')
        parts.append(f'"d2": {_jvec(d2) if d2 is not None else "null"}')
        parts.append(f'"a": {_jvec(a) if a is not None else "null"}')
        return "{" + ", ".join(parts) + "}"

    effective = "[" + ", ".join(str(i) for i in sol.effective) + "]"
    body = (f'"case": "{sol.case}", "effective": {effective}, '
            f'"otp": {_jvec(sol.otp)}, "value": {_fmt(sol.value)}, '
            f'"headings": {headings_block(sol.d1, sol.d2, sol.a)}')
    if transform is not None:
        w = transform
        world = (f'"otp": {_jvec(w.to_world(sol.otp))}, '
                 '"headings": ' + headings_block(
                     None if sol.d1 is None else w.dir_to_world(sol.d1),
                     None if sol.d2 is None else w.dir_to_world(sol.d2),
                     None if sol.a is None else w.dir_to_world(sol.a)))
        body += ', "world": {' + world + "}"
    return "{" + body + "}\n"
