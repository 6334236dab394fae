from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..models.route import RouteProfile
from ..models.vehicle import DriverParams

_EPS_S = 1e-6  # m, splits a speed-limit step into two grid nodes


@dataclass(frozen=True)
class ReferenceSpeed:
    """Reference speed over distance, linear between grid nodes."""

    s: np.ndarray
    v: np.ndarray

    def __call__(self, s: float) -> float:
        return float(np.interp(s, self.s, self.v))

    @property
    def end(self) -> float:
        return float(self.s[-1])


@dataclass(frozen=True, slots=True)
class PedalCommand:
    app: float = 0.0
    bpp: float = 0.0


@dataclass(frozen=True, slots=True)
class PIState:
    integral: float = 0.0


def _limit_grid(route: RouteProfile, params: DriverParams) -> tuple[np.ndarray, np.ndarray]:
    s_pts = route.distances
    cap = params.margin * route.speed_limits
    s_out: list[np.ndarray] = []
    v_out: list[np.ndarray] = []
    for i in range(len(s_pts) - 1):
        a, b = s_pts[i], s_pts[i + 1]
        nodes = np.arange(a, b, params.resolution)
        # close the segment just before the next limit takes over
        nodes = np.append(nodes[nodes < b - _EPS_S], b - _EPS_S)
        s_out.append(nodes)
        v_out.append(np.full(nodes.shape, cap[i]))
    s_out.append(np.array([s_pts[-1]]))
    v_out.append(np.array([0.0]))
    return np.concatenate(s_out), np.concatenate(v_out)


def reference_speed(route: RouteProfile, params: DriverParams) -> ReferenceSpeed:
    """Speed-limit cap with a backward braking envelope and a forward launch envelope."""
    s, v = _limit_grid(route, params)
    v = v.copy()
    v[0] = 0.0
    n = len(s)
    two_dec = 2.0 * params.a_dec_max
    for i in range(n - 2, -1, -1):
        reach = math.sqrt(v[i + 1] * v[i + 1] + two_dec * (s[i + 1] - s[i]))
        if reach < v[i]:
            v[i] = reach
    two_acc = 2.0 * params.a_acc_max
    for i in range(1, n):
        reach = math.sqrt(v[i - 1] * v[i - 1] + two_acc * (s[i] - s[i - 1]))
        if reach < v[i]:
            v[i] = reach
    v[-1] = 0.0
    return ReferenceSpeed(s=s, v=v)


def target_speed(ref: ReferenceSpeed, s: float, params: DriverParams) -> float:
    """What the driver aims for at position `s`: the reference a short way ahead, never below creep."""
    if s >= ref.end:
        return 0.0
    return max(ref(min(s + params.lookahead, ref.end)), params.creep_speed)


def pedal_command(
    v: float, v_ref: float, dt: float, state: PIState, params: DriverParams
) -> tuple[PedalCommand, PIState]:
    if dt <= 0:
        raise ValueError("dt must be positive")
    e = v_ref - v
    integral = state.integral + e * dt
    u = params.k_p * e + params.k_i * integral
    if abs(u) > 1.0 and (u > 0) == (e > 0):
        # anti-windup: hold the integrator while the pedal is saturated
        integral = state.integral
        u = params.k_p * e + params.k_i * integral
    if u > 0:
        cmd = PedalCommand(app=min(u, 1.0), bpp=0.0)
    elif u < 0:
        cmd = PedalCommand(app=0.0, bpp=min(-u, 1.0))
    else:
        cmd = PedalCommand()
    return cmd, PIState(integral=integral)


def traction_cap(
    v: float, v_ref: float, resistive: float, m_eq: float, r_w: float, dt: float, params: DriverParams
) -> float:
    """Largest axle torque the driver lets through: reach `v_ref` in one step, never faster than `a_acc_max`."""
    a = min(params.a_acc_max, (v_ref - v) / dt)
    return max(m_eq * a + resistive, 0.0) * r_w
