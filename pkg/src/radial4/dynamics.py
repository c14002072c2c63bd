"""Reduced-equation dynamics: first-order system, adaptive integration, events.

The fourth-order equation v'''' - K2 v'' + K0 v = v^p is integrated as the
first-order system y = (v, v', v'', v''').  The integrator is an embedded
Dormand-Prince 5(4) pair with PI step-size control, cubic Hermite dense
output, and terminal events refined by bisection with single-step
re-integration from the bracketing node (so event states carry the full
integration accuracy, not just the interpolant's).

The flow conserves the first integral

    E(y) = -v' v''' + (v'')^2/2 + K2 (v')^2/2 - K0 v^2/2 + v^{p+1}/(p+1),

which every trajectory monitors at its nodes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BlowUpError,
    ConvergenceError,
    DomainError,
    StepFailureError,
    TrajectoryDomainError,
    ValidationError,
)
from .params import ProblemParams, derive_coefficients

BLOWUP_BOUND = 1e12
_MIN_TOL, _MAX_TOL = 1e-13, 1e-6

# Dormand-Prince 5(4) tableau (FSAL).
_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
# Error weights: 5th-order solution minus 4th-order embedded estimate.
_E = (
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


@dataclass(frozen=True)
class OdeState:
    """Phase point (t, (v, v', v'', v''')) of the reduced system."""

    t: float
    y: Tuple[float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        y = tuple(float(c) for c in self.y)
        if len(y) != 4:
            raise ValidationError(f"state vector must have 4 components, got {len(y)}")
        object.__setattr__(self, "y", y)


class ReducedProblem:
    """Coefficient carrier (K2, K0, p) for the reduced equation."""

    def __init__(self, K2: float, K0: float, p: float):
        if not p > 1.0:
            raise ValidationError(f"exponent p must exceed 1, got p={p}")
        self.K2 = float(K2)
        self.K0 = float(K0)
        self.p = float(p)

    @classmethod
    def from_params(cls, params: ProblemParams) -> "ReducedProblem":
        coeff = derive_coefficients(params)
        return cls(coeff.K2, coeff.K0, params.p)

    def rhs(self, y) -> np.ndarray:
        return rhs(y, self.K2, self.K0, self.p)

    def energy(self, y) -> float:
        return energy(y, self.K2, self.K0, self.p)

    def __repr__(self):
        return f"ReducedProblem(K2={self.K2}, K0={self.K0}, p={self.p})"


def rhs(y, K2: float, K0: float, p: float) -> np.ndarray:
    """Right-hand side of the first-order system; requires v >= 0."""
    if isinstance(y, OdeState):
        y = y.y
    v = y[0]
    if v < 0.0:
        raise DomainError(f"rhs evaluated at v={v} < 0; nonlinearity undefined")
    return np.array([y[1], y[2], y[3], v ** p + K2 * y[2] - K0 * v], dtype=float)


def energy(y, K2: float, K0: float, p: float) -> float:
    """Conserved first integral; requires v >= 0."""
    if isinstance(y, OdeState):
        y = y.y
    v = y[0]
    if v < 0.0:
        raise DomainError(f"energy evaluated at v={v} < 0")
    return (
        -y[1] * y[3]
        + 0.5 * y[2] ** 2
        + 0.5 * K2 * y[1] ** 2
        - 0.5 * K0 * v * v
        + v ** (p + 1.0) / (p + 1.0)
    )


@dataclass(frozen=True)
class Event:
    """Terminal event: integration stops at the first root of fn.

    direction +1 triggers on rising crossings (g goes from < 0 to >= 0),
    -1 on falling crossings, 0 on both.  A g that starts at exactly zero
    does not trigger until it has left zero first.
    """

    name: str
    fn: Callable[[float, np.ndarray], float]
    direction: int = 0


@dataclass
class Trajectory:
    """Accepted integration nodes plus derivative data for dense output."""

    problem: ReducedProblem
    ts: np.ndarray
    ys: np.ndarray
    fs: np.ndarray
    n_accepted: int
    n_rejected: int
    stop_reason: Tuple = ("t_end",)
    event_name: Optional[str] = None
    event_t: Optional[float] = None

    @property
    def states(self) -> List[OdeState]:
        return [OdeState(float(t), tuple(y)) for t, y in zip(self.ts, self.ys)]

    @property
    def t0(self) -> float:
        return float(self.ts[0])

    @property
    def t_end(self) -> float:
        return float(self.ts[-1])

    @property
    def step_stats(self) -> dict:
        return {"accepted": self.n_accepted, "rejected": self.n_rejected}

    @property
    def energies(self) -> np.ndarray:
        y = self.ys
        v = y[:, 0]
        if np.any(v < -1e-10 * max(1.0, float(np.max(np.abs(v), initial=0.0)))):
            raise DomainError("trajectory contains states with v < 0")
        v = np.maximum(v, 0.0)
        K2, K0, p = self.problem.K2, self.problem.K0, self.problem.p
        return (
            -y[:, 1] * y[:, 3]
            + 0.5 * y[:, 2] ** 2
            + 0.5 * K2 * y[:, 1] ** 2
            - 0.5 * K0 * v ** 2
            + v ** (p + 1.0) / (p + 1.0)
        )

    def sample(self, t) -> np.ndarray:
        """Cubic Hermite dense output at time(s) t within the node span."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        if np.any(tq < self.ts[0] - 1e-12) or np.any(tq > self.ts[-1] + 1e-12):
            raise ValidationError("dense output requested outside the integrated span")
        tq = np.clip(tq, self.ts[0], self.ts[-1])
        idx = np.clip(np.searchsorted(self.ts, tq, side="right") - 1, 0, len(self.ts) - 2)
        t0 = self.ts[idx]
        h = self.ts[idx + 1] - t0
        h = np.where(h <= 0.0, 1.0, h)
        th = ((tq - t0) / h)[:, None]
        y0, y1 = self.ys[idx], self.ys[idx + 1]
        f0, f1 = self.fs[idx], self.fs[idx + 1]
        h2 = th * th
        h3 = h2 * th
        out = (
            (2.0 * h3 - 3.0 * h2 + 1.0) * y0
            + (h3 - 2.0 * h2 + th) * h[:, None] * f0
            + (-2.0 * h3 + 3.0 * h2) * y1
            + (h3 - h2) * h[:, None] * f1
        )
        return out[0] if scalar else out

    def rows(self):
        """(t, v, dv, d2v, d3v, E) rows for CSV output."""
        es = self.energies
        header = ("t", "v", "dv", "d2v", "d3v", "E")
        rows = [
            (float(self.ts[i]), *[float(c) for c in self.ys[i]], float(es[i]))
            for i in range(len(self.ts))
        ]
        return header, rows


def _error_norm(err: np.ndarray, y_old: np.ndarray, y_new: np.ndarray, tol: float) -> float:
    scale = tol + tol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _dp_step(f, t: float, y: np.ndarray, h: float, k1: Optional[np.ndarray] = None):
    """One Dormand-Prince step: returns (y_new, f_new, err_vector)."""
    k = [None] * 7
    k[0] = f(t, y) if k1 is None else k1
    for i in range(1, 7):
        acc = _A[i][0] * k[0]
        for j in range(1, i):
            if _A[i][j] != 0.0:
                acc = acc + _A[i][j] * k[j]
        k[i] = f(t + _C[i] * h, y + h * acc)
    y_new = y + h * (
        _A[6][0] * k[0]
        + _A[6][2] * k[2]
        + _A[6][3] * k[3]
        + _A[6][4] * k[4]
        + _A[6][5] * k[5]
    )
    # k[6] was evaluated at (t+h, y_new) by construction of the last row
    err = h * (
        _E[0] * k[0]
        + _E[2] * k[2]
        + _E[3] * k[3]
        + _E[4] * k[4]
        + _E[5] * k[5]
        + _E[6] * k[6]
    )
    return y_new, k[6], err


def _initial_step(f, t0, y0, f0, tol, span):
    scale = tol + tol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    try:
        f1 = f(t0 + h0, y0 + h0 * f0)
        d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    except DomainError:
        d2 = d1
    dm = max(d1, d2)
    h1 = (0.01 / dm) ** 0.2 if dm > 1e-15 else max(1e-6, h0 * 1e-3)
    return min(100.0 * h0, h1, span)


def integrate(
    y0: OdeState,
    t_end: float,
    tol: float,
    problem: ReducedProblem,
    events: Sequence[Event] = (),
    max_step: float = math.inf,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Integrate forward from y0.t to t_end with local error per step <= tol.

    Stops early at the first triggered terminal event.  Raises BlowUpError
    (with escape time) when the state norm passes 1e12, StepFailureError
    when the step size underflows away from the v = 0 boundary, and
    TrajectoryDomainError when the solution runs into v = 0 so that the
    nonlinearity cannot be evaluated.  Partial trajectories ride along on
    those exceptions.
    """
    if not (_MIN_TOL <= tol <= _MAX_TOL):
        raise ValidationError(f"tol must lie in [{_MIN_TOL}, {_MAX_TOL}], got {tol}")
    t0 = float(y0.t)
    t_end = float(t_end)
    if not t_end > t0:
        raise ValidationError(f"t_end={t_end} must exceed the initial time {t0}")

    K2, K0, p = problem.K2, problem.K0, problem.p

    def f(t, y):
        return rhs(y, K2, K0, p)

    y = np.array(y0.y, dtype=float)
    if y[0] < 0.0:
        raise DomainError(f"initial state has v={y[0]} < 0")
    t = t0
    f_now = f(t, y)

    ts: List[float] = [t]
    ys: List[np.ndarray] = [y.copy()]
    fs: List[np.ndarray] = [f_now.copy()]
    n_acc = 0
    n_rej = 0

    ev_prev = [e.fn(t, y) for e in events]

    def build(stop_reason, ev_name=None, ev_t=None) -> Trajectory:
        return Trajectory(
            problem=problem,
            ts=np.array(ts),
            ys=np.array(ys),
            fs=np.array(fs),
            n_accepted=n_acc,
            n_rejected=n_rej,
            stop_reason=stop_reason,
            event_name=ev_name,
            event_t=ev_t,
        )

    h = min(_initial_step(f, t, y, f_now, tol, t_end - t0), max_step)
    err_prev = 1.0
    steps = 0
    while t < t_end:
        if steps >= max_steps:
            raise ConvergenceError(
                f"integration exceeded {max_steps} steps before reaching t_end={t_end}"
            )
        steps += 1
        h = min(h, t_end - t, max_step)
        h_floor = 1e-14 * max(1.0, abs(t))
        if h < h_floor:
            if y[0] <= 1e-9 * max(1.0, float(np.max(np.abs(ys[0])))):
                raise TrajectoryDomainError(
                    f"solution reached the v=0 boundary near t={t}",
                    crossing_time=t,
                    trajectory=build(("domain", t)),
                )
            raise StepFailureError(f"step size underflowed at t={t} (h={h})")

        try:
            y_new, f_new, err_vec = _dp_step(f, t, y, h, k1=f_now)
        except DomainError:
            n_rej += 1
            h *= 0.5
            continue

        if y_new[0] < 0.0:
            n_rej += 1
            h *= 0.5
            continue

        err = _error_norm(err_vec, y, y_new, tol)
        if not math.isfinite(err):
            n_rej += 1
            h *= 0.25
            continue
        if err > 1.0:
            n_rej += 1
            h *= max(0.1, 0.9 * err ** -0.2)
            continue

        # Accepted.
        n_acc += 1
        t_new = t + h

        triggered = None
        for i, e in enumerate(events):
            g_new = e.fn(t_new, y_new)
            g_old = ev_prev[i]
            rising = g_old < 0.0 and g_new >= 0.0
            falling = g_old > 0.0 and g_new <= 0.0
            hit = (e.direction > 0 and rising) or (e.direction < 0 and falling) or (
                e.direction == 0 and (rising or falling)
            )
            if hit and triggered is None:
                triggered = (i, e, g_old)
            ev_prev[i] = g_new

        if triggered is not None:
            i, e, g_old = triggered
            t_ev, y_ev, f_ev = _refine_event(f, t, y, f_now, h, e, g_old)
            ts.append(t_ev)
            ys.append(y_ev)
            fs.append(f_ev)
            return build(("event", e.name, t_ev), ev_name=e.name, ev_t=t_ev)

        t, y, f_now = t_new, y_new, f_new
        ts.append(t)
        ys.append(y.copy())
        fs.append(f_now.copy())

        if float(np.max(np.abs(y))) > BLOWUP_BOUND:
            raise BlowUpError(
                f"trajectory escaped |y| > {BLOWUP_BOUND:g} at t={t}",
                escape_time=t,
                trajectory=build(("blowup", t)),
            )

        fac = 0.9 * err ** -0.2 * err_prev ** 0.04 if err > 1e-12 else 5.0
        h *= min(5.0, max(0.2, fac))
        err_prev = max(err, 1e-12)

    return build(("t_end",))


def _refine_event(f, t_node, y_node, f_node, h, event: Event, g_old: float):
    """Locate an event root inside one accepted step by substep bisection.

    Each probe re-integrates a single Dormand-Prince step of size delta
    from the bracketing node, so the refined state has one-step accuracy.
    """
    lo, hi = 0.0, h
    y_hi = None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-13 * max(1.0, abs(t_node) + h):
            break
        try:
            y_mid, _, _ = _dp_step(f, t_node, y_node, mid, k1=f_node)
            g_mid = event.fn(t_node + mid, y_mid)
        except DomainError:
            # Stage poked past v=0: the crossing is earlier.
            hi = mid
            continue
        if (g_old > 0.0 and g_mid <= 0.0) or (g_old < 0.0 and g_mid >= 0.0):
            hi = mid
            y_hi = y_mid
        else:
            lo = mid
    delta = hi
    if y_hi is None:
        y_hi, _, _ = _dp_step(f, t_node, y_node, delta, k1=f_node)
    y_hi = np.maximum(y_hi, [0.0, -math.inf, -math.inf, -math.inf])
    t_ev = t_node + delta
    f_ev = f(t_ev, y_hi)
    return t_ev, y_hi, f_ev


def detect_extrema(traj: Trajectory, tol_t: float = 1e-10) -> List[Tuple[float, str]]:
    """Times and kinds of the extrema of v along a trajectory.

    Roots of v' are bracketed at the accepted nodes and refined to tol_t
    by bisection against single-step re-integration from the bracketing
    node.  Kind comes from the sign of v'' at the root; |v''| < 1e-9 emits
    a degenerate-extremum warning.  A trajectory that starts at a rest
    point, or is constant to machine precision, reports no extremum
    there.  The right endpoint is treated as open so a full period
    [0, 2P] reports 4 alternating extrema.
    """
    ts, ys, fs = traj.ts, traj.ys, traj.fs
    vp = ys[:, 1]
    v_scale = max(1.0, float(np.max(np.abs(ys[:, 0]))))
    if float(np.max(np.abs(vp))) <= 1e-13 * v_scale:
        return []

    K2, K0, p = traj.problem.K2, traj.problem.K0, traj.problem.p

    def f(t, y):
        return rhs(y, K2, K0, p)

    span = ts[-1] - ts[0]
    right_cut = ts[-1] - 1e-9 * max(1.0, abs(span))
    found: List[Tuple[float, str]] = []

    def classify(t_star, y_star):
        vpp = y_star[2]
        if abs(vpp) < 1e-9:
            warnings.warn(
                f"degenerate extremum at t={t_star}: |v''|={abs(vpp)} < 1e-9",
                RuntimeWarning,
                stacklevel=2,
            )
        kind = "min" if vpp > 0.0 else "max"
        found.append((float(t_star), kind))

    vp_scale = max(float(np.max(np.abs(vp))), 1e-30)
    at_rest = abs(ys[0, 2]) < 1e-9 and abs(ys[0, 3]) < 1e-9
    if abs(vp[0]) <= 1e-12 * vp_scale and not at_rest:
        classify(ts[0], ys[0])

    for k in range(len(ts) - 1):
        g0, g1 = vp[k], vp[k + 1]
        if g0 == 0.0:
            continue  # node root already handled (left endpoint or previous refine)
        crossed = (g0 > 0.0 and g1 <= 0.0) or (g0 < 0.0 and g1 >= 0.0)
        if not crossed:
            continue
        ev = Event("dv_zero", lambda t, y: y[1], 0)
        t_star, y_star, _ = _refine_event(f, ts[k], ys[k], fs[k], ts[k + 1] - ts[k], ev, g0)
        if t_star >= right_cut:
            continue
        if found and abs(t_star - found[-1][0]) <= max(tol_t, 1e-9 * max(1.0, abs(t_star))):
            continue
        classify(t_star, y_star)
    return found
