"""Measured continuous greedy ascent for symmetric objectives over a
down-monotone polytope.

Each discrete step of width delta moves y along the best feasible direction
scaled per coordinate by (1 - y_u), then zeroes any coordinate whose partial
derivative has turned negative; zeroing can only increase F and restores the
"nothing below y is better" condition the symmetric value analysis leans on.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .multilinear import Estimator, MultilinearEvaluator, Point
from .polytope import Polytope, horizon
from .reports import CheckReport
from .setfn import SetFunction

# strict-negativity margin for the cleanup test in exact mode; sampled mode
# compares against -2 sigma of the derivative estimate instead, so that noise
# alone cannot zero a coordinate
EXACT_NEGATIVE_MARGIN = 1e-12


@dataclass(frozen=True)
class McgConfig:
    """T defaults to horizon(P) but never below 1 (the value bound needs
    T >= 1; membership of the output is then only guaranteed up to T_P).
    steps defaults to 100 n; the theoretical step size T/ceil(n^5 T) is
    admissible but infeasible beyond tiny n, so runs record whether the
    theoretical regime held."""

    T: float | None = None
    steps: int | None = None
    estimator: Estimator = field(default_factory=Estimator)
    record_trajectory: bool = True

    def resolve(self, n: int, P: Polytope) -> tuple[float, int, float]:
        T = self.T if self.T is not None else max(1.0, horizon(P))
        if T <= 0:
            raise ValueError("time horizon must be positive")
        steps = self.steps if self.steps is not None else max(1, 100 * n)
        if steps < 1:
            raise ValueError("steps must be at least 1")
        return T, steps, T / steps


@dataclass(frozen=True)
class TrajectoryStep:
    """State produced by one step: weights/direction seen at t_start, the
    point and value after the update and cleanup at t_end."""

    t_start: float
    t_end: float
    y_end: np.ndarray
    w: np.ndarray
    direction: np.ndarray
    value_end: float
    zeroed: int


@dataclass
class Trajectory:
    T: float
    delta: float
    n: int
    theoretical_regime: bool
    y_start: np.ndarray
    value_start: float
    steps: list[TrajectoryStep] = field(default_factory=list)

    def final_value(self) -> float:
        return self.steps[-1].value_end if self.steps else self.value_start


def _negative(grad_u: float, sigma_u: float | None) -> bool:
    if sigma_u is None:
        return grad_u < -EXACT_NEGATIVE_MARGIN
    return grad_u < -2.0 * sigma_u


def run_mcg(f: SetFunction, P: Polytope, cfg: McgConfig | None = None) -> tuple[Point, Trajectory]:
    """Run the ascent and return (y(T), trajectory).

    Expects the singleton-feasibility reduction to have been applied (drop
    every u with 1_u not in P) -- see ``preprocess_reduction1``.  A
    non-symmetric objective only voids the value guarantee, so it warns and
    proceeds.
    """
    cfg = cfg or McgConfig()
    n = f.n
    if n == 0:
        traj = Trajectory(0.0, 0.0, 0, True, np.zeros(0), 0.0)
        return Point.zeros(0), traj
    if not f.symmetric:
        warnings.warn("objective not flagged symmetric: the value guarantee is void", stacklevel=2)
    T, steps, delta = cfg.resolve(n, P)
    ev = MultilinearEvaluator(f, cfg.estimator)
    sampled = cfg.estimator.mode == "sampled"

    y = np.zeros(n)
    value, grad, sigma = ev.value_and_partials(y, stream=(0, 0))
    traj = Trajectory(T, delta, n, delta <= n ** -5.0, y.copy(), value)

    for i in range(steps):
        if sampled and i > 0:
            value, grad, sigma = ev.value_and_partials(y, stream=(i, 0))
        w = (1.0 - y) * grad  # w_u = F(y v 1_u) - F(y) by multilinearity
        direction = P.linear_maximize(w)
        y = y + delta * direction * (1.0 - y)
        value, grad, sigma = ev.value_and_partials(y, stream=(i, 1))
        zeroed = 0
        for u in range(n):
            if y[u] > 0.0 and _negative(grad[u], None if sigma is None else sigma[u]):
                y[u] = 0.0
                zeroed += 1
                # the zeroing moves y, so later coordinates see fresh derivatives
                value, grad, sigma = ev.value_and_partials(y, stream=(i, 2, u))
        if cfg.record_trajectory:
            traj.steps.append(
                TrajectoryStep(delta * i, delta * (i + 1), y.copy(), w, direction, value, zeroed)
            )
    return Point(y), traj


def check_feasibility_invariants(
    traj: Trajectory, P: Polytope, T: float | None = None, tol: float = 1e-9
) -> CheckReport:
    """Scaled membership y(t)/t in P at every recorded step, plus plain
    membership y(t) in P whenever t <= T_P."""
    t_p = horizon(P)
    bad: dict[str, float] = {}
    for step in traj.steps:
        t = step.t_end
        if not P.membership(step.y_end / t, tol):
            bad.setdefault("scaled_membership_t", t)
        if t <= t_p + 1e-15 and not P.membership(step.y_end, tol):
            bad.setdefault("membership_t", t)
    return CheckReport(
        "trajectory feasibility",
        not bad,
        details={"horizon": t_p, "T": T if T is not None else traj.T, **bad},
    )


def trajectory_csv(traj: Trajectory) -> str:
    """Columns: t, |y|, F_estimate, zeroed_coordinate_count."""
    buf = io.StringIO()
    buf.write("t,mass,F_estimate,zeroed_coordinate_count\n")
    buf.write(f"{0.0!r},{traj.y_start.sum()!r},{traj.value_start!r},0\n")
    for s in traj.steps:
        buf.write(f"{s.t_end!r},{s.y_end.sum()!r},{s.value_end!r},{s.zeroed}\n")
    return buf.getvalue()
