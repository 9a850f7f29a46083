"""Geodesic flow by implicit midpoint steps, with conservation monitors."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .integral import IntegralCoeffs, hamiltonian_eval
from .metric import ConformalMetric, Metric, SemiGeodesicMetric, TorusPoint

# triple-jump weights that lift a symmetric second-order step to fourth order
_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1


class FlowError(RuntimeError):
    pass


@dataclass(frozen=True)
class PhaseState:
    position: TorusPoint
    momentum: tuple[float, float]
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", TorusPoint(*map(float, self.position)))
        object.__setattr__(self, "momentum", tuple(map(float, self.momentum)))
        if not all(math.isfinite(v) for v in (*self.position, *self.momentum, self.time)):
            raise ValueError("phase state has non-finite entries")

    def as_array(self) -> np.ndarray:
        return np.array([*self.position, *self.momentum])

    @classmethod
    def from_array(cls, z, time: float) -> "PhaseState":
        return cls(TorusPoint(z[0], z[1]), (z[2], z[3]), time)

    def flipped(self) -> "PhaseState":
        return PhaseState(self.position, (-self.momentum[0], -self.momentum[1]), self.time)


@dataclass
class Trajectory:
    states: list[PhaseState] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    monitors: list[list[float]] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    @property
    def final(self) -> PhaseState:
        return self.states[-1]

    def records(self):
        for st, h, mon in zip(self.states, self.energy, self.monitors):
            yield {"time": st.time, "u1": st.position.u1, "u2": st.position.u2,
                   "p1": st.momentum[0], "p2": st.momentum[1], "H": h, "monitors": list(mon)}


def vector_field(metric: Metric):
    """Right-hand side of Hamilton's equations for z = (u1, u2, p1, p2)."""
    if isinstance(metric, SemiGeodesicMetric):
        grad = metric.g.grad

        def rhs(z):
            g, g1, g2 = grad(z[0], z[1])
            if not g > 0:
                raise FlowError(f"metric positivity lost at ({z[0]:.6g}, {z[1]:.6g}): g = {g}")
            X = z[2] / g
            c = X * X / g
            return np.array([X / g, z[3], c * g1, c * g2])
    elif isinstance(metric, ConformalMetric):
        grad = metric.lam.grad

        def rhs(z):
            lam, l1, l2 = grad(z[0], z[1])
            if not lam > 0:
                raise FlowError(f"metric positivity lost at ({z[0]:.6g}, {z[1]:.6g}): Lambda = {lam}")
            c = (z[2] * z[2] + z[3] * z[3]) / (2.0 * lam * lam)
            return np.array([z[2] / lam, z[3] / lam, c * l1, c * l2])
    else:
        raise TypeError(f"unsupported metric {type(metric).__name__}")
    return rhs


def midpoint_step(rhs, z: np.ndarray, dt: float, tol: float = 1e-13, max_iter: int = 60) -> np.ndarray:
    """One implicit midpoint step, solved by fixed-point iteration."""
    k = rhs(z)
    for _ in range(max_iter):
        k_new = rhs(z + 0.5 * dt * k)
        delta = float(np.max(np.abs(k_new - k))) * abs(dt)
        k = k_new
        if delta <= tol * (1.0 + float(np.max(np.abs(z)))):
            return z + dt * k
    raise FlowError(f"implicit midpoint iteration did not converge (last update {delta:.3g})")


def integrate(metric: Metric, initial: PhaseState, T: float, dt: float,
              monitors: Sequence[IntegralCoeffs] = (), stride: int = 1, order: int = 2,
              tol: float = 1e-13) -> Trajectory:
    """Integrate the geodesic flow from ``initial`` for time T.

    ``order=2`` is plain implicit midpoint; ``order=4`` composes three midpoint
    substeps with triple-jump weights. Both are symplectic and time-symmetric.
    """
    if not (dt > 0 and T > 0):
        raise ValueError("dt and T must be positive")
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    if stride < 1:
        raise ValueError("stride must be at least 1")
    rhs = vector_field(metric)
    steps = int(round(T / dt))
    if abs(steps * dt - T) > 1e-9 * T:
        raise ValueError("T must be an integer multiple of dt")
    subs = (dt,) if order == 2 else (_W1 * dt, _W0 * dt, _W1 * dt)
    traj = Trajectory()

    def record(z, t):
        st = PhaseState.from_array(z, t)
        try:
            h = hamiltonian_eval(metric, st.position, st.momentum)
        except ValueError as exc:
            raise FlowError(f"metric positivity lost at t = {t:.6g}: {exc}") from exc
        traj.states.append(st)
        traj.energy.append(h)
        traj.monitors.append([F.evaluate(metric, st.position, st.momentum) for F in monitors])

    z = initial.as_array()
    t0 = initial.time
    if hamiltonian_eval(metric, initial.position, initial.momentum) <= 0:
        raise ValueError("initial state has zero energy")
    record(z, t0)
    for i in range(1, steps + 1):
        for h in subs:
            z = midpoint_step(rhs, z, h, tol)
        if i % stride == 0 or i == steps:
            record(z, t0 + i * dt)
    return traj


@dataclass(frozen=True)
class Drift:
    name: str
    max_drift: float
    relative_drift: float


def conservation_report(traj: Trajectory, names: Sequence[str] | None = None) -> list[Drift]:
    if not traj.states:
        raise ValueError("empty trajectory")
    series = [("H", np.array(traj.energy))]
    nmon = len(traj.monitors[0])
    names = list(names) if names is not None else [f"F{i}" for i in range(nmon)]
    for i in range(nmon):
        series.append((names[i], np.array([m[i] for m in traj.monitors])))
    out = []
    for name, v in series:
        d = float(np.max(np.abs(v - v[0])))
        out.append(Drift(name, d, d / abs(float(v[0])) if v[0] != 0 else math.inf))
    return out


def reversibility_error(metric: Metric, initial: PhaseState, T: float, dt: float, order: int = 2) -> float:
    """Integrate forward, flip momenta, integrate again and compare with the start."""
    fwd = integrate(metric, initial, T, dt, stride=int(round(T / dt)), order=order)
    back = integrate(metric, fwd.final.flipped(), T, dt, stride=int(round(T / dt)), order=order)
    z0 = initial.as_array()
    z1 = back.final.flipped().as_array()
    return float(np.max(np.abs(z1 - z0)))


def convergence_factor(metric: Metric, initial: PhaseState, T: float, dt: float, order: int = 2) -> float:
    """|y_h - y_h/2| / |y_h/2 - y_h/4| for the endpoint; 2**order for a clean method."""
    ends = []
    for h in (dt, dt / 2, dt / 4):
        n = int(round(T / h))
        ends.append(integrate(metric, initial, T, h, stride=n, order=order).final.as_array())
    e1 = float(np.linalg.norm(ends[0] - ends[1]))
    e2 = float(np.linalg.norm(ends[1] - ends[2]))
    return e1 / e2


def write_ndjson(traj: Trajectory, path, header: dict | None = None) -> None:
    with open(path, "w") as fh:
        if header is not None:
            fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        for rec in traj.records():
            fh.write(json.dumps(rec) + "\n")
