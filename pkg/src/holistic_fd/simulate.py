"""Method-of-lines simulation of derived models on a periodic grid."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from holistic_fd._sweep import parallel_map
from holistic_fd.model import ModelSeries
from holistic_fd.stencil import Stencil, grid_operator

__all__ = [
    "GridState",
    "MomentSample",
    "MomentReport",
    "SimulationError",
    "StepSizeError",
    "combined_taps",
    "symbol_values",
    "max_symbol_modulus",
    "auto_dt",
    "integrate",
    "point_release",
    "point_release_moments",
    "predicted_moment_rates",
    "stability_max_growth",
    "stability_scan",
    "fastad_model",
    "back_model",
    "NAMED_MODELS",
    "trajectory_csv",
    "moments_csv",
    "STABLE_TOL",
    "RK4_REAL_LIMIT",
]

STABLE_TOL = 1e-12
AUTO_CFL = 0.4
# RK4 stability boundary on the negative real axis
RK4_REAL_LIMIT = 2.785


class SimulationError(RuntimeError):
    """Integration blew up; ``step`` is the offending step index."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class StepSizeError(ValueError):
    pass


@dataclass
class GridState:
    values: np.ndarray
    h: float
    time: float = 0.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def mass(self) -> float:
        return float(self.values.sum())


# {{{ stencils and symbols


Taps = Mapping[int, float]


def combined_taps(
    model: ModelSeries | Stencil | Taps, gamma: float, eps: float, h: float
) -> dict[int, float]:
    """Numeric taps s_r of du_j/dt = sum_r s_r u_{j+r}."""
    if isinstance(model, ModelSeries):
        return model.numeric_taps(gamma, eps, h)
    if isinstance(model, Stencil):
        return model.numeric_taps(h)
    return dict(sorted((int(r), float(c)) for r, c in model.items()))


def symbol_values(taps: Taps, thetas: np.ndarray) -> np.ndarray:
    """lambda(theta) = sum_r s_r exp(i r theta)."""
    lam = np.zeros(len(thetas), dtype=complex)
    for r, c in sorted(taps.items()):
        lam += c * np.exp(1j * r * thetas)
    return lam


def _thetas(samples: int) -> np.ndarray:
    if samples < 64:
        raise ValueError("at least 64 theta samples are required")
    # theta = 0 is always included so neutral modes are seen exactly
    return np.union1d(np.linspace(-math.pi, math.pi, samples), [0.0])


def max_symbol_modulus(taps: Taps, samples: int = 512) -> float:
    return float(np.max(np.abs(symbol_values(taps, _thetas(samples)))))


def auto_dt(taps: Taps) -> float:
    lam = max_symbol_modulus(taps)
    return AUTO_CFL / lam if lam > 0 else math.inf


# }}}


def _rhs(u: np.ndarray, taps: Taps) -> np.ndarray:
    out = np.zeros_like(u)
    for r, c in sorted(taps.items()):
        # (E^r u)_j = u_{j+r} with periodic wrap
        out += c * np.roll(u, -r)
    return out


def _rk4_step(u: np.ndarray, taps: Taps, dt: float) -> np.ndarray:
    k1 = _rhs(u, taps)
    k2 = _rhs(u + 0.5 * dt * k1, taps)
    k3 = _rhs(u + 0.5 * dt * k2, taps)
    k4 = _rhs(u + dt * k3, taps)
    return u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _sample_times(T: float, samples: int | Sequence[float]) -> list[float]:
    if isinstance(samples, int):
        if samples < 1:
            raise ValueError("need at least one sample")
        return [T * (i + 1) / samples for i in range(samples)]
    times = sorted(float(t) for t in samples)
    if any(t < 0 for t in times):
        raise ValueError("sample times must be non-negative")
    return times


def integrate(
    model: ModelSeries | Stencil | Taps,
    gamma: float,
    eps: float,
    state: GridState,
    dt: float | None,
    T: float,
    samples: int | Sequence[float] = 10,
    *,
    strict: bool = False,
) -> list[GridState]:
    """Classic RK4 with fixed steps, periodic in j.

    ``dt=None`` picks 0.4/max|lambda|.  Each interval between sample times
    is split into equal steps no longer than ``dt``, so samples land exactly
    on the requested times.  Returns the state at every sample time.
    """
    taps = combined_taps(model, gamma, eps, state.h)
    if len(state.values) < max((abs(r) for r in taps), default=0) * 2 + 1:
        raise ValueError("grid is narrower than the stencil")
    lam = max_symbol_modulus(taps)
    if dt is None:
        dt = AUTO_CFL / lam if lam > 0 else T
    if dt <= 0:
        raise ValueError("dt must be positive")
    if strict and lam > 0 and dt > RK4_REAL_LIMIT / lam:
        raise StepSizeError(
            f"dt={dt:.6g} exceeds the RK4 limit {RK4_REAL_LIMIT / lam:.6g} for max|lambda|={lam:.6g}"
        )
    u = state.values.copy()
    t = state.time
    out = []
    step = 0
    for ts in _sample_times(T, samples):
        span = ts - t
        if span < -1e-15:
            raise ValueError("sample times must not precede the initial time")
        n = max(0, math.ceil(span / dt - 1e-9))
        sub = span / n if n else 0.0
        for _ in range(n):
            # overflow is caught below, with the step index
            with np.errstate(over="ignore", invalid="ignore"):
                u = _rk4_step(u, taps, sub)
            step += 1
            if not np.all(np.isfinite(u)):
                raise SimulationError(f"non-finite values at step {step}", step)
        t = ts
        out.append(GridState(u.copy(), state.h, t))
    return out


# {{{ point release


def point_release(n: int, h: float, index: int | None = None) -> GridState:
    u = np.zeros(n)
    u[n // 2 if index is None else index] = 1.0
    return GridState(u, h)


def predicted_moment_rates(taps: Taps) -> tuple[float, float]:
    """Rates of mean and variance in index units for a point release.

    log G is linear in t with rate sum_r s_r z^(-r), so the index mean moves
    at -sum r s_r and the variance grows at sum r^2 s_r (given sum s_r = 0).
    """
    mean = -sum(r * c for r, c in taps.items())
    var = sum(r * r * c for r, c in taps.items())
    return mean, var


@dataclass(frozen=True)
class MomentSample:
    t: float
    mass: float
    mean_x: float
    var_x: float


@dataclass
class MomentReport:
    samples: list[MomentSample]
    h: float
    grid_points: int
    wrap_mass: float = 0.0
    contaminated: bool = False
    states: list[GridState] = field(default_factory=list, repr=False)

    @property
    def times(self) -> list[float]:
        return [s.t for s in self.samples]


def _moments(u: np.ndarray, h: float, origin: int) -> tuple[float, float, float]:
    j = np.arange(len(u)) - origin
    mass = float(u.sum())
    mj = float((j * u).sum()) / mass
    vj = float(((j - mj) ** 2 * u).sum()) / mass
    return mass, h * mj, h * h * vj


def point_release_moments(
    model: ModelSeries | Stencil | Taps,
    eps: float,
    h: float,
    T: float,
    dt: float | None = None,
    *,
    gamma: float = 1.0,
    samples: int | Sequence[float] = 10,
    margin: int = 8,
    wrap_tol: float = 1e-12,
    max_widenings: int = 4,
    strict: bool = False,
) -> MomentReport:
    """Release one unit at a grid point and track mass, mean and variance.

    The periodic grid starts at |mean| + 12 sigma + margin cells either side
    of the release point, using the rates predicted from the stencil.  If
    more than ``wrap_tol`` of |u| reaches the outer ``margin`` cells at any
    sample, the grid is doubled and the run repeated; the report is flagged
    when ``max_widenings`` doublings do not suffice.
    """
    taps = combined_taps(model, gamma, eps, h)
    mean_rate, var_rate = predicted_moment_rates(taps)
    width = max((abs(r) for r in taps), default=1)
    reach = abs(mean_rate) * T + 12 * math.sqrt(max(var_rate, 0.0) * T)
    half = int(math.ceil(reach)) + margin + 2 * width
    for attempt in range(max_widenings + 1):
        n = 2 * half + 1
        states = integrate(
            taps, gamma, eps, point_release(n, h, half), dt, T, samples, strict=strict
        )
        wrap = max(
            float(np.abs(st.values[:margin]).sum() + np.abs(st.values[-margin:]).sum())
            for st in states
        )
        if wrap <= wrap_tol:
            break
        if attempt < max_widenings:
            half *= 2
    out = []
    for st in states:
        mass, mx, vx = _moments(st.values, h, half)
        out.append(MomentSample(st.time, mass, mx, vx))
    return MomentReport(out, h, n, wrap, wrap > wrap_tol, states)


# }}}


def stability_max_growth(
    model: ModelSeries | Stencil | Taps,
    gamma: float,
    eps: float,
    h: float,
    samples: int = 256,
) -> float:
    """max over theta in [-pi, pi] of Re lambda(theta); <= 1e-12 counts as stable."""
    taps = combined_taps(model, gamma, eps, h)
    return float(np.max(symbol_values(taps, _thetas(samples)).real))


def stability_scan(
    model: ModelSeries | Stencil | Taps,
    zs: Sequence[float],
    *,
    h: float = 1.0,
    gamma: float = 1.0,
    samples: int = 256,
) -> list[tuple[float, float]]:
    """(z, max growth) with eps = z/h at each z."""
    return parallel_map(
        lambda z: (z, stability_max_growth(model, gamma, z / h, h, samples)), list(zs)
    )


# {{{ named large-eps*h models


def fastad_model() -> ModelSeries:
    """du_j/dt = -(eps/h) nabla u_j."""
    adv = Stencil(grid_operator("nabla", 1).taps, hpower=-1) * -1
    return ModelSeries.from_terms([(1, 1, adv)], 2, 2)


def back_model() -> ModelSeries:
    """Second-order backward upwind advection with backward second differences."""
    nabla2 = grid_operator("nabla", 2)
    adv = Stencil({-2: 1, -1: -4, 0: 3}, hpower=-1) * Fraction(-1, 2)
    diff = Stencil(nabla2.taps, hpower=-2)
    return ModelSeries.from_terms([(1, 0, diff), (1, 1, adv)], 3, 2)


NAMED_MODELS = {"fastad": fastad_model, "back": back_model}


# }}}

# {{{ csv


def _f(x: float) -> str:
    return "%.12e" % x


def trajectory_csv(states: Sequence[GridState], origin: int = 0) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "j", "u_j"])
    for st in states:
        for j, v in enumerate(st.values):
            w.writerow([_f(st.time), j - origin, _f(v)])
    return buf.getvalue()


def moments_csv(report: MomentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "mass", "mean_x", "var_x"])
    for s in report.samples:
        w.writerow([_f(s.t), _f(s.mass), _f(s.mean_x), _f(s.var_x)])
    return buf.getvalue()


# }}}
