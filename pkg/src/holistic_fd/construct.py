"""Construction of holistic finite difference models.

Two routes build the same object, a subgrid field v and a model
du_j/dt = g(u), both as series in the inter-element coupling gamma and the
odd-term coefficient eps:

* :func:`even_model` and :func:`odd_correction` write the answer down in
  closed form from the operator coefficients a_m and b_m;
* :func:`construct_iterative` starts from v = u_j, g = 0 and repeatedly
  removes the residuals of the PDE, the two internal coupling conditions and
  the amplitude condition until they vanish to the requested order.

:func:`residual_check` evaluates those residuals and decides correctness for
either route.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from holistic_fd.algebra import BiSeries, XiPoly
from holistic_fd.model import FieldExpansion, ModelSeries, XiStencil
from holistic_fd.pde import PdeSpec
from holistic_fd.stencil import OperatorSeries, Stencil, basis_operator, grid_operator

__all__ = [
    "ConstructionError",
    "UnsupportedPdeError",
    "ResidualReport",
    "basis_polynomials",
    "even_model",
    "odd_correction",
    "construct_iterative",
    "residual_check",
    "pde_residual",
]

log = logging.getLogger(__name__)

_MU_DELTA = grid_operator("mu_delta", 1)
_DELTA2 = grid_operator("delta", 2)
_ID = Stencil.identity()


class UnsupportedPdeError(ValueError):
    """The PDE lies outside the class the iterative constructor handles."""


class ConstructionError(RuntimeError):
    """Residuals did not vanish within the iteration budget."""

    def __init__(self, message: str, lowest_order: tuple[int, int] | None):
        super().__init__(message)
        self.lowest_order = lowest_order


# {{{ basis polynomials


@functools.lru_cache(maxsize=None)
def basis_polynomials(k: int) -> tuple[XiPoly, XiPoly]:
    """The odd/even subgrid shapes p_k, q_k of degree 2k-1 and 2k."""
    if k < 1:
        raise ValueError("basis polynomials are defined for k >= 1")
    p = XiPoly.constant(Fraction(1, math.factorial(2 * k - 1)))
    for m in range(-k + 1, k):
        p = p * XiPoly((Fraction(-m), Fraction(1)))
    q = p * XiPoly((0, Fraction(1, 2 * k)))
    return p, q


# }}}


# {{{ closed-form construction


def even_model(
    a: OperatorSeries, gamma_order: int, eps_order: int = 1
) -> tuple[FieldExpansion, ModelSeries]:
    """Field and model for u_t = A u with A = sum a_m delta_x**(2m).

    The model is g^k = a_k delta**(2k) and the field
    v^k = p_k(xi) mu*delta**(2k-1) u_j + q_k(xi) delta**(2k) u_j, to errors
    O(gamma**gamma_order).
    """
    if a.kind != "even":
        raise ValueError("even_model needs an even operator series")
    if gamma_order < 1:
        raise ValueError("gamma order must be positive")
    if not a.known_through(gamma_order - 1):
        raise ValueError(
            f"gamma order {gamma_order} needs a_0..a_{gamma_order - 1} but the series "
            f"stops at a_{a.max_index}"
        )
    g = {(k, 0): a.term(k) for k in range(gamma_order)}
    v = {(0, 0): XiStencil.constant(_ID)}
    for k in range(1, gamma_order):
        p, q = basis_polynomials(k)
        v[(k, 0)] = XiStencil.from_parts(p, basis_operator("odd", k)) + XiStencil.from_parts(
            q, basis_operator("even", k)
        )
    return (
        FieldExpansion(BiSeries(v, gamma_order, eps_order)),
        ModelSeries(BiSeries(g, gamma_order, eps_order)),
    )


def odd_correction(b: OperatorSeries, gamma_order: int) -> ModelSeries:
    """The O(eps) model terms eps gamma^k b_k mu*delta**(2k-1), 1 <= k < order."""
    if b.kind != "odd":
        raise ValueError("odd_correction needs an odd operator series")
    if not b.known_through(gamma_order - 1):
        raise ValueError(
            f"gamma order {gamma_order} needs b_1..b_{gamma_order - 1} but the series "
            f"stops at b_{b.max_index}"
        )
    f = {(k, 1): b.term(k) for k in range(1, gamma_order)}
    return ModelSeries(BiSeries(f, gamma_order, 2))


# }}}


# {{{ residuals


def _apply_operator_form(spec: PdeSpec, v: XiStencil) -> dict[int, XiStencil]:
    out: dict[int, XiStencil] = {}
    for s, series in ((0, spec.even), (1, spec.odd)):
        if series is None:
            continue
        acc = XiStencil()
        for m in series.indices():
            coeff = series.coefficient(m)
            if series.kind == "even":
                w = v
                for _ in range(m):
                    w = w.shift_xi(1) - w * 2 + w.shift_xi(-1)
            else:
                w = (v.shift_xi(1) - v.shift_xi(-1)) * Fraction(1, 2)
                for _ in range(m - 1):
                    w = w.shift_xi(1) - w * 2 + w.shift_xi(-1)
            for p, c in coeff.items():
                acc = acc + (w * c).times_h(p)
        out[s] = acc
    return out


def _apply_pde(spec: PdeSpec, v: XiStencil) -> dict[int, XiStencil]:
    """{eps power s: contribution} of the PDE right-hand side acting on v."""
    if not spec.is_derivative_form:
        return _apply_operator_form(spec, v)
    out: dict[int, XiStencil] = {}
    for (n, s), c in spec.derivatives.items():
        term = (v.d_xi(n) * c).times_h(-n)
        out[s] = out[s] + term if s in out else term
    return out


def _ibc_targets(k: int, e: int) -> tuple[Stencil, Stencil, Stencil]:
    """Right-hand sides of the mean-difference, second-difference and amplitude conditions."""
    if (k, e) == (1, 0):
        return _MU_DELTA, _DELTA2, Stencil()
    if (k, e) == (0, 0):
        return Stencil(), Stencil(), _ID
    return Stencil(), Stencil(), Stencil()


def pde_residual(
    spec: PdeSpec,
    v: dict[tuple[int, int], XiStencil],
    g: dict[tuple[int, int], Stencil],
    k: int,
    e: int,
    applied: dict[tuple[int, int], dict[int, XiStencil]] | None = None,
) -> XiStencil:
    """Coefficient of gamma^k eps^e in  v_t - (A + eps B) v."""
    acc = XiStencil()
    for (k1, e1), vk in v.items():
        if k1 > k or e1 > e:
            continue
        gk = g.get((k - k1, e - e1))
        if gk:
            acc = acc + vk * gk
    for s in range(e + 1):
        key = (k, e - s)
        if key not in v:
            continue
        if applied is not None:
            if key not in applied:
                applied[key] = _apply_pde(spec, v[key])
            parts = applied[key]
        else:
            parts = _apply_pde(spec, v[key])
        if s in parts:
            acc = acc - parts[s]
    return acc


def _boundary_residuals(vk: XiStencil, k: int, e: int) -> tuple[Stencil, Stencil, Stencil]:
    plus, zero, minus = vk.at(1), vk.at(0), vk.at(-1)
    mean_t, second_t, amp_t = _ibc_targets(k, e)
    mean = (plus - minus) * Fraction(1, 2) - mean_t
    second = plus - zero * 2 + minus - second_t
    return mean, second, zero - amp_t


@dataclass(frozen=True)
class ResidualReport:
    """Nonzero residuals per (gamma power, eps power).

    ``pde`` holds xi-polynomial-valued residuals of the PDE; ``ibc_mean`` and
    ``ibc_second`` the first- and second-difference coupling conditions at the
    element centre; ``amplitude`` the condition v(xi=0) = u_j.
    """

    truncation: tuple[int, int]
    pde: dict[tuple[int, int], XiStencil] = field(default_factory=dict)
    ibc_mean: dict[tuple[int, int], Stencil] = field(default_factory=dict)
    ibc_second: dict[tuple[int, int], Stencil] = field(default_factory=dict)
    amplitude: dict[tuple[int, int], Stencil] = field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return not (self.pde or self.ibc_mean or self.ibc_second or self.amplitude)

    def nonzero_orders(self) -> list[tuple[int, int]]:
        keys = set(self.pde) | set(self.ibc_mean) | set(self.ibc_second) | set(self.amplitude)
        return sorted(keys, key=lambda ke: (ke[0] + ke[1], ke))

    def lowest_nonzero_order(self) -> tuple[int, int] | None:
        orders = self.nonzero_orders()
        return orders[0] if orders else None

    def summary(self) -> str:
        if self.is_zero:
            lg, le = self.truncation
            return f"all residuals vanish to O(gamma^{lg}, eps^{le})"
        parts = []
        for ke in self.nonzero_orders():
            which = [
                name
                for name, table in (
                    ("pde", self.pde),
                    ("ibc_mean", self.ibc_mean),
                    ("ibc_second", self.ibc_second),
                    ("amplitude", self.amplitude),
                )
                if ke in table
            ]
            parts.append(f"gamma^{ke[0]} eps^{ke[1]}: {', '.join(which)}")
        return "nonzero residuals at " + "; ".join(parts)


def residual_check(field: FieldExpansion, model: ModelSeries, spec: PdeSpec) -> ResidualReport:
    """Residuals of the PDE, coupling conditions and amplitude condition."""
    lg = min(field.truncation[0], model.truncation[0])
    le = min(field.truncation[1], model.truncation[1])
    v = {ke: x for ke, x in field.series.items()}
    g = {ke: x for ke, x in model.series.items()}
    applied: dict = {}
    report = ResidualReport((lg, le))
    for k in range(lg):
        for e in range(le):
            vk = v.get((k, e), XiStencil())
            r = pde_residual(spec, v, g, k, e, applied)
            if r:
                report.pde[(k, e)] = r
            mean, second, amp = _boundary_residuals(vk, k, e)
            if mean:
                report.ibc_mean[(k, e)] = mean
            if second:
                report.ibc_second[(k, e)] = second
            if amp:
                report.amplitude[(k, e)] = amp
    return report


# }}}


# {{{ iterative construction


def _check_iterative_class(spec: PdeSpec) -> Fraction:
    if not spec.is_derivative_form:
        raise UnsupportedPdeError("the iterative constructor needs the PDE in derivative form")
    for (n, s), c in spec.derivatives.items():
        if s == 0 and n % 2:
            raise UnsupportedPdeError(
                f"odd derivative of order {n} must enter through the eps perturbation"
            )
    lead = spec.derivatives.get((2, 0), Fraction(0))
    if not lead:
        raise UnsupportedPdeError(
            "the eps-free operator must contain u_xx; leading operators of other orders "
            "are not supported"
        )
    return lead


def _homological_solve(
    forcing: XiStencil, mean: Stencil, second: Stencil, amp: Stencil, lead: Fraction
) -> tuple[XiStencil, Stencil]:
    """Correction (v', g') with lead*v''/h^2 - g' = forcing and v' fixing the boundary residuals.

    v' is the minimal-degree polynomial: the double antiderivative of the
    forcing plus a quadratic whose three constants are set by the amplitude
    condition and the two coupling conditions; the quadratic's curvature is
    the model update g'.
    """
    inv = 1 / lead
    i2 = forcing.antiderivative2()
    plus, minus = i2.at(1), i2.at(-1)
    alpha = -amp
    dg = (second * (-lead)).times_h(-2) - (plus + minus)
    beta = -mean - ((plus - minus) * (inv / 2)).times_h(2)
    dv = (
        (i2 + XiStencil.constant(dg).times_xi(2) * Fraction(1, 2)) * inv
    ).times_h(2) + XiStencil.constant(alpha) + XiStencil.constant(beta).times_xi(1)
    return dv, dg


def construct_iterative(
    spec: PdeSpec, gamma_order: int, eps_order: int, max_passes: int | None = None
) -> tuple[FieldExpansion, ModelSeries]:
    """Build the holistic field and model to errors O(gamma^gamma_order, eps^eps_order).

    Each pass sweeps the orders gamma^k eps^e in dependency order, evaluates the
    residuals there and removes them with one homological solve.  The
    iteration stops after a pass that finds every residual already zero.
    """
    if gamma_order < 1 or eps_order < 1:
        raise ValueError("gamma and eps orders must be positive")
    budget = max_passes if max_passes is not None else 2 * (gamma_order + eps_order)
    return _construct_cached(spec, gamma_order, eps_order, budget)


@functools.lru_cache(maxsize=32)
def _construct_cached(
    spec: PdeSpec, gamma_order: int, eps_order: int, budget: int
) -> tuple[FieldExpansion, ModelSeries]:
    lead = _check_iterative_class(spec)
    v: dict[tuple[int, int], XiStencil] = {(0, 0): XiStencil.constant(_ID)}
    g: dict[tuple[int, int], Stencil] = {}
    orders = [(k, e) for k in range(gamma_order) for e in range(eps_order)]
    for npass in range(1, budget + 1):
        changed = False
        for k, e in orders:
            vk = v.get((k, e), XiStencil())
            forcing = pde_residual(spec, v, g, k, e)
            mean, second, amp = _boundary_residuals(vk, k, e)
            if not (forcing or mean or second or amp):
                continue
            changed = True
            dv, dg = _homological_solve(forcing, mean, second, amp, lead)
            v[(k, e)] = vk + dv
            g[(k, e)] = g.get((k, e), Stencil()) + dg
        if not changed:
            log.debug("residuals vanished after %d passes", npass)
            break
    else:
        field_ = FieldExpansion(BiSeries(v, gamma_order, eps_order))
        model = ModelSeries(BiSeries(g, gamma_order, eps_order))
        report = residual_check(field_, model, spec)
        if not report.is_zero:
            low = report.lowest_nonzero_order()
            raise ConstructionError(
                f"residuals still nonzero after {budget} passes; lowest order gamma^{low[0]} "
                f"eps^{low[1]}",
                low,
            )
    return (
        FieldExpansion(BiSeries(v, gamma_order, eps_order)),
        ModelSeries(BiSeries(g, gamma_order, eps_order)),
    )


# }}}
