"""Coefficient functions of the advection-diffusion models and their summation.

Models of u_t = -eps u_x + u_xx evaluated at gamma = 1 take the form

    du_j/dt = -(eps/h)(mu delta - kappa2 mu delta^3) u_j
              + (1/h^2)(nu1 delta^2 - nu2 delta^4) u_j

with nu1, nu2, kappa2 power series in z = eps h.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from holistic_fd._sweep import parallel_map
from holistic_fd.algebra import PowerSeries
from holistic_fd.model import ModelSeries
from holistic_fd.stencil import decompose, operator_name

__all__ = [
    "CoeffSeries",
    "NonCanonicalModelError",
    "extract_coefficients",
    "ShanksResult",
    "shanks",
    "shanks_table",
    "nu1_closed_form",
    "nu1_taylor",
    "asymptote",
    "coefficient_rows",
    "coefficient_csv",
]

NAMES = ("nu1", "nu2", "kappa2")


class NonCanonicalModelError(ValueError):
    """The model contains operators outside the canonical advection-diffusion form."""


@dataclass(frozen=True)
class CoeffSeries:
    """``coefficients[i]`` multiplies z**(2i); odd powers are identically zero."""

    name: str
    coefficients: tuple[Fraction, ...]
    source: str = ""

    def power_coefficient(self, n: int) -> Fraction:
        if n % 2:
            return Fraction(0)
        i = n // 2
        return self.coefficients[i] if i < len(self.coefficients) else Fraction(0)

    def partial_sums(self, z: float) -> list[float]:
        out, acc = [], 0.0
        for i, c in enumerate(self.coefficients):
            acc += float(c) * z ** (2 * i)
            out.append(acc)
        return out

    def evaluate(self, z: float) -> float:
        return self.partial_sums(z)[-1] if self.coefficients else 0.0


def extract_coefficients(model: ModelSeries, source: str = "") -> list[CoeffSeries]:
    """Read nu1, nu2, kappa2 off an advection-diffusion model at gamma = 1."""
    eps_order = model.eps_order
    found: dict[str, dict[int, Fraction]] = {name: {} for name in NAMES}
    residue = []
    for e, st in model.at_gamma(1).items():
        for (kind, m, p), c in decompose(st).items():
            if p != e - 2:
                residue.append((kind, m, p, e, c))
            elif kind == "odd" and m == 1 and e == 1 and c == -1:
                continue
            elif kind == "odd" and m == 2 and e % 2 == 1:
                found["kappa2"][(e - 1) // 2] = c
            elif kind == "even" and m == 1 and e % 2 == 0:
                found["nu1"][e // 2] = c
            elif kind == "even" and m == 2 and e % 2 == 0:
                found["nu2"][e // 2] = -c
            else:
                residue.append((kind, m, p, e, c))
    if residue:
        listed = ", ".join(
            f"eps^{e} h^{p} {c}·{operator_name(kind, m)}" for kind, m, p, e, c in residue
        )
        raise NonCanonicalModelError(f"model has non-canonical terms: {listed}")
    known = {
        "nu1": (eps_order + 1) // 2,
        "nu2": (eps_order + 1) // 2,
        "kappa2": eps_order // 2,
    }
    out = []
    for name in NAMES:
        if found[name]:
            n = known[name]
            out.append(
                CoeffSeries(name, tuple(found[name].get(i, Fraction(0)) for i in range(n)), source)
            )
    return out


# {{{ shanks


@dataclass(frozen=True)
class ShanksResult:
    """Accelerated value plus the number of cells that hit a zero denominator."""

    value: float
    table: tuple[tuple[float, ...], ...]
    fallback_cells: int = 0

    def __float__(self) -> float:
        return self.value

    @property
    def degenerate(self) -> bool:
        return self.fallback_cells > 0


def _shanks_once(a: Sequence[float]) -> tuple[list[float], int]:
    out, fallbacks = [], 0
    for n in range(1, len(a) - 1):
        # same as (A+ A- - A^2)/(A+ + A- - 2A), without the cancellation
        fwd, back = a[n + 1] - a[n], a[n] - a[n - 1]
        den = fwd - back
        val = a[n + 1] - fwd * fwd / den if den != 0 else math.nan
        if not math.isfinite(val):
            # zero (or overflowing) denominator: keep the input
            val = a[n]
            fallbacks += 1
        out.append(val)
    return out, fallbacks


def shanks_table(sequence: Sequence[float], iterations: int) -> ShanksResult:
    if iterations < 1:
        raise ValueError("iterations must be positive")
    if len(sequence) < 2 * iterations + 1:
        raise ValueError(
            f"{iterations} Shanks iterations need at least {2 * iterations + 1} terms, "
            f"got {len(sequence)}"
        )
    rows = [tuple(float(x) for x in sequence)]
    total = 0
    for _ in range(iterations):
        nxt, fb = _shanks_once(rows[-1])
        total += fb
        rows.append(tuple(nxt))
    return ShanksResult(rows[-1][-1], tuple(rows), total)


def shanks(sequence: Sequence[float], iterations: int) -> ShanksResult:
    """Iterated Shanks transform; the value uses the latest terms of the sequence."""
    return shanks_table(sequence, iterations)


# }}}


def nu1_closed_form(z: float) -> float:
    """(z/2) coth(z/2), equal to 1 at z = 0."""
    if z == 0:
        return 1.0
    half = z / 2
    return half / math.tanh(half)


def nu1_taylor(n_terms: int) -> tuple[Fraction, ...]:
    """Exact Taylor coefficients of (z/2)coth(z/2) at z^0, z^2, ..."""
    length = 2 * n_terms + 1
    cosh = PowerSeries(
        tuple(
            Fraction(1, 2**i * math.factorial(i)) if i % 2 == 0 else 0 for i in range(length)
        ),
        length,
    )
    # sinh(z/2)/(z/2) = sum (z/2)^(2i)/(2i+1)!
    sinhc = [Fraction(1, 2**i * math.factorial(i + 1)) if i % 2 == 0 else Fraction(0)
             for i in range(length)]
    quotient = []
    for i in range(length):
        acc = cosh[i] - sum(quotient[j] * sinhc[i - j] for j in range(i))
        quotient.append(acc / sinhc[0])
    return tuple(quotient[2 * i] for i in range(n_terms))


def asymptote(name: str, z: float) -> float:
    """Large-z behaviour read off accelerated sums (conjectured, not proven)."""
    if name == "nu1":
        return z / 2
    if name == "nu2":
        return z / 4 - 0.5
    if name == "kappa2":
        return 0.5 - 1 / z if z else math.nan
    raise ValueError(f"unknown coefficient {name!r}")


def coefficient_rows(
    series: CoeffSeries, zs: Sequence[float], iterations: int
) -> list[tuple[float, float, float, float | None, float, int]]:
    """(z, series_value, shanks_value, closed_form, asymptote, fallback_cells) per z."""

    def row(z: float):
        sums = series.partial_sums(z)
        acc = shanks(sums, iterations) if iterations else None
        closed = nu1_closed_form(z) if series.name == "nu1" else None
        return (
            z,
            sums[-1],
            acc.value if acc else sums[-1],
            closed,
            asymptote(series.name, z),
            acc.fallback_cells if acc else 0,
        )

    return parallel_map(row, list(zs))


def _fmt(x: float | None) -> str:
    return "" if x is None else "%.12e" % x


def coefficient_csv(series: CoeffSeries, zs: Sequence[float], iterations: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["z", "series_value", "shanks_value", "closed_form", "asymptote"])
    for z, s, a, c, asy, _ in coefficient_rows(series, zs, iterations):
        w.writerow([_fmt(z), _fmt(s), _fmt(a), _fmt(c), _fmt(asy)])
    return buf.getvalue()
