"""Linear constant-coefficient PDEs u_t = A u + eps B u.

A :class:`PdeSpec` is either a sum of derivative terms ``c * eps**s * d^n u``
(the form the iterative constructor needs) or a pair of central-difference
operator series (the even part A and the odd part B).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from holistic_fd.algebra import format_rational, parse_rational
from holistic_fd.stencil import OperatorSeries, derivative_to_series

__all__ = ["PdeSpec", "PdeParseError", "parse_pde", "ADVECTION_DIFFUSION", "DIFFUSION"]


class PdeParseError(ValueError):
    """Malformed PDE text."""


@dataclass(frozen=True)
class PdeSpec:
    """u_t = sum c * eps**s * d^n u, or u_t = A u + eps B u in difference form.

    ``derivatives`` maps ``(n, s)`` to the rational coefficient c.  When it is
    empty the operators come from ``even`` and ``odd`` directly.
    """

    derivatives: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    even: OperatorSeries | None = None
    odd: OperatorSeries | None = None

    def __post_init__(self) -> None:
        clean = {
            (int(n), int(s)): parse_rational(c)
            for (n, s), c in sorted(self.derivatives.items())
            if parse_rational(c)
        }
        object.__setattr__(self, "derivatives", clean)
        if self.even is not None and self.even.kind != "even":
            raise ValueError("the A operator must be an even series")
        if self.odd is not None and self.odd.kind != "odd":
            raise ValueError("the B operator must be an odd series")

    def __hash__(self) -> int:
        return hash((tuple(self.derivatives.items()), self.even, self.odd))

    @classmethod
    def from_derivatives(cls, terms: Mapping[tuple[int, int], Fraction | int | str]) -> "PdeSpec":
        return cls({k: parse_rational(v) for k, v in terms.items()})

    @classmethod
    def from_operators(
        cls, even: OperatorSeries, odd: OperatorSeries | None = None
    ) -> "PdeSpec":
        return cls({}, even, odd)

    @property
    def is_derivative_form(self) -> bool:
        return bool(self.derivatives) or (self.even is None and self.odd is None)

    def even_part(self, max_index: int = 8) -> OperatorSeries:
        """The eps-free even operator A as sum a_m delta_x**(2m)."""
        if not self.is_derivative_form:
            return self.even or OperatorSeries("even")
        out = OperatorSeries("even", {(0, 0): self.derivatives.get((0, 0), 0)}, max_index)
        for (n, s), c in self.derivatives.items():
            if s == 0 and n > 0:
                if n % 2:
                    raise ValueError(f"odd derivative of order {n} appears without eps")
                series = derivative_to_series(n, max(1, max_index - n // 2 + 1))
                out = out + series.scale(c)
        return out

    def odd_part(self, max_index: int = 8) -> OperatorSeries:
        """The operator B (coefficient of eps) as sum b_m mu*delta_x**(2m-1)."""
        if not self.is_derivative_form:
            return self.odd or OperatorSeries("odd")
        out = OperatorSeries("odd", {}, max_index)
        for (n, s), c in self.derivatives.items():
            if s == 1 and n % 2 == 1:
                series = derivative_to_series(n, max(1, max_index - (n + 1) // 2 + 1))
                out = out + series.scale(c)
        return out

    def describe(self) -> str:
        if not self.is_derivative_form:
            return "u_t = A u + eps B u (difference form)"
        parts = []
        for (n, s), c in self.derivatives.items():
            lit = format_rational(c)
            parts.append(f"{lit}*{'eps*' if s == 1 else ('eps^%d*' % s if s else '')}u{'x' * n}")
        return "ut = " + " + ".join(parts).replace("+ -", "- ")


_TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")
_FIELD = re.compile(r"^u(x*)$")
_EPS = re.compile(r"^eps(?:\^(\d+))?$")


def parse_pde(text: str) -> PdeSpec:
    """Parse the mini-grammar, e.g. ``"ut = -eps*ux + uxx - 1/12*uxxxx"``.

    Terms are products of rational literals, ``eps`` and one ``u``/``ux...``
    factor; the number of x's is the derivative order.  ``eps`` routes a term
    to the perturbation slot.
    """
    if "=" not in text:
        raise PdeParseError("expected 'ut = ...'")
    lhs, rhs = text.split("=", 1)
    if lhs.strip() != "ut":
        raise PdeParseError(f"left side must be 'ut', got {lhs.strip()!r}")
    rhs = rhs.strip()
    if not rhs:
        raise PdeParseError("empty right-hand side")
    terms: dict[tuple[int, int], Fraction] = {}
    pos = 0
    while pos < len(rhs):
        m = _TERM.match(rhs, pos)
        if not m or not m.group(2).strip():
            raise PdeParseError(f"cannot parse near {rhs[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(sign)
        eps_power = 0
        order = None
        for factor in m.group(2).split("*"):
            factor = factor.strip()
            if not factor:
                raise PdeParseError(f"empty factor in {m.group(2)!r}")
            em = _EPS.match(factor)
            if em:
                eps_power += int(em.group(1) or 1)
                continue
            fm = _FIELD.match(factor)
            if fm:
                if order is not None:
                    raise PdeParseError("a term may contain only one u factor")
                order = len(fm.group(1))
                continue
            if factor.startswith("(") and factor.endswith(")"):
                factor = factor[1:-1].strip()
            try:
                coeff *= parse_rational(factor)
            except (ValueError, ZeroDivisionError):
                raise PdeParseError(f"unknown factor {factor!r}") from None
        if order is None:
            raise PdeParseError(f"term {m.group(0).strip()!r} has no u factor")
        key = (order, eps_power)
        terms[key] = terms.get(key, Fraction(0)) + coeff
        pos = m.end()
    return PdeSpec.from_derivatives(terms)


ADVECTION_DIFFUSION = PdeSpec.from_derivatives({(2, 0): 1, (1, 1): -1})
DIFFUSION = PdeSpec.from_derivatives({(2, 0): 1})
