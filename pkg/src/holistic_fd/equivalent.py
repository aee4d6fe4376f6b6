"""Equivalent differential equation of a finite difference model.

Every shift is expanded as E**r = exp(r h d/dx) and the result collected by
derivative order, eps power and h power, all exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from holistic_fd.algebra import format_rational
from holistic_fd.model import ModelSeries
from holistic_fd.pde import PdeSpec
from holistic_fd.stencil import Stencil

__all__ = ["DiffOpSeries", "equivalent_pde", "consistency_order", "pde_target"]

_Key = tuple[int, int, int]  # (derivative order, eps power, h power)


@dataclass(frozen=True)
class DiffOpSeries:
    """sum c * eps**e * h**p * d^n/dx^n, kept for h powers <= max_h_order."""

    terms: Mapping[_Key, Fraction] = field(default_factory=dict)
    max_h_order: int = 0

    def __post_init__(self) -> None:
        clean = {
            k: Fraction(c)
            for k, c in sorted(self.terms.items(), key=lambda kc: (kc[0][2], kc[0][1], kc[0][0]))
            if c and k[2] <= self.max_h_order
        }
        object.__setattr__(self, "terms", clean)

    def __getitem__(self, key: _Key) -> Fraction:
        return self.terms.get(key, Fraction(0))

    def __sub__(self, other: "DiffOpSeries") -> "DiffOpSeries":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) - c
        return DiffOpSeries(out, min(self.max_h_order, other.max_h_order))

    def restrict(self, *, eps_power: int | None = None, max_eps: int | None = None,
                 max_h_order: int | None = None) -> "DiffOpSeries":
        mh = self.max_h_order if max_h_order is None else min(max_h_order, self.max_h_order)
        return DiffOpSeries(
            {
                k: c
                for k, c in self.terms.items()
                if (eps_power is None or k[1] == eps_power) and (max_eps is None or k[1] < max_eps)
            },
            mh,
        )

    def h_orders(self) -> list[int]:
        return sorted({p for _, _, p in self.terms})

    def rows(self) -> list[tuple[int, int, int, str]]:
        return [(n, e, p, format_rational(c)) for (n, e, p), c in self.terms.items()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["deriv_order", "eps_power", "h_power", "coefficient"])
        w.writerows(self.rows())
        return buf.getvalue()

    def to_text(self) -> str:
        if not self.terms:
            return "u_t = 0\n"
        parts = []
        for (n, e, p), c in self.terms.items():
            factors = [format_rational(c)]
            if e:
                factors.append(f"eps^{e}" if e > 1 else "eps")
            if p:
                factors.append(f"h^{p}" if p > 1 else "h")
            factors.append(f"d{n}u" if n else "u")
            parts.append("*".join(factors))
        body = " + ".join(parts).replace("+ -", "- ")
        return f"u_t = {body} + O(h^{self.max_h_order + 1})\n"


def _expand_stencil(st: Stencil, e: int, max_h_order: int, out: dict[_Key, Fraction]) -> None:
    for (r, p), c in st.terms.items():
        for n in range(0, max_h_order - p + 1):
            if r == 0 and n > 0:
                break
            k = (n, e, p + n)
            out[k] = out.get(k, 0) + c * Fraction(r) ** n / math.factorial(n)


def equivalent_pde(
    model: ModelSeries | Mapping[int, Stencil] | Stencil,
    max_h_order: int,
    gamma: Fraction | int = 1,
) -> DiffOpSeries:
    """Equivalent PDE of a model evaluated at the given gamma (default 1)."""
    if isinstance(model, ModelSeries):
        blocks = model.at_gamma(gamma)
    elif isinstance(model, Stencil):
        blocks = {0: model}
    else:
        blocks = dict(model)
    out: dict[_Key, Fraction] = {}
    for e, st in blocks.items():
        _expand_stencil(st, e, max_h_order, out)
    return DiffOpSeries(out, max_h_order)


def pde_target(spec: PdeSpec, max_h_order: int) -> DiffOpSeries:
    """The right-hand side of the PDE in the same basis."""
    if spec.is_derivative_form:
        return DiffOpSeries({(n, s, 0): c for (n, s), c in spec.derivatives.items()}, max_h_order)
    blocks = {}
    for s, series in ((0, spec.even), (1, spec.odd)):
        if series is not None:
            if series.max_index is not None:
                raise ValueError("a truncated operator series has no exact equivalent PDE")
            blocks[s] = series.to_stencil()
    return equivalent_pde(blocks, max_h_order)


def consistency_order(
    model: ModelSeries | Mapping[int, Stencil] | Stencil,
    spec: PdeSpec,
    *,
    eps_power: int | None = None,
    max_h_order: int = 10,
) -> int:
    """Largest p with (equivalent PDE - target) = O(h^p).

    Only eps powers the model resolves are compared; ``eps_power`` restricts
    the comparison to one block.  Returns ``max_h_order + 1`` when nothing
    differs through ``max_h_order``.
    """
    max_eps = model.eps_order if isinstance(model, ModelSeries) else None
    diff = equivalent_pde(model, max_h_order) - pde_target(spec, max_h_order)
    diff = diff.restrict(eps_power=eps_power, max_eps=max_eps)
    orders = diff.h_orders()
    return orders[0] if orders else max_h_order + 1
