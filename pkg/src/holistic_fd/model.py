"""Containers for the subgrid field and the finite difference model.

Both are truncated series in the coupling parameter gamma and the odd-term
coefficient eps.  The field's coefficients are :class:`XiStencil` values,
polynomials in xi whose coefficients are stencils acting on the grid values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from holistic_fd.algebra import BiSeries, XiPoly, format_rational, xi_shift
from holistic_fd.stencil import Stencil, basis_operator, decompose, operator_name

__all__ = ["XiStencil", "FieldExpansion", "ModelSeries", "format_coefficient", "monomial_name"]

_Key = tuple[int, int, int]  # (xi degree, offset, hpower)


class XiStencil:
    """Sum of c * xi**d * h**p * E**r: a subgrid shape times a grid operator."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[_Key, Fraction] | None = None):
        self._terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def from_parts(cls, shape: XiPoly, stencil: Stencil) -> "XiStencil":
        out: dict[_Key, Fraction] = {}
        for d, a in enumerate(shape.coeffs):
            if a:
                for (r, p), c in stencil.terms.items():
                    out[(d, r, p)] = a * c
        return cls(out)

    @classmethod
    def constant(cls, stencil: Stencil) -> "XiStencil":
        return cls.from_parts(XiPoly.constant(1), stencil)

    @property
    def terms(self) -> Mapping[_Key, Fraction]:
        return self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, XiStencil):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "XiStencil") -> "XiStencil":
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return XiStencil(out)

    def __neg__(self) -> "XiStencil":
        return XiStencil({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "XiStencil") -> "XiStencil":
        return self + (-other)

    def __mul__(self, other: "Stencil | Fraction | int") -> "XiStencil":
        if isinstance(other, Stencil):
            out: dict[_Key, Fraction] = {}
            for (d, r1, p1), c1 in self._terms.items():
                for (r2, p2), c2 in other.terms.items():
                    k = (d, r1 + r2, p1 + p2)
                    out[k] = out.get(k, 0) + c1 * c2
            return XiStencil(out)
        if isinstance(other, (int, Fraction)):
            return XiStencil({k: c * other for k, c in self._terms.items()})
        return NotImplemented

    def times_h(self, n: int) -> "XiStencil":
        return XiStencil({(d, r, p + n): c for (d, r, p), c in self._terms.items()})

    def times_xi(self, n: int = 1) -> "XiStencil":
        return XiStencil({(d + n, r, p): c for (d, r, p), c in self._terms.items()})

    def degree(self) -> int:
        return max((d for d, _, _ in self._terms), default=-1)

    def d_xi(self, n: int = 1) -> "XiStencil":
        """n-th xi derivative."""
        out: dict[_Key, Fraction] = {}
        for (d, r, p), c in self._terms.items():
            if d >= n:
                f = 1
                for i in range(n):
                    f *= d - i
                out[(d - n, r, p)] = out.get((d - n, r, p), 0) + c * f
        return XiStencil(out)

    def antiderivative2(self) -> "XiStencil":
        """Double xi antiderivative vanishing with its slope at xi=0."""
        return XiStencil(
            {(d + 2, r, p): c / ((d + 1) * (d + 2)) for (d, r, p), c in self._terms.items()}
        )

    def at(self, xi: Fraction | int) -> Stencil:
        """Evaluate the shape at a point, leaving the grid operator."""
        out: dict[tuple[int, int], Fraction] = {}
        for (d, r, p), c in self._terms.items():
            v = c * Fraction(xi) ** d if d else c
            out[(r, p)] = out.get((r, p), 0) + v
        return Stencil.from_terms(out)

    def shift_xi(self, s: Fraction | int) -> "XiStencil":
        out: dict[_Key, Fraction] = {}
        for (d, r, p), c in self._terms.items():
            shifted = XiPoly.monomial(d, c)
            for dd, a in enumerate(xi_shift(shifted, s).coeffs):
                if a:
                    out[(dd, r, p)] = out.get((dd, r, p), 0) + a
        return XiStencil(out)

    def split(self) -> list[tuple[XiPoly, Stencil]]:
        """Group as sum shape_i(xi) * basis_i with canonical basis operators."""
        by_basis: dict[tuple[str, int, int], dict[int, Fraction]] = {}
        degrees = sorted({d for d, _, _ in self._terms})
        for d in degrees:
            st = Stencil.from_terms({(r, p): c for (dd, r, p), c in self._terms.items() if dd == d})
            for key, c in decompose(st).items():
                by_basis.setdefault(key, {})[d] = c
        out = []
        for (kind, m, p), coeffs in sorted(by_basis.items(), key=_basis_order):
            top = max(coeffs)
            shape = XiPoly(tuple(coeffs.get(i, 0) for i in range(top + 1)))
            out.append((shape, basis_operator(kind, m).times_h(p)))
        return out

    def __repr__(self) -> str:
        return f"XiStencil({len(self._terms)} terms)"


def _basis_order(item) -> tuple:
    (kind, m, p), _ = item
    return (2 * m - (1 if kind == "odd" else 0), p)


# {{{ formatting

_SUP = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def _sup(n: int) -> str:
    return "" if n == 1 else str(n).translate(_SUP)


def monomial_name(k: int, e: int) -> str:
    parts = []
    if k:
        parts.append("γ" + _sup(k))
    if e:
        parts.append("ε" + _sup(e))
    return "".join(parts) or "1"


def format_coefficient(c: Fraction, hpower: int) -> str:
    """Render c * h**p like ``1/6h`` or ``-1/12h²``."""
    sign = "-" if c < 0 else ""
    c = abs(c)
    if hpower < 0:
        hs = "h" + _sup(-hpower)
        if c.denominator == 1:
            return f"{sign}{c.numerator}/{hs}"
        return f"{sign}{c.numerator}/{c.denominator}{hs}"
    if hpower > 0:
        return f"{sign}{format_rational(c)}·h{_sup(hpower)}"
    return sign + format_rational(c)


# }}}


# {{{ field


@dataclass(frozen=True)
class FieldExpansion:
    """Centre-manifold field v(u, xi) as a gamma/eps series of XiStencils."""

    series: BiSeries

    @property
    def truncation(self) -> tuple[int, int]:
        return self.series.truncation

    @classmethod
    def from_terms(
        cls, terms: Iterable[tuple[int, int, XiPoly, Stencil]], max_gamma: int, max_eps: int
    ) -> "FieldExpansion":
        acc: dict[tuple[int, int], XiStencil] = {}
        for k, e, shape, stencil in terms:
            part = XiStencil.from_parts(shape, stencil)
            acc[(k, e)] = acc[(k, e)] + part if (k, e) in acc else part
        return cls(BiSeries(acc, max_gamma, max_eps))

    @property
    def terms(self) -> list[tuple[int, int, XiPoly, Stencil]]:
        """(k, e, shape, canonical basis stencil) in deterministic order."""
        out = []
        for (k, e), v in self.series.items():
            for shape, st in v.split():
                out.append((k, e, shape, st))
        return out

    def __getitem__(self, key: tuple[int, int]) -> XiStencil:
        return self.series.get(key, XiStencil())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldExpansion):
            return NotImplemented
        return self.series == other.series

    def __hash__(self) -> int:
        return hash(self.series)

    def report(self) -> str:
        lines = []
        for k, e, shape, st in self.terms:
            (kind, m, p), c = next(iter(decompose(st).items()))
            lines.append(
                f"{monomial_name(k, e) or '1'}·[{shape}]·{format_coefficient(c, p)}·{operator_name(kind, m)}"
            )
        return "\n".join(lines)


# }}}


# {{{ model


@dataclass(frozen=True)
class ModelSeries:
    """The holistic model du_j/dt = g(u) as a gamma/eps series of stencils."""

    series: BiSeries

    @classmethod
    def from_terms(
        cls, terms: Iterable[tuple[int, int, Stencil]], max_gamma: int, max_eps: int
    ) -> "ModelSeries":
        acc: dict[tuple[int, int], Stencil] = {}
        for k, e, st in terms:
            acc[(k, e)] = acc.get((k, e), Stencil()) + st
        return cls(BiSeries(acc, max_gamma, max_eps))

    @property
    def gamma_order(self) -> int:
        return self.series.max_gamma

    @property
    def eps_order(self) -> int:
        return self.series.max_eps

    @property
    def truncation(self) -> tuple[int, int]:
        return self.series.truncation

    def __getitem__(self, key: tuple[int, int]) -> Stencil:
        return self.series.get(key, Stencil())

    def __add__(self, other: "ModelSeries") -> "ModelSeries":
        return ModelSeries(self.series + other.series)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelSeries):
            return NotImplemented
        return self.series == other.series

    def __hash__(self) -> int:
        return hash(self.series)

    def truncate(self, max_gamma: int, max_eps: int) -> "ModelSeries":
        return ModelSeries(self.series.truncate(max_gamma, max_eps))

    def at_gamma(self, gamma: Fraction | int = 1) -> dict[int, Stencil]:
        """Exact model at a fixed gamma: {eps power: stencil}."""
        gamma = Fraction(gamma)
        out: dict[int, Stencil] = {}
        for (k, e), st in self.series.items():
            out[e] = out.get(e, Stencil()) + st * gamma**k
        return {e: s for e, s in sorted(out.items()) if s}

    def numeric_taps(self, gamma: float, eps: float, h: float) -> dict[int, float]:
        """Combined stencil at concrete parameter values."""
        out: dict[int, float] = {}
        for (k, e), st in self.series.items():
            w = gamma**k * eps**e
            for r, c in st.numeric_taps(h).items():
                out[r] = out.get(r, 0.0) + w * c
        return dict(sorted(out.items()))

    # {{{ io

    def to_json_obj(self) -> dict:
        terms = []
        for (k, e), st in self.series.items():
            for comp in st.components():
                terms.append({"g": k, "e": e, "stencil": comp.to_json_obj()})
        return {"gamma_order": self.gamma_order, "eps_order": self.eps_order, "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "ModelSeries":
        terms = [
            (int(t["g"]), int(t["e"]), Stencil.from_json_obj(t["stencil"])) for t in obj["terms"]
        ]
        return cls.from_terms(terms, int(obj["gamma_order"]), int(obj["eps_order"]))

    @classmethod
    def from_json(cls, text: str) -> "ModelSeries":
        return cls.from_json_obj(json.loads(text))

    def report_lines(self) -> list[str]:
        lines = []
        for (k, e), st in self.series.items():
            mono = monomial_name(k, e)
            for (kind, m, p), c in decompose(st).items():
                term = f"({format_coefficient(c, p)})·{operator_name(kind, m)}"
                lines.append(f"{mono}·{term}" if mono else term)
        return lines

    def report(self) -> str:
        lg, le = self.truncation
        order = f"O(γ{_sup(lg)})" if le <= 1 else f"O(γ{_sup(lg)}, ε{_sup(le)})"
        lines = self.report_lines()
        if not lines:
            return f"u̇_j = 0 + {order}\n"
        head = f"u̇_j = g(u) + {order}, with g the sum of"
        return "\n".join([head] + [f"  {line}" for line in lines]) + "\n"

    # }}}


# }}}
