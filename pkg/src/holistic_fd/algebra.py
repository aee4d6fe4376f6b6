"""Exact rational algebra: xi-polynomials, truncated power series, bivariate series.

Rationals are :class:`fractions.Fraction` throughout; nothing in this module
ever rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping

Rational = Fraction

__all__ = [
    "Rational",
    "parse_rational",
    "format_rational",
    "XiPoly",
    "xi_shift",
    "apply_xi_operator",
    "PowerSeries",
    "BiSeries",
]


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"``, an integer or a terminating decimal exactly."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    """Canonical ``"p/q"`` string (``"p"`` when integral)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# {{{ xi polynomials


def _trim(coeffs: Iterable[Fraction]) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class XiPoly:
    """Polynomial in the element coordinate xi = (x - x_j)/h.

    ``coeffs[d]`` multiplies ``xi**d``; trailing zeros are trimmed so the zero
    polynomial has ``coeffs == ()``.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def monomial(cls, degree: int, coeff: Fraction | int = 1) -> "XiPoly":
        return cls((0,) * degree + (Fraction(coeff),))

    @classmethod
    def constant(cls, c: Fraction | int) -> "XiPoly":
        return cls((Fraction(c),))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __call__(self, xi: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * xi + c
        return acc

    def __add__(self, other: "XiPoly") -> "XiPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return XiPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "XiPoly":
        return XiPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "XiPoly") -> "XiPoly":
        return self + (-other)

    def __mul__(self, other: "XiPoly | Fraction | int") -> "XiPoly":
        if not isinstance(other, XiPoly):
            return XiPoly(tuple(c * other for c in self.coeffs))
        if not self or not other:
            return XiPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return XiPoly(tuple(out))

    __rmul__ = __mul__

    def derivative(self, n: int = 1) -> "XiPoly":
        coeffs = self.coeffs
        for _ in range(n):
            coeffs = tuple(d * c for d, c in enumerate(coeffs))[1:]
        return XiPoly(coeffs)

    def is_odd(self) -> bool:
        return all(c == 0 for d, c in enumerate(self.coeffs) if d % 2 == 0)

    def is_even(self) -> bool:
        return all(c == 0 for d, c in enumerate(self.coeffs) if d % 2 == 1)

    def __str__(self) -> str:
        if not self:
            return "0"
        parts = []
        for d, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if d == 0 else ("ξ" if d == 1 else f"ξ^{d}")
            if mono and abs(c) == 1:
                parts.append(("-" if c < 0 else "+") + mono)
            else:
                parts.append(f"{'-' if c < 0 else '+'}{format_rational(abs(c))}{mono}")
        s = " ".join(parts)
        return s[1:] if s.startswith("+") else s


def xi_shift(p: XiPoly, s: Fraction | int) -> XiPoly:
    """Return q with q(xi) = p(xi + s), by binomial expansion."""
    s = Fraction(s)
    out = [Fraction(0)] * len(p.coeffs)
    for d, c in enumerate(p.coeffs):
        if not c:
            continue
        for i in range(d + 1):
            out[i] += c * math.comb(d, i) * s ** (d - i)
    return XiPoly(tuple(out))


_HALF = Fraction(1, 2)


def apply_xi_operator(p: XiPoly, op: str) -> XiPoly:
    """Apply a unit-step difference operator in xi.

    ``op`` is one of ``"delta2"`` (second central difference), ``"mu_delta"``
    (central first difference), ``"delta"`` and ``"mu"`` (half-step forms).
    """
    if op == "delta2":
        return xi_shift(p, 1) - p * 2 + xi_shift(p, -1)
    if op == "mu_delta":
        return (xi_shift(p, 1) - xi_shift(p, -1)) * _HALF
    if op == "delta":
        return xi_shift(p, _HALF) - xi_shift(p, -_HALF)
    if op == "mu":
        return (xi_shift(p, _HALF) + xi_shift(p, -_HALF)) * _HALF
    raise ValueError(f"unknown xi operator {op!r}")


# }}}


# {{{ univariate truncated power series


@dataclass(frozen=True)
class PowerSeries:
    """Truncated power series sum c_i t**i, known for ``i < order``."""

    coeffs: tuple[Fraction, ...]
    order: int

    def __post_init__(self) -> None:
        c = tuple(Fraction(x) for x in self.coeffs[: self.order])
        c = c + (Fraction(0),) * (self.order - len(c))
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries(tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])), n)

    def __mul__(self, other: "PowerSeries | Fraction | int") -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries(tuple(c * other for c in self.coeffs), self.order)
        n = min(self.order, other.order)
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a:
                for j in range(n - i):
                    out[i + j] += a * other.coeffs[j]
        return PowerSeries(tuple(out), n)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PowerSeries":
        result = PowerSeries((1,), self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(t)); requires inner[0] == 0."""
        if inner.coeffs and inner.coeffs[0] != 0:
            raise ValueError("inner series must vanish at t=0")
        n = min(self.order, inner.order)
        acc = PowerSeries((), n)
        power = PowerSeries((1,), n)
        for c in self.coeffs[:n]:
            if c:
                acc = acc + power * c
            power = power * inner
        return acc

    def reversion(self) -> "PowerSeries":
        """Compositional inverse g with self(g(t)) = t; needs c0=0, c1!=0."""
        if self.coeffs[0] != 0 or self.order < 2 or self.coeffs[1] == 0:
            raise ValueError("series reversion needs c0 = 0 and c1 != 0")
        n = self.order
        g = PowerSeries((0, 1 / self.coeffs[1]), n)
        # each pass fixes one more coefficient of g
        for m in range(2, n):
            err = self.compose(g)[m]
            coeffs = list(g.coeffs)
            coeffs[m] -= err / self.coeffs[1]
            g = PowerSeries(tuple(coeffs), n)
        return g


# }}}


# {{{ bivariate truncated series


def _is_zero(x: Any) -> bool:
    return not x


@dataclass(frozen=True)
class BiSeries:
    """Truncated series in two parameters (gamma, eps).

    ``terms`` maps ``(k, e)`` to a payload (Fraction, XiPoly, Stencil, ...);
    only exponents ``k < max_gamma`` and ``e < max_eps`` are stored, i.e. the
    series is exact to errors O(gamma**max_gamma, eps**max_eps).
    """

    terms: Mapping[tuple[int, int], Any] = field(default_factory=dict)
    max_gamma: int = 1
    max_eps: int = 1

    def __post_init__(self) -> None:
        kept = {
            (k, e): v
            for (k, e), v in sorted(self.terms.items())
            if k < self.max_gamma and e < self.max_eps and not _is_zero(v)
        }
        object.__setattr__(self, "terms", kept)

    @property
    def truncation(self) -> tuple[int, int]:
        return self.max_gamma, self.max_eps

    def __getitem__(self, key: tuple[int, int]) -> Any:
        return self.terms[key]

    def get(self, key: tuple[int, int], default: Any = None) -> Any:
        return self.terms.get(key, default)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.terms)

    def items(self):
        return self.terms.items()

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.truncation == other.truncation and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.truncation, tuple(self.terms.items())))

    def _common(self, other: "BiSeries") -> tuple[int, int]:
        return min(self.max_gamma, other.max_gamma), min(self.max_eps, other.max_eps)

    def __add__(self, other: "BiSeries") -> "BiSeries":
        mg, me = self._common(other)
        out = dict(self.terms)
        for key, v in other.terms.items():
            out[key] = out[key] + v if key in out else v
        return BiSeries(out, mg, me)

    def __neg__(self) -> "BiSeries":
        return BiSeries({key: -v for key, v in self.terms.items()}, *self.truncation)

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return self + (-other)

    def __mul__(self, other: "BiSeries") -> "BiSeries":
        if not isinstance(other, BiSeries):
            return BiSeries({key: v * other for key, v in self.terms.items()}, *self.truncation)
        mg, me = self._common(other)
        out: dict[tuple[int, int], Any] = {}
        for (k1, e1), a in self.terms.items():
            for (k2, e2), b in other.terms.items():
                k, e = k1 + k2, e1 + e2
                if k >= mg or e >= me:
                    continue
                prod = a * b
                out[(k, e)] = out[(k, e)] + prod if (k, e) in out else prod
        return BiSeries(out, mg, me)

    def map(self, fn: Callable[[Any], Any]) -> "BiSeries":
        return BiSeries({key: fn(v) for key, v in self.terms.items()}, *self.truncation)

    def truncate(self, max_gamma: int, max_eps: int) -> "BiSeries":
        return BiSeries(self.terms, min(max_gamma, self.max_gamma), min(max_eps, self.max_eps))

    def evaluate(self, gamma: Any, eps: Any, zero: Any = 0) -> Any:
        acc = zero
        for (k, e), v in self.terms.items():
            acc = acc + v * (gamma**k * eps**e)
        return acc


# }}}
