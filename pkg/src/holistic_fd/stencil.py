"""Grid difference operators and their calculus.

A :class:`Stencil` is a finite linear combination of shifts ``E**r`` (with
``E u_j = u_{j+1}``), each carrying an integer power of the grid spacing ``h``.
Most stencils are homogeneous in ``h`` (one ``hpower``); sums of operators of
different dimension, such as the expansion of ``u_xx + u_xxxx`` in central
differences, keep one component per power.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from holistic_fd.algebra import PowerSeries, format_rational, parse_rational

__all__ = [
    "Stencil",
    "grid_operator",
    "compose",
    "symbol",
    "decompose",
    "basis_operator",
    "operator_name",
    "OperatorSeries",
    "derivative_to_series",
]

_Key = tuple[int, int]  # (offset, hpower)


class Stencil:
    """Immutable finite-support grid operator sum c * h**p * E**r."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, taps: Mapping[int, Fraction | int | str] | None = None, hpower: int = 0):
        terms: dict[_Key, Fraction] = {}
        for r, c in (taps or {}).items():
            c = parse_rational(c)
            if c:
                terms[(int(r), int(hpower))] = c
        self._terms = terms
        self._hash: int | None = None

    @classmethod
    def from_terms(cls, terms: Mapping[_Key, Fraction]) -> "Stencil":
        s = cls()
        s._terms = {k: Fraction(v) for k, v in terms.items() if v}
        return s

    @classmethod
    def identity(cls) -> "Stencil":
        return cls({0: 1})

    @classmethod
    def shift(cls, r: int) -> "Stencil":
        return cls({r: 1})

    # {{{ inspection

    @property
    def terms(self) -> Mapping[_Key, Fraction]:
        return self._terms

    @property
    def hpowers(self) -> tuple[int, ...]:
        return tuple(sorted({p for _, p in self._terms}))

    @property
    def is_homogeneous(self) -> bool:
        return len(self.hpowers) <= 1

    @property
    def hpower(self) -> int:
        ps = self.hpowers
        if len(ps) > 1:
            raise ValueError(f"stencil mixes h powers {ps}")
        return ps[0] if ps else 0

    @property
    def taps(self) -> dict[int, Fraction]:
        self.hpower  # raises when mixed
        return {r: c for (r, _), c in sorted(self._terms.items())}

    def components(self) -> list["Stencil"]:
        """Homogeneous parts, in increasing h power."""
        out = []
        for p in self.hpowers:
            out.append(Stencil.from_terms({k: c for k, c in self._terms.items() if k[1] == p}))
        return out

    @property
    def support(self) -> tuple[int, int]:
        if not self._terms:
            return (0, 0)
        rs = [r for r, _ in self._terms]
        return min(rs), max(rs)

    @property
    def width(self) -> int:
        lo, hi = self.support
        return hi - lo

    def annihilates_constants(self) -> bool:
        return all(sum(s.taps.values()) == 0 for s in self.components())

    def transpose(self) -> "Stencil":
        return Stencil.from_terms({(-r, p): c for (r, p), c in self._terms.items()})

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Stencil):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # }}}

    # {{{ arithmetic

    def __add__(self, other: "Stencil") -> "Stencil":
        if isinstance(other, int) and other == 0:
            return self
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return Stencil.from_terms(out)

    __radd__ = __add__

    def __neg__(self) -> "Stencil":
        return Stencil.from_terms({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "Stencil") -> "Stencil":
        return self + (-other)

    def __mul__(self, other: "Stencil | Fraction | int") -> "Stencil":
        if isinstance(other, Stencil):
            return compose(self, other)
        if isinstance(other, (int, Fraction)):
            return Stencil.from_terms({k: c * other for k, c in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other: Fraction | int) -> "Stencil":
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int) -> "Stencil":
        out = Stencil.identity()
        for _ in range(n):
            out = compose(out, self)
        return out

    def times_h(self, n: int) -> "Stencil":
        """Multiply by h**n."""
        return Stencil.from_terms({(r, p + n): c for (r, p), c in self._terms.items()})

    # }}}

    # {{{ numerics and io

    def numeric_taps(self, h: float) -> dict[int, float]:
        out: dict[int, float] = {}
        for (r, p), c in sorted(self._terms.items()):
            out[r] = out.get(r, 0.0) + float(c) * h**p
        return out

    def to_json_obj(self) -> dict:
        return {
            "hpower": self.hpower,
            "taps": {str(r): format_rational(c) for r, c in self.taps.items()},
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Stencil":
        taps = {int(r): parse_rational(c) for r, c in obj["taps"].items()}
        return cls(taps, int(obj.get("hpower", 0)))

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "Stencil":
        return cls.from_json_obj(json.loads(text))

    def __repr__(self) -> str:
        body = ", ".join(
            f"({r}, h^{p}): {format_rational(c)}" for (r, p), c in sorted(self._terms.items())
        )
        return f"Stencil({{{body}}})"

    # }}}


def compose(a: Stencil, b: Stencil) -> Stencil:
    """Operator product (tap convolution, h powers add)."""
    out: dict[_Key, Fraction] = {}
    for (r1, p1), c1 in a.terms.items():
        for (r2, p2), c2 in b.terms.items():
            k = (r1 + r2, p1 + p2)
            out[k] = out.get(k, 0) + c1 * c2
    return Stencil.from_terms(out)


_DELTA2 = Stencil({-1: 1, 0: -2, 1: 1})
_MU_DELTA = Stencil({-1: Fraction(-1, 2), 1: Fraction(1, 2)})
_NABLA = Stencil({-1: -1, 0: 1})


def grid_operator(name: str, power: int) -> Stencil:
    """Exact tap table of a power of a standard grid operator.

    ``name`` is ``"delta"`` (even powers only), ``"mu_delta"`` (odd exponent
    2k-1 meaning mu*delta**(2k-1)), ``"nabla"`` or ``"identity"``.
    """
    if power < 0:
        raise ValueError("operator power must be non-negative")
    if name == "identity":
        return Stencil.identity()
    if name == "delta":
        if power % 2:
            raise ValueError(
                "odd powers of the central difference map the integer grid onto the "
                "half-integer grid; use mu_delta for odd operators"
            )
        return _DELTA2 ** (power // 2)
    if name == "mu_delta":
        if power % 2 == 0:
            raise ValueError("mu_delta powers must be odd (mu * delta**(2k-1))")
        return compose(_MU_DELTA, _DELTA2 ** ((power - 1) // 2))
    if name == "nabla":
        return _NABLA**power
    raise ValueError(f"unknown grid operator {name!r}")


def basis_operator(kind: str, m: int) -> Stencil:
    """Canonical basis: delta**(2m) for kind "even", mu*delta**(2m-1) for "odd"."""
    if kind == "even":
        return grid_operator("delta", 2 * m)
    if kind == "odd":
        if m < 1:
            raise ValueError("odd basis starts at m=1")
        return grid_operator("mu_delta", 2 * m - 1)
    raise ValueError(f"unknown basis kind {kind!r}")


def symbol(s: Stencil, theta: float, h: float = 1.0) -> complex:
    """Growth rate of the grid mode exp(i j theta) under ``s``."""
    return sum(
        (c * cmath.exp(1j * r * theta) for r, c in s.numeric_taps(h).items()),
        complex(0.0),
    )


def decompose(s: Stencil) -> dict[tuple[str, int, int], Fraction]:
    """Write ``s`` in the canonical basis.

    Returns ``{(kind, m, hpower): coefficient}`` with kind "even" for
    delta**(2m) and "odd" for mu*delta**(2m-1).  The decomposition is unique
    for every finite stencil.
    """
    out: dict[tuple[str, int, int], Fraction] = {}
    for comp in s.components():
        p = comp.hpower
        taps = comp.taps
        reach = max((abs(r) for r in taps), default=0)
        sym = {r: (taps.get(r, 0) + taps.get(-r, 0)) / Fraction(2) for r in range(reach + 1)}
        anti = {r: (taps.get(r, 0) - taps.get(-r, 0)) / Fraction(2) for r in range(1, reach + 1)}
        for m in range(reach, -1, -1):
            c = sym[m] if m else sym[0]
            if c:
                out[("even", m, p)] = c
                op = basis_operator("even", m)
                for r, t in op.taps.items():
                    if r >= 0:
                        sym[r] -= c * t
        for m in range(reach, 0, -1):
            c = 2 * anti[m]
            if c:
                out[("odd", m, p)] = c
                op = basis_operator("odd", m)
                for r, t in op.taps.items():
                    if r > 0:
                        anti[r] -= c * t
    return dict(sorted(out.items()))


_SUPERSCRIPT = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def operator_name(kind: str, m: int) -> str:
    if kind == "even":
        return "1" if m == 0 else "δ" + str(2 * m).translate(_SUPERSCRIPT)
    n = 2 * m - 1
    return "μδ" if n == 1 else "μδ" + str(n).translate(_SUPERSCRIPT)


# {{{ operator series


@dataclass(frozen=True)
class OperatorSeries:
    """Series of canonical difference operators with h-dimensioned coefficients.

    ``terms[(m, p)]`` multiplies ``h**p * delta**(2m)`` (kind "even") or
    ``h**p * mu*delta**(2m-1)`` (kind "odd").  ``max_index`` is the largest
    m whose coefficient is known; ``None`` marks a finite, exact operator.
    """

    kind: str
    terms: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    max_index: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("even", "odd"):
            raise ValueError("kind must be 'even' or 'odd'")
        if self.kind == "odd" and any(m < 1 for m, _ in self.terms):
            raise ValueError("odd operator series start at m=1")
        clean = {(int(m), int(p)): Fraction(c) for (m, p), c in sorted(self.terms.items()) if c}
        if self.max_index is not None:
            clean = {k: c for k, c in clean.items() if k[0] <= self.max_index}
        object.__setattr__(self, "terms", clean)

    def __hash__(self) -> int:
        return hash((self.kind, tuple(self.terms.items()), self.max_index))

    @classmethod
    def from_coefficients(
        cls, kind: str, coeffs, hpower: int = 0, exact: bool = True
    ) -> "OperatorSeries":
        """Build from a list c_0, c_1, ... (even) or b_1, b_2, ... (odd)."""
        start = 0 if kind == "even" else 1
        terms = {(start + i, hpower): parse_rational(c) for i, c in enumerate(coeffs)}
        max_index = None if exact else start + len(coeffs) - 1
        return cls(kind, terms, max_index)

    def known_through(self, m: int) -> bool:
        return self.max_index is None or m <= self.max_index

    def coefficient(self, m: int) -> dict[int, Fraction]:
        """{hpower: value} for index m."""
        if not self.known_through(m):
            raise ValueError(f"coefficient {m} lies beyond the series truncation {self.max_index}")
        return {p: c for (mm, p), c in self.terms.items() if mm == m}

    def term(self, m: int) -> Stencil:
        """The operator coefficient(m) * basis(m) as a stencil."""
        base = basis_operator(self.kind, m)
        out = Stencil()
        for p, c in self.coefficient(m).items():
            out = out + (base * c).times_h(p)
        return out

    def indices(self) -> list[int]:
        return sorted({m for m, _ in self.terms})

    def to_stencil(self) -> Stencil:
        out = Stencil()
        for m in self.indices():
            out = out + self.term(m)
        return out

    def __add__(self, other: "OperatorSeries") -> "OperatorSeries":
        if self.kind != other.kind:
            raise ValueError("cannot add even and odd operator series")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        tr = [t for t in (self.max_index, other.max_index) if t is not None]
        return OperatorSeries(self.kind, out, min(tr) if tr else None)

    def scale(self, c: Fraction | int) -> "OperatorSeries":
        return OperatorSeries(self.kind, {k: v * c for k, v in self.terms.items()}, self.max_index)


def derivative_to_series(order: int, terms: int = 8) -> OperatorSeries:
    """Expand d^n/dx^n in central differences by series reversion.

    With y = h d/dx the grid difference is delta = 2 sinh(y/2); reverting
    gives y(delta).  Even n: y**n is a series in delta**2.  Odd n: mu**2 =
    1 + delta**2/4 turns the odd series into mu * delta**(2m-1) terms.  The
    first ``terms`` nonzero coefficients are returned.
    """
    if order < 1 or terms < 1:
        raise ValueError("need order >= 1 and terms >= 1")
    n = order
    length = n + 2 * terms + 1
    sinh2 = PowerSeries(
        tuple(
            Fraction(0) if i % 2 == 0 else Fraction(2, 2**i * math.factorial(i))
            for i in range(length)
        ),
        length,
    )
    y = sinh2.reversion()
    yn = y**n
    if n % 2 == 0:
        start = n // 2
        coeffs = {(m, -n): yn[2 * m] for m in range(start, start + terms)}
        return OperatorSeries("even", coeffs, start + terms - 1)
    inv_mu = PowerSeries(
        tuple(
            Fraction(0)
            if i % 2
            else _binom_half(i // 2) * Fraction(1, 4) ** (i // 2)
            for i in range(length)
        ),
        length,
    )
    series = yn * inv_mu
    start = (n + 1) // 2
    coeffs = {(m, -n): series[2 * m - 1] for m in range(start, start + terms)}
    return OperatorSeries("odd", coeffs, start + terms - 1)


def _binom_half(i: int) -> Fraction:
    """binomial(-1/2, i)."""
    out = Fraction(1)
    for j in range(i):
        out *= Fraction(-1, 2) - j
        out /= j + 1
    return out


# }}}
