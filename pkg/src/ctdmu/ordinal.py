"""Ordinals below omega^omega in Cantor normal form, plus the extra element INF.

An ordinal is stored as a tuple of ``(exponent, coefficient)`` pairs with
strictly decreasing exponents and positive coefficients, so that
``((2, 3), (1, 1), (0, 4))`` is ``w^2*3 + w + 4``.  The empty tuple is 0.
Because the representation is canonical, tuple comparison on the term list
coincides with ordinal comparison.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Union


class OrdinalError(ArithmeticError):
    pass


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = None
        for e, c in self.terms:
            if not (isinstance(e, int) and isinstance(c, int)) or e < 0 or c < 1:
                raise OrdinalError(f"bad CNF term {(e, c)!r}")
            if prev is not None and e >= prev:
                raise OrdinalError("CNF exponents must be strictly decreasing")
            prev = e

    # -- constructors -------------------------------------------------
    @classmethod
    def of(cls, n: int) -> Ordinal:
        if n < 0:
            raise OrdinalError("negative natural")
        return cls(((0, n),)) if n else cls()

    @classmethod
    def omega_power(cls, k: int, coefficient: int = 1) -> Ordinal:
        """``w^k * coefficient``."""
        if coefficient == 0:
            return cls()
        return cls(((k, coefficient),))

    # -- predicates ---------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or self.terms[0][0] == 0

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] >= 1

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    @property
    def degree(self) -> int:
        """Leading exponent (0 for finite ordinals, including 0)."""
        return self.terms[0][0] if self.terms else 0

    def __int__(self) -> int:
        if not self.is_finite:
            raise OrdinalError(f"{self} is not finite")
        return self.terms[0][1] if self.terms else 0

    def predecessor(self) -> Ordinal:
        if not self.is_successor:
            raise OrdinalError(f"{self} has no predecessor")
        e, c = self.terms[-1]
        head = self.terms[:-1]
        return Ordinal(head + ((0, c - 1),) if c > 1 else head)

    def successor(self) -> Ordinal:
        return add(self, ONE)

    # -- order --------------------------------------------------------
    def __lt__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if isinstance(other, Ordinal):
            return self.terms < other.terms
        if other is INF:
            return True
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return other >= 0 and self.terms == Ordinal.of(other).terms
        if isinstance(other, Ordinal):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(self.terms)

    # -- arithmetic sugar ---------------------------------------------
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __str__(self):
        return format_ordinal(self)

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"


class _Infinity:
    """The element INF of Ord_inf, above every ordinal."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("inf")

    def __str__(self):
        return "inf"

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
CountdownBound = Union[Ordinal, _Infinity]

ZERO = Ordinal()
ONE = Ordinal.of(1)
OMEGA = Ordinal.omega_power(1)


def _coerce(x) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int):
        return Ordinal.of(x)
    raise TypeError(f"cannot treat {x!r} as an ordinal")


def compare(a: Ordinal, b: Ordinal) -> int:
    """Return -1, 0 or 1 as ``a`` is below, equal to or above ``b``."""
    if a.terms == b.terms:
        return 0
    return -1 if a.terms < b.terms else 1


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    e, c = b.terms[0]
    head = []
    for ea, ca in a.terms:
        if ea > e:
            head.append((ea, ca))
        elif ea == e:
            c += ca
            break
        else:
            break
    return Ordinal(tuple(head) + ((e, c),) + b.terms[1:])


def mul(a: Ordinal, b: Ordinal) -> Ordinal:
    if not a.terms or not b.terms:
        return ZERO
    lead_e, lead_c = a.terms[0]
    out = ZERO
    # a * (sum of w^f*d) = sum of a * w^f*d by left distributivity
    for f, d in b.terms:
        if f == 0:
            piece = Ordinal(((lead_e, lead_c * d),) + a.terms[1:])
        else:
            piece = Ordinal(((lead_e + f, d),))
        out = add(out, piece)
    return out


def left_subtract(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique ``d`` with ``a + d == b``; requires ``a <= b``."""
    if a > b:
        raise OrdinalError(f"left_subtract: {a} > {b}")
    i = 0
    while i < len(a.terms) and i < len(b.terms) and a.terms[i] == b.terms[i]:
        i += 1
    if i == len(a.terms):
        return Ordinal(b.terms[i:])
    ea, ca = a.terms[i]
    eb, cb = b.terms[i]
    if ea < eb:
        return Ordinal(b.terms[i:])
    # same exponent, smaller coefficient in a
    return Ordinal(((eb, cb - ca),) + b.terms[i + 1:])


# -- literal syntax ---------------------------------------------------

_TERM = re.compile(r"\s*(?:(w)(?:\s*\^\s*(\d+))?(?:\s*\*\s*(\d+))?|(\d+))\s*")


def format_ordinal(x: CountdownBound) -> str:
    if x is INF:
        return "inf"
    if not x.terms:
        return "0"
    parts = []
    for e, c in x.terms:
        if e == 0:
            parts.append(str(c))
            continue
        s = "w" if e == 1 else f"w^{e}"
        if c != 1:
            s += f"*{c}"
        parts.append(s)
    return "+".join(parts)


def parse_ordinal(text: str) -> CountdownBound:
    """Parse ``inf``, a natural, or ``w^K*C`` terms joined by ``+``."""
    s = text.strip()
    if s == "inf":
        return INF
    if not s:
        raise ValueError("empty ordinal literal")
    out = ZERO
    for chunk in s.split("+"):
        m = _TERM.fullmatch(chunk)
        if m is None:
            raise ValueError(f"bad ordinal literal {text!r}")
        if m.group(4) is not None:
            term = Ordinal.of(int(m.group(4)))
        else:
            k = int(m.group(2)) if m.group(2) is not None else 1
            c = int(m.group(3)) if m.group(3) is not None else 1
            term = Ordinal.omega_power(k, c)
        out = add(out, term)
    return out


def as_bound(x) -> CountdownBound:
    """Accept INF, an Ordinal, an int or a literal string."""
    if x is INF or isinstance(x, Ordinal):
        return x
    if isinstance(x, int):
        return Ordinal.of(x)
    if isinstance(x, str):
        return parse_ordinal(x)
    raise TypeError(f"not a countdown bound: {x!r}")
