"""Univariate polynomials over a :class:`~pencil_lab.gf.GF`.

Coefficients are integer codes, low-to-high, with no trailing zeros; the
zero polynomial has an empty coefficient tuple.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DivisionByZero, FieldMismatch
from .gf import GF, Embedding, Fq


class Poly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: GF, coeffs: Iterable[int] = ()) -> None:
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.field = field
        self.coeffs: tuple[int, ...] = tuple(c)

    # constructors

    @classmethod
    def x(cls, field: GF) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field: GF, c: int) -> "Poly":
        return cls(field, (c,))

    @classmethod
    def from_ints(cls, field: GF, ints: Sequence[int]) -> "Poly":
        """Coefficients given as integers reduced into the prime subfield."""
        return cls(field, [field.from_int(i) for i in ints])

    @classmethod
    def from_roots(cls, field: GF, roots: Iterable[int]) -> "Poly":
        out = cls(field, (1,))
        for r in roots:
            out = out * cls(field, (field.neg(r), 1))
        return out

    # basic properties

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = self.field.inv(self.lead())
        return self.scale(inv)

    def scale(self, c: int) -> "Poly":
        F = self.field
        return Poly(F, [F.mul(a, c) for a in self.coeffs])

    def _check(self, other: "Poly") -> None:
        if other.field.spec != self.field.spec:
            raise FieldMismatch(f"{self.field.spec} vs {other.field.spec}")

    # ring operations

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(F, [F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])

    def __neg__(self) -> "Poly":
        return Poly(self.field, [self.field.neg(a) for a in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Poly(F, out)

    def __pow__(self, e: int) -> "Poly":
        out = Poly(self.field, (1,))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        db = other.degree
        inv_lead = F.inv(other.lead())
        quo = [0] * max(0, len(rem) - db)
        while len(rem) - 1 >= db and rem:
            c = F.mul(rem[-1], inv_lead)
            shift = len(rem) - 1 - db
            quo[shift] = c
            for i, b in enumerate(other.coeffs):
                rem[shift + i] = F.sub(rem[shift + i], F.mul(c, b))
            while rem and rem[-1] == 0:
                rem.pop()
        return Poly(F, quo), Poly(F, rem)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field.spec == other.field.spec and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field.spec, self.coeffs))

    def __call__(self, x):
        """Evaluate at a code, an :class:`Fq`, or an array of codes."""
        F = self.field
        if isinstance(x, Fq):
            return Fq(F, self(x.code))
        if isinstance(x, (int, np.integer)):
            acc = 0
            for c in reversed(self.coeffs):
                acc = F.add(F.mul(acc, int(x)), c)
            return acc
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = F.vadd(F.vmul(acc, x), np.full_like(x, c))
        return acc

    def derivative(self) -> "Poly":
        F = self.field
        return Poly(F, [F.mul(F.from_int(i), c) for i, c in enumerate(self.coeffs)][1:])

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def lcm(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly(self.field)
        return ((self * other) // self.gcd(other)).monic()

    def powmod(self, e: int, mod: "Poly") -> "Poly":
        out = Poly(self.field, (1,)) % mod
        base = self % mod
        while e:
            if e & 1:
                out = (out * base) % mod
            base = (base * base) % mod
            e >>= 1
        return out

    def is_squarefree(self) -> bool:
        if self.degree <= 0:
            return True
        return self.gcd(self.derivative()).degree == 0

    def roots(self) -> list[tuple[int, int]]:
        """Roots in the field with multiplicities, ordered by code."""
        if self.is_zero():
            raise ValueError("the zero polynomial has every element as a root")
        vals = self(self.field.elements())
        out = []
        for r in np.flatnonzero(vals == 0):
            r = int(r)
            lin = Poly(self.field, (self.field.neg(r), 1))
            m, rest = 0, self
            while True:
                quo, rem = divmod(rest, lin)
                if not rem.is_zero():
                    break
                m, rest = m + 1, quo
            out.append((r, m))
        return out

    def splits(self) -> bool:
        return sum(m for _, m in self.roots()) == self.degree

    def factor_degrees(self) -> list[int]:
        """Degrees of the irreducible factors (with repetition), by distinct-degree factorization."""
        F = self.field
        out: list[int] = []
        rest = self.monic()
        # strip repeated factors first: work on the squarefree parts
        parts = _squarefree_parts(rest)
        for part, mult in parts:
            g = part
            x = Poly.x(F)
            h = x
            d = 0
            while g.degree > 0:
                d += 1
                if 2 * d > g.degree:
                    out.extend([g.degree] * mult)
                    break
                h = h.powmod(F.q, g)
                common = g.gcd(h - x)
                if common.degree > 0:
                    out.extend([d] * (mult * (common.degree // d)))
                    g = g // common
                    h = h % g if g.degree > 0 else h
        return sorted(out)

    def map(self, emb: Embedding) -> "Poly":
        return Poly(emb.dst, [emb(c) for c in self.coeffs])

    def to_ints(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self) -> str:
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*x^{i}" if i else str(c))
        return "Poly(" + " + ".join(terms) + ")"


def _squarefree_parts(f: Poly) -> list[tuple[Poly, int]]:
    """Yun-style decomposition valid in characteristic p (handles p-th powers)."""
    F = f.field
    p = F.p
    out: list[tuple[Poly, int]] = []

    def rec(g: Poly, scale: int) -> None:
        if g.degree <= 0:
            return
        d = g.derivative()
        if d.is_zero():
            # g is a p-th power: take the p-th root coefficientwise
            root_exp = F.q // p  # Frobenius inverse is x -> x^(q/p)
            coeffs = [F.pow(g.coeffs[i], root_exp) for i in range(0, len(g.coeffs), p)]
            rec(Poly(F, coeffs), scale * p)
            return
        c = g.gcd(d)
        w = g // c
        i = 1
        while w.degree > 0:
            y = w.gcd(c)
            z = w // y
            if z.degree > 0:
                out.append((z, i * scale))
            i += 1
            w = y
            c = c // y
        # what is left is a p-th power; rec() takes the root
        rec(c, scale)

    rec(f.monic(), 1)
    return out
