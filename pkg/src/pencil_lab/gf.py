"""Finite fields F_{p^k} of odd characteristic.

Elements are stored as integer codes ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``
where ``c_0 + c_1 t + ...`` is the residue class modulo the field modulus.
Integers ``0..p-1`` therefore denote the prime subfield in every field,
which keeps embeddings and JSON payloads simple.

Bulk arithmetic on numpy arrays of codes goes through :class:`GF`; the
:class:`Fq` wrapper exists for scalar code that wants operators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import DivisionByZero, FieldMismatch, InvalidInput

if TYPE_CHECKING:  # pragma: no cover
    from .poly import Poly

# Below this order sqrt uses a precomputed exhaustive table.
EXHAUSTIVE_SQRT_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over F_p as int lists, only used to build fields ---------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` by the monic ``m``."""
    a = _trim([x % p for x in a])
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1]
        shift = len(a) - 1 - dm
        for i in range(dm + 1):
            a[shift + i] = (a[shift + i] - c * m[i]) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, m, p)


def _ppowmod(a: list[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        inv = pow(b[-1], p - 2, p)
        bm = [(x * inv) % p for x in b]
        a, b = b, _pmod(a, bm, p)
    return a


def _is_irreducible(m: Sequence[int], p: int) -> bool:
    k = len(m) - 1
    if k <= 0:
        return False
    if k == 1:
        return True
    h = [0, 1]
    for _ in range(k // 2):
        h = _ppowmod(h, p, m, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(list(m), _trim(diff), p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def first_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree k (low-to-high)."""
    for low in itertools.product(range(p), repeat=k):
        cand = tuple(low) + (1,)
        if _is_irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# -- field spec --------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    p: int
    k: int
    modulus: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (isinstance(self.p, int) and self.p > 2 and is_prime(self.p)):
            raise InvalidInput(f"characteristic must be an odd prime, got {self.p!r}")
        if self.k < 1:
            raise InvalidInput("extension degree must be >= 1")
        mod = tuple(int(c) for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != self.k + 1 or mod[-1] != 1:
            raise InvalidInput(f"modulus must be monic of degree {self.k}")
        if any(not 0 <= c < self.p for c in mod):
            raise InvalidInput("modulus coefficients must lie in [0, p)")
        if not _is_irreducible(mod, self.p):
            raise InvalidInput(f"modulus {mod} is reducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.k

    @classmethod
    def standard(cls, p: int, k: int = 1) -> "FieldSpec":
        if not (p > 2 and is_prime(p)):
            raise InvalidInput(f"characteristic must be an odd prime, got {p!r}")
        return cls(p, k, first_irreducible(p, k))

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        try:
            p, k = int(data["p"]), int(data.get("k", 1))
            modulus = data.get("modulus")
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad FieldSpec: {data!r}") from exc
        if modulus is None:
            return cls.standard(p, k)
        return cls(p, k, tuple(int(c) for c in modulus))

    def __str__(self) -> str:
        return f"F_{self.p}" if self.k == 1 else f"F_{self.p}^{self.k}"


# -- the arithmetic engine ------------------------------------------------------


class GF:
    """Arithmetic tables for one finite field.

    Instances are immutable after construction; obtain them through
    :func:`get_field` so that tables are shared.
    """

    def __init__(self, spec: FieldSpec) -> None:
        self.spec = spec
        self.p = spec.p
        self.k = spec.k
        self.q = spec.q
        self._pw = np.array([self.p**i for i in range(self.k)], dtype=np.int64)
        codes = np.arange(self.q, dtype=np.int64)
        dig = np.empty((self.q, self.k), dtype=np.int64)
        rest = codes.copy()
        for i in range(self.k):
            dig[:, i] = rest % self.p
            rest //= self.p
        self.digit_table = dig
        self._build_log_tables()
        self._sqrt_table: np.ndarray | None = None

    # construction helpers

    def _mul_matrix(self, g: list[int]) -> np.ndarray:
        """Matrix over F_p of multiplication by g on digit vectors."""
        k, p, m = self.k, self.p, self.spec.modulus
        cols = []
        for i in range(k):
            basis = [0] * i + [1]
            prod = _pmulmod(basis, g, m, p) if g else []
            cols.append(prod + [0] * (k - len(prod)))
        return np.array(cols, dtype=np.int64).T

    def _build_log_tables(self) -> None:
        p, q, k, m = self.p, self.q, self.k, self.spec.modulus
        order = q - 1
        factors = _prime_factors(order)
        gen = None
        for code in range(2 if k == 1 else p, q):
            g = _trim([int(c) for c in self.digit_table[code]])
            if all(_ppowmod(g, order // r, m, p) != [1] for r in factors):
                gen = g
                break
        if gen is None:  # pragma: no cover - a cyclic group always has one
            raise AssertionError("no primitive element found")
        self.generator = int(np.dot(gen + [0] * (k - len(gen)), self._pw))
        mat = self._mul_matrix(gen)
        block = min(order, 256)
        head = np.zeros((block, k), dtype=np.int64)
        cur = np.zeros(k, dtype=np.int64)
        cur[0] = 1
        for i in range(block):
            head[i] = cur
            cur = (mat @ cur) % p
        # g^(jB+i) = M^(jB) g^i, so whole blocks come from one matrix product.
        step = np.eye(k, dtype=np.int64)
        for _ in range(block):
            step = (mat @ step) % p
        jump = np.eye(k, dtype=np.int64)
        chunks = []
        for _ in range(0, order, block):
            chunks.append((head @ jump.T) % p)
            jump = (step @ jump) % p
        exp_digits = np.concatenate(chunks)[:order]
        exp = exp_digits @ self._pw
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(order, dtype=np.int64)
        if np.any(log[1:] < 0):  # pragma: no cover - guards the generator search
            raise AssertionError("generator search failed")
        self.exp_table = exp
        self.log_table = log
        one_plus = np.where(exp % p == p - 1, exp - (p - 1), exp + 1)
        self.zech_table = log[one_plus]
        self._exp = exp.tolist()
        self._log = log.tolist()
        self._zech = self.zech_table.tolist()
        neg = (((-self.digit_table) % p) @ self._pw)
        self.neg_table = neg
        self._neg = neg.tolist()

    # scalar arithmetic on codes

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % (self.q - 1)]
        if z < 0:
            return 0
        return self._exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("zero to a negative power")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of an integer in the prime subfield."""
        return n % self.p

    def digits(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.digit_table[a])

    def from_digits(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.k:
            raise InvalidInput(f"expected at most {self.k} coefficients")
        return int(sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs)))

    def lex_key(self, a: int) -> tuple[int, ...]:
        return self.digits(a)

    def is_square(self, a: int) -> bool:
        return a == 0 or self._log[a] % 2 == 0

    # square roots

    def sqrt(self, a: int) -> int | None:
        """Square root with the lexicographically smaller coefficient vector."""
        if self.q <= EXHAUSTIVE_SQRT_LIMIT:
            if self._sqrt_table is None:
                self._sqrt_table = self._exhaustive_sqrt_table()
            s = int(self._sqrt_table[a])
            return None if s < 0 else s
        s = self.tonelli_shanks(a)
        if s is None:
            return None
        t = self.neg(s)
        return min(s, t, key=self.lex_key)

    def _exhaustive_sqrt_table(self) -> np.ndarray:
        table = np.full(self.q, -1, dtype=np.int64)
        keys = {}
        for x in range(self.q):
            sq = self.mul(x, x)
            cand = self.lex_key(x)
            if table[sq] < 0 or cand < keys[sq]:
                table[sq] = x
                keys[sq] = cand
        return table

    def _pow_sm(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def tonelli_shanks(self, a: int) -> int | None:
        """One square root of a (either sign), or None for a non-residue."""
        if a == 0:
            return 0
        half = (self.q - 1) // 2
        if self._pow_sm(a, half) != 1:
            return None
        odd, s = self.q - 1, 0
        while odd % 2 == 0:
            odd //= 2
            s += 1
        z = next(c for c in range(2, self.q) if self._pow_sm(c, half) != 1)
        m, c = s, self._pow_sm(z, odd)
        t = self._pow_sm(a, odd)
        r = self._pow_sm(a, (odd + 1) // 2)
        while t != 1:
            i, tt = 0, t
            while tt != 1:
                tt = self.mul(tt, tt)
                i += 1
            b = c
            for _ in range(m - i - 1):
                b = self.mul(b, b)
            m, c = i, self.mul(b, b)
            t = self.mul(t, c)
            r = self.mul(r, b)
        return r

    # vectorized arithmetic on arrays of codes

    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a + b) % self.p
        d = (self.digit_table[a] + self.digit_table[b]) % self.p
        return d @ self._pw

    def vneg(self, a) -> np.ndarray:
        return self.neg_table[np.asarray(a, dtype=np.int64)]

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a * b) % self.p
        la = self.log_table[a]
        lb = self.log_table[b]
        out = self.exp_table[(la + lb) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vinv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        return self.exp_table[(-self.log_table[a]) % (self.q - 1)]

    def vsum(self, a, axis: int = -1) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return a.sum(axis=axis) % self.p
        d = self.digit_table[a].sum(axis=axis if axis >= 0 else axis - 1) % self.p
        return d @ self._pw

    def _reduce_poly_digits(self, coeffs: list[np.ndarray]) -> np.ndarray:
        """Fold digit arrays of degree < 2k-1 back below k and recombine."""
        p, k, m = self.p, self.k, self.spec.modulus
        coeffs = [c % p for c in coeffs]
        for deg in range(len(coeffs) - 1, k - 1, -1):
            top = coeffs[deg]
            for i in range(k):
                if m[i]:
                    coeffs[deg - k + i] = (coeffs[deg - k + i] - top * m[i]) % p
        out = np.zeros_like(coeffs[0])
        for i in range(k):
            out = out + coeffs[i] * (p**i)
        return out

    def matmul(self, a, b) -> np.ndarray:
        """Matrix product over the field (BLAS on digit planes)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a @ b) % self.p
        da = [self.digit_table[a][..., i] for i in range(self.k)]
        db = [self.digit_table[b][..., i] for i in range(self.k)]
        planes = [None] * (2 * self.k - 1)
        for i in range(self.k):
            for j in range(self.k):
                term = da[i] @ db[j]
                planes[i + j] = term if planes[i + j] is None else planes[i + j] + term
        return self._reduce_poly_digits(planes)

    def rowdot(self, a, b) -> np.ndarray:
        """Row-wise dot products of two equally shaped 2-D arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a * b).sum(axis=-1) % self.p
        da = self.digit_table[a]
        db = self.digit_table[b]
        planes = [None] * (2 * self.k - 1)
        for i in range(self.k):
            for j in range(self.k):
                term = (da[..., i] * db[..., j]).sum(axis=-1)
                planes[i + j] = term if planes[i + j] is None else planes[i + j] + term
        return self._reduce_poly_digits(planes)

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def __repr__(self) -> str:
        return f"GF({self.spec})"


@lru_cache(maxsize=64)
def get_field(spec: FieldSpec) -> GF:
    return GF(spec)


def prime_field(p: int) -> GF:
    return get_field(FieldSpec.standard(p, 1))


# -- scalar wrapper -------------------------------------------------------------


class Fq:
    """A field element with operators, for readable scalar code and tests."""

    __slots__ = ("field", "code")

    def __init__(self, field: GF | FieldSpec, value: int | Sequence[int] = 0) -> None:
        if isinstance(field, FieldSpec):
            field = get_field(field)
        self.field = field
        if isinstance(value, (int, np.integer)):
            code = int(value)
            if not 0 <= code < field.q:
                raise InvalidInput(f"code {code} out of range for {field.spec}")
        else:
            code = field.from_digits(list(value))
        self.code = code

    @classmethod
    def from_int(cls, field: GF, n: int) -> "Fq":
        return cls(field, field.from_int(n))

    @property
    def spec(self) -> FieldSpec:
        return self.field.spec

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.digits(self.code)

    def _other(self, other) -> int:
        if isinstance(other, Fq):
            if other.field.spec != self.field.spec:
                raise FieldMismatch(f"{self.field.spec} vs {other.field.spec}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return NotImplemented

    def _wrap(self, code: int) -> "Fq":
        return Fq(self.field, code)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.code))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.code, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(o, self.code))

    def __neg__(self) -> "Fq":
        return self._wrap(self.field.neg(self.code))

    def __pow__(self, e: int) -> "Fq":
        return self._wrap(self.field.pow(self.code, e))

    def inv(self) -> "Fq":
        return self._wrap(self.field.inv(self.code))

    def sqrt(self) -> "Fq | None":
        s = self.field.sqrt(self.code)
        return None if s is None else self._wrap(s)

    def is_square(self) -> bool:
        return self.field.is_square(self.code)

    def frobenius(self) -> "Fq":
        return self ** self.field.p

    def __eq__(self, other) -> bool:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self.code == o

    def __hash__(self) -> int:
        return hash((self.field.spec, self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __int__(self) -> int:
        return self.code

    def __repr__(self) -> str:
        if self.field.k == 1:
            return f"Fq({self.code} mod {self.field.p})"
        return f"Fq({list(self.coeffs)} in {self.field.spec})"


# -- extensions ---------------------------------------------------------------


class Embedding:
    """Ring homomorphism between two fields, tabulated on codes."""

    def __init__(self, src: GF, dst: GF, table: np.ndarray) -> None:
        self.src = src
        self.dst = dst
        self.table = np.asarray(table, dtype=np.int64)
        self._list = self.table.tolist()

    @property
    def is_identity(self) -> bool:
        return self.src.spec == self.dst.spec

    def __call__(self, x):
        if isinstance(x, Fq):
            if x.field.spec != self.src.spec:
                raise FieldMismatch(f"embedding expects {self.src.spec}")
            return Fq(self.dst, self._list[x.code])
        if isinstance(x, (int, np.integer)):
            return self._list[int(x)]
        return self.table[np.asarray(x, dtype=np.int64)]

    def __repr__(self) -> str:
        return f"Embedding({self.src.spec} -> {self.dst.spec})"


def identity_embedding(field: GF) -> Embedding:
    return Embedding(field, field, field.elements())


def _modulus_root(src: GF, dst: GF) -> int:
    """Root of src's modulus in dst with the smallest coefficient vector."""
    x = dst.elements()
    acc = np.zeros_like(x)
    for c in reversed(src.spec.modulus):
        acc = dst.vadd(dst.vmul(acc, x), np.full_like(x, c))
    roots = [int(r) for r in np.flatnonzero(acc == 0)]
    if not roots:  # pragma: no cover - dst is always an extension of src
        raise AssertionError("modulus has no root in the target field")
    return min(roots, key=dst.lex_key)


def extension(spec: FieldSpec, degree: int) -> tuple[FieldSpec, Embedding]:
    """The degree-``degree`` extension of ``spec`` modelled as one F_p[t]/(m)."""
    src = get_field(spec)
    if degree == 1:
        return spec, identity_embedding(src)
    new_spec = FieldSpec.standard(spec.p, spec.k * degree)
    dst = get_field(new_spec)
    root = _modulus_root(src, dst) if spec.k > 1 else 0
    table = np.zeros(src.q, dtype=np.int64)
    power = 1
    for i in range(spec.k):
        coeff = src.digit_table[:, i]
        table = dst.vadd(table, dst.vmul(coeff, np.full_like(coeff, power)))
        power = dst.mul(power, root)
    return new_spec, Embedding(src, dst, table)


def extend_to_split(spec: FieldSpec, f: "Poly") -> tuple[FieldSpec, Embedding]:
    """Smallest extension of ``spec`` over which ``f`` splits into linear factors."""
    if f.is_zero():
        raise InvalidInput("extend_to_split needs a nonzero polynomial")
    degrees = f.factor_degrees()
    lcm = 1
    for d in degrees:
        lcm = lcm * d // math.gcd(lcm, d)
    return extension(spec, lcm)


def extend_for_sqrts(spec: FieldSpec, values: Iterable) -> tuple[FieldSpec, Embedding]:
    """Smallest extension in which every value is a square (degree 1 or 2)."""
    field = get_field(spec)
    codes = [v.code if isinstance(v, Fq) else int(v) for v in values]
    if all(field.is_square(c) for c in codes):
        return extension(spec, 1)
    return extension(spec, 2)
