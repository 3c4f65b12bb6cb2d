"""Named pencils used by the tests, the acceptance suite and the command line.

Most fixtures are trace-form pencils: k[x]/f with the form "top
coefficient of l*m" and T multiplication by x, so the multiplicity shape
is read off the roots of f.  Generic odd fixtures are diagonal instead,
weighted so the explicit square-root construction is rational over the
base field.

Weierstrass fixtures append one line to an odd trace-form pencil, with
Gram entry 1 and eigenvalue a0.  The extra root a0 is then simple and
its hyperplane recovers the odd pencil, which has rational points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInput, NotGeneric
from .fano import elkies_kernel
from .gf import FieldSpec, get_field, is_prime
from .poly import Poly
from .quadrics import Pencil, QuadraticForm, diagonal_pencil, pencil_from_operator, trace_form_fixture

DEFAULT_Q = 7


def spec_for_q(q: int) -> FieldSpec:
    """Standard model of F_q for an odd prime power q."""
    if q < 3:
        raise InvalidInput(f"q must be an odd prime power, got {q}")
    for p in range(3, q + 1, 2):
        if q % p == 0:
            k = 0
            rest = q
            while rest % p == 0:
                rest //= p
                k += 1
            if rest != 1 or not is_prime(p):
                raise InvalidInput(f"q must be an odd prime power, got {q}")
            return FieldSpec.standard(p, k)
    raise InvalidInput(f"q must be an odd prime power, got {q}")


def shape_roots(shape: tuple[int, ...]) -> list[int]:
    """Roots 1, 2, 3, ... repeated according to the multiplicity shape."""
    return [i + 1 for i, m in enumerate(shape) for _ in range(m)]


def trace_pencil(roots: list[int], q: int = DEFAULT_Q) -> Pencil:
    spec = spec_for_q(q)
    if any(not 0 <= r < spec.p for r in roots):
        raise InvalidInput(f"roots {roots} do not lie in the prime field of F_{q}")
    F = get_field(spec)
    Q, T, _ = trace_form_fixture(Poly.from_roots(F, roots))
    return pencil_from_operator(Q, T)


def shape_pencil(shape: tuple[int, ...], q: int = DEFAULT_Q) -> Pencil:
    return trace_pencil(shape_roots(shape), q)


def weierstrass_pencil(odd_roots: list[int], a0: int, q: int = DEFAULT_Q) -> Pencil:
    """Orthogonal sum of the odd trace-form pencil for ``odd_roots`` and a line with eigenvalue a0."""
    if len(odd_roots) % 2 == 0:
        raise InvalidInput("the restricted pencil must have odd dimension")
    if a0 in odd_roots:
        raise InvalidInput("a0 must be a new, simple root")
    spec = spec_for_q(q)
    F = get_field(spec)
    Q, T, _ = trace_form_fixture(Poly.from_roots(F, odd_roots))
    N = Q.dim + 1
    gram = np.zeros((N, N), dtype=np.int64)
    gram[:-1, :-1] = Q.gram
    gram[-1, -1] = 1
    op = np.zeros((N, N), dtype=np.int64)
    op[:-1, :-1] = T
    op[-1, -1] = a0
    return pencil_from_operator(QuadraticForm(F, gram), op)


def generic_odd_data(N: int, q: int = DEFAULT_Q) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(c, a) with c = 0, 1, ..., N-1 and weights a the power-sum kernel.

    Weighting Q1 by the kernel makes every sign choice of the square-root
    construction rational, whatever q is.
    """
    F = get_field(spec_for_q(q))
    if N > F.q:
        raise NotGeneric(f"F_{q} has fewer than {N} distinct elements")
    c = tuple(range(N))
    return c, tuple(int(d) for d in elkies_kernel(F, c))


def generic_odd_pencil(N: int, q: int = DEFAULT_Q) -> Pencil:
    F = get_field(spec_for_q(q))
    c, a = generic_odd_data(N, q)
    return diagonal_pencil(F, c, a)


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    build: Callable[[int], Pencil]
    shape: tuple[int, ...] | None = None
    weierstrass_root: int | None = None

    def pencil(self, q: int = DEFAULT_Q) -> Pencil:
        return self.build(q)


def _trace(name: str, description: str, shape: tuple[int, ...], roots: list[int] | None = None) -> Fixture:
    roots = shape_roots(shape) if roots is None else roots
    return Fixture(name, description, lambda q, r=tuple(roots): trace_pencil(list(r), q), shape)


def _weier(name: str, description: str, odd_roots: list[int], a0: int, shape: tuple[int, ...]) -> Fixture:
    return Fixture(
        name,
        description,
        lambda q, r=tuple(odd_roots): weierstrass_pencil(list(r), a0, q),
        shape,
        weierstrass_root=a0,
    )


_REGISTRY: list[Fixture] = [
    Fixture("generic-odd-3", "diagonal N=3 pencil with rational lines", lambda q: generic_odd_pencil(3, q), (1, 1, 1)),
    Fixture("generic-odd-5", "diagonal N=5 pencil with rational planes", lambda q: generic_odd_pencil(5, q), (1,) * 5),
    _trace("generic-even-4", "trace form of x(x-1)(x-2)(x-3)", (1,) * 4, [0, 1, 2, 3]),
    _trace("generic-even-6", "trace form of x(x-1)...(x-5)", (1,) * 6, [0, 1, 2, 3, 4, 5]),
    _trace("regular-odd-5-shape-2111", "trace form, multiplicities 2,1,1,1", (2, 1, 1, 1)),
    _trace("regular-odd-5-shape-221", "trace form, multiplicities 2,2,1", (2, 2, 1)),
    _trace("regular-odd-5-shape-311", "trace form, multiplicities 3,1,1", (3, 1, 1)),
    _trace("regular-odd-5-shape-32", "trace form, multiplicities 3,2", (3, 2)),
    _trace("regular-odd-5-shape-41", "trace form, multiplicities 4,1", (4, 1)),
    _trace("even-terminal-112", "N=4 with one double root", (1, 1, 2)),
    _trace("even-terminal-31", "N=4 with a triple root", (3, 1)),
    _trace("even-terminal-22", "N=4 with two double roots", (2, 2)),
    _trace("even-terminal-400", "N=4 with a single quadruple root", (4,)),
    # root 6 rather than 5: the node's tangent directions are then rational over F_7
    _trace("nodal-even-6", "N=6, one double root (split node at q=7)", (2, 1, 1, 1, 1), [1, 1, 2, 3, 4, 6]),
    _trace("cusp-even-6", "N=6, one triple root", (3, 1, 1, 1)),
    _weier("weierstrass-even-4", "trace form of (x-1)(x-2)(x-3) plus a line at 0", [1, 2, 3], 0, (1,) * 4),
    _weier("weierstrass-even-6", "trace form of (x-1)...(x-5) plus a line at 0", [1, 2, 3, 4, 5], 0, (1,) * 6),
    _weier(
        "weierstrass-nodal-6", "trace form of (x-1)^2(x-2)(x-3)(x-4) plus a line at 6", [1, 1, 2, 3, 4], 6, (2, 1, 1, 1, 1)
    ),
    _weier(
        "weierstrass-cusp-6", "trace form of (x-1)^3(x-2)(x-3) plus a line at 6", [1, 1, 1, 2, 3], 6, (3, 1, 1, 1)
    ),
]

FIXTURES: dict[str, Fixture] = {fx.name: fx for fx in _REGISTRY}
FIXTURES["even-terminal-4"] = FIXTURES["even-terminal-400"]


def fixture_names() -> list[str]:
    return [fx.name for fx in _REGISTRY]


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise InvalidInput(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}") from None


def load_fixture(name: str, q: int = DEFAULT_Q) -> Pencil:
    return get_fixture(name).pencil(q)
