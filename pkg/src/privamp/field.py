"""Finite fields F_q with q = p^k <= 256 and the trace pairing on F_q^n.

Elements are integers in ``[0, q)``.  The integer ``rep`` encodes the
polynomial-basis coordinates base p: coefficient of x^i is the i-th base-p
digit.  All arithmetic goes through precomputed numpy tables, so vectors and
matrices over F_q are plain integer arrays indexed into those tables.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, DomainError, SpecMismatch

MAX_FIELD_SIZE = 256

# Conway polynomials, coefficients low degree first (monic, length k+1).
CONWAY = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
}


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def _poly_mod(num: list[int], den: tuple[int, ...], p: int) -> list[int]:
    """Remainder of ``num`` modulo the monic polynomial ``den`` over F_p."""
    num = list(num)
    dd = len(den) - 1
    for top in range(len(num) - 1, dd - 1, -1):
        c = num[top] % p
        if c:
            for i in range(dd + 1):
                num[top - dd + i] = (num[top - dd + i] - c * den[i]) % p
    return [c % p for c in num[:dd]]


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Exhaustive factor test: no monic divisor of degree 1..k//2."""
    k = len(modulus) - 1
    if k < 1 or modulus[-1] % p != 1:
        return False
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not any(_poly_mod(list(modulus), tuple(low) + (1,), p)):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Parameters of F_q: characteristic p, degree k and the reduction modulus."""

    p: int
    k: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not _is_prime(self.p):
            raise DomainError(f"characteristic {self.p} is not prime")
        if self.k < 1 or self.p**self.k > MAX_FIELD_SIZE:
            raise DomainError(f"field size {self.p}^{self.k} outside [2, {MAX_FIELD_SIZE}]")
        if len(self.modulus) != self.k + 1:
            raise DomainError("modulus must have k+1 coefficients")
        if not is_irreducible(self.modulus, self.p):
            raise DomainError(f"modulus {self.modulus} is not irreducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.k


def field_spec(q: int, modulus: tuple[int, ...] | None = None) -> FieldSpec:
    """FieldSpec for F_q using the shipped Conway modulus unless one is given."""
    for p in range(2, q + 1):
        if q % p == 0:
            break
    k = round(math.log(q, p))
    if p**k != q:
        raise DomainError(f"{q} is not a prime power")
    if modulus is None:
        modulus = CONWAY.get((p, k), (0, 1))
    return FieldSpec(p, k, tuple(modulus))


class Field:
    """Arithmetic tables for one FieldSpec.  Use :func:`get_field`."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        p, k, q = spec.p, spec.k, spec.q
        self.p, self.k, self.q = p, k, q
        digits = np.array([[(r // p**i) % p for i in range(k)] for r in range(q)], dtype=np.int64)
        weights = p ** np.arange(k, dtype=np.int64)

        # xpow[r, i] = coefficient vector of r * x^i mod modulus
        xpow = np.zeros((q, k, k), dtype=np.int64)
        cur = digits.copy()
        mod = np.array(spec.modulus[:k], dtype=np.int64)
        for i in range(k):
            xpow[:, i, :] = cur
            top = cur[:, -1].copy()
            cur = np.roll(cur, 1, axis=1)
            cur[:, 0] = 0
            cur = (cur - top[:, None] * mod[None, :]) % p

        prod = np.einsum("bi,aij->abj", digits, xpow) % p
        self.mul = prod @ weights
        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg = ((-digits) % p) @ weights
        self.sub = self.add[:, self.neg]

        self.inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            self.inv[a] = int(np.flatnonzero(self.mul[a] == 1)[0])

        # absolute trace z + z^p + ... + z^{p^(k-1)}
        elems = np.arange(q)
        frob = elems.copy()
        trace = elems.copy()
        for _ in range(k - 1):
            power = np.ones(q, dtype=np.int64)
            for _ in range(p):
                power = self.mul[power, frob]
            frob = power
            trace = self.add[trace, frob]
        if np.any(trace >= p):
            raise AssertionError("trace left the prime field")
        self.trace = trace

    def element(self, rep: int) -> "FieldElement":
        return FieldElement(self.spec, int(rep))

    # vector helpers -------------------------------------------------------

    def dot(self, x, y) -> int:
        """sum_j x_j y_j in F_q."""
        acc = 0
        for a, b in zip(x, y):
            acc = self.add[acc, self.mul[a, b]]
        return int(acc)

    def pairing(self, x, y) -> int:
        """sum_j Tr(x_j y_j), an element of F_p."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if x.shape != y.shape:
            raise SpecMismatch("pairing needs vectors of equal length")
        return int(self.trace[self.mul[x, y]].sum() % self.p)

    def pairing_matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Table of pairings between rows of ``xs`` and rows of ``ys``."""
        tr = self.trace[self.mul[xs[:, None, :], ys[None, :, :]]]
        return tr.sum(axis=2) % self.p

    def vector_add(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.add[x, y]

    def vector_sub(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.sub[x, y]

    def matvec(self, matrix: np.ndarray, vectors: np.ndarray) -> np.ndarray:
        """Apply an m x n matrix to each row of ``vectors`` (N x n) -> N x m."""
        matrix = np.asarray(matrix, dtype=np.int64)
        out = np.zeros((vectors.shape[0], matrix.shape[0]), dtype=np.int64)
        for r in range(matrix.shape[0]):
            acc = np.zeros(vectors.shape[0], dtype=np.int64)
            for j in range(matrix.shape[1]):
                acc = self.add[acc, self.mul[matrix[r, j], vectors[:, j]]]
            out[:, r] = acc
        return out

    def row_reduce(self, matrix: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns."""
        a = np.array(matrix, dtype=np.int64, copy=True)
        rows, cols = a.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.flatnonzero(a[r:, c])
            if nz.size == 0:
                continue
            piv = r + int(nz[0])
            a[[r, piv]] = a[[piv, r]]
            a[r] = self.mul[self.inv[a[r, c]], a[r]]
            for i in range(rows):
                if i != r and a[i, c]:
                    a[i] = self.sub[a[i], self.mul[a[i, c], a[r]]]
            pivots.append(c)
            r += 1
        return a[:r], pivots

    def rank(self, matrix: np.ndarray) -> int:
        return len(self.row_reduce(matrix)[1])

    def kernel_basis(self, matrix: np.ndarray) -> np.ndarray:
        """Basis (as rows) of {x : matrix x = 0}."""
        matrix = np.asarray(matrix, dtype=np.int64)
        n = matrix.shape[1]
        red, pivots = self.row_reduce(matrix)
        free = [c for c in range(n) if c not in pivots]
        basis = np.zeros((len(free), n), dtype=np.int64)
        for b, f in enumerate(free):
            basis[b, f] = 1
            for i, pc in enumerate(pivots):
                basis[b, pc] = self.neg[red[i, f]]
        return basis

    def span(self, basis: np.ndarray, n: int) -> np.ndarray:
        """All q^dim vectors of the subspace spanned by the rows of ``basis``."""
        basis = np.asarray(basis, dtype=np.int64).reshape(-1, n)
        coeffs = all_vectors(self.q, basis.shape[0])
        return self.matvec(basis.T, coeffs) if basis.shape[0] else np.zeros((1, n), dtype=np.int64)


@lru_cache(maxsize=None)
def get_field(spec: FieldSpec) -> Field:
    return Field(spec)


@dataclass(frozen=True)
class FieldElement:
    """An element of F_q carrying its FieldSpec; supports + - * / and ``**``."""

    spec: FieldSpec
    rep: int

    def __post_init__(self):
        if not 0 <= self.rep < self.spec.q:
            raise DomainError(f"rep {self.rep} outside [0, {self.spec.q})")

    def _other(self, other) -> "FieldElement":
        if isinstance(other, int):
            other = FieldElement(self.spec, other % self.spec.q)
        if other.spec != self.spec:
            raise SpecMismatch("operands belong to different fields")
        return other

    def __add__(self, other):
        return ff_arith("add", self, self._other(other))

    def __sub__(self, other):
        return ff_arith("add", self, ff_arith("neg", self._other(other)))

    def __mul__(self, other):
        return ff_arith("mul", self, self._other(other))

    def __truediv__(self, other):
        return ff_arith("mul", self, ff_arith("inv", self._other(other)))

    def __neg__(self):
        return ff_arith("neg", self)

    def __pow__(self, e: int):
        if e < 0:
            return ff_arith("inv", self) ** (-e)
        out = FieldElement(self.spec, 1)
        for _ in range(e):
            out = out * self
        return out


def ff_arith(op: str, x: FieldElement, y: FieldElement | None = None) -> FieldElement:
    """Field operation ``op`` in {add, mul, inv, neg}."""
    f = get_field(x.spec)
    if op in ("add", "mul"):
        if y is None:
            raise DomainError(f"{op} needs two operands")
        if y.spec != x.spec:
            raise SpecMismatch("operands belong to different fields")
        table = f.add if op == "add" else f.mul
        return FieldElement(x.spec, int(table[x.rep, y.rep]))
    if op == "neg":
        return FieldElement(x.spec, int(f.neg[x.rep]))
    if op == "inv":
        if x.rep == 0:
            raise DivisionByZero("zero has no inverse")
        return FieldElement(x.spec, int(f.inv[x.rep]))
    raise DomainError(f"unknown operation {op!r}")


def trace(x: FieldElement) -> int:
    return int(get_field(x.spec).trace[x.rep])


def pairing(x, y) -> int:
    """Trace pairing of two equal-length sequences of FieldElements."""
    x, y = list(x), list(y)
    if len(x) != len(y):
        raise SpecMismatch("pairing needs vectors of equal length")
    if not x:
        return 0
    spec = x[0].spec
    if any(e.spec != spec for e in x + y):
        raise SpecMismatch("operands belong to different fields")
    return get_field(spec).pairing([e.rep for e in x], [e.rep for e in y])


def all_vectors(q: int, n: int) -> np.ndarray:
    """Every vector of F_q^n as rows; row index equals :func:`vector_index`."""
    idx = np.arange(q**n, dtype=np.int64)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.stack([(idx // q ** (n - 1 - j)) % q for j in range(n)], axis=1).reshape(q**n, n)


def vector_index(v, q: int) -> int:
    """Base-q index of a vector, first coordinate most significant."""
    out = 0
    for c in v:
        out = out * q + int(c)
    return out


def root_of_unity_sum(weights_by_residue, p: int) -> complex:
    """sum_k w_k * exp(2 pi i k / p), exactly 0 when all weights coincide."""
    w = np.asarray(weights_by_residue, dtype=float)
    if len(w) == p and np.all(w == w[0]):
        return 0j
    return sum(complex(wk) * cmath.exp(2j * math.pi * k / p) for k, wk in enumerate(w))
