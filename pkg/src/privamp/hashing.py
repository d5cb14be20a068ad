"""Linear hash families over F_q and their exact universality parameters.

Every family is fully enumerated.  For a linear f_X : F_q^n -> F_q^m with
kernel C_X, the row space of its matrix is the dual code C_X^perp under the
trace pairing, so both the collision and the dual-code statistics reduce to
counting over members.

Conventions
-----------
* vectors are indexed base q, first coordinate most significant;
* Toeplitz entry (i, j) equals seed[i - j + (cols - 1)];
* a modified Toeplitz matrix is [X | I_m] with X an m x (n-m) Toeplitz block,
  which uses n - 1 seed symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError, TooLarge
from .field import FieldElement, FieldSpec, all_vectors, get_field

MEMBER_CAP = 2**24
KINDS = ("full_random", "toeplitz", "modified_toeplitz", "custom")


@dataclass(frozen=True, eq=False)
class LinearHash:
    """f(a) = matrix . a over F_q, with an m x n matrix of field reps."""

    spec: FieldSpec
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.int64)
        if mat.ndim != 2:
            raise ShapeError("hash matrix must be two-dimensional")
        if mat.shape[0] > mat.shape[1]:
            raise ShapeError("a hash needs m <= n")
        if np.any((mat < 0) | (mat >= self.spec.q)):
            raise DomainError("matrix entries must be field reps in [0, q)")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @property
    def field(self):
        return get_field(self.spec)

    def elements(self) -> list[list[FieldElement]]:
        return [[FieldElement(self.spec, int(v)) for v in row] for row in self.matrix]

    def image_indices(self) -> np.ndarray:
        """Index of f(a) in F_q^m for every a in F_q^n (in index order)."""
        q = self.spec.q
        out = self.field.matvec(self.matrix, all_vectors(q, self.n))
        return out @ (q ** np.arange(self.m - 1, -1, -1, dtype=np.int64))

    def rank(self) -> int:
        return self.field.rank(self.matrix)

    @property
    def surjective(self) -> bool:
        return self.rank() == self.m

    def kernel_basis(self) -> np.ndarray:
        return self.field.kernel_basis(self.matrix)

    def kernel_indicator(self) -> np.ndarray:
        return self.image_indices() == 0

    def rowspace_indicator(self) -> np.ndarray:
        q = self.spec.q
        vecs = self.field.span(self.matrix, self.n)
        ind = np.zeros(q**self.n, dtype=bool)
        ind[vecs @ (q ** np.arange(self.n - 1, -1, -1, dtype=np.int64))] = True
        return ind


@dataclass(frozen=True, eq=False)
class HashFamily:
    """A finite random hash function: members with probabilities."""

    members: tuple
    kind: str = "custom"
    seed_distribution: np.ndarray | None = field(default=None)

    def __post_init__(self):
        members = tuple((h, float(p)) for h, p in self.members)
        if not members:
            raise DomainError("a family needs at least one member")
        if self.kind not in KINDS:
            raise DomainError(f"unknown family kind {self.kind!r}")
        probs = np.array([p for _, p in members])
        if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
            raise DomainError("member probabilities must be non-negative and sum to 1")
        h0 = members[0][0]
        for h, _ in members:
            if h.spec != h0.spec or h.matrix.shape != h0.matrix.shape:
                raise DomainError("all members must share field, n and m")
        object.__setattr__(self, "members", members)

    @property
    def spec(self) -> FieldSpec:
        return self.members[0][0].spec

    @property
    def n(self) -> int:
        return self.members[0][0].n

    @property
    def m(self) -> int:
        return self.members[0][0].m

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.members])

    def non_surjective(self) -> list[int]:
        """Indices of members whose matrix has rank below m."""
        return [i for i, (h, _) in enumerate(self.members) if not h.surjective]

    def surjective_part(self) -> "HashFamily":
        """The family conditioned on its members of full rank m."""
        keep = [(h, p) for h, p in self.members if h.surjective and p > 0]
        if not keep:
            raise DomainError("no surjective member")
        total = math.fsum(p for _, p in keep)
        return HashFamily(tuple((h, p / total) for h, p in keep), self.kind)


def toeplitz(seed, rows: int, cols: int) -> np.ndarray:
    """rows x cols Toeplitz matrix, entry (i, j) = seed[i - j + cols - 1]."""
    seed = np.asarray(seed, dtype=np.int64)
    if seed.size != rows + cols - 1:
        raise ShapeError(f"a {rows}x{cols} Toeplitz matrix needs {rows + cols - 1} seeds")
    i = np.arange(rows)[:, None]
    j = np.arange(cols)[None, :]
    return seed[i - j + cols - 1]


def seed_count(kind: str, n: int, m: int) -> int:
    if kind == "full_random":
        return m * n
    if kind == "toeplitz":
        return n + m - 1
    if kind == "modified_toeplitz":
        return n - 1
    raise DomainError(f"{kind!r} has no seed construction")


def _matrix_from_seed(kind: str, seed: np.ndarray, n: int, m: int) -> np.ndarray:
    if kind == "full_random":
        return seed.reshape(m, n)
    if kind == "toeplitz":
        return toeplitz(seed, m, n)
    block = toeplitz(seed, m, n - m) if n > m else np.zeros((m, 0), dtype=np.int64)
    return np.hstack([block, np.eye(m, dtype=np.int64)])


def make_family(kind: str, spec: FieldSpec, n: int, m: int, seed_distribution=None,
                surjective_only: bool = False) -> HashFamily:
    """Enumerate every member of a named construction.

    ``seed_distribution`` is a probability vector over seed vectors (index
    order of F_q^{#seeds}); it defaults to uniform.  ``surjective_only``
    conditions the family on its full-rank members.
    """
    if not 1 <= m <= n:
        raise DomainError("need 1 <= m <= n")
    k = seed_count(kind, n, m)
    q = spec.q
    if k * math.log2(q) > math.log2(MEMBER_CAP):
        raise TooLarge(f"q^{k} = {q}^{k} members exceed the enumeration cap 2^24")
    seeds = all_vectors(q, k) if k else np.zeros((1, 0), dtype=np.int64)
    if seed_distribution is None:
        probs = np.full(len(seeds), 1.0 / len(seeds))
    else:
        probs = np.asarray(seed_distribution, dtype=float)
        if probs.shape != (len(seeds),):
            raise ShapeError(f"seed distribution must have {len(seeds)} entries")
    members = tuple(
        (LinearHash(spec, _matrix_from_seed(kind, s, n, m)), p) for s, p in zip(seeds, probs)
    )
    fam = HashFamily(members, kind, None if seed_distribution is None else probs)
    return fam.surjective_part() if surjective_only else fam


def custom_family(spec: FieldSpec, matrices, probabilities=None) -> HashFamily:
    matrices = [np.asarray(mat, dtype=np.int64) for mat in matrices]
    if probabilities is None:
        probabilities = [1.0 / len(matrices)] * len(matrices)
    return HashFamily(tuple((LinearHash(spec, mat), p) for mat, p in zip(matrices, probabilities)), "custom")


# ----------------------------------------------------------- universality


def _member_average(fam: HashFamily, indicator) -> np.ndarray:
    probs = fam.probabilities
    if np.all(probs == probs[0]):
        # integer counts keep uniform families exact
        counts = np.zeros(fam.q**fam.n, dtype=np.int64)
        for h, _ in fam.members:
            counts += indicator(h)
        return counts / len(probs)
    acc = np.zeros(fam.q**fam.n)
    for h, p in fam.members:
        if p:
            acc += p * indicator(h)
    return acc


def universality_epsilon(fam: HashFamily) -> float:
    """q^m max_{d != 0} Pr[f_X(d) = 0]: the smallest epsilon with collision prob <= epsilon/|B|."""
    pr = _member_average(fam, LinearHash.kernel_indicator)
    return float(fam.q**fam.m * pr[1:].max())


def dual_universality_epsilon(fam: HashFamily) -> float:
    """q^{n-m} max_{x != 0} Pr[x in rowspace f_X], i.e. the dual codes' collision parameter."""
    pr = _member_average(fam, LinearHash.rowspace_indicator)
    return float(fam.q ** (fam.n - fam.m) * pr[1:].max())


def rank_aware_dual_epsilon(fam: HashFamily) -> float:
    """max_{x != 0} E_X [x in rowspace f_X] q^{n - rank f_X}.

    Equals :func:`dual_universality_epsilon` when every member is surjective.
    With rank-deficient members it is the parameter for which the collision
    estimate of the quotient maps a -> a + ker f_X still holds.
    """
    acc = np.zeros(fam.q**fam.n)
    for h, p in fam.members:
        if p:
            acc += p * fam.q ** (fam.n - h.rank()) * h.rowspace_indicator()
    return float(acc[1:].max())


def universality_lower_bound(size_A: int, size_B: int) -> float:
    """No family beats (|A| - |B|) / (|A| - 1)."""
    return (size_A - size_B) / (size_A - 1)


def conversion_epsilon(eps: float, n: int, m: int, q: int) -> dict:
    """Dual parameter implied by an eps-almost universal2 surjective linear family.

    Both readings of the conversion formula are returned: ``printed`` with
    q^m eps inside the bracket and ``corrected`` with q^{-m} eps.  Only the
    corrected one is consistent with the q-almost-dual guarantee at eps = 1.
    """
    printed = q * (1 - q**m * eps) + (eps - 1) * q ** (n - m)
    corrected = q * (1 - q ** (-m) * eps) + (eps - 1) * q ** (n - m)
    return {"printed": printed, "corrected": corrected}


def nonuniform_seed_epsilon(fam: HashFamily) -> float:
    """q^{n-1} exp(-H_min(seed)) = q^{n-1} max P_R, a dual parameter for skewed seeds."""
    if fam.kind != "modified_toeplitz":
        raise DomainError("only defined for modified Toeplitz families")
    probs = fam.probabilities if fam.seed_distribution is None else fam.seed_distribution
    return float(fam.q ** (fam.n - 1) * probs.max())


# ------------------------------------------------------------ code ensembles


@dataclass(frozen=True, eq=False)
class CodeEnsemble:
    """Random subspace of F_q^n: (basis rows, probability) pairs."""

    spec: FieldSpec
    n: int
    codes: tuple

    @property
    def dims(self) -> list[int]:
        return [b.shape[0] for b, _ in self.codes]

    @property
    def t_min(self) -> int:
        return min(self.dims)

    @property
    def t_max(self) -> int:
        return max(self.dims)

    def uniform_distributions(self) -> list[tuple[np.ndarray, float]]:
        """(P_W uniform on C_X, P_X) for every member."""
        fld = get_field(self.spec)
        q = self.spec.q
        weights = q ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        out = []
        for basis, p in self.codes:
            pw = np.zeros(q**self.n)
            pw[fld.span(basis, self.n) @ weights] = 1.0 / q ** basis.shape[0]
            out.append((pw, p))
        return out


def kernel_ensemble(fam: HashFamily) -> CodeEnsemble:
    """The random code C_X = ker f_X."""
    return CodeEnsemble(fam.spec, fam.n, tuple((h.kernel_basis(), p) for h, p in fam.members))


def character_power(weights_by_residue: np.ndarray, p: int) -> np.ndarray:
    """|sum_k c_k w^k|^2 with w = exp(2 pi i / p), row-wise; exactly 0 for balanced rows."""
    c = np.atleast_2d(np.asarray(weights_by_residue, dtype=float))
    k = np.arange(p)
    cos = np.cos(2 * np.pi * (k[:, None] - k[None, :]) / p)
    if p == 2:
        cos = np.array([[1.0, -1.0], [-1.0, 1.0]])
    out = np.einsum("ik,kl,il->i", c, cos, c)
    balanced = np.all(c == c[:, :1], axis=1)
    out[balanced] = 0.0
    return np.maximum(out, 0.0)


def delta_bias(ensemble, spec: FieldSpec, n: int) -> float:
    """max_{x != 0} sqrt(E_X |E_W w^{<x, W_X>}|^2) for (P_W, P_X) pairs on F_q^n."""
    fld = get_field(spec)
    vecs = all_vectors(spec.q, n)
    pair = fld.pairing_matrix(vecs, vecs)
    masks = [(pair == k).astype(float) for k in range(spec.p)]
    acc = np.zeros(spec.q**n)
    for pw, px in ensemble:
        c = np.stack([mk @ np.asarray(pw, dtype=float) for mk in masks], axis=1)
        acc += px * character_power(c, spec.p)
    return float(math.sqrt(acc[1:].max()))


def family_audit(fam: HashFamily) -> dict:
    """Summary record with both epsilons and the kernel ensemble's bias."""
    ens = kernel_ensemble(fam)
    return {
        "kind": fam.kind,
        "n": fam.n,
        "m": fam.m,
        "q": fam.q,
        "epsilon_universal": universality_epsilon(fam),
        "epsilon_dual": dual_universality_epsilon(fam),
        "delta_bias": delta_bias(ens.uniform_distributions(), fam.spec, fam.n),
        "member_count": len(fam.members),
    }
