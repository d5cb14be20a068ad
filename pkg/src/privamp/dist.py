"""Joint sub-distributions over A x E, i.i.d. powers and log-likelihood spectra."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import NotNormalized, ShapeError, SupportMismatch, TooLarge, ZeroConditioning

NORM_TOL = 1e-12
MERGE_TOL = 1e-12
DEFAULT_CELL_CAP = 10**7


def cell_cap() -> int:
    return int(os.environ.get("PA_BOUNDS_CELL_CAP", DEFAULT_CELL_CAP))


@dataclass(frozen=True, eq=False)
class JointSubDistribution:
    """Non-negative mass on A x E with total at most one.

    ``mass[a, e]`` is P_{A,E}(a, e).  Rows index A, columns index E.
    """

    mass: np.ndarray
    labels_A: tuple = field(default=None)
    labels_E: tuple = field(default=None)

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float)
        if mass.ndim == 1:
            mass = mass[:, None]
        if mass.ndim != 2 or mass.size == 0:
            raise ShapeError(f"mass must be a non-empty |A| x |E| table, got shape {mass.shape}")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise ShapeError("mass entries must be finite and non-negative")
        if mass.sum() > 1 + NORM_TOL:
            raise NotNormalized(f"total mass {mass.sum()!r} exceeds 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)
        if self.labels_A is None:
            object.__setattr__(self, "labels_A", tuple(range(mass.shape[0])))
        if self.labels_E is None:
            object.__setattr__(self, "labels_E", tuple(range(mass.shape[1])))
        if len(self.labels_A) != mass.shape[0] or len(self.labels_E) != mass.shape[1]:
            raise ShapeError("label counts do not match the mass table")

    @property
    def sizeA(self) -> int:
        return self.mass.shape[0]

    @property
    def sizeE(self) -> int:
        return self.mass.shape[1]

    @property
    def total(self) -> float:
        return float(self.mass.sum())

    @property
    def normalized(self) -> bool:
        return abs(self.total - 1.0) <= NORM_TOL

    def marginal_A(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    def marginal_E(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def marginal_E_norm(self) -> np.ndarray:
        pe = self.marginal_E()
        return pe / pe.sum()

    def normalize(self) -> "JointSubDistribution":
        if self.total == 0:
            raise ZeroConditioning("cannot normalize the zero measure")
        return JointSubDistribution(self.mass / self.total, self.labels_A, self.labels_E)

    def conditional_given_e(self, e: int) -> np.ndarray:
        """P_{A|E}(.|e) = P_{A,E}(., e) / P_{E,norm}(e)."""
        pen = self.marginal_E_norm() if self.total > 0 else np.zeros(self.sizeE)
        if pen[e] <= 0:
            raise ZeroConditioning(f"P_E({e}) = 0")
        return self.mass[:, e] / pen[e]

    def conditional_table(self) -> np.ndarray:
        """All of P_{A|E} at once; columns with zero E-mass are left at 0."""
        pen = self.marginal_E_norm()
        out = np.zeros_like(self.mass)
        nz = pen > 0
        out[:, nz] = self.mass[:, nz] / pen[nz]
        return out

    def uniform_mix_A(self) -> "JointSubDistribution":
        """P_{mix,A} x P_E."""
        pe = self.marginal_E()
        return JointSubDistribution(np.tile(pe / self.sizeA, (self.sizeA, 1)), self.labels_A, self.labels_E)

    def require_normalized(self, what: str = "this quantity") -> None:
        if not self.normalized:
            raise NotNormalized(f"{what} needs a normalized distribution (total {self.total!r})")


def as_dist(P) -> JointSubDistribution:
    return P if isinstance(P, JointSubDistribution) else JointSubDistribution(P)


def derive(P: JointSubDistribution, what: str, e: int | None = None):
    """Dispatch to the derived objects by name."""
    if what == "marginal_A":
        return P.marginal_A()
    if what == "marginal_E":
        return P.marginal_E()
    if what == "normalized":
        return P.normalize()
    if what == "conditional_given_e":
        return P.conditional_given_e(e)
    if what == "uniform_mix_A":
        return P.uniform_mix_A()
    raise ValueError(f"unknown derived object {what!r}")


def iid_power(P: JointSubDistribution, n: int, cap: int | None = None) -> JointSubDistribution:
    """P^n on A^n x E^n, lexicographic cell order (first letter most significant)."""
    if n < 1:
        raise ValueError("n must be positive")
    cap = cell_cap() if cap is None else cap
    if (P.sizeA * P.sizeE) ** n > cap:
        raise TooLarge(f"{(P.sizeA * P.sizeE) ** n} cells exceed the cap {cap}; use spectrum_power")
    out = P.mass
    for _ in range(n - 1):
        out = np.kron(out, P.mass)
    return JointSubDistribution(out)


def pushforward(P: JointSubDistribution, f, size_B: int) -> JointSubDistribution:
    """Distribution of (f(A), E); ``f`` is an index array or a callable on A-indices."""
    image = np.asarray(f if not callable(f) else [f(a) for a in range(P.sizeA)], dtype=np.int64)
    out = np.zeros((size_B, P.sizeE))
    np.add.at(out, image, P.mass)
    return JointSubDistribution(out)


def convolve_shift(P: JointSubDistribution, P_W, fld, n: int) -> JointSubDistribution:
    """(P * P_W)(a, e) = sum_w P_W(w) P(a - w, e) with A = F_q^n."""
    from .field import all_vectors, vector_index  # local: keeps dist importable alone

    q = fld.q
    if P.sizeA != q**n:
        raise ShapeError(f"|A| = {P.sizeA} is not q^n = {q**n}")
    P_W = np.asarray(P_W, dtype=float)
    if P_W.shape != (q**n,):
        raise ShapeError("P_W must be a vector over F_q^n")
    vecs = all_vectors(q, n)
    weights = q ** np.arange(n - 1, -1, -1)
    out = np.zeros_like(P.mass)
    for w in np.flatnonzero(P_W):
        # a = b + w, so mass of b moves to index(b + w)
        shifted = fld.add[vecs, vecs[w][None, :]] @ weights
        out[shifted] += P_W[w] * P.mass
    return JointSubDistribution(out)


# -------------------------------------------------------------------------
# spectra


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Atoms (value, weight) of log(P_{A,E}/Q_E) summed over i.i.d. letters.

    ``values`` is sorted ascending and near-equal values are merged.
    """

    values: np.ndarray
    weights: np.ndarray
    n: int = 1

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def q_weights(self) -> np.ndarray:
        """Q-mass of each atom: sum over its cells of Q_E^n(e), i.e. w * exp(-v)."""
        with np.errstate(divide="ignore"):
            return np.exp(np.log(self.weights) - self.values)

    def tail(self, R: float, strict: bool = True) -> float:
        return _spectrum_tail(self, R, strict)


def _merge(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    if values.size == 0:
        return values, weights
    tol = MERGE_TOL * np.maximum(1.0, np.abs(values[1:]))
    new_group = np.concatenate(([True], np.diff(values) > tol))
    group = np.cumsum(new_group) - 1
    w = np.bincount(group, weights=weights)
    v = values[new_group]
    return v, w


def _single_letter(P: JointSubDistribution, Q_E) -> tuple[np.ndarray, np.ndarray]:
    Q_E = np.asarray(Q_E, dtype=float)
    if Q_E.shape != (P.sizeE,):
        raise ShapeError("Q_E must be a vector over E")
    if abs(Q_E.sum() - 1) > 1e-9 or np.any(Q_E < 0):
        raise NotNormalized("Q_E must be a normalized distribution")
    pos = P.mass > 0
    if np.any(pos & (Q_E[None, :] <= 0)):
        raise SupportMismatch("P_{A,E}(a,e) > 0 where Q_E(e) = 0")
    a_idx, e_idx = np.nonzero(pos)
    vals = np.log(P.mass[a_idx, e_idx]) - np.log(Q_E[e_idx])
    return _merge(vals, P.mass[a_idx, e_idx])


def spectrum_power(P: JointSubDistribution, Q_E, n: int = 1) -> Spectrum:
    """Exact law of sum_i log(P(a_i, e_i) / Q_E(e_i)) under P^n.

    Atoms are tracked by their letter-count vector (the type), so the work
    grows with the number of types rather than with |A|^n |E|^n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    base_v, base_w = _single_letter(P, Q_E)
    d = base_v.size
    if d == 0:
        return Spectrum(np.zeros(0), np.zeros(0), n)
    if n == 1:
        return Spectrum(base_v, base_w, 1)
    radix = n + 1
    if d * math.log2(radix) < 62:
        keys = np.zeros(1, dtype=np.int64)
        steps = radix ** np.arange(d, dtype=np.int64)
    else:
        keys = np.zeros(1, dtype=object)
        steps = np.array([radix**j for j in range(d)], dtype=object)
    weights = np.ones(1)
    for _ in range(n):
        cand_k = (keys[:, None] + steps[None, :]).ravel()
        cand_w = (weights[:, None] * base_w[None, :]).ravel()
        keys, inverse = np.unique(cand_k, return_inverse=True)
        weights = np.bincount(inverse.ravel(), weights=cand_w)
    counts = np.stack([(keys // radix**j) % radix for j in range(d)], axis=1).astype(float)
    values = counts @ base_v
    v, w = _merge(values, weights)
    return Spectrum(v, w, n)


def _spectrum_tail(spec: Spectrum, R: float, strict: bool) -> float:
    thr = -R
    tol = MERGE_TOL * max(1.0, abs(thr))
    if strict:
        mask = spec.values > thr + tol
    else:
        mask = spec.values >= thr - tol
    return float(spec.weights[mask].sum())


def tail(src, R: float, Q_E=None, strict: bool = True) -> float:
    """P{ log(P_{A,E}/Q_E) > -R } (``>=`` when ``strict`` is False)."""
    if isinstance(src, Spectrum):
        return _spectrum_tail(src, R, strict)
    src = as_dist(src)
    if Q_E is None:
        Q_E = src.marginal_E_norm()
    return _spectrum_tail(spectrum_power(src, Q_E, 1), R, strict)
