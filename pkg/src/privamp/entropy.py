"""Conditional Rényi entropies, security criteria and min-entropy smoothing.

All quantities are in nats.  Orders are written 1+s; ``s = 0`` always means
the Shannon limit and ``s = math.inf`` (alias :data:`MIN`) the min-entropy.
Three conditional variants are supported:

``relative``
    H_{1+s}(A|E|P||Q_E) = -(1/s) log sum_{a,e} P(a,e)^{1+s} Q_E(e)^{-s}
``down``
    the relative variant at Q_E = P_{E,norm}
``up``
    the maximum of the relative variant over Q_E, in closed form
    -((1+s)/s) log sum_e (sum_a P(a,e)^{1+s})^{1/(1+s)}

Zero cells contribute nothing (0 log 0 = 0).  A cell with P > 0 where
Q_E = 0 makes the relative entropy -inf for s >= 0, mirroring the +inf
divergence convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import JointSubDistribution, as_dist
from .errors import DomainError, NotNormalized, ShapeError

MIN = math.inf


def logsumexp(x, axis=None, b=None):
    """log sum exp(x) over ``axis``; entries where the mask ``b`` is False are dropped."""
    x = np.asarray(x, dtype=float)
    if b is not None:
        x = np.where(b, x, -np.inf)
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True)) + m
    return out.item() if axis is None else np.squeeze(out, axis=axis)


def _log(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(x)


def _as_q(Q_E, size: int) -> np.ndarray:
    Q = np.asarray(Q_E, dtype=float)
    if Q.shape != (size,):
        raise ShapeError(f"Q_E must have length {size}")
    if np.any(Q < 0) or abs(Q.sum() - 1) > 1e-9:
        raise NotNormalized("Q_E must be a normalized distribution")
    return Q


# ---------------------------------------------------------------- divergences


def renyi_divergence(P, Q, s: float) -> float:
    """D_{1+s}(P||Q) = (1/s) log sum P^{1+s} Q^{-s}; KL at s = 0, max-divergence at s = inf."""
    P = np.asarray(P, dtype=float).ravel()
    Q = np.asarray(Q, dtype=float).ravel()
    if P.shape != Q.shape:
        raise ShapeError("P and Q must have the same shape")
    pos = P > 0
    if s >= 0 and np.any(pos & (Q <= 0)):
        return math.inf
    if s == 0:
        return float(np.sum(P[pos] * (np.log(P[pos]) - np.log(Q[pos]))))
    if s == math.inf:
        return float(np.max(np.log(P[pos]) - np.log(Q[pos])))
    if s < -1:
        raise DomainError("order 1+s must be non-negative")
    keep = pos & (Q > 0)
    terms = (1 + s) * np.log(P[keep]) - s * np.log(Q[keep])
    return float(logsumexp(terms) / s)


def _relative_log_sum(P: JointSubDistribution, Q: np.ndarray, s: float) -> float:
    """log sum_{a,e} P^{1+s} Q_E^{-s}, or inf on a support violation with s > 0."""
    pos = P.mass > 0
    qpos = np.broadcast_to(Q[None, :] > 0, pos.shape)
    if s > 0 and np.any(pos & ~qpos):
        return math.inf
    keep = pos & qpos
    if not keep.any():
        return -math.inf
    lp = np.log(P.mass[keep])
    lq = np.log(np.broadcast_to(Q[None, :], pos.shape)[keep])
    return float(logsumexp((1 + s) * lp - s * lq))


def cond_renyi(P, s: float, Q_E=None, variant: str | None = None) -> float:
    """Conditional Rényi entropy of order 1+s.

    Give ``Q_E`` for the relative variant, or ``variant`` in {"down", "up"}.
    """
    P = as_dist(P)
    if variant is None:
        variant = "relative" if Q_E is not None else "down"
    if s < -1:
        raise DomainError("order 1+s must be non-negative")
    if variant == "up":
        return _cond_renyi_up(P, s)
    if variant == "down":
        Q = P.marginal_E_norm()
    elif variant == "relative":
        Q = _as_q(Q_E, P.sizeE)
    else:
        raise DomainError(f"unknown variant {variant!r}")

    pos = P.mass > 0
    violated = bool(np.any(pos & (Q[None, :] <= 0)))
    if s == 0:
        if violated:
            return -math.inf
        with np.errstate(invalid="ignore"):
            ratio = _log(P.mass) - _log(np.broadcast_to(Q[None, :], P.mass.shape))
        return float(-np.sum(P.mass[pos] * ratio[pos]))
    if s == math.inf:
        if violated:
            return -math.inf
        with np.errstate(invalid="ignore"):
            ratio = _log(P.mass) - _log(np.broadcast_to(Q[None, :], P.mass.shape))
        return float(-np.max(ratio[pos]))
    return -_relative_log_sum(P, Q, s) / s


def _cond_renyi_up(P: JointSubDistribution, s: float) -> float:
    pos = P.mass > 0
    if s == 0:
        return cond_renyi(P, 0.0, variant="down")
    if s == math.inf:
        return float(-math.log(P.mass.max(axis=0).sum()))
    if s == -1:
        # limit s -> -1: log of the largest conditional support
        return float(math.log(pos.sum(axis=0).max()))
    return -(1 + s) / s * _up_log_sum(P, s)


def _up_log_sum(P: JointSubDistribution, s: float) -> float:
    """log sum_e (sum_a P^{1+s})^{1/(1+s)}, computed in log space."""
    lp = _log(P.mass)
    cols = P.mass.sum(axis=0) > 0
    inner = logsumexp((1 + s) * lp[:, cols], axis=0, b=(P.mass[:, cols] > 0))
    return float(logsumexp(inner / (1 + s)))


def optimal_Q(P, s: float) -> np.ndarray:
    """Q_E maximizing H_{1+s}(A|E|P||Q_E): Q_E(e) proportional to (sum_a P^{1+s})^{1/(1+s)}."""
    P = as_dist(P)
    if s == math.inf:
        w = P.mass.max(axis=0)
    elif s == 0:
        w = P.marginal_E()
    else:
        lp = _log(P.mass)
        w = np.zeros(P.sizeE)
        cols = P.mass.sum(axis=0) > 0
        inner = logsumexp((1 + s) * lp[:, cols], axis=0, b=(P.mass[:, cols] > 0))
        logw = inner / (1 + s)
        w[cols] = np.exp(logw - logw.max())
    return w / w.sum()


def min_entropy(P, Q_E=None, variant: str | None = None) -> float:
    return cond_renyi(P, MIN, Q_E, variant)


def cond_entropy(P) -> float:
    """Shannon H(A|E) with respect to P_{E,norm}."""
    return cond_renyi(P, 0.0, variant="down")


def gallager_phi(P, s: float) -> float:
    """phi(s) = log sum_e (sum_a P^{1/(1-s)})^{1-s} for s in [0, 1].

    It reparametrizes the up variant: s * H^up_{1/(1-s)} = -phi(s).
    """
    P = as_dist(P)
    if not 0 <= s <= 1:
        raise DomainError("gallager_phi needs 0 <= s <= 1")
    if s == 1:
        return float(math.log(P.mass.max(axis=0).sum()))
    if s == 0:
        return float(math.log(P.total))
    return _up_log_sum(P, s / (1 - s))


def down_log_moment(P, s: float) -> float:
    """log sum_{a,e} P(a,e) P_{A|E}(a|e)^s, which equals -s H^down_{1+s}."""
    P = as_dist(P)
    if s == 0:
        return float(math.log(P.total))
    if s == math.inf:
        raise DomainError("use min_entropy for the s -> inf limit")
    return _relative_log_sum(P, P.marginal_E_norm(), s)


# ------------------------------------------------------------------ criteria


def eta(x: float, y: float) -> float:
    """eta(x, y) = -x log x + x y, with eta(0, y) = 0."""
    if x == 0:
        return 0.0
    return float(-x * math.log(x) + x * y)


def d1(P) -> float:
    """||P_{A,E} - P_A x P_E||_1."""
    P = as_dist(P)
    return float(np.abs(P.mass - np.outer(P.marginal_A(), P.marginal_E())).sum())


def d1prime(P) -> float:
    """||P_{A,E} - P_{mix,A} x P_E||_1."""
    P = as_dist(P)
    return float(np.abs(P.mass - P.marginal_E()[None, :] / P.sizeA).sum())


def d2(P, Q_E=None) -> float:
    """sum_{a,e: Q_E(e)>0} (P(a,e) - P_E(e)/|A|)^2 / Q_E(e)."""
    P = as_dist(P)
    Q = P.marginal_E_norm() if Q_E is None else _as_q(Q_E, P.sizeE)
    cols = Q > 0
    diff = P.mass[:, cols] - P.marginal_E()[None, cols] / P.sizeA
    return float((diff**2 / Q[None, cols]).sum())


def collision_divergence_E(P, Q_E=None) -> float:
    """D_2(P_E||Q_E) = log sum_e P_E(e)^2 / Q_E(e)."""
    P = as_dist(P)
    Q = P.marginal_E_norm() if Q_E is None else _as_q(Q_E, P.sizeE)
    pe = P.marginal_E()
    cols = pe > 0
    return float(math.log(np.sum(pe[cols] ** 2 / Q[cols])))


def mutual_information(P) -> float:
    """I(A;E) = D(P_{A,E} || P_A x P_E)."""
    P = as_dist(P)
    P.require_normalized("I(A;E)")
    # log-space so that tiny masses do not underflow in the product P_A P_E
    pos = P.mass > 0
    a_idx, e_idx = np.nonzero(pos)
    lr = np.log(P.mass[pos]) - np.log(P.marginal_A()[a_idx]) - np.log(P.marginal_E()[e_idx])
    return float(np.sum(P.mass[pos] * lr))


def Iprime(P) -> float:
    """I'(A|E) = D(P_{A,E} || P_{mix,A} x P_E) = log|A| - H(A|E)."""
    P = as_dist(P)
    P.require_normalized("I'")
    return renyi_divergence(P.mass, np.tile(P.marginal_E() / P.sizeA, (P.sizeA, 1)), 0.0)


def criteria(P, which: str, Q_E=None, x: float | None = None, y: float | None = None) -> float:
    """Evaluate a named criterion: d1, d1prime, Iprime, I, d2 or eta."""
    if which == "eta":
        return eta(x, y)
    table = {"d1": d1, "d1prime": d1prime, "Iprime": Iprime, "I": mutual_information}
    if which == "d2":
        return d2(P, Q_E)
    if which not in table:
        raise DomainError(f"unknown criterion {which!r}")
    return table[which](P)


# ----------------------------------------------------------------- smoothing


@dataclass(frozen=True)
class SmoothingResult:
    epsilon1: float
    R: float
    smoothedP: JointSubDistribution


def _q_table(P: JointSubDistribution, Q_E) -> np.ndarray:
    Q = _as_q(Q_E, P.sizeE)
    return np.broadcast_to(Q[None, :], P.mass.shape)


def smoothing_distance_min(P, Q_E, R: float) -> tuple[float, JointSubDistribution]:
    """Smallest ||P - P'||_1 over P' with H_min(A|E|P'||Q_E) >= R.

    The optimizer caps every cell at exp(-R) Q_E(e), so the distance is
    sum over cells of max(P - exp(-R) Q_E, 0).
    """
    P = as_dist(P)
    cap = math.exp(-R) * _q_table(P, Q_E)
    smoothed = np.minimum(P.mass, cap)
    return float((P.mass - smoothed).sum()), JointSubDistribution(smoothed)


def smoothing_sandwich(P, Q_E, R: float, c: float = 2.0) -> tuple[float, float]:
    """Lower and upper estimates of :func:`smoothing_distance_min` for c > 1.

    (1 - 1/c) P{P > c e^{-R} Q_E}  <=  distance  <=  P{P > e^{-R} Q_E}
    """
    if c <= 1:
        raise DomainError("c must exceed 1")
    P = as_dist(P)
    Q = _q_table(P, Q_E)
    upper = P.mass[P.mass > math.exp(-R) * Q].sum()
    lower = (1 - 1 / c) * P.mass[P.mass > c * math.exp(-R) * Q].sum()
    return float(lower), float(upper)


def smooth_min_entropy(P, Q_E, epsilon1: float, tol: float = 1e-12) -> SmoothingResult:
    """Largest R whose minimal smoothing distance does not exceed ``epsilon1``.

    Bisection on the continuous non-decreasing map R -> smoothing distance.
    ``epsilon1 >= total mass`` returns R = +inf with the zero sub-distribution.
    """
    P = as_dist(P)
    if epsilon1 < 0:
        raise DomainError("epsilon1 must be non-negative")
    if epsilon1 >= P.total:
        return SmoothingResult(P.total, math.inf, JointSubDistribution(np.zeros_like(P.mass)))
    lo = min_entropy(P, Q_E)
    if lo == -math.inf:
        # cells outside supp Q_E must be dropped whatever R is
        lo = -50.0
        while smoothing_distance_min(P, Q_E, lo)[0] > epsilon1:
            lo *= 2
            if lo < -1e6:
                raise DomainError("epsilon1 below the mass outside supp Q_E")
    hi = max(lo, 0.0) + 1.0
    while smoothing_distance_min(P, Q_E, hi)[0] <= epsilon1:
        hi = hi + 2 * (hi - lo) + 1
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if smoothing_distance_min(P, Q_E, mid)[0] <= epsilon1:
            lo = mid
        else:
            hi = mid
    dist, smoothed = smoothing_distance_min(P, Q_E, lo)
    return SmoothingResult(dist, lo, smoothed)


def smooth_h2_info_spectrum(P, M: float) -> tuple[float, float]:
    """Zero the cells with P_{A|E} > 1/M; return (removed mass, H_2 of the rest given P_E)."""
    P = as_dist(P)
    P.require_normalized("information-spectrum smoothing")
    cond = P.conditional_table()
    kept = np.where(cond > 1.0 / M, 0.0, P.mass)
    epsilon1 = float(P.total - kept.sum())
    pe = P.marginal_E()
    cols = pe > 0
    coll = np.sum(kept[:, cols] ** 2 / pe[None, cols])
    h2 = math.inf if coll == 0 else -math.log(coll)
    return epsilon1, float(h2)


def variance_V(P) -> float:
    """Variance of -log P_{A|E} under P (the second-order dispersion)."""
    P = as_dist(P)
    P.require_normalized("V(P)")
    pos = P.mass > 0
    lc = _log(P.conditional_table())[pos]
    w = P.mass[pos]
    H = -float(np.sum(w * lc))
    return float(np.sum(w * (lc + H) ** 2))


# --------------------------------------------------------------- derivatives


def _tilt_parts(P: JointSubDistribution, s: float):
    pos = P.mass > 0
    cond = P.conditional_table()
    pe = P.marginal_E()
    lc = np.where(pos, _log(np.where(pos, cond, 1.0)), 0.0)
    cols = pe > 0
    logS = np.zeros(P.sizeE)
    logS[cols] = logsumexp((1 + s) * lc[:, cols], axis=0, b=pos[:, cols])
    # P_s(a,e) = P_{A|E}^{1+s} P_E / (S_e^{s/(1+s)} * sum_e P_E S_e^{1/(1+s)})
    logw = np.where(pos, (1 + s) * lc + _log(np.broadcast_to(pe, P.mass.shape)) - s / (1 + s) * logS, -np.inf)
    lognorm = logsumexp(logw[pos])
    tilted = np.where(pos, np.exp(logw - lognorm), 0.0)
    return tilted, lc, logS, lognorm, pos


def tilted_distribution(P, s: float) -> JointSubDistribution:
    """The normalized tilt P_{A,E;s} that drives the derivatives of s H^up_{1+s}."""
    P = as_dist(P)
    P.require_normalized("the tilted distribution")
    if s < 0:
        raise DomainError("s must be non-negative")
    return JointSubDistribution(_tilt_parts(P, s)[0])


def sH_up_derivative(P, s: float) -> float:
    """-d/ds [s H^up_{1+s}] in closed form."""
    P = as_dist(P)
    tilted, lc, logS, lognorm, pos = _tilt_parts(P, s)
    inner = lc - logS[None, :] / (1 + s)
    return float(np.sum(tilted[pos] * inner[pos]) + _up_log_sum(P, s))


def sH_up_second_derivative(P, s: float) -> float:
    """-d^2/ds^2 [s H^up_{1+s}] >= 0, in closed form.

    With X = log P_{A|E}/(1+s) - log S_e/(1+s)^2 and everything taken under
    the tilt, the value is (1+s) * (Var_e E[X|e] + (1+s) E_e Var[X|e]).
    """
    P = as_dist(P)
    tilted, lc, logS, _, pos = _tilt_parts(P, s)
    X = lc / (1 + s) - logS[None, :] / (1 + s) ** 2
    pe_s = tilted.sum(axis=0)
    cols = pe_s > 0
    mean_e = np.zeros(P.sizeE)
    mean_e[cols] = (tilted[:, cols] * np.where(pos[:, cols], X[:, cols], 0)).sum(axis=0) / pe_s[cols]
    within = float(np.sum(tilted[pos] * (X - mean_e[None, :])[pos] ** 2))
    overall = float(np.sum(pe_s * mean_e))
    between = float(np.sum(pe_s * mean_e**2)) - overall**2
    return (1 + s) * (max(between, 0.0) + (1 + s) * within)

