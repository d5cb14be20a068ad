"""Per-symbol exponents, second-order limits and equivocation rates for i.i.d. sources.

Every exponent is a one-dimensional maximization of a closed form built from
the single-letter distribution.  Unbounded ranges of s are mapped to
t = s / (1 + s) in [0, 1], so the s -> inf limit (the min-entropy end) is an
ordinary endpoint evaluated exactly rather than a truncation.

Names of the exponents, with phi the Gallager function and H the conditional
Rényi entropies of :mod:`privamp.entropy`:

===============  ==============================================================
``e_d``          max_{0<=t<=1/2} t (H^up_{1/(1-t)} - R)
``e_I``          max_{0<=s<=1}   s (H^down_{1+s} - R)
``e_d_tilde``    max_{s>=0}      s (H^up_{1+s} - R) / (1 + 2s)
``e_I_tilde``    max_{s>=0}      s (H^down_{1+s} - R) / (1 + s)
``e_d_bar``      max_{0<=t<1}    t (H^up_{1/(1-t)} - R)
``e_d_quantum``  max_{0<=t<=1/2} t/(2(1-t)) (H^up_{1/(1-t)} - R)
``e_I_quantum``  max_{0<=s<=1}   s/(2-s) (H^down_{1+s} - R)
===============  ==============================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import as_dist, spectrum_power
from .entropy import cond_entropy, down_log_moment, gallager_phi, min_entropy, variance_V
from .errors import DegenerateVariance
from .optimize import maximize

EXPONENTS = ("e_d", "e_I", "e_d_tilde", "e_I_tilde", "e_d_bar", "e_d_quantum", "e_I_quantum")
TOL = 1e-12


def _neg_phi(P, t: float) -> float:
    """t H^up_{1/(1-t)} = -phi(t)."""
    return -gallager_phi(P, t)


def _t_down(P, t: float) -> float:
    """t H^down_{1/(1-t)} for t in [0, 1]; t = 1 is the min-entropy limit."""
    if t == 0:
        return 0.0
    if t >= 1:
        return min_entropy(P, variant="down")
    s = t / (1 - t)
    return -(1 - t) * down_log_moment(P, s)


def _s_down(P, s: float) -> float:
    """s H^down_{1+s} = -log sum P P_{A|E}^s."""
    return -down_log_moment(P, s) if s else 0.0


def _objective(P, R: float, which: str):
    if which == "e_d":
        return lambda t: _neg_phi(P, t) - t * R, (0.0, 0.5)
    if which == "e_I":
        return lambda s: _s_down(P, s) - s * R, (0.0, 1.0)
    if which == "e_d_tilde":
        return lambda t: (_neg_phi(P, t) - t * R) / (1 + t), (0.0, 1.0)
    if which == "e_I_tilde":
        return lambda t: _t_down(P, t) - t * R, (0.0, 1.0)
    if which == "e_d_bar":
        return lambda t: _neg_phi(P, t) - t * R, (0.0, 1.0)
    if which == "e_d_quantum":
        return lambda t: (_neg_phi(P, t) - t * R) / (2 * (1 - t)), (0.0, 0.5)
    if which == "e_I_quantum":
        return lambda s: (_s_down(P, s) - s * R) / (2 - s), (0.0, 1.0)
    raise ValueError(f"unknown exponent {which!r}; choose from {EXPONENTS}")


def exponent(P, R: float, which: str) -> tuple[float, float]:
    """(value, optimizer) of a named exponent at rate R (nats per symbol).

    The optimizer is the s of the defining formula; for ``e_d_tilde`` and
    ``e_I_tilde`` it is s = t/(1-t), which is ``inf`` at the min-entropy end.
    """
    P = as_dist(P)
    P.require_normalized("exponents")
    f, (lo, hi) = _objective(P, R, which)
    x, v = maximize(f, lo, hi, grid=65, tol=TOL)
    if v <= 0:
        return 0.0, 0.0
    if which in ("e_d_tilde", "e_I_tilde"):
        x = math.inf if x >= 1 else x / (1 - x)
    return float(v), float(x)


@dataclass
class ExponentCurve:
    which: str
    samples: list = field(default_factory=list)  # (R, value, optimizer)

    def csv_rows(self) -> list[tuple]:
        return [(R, v, s) for R, v, s in self.samples]


def exponent_curve(P, R_grid, which: str) -> ExponentCurve:
    curve = ExponentCurve(which)
    for R in R_grid:
        v, s = exponent(P, float(R), which)
        curve.samples.append((float(R), v, s))
    return curve


def exponent_relations_check(P, R_grid, slack: float = 1e-9) -> dict:
    """Check e_I/2 <= e_d <= e_I and quantum references <= classical exponents on a grid."""
    violations = []
    rows = []
    for R in R_grid:
        e = {w: exponent(P, float(R), w)[0] for w in ("e_d", "e_I", "e_d_quantum", "e_I_quantum")}
        rows.append((float(R), e))
        checks = {
            "half_eI_le_ed": e["e_I"] / 2 <= e["e_d"] + slack,
            "ed_le_eI": e["e_d"] <= e["e_I"] + slack,
            "quantum_d_le_ed": e["e_d_quantum"] <= e["e_d"] + slack,
            "quantum_I_le_eI": e["e_I_quantum"] <= e["e_I"] + slack,
        }
        for name, ok in checks.items():
            if not ok:
                violations.append({"R": float(R), "check": name, "values": e})
    return {"passed": not violations, "violations": violations, "rows": rows}


# -------------------------------------------------------------- second order


def second_order(P, R: float) -> float:
    """2 Phi(R / sqrt V(P)), the limiting expected d1' at second-order rate R."""
    V = variance_V(P)
    if V <= 0:
        raise DegenerateVariance("V(P) = 0: the conditional log-likelihood is constant")
    return float(math.erfc(-R / math.sqrt(2 * V)))


def second_order_finite(P, R: float, n: int, poly: float | None = None) -> dict:
    """Finite-n expression that tends to :func:`second_order`.

    With R' = nH + sqrt(n) R + n^{1/4} the d1' bound is
    2 P^n{P_{A|E} > e^{-R'}} + sqrt(P(n)) e^{-n^{1/4}/2}; ``poly`` is P(n)
    (default n).  Both the tail term alone and the full bound are returned.
    """
    P = as_dist(P)
    poly = float(n) if poly is None else poly
    H = cond_entropy(P)
    Rp = n * H + math.sqrt(n) * R + n**0.25
    spec = spectrum_power(P, P.marginal_E_norm(), n)
    tail_term = 2 * spec.tail(Rp, strict=True)
    hash_term = math.sqrt(poly) * math.exp(-(n**0.25) / 2)
    return {"n": n, "Rprime": Rp, "tail_term": tail_term, "bound": tail_term + hash_term}


def equivocation_rate(P, R: float) -> float:
    """R - H(A|E): the per-symbol leakage limit above the entropy rate (0 below it)."""
    return max(R - cond_entropy(P), 0.0)


# ------------------------------------------------------------ type identity


def chernoff_rate(P, Rprime: float, t_max: float = 1 - 1e-9) -> tuple[float, float]:
    """max_{s>=0} s H^up_{1+s} - s R', searched over t = s/(1+s); returns (value, s).

    In t the objective reads (-phi(t) - t R') / (1 - t).
    """
    P = as_dist(P)
    t, v = maximize(lambda t: (_neg_phi(P, t) - t * Rprime) / (1 - t), 0.0, t_max, grid=129, tol=TOL)
    return float(max(v, 0.0)), float(t / (1 - t))


def type_exponent_check(P, Rprime: float, resolution: int = 200) -> dict:
    """Compare min{D(P'||P) : D(P'||P) + H(A|E|P') <= R'} on a simplex grid with the closed form."""
    P = as_dist(P)
    closed, s_star = chernoff_rate(P, Rprime)
    grid_value, _ = constrained_divergence_grid(P, Rprime, resolution)
    return {"Rprime": Rprime, "closed_form": closed, "s_star": s_star, "grid": grid_value,
            "gap": abs(grid_value - closed)}


def constrained_divergence_grid(P, Rprime: float, resolution: int = 200) -> tuple[float, np.ndarray | None]:
    """Brute force min{D(P'||P) : D(P'||P) + H(A|E|P') <= R'} over the simplex grid.

    Returns the value and the minimizing P' (``inf`` and ``None`` when no grid
    point is feasible).  Ties go to the lowest grid index.
    """
    P = as_dist(P)
    grid = simplex_grid(P.mass.size, resolution)
    Pm = P.mass.ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        logratio = np.where(grid > 0, np.log(grid) - np.log(Pm)[None, :], 0.0)
        D = np.where(np.any((grid > 0) & (Pm[None, :] == 0), axis=1), np.inf, np.sum(grid * logratio, axis=1))
        joint = grid.reshape(-1, *P.mass.shape)
        pe = joint.sum(axis=1)
        cond = np.where(joint > 0, joint / pe[:, None, :], 1.0)
        H = -np.sum(np.where(joint > 0, joint * np.log(cond), 0.0), axis=(1, 2))
    feasible = D + H <= Rprime
    if not feasible.any():
        return math.inf, None
    idx = np.flatnonzero(feasible)
    best = idx[int(np.argmin(D[idx]))]
    return float(D[best]), grid[best].reshape(P.mass.shape)


def simplex_grid(dim: int, resolution: int) -> np.ndarray:
    """All points of the probability simplex in R^dim with coordinates in (1/resolution) Z."""
    return _compositions(resolution, dim).astype(float) / resolution


def _compositions(total: int, parts: int) -> np.ndarray:
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        rest = _compositions(total - first, parts - 1)
        blocks.append(np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest]))
    return np.vstack(blocks)
