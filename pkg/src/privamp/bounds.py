"""Upper bounds on the expected leakage after hashing into M values.

Every bound takes the single-letter distribution P, an output size M, the
family parameter ``eps`` (its dual-universality epsilon) and a criterion:

``d1prime``  expected ||P_{f(A),E} - P_mix x P_E||_1
``Iprime``   expected D(P_{f(A),E} || P_mix x P_E)

An optional ``n`` applies the bound to the i.i.d. source P^n.  Entropies of
P^n are n times those of P, so nothing is ever expanded except where the
exact tail probabilities of P^n are needed (the ``min_tail`` method, which
works on the log-likelihood spectrum).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .asymptotics import exponent
from .dist import JointSubDistribution, Spectrum, as_dist, pushforward, spectrum_power
from .entropy import (
    Iprime,
    cond_renyi,
    d1prime,
    d2,
    down_log_moment,
    eta,
    gallager_phi,
    min_entropy,
    optimal_Q,
)
from .errors import DomainError
from .hashing import HashFamily
from .optimize import maximize, minimize

CRITERIA = ("d1prime", "Iprime")
METHODS = ("simple", "renyi2", "min_tail", "min_chernoff", "equivocation")
Q_GRID = np.geomspace(1e-3, 50.0, 64)


@dataclass
class BoundReport:
    method: str
    criterion: str
    M: float
    eps: float
    value: float
    n: int = 1
    s: float | None = None
    Rprime: float | None = None
    Q_E: str | None = None
    c: float | None = None
    lower_bound: float | None = None
    smoothing_value: float | None = None

    def to_dict(self) -> dict:
        return {k: _jsonable(v) for k, v in asdict(self).items()}

    def csv_row(self) -> tuple:
        return (self.method, self.criterion, self.M, self.eps, self.value, self.s, self.Rprime)


CSV_HEADER = ("method", "criterion", "M", "eps", "value", "s", "Rprime")


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _check(criterion: str, M: float, eps: float) -> None:
    if criterion not in CRITERIA:
        raise DomainError(f"criterion must be one of {CRITERIA}")
    if M < 1:
        raise DomainError("M must be at least 1")
    if eps <= 0:
        raise DomainError("eps must be positive")


# ------------------------------------------------------------------- simple


def bound_simple(P, M: float, eps: float, criterion: str, Q_E=None, n: int = 1) -> BoundReport:
    """Two-universal style bounds from the collision entropy.

    d1prime: sqrt(eps M) exp(-H_2(A|E|P||Q_E)/2)
    Iprime:  log(1 + eps M exp(-H_2^down(A|E|P)))
    """
    P = as_dist(P)
    _check(criterion, M, eps)
    if criterion == "d1prime":
        Q = P.marginal_E_norm() if Q_E is None else Q_E
        h2 = n * cond_renyi(P, 1.0, Q_E=Q)
        value = math.exp((math.log(eps) + math.log(M) - h2) / 2)
        tag = "P_E" if Q_E is None else "given"
    else:
        P.require_normalized("the I' bound")
        h2 = n * cond_renyi(P, 1.0, variant="down")
        value = float(np.logaddexp(0.0, math.log(eps) + math.log(M) - h2))
        tag = "P_E"
    return BoundReport("simple", criterion, M, eps, value, n=n, Q_E=tag)


# ------------------------------------------------------------------- Renyi 2


def _renyi2_log_x(P: JointSubDistribution, M: float, s: float, n: int, criterion: str) -> float:
    """log of M^s exp(-s H_order) with the order fixed by the criterion."""
    if criterion == "d1prime":
        # -s H^up_{1/(1-s)} = phi(s)
        return s * math.log(M) + n * gallager_phi(P, s)
    return s * math.log(M) + n * down_log_moment(P, s)


def bound_renyi2(P, M: float, eps: float, criterion: str, s: float, n: int = 1) -> BoundReport:
    """Rényi-2 smoothing bounds at a fixed s.

    d1prime (0 < s <= 1/2): (2 + sqrt(eps)) M^s exp(-s H^up_{1/(1-s)})
    Iprime  (0 < s <= 1):   eta(M^s exp(-s H^down_{1+s}), eps + log M)
    """
    P = as_dist(P)
    _check(criterion, M, eps)
    hi = 0.5 if criterion == "d1prime" else 1.0
    if not 0 < s <= hi:
        raise DomainError(f"s must lie in (0, {hi}] for {criterion}")
    value = _renyi2_value(P, M, eps, criterion, s, n)
    return BoundReport("renyi2", criterion, M, eps, value, n=n, s=s)


def _renyi2_value(P, M, eps, criterion, s, n) -> float:
    if s == 0:
        x = 1.0
    else:
        x = math.exp(_renyi2_log_x(P, M, s, n, criterion))
    if criterion == "d1prime":
        return (2 + math.sqrt(eps)) * x
    P.require_normalized("the I' bound")
    return eta(x, eps + math.log(M))


def bound_renyi2_opt(P, M: float, eps: float, criterion: str, n: int = 1) -> BoundReport:
    """:func:`bound_renyi2` minimized over its s-range (s -> 0 included as a limit)."""
    P = as_dist(P)
    _check(criterion, M, eps)
    hi = 0.5 if criterion == "d1prime" else 1.0
    if criterion == "d1prime":
        # log-convex in s: minimize the logarithm
        s, _ = minimize(lambda s: math.log(_renyi2_value(P, M, eps, criterion, s, n)), 0.0, hi, grid=101)
    else:
        s, _ = minimize(lambda s: _renyi2_value(P, M, eps, criterion, s, n), 0.0, hi, grid=101)
    value = _renyi2_value(P, M, eps, criterion, s, n)
    return BoundReport("renyi2", criterion, M, eps, value, n=n, s=s)


# ------------------------------------------------------------ min smoothing


def _q_candidates(P: JointSubDistribution, criterion: str) -> list[tuple[str, np.ndarray]]:
    cands = [("P_E", P.marginal_E_norm())]
    if criterion == "d1prime":
        cands += [(f"cor1:s={s:.6g}", optimal_Q(P, float(s))) for s in Q_GRID]
    return cands


def _breakpoint_table(spec: Spectrum):
    """Breakpoints R' = -v_i with the strict tail P{v > v_i} and smoothing distance there."""
    v, w = spec.values, spec.weights
    above = np.concatenate((np.cumsum(w[::-1])[::-1][1:], [0.0]))  # sum_{j>i} w_j
    # distance at R' = -v_i: sum_{j>i} w_j (1 - e^{v_i - v_j}); the Q-mass part
    # is accumulated in log space since e^{-v_j} overflows for large n
    with np.errstate(divide="ignore"):
        log_qw = np.log(w) - v
    log_above_q = np.append(np.logaddexp.accumulate(log_qw[::-1])[::-1][1:], -np.inf)
    dist = np.maximum(above - np.exp(v + log_above_q), 0.0)
    return -v, above, dist


def _tail_form(spec: Spectrum, M: float, eps: float, criterion: str, c: float) -> dict:
    """Optimize the tail-form upper bound, its c-lower bound and the exact smoothing value."""
    Rp, tails, dist = _breakpoint_table(spec)
    total = spec.total
    logM = math.log(M)
    if criterion == "d1prime":
        hash_term = np.exp((math.log(eps) + logM - Rp) / 2)
        upper = np.append(2 * tails + hash_term, 2 * total)
        lower_hash = np.exp((math.log(eps) + logM - Rp - math.log(c)) / 2)
        lower = np.append(2 * (1 - 1 / c) * tails + lower_hash, 2 * (1 - 1 / c) * total)
        smooth = np.append(2 * dist + hash_term, 2 * total)
    else:
        hash_term = np.exp(math.log(eps) + logM - Rp)
        etas = np.array([eta(t, logM) for t in tails])
        upper = np.append(etas + hash_term, eta(total, logM))
        lower_hash = np.exp(math.log(eps) + logM - Rp - math.log(c))
        lower = np.append((1 - 1 / c) * etas + lower_hash, (1 - 1 / c) * eta(total, logM))
        etad = np.array([eta(d, logM) for d in dist])
        smooth = np.append(etad + hash_term, eta(total, logM))
    i = int(np.argmin(upper))
    Rp_all = np.append(Rp, math.inf)
    return {
        "value": float(upper[i]),
        "Rprime": float(Rp_all[i]),
        "lower": float(lower.min()),
        "smoothing": float(smooth.min()),
    }


def bound_min_tail(P, M: float, eps: float, criterion: str, n: int = 1, c: float = 2.0,
                   Q_E=None) -> BoundReport:
    """Min-entropy smoothing bound in tail-probability form, optimized exactly over R'.

    d1prime: min_{Q_E, R'} 2 P{P/Q_E > e^{-R'}} + sqrt(eps M) e^{-R'/2}
    Iprime:  min_{R'} eta(P{P_{A|E} > e^{-R'}}, log M) + eps M e^{-R'}

    Between consecutive atoms of the log-likelihood spectrum the tail is
    constant and the hash term decreases, so the minimum sits at an atom (or
    at R' -> inf).  ``lower_bound`` is the c-sandwich lower bound of the
    smoothing quantity over the same Q_E candidates, ``smoothing_value`` the
    exact smoothing quantity itself.  ``P`` may be a ready-made Spectrum.
    """
    _check(criterion, M, eps)
    if c <= 1:
        raise DomainError("c must exceed 1")
    if isinstance(P, Spectrum):
        cands = [("given", P)]
    else:
        P = as_dist(P)
        if criterion == "Iprime":
            P.require_normalized("the I' bound")
        if Q_E is not None:
            cands = [("given", spectrum_power(P, Q_E, n))]
        else:
            cands = [(tag, spectrum_power(P, Q, n)) for tag, Q in _q_candidates(P, criterion)]
    best = None
    lower = smooth = math.inf
    for tag, spec in cands:
        r = _tail_form(spec, M, eps, criterion, c)
        lower = min(lower, r["lower"])
        smooth = min(smooth, r["smoothing"])
        if best is None or r["value"] < best[1]["value"]:
            best = (tag, r)
    tag, r = best
    return BoundReport("min_tail", criterion, M, eps, r["value"], n=n, Rprime=r["Rprime"], Q_E=tag,
                       c=c, lower_bound=lower, smoothing_value=smooth)


def bound_min_chernoff(P, M: float, eps: float, criterion: str, n: int = 1) -> BoundReport:
    """Chernoff form of the min-entropy smoothing bound, with R = log M.

    d1prime: (2 + sqrt(eps)) min_{s>=0} exp((-s H^up_{1+s} + s R)/(1+2s))
    Iprime:  eta(min_{s>=0} exp((-s H^down_{1+s} + s R)/(1+s)), eps + log M)

    The minimum over s is the corresponding exponent (``e_d_tilde`` /
    ``e_I_tilde``) of the single-letter P at rate log(M)/n, times n.
    """
    P = as_dist(P)
    P.require_normalized("the Chernoff bound")
    _check(criterion, M, eps)
    rate = math.log(M) / n
    if criterion == "d1prime":
        e, s = exponent(P, rate, "e_d_tilde")
        value = (2 + math.sqrt(eps)) * math.exp(-n * e)
    else:
        e, s = exponent(P, rate, "e_I_tilde")
        value = eta(math.exp(-n * e), eps + math.log(M))
    return BoundReport("min_chernoff", criterion, M, eps, value, n=n, s=s,
                       Rprime=chernoff_Rprime(P, M, criterion, s, n),
                       Q_E=f"cor1:s={s:.6g}" if criterion == "d1prime" else "P_E")


def chernoff_Rprime(P, M: float, criterion: str, s: float, n: int = 1) -> float:
    """The R' that turns the tail form into the Chernoff form at parameter s."""
    variant = "up" if criterion == "d1prime" else "down"
    logM = math.log(M)
    if s == math.inf:
        return n * min_entropy(P, variant=variant)
    H = n * cond_renyi(P, s, variant=variant) if s > 0 else n * cond_renyi(P, 0.0, variant="down")
    if criterion == "d1prime":
        return (logM + 2 * s * H) / (1 + 2 * s)
    return (logM + s * H) / (1 + s)


def tail_form_at(P, M: float, eps: float, criterion: str, Rprime: float, Q_E=None, n: int = 1) -> float:
    """Tail-form bound evaluated at one R' (no optimization)."""
    P = as_dist(P)
    Q = P.marginal_E_norm() if Q_E is None else Q_E
    if Rprime == math.inf:
        return 2 * P.total**n if criterion == "d1prime" else eta(P.total**n, math.log(M))
    T = spectrum_power(P, Q, n).tail(Rprime, strict=True)
    if criterion == "d1prime":
        return 2 * T + math.exp((math.log(eps) + math.log(M) - Rprime) / 2)
    return eta(T, math.log(M)) + math.exp(math.log(eps) + math.log(M) - Rprime)


# -------------------------------------------------------------- equivocation


class _DownMoments:
    """Atoms of log P_{A|E} under P, for fast evaluation of s H^down_{1+s} and its slope."""

    def __init__(self, P: JointSubDistribution):
        cond = P.conditional_table()
        keep = P.mass > 0
        self.logw = np.log(P.mass[keep])
        self.logc = np.log(cond[keep])
        self.h_min = float(-self.logc.max())
        self.h = float(-np.exp(self.logw) @ self.logc / P.total)

    def slope(self, s: float) -> float:
        """d/ds of log sum P P_{A|E}^s: the mean of log P_{A|E} under the s-tilt."""
        a = self.logw + s * self.logc
        w = np.exp(a - a.max())
        return float(w @ self.logc / w.sum())

    def value(self, s: float) -> float:
        """s H^down_{1+s}."""
        a = self.logw + s * self.logc
        m = a.max()
        return float(-(m + math.log(np.exp(a - m).sum())))


def _inner_rate(mom: _DownMoments, r: float, s_cap: float = 50.0) -> float:
    """max_{s>=0} s (H^down_{1+s} - r) for a per-letter threshold r (inf below H_min).

    The objective is concave in s with slope -slope(s) - r, so the maximizer
    is found by bisection on the slope.
    """
    if r < mom.h_min:
        return math.inf
    if r >= mom.h:
        return 0.0
    if -mom.slope(s_cap) - r > 0:
        s = s_cap
    else:
        lo, hi = 0.0, s_cap
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if -mom.slope(mid) - r > 0:
                lo = mid
            else:
                hi = mid
        s = 0.5 * (lo + hi)
    return max(mom.value(s) - s * r, 0.0)


def bound_equivocation(P, M: float, eps: float, n: int = 1, grid: int = 200) -> BoundReport:
    """min_{R'} eta(min_{s>=0} e^{s(R' - H^down_{1+s})}, log M) + log(1 + eps M e^{-R'}).

    R' is scanned on [0, log M + 10] and refined by golden section; the
    Chernoff choice of R' and the limit R' -> inf (value log M) are always
    among the candidates.
    """
    P = as_dist(P)
    P.require_normalized("the equivocation bound")
    if M < 1 or eps <= 0:
        raise DomainError("need M >= 1 and eps > 0")
    logM = math.log(M)
    mom = _DownMoments(P)

    def g(Rp: float) -> float:
        x = math.exp(-n * _inner_rate(mom, Rp / n))
        return eta(x, logM) + float(np.logaddexp(0.0, math.log(eps) + logM - Rp))

    hi = logM + 10.0
    Rp, v = minimize(g, 0.0, hi, grid=grid, tol=1e-10)
    _, s_ch = exponent(P, logM / n, "e_I_tilde")
    cands = [(v, Rp), (logM, math.inf)]
    if s_ch > 0:
        Rc = chernoff_Rprime(P, M, "Iprime", s_ch, n)
        cands.append((g(Rc), Rc))
    value, Rp = min(cands)
    return BoundReport("equivocation", "Iprime", M, eps, value, n=n, Rprime=Rp, Q_E="P_E")


# -------------------------------------------------------------- dispatchers


def compute_bound(P, M: float, eps: float, criterion: str, method: str, n: int = 1) -> BoundReport:
    if method == "simple":
        return bound_simple(P, M, eps, criterion, n=n)
    if method == "renyi2":
        return bound_renyi2_opt(P, M, eps, criterion, n=n)
    if method == "min_tail":
        return bound_min_tail(P, M, eps, criterion, n=n)
    if method == "min_chernoff":
        return bound_min_chernoff(P, M, eps, criterion, n=n)
    if method == "equivocation":
        if criterion != "Iprime":
            raise DomainError("the equivocation bound is for the I' criterion")
        return bound_equivocation(P, M, eps, n=n)
    raise DomainError(f"method must be one of {METHODS}")


def applicable_bounds(P, M: float, eps: float, criterion: str) -> list[BoundReport]:
    """Every bound that applies to P (sub-distributions only admit d1prime)."""
    P = as_dist(P)
    if criterion == "Iprime" or P.normalized:
        methods = ["simple", "renyi2", "min_tail", "min_chernoff"]
        if criterion == "Iprime":
            methods.append("equivocation")
    else:
        methods = ["simple", "min_tail"]
    return [compute_bound(P, M, eps, criterion, m) for m in methods]


# ---------------------------------------------------------- exact leakage


def exact_leakage(P, fam: HashFamily, criterion: str) -> float:
    """E_X criterion(f_X(A) | E) by enumerating every member."""
    P = as_dist(P)
    size_B = fam.q**fam.m
    if P.sizeA != fam.q**fam.n:
        raise DomainError(f"|A| = {P.sizeA} does not match q^n = {fam.q ** fam.n}")
    fn = {"d1prime": d1prime, "Iprime": Iprime}.get(criterion)
    if fn is None:
        raise DomainError(f"criterion must be one of {CRITERIA}")
    total = 0.0
    for h, p in fam.members:
        if p:
            total += p * fn(pushforward(P, h.image_indices(), size_B))
    return total


def expected_collision(P, fam: HashFamily, Q_E=None) -> float:
    """E_X exp(-H_2(f_X(A)|E || Q_E)) = E_X sum_{b,e} P_{f(A),E}(b,e)^2 / Q_E(e)."""
    P = as_dist(P)
    Q = P.marginal_E_norm() if Q_E is None else np.asarray(Q_E, dtype=float)
    cols = Q > 0
    size_B = fam.q**fam.m
    total = 0.0
    for h, p in fam.members:
        if p:
            out = pushforward(P, h.image_indices(), size_B).mass
            total += p * float(np.sum(out[:, cols] ** 2 / Q[None, cols]))
    return total


def sharp_collision_bound(P, eps: float, n: int, m: int, q: int, Q_E=None) -> float:
    """eps exp(-H_2(A|E||Q_E)) + q^{t-n} exp(D_2(P_E||Q_E)) with t = n - m."""
    P = as_dist(P)
    Q = P.marginal_E_norm() if Q_E is None else np.asarray(Q_E, dtype=float)
    cols = Q > 0
    coll = float(np.sum(P.mass[:, cols] ** 2 / Q[None, cols]))
    pe = P.marginal_E()
    d2_E = float(np.sum(pe[cols] ** 2 / Q[cols]))
    return eps * coll + q ** (-m) * d2_E


def expected_d2_after_shift(P, ensemble, fld, n: int, Q_E=None) -> float:
    """E_X d_2(A|E | P * P_{W_X} || Q_E) for (P_W, P_X) pairs."""
    from .dist import convolve_shift

    total = 0.0
    for pw, px in ensemble:
        total += px * d2(convolve_shift(as_dist(P), pw, fld, n), Q_E)
    return total
