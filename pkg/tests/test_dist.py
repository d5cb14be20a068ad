import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from privamp.dist import (
    JointSubDistribution,
    convolve_shift,
    derive,
    iid_power,
    pushforward,
    spectrum_power,
    tail,
)
from privamp.errors import NotNormalized, ShapeError, SupportMismatch, TooLarge, ZeroConditioning
from privamp.field import field_spec, get_field


def brute_tail(mass, Q_E, n, R):
    """Enumerate every letter sequence of P^n and sum the mass where log(P/Q) > -R."""
    total = 0.0
    cells = [(a, e) for a in range(mass.shape[0]) for e in range(mass.shape[1]) if mass[a, e] > 0]
    for seq in itertools.product(cells, repeat=n):
        p = math.prod(mass[a, e] for a, e in seq)
        qv = math.prod(Q_E[e] for _, e in seq)
        if math.log(p) - math.log(qv) > -R + 1e-9:
            total += p
    return total


def test_marginals_and_conditionals():
    P = JointSubDistribution([[0.4, 0.1], [0.1, 0.4]])
    assert np.allclose(P.marginal_A(), [0.5, 0.5])
    assert np.allclose(P.marginal_E(), [0.5, 0.5])
    assert np.allclose(P.conditional_given_e(0), [0.8, 0.2])
    assert np.allclose(derive(P, "uniform_mix_A").mass, 0.25)


def test_subnormalized_conditioning_uses_normalized_marginal():
    P = JointSubDistribution([[0.2, 0.0], [0.1, 0.2]])
    assert P.total == pytest.approx(0.5)
    assert np.allclose(P.marginal_E_norm(), [0.6, 0.4])
    assert np.allclose(P.conditional_given_e(0), [0.2 / 0.6, 0.1 / 0.6])
    with pytest.raises(ZeroConditioning):
        JointSubDistribution([[0.5, 0.0]]).conditional_given_e(1)


def test_rejects_bad_input():
    with pytest.raises(ShapeError):
        JointSubDistribution([[-0.1, 0.5]])
    with pytest.raises(NotNormalized):
        JointSubDistribution([[0.7, 0.7]])
    with pytest.raises(ShapeError):
        JointSubDistribution(np.zeros((0, 2)))
    with pytest.raises(ZeroConditioning):
        JointSubDistribution([[0.0]]).normalize()


def test_iid_power_lexicographic():
    P = JointSubDistribution([[0.4, 0.1], [0.1, 0.4]])
    P2 = iid_power(P, 2)
    assert P2.mass.shape == (4, 4)
    # (a1 a2, e1 e2) = (01, 00) has mass P(0,0) P(1,0)
    assert P2.mass[1, 0] == pytest.approx(0.4 * 0.1)
    assert P2.mass[1, 2] == pytest.approx(0.1 * 0.1)
    assert P2.total == pytest.approx(1.0)
    with pytest.raises(TooLarge):
        iid_power(P, 20, cap=10**6)


def test_pushforward_and_convolve():
    P = JointSubDistribution(np.full((4, 1), 0.25))
    assert np.allclose(pushforward(P, [0, 0, 1, 1], 2).mass.ravel(), [0.5, 0.5])
    fld = get_field(field_spec(2))
    Q = JointSubDistribution([[1.0], [0.0], [0.0], [0.0]])
    shifted = convolve_shift(Q, [0, 0.5, 0.5, 0], fld, 2)
    assert np.allclose(shifted.mass.ravel(), [0, 0.5, 0.5, 0])
    # shifting by (1, 1) swaps 00 <-> 11 and 01 <-> 10
    R = JointSubDistribution([[0.1], [0.2], [0.3], [0.4]])
    assert np.allclose(convolve_shift(R, [0, 0, 0, 1], fld, 2).mass.ravel(), [0.4, 0.3, 0.2, 0.1])


def test_spectrum_errors():
    P = JointSubDistribution([[0.5, 0.5]])
    with pytest.raises(SupportMismatch):
        spectrum_power(P, [1.0, 0.0])
    with pytest.raises(NotNormalized):
        spectrum_power(P, [0.5, 0.6])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_spectrum_tail_matches_enumeration(n):
    rng = np.random.default_rng(7 + n)
    mass = rng.uniform(size=(2, 3))
    mass[0, 2] = 0
    mass /= mass.sum() * 1.25  # sub-normalized
    P = JointSubDistribution(mass)
    Q = np.array([0.2, 0.3, 0.5])
    spec = spectrum_power(P, Q, n)
    assert spec.total == pytest.approx(P.total**n)
    for R in np.linspace(-3 * n, 3 * n, 25):
        assert spec.tail(R) == pytest.approx(brute_tail(mass, Q, n, R), abs=1e-12)


def test_spectrum_atoms_at_threshold():
    P = JointSubDistribution([[0.25, 0.25], [0.25, 0.25]])
    # every cell has log(P / Q_E) = log(1/2)
    assert tail(P, math.log(2)) == 0.0
    assert tail(P, math.log(2), strict=False) == pytest.approx(1.0)
    spec = spectrum_power(P, [0.5, 0.5], 10)
    assert spec.values.size == 1
    assert spec.values[0] == pytest.approx(10 * math.log(0.5))


def test_spectrum_power_large_n_is_type_sized():
    P = JointSubDistribution([[0.4, 0.1], [0.1, 0.4]])
    spec = spectrum_power(P, [0.5, 0.5], 400)
    assert spec.total == pytest.approx(1.0)
    assert spec.values.size <= 401
    # mean of the log-likelihood is -n H(A|E)
    h = -(0.8 * math.log(0.8) + 0.2 * math.log(0.2))
    assert np.dot(spec.values, spec.weights) == pytest.approx(-400 * h, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(arrays(float, (3, 2), elements=st.floats(0, 1)), st.integers(1, 3))
def test_spectrum_conserves_mass(m, n):
    if m.sum() == 0:
        return
    P = JointSubDistribution(m / m.sum())
    spec = spectrum_power(P, P.marginal_E_norm() if P.marginal_E().all() else [0.5, 0.5], n)
    assert spec.total == pytest.approx(1.0)
    assert np.all(np.diff(spec.values) > 0)
    # Q-mass counts every (a, e) cell once, so it is at most |A|^n
    assert spec.q_weights().sum() <= 3**n * (1 + 1e-9)
