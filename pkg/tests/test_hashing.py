import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privamp.errors import DomainError, ShapeError, TooLarge
from privamp.field import all_vectors, field_spec, get_field
from privamp.hashing import (
    character_power,
    conversion_epsilon,
    custom_family,
    delta_bias,
    dual_universality_epsilon,
    family_audit,
    kernel_ensemble,
    make_family,
    nonuniform_seed_epsilon,
    rank_aware_dual_epsilon,
    toeplitz,
    universality_epsilon,
    universality_lower_bound,
)

PRIME_CASES = [(kind, q, n, m) for kind in ("full_random", "toeplitz", "modified_toeplitz")
               for q in (2, 3) for n in (1, 2, 3) for m in range(1, n + 1)
               if not (kind == "full_random" and q == 3 and n * m > 6)]


def apply_mod_p(mat, a, p):
    return tuple(int(sum(int(r) * int(x) for r, x in zip(row, a)) % p) for row in mat)


def brute_universal(fam, p):
    """q^m max_{a != a'} Pr[f(a) = f(a')], by evaluating every member on every pair (prime q)."""
    vecs = [tuple(v) for v in itertools.product(range(p), repeat=fam.n)]
    images = [[apply_mod_p(h.matrix, a, p) for a in vecs] for h, _ in fam.members]
    worst = 0.0
    for i, j in itertools.combinations(range(len(vecs)), 2):
        pr = sum(prob for (h, prob), img in zip(fam.members, images) if img[i] == img[j])
        worst = max(worst, pr)
    return p**fam.m * worst


def brute_dual(fam, p):
    """q^{n-m} max_{x != 0} Pr[x orthogonal to ker f], with the kernel found by enumeration."""
    vecs = [tuple(v) for v in itertools.product(range(p), repeat=fam.n)]
    zero = (0,) * fam.m
    acc = np.zeros(len(vecs))
    for h, prob in fam.members:
        kernel = [a for a in vecs if apply_mod_p(h.matrix, a, p) == zero]
        for ix, x in enumerate(vecs):
            if all(sum(xi * ai for xi, ai in zip(x, a)) % p == 0 for a in kernel):
                acc[ix] += prob
    return p ** (fam.n - fam.m) * acc[1:].max(), acc


def brute_bias(fam, p):
    """max_{x != 0} sqrt(E_X |E_{W ~ ker f_X} exp(2 pi i x.W / p)|^2) with complex arithmetic."""
    vecs = [tuple(v) for v in itertools.product(range(p), repeat=fam.n)]
    zero = (0,) * fam.m
    acc = np.zeros(len(vecs))
    for h, prob in fam.members:
        kernel = [a for a in vecs if apply_mod_p(h.matrix, a, p) == zero]
        for ix, x in enumerate(vecs):
            z = sum(cmath.exp(2j * math.pi * (sum(xi * wi for xi, wi in zip(x, w)) % p) / p) for w in kernel)
            acc[ix] += prob * abs(z / len(kernel)) ** 2
    return math.sqrt(acc[1:].max())


def test_toeplitz_convention():
    # entry (i, j) = seed[i - j + cols - 1]
    assert toeplitz([1, 2, 3, 4], 2, 3).tolist() == [[3, 2, 1], [4, 3, 2]]
    with pytest.raises(ShapeError):
        toeplitz([1, 2], 2, 3)


def test_modified_toeplitz_shape():
    fam = make_family("modified_toeplitz", field_spec(2), 4, 2)
    assert len(fam.members) == 2**3
    for h, _ in fam.members:
        assert h.matrix[:, 2:].tolist() == [[1, 0], [0, 1]]
        assert h.surjective


def test_example_audits():
    mt = family_audit(make_family("modified_toeplitz", field_spec(2), 2, 1))
    assert mt["epsilon_universal"] == 1.0
    assert mt["epsilon_dual"] == 1.0
    assert mt["delta_bias"] == pytest.approx(math.sqrt(0.5))
    assert mt["member_count"] == 2
    fr = make_family("full_random", field_spec(2), 2, 1)
    assert universality_epsilon(fr) == 1.0
    # Pr[x in rowspace] = Pr[row = x] = 1/4 for x != 0
    assert dual_universality_epsilon(fr) == 0.5
    assert dual_universality_epsilon(fr) < universality_lower_bound(4, 2)


@pytest.mark.parametrize("kind,q,n,m", PRIME_CASES)
def test_epsilons_match_enumeration(kind, q, n, m):
    fam = make_family(kind, field_spec(q), n, m)
    assert universality_epsilon(fam) == pytest.approx(brute_universal(fam, q), abs=1e-12)
    surj = fam.surjective_part()
    assert dual_universality_epsilon(surj) == pytest.approx(brute_dual(surj, q)[0], abs=1e-12)
    audit = family_audit(surj)
    assert audit["delta_bias"] == pytest.approx(brute_bias(surj, q), abs=1e-9)


@pytest.mark.parametrize("q", [4, 8, 9])
def test_extension_field_dual_matches_kernel_enumeration(q):
    """For q = p^k the dual code is taken under the trace pairing."""
    spec = field_spec(q)
    fld = get_field(spec)
    fam = make_family("modified_toeplitz", spec, 2, 1)
    vecs = all_vectors(q, 2)
    acc = np.zeros(q**2)
    for h, prob in fam.members:
        image = [fld.add[fld.mul[h.matrix[0, 0], v[0]], fld.mul[h.matrix[0, 1], v[1]]] for v in vecs]
        kern = vecs[np.array(image) == 0]
        acc += prob * np.all(fld.pairing_matrix(vecs, kern) == 0, axis=1)
    assert dual_universality_epsilon(fam) == pytest.approx(q * acc[1:].max())


def test_surjective_members_dual_bias_identity():
    """With every kernel of dimension n - m, delta^2 = eps_dual q^{-(n-m)}."""
    for q, n, m in [(2, 3, 1), (2, 3, 2), (3, 2, 1), (4, 2, 1)]:
        fam = make_family("full_random", field_spec(q), n, m, surjective_only=True)
        audit = family_audit(fam)
        assert audit["delta_bias"] ** 2 == pytest.approx(audit["epsilon_dual"] * q ** (-(n - m)))


def test_surjective_part():
    fam = make_family("full_random", field_spec(2), 2, 2)
    assert len(fam.non_surjective()) == 10
    surj = make_family("full_random", field_spec(2), 2, 2, surjective_only=True)
    assert len(surj.members) == 6
    assert surj.probabilities.sum() == pytest.approx(1.0)
    assert surj.non_surjective() == []


def test_rank_aware_epsilon():
    fam = make_family("full_random", field_spec(2), 2, 2)
    assert dual_universality_epsilon(fam) == pytest.approx(9 / 16)
    # E[1{x in rowspace} 2^{2 - rank}]: rank 2 w.p. 6/16 (weight 1), rank 1 with x as row space w.p. 3/16 (weight 2)
    assert rank_aware_dual_epsilon(fam) == pytest.approx(6 / 16 + 2 * 3 / 16)
    surj = fam.surjective_part()
    assert rank_aware_dual_epsilon(surj) == pytest.approx(dual_universality_epsilon(surj))


def test_conversion_readings():
    c = conversion_epsilon(1.0, 2, 1, 2)
    assert c["corrected"] == pytest.approx(1.0)
    assert c["printed"] == pytest.approx(-2.0)


@pytest.mark.parametrize("q,n,m", [(2, 2, 1), (2, 3, 1), (2, 3, 2), (3, 2, 1), (3, 3, 2)])
def test_conversion_bounds_surjective_families(q, n, m):
    for kind in ("full_random", "toeplitz", "modified_toeplitz"):
        fam = make_family(kind, field_spec(q), n, m, surjective_only=True)
        conv = conversion_epsilon(universality_epsilon(fam), n, m, q)["corrected"]
        assert dual_universality_epsilon(fam) <= conv + 1e-12


def test_nonuniform_seed():
    spec = field_spec(2)
    fam = make_family("modified_toeplitz", spec, 2, 1, seed_distribution=[0.75, 0.25])
    assert nonuniform_seed_epsilon(fam) == pytest.approx(1.5)
    assert dual_universality_epsilon(fam) <= 1.5
    with pytest.raises(DomainError):
        nonuniform_seed_epsilon(make_family("toeplitz", spec, 2, 1))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.data())
def test_nonuniform_seed_bound_holds(n, data):
    k = n - 1
    w = np.array(data.draw(st.lists(st.floats(0.01, 1.0), min_size=2**k, max_size=2**k)))
    m = data.draw(st.integers(1, n - 1))
    fam = make_family("modified_toeplitz", field_spec(2), n, m, seed_distribution=w / w.sum())
    assert dual_universality_epsilon(fam) <= nonuniform_seed_epsilon(fam) + 1e-12


def test_character_power():
    assert character_power([[1, 1]], 2)[0] == 0.0
    assert character_power([[1, 0]], 2)[0] == 1.0
    assert character_power([[1 / 3, 1 / 3, 1 / 3]], 3)[0] == 0.0
    # |1 + w|^2 = 2 + 2 cos(2 pi / 3) = 1
    assert character_power([[1, 1, 0]], 3)[0] == pytest.approx(1.0)


def test_zero_kernel_has_no_bias():
    """A bijective member has trivial kernel: E_W w^{x.W} = 1, so the bias is 1."""
    spec = field_spec(3)
    fam = custom_family(spec, [np.eye(2)])
    ens = kernel_ensemble(fam)
    assert ens.t_min == 0
    assert delta_bias(ens.uniform_distributions(), spec, 2) == pytest.approx(1.0)


def test_errors():
    spec = field_spec(2)
    with pytest.raises(DomainError):
        make_family("toeplitz", spec, 2, 3)
    with pytest.raises(TooLarge):
        make_family("full_random", spec, 6, 5)
    with pytest.raises(DomainError):
        custom_family(spec, [np.eye(2)], [0.5])
