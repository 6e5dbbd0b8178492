import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkspair import densitycalc as dc
from bkspair import linalg
from bkspair.densitycalc import DensityValue, ExactSequence, LinearMapMatrix, SpaceRef


def seq_from(i, j):
    i, j = np.asarray(i), np.asarray(j)
    U, V, W = SpaceRef(i.shape[1]), SpaceRef(i.shape[0]), SpaceRef(j.shape[0])
    return ExactSequence(LinearMapMatrix(U, V, i), LinearMapMatrix(V, W, j))


def ex(rows):
    return linalg.exact_array(rows)


# -- basic densities -------------------------------------------------------------


def test_eval_density_examples():
    V = SpaceRef(2)
    assert dc.eval_density(DensityValue(V, 1, 1.0), np.eye(2)) == 1
    assert dc.eval_density(DensityValue(V, 0.5, 1.0), np.diag([2.0, 2.0])) == pytest.approx(2.0)
    c = 1.5 - 0.5j
    assert dc.eval_density(DensityValue(V, 1, c), np.diag([-3.0, 1.0])) == pytest.approx(3 * c)
    with pytest.raises(ValueError):
        dc.eval_density(DensityValue(V, 1, 1.0), np.eye(3))


def test_density_order_positive():
    with pytest.raises(ValueError):
        DensityValue(SpaceRef(1), 0, 1.0)
    with pytest.raises(ValueError):
        SpaceRef(-1)


def test_product_density():
    V = SpaceRef(3)
    assert dc.product_density(DensityValue(V, 0.5, 1), DensityValue(V, 0.5, 1)).value == 1
    p = dc.product_density(DensityValue(V, 0.5, 2), DensityValue(V, 0.5, 3))
    assert (p.value, p.order) == (6, 1)
    rng = np.random.default_rng(3)
    d1, d2 = DensityValue(V, 0.5, 1.3), DensityValue(V, 0.5, 0.4 + 1j)
    for _ in range(10):
        t = rng.standard_normal((3, 3))
        assert dc.eval_density(p := dc.product_density(d1, d2), t) == pytest.approx(
            dc.eval_density(d1, t) * dc.eval_density(d2, t))
    with pytest.raises(ValueError):
        dc.product_density(d1, DensityValue(SpaceRef(3), 0.5, 1))


def test_pullback():
    V = SpaceRef(3)
    d = DensityValue(V, 1, 1.5)
    assert dc.pullback(LinearMapMatrix(V, V, np.eye(3)), d).value == 1.5
    assert dc.pullback(LinearMapMatrix(V, V, 2 * np.eye(3)), d).value == pytest.approx(12.0)
    with pytest.raises(ValueError, match="singular"):
        dc.pullback(LinearMapMatrix(V, V, np.zeros((3, 3))), d)


def test_pullback_functorial():
    rng = np.random.default_rng(5)
    A, B, C = SpaceRef(3), SpaceRef(3), SpaceRef(3)
    for _ in range(20):
        phi, psi = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
        d = DensityValue(C, 0.5, 2.0)
        twice = dc.pullback(LinearMapMatrix(A, B, phi), dc.pullback(LinearMapMatrix(B, C, psi), d))
        once = dc.pullback(LinearMapMatrix(A, C, psi @ phi), d)
        assert twice.value == pytest.approx(once.value, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=9, max_size=9), st.lists(st.integers(-4, 4), min_size=9, max_size=9))
def test_transformation_law_exact_squares(a_entries, t_entries):
    a = ex(np.array(a_entries).reshape(3, 3).tolist())
    t = ex(np.array(t_entries).reshape(3, 3).tolist())
    # for order 1/2: (value |det(A T)|^1/2)^2 = |det A| (value |det T|^1/2)^2
    assert abs(linalg.det(a @ t)) == abs(linalg.det(a)) * abs(linalg.det(t))
    d = DensityValue(SpaceRef(3), 0.5, 1.0)
    lhs = dc.eval_density(d, a @ t)
    rhs = abs(float(linalg.det(a))) ** 0.5 * dc.eval_density(d, t)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


# -- exact sequences -------------------------------------------------------------


def test_sequence_validation():
    with pytest.raises(ValueError, match="j o i"):
        seq_from(np.array([[1.0], [0.0]]), np.array([[1.0, 0.0]]))
    with pytest.raises(ValueError, match="dim V"):
        seq_from(np.eye(2)[:, :1], np.zeros((0, 2)))
    with pytest.raises(ValueError, match="injective"):
        seq_from(np.zeros((2, 1)), np.array([[0.0, 1.0]]))
    with pytest.raises(ValueError, match="surjective"):
        seq_from(np.array([[1.0], [0.0]]), np.array([[0.0, 0.0]]))


def test_seq_iso_identity():
    seq = seq_from(np.eye(3), np.zeros((0, 3)))
    U, V, W = seq.spaces
    out = dc.seq_iso(seq, DensityValue(U, 0.5, 1.7), DensityValue(W, 0.5, 1.0))
    assert out.space == V and out.value == pytest.approx(1.7)


def test_seq_iso_block():
    e = np.eye(5)
    seq = seq_from(e[:, :2], e[2:, :])
    U, _, W = seq.spaces
    out = dc.seq_iso(seq, DensityValue(U, 0.5, 2.0), DensityValue(W, 0.5, 3.0 - 1j))
    assert out.value == pytest.approx(2.0 * (3.0 - 1j))


def test_seq_iso_needs_half_densities():
    seq = seq_from(np.eye(2)[:, :1], np.eye(2)[1:, :])
    U, _, W = seq.spaces
    with pytest.raises(ValueError):
        dc.seq_iso(seq, DensityValue(U, 1, 1.0), DensityValue(W, 0.5, 1.0))
    with pytest.raises(ValueError):
        dc.seq_iso(seq, DensityValue(SpaceRef(1), 0.5, 1.0), DensityValue(W, 0.5, 1.0))


@pytest.mark.parametrize("exact", [False, True])
def test_seq_iso_choice_independence_5dim(exact):
    for trial in range(50):
        rng = np.random.default_rng([11, trial])
        du = int(rng.integers(1, 5))
        seq = dc.random_exact_sequence(rng, du, 5 - du, exact)
        base = dc.seq_iso_factor(seq)
        for _ in range(3):
            f = dc.seq_iso_factor(
                seq,
                complement=dc.random_complement(rng, seq),
                basis_u=dc.random_invertible(rng, du, exact),
                basis_w=dc.random_invertible(rng, 5 - du, exact),
            )
            if exact:
                assert isinstance(f, Fraction) and f == base
            else:
                assert math.sqrt(f) == pytest.approx(math.sqrt(base), abs=1e-9)


def test_bad_complement_rejected():
    e = np.eye(3)
    seq = seq_from(e[:, :1], e[1:, :])
    with pytest.raises(ValueError, match="ker j"):
        dc.seq_iso_factor(seq, complement=np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]))


# -- the two lemmas on exact sequences -------------------------------------------


def test_scaling_identity():
    seq = seq_from(np.eye(3)[:, :1], np.eye(3)[1:, :])
    res = dc.scaling_check(seq, seq, np.eye(3))
    assert res.passed and res.ratio == pytest.approx(1.0)


def test_scaling_diag2_exact():
    e = linalg.identity(3, exact=True)
    k = ex([[2, 0, 0], [0, 1, 0], [0, 0, 1]])
    s1 = seq_from(e[:, :1], e[1:, :])
    s2 = ExactSequence(LinearMapMatrix(s1.i.source, s1.i.target, k @ e[:, :1]), s1.j)
    res = dc.scaling_check(s1, s2, k)
    assert res.passed
    assert res.factor_ratio == 2 and res.det_k == 2
    assert res.ratio == pytest.approx(math.sqrt(2), abs=1e-12)


def test_scaling_noncommuting_rejected():
    seq = seq_from(np.eye(3)[:, :1], np.eye(3)[1:, :])
    with pytest.raises(ValueError, match="commute"):
        dc.scaling_check(seq, seq, np.diag([1.0, 2.0, 1.0]))


def test_direct_sum_trivial():
    s1 = seq_from(np.eye(2), np.zeros((0, 2)))
    s2 = seq_from(np.eye(1), np.zeros((0, 1)))
    assert dc.direct_sum_check(s1, s2, [(1.0, 1.0, 2.0, 1.0)]).passed


@pytest.mark.parametrize("exact", [False, True])
def test_direct_sum_dims(exact):
    rng = np.random.default_rng(8)
    s1 = dc.random_exact_sequence(rng, 2, 1, exact)  # (U, V, W) = (2, 3, 1)
    s2 = dc.random_exact_sequence(rng, 1, 1, exact)  # (1, 2, 1)
    res = dc.direct_sum_check(s1, s2, [(1.0, 2.0, 0.5 + 1j, 3.0)])
    assert res.passed and res.deviation <= 1e-9


@pytest.mark.parametrize("exact", [False, True])
def test_naturality(exact):
    for trial in range(20):
        rng = np.random.default_rng([9, trial])
        seq = dc.random_exact_sequence(rng, 2, 2, exact)
        k, l, m = (dc.random_invertible(rng, n, exact) for n in (2, 4, 2))
        inv = linalg.inv if exact else np.linalg.inv
        seq2 = ExactSequence(
            LinearMapMatrix(SpaceRef(2), (V2 := SpaceRef(4)), l @ seq.i.matrix @ inv(k)),
            LinearMapMatrix(V2, SpaceRef(2), m @ seq.j.matrix @ inv(l)),
        )
        assert dc.naturality_check(seq, seq2, k, l, m, (1.2, 0.7)).passed


# -- BKS density ---------------------------------------------------------------


def test_phi_equal_lagrangians():
    omega = dc.standard_symplectic(2)
    L = np.array([[1.0, 2.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    res = dc.bks_density_phi(omega, L, L, 2.0, 3.0, intersection_basis=L)
    assert res.dim == 2
    assert res.value == pytest.approx(6.0)
    split = dc.bks_density_phi_split(omega, L, L, np.zeros((4, 0)), np.zeros((4, 0)), 2.0, 3.0,
                                     intersection_basis=L)
    assert split.value == pytest.approx(6.0)


@pytest.mark.parametrize("c", [1, 2, 5])
def test_phi_transverse_plane(c):
    omega = ex([[0, c], [-c, 0]])
    L1, L2 = ex([[1], [0]]), ex([[0], [1]])
    res = dc.bks_density_phi(omega, L1, L2, 1.0, 1.0)
    assert res.dim == 0
    assert res.factor == Fraction(1, c)
    res = dc.bks_density_phi(omega, L1, L2, 2.0, 0.5j)
    assert res.value == pytest.approx(1j / math.sqrt(c))


def test_phi_rejects_bad_input():
    omega = dc.standard_symplectic(1)
    with pytest.raises(ValueError, match="isotropic"):
        dc.bks_density_phi(dc.standard_symplectic(2), np.eye(4)[:, [0, 2]], np.eye(4)[:, :2])
    with pytest.raises(ValueError, match="degenerate"):
        dc.bks_density_phi(np.zeros((2, 2)), np.eye(2)[:, :1], np.eye(2)[:, 1:])
    with pytest.raises(ValueError, match="skew"):
        dc.bks_density_phi(np.eye(2), np.eye(2)[:, :1], np.eye(2)[:, 1:])
    with pytest.raises(ValueError, match="even"):
        dc.bks_density_phi(np.eye(3), np.eye(3)[:, :1], np.eye(3)[:, 1:2])
    with pytest.raises(ValueError, match="subspace"):
        dc.bks_density_phi(omega, np.zeros((2, 1)), np.eye(2)[:, 1:])


def test_split_rejects_bad_complements():
    rng = np.random.default_rng(2)
    pair = dc.random_clean_lagrangians(rng, 3, 1)
    v1, v2 = dc.random_split(rng, pair)
    with pytest.raises(ValueError, match="columns"):
        dc.bks_density_phi_split(pair.omega, pair.L1, pair.L2, v1[:, :1], v2)
    with pytest.raises(ValueError, match="does not lie"):
        dc.bks_density_phi_split(pair.omega, pair.L1, pair.L2, v2, v2)
    K = dc.intersection(pair.L1, pair.L2)
    with pytest.raises(ValueError, match="complement"):
        dc.bks_density_phi_split(pair.omega, pair.L1, pair.L2, np.hstack([K, v1[:, :1]]), v2)


def test_clean_generator():
    for exact in (False, True):
        rng = np.random.default_rng(4)
        for n in range(1, 5):
            for d in range(n + 1):
                pair = dc.random_clean_lagrangians(rng, n, d, exact)
                assert dc.intersection(pair.L1, pair.L2).shape[1] == d
                assert linalg.rank(pair.omega) == 2 * n


@pytest.mark.parametrize("exact", [False, True])
def test_phi_matches_split(exact):
    for trial in range(40):
        rng = np.random.default_rng([21, trial])
        n = int(rng.integers(1, 5))
        d = int(rng.integers(0, n + 1))
        pair = dc.random_clean_lagrangians(rng, n, d, exact)
        phi = dc.bks_density_phi(pair.omega, pair.L1, pair.L2, 1.5, 0.5 - 1j)
        for _ in range(3):
            v1, v2 = dc.random_split(rng, pair, exact)
            split = dc.bks_density_phi_split(pair.omega, pair.L1, pair.L2, v1, v2, 1.5, 0.5 - 1j,
                                             intersection_basis=phi.intersection_basis)
            if exact:
                assert split.factor == phi.factor
            else:
                assert abs(split.value - phi.value) <= 1e-9


@pytest.mark.parametrize("exact", [False, True])
def test_phi_choice_independence(exact):
    for trial in range(20):
        rng = np.random.default_rng([31, trial])
        n = int(rng.integers(2, 5))
        d = int(rng.integers(1, n))
        pair = dc.random_clean_lagrangians(rng, n, d, exact)
        base = dc.bks_density_phi(pair.omega, pair.L1, pair.L2)
        K = base.intersection_basis
        v1, v2 = dc.random_split(rng, pair, exact)
        # another lift of a basis of (L1 + L2)/K, sheared along K
        lift = np.concatenate([v1, v2], axis=1)
        lift = lift + K @ (dc._rand_matrix(rng, d, lift.shape[1], exact))
        # another complement of the kernel of (v1, v2) -> v1 - v2 in L1 (+) L2
        delta = np.concatenate([pair.L1, -pair.L2], axis=1)
        ker = linalg.null_space(delta)
        wc = dc.default_complement(delta)
        wc = wc + ker @ dc._rand_matrix(rng, ker.shape[1], wc.shape[1], exact)
        other = dc.bks_density_phi(pair.omega, pair.L1, pair.L2, quotient_lift=lift, lift_complement=wc,
                                   intersection_basis=K)
        if exact:
            assert other.factor == base.factor
        else:
            assert other.factor == pytest.approx(base.factor, rel=1e-9)


def test_intersection_basis_rescales_as_density():
    rng = np.random.default_rng(6)
    pair = dc.random_clean_lagrangians(rng, 3, 2, exact=True)
    base = dc.bks_density_phi(pair.omega, pair.L1, pair.L2)
    k = ex([[2, 1], [0, 3]])
    moved = dc.bks_density_phi(pair.omega, pair.L1, pair.L2, intersection_basis=base.intersection_basis @ k)
    # a density of order 1 on the intersection: factor scales by |det k|^2
    assert moved.factor == base.factor * 36
    with pytest.raises(ValueError, match="do not lie"):
        dc.bks_density_phi(pair.omega, pair.L1, pair.L2, intersection_basis=pair.L1[:, :2])
