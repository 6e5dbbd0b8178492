from fractions import Fraction

import pytest

from bkspair.alcove import (
    AdmissibleLimitExceeded,
    AlcoveError,
    classify,
    enumerate_admissible,
    level_marks,
    weight_coords,
)
from bkspair.oracle import admissible_count_scan
from bkspair.rootsys import build_root_system
from bkspair.weyl import act, enumerate_weyl


def test_a1_half_is_regular_and_2_integral():
    rs = build_root_system("A", 1)
    # <alpha, beta> = 1/2 means beta = alpha / 4
    pt = classify(rs, (Fraction(1, 4),), 2)
    assert pt.is_regular and pt.is_k_integral and pt.admissible


def test_a1_origin_is_boundary():
    rs = build_root_system("A", 1)
    for k in (1, 2, 5):
        pt = classify(rs, (0,), k)
        assert not pt.is_regular
        assert pt.is_k_integral


def test_a2_rho_over_3():
    rs = build_root_system("A", 2)
    beta = tuple(x / 3 for x in rs.rho)
    pt = classify(rs, beta, 3)
    assert pt.is_regular and pt.is_k_integral
    assert weight_coords(rs, tuple(3 * b for b in beta)) == (1, 1)


def test_not_k_integral():
    rs = build_root_system("A", 1)
    pt = classify(rs, (Fraction(1, 6),), 2)
    assert pt.is_regular and not pt.is_k_integral


def test_outside_alcove_names_inequality():
    rs = build_root_system("A", 2)
    with pytest.raises(AlcoveError, match="alpha_1"):
        classify(rs, (Fraction(-1, 3), Fraction(1, 3)), 3)
    with pytest.raises(AlcoveError, match="alpha_0"):
        classify(rs, (1, 1), 3)
    with pytest.raises(AlcoveError, match="level"):
        classify(rs, (0, 0), 0)
    with pytest.raises(AlcoveError, match="coordinates"):
        classify(rs, (0,), 1)


def test_level_marks():
    assert level_marks(build_root_system("A", 3)) == (1, 1, 1)
    assert level_marks(build_root_system("G", 2)) == (1, 2)
    assert level_marks(build_root_system("E", 8)) == (2, 3, 4, 6, 5, 4, 3, 2)


@pytest.mark.parametrize("k", range(1, 21))
def test_a1_count(k):
    rs = build_root_system("A", 1)
    pts = enumerate_admissible(rs, k)
    assert len(pts) == k - 1
    # brute-force: j/k for j = 1..k-1 against the classify predicate
    brute = [j for j in range(0, k + 1) if classify(rs, (Fraction(j, 2 * k),), k).admissible]
    assert brute == list(range(1, k))


def test_a2_k4():
    rs = build_root_system("A", 2)
    pts = enumerate_admissible(rs, 4)
    assert len(pts) == 3
    assert [weight_coords(rs, tuple(4 * b for b in p.beta)) for p in pts] == [(1, 1), (1, 2), (2, 1)]
    for k in range(1, 9):
        assert len(enumerate_admissible(rs, k)) == max(0, (k - 1) * (k - 2) // 2)


@pytest.mark.parametrize("letter,rank,k", [("B", 2, 6), ("G", 2, 9), ("C", 3, 7), ("A", 3, 6), ("F", 4, 14)])
def test_output_closed_under_classify(letter, rank, k):
    rs = build_root_system(letter, rank)
    pts = enumerate_admissible(rs, k)
    assert len({p.beta for p in pts}) == len(pts)
    for p in pts:
        assert classify(rs, p.beta, k).admissible
    if rank <= 4:
        assert len(pts) == admissible_count_scan(rs, k)


def test_fundamental_domain_g2():
    rs = build_root_system("G", 2)
    elements = enumerate_weyl(rs)
    for p in enumerate_admissible(rs, 9):
        for w in elements[1:]:
            with pytest.raises(AlcoveError):
                classify(rs, act(w, p.beta), 9)


def test_max_count():
    rs = build_root_system("A", 2)
    with pytest.raises(AdmissibleLimitExceeded) as info:
        enumerate_admissible(rs, 10, max_count=5)
    assert info.value.partial == 5
