import warnings

import numpy as np
import pytest

from cqca.algebra import LaurentPoly, OperatorString, RuleError, RuleMatrix, paper_rule
from cqca.combinatorics import whitney_hypergeometric
from cqca.dynamics import (
    HeatMap,
    Insertion,
    fit_butterfly_velocity,
    heat_map,
    is_scrambled,
    light_cone_violations,
    nine_pairs,
    scan_scrambling_times,
    scrambling_time,
    squared_commutator,
    xi,
)

Q, Pp, QP = Insertion(1, 0), Insertion(0, 1), Insertion(1, 1)


def zero_map(T=10, L=10, N=5):
    z = np.zeros((T + 1, 2 * L + 1), dtype=np.int64)
    return HeatMap(values=z.astype(float), xi_grid=z, N=N, rule_name="zero", W=Q, V=Q, L=L, T=T)


# -- insertions ---------------------------------------------------------------

@pytest.mark.parametrize("text, pair", [("Q", (1, 0)), ("p", (0, 1)), ("QP", (1, 1)), ("5,0", (5, 0))])
def test_insertion_parse(text, pair):
    ins = Insertion.parse(text)
    assert (ins.q_exp, ins.p_exp) == pair


def test_identity_insertion_rejected():
    with pytest.raises(ValueError):
        Insertion(0, 0)
    with pytest.raises(ValueError):
        Insertion.parse("0,0")
    with pytest.raises(ValueError):
        Insertion(2, 0).for_modulus(2)


# -- xi -------------------------------------------------------------------------

def test_xi_one_step_symplectic():
    # (A, B) = (1, 1) at the origin after one step; A*0 - B*1 = -1 = 6 mod 7
    assert xi(paper_rule(7), Q, Q, 0, 1, pairing="symplectic") == 6


def test_xi_one_step_default_pairing_same_commutator():
    M = paper_rule(7)
    a = xi(M, Q, Q, 0, 1)
    b = xi(M, Q, Q, 0, 1, pairing="symplectic")
    assert a == 1
    assert squared_commutator(a, 7) == squared_commutator(b, 7) == squared_commutator(1, 7)


@pytest.mark.parametrize("W", [Q, Pp, QP, Insertion(2, 3)])
def test_xi_self_commutes_at_t0(W):
    assert xi(paper_rule(5), W, W, 0, 0, pairing="symplectic") == 0


@pytest.mark.parametrize("pairing", ["transposed", "symplectic"])
def test_xi_outside_cone(pairing):
    assert xi(paper_rule(7), Q, Q, 2, 1, pairing=pairing) == 0


def test_xi_default_pairing_is_whitney():
    M = paper_rule(1_000_003)
    assert [xi(M, Q, Q, 0, t) for t in range(1, 9)] == [whitney_hypergeometric(t) for t in range(1, 9)]


def test_xi_symplectic_is_shifted_whitney():
    N = 1_000_003
    M = paper_rule(N)
    got = [(-xi(M, Q, Q, 0, t, pairing="symplectic")) % N for t in range(2, 9)]
    assert got == [whitney_hypergeometric(t - 1) for t in range(2, 9)]


def test_xi_rejects_non_palindromic_rule():
    N = 3
    M = RuleMatrix(((LaurentPoly({1: 1}, N), LaurentPoly({}, N)), (LaurentPoly({}, N), LaurentPoly({0: 1}, N))))
    with pytest.raises(RuleError, match="palindromic"):
        xi(M, Q, Q, 0, 1)


def test_xi_agrees_with_heat_map():
    M = paper_rule(13)
    h = heat_map(M, QP, Pp, 12, 12)
    for t in (0, 3, 7, 12):
        for a in (-12, -5, 0, 4, 11):
            assert h.xi_grid[t, a + 12] == xi(M, QP, Pp, a, t)


# -- squared commutator and threshold ------------------------------------------

def test_squared_commutator_examples():
    assert squared_commutator(0, 17) == 0.0
    assert squared_commutator(1, 2) == 4.0
    assert squared_commutator(5, 10) == 4.0


@pytest.mark.parametrize("N", [2, 3, 7, 10, 1000])
def test_squared_commutator_periodic_and_symmetric(N):
    x = np.arange(N)
    c = squared_commutator(x, N)
    assert np.array_equal(c, squared_commutator(x + 3 * N, N))
    assert np.array_equal(c, squared_commutator((N - x) % N, N))
    assert np.all((c >= 0) & (c <= 4))


def test_is_scrambled_examples():
    assert is_scrambled(1, 6)
    assert not is_scrambled(1, 7)
    assert not is_scrambled(0, 9)
    assert is_scrambled(2, 7)


def test_threshold_band_matches_float_everywhere():
    for N in range(2, 10_001):
        x = np.arange(N)
        c = squared_commutator(x, N)
        exact = is_scrambled(x, N)
        boundary = (6 * x == N) | (6 * x == 5 * N)
        assert np.array_equal(exact[~boundary], (c >= 1)[~boundary]), N
        # sin(pi/6)^2 = 1/4 exactly; float lands within rounding of 1
        assert np.all(exact[boundary])
        assert np.all(np.abs(c[boundary] - 1) < 1e-12)


# -- heat maps ------------------------------------------------------------------

def test_n2_heat_map_binary():
    h = heat_map(paper_rule(2), Q, Q, 100, 100)
    assert set(np.unique(h.values)) <= {0.0, 4.0}
    assert h.values.shape == (101, 201)


def test_n2_first_row_symplectic():
    h = heat_map(paper_rule(2), Q, Q, 100, 100, pairing="symplectic")
    assert np.count_nonzero(h.values[0]) == 0
    assert h.values[1, 100] == 4.0


def test_n2_first_row_default():
    # default pairing compares W(0) = Q with the transposed V = P
    h = heat_map(paper_rule(2), Q, Q, 5, 5)
    assert h.values[0].tolist() == [0] * 5 + [4.0] + [0] * 5


def test_composite_q5_matches_n2():
    a = heat_map(paper_rule(10), Insertion(5, 0), Insertion(5, 0), 100, 100)
    b = heat_map(paper_rule(2), Q, Q, 100, 100)
    assert np.array_equal(a.values, b.values)


@pytest.mark.parametrize("pairing", ["transposed", "symplectic"])
@pytest.mark.parametrize("N", [2, 3, 5, 10])
def test_light_cone_and_reflection(N, pairing):
    M = paper_rule(N)
    for W, V in nine_pairs():
        h = heat_map(M, W, V, 70, 64, pairing=pairing)
        assert light_cone_violations(h) == 0
        assert np.array_equal(h.xi_grid, h.xi_grid[:, ::-1])


def test_values_reproducible_from_xi():
    h = heat_map(paper_rule(37), QP, Q, 40, 40)
    assert np.array_equal(h.values, squared_commutator(h.xi_grid, 37))


def test_heat_map_is_read_only():
    h = heat_map(paper_rule(3), Q, Q, 4, 4)
    with pytest.raises(ValueError):
        h.values[0, 0] = 1.0


def test_narrow_window_warns_but_stays_exact():
    M = paper_rule(11)
    with pytest.warns(UserWarning, match="narrower"):
        narrow = heat_map(M, Q, Q, 5, 20)
    wide = heat_map(M, Q, Q, 20, 20)
    assert narrow.warnings
    assert np.array_equal(narrow.xi_grid, wide.xi_grid[:, 15:26])


def test_multi_site_W():
    N = 5
    op = OperatorString(LaurentPoly({-1: 1, 1: 1}, N), LaurentPoly({}, N))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        h = heat_map(paper_rule(N), op, Q, 20, 10)
    # linearity: sum of the single-site maps shifted by -1 and +1
    single = heat_map(paper_rule(N), Q, Q, 21, 10).xi_grid
    expect = (single[:, :-2] + single[:, 2:]) % N
    assert np.array_equal(h.xi_grid, expect[:, 0:41])


def test_T0_single_row():
    h = heat_map(paper_rule(2), Q, Q, 3, 0, pairing="symplectic")
    assert h.values.shape == (1, 7)
    assert not h.values.any()


# -- scrambling times -----------------------------------------------------------

@pytest.mark.parametrize(
    "N, expected",
    [(2, (1, 1)), (6, (1, 1)), (7, (2, 2)), (66, (4, 11)), (157, (6, 63)), (378, (6, 63))],
)
def test_scrambling_time_table(N, expected):
    assert tuple(scrambling_time(paper_rule(N), Q, Q, 20)) == expected


def test_scrambling_time_symplectic_pairing():
    # same jump in N, one step later; witness is -W_{2(t-1)} mod N
    assert tuple(scrambling_time(paper_rule(7), Q, Q, 20, pairing="symplectic")) == (3, 5)


def test_scrambling_time_not_found():
    assert scrambling_time(paper_rule(1000), Q, Q, 3) is None
    with pytest.raises(ValueError):
        scrambling_time(paper_rule(5), Q, Q, 0)


def test_scan_single_and_empty():
    res = scan_scrambling_times([2])
    assert list(res.rows) == [(2, 1, 1)]
    assert scan_scrambling_times([]).rows == ()


def test_scan_reports_not_found():
    res = scan_scrambling_times([2, 1000], t_max=3)
    assert res.rows[1].t_star is None
    assert res.jumps == [1000]


def test_scan_jumps():
    res = scan_scrambling_times(range(2, 379), t_max=12)
    assert res.jumps == [7, 13, 31, 67, 157]
    ts = [r.t_star for r in res.rows]
    assert ts == sorted(ts)


def test_scan_matches_whitney_band():
    W = {t: whitney_hypergeometric(t) for t in range(1, 13)}
    res = scan_scrambling_times(range(2, 379), t_max=12)
    for row in res.rows:
        # W_{2t} < N for these t, so no modular wrap: band is N <= 6 W <= 5 N
        t_expect = min(t for t in W if row.N <= 6 * W[t] <= 5 * row.N)
        assert row.t_star == t_expect, row
        assert row.xi_witness == W[t_expect]


def test_threshold_other_than_one():
    # C = 4 needs xi = N/2, impossible for odd N
    assert tuple(scrambling_time(paper_rule(2), Q, Q, 5, threshold=4.0)) == (1, 1)
    assert scrambling_time(paper_rule(7), Q, Q, 3, threshold=4.0) is None


# -- butterfly velocity -------------------------------------------------------

@pytest.mark.parametrize("N, T", [(2, 100), (1000, 200)])
def test_butterfly_velocity(N, T):
    fit = fit_butterfly_velocity(heat_map(paper_rule(N), Q, Q, T, T))
    assert abs(fit.v_B - 1.0) <= 0.05
    assert 0 < fit.v_B <= 1.0 + 0.05


def test_butterfly_velocity_zero_map():
    with pytest.raises(ValueError):
        fit_butterfly_velocity(zero_map())


def test_cone_onset_later_for_large_N():
    small = fit_butterfly_velocity(heat_map(paper_rule(2), Q, Q, 200, 200))
    large = fit_butterfly_velocity(heat_map(paper_rule(1000), Q, Q, 200, 200))
    assert large.edge_t[0] > small.edge_t[0]
