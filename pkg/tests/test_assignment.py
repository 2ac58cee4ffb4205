import numpy as np
import pytest

from ocbench.assignment import (
    OUTLIER_LABEL,
    assign_communities,
    compute_phi,
    expected_background_count,
    internal_degree_target,
    randomized_round,
    select_outliers,
    split_degrees,
)
from ocbench.errors import InfeasibleError


def test_expected_background_count_extremes():
    degrees = np.array([3, 8, 1, 2])
    assert expected_background_count(degrees, 1.0) == 4.0
    assert expected_background_count(degrees, 0.0) == 0.0


def test_expected_background_count_hand_case():
    # min(1, 3) + min(1, 0.6) = 1.6
    assert expected_background_count(np.array([10, 2]), 0.3) == pytest.approx(1.6)


def test_select_outliers_all_eligible_at_full_noise():
    # xi=1: the bound is n-1, which dominates any degree a simple graph allows.
    degrees = np.array([5, 4, 3, 3, 2, 1])
    seen_hub = False
    for seed in range(50):
        picked = select_outliers(degrees, 2, 1.0, np.random.default_rng(seed))
        assert picked.size == 2
        seen_hub = seen_hub or 0 in picked
    assert seen_hub


def test_select_outliers_zero_noise_restricts_to_small_degrees():
    # At xi=0 the bound is s0 - 1: only nodes of degree < s0 are eligible.
    degrees = np.array([5, 1, 1, 1])
    for seed in range(100):
        picked = select_outliers(degrees, 2, 0.0, np.random.default_rng(seed))
        assert 0 not in picked
        assert set(picked) <= {1, 2, 3}


def test_select_outliers_infeasible():
    degrees = np.array([5, 5, 5, 1])
    with pytest.raises(InfeasibleError):
        select_outliers(degrees, 2, 0.0, np.random.default_rng(0))


def test_select_outliers_zero_requested():
    assert select_outliers(np.array([3, 3]), 0, 0.5, np.random.default_rng(0)).size == 0


def test_phi_no_outliers_matches_size_shares_for_any_xi():
    sizes = np.array([50, 50])
    for xi in (0.0, 0.2, 0.7, 1.0):
        assert compute_phi(sizes, 100, 0, xi) == pytest.approx(0.5, abs=1e-12)


def test_phi_single_community_everything_internal():
    assert compute_phi(np.array([100]), 100, 0, 0.3) == pytest.approx(0.0, abs=1e-12)


def test_phi_outlier_correction_hand_case():
    # sizes [60, 40], n=110, s0=10, xi=0.5:
    # shares_sq = (60^2 + 40^2) / 100^2 = 0.52
    # fraction = 100*0.5 / (100*0.5 + 10) = 50/60
    # phi = 1 - 0.52 * 50/60
    expected = 1 - 0.52 * 50 / 60
    assert compute_phi(np.array([60, 40]), 110, 10, 0.5) == pytest.approx(expected, abs=1e-12)


def test_phi_zero_noise_with_outliers():
    assert compute_phi(np.array([90]), 100, 10, 0.0) == pytest.approx(1.0)


def test_internal_degree_target_cases():
    assert internal_degree_target(10, 0.0, 0.9) == 10.0
    assert internal_degree_target(10, 0.4, 0.0) == 10.0
    assert internal_degree_target(10, 0.4, 0.5) == pytest.approx(8.0)


def test_assign_counts_match_sizes():
    degrees = np.full(10, 3)
    sizes = np.array([6, 4])
    labels = assign_communities(degrees, np.empty(0, dtype=np.int64), sizes, 0.2, np.random.default_rng(0))
    counts = np.bincount(labels, minlength=3)
    assert counts[1] == 6 and counts[2] == 4


def test_assign_big_node_needs_big_community():
    # One node with x ~ 99.5 only fits the size-200 community.
    xi, n = 0.01, 250
    degrees = np.full(n, 2)
    degrees[0] = 100
    sizes = np.array([200, 50])
    phi = compute_phi(sizes, n, 0, xi)
    assert internal_degree_target(100, xi, phi) > 49  # sanity: small community inadmissible
    for seed in range(25):
        labels = assign_communities(degrees, np.empty(0, dtype=np.int64), sizes, xi, np.random.default_rng(seed))
        assert labels[0] == 1
        counts = np.bincount(labels, minlength=3)
        assert counts[1] == 200 and counts[2] == 50


def test_assign_single_community_takes_everyone():
    degrees = np.full(8, 3)
    outliers = np.array([2, 5])
    labels = assign_communities(degrees, outliers, np.array([6]), 0.5, np.random.default_rng(1))
    assert (labels[outliers] == OUTLIER_LABEL).all()
    assert (np.delete(labels, outliers) == 1).all()


def test_assign_infeasible_when_node_fits_nowhere():
    degrees = np.full(20, 2)
    degrees[0] = 19
    sizes = np.array([10, 10])
    with pytest.raises(InfeasibleError):
        assign_communities(degrees, np.empty(0, dtype=np.int64), sizes, 0.0, np.random.default_rng(0))


def test_split_zero_noise_all_community():
    labels = np.array([1, 1, 1, 1])
    degrees = np.array([4, 4, 3, 3])
    y, z = split_degrees(labels, degrees, 0.0, np.random.default_rng(0))
    np.testing.assert_array_equal(y, degrees)
    np.testing.assert_array_equal(z, 0)


def test_split_full_noise_all_background():
    labels = np.array([1, 1, 2, 2])
    degrees = np.array([4, 4, 3, 3])
    y, z = split_degrees(labels, degrees, 1.0, np.random.default_rng(0))
    np.testing.assert_array_equal(y, 0)
    np.testing.assert_array_equal(z, degrees)


def test_split_integral_product_is_deterministic():
    # (1 - 0.3) * 10 = 7 exactly; only a parity toggle could change it, and
    # with two equal nodes the community sum 14 is even.
    labels = np.array([1, 1])
    degrees = np.array([10, 10])
    y, z = split_degrees(labels, degrees, 0.3, np.random.default_rng(5))
    np.testing.assert_array_equal(y, [7, 7])
    np.testing.assert_array_equal(z, [3, 3])


def test_split_outliers_keep_zero_community_degree():
    labels = np.array([0, 1, 1, 0, 1])
    degrees = np.array([5, 6, 7, 3, 6])
    y, z = split_degrees(labels, degrees, 0.4, np.random.default_rng(9))
    assert y[0] == 0 and y[3] == 0
    assert z[0] == 5 and z[3] == 3


def test_split_invariants_many_parameterizations():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(5, 60))
        degrees = rng.integers(1, 12, size=n)
        n_comms = int(rng.integers(1, 4))
        labels = rng.integers(1, n_comms + 1, size=n)
        labels[rng.random(n) < 0.15] = OUTLIER_LABEL
        if int(degrees.sum()) % 2 == 1:
            degrees[0] += 1
        xi = float(rng.random())
        y, z = split_degrees(labels, degrees, xi, rng)
        np.testing.assert_array_equal(y + z, degrees)
        assert (y >= 0).all() and (z >= 0).all()
        assert (y[labels == OUTLIER_LABEL] == 0).all()
        for c in range(1, n_comms + 1):
            assert int(y[labels == c].sum()) % 2 == 0
        assert int(z.sum()) % 2 == 0


def test_randomized_round_mean_within_one_percent():
    # E[round(6.3)] = 6.3; 1e5 repeats of a single value.
    rng = np.random.default_rng(77)
    draws = randomized_round(np.full(100_000, 6.3), rng)
    assert abs(draws.mean() - 6.3) <= 0.01 * 6.3


def test_exact_outlier_count_and_community_fill():
    rng = np.random.default_rng(42)
    from ocbench.powerlaw import PowerLawSpec
    from ocbench.sequences import generate_community_sizes, generate_degrees

    degrees = generate_degrees(PowerLawSpec(2.5, 5, 100), 1000, rng)
    sizes = generate_community_sizes(PowerLawSpec(1.5, 50, 200), 950, rng)
    outliers = select_outliers(degrees, 50, 0.3, rng)
    assert outliers.size == 50
    labels = assign_communities(degrees, outliers, sizes, 0.3, rng)
    assert (labels[outliers] == OUTLIER_LABEL).all()
    counts = np.bincount(labels)
    assert counts[0] == 50
    np.testing.assert_array_equal(np.sort(counts[1:]), np.sort(sizes))
