import numpy as np
import pytest

from ocbench.errors import InfeasibleError, ParseError
from ocbench.powerlaw import PowerLawSpec, expected_value, sample
from ocbench.sequences import (
    generate_community_sizes,
    generate_degrees,
    read_sequence_file,
    solve_min_degree,
)


def test_degrees_point_mass_even_total():
    degrees = generate_degrees(PowerLawSpec(2.0, 3, 3), 4, np.random.default_rng(0))
    assert degrees.tolist() == [3, 3, 3, 3]


def test_degrees_point_mass_odd_total_rejected():
    with pytest.raises(InfeasibleError):
        generate_degrees(PowerLawSpec(2.0, 3, 3), 3, np.random.default_rng(0))


def test_degrees_parity_fix_bumps_one_minimum_node():
    # With support {3, 4} some seed yields an odd sum; the fixed sequence
    # differs from the raw multiset by exactly one +/-1 adjustment.
    spec = PowerLawSpec(1.0, 3, 4)
    for seed in range(200):
        raw = np.sort(sample(spec, 5, np.random.default_rng(seed)))[::-1]
        fixed = generate_degrees(spec, 5, np.random.default_rng(seed))
        assert int(fixed.sum()) % 2 == 0
        assert (fixed >= 3).all() and (fixed <= 4).all()
        assert (fixed[:-1] >= fixed[1:]).all()
        diff = int(abs(fixed.sum() - raw.sum()))
        assert diff <= 1
        if diff == 0:
            np.testing.assert_array_equal(np.sort(fixed), np.sort(raw))


def test_degrees_invariants_at_scale():
    spec = PowerLawSpec(2.5, 5, 500)
    degrees = generate_degrees(spec, 10_000, np.random.default_rng(7))
    assert degrees.min() >= 5
    assert degrees.max() <= 500
    assert int(degrees.sum()) % 2 == 0
    assert (degrees[:-1] >= degrees[1:]).all()


def test_solve_min_degree_point_mass():
    assert solve_min_degree(2.0, 5, 5) == 5


def test_solve_min_degree_unreachable_average():
    with pytest.raises(InfeasibleError):
        solve_min_degree(2.0, 6, 5)


def test_solve_min_degree_matches_exhaustive_scan():
    gamma, target, high = 2.5, 10.0, 100
    # Oracle: scan every candidate minimum degree.
    expected = None
    for low in range(1, high + 1):
        if expected_value(PowerLawSpec(gamma, low, high)) >= target:
            expected = low
            break
    assert expected is not None
    assert solve_min_degree(gamma, target, high) == expected


def test_community_sizes_forced():
    sizes = generate_community_sizes(PowerLawSpec(1.5, 50, 50), 150, np.random.default_rng(0))
    assert sizes.tolist() == [50, 50, 50]


def test_community_sizes_target_below_minimum():
    with pytest.raises(InfeasibleError):
        generate_community_sizes(PowerLawSpec(1.5, 50, 50), 40, np.random.default_rng(0))


def test_community_sizes_defaults_scale():
    sizes = generate_community_sizes(PowerLawSpec(1.5, 100, 1000), 9500, np.random.default_rng(3))
    assert int(sizes.sum()) == 9500
    assert sizes.min() >= 100
    assert sizes.max() <= 1000


@pytest.mark.parametrize("low,high,target", [(100, 1000, 9500), (8, 12, 101), (10, 200, 777)])
def test_community_sizes_exact_sum_many_seeds(low, high, target):
    spec = PowerLawSpec(1.5, low, high)
    for seed in range(1000):
        sizes = generate_community_sizes(spec, target, np.random.default_rng(seed))
        assert int(sizes.sum()) == target
        assert sizes.min() >= low and sizes.max() <= high


def test_read_sequence_file(tmp_path):
    path = tmp_path / "degrees.txt"
    path.write_text("# degrees\n5\n4\n\n3\n")
    np.testing.assert_array_equal(read_sequence_file(path), [5, 4, 3])


def test_read_sequence_file_reports_line(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("5\nx\n")
    with pytest.raises(ParseError) as err:
        read_sequence_file(path)
    assert err.value.line_no == 2
