"""Release gate: ten pass/fail criteria with pinned tolerances.

The suite is computed once per session through acceptance.run_suite()
(which itself runs the nine computational criteria twice to earn the
tenth, determinism). Each test prints its verdict line through the
capture bypass so a plain pytest run shows the full table:

    ACCEPTANCE n: PASS - name

Per-criterion tests then assert the pass flag, the pinned tolerance
fields inside the recorded details, and the wall-clock budget where
one is specified.
"""

from fractions import Fraction

import pytest

from lambertseq import acceptance


@pytest.fixture(scope="module")
def suite():
    return {r.number: r for r in acceptance.run_suite()}


def _verdict(capsys, res):
    with capsys.disabled():
        print(f"\nACCEPTANCE {res.number}: {'PASS' if res.passed else 'FAIL'} - {res.name}")


def test_acceptance_01_coefficient_oracle_equivalence(suite, capsys):
    res = suite[1]
    _verdict(capsys, res)
    assert res.passed, res.details
    d = res.details
    assert d["sieve_equals_trial_division"] is True
    assert d["all_projected_rows_equal"] is True
    assert d["limit"] == 10**5 and d["terms"] == 50
    assert d["per_n_api_spot_checks"] == 400 and d["spot_checks_ok"] is True
    assert res.elapsed < 10.0


def test_acceptance_02_lambert_identity_layer(suite, capsys):
    res = suite[2]
    _verdict(capsys, res)
    assert res.passed, res.details
    cases = res.details["cases"]
    assert len(cases) == 12  # three arguments, four sign/square branches
    cap = Fraction(1, 10**60)
    for case in cases.values():
        assert case["difference_contains_zero"] is True
        assert Fraction(case["lhs_radius"]) < cap
        assert Fraction(case["rhs_radius"]) < cap
    assert res.elapsed < 30.0


def test_acceptance_03_fibonacci_lucas_identities(suite, capsys):
    res = suite[3]
    _verdict(capsys, res)
    assert res.passed, res.details
    d = res.details
    assert d["pairing"] == "F: f1 - f3, L: f1 + f3"
    assert d["alternate_pairing_excluded"] is True
    assert Fraction(d["worst_radius"]) < Fraction(1, 10**60)


def test_acceptance_04_construction_exactness(suite, capsys):
    res = suite[4]
    _verdict(capsys, res)
    assert res.passed, res.details
    d = res.details
    assert sorted(d) == ["one-class-k2", "one-class-k3", "two-class-k2"]
    for case in d.values():
        assert case["verify_positions"] > 0
        assert case["collision_recount_equal"] is True
        assert case["top_ladder_size_bound"] is True
    assert res.elapsed < 120.0


def test_acceptance_05_inclusion_exclusion_oracle(suite, capsys):
    res = suite[5]
    _verdict(capsys, res)
    assert res.passed, res.details
    assert res.details["trials"] == 50
    assert res.details["exact_matches"] == 50  # tolerance is zero


def test_acceptance_06_window_closed_forms(suite, capsys):
    res = suite[6]
    _verdict(capsys, res)
    assert res.passed, res.details
    assert res.details["all_intersect"] is True
    assert Fraction(res.details["worst_radius"]) < Fraction(1, 10**40)


def test_acceptance_07_pisot_classification(suite, capsys):
    res = suite[7]
    _verdict(capsys, res)
    assert res.passed, res.details
    d = res.details
    assert d["plastic_classification"] == "Pisot"
    assert d["golden_is_pisot"] is True
    assert d["stable_under_precision_doubling"] is True
    assert d["admissible_alpha5_above_2"] is True


def test_acceptance_08_lattice_reduction_oracle(suite, capsys):
    res = suite[8]
    _verdict(capsys, res)
    assert res.passed, res.details
    d = res.details
    assert d["within_lll_factor"] is True
    assert d["golden_probe_coefficients"] == [1, 1, -1]
    assert d["golden_probe_exact"] is True


def test_acceptance_09_negative_relation_probe(suite, capsys):
    res = suite[9]
    _verdict(capsys, res)
    assert res.passed, res.details
    d = res.details
    assert d["values"] == 6
    assert Fraction(d["worst_radius"]) < Fraction(1, 2**520)
    assert d["no_relation"] is True
    assert d["min_l1_exceeds_max_coeff"] is True
    assert Fraction(d["min_l1"]) > 10**6
    assert res.elapsed < 300.0


def test_acceptance_10_determinism(suite, capsys):
    res = suite[10]
    _verdict(capsys, res)
    assert res.passed, res.details
    assert res.details["criteria_compared"] == 9
    assert res.details["byte_identical"] is True
