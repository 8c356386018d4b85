"""Tests for the moment-identity feasibility engine.

Oracle values: dual weight distributions are checked against classical code
pairs and against exhaustively computed hyperplane spectra of the shipped
witness sets; exclusion certificates are replayed through independent exact
arithmetic; status sweeps are frozen after cross-checking each decided size
against either an explicit construction or a hand-verified certificate.
"""

import json
from fractions import Fraction
from math import comb

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qspread.divisible import (
    hill_cap,
    representable,
    cited_existence_table,
    seventeen_point_witness,
)
from qspread.errors import (
    CongruenceViolated,
    DepthExceeded,
    InconsistentInput,
    ParameterMismatch,
    RangeError,
)
from qspread.geometry import PointSet, enumerate_points
from qspread.gf import field_new
from qspread.macwilliams import (
    Rule,
    STATUS_EXCLUDED,
    STATUS_EXISTS,
    STATUS_FEASIBLE,
    STATUS_UNDECIDED,
    average_bound,
    average_exclude,
    build_problem,
    clear_status_cache,
    code_weights_from_spectrum,
    cubic_exclude,
    cubic_form,
    cubic_slack,
    exclusion_interval,
    existence_status,
    frontier,
    iterated_average,
    linear_identity,
    lp_feasibility,
    macwilliams_transform,
    replay,
    status_range,
    tau,
    tau_exclude,
)
from qspread.macwilliams import _iterated_formula


# ---------------------------------------------------------------------------
# dual weight distributions


def as_int_dict(dist):
    return {w: int(c) for w, c in dist.items() if c}


def test_simplex_dualizes_to_hamming():
    # Classical pair: the [7,3] binary simplex code (all nonzero words of
    # weight 4) has the [7,4] Hamming code as its dual.
    simplex = {0: 1, 4: 7}
    dual = macwilliams_transform(simplex, 7, 3, 2)
    assert as_int_dict(dual) == {0: 1, 3: 7, 4: 7, 7: 1}


def test_full_space_dualizes_to_zero_code():
    n, q = 5, 3
    full = {w: (q - 1) ** w * comb(n, w) for w in range(n + 1)}
    dual = macwilliams_transform(full, n, n, q)
    assert as_int_dict(dual) == {0: 1}


def test_transform_rejects_malformed_distributions():
    with pytest.raises(InconsistentInput):
        macwilliams_transform({0: 1, 9: 7}, 7, 3, 2)  # weight beyond length
    with pytest.raises(InconsistentInput):
        macwilliams_transform({0: 2, 4: 6}, 7, 3, 2)  # two zero words
    with pytest.raises(InconsistentInput):
        macwilliams_transform({0: 1, 4: 6}, 7, 3, 2)  # wrong total count


def test_transform_round_trips_on_shipped_sets():
    for dim in (6, 7, 8):
        ds = seventeen_point_witness(dim)
        spec = ds.points.spectrum()
        weights = code_weights_from_spectrum(spec)
        k = ds.points.span_dimension()
        dual = macwilliams_transform(weights, spec.n, k, 2)
        back = macwilliams_transform(
            {w: c for w, c in dual.items() if c}, spec.n, spec.n - k, 2
        )
        assert as_int_dict(back) == weights


@settings(deadline=None, max_examples=25)
@given(st.data())
def test_transform_round_trips_on_random_point_sets(data):
    field = field_new(2)
    pts = list(enumerate_points(field, 3))
    chosen = data.draw(
        st.lists(st.sampled_from(pts), min_size=3, max_size=7, unique=True)
    )
    ps = PointSet.from_vectors(field, 3, chosen)
    assume(ps.span_dimension() == 3)
    spec = ps.spectrum()
    weights = code_weights_from_spectrum(spec)
    dual = macwilliams_transform(weights, spec.n, 3, 2)
    back = macwilliams_transform(
        {w: c for w, c in dual.items() if c}, spec.n, spec.n - 3, 2
    )
    assert as_int_dict(back) == weights


def test_code_weights_require_spanning_source():
    field = field_new(2)
    ps = PointSet.from_vectors(field, 3, [(0, 0, 1)])
    with pytest.raises(InconsistentInput):
        code_weights_from_spectrum(ps.spectrum())


def test_seventeen_point_witnesses_have_expected_dual_triples():
    # The dual count of weight-3 words distinguishes the three witnesses;
    # values agree with the unique per-dimension solutions found by the
    # feasibility engine below.
    expected = {6: 6, 7: 2, 8: 0}
    for dim, a3 in expected.items():
        ds = seventeen_point_witness(dim)
        spec = ds.points.spectrum()
        weights = code_weights_from_spectrum(spec)
        dual = macwilliams_transform(weights, spec.n, dim, 2)
        assert ds.points.span_dimension() == dim
        assert (dual[1], dual[2], dual[3]) == (0, 0, a3)


def test_hill_cap_code_weights_and_projective_dual():
    ds = hill_cap()
    spec = ds.points.spectrum()
    assert dict(spec.counts) == {11: 56, 20: 308}
    weights = code_weights_from_spectrum(spec)
    assert weights == {0: 1, 36: 616, 45: 112}
    dual = macwilliams_transform(weights, 56, 6, 3)
    assert (dual[1], dual[2], dual[3]) == (0, 0, 0)


# ---------------------------------------------------------------------------
# quadratic counting test


def test_tau_window_for_eight_divisible_binary_sizes():
    # At divisor 8 over F_2 the quadratic goes negative at m = 4 exactly for
    # sizes 53..58; both neighbours stay nonnegative everywhere.
    values = {n: tau_exclude(2, n, 8) for n in range(52, 60)}
    assert values[52] is None
    assert values[59] is None
    assert {n: cert["m"] for n, cert in values.items() if cert} == {
        n: 4 for n in range(53, 59)
    }
    assert [values[n]["tau"] for n in range(53, 59)] == [-2, -6, -8, -8, -6, -2]


def test_tau_exclude_certificates():
    assert tau_exclude(3, 3, 3) == {"m": 1, "tau": tau(3, 3, 3, 1)}
    assert tau_exclude(8, 8, 8)["m"] == 1
    assert tau_exclude(8, 67, 8)["m"] == 8
    assert tau_exclude(2, 7, 4) is None
    assert tau_exclude(2, 0, 4) is None
    for n, cert in ((3, {"m": 1}), (67, {"m": 8})):
        value = tau(8, n, 8, cert["m"])
        assert value < 0 or (value == 0 and cert["m"] >= 2)


def test_tau_requires_power_divisor():
    with pytest.raises(RangeError):
        tau_exclude(2, 10, 6)
    with pytest.raises(RangeError):
        tau_exclude(3, 10, 1)


@settings(deadline=None, max_examples=60)
@given(
    st.sampled_from([2, 3, 4, 5]),
    st.integers(min_value=1, max_value=300),
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=2, max_value=40),
)
def test_tau_is_convex_in_the_step_count(q, c, r, m):
    delta = q**r
    left = tau(q, c, delta, m - 1)
    mid = tau(q, c, delta, m)
    right = tau(q, c, delta, m + 1)
    assert left + right >= 2 * mid


# ---------------------------------------------------------------------------
# first-moment identity and averaging


def test_linear_identity_on_hand_enumerated_plane():
    # A solid-sized subspace inside F_2^4: one hyperplane contains it, the
    # other fourteen meet it in a line of three points.
    field = field_new(2)
    pts = [p for p in enumerate_points(field, 4) if p[3] == 0]
    spec = PointSet.from_vectors(field, 4, pts).spectrum()
    assert dict(spec.counts) == {3: 14, 7: 1}
    assert linear_identity(2, 4, 3, 1, spec) == 0


def test_linear_identity_on_seventeen_point_witness():
    spec = seventeen_point_witness(6).points.spectrum()
    assert linear_identity(2, 4, 5, 3, spec) == 0


def test_linear_identity_rejects_bad_split():
    spec = seventeen_point_witness(6).points.spectrum()
    with pytest.raises(ParameterMismatch):
        linear_identity(2, 4, 5, 4, spec)
    with pytest.raises(ParameterMismatch):
        linear_identity(3, 4, 5, 3, spec)


def test_average_exclude_pins():
    # 49 = 25 + 1*24: a minimum hyperplane count of 25 would exceed the
    # average section size 49/3.
    assert average_exclude(3, 49, 24, 25, 1) is True
    assert average_exclude(3, 49, 24, 1, 2) is False
    assert average_exclude(2, 0, 4, 0, 0) is False
    with pytest.raises(ParameterMismatch):
        average_exclude(3, 49, 24, 2, 1)
    with pytest.raises(RangeError):
        average_exclude(3, 49, 24, -1, 1)


def test_average_bound_single_step():
    assert average_bound(3, 2, 43, 5) == (7, 7)
    with pytest.raises(CongruenceViolated):
        average_bound(3, 2, 43, 4)
    with pytest.raises(RangeError):
        average_bound(3, 0, 43, 5)
    with pytest.raises(RangeError):
        average_bound(3, 2, 43, -22)


def test_iterated_average_depths():
    assert iterated_average(3, 3, 2560, 17, 3) == (94, 1)
    assert iterated_average(3, 3, 2560, 17, 2) == (274, 4)
    assert iterated_average(3, 3, 2560, 17, 0) == (2560, 49)
    # One more step at the lower divisor continues the chain.
    assert average_bound(3, 1, 274, 8) == (91, 1)


def test_iterated_average_depth_guard():
    # y = 9 is divisible by the characteristic twice, which forbids the
    # deepest step.
    with pytest.raises(DepthExceeded):
        iterated_average(3, 3, 126, 9, 3)
    assert iterated_average(3, 3, 126, 9, 2) == (0, 0)
    with pytest.raises(RangeError):
        iterated_average(3, 3, 126, 0, 1)
    with pytest.raises(CongruenceViolated):
        iterated_average(3, 3, 126, 10, 1)


def test_iterated_average_is_split_independent():
    # Writing n = a*q^(r+1) + b with any non-canonical split must give the
    # same bound and residue.
    q, r, n, y, j = 3, 3, 2560, 17, 2
    block = q ** (r + 1)
    reference = iterated_average(q, r, n, y, j)
    for shift in (1, 2, 5):
        a = n // block - shift
        b = n % block + shift * block
        assert _iterated_formula(q, r, a, b, y + 0, j) == reference


# ---------------------------------------------------------------------------
# cubic counting test


def test_cubic_excludes_two_hundred_at_window_six():
    cert = cubic_exclude(2, 200, 16, 6)
    assert cert is not None and cert["t"] == 6
    assert cert["h"] == cubic_form(2, 200, 16, 6) >= 0
    assert cert["g2"] == cubic_slack(2, 200, 16, 6) < 0


def test_cubic_silent_inside_its_own_window():
    # The window containing n/delta can never produce a contradiction.
    assert cubic_exclude(2, 200, 16, 12) is None
    assert cubic_exclude(2, 200, 16, 13) is None


def test_cubic_silent_on_constructible_sizes():
    for n in (48, 64, 96, 112, 240):
        for t in range(n // 16 + 4):
            assert cubic_exclude(2, n, 16, t) is None


def test_cubic_rejects_bad_window():
    with pytest.raises(RangeError):
        cubic_exclude(2, 200, 16, -1)
    with pytest.raises(RangeError):
        cubic_exclude(2, 200, 12, 3)


# ---------------------------------------------------------------------------
# two-block window


def test_exclusion_interval_small_binary_cases():
    assert [n for n in range(1, 6) if exclusion_interval(2, 1, n)] == [1, 2]
    assert [n for n in range(1, 17) if exclusion_interval(2, 2, n)] == [
        1, 2, 3, 4, 5, 6, 9, 10, 11, 12, 13,
    ]
    gaps = [n for n in range(1, 49) if exclusion_interval(2, 3, n)]
    assert set(range(1, 49)) - set(gaps) == {15, 16, 30, 31, 32, 45, 46, 47, 48}


def test_exclusion_interval_stops_at_window_edge():
    assert exclusion_interval(2, 1, 5) is False  # beyond 1*2^2
    assert exclusion_interval(2, 2, 17) is False
    assert exclusion_interval(3, 1, 10) is False


def test_quadratic_test_consistent_with_window():
    # Wherever the quadratic test fires inside the two-block window, the
    # window test fires as well, and it never fires on representable sizes.
    for q, r in ((2, 1), (2, 2), (3, 1), (3, 2)):
        delta = q**r
        window = r * q ** (r + 1)
        for n in range(1, 61):
            cert = tau_exclude(q, n, delta)
            if representable(q, r, n) is not None:
                assert cert is None
            if cert is not None and n <= window:
                assert exclusion_interval(q, r, n)


# ---------------------------------------------------------------------------
# feasibility problems


def test_build_problem_prunes_unheritable_weights():
    p52 = build_problem(2, 3, 52)
    assert p52.support == (8, 16, 24, 32)
    assert (p52.k_lo, p52.k_hi) == (6, 11)
    p51 = build_problem(2, 3, 51)
    # 51 - 40 = 11 and 51 - 48 = 3 are impossible section sizes, so the
    # weights 40 and 48 drop out.
    assert p51.support == (8, 16, 24, 32)
    p17 = build_problem(2, 2, 17)
    assert p17.support == (4, 8, 12)
    assert (p17.k_lo, p17.k_hi) == (5, 9)


def test_build_problem_validates_input():
    with pytest.raises(RangeError):
        build_problem(2, 0, 10)
    with pytest.raises(RangeError):
        build_problem(2, 2, 0)
    with pytest.raises(RangeError):
        lp_feasibility(build_problem(2, 2, 17, identities=3))


def test_rule_parsing():
    rule = Rule.parse({"coeffs": {"A_8": 1, "x": -2}, "op": ">=", "rhs": 3})
    assert rule.op == ">=" and rule.rhs == 3
    assert dict(rule.coeffs) == {"A_8": 1, "x": -2}
    with pytest.raises(InconsistentInput):
        Rule.parse({"coeffs": {"A_8": 1}, "op": "!=", "rhs": 0})


def test_fifty_two_is_infeasible_with_exact_certificate():
    verdict = lp_feasibility(build_problem(2, 3, 52))
    assert verdict.status == STATUS_EXCLUDED
    cert = verdict.certificate
    assert cert["mode"] == "parametric"
    par = cert["parametrization"]
    assert par["A_8"] == {"const": -4, "x": Fraction(1, 512), "y": Fraction(7, 64)}
    assert par["A_16"] == {"const": 6, "x": Fraction(-3, 512), "y": Fraction(-17, 64)}
    assert par["A_24"] == {"const": -4, "x": Fraction(3, 512), "y": Fraction(397, 64)}
    assert par["A_32"] == {"const": 1, "x": Fraction(-1, 512), "y": Fraction(125, 64)}
    interval = cert["final_interval"]
    assert interval["lower"] == 96
    assert interval["upper"] == Fraction(384, 17)
    assert set(interval["lower_from"]) == {"A_8>=0", "A_16>=0"}
    assert set(interval["upper_from"]) == {"A_16>=0", "x>=0"}
    assert replay(verdict)


def test_seventeen_has_exactly_three_solutions():
    verdict = lp_feasibility(build_problem(2, 2, 17))
    assert verdict.status == STATUS_FEASIBLE
    solved = {
        case["k"]: case
        for case in verdict.certificate["cases"]
        if case["feasible"]
    }
    assert sorted(solved) == [6, 7, 8]
    expected = {
        6: ({4: 2, 8: 49, 12: 12}, 6),
        7: ({4: 7, 8: 95, 12: 25}, 2),
        8: ({4: 17, 8: 187, 12: 51}, 0),
    }
    for k, (solution, a3) in expected.items():
        case = solved[k]
        assert case["unique"] is True
        assert {w: int(c) for w, c in case["solution"].items()} == solution
        assert case["dual_a3"] == a3
    # The solved spectra coincide with the shipped witnesses of each span.
    for k in (6, 7, 8):
        spec = seventeen_point_witness(k).points.spectrum()
        a_spec = {i: int(c) for i, c in solved[k]["a_spectrum"].items()}
        assert a_spec == dict(spec.counts)


def test_fifty_one_forces_span_eight_or_nine():
    verdict = lp_feasibility(build_problem(2, 3, 51))
    assert verdict.status == STATUS_FEASIBLE
    feasible = {
        case["k"]: case
        for case in verdict.certificate["cases"]
        if case["feasible"] and case.get("k") is not None
    }
    assert sorted(feasible) == [8, 9]
    case8 = feasible[8]
    assert case8["unique"] is True
    assert {w: int(c) for w, c in case8["solution"].items()} == {
        8: 0, 16: 0, 24: 204, 32: 51,
    }


def test_extra_rules_can_force_infeasibility():
    # Every solution for 17 points has at most 17 hyperplanes of weight 4,
    # so demanding 18 of them wipes out all spans.
    rules = [{"coeffs": {"A_4": 1}, "op": ">=", "rhs": 18}]
    verdict = lp_feasibility(build_problem(2, 2, 17, extra_rules=rules))
    assert verdict.status == STATUS_EXCLUDED
    relaxed = [{"coeffs": {"A_4": 1}, "op": "<=", "rhs": 17}]
    verdict = lp_feasibility(build_problem(2, 2, 17, extra_rules=relaxed))
    assert verdict.status == STATUS_FEASIBLE


def test_deeper_identity_stacks_agree():
    assert lp_feasibility(build_problem(2, 3, 52, identities=6)).status == (
        STATUS_EXCLUDED
    )
    assert lp_feasibility(build_problem(2, 2, 17, identities=5)).status == (
        STATUS_FEASIBLE
    )


# ---------------------------------------------------------------------------
# aggregated statuses


def statuses(q, r, lo, hi):
    return {n: existence_status(q, r, n) for n in range(lo, hi + 1)}


def test_binary_divisor_two_row():
    row = statuses(2, 1, 1, 50)
    excluded = [n for n, v in row.items() if v.status == STATUS_EXCLUDED]
    assert excluded == [1, 2]
    assert all(
        v.status == STATUS_EXISTS for n, v in row.items() if n not in (1, 2)
    )
    assert frontier(2, 1) == 2


def test_binary_divisor_four_row():
    row = statuses(2, 2, 1, 100)
    exists = {n for n, v in row.items() if v.status == STATUS_EXISTS}
    assert exists == {7, 8} | set(range(14, 101))
    assert all(
        v.status == STATUS_EXCLUDED for n, v in row.items() if n not in exists
    )
    assert frontier(2, 2) == 13


def test_binary_divisor_eight_row_with_stages():
    row = statuses(2, 3, 1, 80)
    excluded = {n for n, v in row.items() if v.status == STATUS_EXCLUDED}
    window = set(range(1, 49)) - {15, 16, 30, 31, 32, 45, 46, 47, 48}
    assert excluded == window | set(range(52, 59))
    undecided = {n for n, v in row.items() if v.status == STATUS_UNDECIDED}
    assert undecided == {59}
    assert row[52].stage == "lp"
    assert all(row[n].stage == "tau" for n in range(53, 59))
    assert row[51].stage == "constructive"
    assert all(row[n].stage == "cited" for n in (49, 50, 73, 74))
    assert all(row[n].status == STATUS_EXISTS for n in range(60, 81))


def test_ternary_divisor_three_row():
    row = statuses(3, 1, 1, 30)
    excluded = [n for n, v in row.items() if v.status == STATUS_EXCLUDED]
    assert excluded == [1, 2, 3, 5, 6, 7]
    assert frontier(3, 1) == 7
    assert row[10].stage == "constructive"  # the elliptic quadric size
    assert row[11].stage == "cited"


def test_cited_size_table_contents():
    table = cited_existence_table()
    assert set(table["2,3"]) == {49, 50, 73, 74}
    assert set(table["3,1"]) == {11}


def test_divisor_five_row_regression():
    row = statuses(5, 1, 1, 40)
    undecided = sorted(n for n, v in row.items() if v.status == STATUS_UNDECIDED)
    # 40 is genuinely open; 39 is decided in the wider literature by means
    # outside this engine's toolkit, so it stays undecided here.
    assert undecided == [39, 40]
    exists = sorted(n for n, v in row.items() if v.status == STATUS_EXISTS)
    assert exists == [6, 12, 18, 24, 25, 26, 30, 31, 32, 36, 37, 38]
    excluded = sorted(n for n, v in row.items() if v.status == STATUS_EXCLUDED)
    assert all(replay(row[n]) for n in excluded)


STRIP_TERNARY = [55, 84, 85, 89, 90, 97, 98, 103, 111, 116, 126, 127]
STRIP_BINARY_SIXTEEN = [
    129, 161, 162, 193, 194, 195, 196, 197, 198, 199,
    225, 226, 227, 228, 229, 230, 231, 234,
]


def load_open_sizes():
    with open("tests/data/table1.json", encoding="utf-8") as handle:
        return {key: set(vals) for key, vals in json.load(handle).items()}


def test_ternary_divisor_nine_row_regression():
    open_sizes = load_open_sizes()["3,2"]
    row = statuses(3, 2, 1, 128)
    undecided = {n for n, v in row.items() if v.status == STATUS_UNDECIDED}
    assert undecided == open_sizes | set(STRIP_TERNARY)
    for n, verdict in row.items():
        if verdict.status == STATUS_EXCLUDED:
            assert replay(verdict)


def test_binary_divisor_sixteen_row_regression():
    open_sizes = load_open_sizes()["2,4"]
    row = statuses(2, 4, 1, 247)
    undecided = {n for n, v in row.items() if v.status == STATUS_UNDECIDED}
    assert undecided == open_sizes | set(STRIP_BINARY_SIXTEEN)
    assert row[166].status == STATUS_EXCLUDED
    assert row[200].status == STATUS_EXCLUDED
    assert row[235].status == STATUS_EXCLUDED


def test_constructed_sizes_are_never_reported_excluded():
    for q, r, top in ((2, 1, 40), (2, 2, 60), (2, 3, 80), (3, 1, 40), (3, 2, 128)):
        for n in range(1, top + 1):
            if representable(q, r, n) is not None:
                assert existence_status(q, r, n).status == STATUS_EXISTS
    assert existence_status(3, 2, 56).status == STATUS_EXISTS  # shipped cap
    assert existence_status(2, 3, 51).status == STATUS_EXISTS
    assert existence_status(3, 1, 10).status == STATUS_EXISTS
    assert existence_status(2, 2, 17).status == STATUS_EXISTS


def test_every_exclusion_certificate_replays():
    for q, r, top in ((2, 1, 30), (2, 2, 60), (2, 3, 80), (3, 1, 30)):
        for n, verdict in statuses(q, r, 1, top).items():
            if verdict.status == STATUS_EXCLUDED:
                assert replay(verdict), (q, r, n)


def test_average_stage_certificates():
    verdict = existence_status(8, 4, 135756)
    assert verdict.status == STATUS_EXCLUDED and verdict.stage == "average"
    assert replay(verdict)
    verdict = existence_status(8, 5, 1572867)
    assert verdict.status == STATUS_EXCLUDED and verdict.stage == "average"
    assert replay(verdict)
    assert existence_status(8, 1, 140).status == STATUS_UNDECIDED
    assert existence_status(8, 5, 1610316).status == STATUS_UNDECIDED


def test_trivial_statuses():
    assert existence_status(2, 3, 0).status == STATUS_EXISTS
    assert existence_status(7, 0, 23).status == STATUS_EXISTS
    with pytest.raises(RangeError):
        existence_status(2, -1, 5)
    with pytest.raises(RangeError):
        existence_status(2, 1, -5)


def test_verdict_serializes_to_json():
    verdict = lp_feasibility(build_problem(2, 3, 52))
    payload = json.dumps(verdict.to_json())
    decoded = json.loads(payload)
    assert decoded["status"] == "excluded"
    assert decoded["certificate"]["final_interval"]["upper"] == "384/17"


def test_status_range_matches_pointwise_queries():
    swept = status_range(2, 2, 1, 20)
    for n, verdict in swept.items():
        assert verdict == existence_status(2, 2, n)


def test_status_cache_can_be_cleared():
    before = existence_status(2, 2, 17)
    clear_status_cache()
    after = existence_status(2, 2, 17)
    assert before.status == after.status == STATUS_EXISTS
