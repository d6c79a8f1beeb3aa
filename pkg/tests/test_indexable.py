import itertools
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core import HiderMix, Instance, SearcherMix, expected_payoff_with, prefix_payoff
from src.errors import InvalidArgumentError, InvalidSpecError, NotIndexableError, UnsupportedError
from src.indexable import (
    FAMILIES,
    AdditiveCost,
    DiscountedRescue,
    ExplicitTable,
    Rescue,
    SetFunctionGame,
    TravelSearch,
    ZIndex,
    build_spec,
    check_indexability,
    cost_paid_view,
    eval_f,
    marginal,
    recover_z,
    solve_closed_form,
    solve_game,
    t_poly,
    value_k1,
)

probabilities = st.fractions(min_value=F(1, 20), max_value=F(19, 20), max_denominator=20)


def random_spec(rng, n):
    """One of the four closed families with random parameters."""
    family = rng.choice(["rescue", "discounted", "additive", "travel-search"])
    if family == "rescue":
        return Rescue.from_probabilities([F(rng.randint(1, 19), 20) for _ in range(n)])
    if family == "discounted":
        return DiscountedRescue.from_probabilities(
            [F(rng.randint(1, 19), 20) for _ in range(n)], F(rng.randint(1, 10), 10)
        )
    costs = [F(rng.randint(1, 12), rng.randint(1, 4)) for _ in range(n)]
    if family == "additive":
        return AdditiveCost.from_costs(costs)
    return TravelSearch.from_costs(costs)


def table_from(spec):
    """The same set function written out as an explicit table."""
    subsets = itertools.chain.from_iterable(
        itertools.combinations(spec.ids, r) for r in range(len(spec.ids) + 1)
    )
    return ExplicitTable.from_entries(((s, spec.evaluate(frozenset(s))) for s in subsets), spec.ids)


class TestFamilies:
    def test_registry_lists_every_family(self):
        assert set(FAMILIES) == {"rescue", "discounted", "additive", "travel-search", "table"}

    def test_build_spec_by_kind(self):
        spec = build_spec("additive", ["x", "y"], costs=(F(2), F(3)))
        assert isinstance(spec, AdditiveCost)
        with pytest.raises(InvalidArgumentError):
            build_spec("quadratic", ["x"])

    def test_rescue_product(self):
        assert eval_f(Rescue.from_probabilities(["1/2", "1/3"]), {"1", "2"}) == F(1, 6)

    def test_additive_complement_cost(self):
        assert eval_f(AdditiveCost.from_costs([2, 3, 5]), {"1"}) == 8

    def test_travel_search(self):
        assert eval_f(TravelSearch.from_costs([1, 1, 1]), {"1"}) == 4

    def test_discounted_scales_probabilities(self):
        spec = DiscountedRescue.from_probabilities(["1/2", "2/3"], "3/4")
        assert eval_f(spec, {"1", "2"}) == F(3, 8) * F(1, 2)

    def test_table_missing_subset(self):
        spec = ExplicitTable.from_entries([((), 4), (("1",), 3)], ["1", "2"])
        with pytest.raises(InvalidSpecError):
            eval_f(spec, {"2"})
        assert [i.code for i in spec.issues()] == ["table_incomplete"]

    def test_parameter_issues(self):
        assert [i.code for i in Rescue.from_probabilities(["1/2", "1"]).issues()] == [
            "probability_out_of_range"
        ]
        assert [i.code for i in DiscountedRescue.from_probabilities(["1/2"], "3/2").issues()] == [
            "gamma_out_of_range"
        ]
        assert [i.code for i in AdditiveCost.from_costs([0, 1]).issues()] == ["cost_not_positive"]


class TestMarginal:
    def test_rescue_empty_base(self):
        assert marginal(Rescue.from_probabilities(["1/2", "1/3"]), set(), "1") == F(-1, 2)

    def test_additive(self):
        assert marginal(AdditiveCost.from_costs([2, 3]), set(), "2") == -3

    def test_rescue_nonempty_base(self):
        assert marginal(Rescue.from_probabilities(["1/2", "1/3"]), {"2"}, "1") == F(-1, 6)

    def test_location_already_searched(self):
        with pytest.raises(InvalidArgumentError):
            marginal(Rescue.from_probabilities(["1/2", "1/3"]), {"1"}, "1")


class TestIndexability:
    def test_rescue_index_normalized(self):
        z = recover_z(Rescue.from_probabilities(["1/2", "3/4"]))
        assert z.z == (F(1), F(1, 3))

    def test_additive_index_proportional_to_costs(self):
        z = recover_z(AdditiveCost.from_costs([2, 3, 5]))
        assert z.z == (F(1), F(3, 2), F(5, 2))

    def test_constructed_table_rejected_with_witness(self):
        spec = ExplicitTable.from_entries(
            [((), 4), (("1",), 3), (("2",), 2), (("1", "2"), 2)], ["1", "2"]
        )
        report = check_indexability(spec)
        assert not report.indexable
        assert report.witness.kind == "not_decreasing"
        assert report.witness.subset == ("2",)
        assert report.witness.i == "1"
        assert report.witness.observed == 0
        with pytest.raises(NotIndexableError) as exc:
            recover_z(spec)
        assert exc.value.report is not None

    def test_nonpositive_table_rejected(self):
        spec = ExplicitTable.from_entries(
            [((), 2), (("1",), 1), (("2",), 1), (("1", "2"), 0)], ["1", "2"]
        )
        report = check_indexability(spec)
        assert report.witness.kind == "not_positive"
        assert report.witness.subset == ("1", "2")

    def test_ratio_violation_found(self):
        # strictly decreasing and positive, but f({1,2,3}) breaks the pairwise ratio
        spec = ExplicitTable.from_entries(
            [
                ((), 10),
                (("1",), 8),
                (("2",), 7),
                (("3",), 6),
                (("1", "2"), 5),
                (("1", "3"), 4),
                (("2", "3"), 3),
                (("1", "2", "3"), 2),
            ],
            ["1", "2", "3"],
        )
        report = check_indexability(spec)
        assert not report.indexable
        assert report.witness.kind == "ratio"
        assert (report.witness.i, report.witness.j) == ("1", "2")
        assert report.witness.subset == ("3",)

    def test_indexable_table_recovers_z(self):
        spec = table_from(Rescue.from_probabilities(["1/2", "3/4", "2/3"]))
        assert recover_z(spec) == recover_z(Rescue.from_probabilities(["1/2", "3/4", "2/3"]))

    def test_closed_families_verified_exhaustively(self):
        rng = random.Random(17)
        for n in range(2, 9):
            spec = random_spec(rng, n)
            report = check_indexability(spec)
            assert report.indexable and report.exhaustive, spec
            assert report.z.z[0] == 1

    def test_above_cap_trusts_closed_families_only(self):
        rescue = Rescue.from_probabilities(["1/2", "1/3", "1/4"])
        report = check_indexability(rescue, cap=2)
        assert report.indexable and not report.exhaustive
        table = table_from(rescue)
        report = check_indexability(table, cap=2)
        assert not report.indexable and "cap" in report.reason

    def test_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("RESCUE_GAMES_INDEX_CAP", "2")
        table = table_from(Rescue.from_probabilities(["1/2", "1/3", "1/4"]))
        assert not check_indexability(table).indexable

    def test_single_location_rejected(self):
        with pytest.raises(InvalidArgumentError):
            check_indexability(Rescue.from_probabilities(["1/2"]))

    def test_invalid_parameters_raise(self):
        with pytest.raises(InvalidSpecError):
            check_indexability(Rescue.from_probabilities(["1/2", "1"]))


class TestTPoly:
    def test_degree_two(self):
        z = ZIndex(("1", "2", "3"), (F(1), F(2), F(3)))
        assert t_poly(z, z.ids, 2) == 11

    def test_degree_zero(self):
        z = ZIndex(("1", "2"), (F(5), F(7)))
        assert t_poly(z, z.ids, 0) == 1

    def test_binomial_count(self):
        z = ZIndex(("1", "2", "3"), (F(1), F(1), F(1)))
        assert t_poly(z, z.ids, 2) == 3

    def test_subset_argument(self):
        z = ZIndex(("1", "2", "3"), (F(1), F(2), F(3)))
        assert t_poly(z, {"2", "3"}, 1) == 5

    def test_degree_above_size(self):
        z = ZIndex(("1", "2"), (F(1), F(2)))
        with pytest.raises(InvalidArgumentError):
            t_poly(z, z.ids, 3)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(probabilities, min_size=1, max_size=6), st.integers(min_value=0, max_value=6))
    def test_matches_defining_sum(self, values, k):
        k = min(k, len(values))
        ids = tuple(str(i) for i in range(len(values)))
        z = ZIndex(ids, tuple(values))
        expected = sum(
            (
                math.prod(combo, start=F(1))
                for combo in itertools.combinations(values, k)
            ),
            F(0),
        )
        assert t_poly(z, ids, k) == expected


class TestClosedForm:
    def test_two_location_rescue(self):
        solution = solve_closed_form(Rescue.from_probabilities(["1/2", "3/4"]), 1)
        assert solution.value == F(15, 32)
        assert solution.hider.weight({"1"}) == F(3, 4)
        assert solution.hider.weight({"2"}) == F(1, 4)
        assert solution.searcher.form == "s_a"
        assert dict(solution.searcher.support) == dict(solution.hider.support)
        assert solution.provenance == "closed-form"

    def test_pairs_of_equal_probabilities(self):
        solution = solve_closed_form(Rescue.from_probabilities(["1/2", "1/2", "1/2"]), 2)
        assert solution.value == F(1, 6)
        assert all(w == F(1, 3) for _, w in solution.hider.support)

    def test_additive_unit_costs(self):
        solution = solve_closed_form(AdditiveCost.from_costs([1, 1]), 1)
        assert solution.hider.weight({"1"}) == solution.hider.weight({"2"}) == F(1, 2)
        assert solution.value == F(1, 2)

    def test_not_indexable_is_unsupported(self):
        spec = ExplicitTable.from_entries(
            [((), 4), (("1",), 3), (("2",), 2), (("1", "2"), 2)], ["1", "2"]
        )
        with pytest.raises(UnsupportedError):
            solve_closed_form(spec, 1)

    def test_k_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            solve_closed_form(Rescue.from_probabilities(["1/2", "1/3"]), 2)

    def test_solve_game_accepts_instance(self):
        instance = Instance.from_probabilities(["1/2", "3/4"], k=1)
        assert solve_game(instance).value == F(15, 32)

    def test_every_ordering_is_equalized(self):
        rng = random.Random(23)
        for _ in range(25):
            n = rng.randint(2, 6)
            k = rng.randint(1, min(3, n - 1))
            spec = random_spec(rng, n)
            solution = solve_closed_form(spec, k)
            game = SetFunctionGame(spec, k)
            payoffs = {
                sum((w * game.payoff(h, order) for h, w in solution.hider.support), F(0))
                for order in itertools.permutations(spec.ids)
            }
            assert payoffs == {solution.value}, spec

    def test_searcher_mix_guarantees_value(self):
        rng = random.Random(29)
        for _ in range(15):
            n = rng.randint(2, 5)
            k = rng.randint(1, n - 1)
            spec = random_spec(rng, n)
            solution = solve_closed_form(spec, k)
            for h in itertools.combinations(spec.ids, k):
                guaranteed = expected_payoff_with(
                    spec.evaluate, spec.ids, HiderMix.point(h), solution.searcher
                )
                assert guaranteed == solution.value

    def test_scale_invariance(self):
        """Scaling every cost scales f but leaves q unchanged."""
        base = solve_closed_form(AdditiveCost.from_costs([1, 2, 3, 4]), 2)
        scaled = solve_closed_form(AdditiveCost.from_costs([3, 6, 9, 12]), 2)
        assert dict(base.hider.support) == dict(scaled.hider.support)
        assert scaled.value == 3 * base.value

    def test_travel_search_equals_shifted_additive(self):
        rng = random.Random(31)
        for _ in range(10):
            n = rng.randint(2, 6)
            k = rng.randint(1, n - 1)
            costs = [F(rng.randint(1, 9), rng.randint(1, 3)) for _ in range(n)]
            travel = solve_closed_form(TravelSearch.from_costs(costs), k)
            additive = solve_closed_form(AdditiveCost.from_costs([c + 1 for c in costs]), k)
            assert travel.value == additive.value
            assert dict(travel.hider.support) == dict(additive.hider.support)

    def test_discount_one_equals_rescue(self):
        p = ["1/2", "2/3", "3/7", "4/5"]
        for k in (1, 2, 3):
            plain = solve_closed_form(Rescue.from_probabilities(p), k)
            discounted = solve_closed_form(DiscountedRescue.from_probabilities(p, 1), k)
            assert plain.value == discounted.value
            assert plain.hider == discounted.hider
            assert plain.z == discounted.z

    def test_to_dict_renders_rationals(self):
        data = solve_closed_form(Rescue.from_probabilities(["1/2", "3/4"]), 1).to_dict()
        assert data["value"] == "15/32"
        assert data["z"] == {"1": "1", "2": "1/3"}


class TestValueK1:
    def test_two_locations(self):
        assert value_k1(Rescue.from_probabilities(["1/2", "3/4"])) == F(15, 32)

    def test_equal_probabilities(self):
        assert value_k1(Rescue.from_probabilities(["1/2", "1/2"])) == F(3, 8)

    def test_single_location_rejected(self):
        with pytest.raises(InvalidArgumentError):
            value_k1(Rescue.from_probabilities(["1/2"]))

    def test_non_rescue_unsupported(self):
        with pytest.raises(UnsupportedError):
            value_k1(AdditiveCost.from_costs([1, 2]))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(probabilities, min_size=2, max_size=6))
    def test_matches_closed_form(self, ps):
        spec = Rescue.from_probabilities(ps)
        assert value_k1(spec) == solve_closed_form(spec, 1).value

    def test_discounted_uses_effective_probabilities(self):
        spec = DiscountedRescue.from_probabilities(["1/2", "3/4", "2/3"], "9/10")
        assert value_k1(spec) == solve_closed_form(spec, 1).value


class TestCostView:
    def test_expected_cost_paid(self):
        spec = AdditiveCost.from_costs([1, 1])
        assert cost_paid_view(spec, F(1, 2)) == F(3, 2)

    def test_rescue_has_no_cost_view(self):
        with pytest.raises(UnsupportedError):
            cost_paid_view(Rescue.from_probabilities(["1/2", "1/3"]), F(1, 3))


def test_identity_order_value_matches_prefix_payoff():
    """Sanity check of the value routine on the rescue pair example."""
    spec = Rescue.from_probabilities(["1/2", "3/4"])
    assert prefix_payoff(spec.evaluate, frozenset({"2"}), ("2", "1")) == F(3, 4)
    solution = solve_closed_form(spec, 1)
    assert expected_payoff_with(
        spec.evaluate, spec.ids, solution.hider, SearcherMix.point(("2", "1"))
    ) == F(15, 32)
