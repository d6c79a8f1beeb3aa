import random
from fractions import Fraction as F

import pytest

from src.best_response import (
    ResponseProblem,
    best_response_bruteforce,
    index_order,
    index_values,
    interchange_delta,
    response_payoff,
)
from src.errors import InvalidArgumentError, ResourceLimitError, UnsupportedError
from src.indexable import AdditiveCost, DiscountedRescue, ExplicitTable, Rescue, TravelSearch


def random_distribution(rng, n, zero_probability=0.2):
    weights = [0 if rng.random() < zero_probability else rng.randint(1, 9) for _ in range(n)]
    if not any(weights):
        weights[rng.randrange(n)] = 1
    total = sum(weights)
    return [F(w, total) for w in weights]


def random_spec(rng, n):
    family = rng.choice(["rescue", "discounted", "additive", "travel"])
    if family == "rescue":
        return Rescue.from_probabilities([F(rng.randint(1, 19), 20) for _ in range(n)])
    if family == "discounted":
        return DiscountedRescue.from_probabilities(
            [F(rng.randint(1, 19), 20) for _ in range(n)], F(rng.randint(5, 10), 10)
        )
    costs = [F(rng.randint(1, 9)) for _ in range(n)]
    return AdditiveCost.from_costs(costs) if family == "additive" else TravelSearch.from_costs(costs)


class TestResponsePayoff:
    def test_point_mass_found_first(self):
        problem = ResponseProblem.from_weights(Rescue.from_probabilities(["1/2", "1/3"]), [1, 0])
        assert response_payoff(problem, ("1", "2")) == F(1, 2)

    def test_two_terms(self):
        problem = ResponseProblem.from_weights(
            Rescue.from_probabilities(["1/2", "1/3"]), ["1/2", "1/2"]
        )
        assert response_payoff(problem, ("1", "2")) == F(1, 3)

    def test_equalized_example(self):
        problem = ResponseProblem.from_weights(
            Rescue.from_probabilities(["1/2", "3/4"]), ["3/4", "1/4"]
        )
        assert response_payoff(problem, ("2", "1")) == F(15, 32)
        assert response_payoff(problem, ("1", "2")) == F(15, 32)

    def test_distribution_must_sum_to_one(self):
        with pytest.raises(InvalidArgumentError):
            ResponseProblem.from_weights(Rescue.from_probabilities(["1/2", "1/3"]), ["1/2", "1/3"])

    def test_negative_weight_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ResponseProblem.from_weights(Rescue.from_probabilities(["1/2", "1/3"]), ["3/2", "-1/2"])

    def test_mapping_with_unknown_location(self):
        with pytest.raises(InvalidArgumentError):
            ResponseProblem.from_weights(Rescue.from_probabilities(["1/2", "1/3"]), {"9": "1"})

    def test_mapping_missing_ids_weigh_zero(self):
        problem = ResponseProblem.from_weights(Rescue.from_probabilities(["1/2", "1/3"]), {"2": "1"})
        assert problem.x == (F(0), F(1))


class TestIndexOrder:
    def test_rescue_indices_and_order(self):
        problem = ResponseProblem.from_weights(
            Rescue.from_probabilities(["1/2", "9/10", "4/5"]), ["1/2", "3/10", "1/5"]
        )
        assert index_values(problem) == {"1": F(1, 2), "2": F(27, 10), "3": F(4, 5)}
        assert index_order(problem) == ("2", "3", "1")
        order, best = best_response_bruteforce(problem)
        assert order == ("2", "3", "1")
        assert response_payoff(problem, index_order(problem)) == best

    def test_ties_keep_location_order(self):
        spec = Rescue.from_probabilities(["1/3", "1/3", "1/3", "1/3"])
        problem = ResponseProblem.from_weights(spec, ["1/4"] * 4)
        assert index_order(problem) == ("1", "2", "3", "4")
        assert index_order(problem, "minimize") == ("1", "2", "3", "4")

    def test_smiths_rule(self):
        problem = ResponseProblem.from_weights(AdditiveCost.from_costs([1, 2]), ["1/4", "3/4"])
        assert index_order(problem) == ("2", "1")
        assert best_response_bruteforce(problem) == (("2", "1"), F(3, 4))

    def test_zero_weight_sorts_last(self):
        problem = ResponseProblem.from_weights(
            Rescue.from_probabilities(["1/2", "1/2", "1/2"]), ["0", "1/2", "1/2"]
        )
        assert index_order(problem)[-1] == "1"

    def test_minimize_is_ascending_testing_index(self):
        """Minimizing reproduces the ascending x p / (1 - p) sequencing rule."""
        rng = random.Random(41)
        for _ in range(20):
            n = rng.randint(2, 6)
            p = [F(rng.randint(1, 19), 20) for _ in range(n)]
            problem = ResponseProblem.from_weights(
                Rescue.from_probabilities(p), random_distribution(rng, n, 0)
            )
            testing_index = {
                str(i + 1): problem.x[i] * p[i] / (1 - p[i]) for i in range(n)
            }
            order = index_order(problem, "minimize")
            assert [testing_index[i] for i in order] == sorted(testing_index.values())

    def test_invariant_under_rescaling(self):
        base = ResponseProblem.from_weights(AdditiveCost.from_costs([1, 2, 5]), ["1/3", "1/2", "1/6"])
        scaled = ResponseProblem.from_weights(AdditiveCost.from_costs([4, 8, 20]), ["1/3", "1/2", "1/6"])
        for direction in ("maximize", "minimize"):
            assert index_order(base, direction) == index_order(scaled, direction)

    def test_not_indexable_is_unsupported(self):
        spec = ExplicitTable.from_entries(
            [((), 4), (("1",), 3), (("2",), 2), (("1", "2"), 2)], ["1", "2"]
        )
        problem = ResponseProblem.from_weights(spec, ["1/2", "1/2"])
        with pytest.raises(UnsupportedError):
            index_order(problem)

    def test_unknown_direction(self):
        problem = ResponseProblem.from_weights(Rescue.from_probabilities(["1/2", "1/3"]), [1, 0])
        with pytest.raises(InvalidArgumentError):
            index_order(problem, "sideways")


class TestBruteForce:
    def test_index_rule_is_optimal(self):
        rng = random.Random(43)
        for _ in range(60):
            n = rng.randint(2, 7)
            problem = ResponseProblem.from_weights(random_spec(rng, n), random_distribution(rng, n))
            for direction in ("maximize", "minimize"):
                _, best = best_response_bruteforce(problem, direction)
                assert response_payoff(problem, index_order(problem, direction)) == best

    def test_point_mass_returns_least_optimal_order(self):
        problem = ResponseProblem.from_weights(
            Rescue.from_probabilities(["1/2", "1/3", "1/4"]), [0, 1, 0]
        )
        order, best = best_response_bruteforce(problem)
        assert order == ("2", "1", "3")
        assert best == F(1, 3)

    def test_single_location(self):
        problem = ResponseProblem.from_weights(Rescue.from_probabilities(["1/2"]), [1])
        assert best_response_bruteforce(problem) == (("1",), F(1, 2))

    def test_cap(self):
        problem = ResponseProblem.from_weights(
            Rescue.from_probabilities(["1/2"] * 4), ["1/4"] * 4
        )
        with pytest.raises(ResourceLimitError):
            best_response_bruteforce(problem, cap=3)

    def test_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("RESCUE_GAMES_BRUTE_FORCE_CAP", "2")
        problem = ResponseProblem.from_weights(Rescue.from_probabilities(["1/2"] * 3), ["1/3"] * 3)
        with pytest.raises(ResourceLimitError):
            best_response_bruteforce(problem)


class TestInterchange:
    def test_moving_higher_index_earlier_increases_payoff(self):
        rng = random.Random(47)
        for _ in range(40):
            n = rng.randint(2, 6)
            problem = ResponseProblem.from_weights(random_spec(rng, n), random_distribution(rng, n))
            indices = index_values(problem)
            sigma = list(problem.spec.ids)
            rng.shuffle(sigma)
            for pos in range(n - 1):
                earlier, later = sigma[pos], sigma[pos + 1]
                delta = interchange_delta(problem, sigma, pos)
                if indices[later] > indices[earlier]:
                    assert delta > 0
                elif indices[later] == indices[earlier]:
                    assert delta == 0
                else:
                    assert delta < 0

    def test_position_out_of_range(self):
        problem = ResponseProblem.from_weights(Rescue.from_probabilities(["1/2", "1/3"]), [1, 0])
        with pytest.raises(InvalidArgumentError):
            interchange_delta(problem, ("1", "2"), 1)
