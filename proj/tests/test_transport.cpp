#include "drmdp/error.hpp"
#include "drmdp/transport.hpp"

#include "oracle/dense_lp.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace drmdp;
using drmdp::testing::rng_t;

namespace {

DiscreteDistribution dist(numvec w) { return DiscreteDistribution(std::move(w)); }

void check_coupling(const Coupling& c, const DiscreteDistribution& p1,
                    const DiscreteDistribution& p2) {
    const std::size_t n = c.n;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(c(i, j) >= 0.0);
            row += c(i, j);
            col += c(j, i);
        }
        CHECK(std::abs(row - p1[i]) <= 1e-9);
        CHECK(std::abs(col - p2[i]) <= 1e-9);
    }
}

} // namespace

TEST_SUITE("transport") {

TEST_CASE("cost matrix is the q-th power of the Euclidean distance") {
    const StateSpace s({{0.0, 0.0}, {3.0, 4.0}, {1.0, 0.0}});
    const CostMatrix c1(s, 1), c2(s, 2);
    CHECK(c1(0, 1) == doctest::Approx(5.0));
    CHECK(c2(0, 1) == doctest::Approx(25.0));
    CHECK(c1(1, 0) == c1(0, 1));
    CHECK(c1(2, 2) == 0.0);
    CHECK(c1.min_positive() == doctest::Approx(1.0));
    CHECK_THROWS_AS(CostMatrix(s, 0), Error);
}

TEST_CASE("wasserstein distance of identical distributions is zero") {
    const auto s = integer_line(4);
    const CostMatrix c(s, 1);
    const auto p = dist({0.1, 0.2, 0.3, 0.0, 0.4});
    CHECK(wasserstein_distance(p, p, 1, c) == 0.0);
    const auto plan = optimal_coupling(p, p, c);
    CHECK(plan.cost == doctest::Approx(0.0).epsilon(1e-15));
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(plan(i, i) == doctest::Approx(p[i]));
}

TEST_CASE("point masses on the line: single forced coupling") {
    const auto s = integer_line(3);
    const CostMatrix c(s, 1);
    const auto d0 = DiscreteDistribution::point_mass(4, 0);
    const auto d3 = DiscreteDistribution::point_mass(4, 3);
    CHECK(wasserstein_distance(d0, d3, 1, c) == doctest::Approx(3.0));
    const auto plan = optimal_coupling(d0, d3, c);
    CHECK(plan(0, 3) == doctest::Approx(1.0));
    double others = 0.0;
    for (std::size_t k = 0; k < plan.plan.size(); ++k)
        if (k != 3)
            others += plan.plan[k];
    CHECK(others == 0.0);
}

TEST_CASE("half mass moved one step") {
    const auto s = integer_line(1);
    const CostMatrix c(s, 1);
    const auto p1 = dist({0.5, 0.5});
    const auto p2 = DiscreteDistribution::point_mass(2, 1);
    // Oracle first: the brute-force LP fixes the expected value.
    const double expected =
        static_cast<double>(oracle::transport_cost_lp({0.5, 0.5}, {0.0, 1.0}, testing::dense_cost(c)));
    CHECK(expected == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(wasserstein_distance(p1, p2, 1, c) == doctest::Approx(0.5).epsilon(1e-15));
    const auto plan = optimal_coupling(p1, p2, c);
    CHECK(plan(0, 1) == doctest::Approx(0.5));
    CHECK(plan(1, 1) == doctest::Approx(0.5));
    CHECK(plan.cost == doctest::Approx(0.5));
}

TEST_CASE("quadratic cost prefers the monotone plan over keeping shared mass") {
    // Keeping the shared half at 1 would cost 0.5 * 4; shifting both halves costs 1.
    const auto s = integer_line(2);
    const CostMatrix c(s, 2);
    const auto p1 = dist({0.5, 0.5, 0.0});
    const auto p2 = dist({0.0, 0.5, 0.5});
    CHECK(optimal_coupling(p1, p2, c).cost == doctest::Approx(1.0));
    CHECK(wasserstein_distance(p1, p2, 2, c) == doctest::Approx(1.0));
}

TEST_CASE("size and order mismatches are rejected") {
    const CostMatrix c(integer_line(2), 1);
    CHECK_THROWS_AS(wasserstein_distance(dist({0.5, 0.5}), dist({0.2, 0.3, 0.5}), 1, c), Error);
    CHECK_THROWS_AS(wasserstein_distance(dist({0.2, 0.3, 0.5}), dist({0.3, 0.2, 0.5}), 2, c), Error);
    const numvec payoff{1.0, 2.0};
    CHECK_THROWS_AS(worst_case_expectation(payoff, dist({0.2, 0.3, 0.5}), 0.1, 1, c), Error);
}

TEST_CASE("coupling marginals and cost agree with the distance") {
    rng_t rng(7);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = testing::pick(rng, 1, 8);
        const int q = static_cast<int>(testing::pick(rng, 1, 2));
        const auto s = testing::random_states(rng, n);
        const CostMatrix c(s, q);
        const auto p1 = testing::random_distribution(rng, n);
        const auto p2 = testing::random_distribution(rng, n);
        const auto plan = optimal_coupling(p1, p2, c);
        check_coupling(plan, p1, p2);
        CHECK(std::abs(plan.cost - std::pow(wasserstein_distance(p1, p2, q, c), q)) <= 1e-9);
    }
}

TEST_CASE("wasserstein distance matches the brute-force LP") {
    rng_t rng(11);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = testing::pick(rng, 1, 8);
        const int q = static_cast<int>(testing::pick(rng, 1, 2));
        const CostMatrix c(testing::random_states(rng, n), q);
        const auto w1 = testing::random_weights(rng, n);
        const auto w2 = testing::random_weights(rng, n);
        const double lp = static_cast<double>(
            oracle::transport_cost_lp(w1, w2, testing::dense_cost(c)));
        const double got = optimal_coupling(dist(w1), dist(w2), c).cost;
        CHECK(std::abs(got - lp) <= 1e-8);
    }
}

TEST_CASE("metric axioms and order monotonicity") {
    rng_t rng(13);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = testing::pick(rng, 2, 8);
        const auto s = testing::random_states(rng, n);
        const CostMatrix c1(s, 1), c2(s, 2);
        const auto a = testing::random_distribution(rng, n);
        const auto b = testing::random_distribution(rng, n);
        const auto d = testing::random_distribution(rng, n);
        for (const auto* c : {&c1, &c2}) {
            const int q = c->order();
            const double ab = wasserstein_distance(a, b, q, *c);
            CHECK(ab >= 0.0);
            CHECK(std::abs(ab - wasserstein_distance(b, a, q, *c)) <= 1e-10);
            CHECK(wasserstein_distance(a, d, q, *c) <=
                  ab + wasserstein_distance(b, d, q, *c) + 1e-8);
        }
        CHECK(wasserstein_distance(a, b, 1, c1) <= wasserstein_distance(a, b, 2, c2) + 1e-10);
    }
}

TEST_CASE("worst-case expectation: zero radius returns the reference") {
    const CostMatrix c(integer_line(2), 1);
    const auto ref = dist({0.2, 0.5, 0.3});
    const numvec payoff{1.0, -2.0, 4.0};
    const auto r = worst_case_expectation(payoff, ref, 0.0, 1, c);
    CHECK(r.value == doctest::Approx(0.2 - 1.0 + 1.2));
    CHECK(r.worst_case == ref);
    CHECK(r.budget_used == 0.0);
}

TEST_CASE("worst-case expectation of a constant payoff is the constant") {
    rng_t rng(17);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = testing::pick(rng, 1, 8);
        const CostMatrix c(testing::random_states(rng, n), 1);
        const numvec payoff(n, 3.25);
        const auto r = worst_case_expectation(payoff, testing::random_distribution(rng, n),
                                              testing::uniform(rng, 0.0, 5.0), 1, c);
        CHECK(r.value == doctest::Approx(3.25));
    }
}

TEST_CASE("worst-case expectation: point mass moved one step") {
    const CostMatrix c(integer_line(2), 1);
    const auto ref = DiscreteDistribution::point_mass(3, 0);
    const numvec payoff{0.0, -1.0, -1.5};
    const double lp = static_cast<double>(oracle::budgeted_expectation_lp(
        payoff, {1.0, 0.0, 0.0}, testing::dense_cost(c), 1.0));
    CHECK(lp == doctest::Approx(-1.0).epsilon(1e-14));

    const auto r = worst_case_expectation(payoff, ref, 1.0, 1, c);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.worst_case == DiscreteDistribution::point_mass(3, 1));
    CHECK(r.budget_used <= 1.0 + 1e-12);

    const auto d = solve_inner_dual(payoff, ref, 1.0, c);
    CHECK(d.dual_value == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(d.lambda >= 0.0);
}

TEST_CASE("dual: a budget that reaches the global minimum gives lambda 0") {
    const CostMatrix c(integer_line(3), 1);
    const auto ref = dist({0.25, 0.25, 0.25, 0.25});
    const numvec payoff{2.0, 1.0, -3.0, 0.5};
    // Moving everything to state 2 costs 0.25 * (2 + 1 + 0 + 1) = 1.
    const auto d = solve_inner_dual(payoff, ref, 5.0, c);
    CHECK(d.lambda == 0.0);
    CHECK(d.dual_value == doctest::Approx(-3.0));
    const auto r = worst_case_expectation(payoff, ref, 5.0, 1, c);
    CHECK(r.value == doctest::Approx(-3.0));
    CHECK(r.multiplier == 0.0);
    CHECK(r.worst_case == DiscreteDistribution::point_mass(4, 2));
}

TEST_CASE("dual: zero budget is the nominal expectation") {
    const CostMatrix c(integer_line(2), 1);
    const auto ref = dist({0.2, 0.5, 0.3});
    const numvec payoff{1.0, -2.0, 4.0};
    CHECK(solve_inner_dual(payoff, ref, 0.0, c).dual_value == doctest::Approx(ref.expectation(payoff)));
}

TEST_CASE("ties go to the cheapest destination") {
    // States 0, 1, 2 on the line; from 0, destinations 1 and 2 both give the
    // same payoff, so the mass must stop at 1.
    const CostMatrix c(integer_line(2), 1);
    const auto ref = DiscreteDistribution::point_mass(3, 0);
    const numvec payoff{0.0, -1.0, -1.0};
    const auto r = worst_case_expectation(payoff, ref, 5.0, 1, c);
    CHECK(r.value == doctest::Approx(-1.0));
    CHECK(r.worst_case == DiscreteDistribution::point_mass(3, 1));
    CHECK(r.budget_used == doctest::Approx(1.0));
}

TEST_CASE("worst-case expectation: properties on random instances") {
    rng_t rng(19);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = testing::pick(rng, 1, 8);
        const int q = static_cast<int>(testing::pick(rng, 1, 2));
        const CostMatrix c(testing::random_states(rng, n), q);
        const auto ref = testing::random_distribution(rng, n);
        numvec payoff(n);
        for (auto& f : payoff)
            f = testing::uniform(rng, -2.0, 2.0);
        const double diameter = std::pow(c.max_entry(), 1.0 / q);
        const double eps = testing::uniform(rng, 0.0, diameter);

        const auto r = worst_case_expectation(payoff, ref, eps, q, c);
        const double budget = std::pow(eps, q);
        CHECK(r.budget_used <= budget + 1e-9);
        CHECK(r.multiplier >= 0.0);
        CHECK(r.value <= ref.expectation(payoff) + 1e-12);
        CHECK(std::abs(r.value - r.worst_case.expectation(payoff)) <= 1e-12);
        CHECK(wasserstein_distance(r.worst_case, ref, q, c) <= eps + 1e-7);

        const auto d = solve_inner_dual(payoff, ref, budget, c);
        CHECK(std::abs(d.dual_value - r.value) <= 1e-8);
        // The reported multiplier is dual-optimal as well.
        CHECK(std::abs(inner_dual_objective(payoff, ref, budget, c, r.multiplier) - r.value) <= 1e-8);

        const auto smaller = worst_case_expectation(payoff, ref, eps * 0.5, q, c);
        CHECK(smaller.value >= r.value - 1e-12);
    }
}

TEST_CASE("worst-case expectation matches the brute-force budgeted LP") {
    rng_t rng(23);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = testing::pick(rng, 1, 8);
        const int q = static_cast<int>(testing::pick(rng, 1, 2));
        const CostMatrix c(testing::random_states(rng, n), q);
        const auto w = testing::random_weights(rng, n);
        numvec payoff(n);
        for (auto& f : payoff)
            f = testing::uniform(rng, -2.0, 2.0);
        const double eps = testing::uniform(rng, 0.0, std::pow(c.max_entry(), 1.0 / q));
        const double lp = static_cast<double>(oracle::budgeted_expectation_lp(
            payoff, w, testing::dense_cost(c), std::pow(eps, q)));
        CHECK(std::abs(worst_case_expectation(payoff, dist(w), eps, q, c).value - lp) <= 1e-8);
    }
}

} // TEST_SUITE
