#pragma once

#include "drmdp/spaces.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace drmdp {

/// Ground cost ||x_i - x_j||^q between all pairs of states, row-major.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(const StateSpace& states, int q);

    std::size_t size() const noexcept { return n_; }
    int order() const noexcept { return q_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(entries_).subspan(i * n_, n_);
    }

    /// Smallest off-diagonal entry; 0 for a single state.
    double min_positive() const noexcept { return min_positive_; }
    /// Largest entry.
    double max_entry() const noexcept { return max_entry_; }

    bool operator==(const CostMatrix&) const = default;

private:
    std::size_t n_ = 0;
    int q_ = 1;
    numvec entries_;
    double min_positive_ = 0.0;
    double max_entry_ = 0.0;
};

/// Transport plan between two distributions.
struct Coupling {
    std::size_t n = 0;
    numvec plan; ///< row-major n x n masses
    double cost = 0.0;

    double operator()(std::size_t i, std::size_t j) const { return plan[i * n + j]; }
};

/// Minimal transport plan between p1 (rows) and p2 (columns).
///
/// Solved exactly as a min-cost flow on the dense bipartite graph with
/// successive shortest paths (Dijkstra on reduced costs).
Coupling optimal_coupling(const DiscreteDistribution& p1, const DiscreteDistribution& p2,
                          const CostMatrix& cost);

/// q-Wasserstein distance: the q-th root of the optimal transport cost.
double wasserstein_distance(const DiscreteDistribution& p1, const DiscreteDistribution& p2,
                            int q, const CostMatrix& cost);

struct RobustExpectationResult {
    double value = 0.0;                ///< worst-case expected payoff
    DiscreteDistribution worst_case;   ///< attaining distribution
    double multiplier = 0.0;           ///< optimal Lagrange multiplier of the budget row
    double budget_used = 0.0;          ///< transport cost of the attaining plan
};

/// min { E_Q[payoff] : d_{W_q}(Q, reference) <= epsilon }.
///
/// The inner problem is a transport LP with a single budget row
/// sum_ij plan_ij * cost_ij <= epsilon^q. For a fixed source i every
/// destination j is a point (cost_ij, payoff_j); the cheapest way to lower
/// the payoff of that row walks along the lower convex hull of those points,
/// starting at (0, payoff_i). Merging the hull edges of all rows by slope and
/// spending the budget greedily (fractional knapsack) gives the exact
/// optimum; the slope of the marginal edge is the optimal multiplier.
///
/// Ties between destinations prefer lower cost, then lower index.
RobustExpectationResult worst_case_expectation(std::span<const double> payoff,
                                               const DiscreteDistribution& reference,
                                               double epsilon, int q, const CostMatrix& cost);

struct InnerDualSolution {
    double lambda = 0.0;
    double dual_value = 0.0;
};

/// Lagrangian dual of the inner problem,
///   max_{lambda >= 0} sum_i ref_i min_j (payoff_j + lambda cost_ij) - lambda budget,
/// maximized by bisection on the supergradient. budget == 0 short-circuits
/// to the nominal expectation.
InnerDualSolution solve_inner_dual(std::span<const double> payoff,
                                   const DiscreteDistribution& reference, double budget,
                                   const CostMatrix& cost);

/// Value of the dual function at a given multiplier.
double inner_dual_objective(std::span<const double> payoff,
                            const DiscreteDistribution& reference, double budget,
                            const CostMatrix& cost, double lambda);

} // namespace drmdp
