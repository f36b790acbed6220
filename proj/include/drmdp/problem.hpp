#pragma once

#include "drmdp/spaces.hpp"
#include "drmdp/transport.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace drmdp {

/// (state, action) -> distribution over next states.
///
/// Entries are filled one by one with set(); a kernel is only usable inside
/// a ProblemSpec once it is total, which build_problem checks.
class TransitionKernel {
public:
    TransitionKernel() = default;
    TransitionKernel(std::size_t num_states, std::size_t num_actions);

    /// Same distribution for every (state, action).
    static TransitionKernel constant(std::size_t num_states, std::size_t num_actions,
                                     const DiscreteDistribution& dist);

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_actions() const noexcept { return num_actions_; }

    void set(std::size_t state, std::size_t action, DiscreteDistribution dist);
    bool has(std::size_t state, std::size_t action) const;

    /// Throws Error(missing_kernel_entry) for an unset entry.
    const DiscreteDistribution& operator()(std::size_t state, std::size_t action) const;

    bool is_total() const;

    bool operator==(const TransitionKernel&) const = default;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::vector<std::optional<DiscreteDistribution>> table_;
};

/// Dense r(x, a, x') table.
class RewardTable {
public:
    RewardTable() = default;
    RewardTable(std::size_t num_states, std::size_t num_actions, double fill = 0.0);

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_actions() const noexcept { return num_actions_; }

    double operator()(std::size_t x, std::size_t a, std::size_t next) const {
        return values_[(x * num_actions_ + a) * num_states_ + next];
    }
    double& operator()(std::size_t x, std::size_t a, std::size_t next) {
        return values_[(x * num_actions_ + a) * num_states_ + next];
    }
    /// r(x, a, .) as a contiguous row over next states.
    std::span<const double> row(std::size_t x, std::size_t a) const {
        return std::span<const double>(values_).subspan((x * num_actions_ + a) * num_states_,
                                                        num_states_);
    }
    std::span<const double> values() const noexcept { return values_; }

    /// max |r|
    double max_abs() const noexcept;

    bool operator==(const RewardTable&) const = default;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    numvec values_;
};

/// Wasserstein order q and ball radius epsilon.
struct AmbiguityConfig {
    int q = 1;
    double epsilon = 0.0;

    /// epsilon^q, the transport budget of the ball.
    double budget() const;

    bool operator==(const AmbiguityConfig&) const = default;
};

/// Validated robust MDP instance. Immutable once built.
class ProblemSpec {
public:
    const StateSpace& states() const noexcept { return states_; }
    const ActionSpace& actions() const noexcept { return actions_; }
    const TransitionKernel& center() const noexcept { return center_; }
    const std::optional<TransitionKernel>& true_kernel() const noexcept { return true_kernel_; }
    /// The true kernel when present, the center otherwise.
    const TransitionKernel& nominal_kernel() const noexcept {
        return true_kernel_ ? *true_kernel_ : center_;
    }
    const RewardTable& reward() const noexcept { return reward_; }
    double alpha() const noexcept { return alpha_; }
    const AmbiguityConfig& ambiguity() const noexcept { return ambiguity_; }
    /// Ground cost matrix for the ambiguity order q.
    const CostMatrix& cost() const noexcept { return cost_; }

    std::size_t num_states() const noexcept { return states_.size(); }
    std::size_t num_actions() const noexcept { return actions_.size(); }

    bool operator==(const ProblemSpec&) const = default;

private:
    friend ProblemSpec build_problem(StateSpace, ActionSpace, TransitionKernel,
                                     std::optional<TransitionKernel>, RewardTable, double,
                                     AmbiguityConfig);

    StateSpace states_;
    ActionSpace actions_;
    TransitionKernel center_;
    std::optional<TransitionKernel> true_kernel_;
    RewardTable reward_;
    double alpha_ = 0.5;
    AmbiguityConfig ambiguity_;
    CostMatrix cost_;
};

/// Validates all parts and assembles a ProblemSpec.
///
/// Errors: dimension_mismatch (kernel/reward shape or distribution support
/// differs from the state space), missing_kernel_entry, invalid_reward
/// (non-finite entry), invalid_discount (alpha outside (0,1)),
/// invalid_ambiguity (q < 1 or epsilon < 0 or non-finite).
ProblemSpec build_problem(StateSpace states, ActionSpace actions, TransitionKernel center,
                          std::optional<TransitionKernel> true_kernel, RewardTable reward,
                          double alpha, AmbiguityConfig ambiguity);

/// Bin(n, p) over the states {0, ..., n} on the real line.
DiscreteDistribution binomial_distribution(int n, double p, const StateSpace& states);

/// Ten fair coins per round, bet on the next head count being larger (+1),
/// smaller (-1), or skip (0); r(x, a, x') = a 1{x < x'} - a 1{x > x'}.
/// Center and true kernel are both Bin(10, 0.5) for every (x, a).
ProblemSpec coin_toss_problem(double alpha, AmbiguityConfig ambiguity);

} // namespace drmdp
