#include "drmdp/problem.hpp"

#include "drmdp/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace drmdp {

namespace {

std::string pair_name(std::size_t x, std::size_t a) {
    return "(state " + std::to_string(x) + ", action " + std::to_string(a) + ")";
}

void validate_kernel(const TransitionKernel& kernel, std::size_t ns, std::size_t na,
                     const char* name) {
    if (kernel.num_states() != ns || kernel.num_actions() != na)
        throw Error(Errc::dimension_mismatch,
                    std::string(name) + " kernel has shape " + std::to_string(kernel.num_states()) +
                        "x" + std::to_string(kernel.num_actions()) + ", expected " +
                        std::to_string(ns) + "x" + std::to_string(na));
    for (std::size_t x = 0; x < ns; ++x)
        for (std::size_t a = 0; a < na; ++a) {
            if (!kernel.has(x, a))
                throw Error(Errc::missing_kernel_entry,
                            std::string(name) + " kernel has no entry for " + pair_name(x, a));
            if (kernel(x, a).size() != ns)
                throw Error(Errc::dimension_mismatch,
                            std::string(name) + " kernel entry " + pair_name(x, a) +
                                " has support size " + std::to_string(kernel(x, a).size()) +
                                ", expected " + std::to_string(ns));
        }
}

} // namespace

TransitionKernel::TransitionKernel(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), table_(num_states * num_actions) {}

TransitionKernel TransitionKernel::constant(std::size_t num_states, std::size_t num_actions,
                                            const DiscreteDistribution& dist) {
    TransitionKernel k(num_states, num_actions);
    for (auto& entry : k.table_)
        entry = dist;
    return k;
}

void TransitionKernel::set(std::size_t state, std::size_t action, DiscreteDistribution dist) {
    if (state >= num_states_ || action >= num_actions_)
        throw Error(Errc::dimension_mismatch, "kernel index " + pair_name(state, action) +
                                                  " out of range");
    table_[state * num_actions_ + action] = std::move(dist);
}

bool TransitionKernel::has(std::size_t state, std::size_t action) const {
    return state < num_states_ && action < num_actions_ &&
           table_[state * num_actions_ + action].has_value();
}

const DiscreteDistribution& TransitionKernel::operator()(std::size_t state,
                                                         std::size_t action) const {
    if (!has(state, action))
        throw Error(Errc::missing_kernel_entry, "kernel has no entry for " + pair_name(state, action));
    return *table_[state * num_actions_ + action];
}

bool TransitionKernel::is_total() const {
    for (const auto& e : table_)
        if (!e)
            return false;
    return true;
}

RewardTable::RewardTable(std::size_t num_states, std::size_t num_actions, double fill)
    : num_states_(num_states), num_actions_(num_actions),
      values_(num_states * num_actions * num_states, fill) {}

double RewardTable::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

double AmbiguityConfig::budget() const { return std::pow(epsilon, q); }

ProblemSpec build_problem(StateSpace states, ActionSpace actions, TransitionKernel center,
                          std::optional<TransitionKernel> true_kernel, RewardTable reward,
                          double alpha, AmbiguityConfig ambiguity) {
    const std::size_t ns = states.size();
    const std::size_t na = actions.size();
    if (ns == 0 || na == 0)
        throw Error(Errc::invalid_space, "state and action spaces must be nonempty");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(Errc::invalid_discount,
                    "discount must lie strictly in (0, 1), got " + std::to_string(alpha));
    if (ambiguity.q < 1)
        throw Error(Errc::invalid_ambiguity, "Wasserstein order q must be >= 1");
    if (!(ambiguity.epsilon >= 0.0) || !std::isfinite(ambiguity.epsilon))
        throw Error(Errc::invalid_ambiguity, "ball radius epsilon must be finite and >= 0");

    validate_kernel(center, ns, na, "center");
    if (true_kernel)
        validate_kernel(*true_kernel, ns, na, "true");

    if (reward.num_states() != ns || reward.num_actions() != na)
        throw Error(Errc::dimension_mismatch, "reward table shape does not match the spaces");
    for (double r : reward.values())
        if (!std::isfinite(r))
            throw Error(Errc::invalid_reward, "reward table contains a non-finite value");

    ProblemSpec p;
    p.cost_ = CostMatrix(states, ambiguity.q);
    p.states_ = std::move(states);
    p.actions_ = std::move(actions);
    p.center_ = std::move(center);
    p.true_kernel_ = std::move(true_kernel);
    p.reward_ = std::move(reward);
    p.alpha_ = alpha;
    p.ambiguity_ = ambiguity;
    return p;
}

DiscreteDistribution binomial_distribution(int n, double p, const StateSpace& states) {
    if (n < 1)
        throw Error(Errc::invalid_argument, "binomial: n must be positive");
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(Errc::invalid_argument, "binomial: p must lie in [0, 1]");
    if (states != integer_line(static_cast<std::size_t>(n)))
        throw Error(Errc::dimension_mismatch,
                    "binomial: state space must be the integers 0.." + std::to_string(n));

    numvec w(static_cast<std::size_t>(n) + 1);
    double binom = 1.0; // C(n, k), exact for the n used here
    for (int k = 0; k <= n; ++k) {
        w[static_cast<std::size_t>(k)] = binom * std::pow(p, k) * std::pow(1.0 - p, n - k);
        binom = binom * (n - k) / (k + 1);
    }
    return DiscreteDistribution(std::move(w));
}

ProblemSpec coin_toss_problem(double alpha, AmbiguityConfig ambiguity) {
    constexpr int coins = 10;
    StateSpace states = integer_line(coins);
    ActionSpace actions({{-1.0}, {0.0}, {1.0}});
    const std::size_t ns = states.size();
    const std::size_t na = actions.size();

    const auto bin = binomial_distribution(coins, 0.5, states);
    auto center = TransitionKernel::constant(ns, na, bin);
    auto truth = center;

    RewardTable reward(ns, na);
    for (std::size_t x = 0; x < ns; ++x)
        for (std::size_t a = 0; a < na; ++a) {
            const double bet = actions[a][0];
            for (std::size_t y = 0; y < ns; ++y)
                reward(x, a, y) = x < y ? bet : (x > y ? 0.0 - bet : 0.0);
        }

    return build_problem(std::move(states), std::move(actions), std::move(center),
                         std::move(truth), std::move(reward), alpha, ambiguity);
}

} // namespace drmdp
