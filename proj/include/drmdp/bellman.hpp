#pragma once

#include "drmdp/problem.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace drmdp {

struct ValueFunction {
    numvec values;

    ValueFunction() = default;
    explicit ValueFunction(numvec v) : values(std::move(v)) {}
    static ValueFunction zeros(std::size_t n) { return ValueFunction(numvec(n, 0.0)); }

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    bool operator==(const ValueFunction&) const = default;
};

/// ||v - w||_inf
double sup_distance(const ValueFunction& v, const ValueFunction& w);

struct QFunction {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    numvec values; ///< row-major [state][action]

    QFunction() = default;
    QFunction(std::size_t states, std::size_t actions, double fill = 0.0)
        : num_states(states), num_actions(actions), values(states * actions, fill) {}

    double operator()(std::size_t x, std::size_t a) const { return values[x * num_actions + a]; }
    double& operator()(std::size_t x, std::size_t a) { return values[x * num_actions + a]; }

    bool operator==(const QFunction&) const = default;
};

/// max_a Q(x, a) per state.
ValueFunction greedy_value(const QFunction& q);

struct Policy {
    std::vector<std::size_t> action_index;
};

/// Which Bellman operator to iterate.
class OperatorMode {
public:
    enum class Kind { nominal, robust, fixed };

    /// T^true with the problem's nominal kernel (true kernel, else center).
    static OperatorMode nominal() { return OperatorMode(Kind::nominal, std::nullopt); }
    /// Robust operator over the Wasserstein balls around the center.
    static OperatorMode robust() { return OperatorMode(Kind::robust, std::nullopt); }
    /// Expectation under a caller-supplied kernel.
    static OperatorMode fixed(TransitionKernel kernel) {
        return OperatorMode(Kind::fixed, std::move(kernel));
    }

    Kind kind() const noexcept { return kind_; }
    const TransitionKernel& kernel() const { return *kernel_; }

private:
    OperatorMode(Kind k, std::optional<TransitionKernel> kernel)
        : kind_(k), kernel_(std::move(kernel)) {}

    Kind kind_;
    std::optional<TransitionKernel> kernel_;
};

struct FixedPointReport {
    ValueFunction value;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
    /// Sup-norm residual of every sweep, in order.
    numvec residual_history;
};

/// Q(x, a) = E_{kernel(x,a)}[r(x, a, .) + alpha v(.)]
QFunction kernel_action_values(const ProblemSpec& problem, const TransitionKernel& kernel,
                               const ValueFunction& v);

/// Q(x, a) = min over the ball around center(x, a) of E[r(x, a, .) + alpha v(.)]
QFunction robust_action_values(const ProblemSpec& problem, const ValueFunction& v);

ValueFunction nominal_bellman_apply(const ProblemSpec& problem, const TransitionKernel& kernel,
                                    const ValueFunction& v);

/// Identical to nominal_bellman_apply; named for the role of the kernel
/// (typically a worst-case kernel extracted from the robust fixed point).
ValueFunction fixed_kernel_bellman_apply(const ProblemSpec& problem,
                                         const TransitionKernel& kernel,
                                         const ValueFunction& v);

struct RobustSweep {
    ValueFunction value;
    TransitionKernel worst_kernel; ///< inner minimizer for every (x, a)
};

RobustSweep robust_bellman_apply(const ProblemSpec& problem, const ValueFunction& v);

/// One application of the operator selected by mode.
ValueFunction bellman_apply(const ProblemSpec& problem, const OperatorMode& mode,
                            const ValueFunction& v);

/// Iterates until the sup-norm residual drops to tol (1 - alpha) / (2 alpha),
/// which keeps the returned value within tol/2 of the fixed point, or until
/// max_iter sweeps. A run that hits max_iter comes back with converged = false.
FixedPointReport value_iteration(const ProblemSpec& problem, const OperatorMode& mode,
                                 std::optional<ValueFunction> v0 = std::nullopt,
                                 double tol = 1e-9, std::size_t max_iter = 100000);

/// Greedy action per state for the nominal or robust operator; ties go to
/// the lowest action index.
Policy extract_policy(const ProblemSpec& problem, const OperatorMode& mode,
                      const ValueFunction& v);

/// Inner minimizer of the robust operator at v_star for every (x, a).
TransitionKernel extract_worst_case_kernel(const ProblemSpec& problem,
                                           const ValueFunction& v_star);

} // namespace drmdp
