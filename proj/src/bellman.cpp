#include "drmdp/bellman.hpp"

#include "drmdp/error.hpp"
#include "drmdp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace drmdp {

namespace {

void check_value(const ProblemSpec& problem, const ValueFunction& v) {
    if (v.size() != problem.num_states())
        throw Error(Errc::dimension_mismatch, "value function has " + std::to_string(v.size()) +
                                                  " entries, expected " +
                                                  std::to_string(problem.num_states()));
}

void check_kernel(const ProblemSpec& problem, const TransitionKernel& kernel) {
    if (kernel.num_states() != problem.num_states() ||
        kernel.num_actions() != problem.num_actions() || !kernel.is_total())
        throw Error(Errc::dimension_mismatch, "kernel does not cover the problem's state-action pairs");
}

/// r(x, a, .) + alpha v(.)
void fill_payoff(const ProblemSpec& problem, std::size_t x, std::size_t a, const ValueFunction& v,
                 numvec& payoff) {
    const auto r = problem.reward().row(x, a);
    payoff.resize(r.size());
    for (std::size_t y = 0; y < r.size(); ++y)
        payoff[y] = r[y] + problem.alpha() * v[y];
}

ValueFunction max_over_actions(const QFunction& q) { return greedy_value(q); }

} // namespace

double sup_distance(const ValueFunction& v, const ValueFunction& w) {
    if (v.size() != w.size())
        throw Error(Errc::dimension_mismatch, "sup_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        d = std::max(d, std::abs(v[i] - w[i]));
    return d;
}

ValueFunction greedy_value(const QFunction& q) {
    ValueFunction v(numvec(q.num_states, -std::numeric_limits<double>::infinity()));
    for (std::size_t x = 0; x < q.num_states; ++x)
        for (std::size_t a = 0; a < q.num_actions; ++a)
            v[x] = std::max(v[x], q(x, a));
    return v;
}

QFunction kernel_action_values(const ProblemSpec& problem, const TransitionKernel& kernel,
                               const ValueFunction& v) {
    check_value(problem, v);
    check_kernel(problem, kernel);
    QFunction q(problem.num_states(), problem.num_actions());
    numvec payoff;
    for (std::size_t x = 0; x < problem.num_states(); ++x)
        for (std::size_t a = 0; a < problem.num_actions(); ++a) {
            fill_payoff(problem, x, a, v, payoff);
            q(x, a) = kernel(x, a).expectation(payoff);
        }
    return q;
}

namespace {

QFunction robust_values_and_kernel(const ProblemSpec& problem, const ValueFunction& v,
                                   TransitionKernel* worst) {
    check_value(problem, v);
    const auto& amb = problem.ambiguity();
    QFunction q(problem.num_states(), problem.num_actions());
    numvec payoff;
    for (std::size_t x = 0; x < problem.num_states(); ++x)
        for (std::size_t a = 0; a < problem.num_actions(); ++a) {
            fill_payoff(problem, x, a, v, payoff);
            auto res = worst_case_expectation(payoff, problem.center()(x, a), amb.epsilon, amb.q,
                                              problem.cost());
            q(x, a) = res.value;
            if (worst)
                worst->set(x, a, std::move(res.worst_case));
        }
    return q;
}

} // namespace

QFunction robust_action_values(const ProblemSpec& problem, const ValueFunction& v) {
    return robust_values_and_kernel(problem, v, nullptr);
}

ValueFunction nominal_bellman_apply(const ProblemSpec& problem, const TransitionKernel& kernel,
                                    const ValueFunction& v) {
    return max_over_actions(kernel_action_values(problem, kernel, v));
}

ValueFunction fixed_kernel_bellman_apply(const ProblemSpec& problem,
                                         const TransitionKernel& kernel, const ValueFunction& v) {
    return nominal_bellman_apply(problem, kernel, v);
}

RobustSweep robust_bellman_apply(const ProblemSpec& problem, const ValueFunction& v) {
    RobustSweep out;
    out.worst_kernel = TransitionKernel(problem.num_states(), problem.num_actions());
    out.value = max_over_actions(robust_values_and_kernel(problem, v, &out.worst_kernel));
    return out;
}

ValueFunction bellman_apply(const ProblemSpec& problem, const OperatorMode& mode,
                            const ValueFunction& v) {
    switch (mode.kind()) {
    case OperatorMode::Kind::nominal:
        return nominal_bellman_apply(problem, problem.nominal_kernel(), v);
    case OperatorMode::Kind::robust:
        return max_over_actions(robust_action_values(problem, v));
    case OperatorMode::Kind::fixed:
        return fixed_kernel_bellman_apply(problem, mode.kernel(), v);
    }
    return v;
}

FixedPointReport value_iteration(const ProblemSpec& problem, const OperatorMode& mode,
                                 std::optional<ValueFunction> v0, double tol,
                                 std::size_t max_iter) {
    if (!(tol > 0.0))
        throw Error(Errc::invalid_argument, "value_iteration: tol must be positive");
    FixedPointReport report;
    report.value = v0 ? std::move(*v0) : ValueFunction::zeros(problem.num_states());
    check_value(problem, report.value);

    const double alpha = problem.alpha();
    const double threshold = tol * (1.0 - alpha) / (2.0 * alpha);
    while (report.iterations < max_iter) {
        ValueFunction next = bellman_apply(problem, mode, report.value);
        report.residual = sup_distance(next, report.value);
        report.residual_history.push_back(report.residual);
        report.value = std::move(next);
        ++report.iterations;
        if (report.residual <= threshold) {
            report.converged = true;
            break;
        }
    }
    return report;
}

Policy extract_policy(const ProblemSpec& problem, const OperatorMode& mode,
                      const ValueFunction& v) {
    QFunction q;
    switch (mode.kind()) {
    case OperatorMode::Kind::nominal: q = kernel_action_values(problem, problem.nominal_kernel(), v); break;
    case OperatorMode::Kind::robust: q = robust_action_values(problem, v); break;
    case OperatorMode::Kind::fixed: q = kernel_action_values(problem, mode.kernel(), v); break;
    }
    Policy pol;
    pol.action_index.resize(problem.num_states());
    for (std::size_t x = 0; x < problem.num_states(); ++x) {
        std::size_t best = 0;
        for (std::size_t a = 1; a < problem.num_actions(); ++a)
            if (q(x, a) > q(x, best))
                best = a;
        pol.action_index[x] = best;
    }
    return pol;
}

TransitionKernel extract_worst_case_kernel(const ProblemSpec& problem,
                                           const ValueFunction& v_star) {
    return robust_bellman_apply(problem, v_star).worst_kernel;
}

} // namespace drmdp
