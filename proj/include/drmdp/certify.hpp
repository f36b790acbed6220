#pragma once

#include "drmdp/problem.hpp"

#include <optional>

namespace drmdp {

struct LipschitzEstimates {
    double reward = 0.0;        ///< L_r
    double true_kernel = 0.0;   ///< L_P
    double center_kernel = 0.0; ///< L of the center kernel
};

/// Caller-supplied constants that replace the enumerated ones.
struct LipschitzOverrides {
    std::optional<double> reward;
    std::optional<double> true_kernel;
    std::optional<double> center_kernel;
};

struct CertifyOptions {
    LipschitzOverrides overrides;
    /// Evaluate C_P with the unbounded-reward formula.
    bool force_unbounded_formula = false;
};

struct CertificateReport {
    LipschitzEstimates estimates;
    LipschitzOverrides overrides_applied;
    double c_p = 1.0;
    bool alpha_ok = false;       ///< alpha < 1 / C_P
    bool contraction_ok = false; ///< alpha L_P < 1
    bool membership_ok = false;  ///< true kernel inside every ball
    double max_membership_distance = 0.0;
    bool centered = false;       ///< true kernel equals the center
    bool true_kernel_assumed = false; ///< no true kernel given; center used in its place
    double bound = 0.0;          ///< +inf when !contraction_ok

    bool all_ok() const noexcept { return alpha_ok && contraction_ok && membership_ok; }
};

/// Exact max over distinct triples of |r(x,a,x') - r(y,b,y')| divided by
/// ||x - y|| + ||a - b|| + ||x' - y'||.
double estimate_reward_lipschitz(const ProblemSpec& problem);

/// Exact max over distinct (x, a) != (x', a') of
/// d_{W_q}(kernel(x,a), kernel(x',a')) / (||x - x'|| + ||a - a'||).
double estimate_kernel_lipschitz(const TransitionKernel& kernel, int q, const CostMatrix& cost,
                                 const StateSpace& states, const ActionSpace& actions);

struct MembershipCheck {
    bool ok = false;
    double max_distance = 0.0;
};

/// Whether every true-kernel entry lies within epsilon (+1e-9) of the center.
/// Throws Error(missing_true_kernel) when the problem has none.
MembershipCheck check_membership(const ProblemSpec& problem);

/// Growth constant of the discount assumption. Finite problems have bounded
/// reward, so the default is 1; force_unbounded_formula evaluates
/// max{1 + eps + sup_a min_x (E_{center(x,a)}||z|| + L_center ||x||), L_center}.
double compute_c_p(const ProblemSpec& problem, double center_lipschitz,
                   bool force_unbounded_formula = false);

/// sum_{i>=0} alpha^i sum_{j<=i} L^j = 1 / ((1 - alpha)(1 - alpha L)).
/// Throws Error(divergent_series) when alpha L >= 1.
double double_series_sum(double alpha, double lipschitz);

/// (2 - centered) L_r eps (1 + alpha) double_series_sum(alpha, L_P).
double theorem_bound(double reward_lipschitz, double kernel_lipschitz, double alpha,
                     double epsilon, bool centered);

/// Partial version used for the per-iterate checks:
/// (2 - centered) L_r eps (1 + alpha) sum_{i<n} alpha^i sum_{j<=i} L_P^j.
double iterate_gap_bound(double reward_lipschitz, double kernel_lipschitz, double alpha,
                         double epsilon, bool centered, std::size_t n);

/// Lipschitz constant of the n-th nominal iterate of an L_r-Lipschitz start:
/// L_r (1 + L_P (1 + alpha) sum_{i<n} (alpha L_P)^i).
double iterate_lipschitz_bound(double reward_lipschitz, double kernel_lipschitz, double alpha,
                               std::size_t n);

/// Runs all estimators and checks and evaluates the value-gap bound.
CertificateReport certify(const ProblemSpec& problem, const CertifyOptions& options = {});

} // namespace drmdp
