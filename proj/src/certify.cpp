#include "drmdp/certify.hpp"

#include "drmdp/error.hpp"
#include "drmdp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace drmdp {

namespace {

// Kernels built bitwise (the coin toss) or within round-off of each other
// count as the same kernel for the centered bound.
constexpr double centered_tolerance = 1e-12;
constexpr double membership_slack = 1e-9;

} // namespace

double estimate_reward_lipschitz(const ProblemSpec& problem) {
    const auto& states = problem.states();
    const auto& actions = problem.actions();
    const auto& reward = problem.reward();
    const std::size_t ns = problem.num_states();
    const std::size_t na = problem.num_actions();

    numvec ds(ns * ns), da(na * na);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < ns; ++j)
            ds[i * ns + j] = states.distance(i, j);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            da[i * na + j] = actions.distance(i, j);

    // Triples (x, a, y) flattened in the reward table's own order.
    const std::size_t total = ns * na * ns;
    const auto values = reward.values();
    double best = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
        const std::size_t x = t / (na * ns);
        const std::size_t a = (t / ns) % na;
        const std::size_t y = t % ns;
        for (std::size_t u = t + 1; u < total; ++u) {
            const double gap = std::abs(values[t] - values[u]);
            if (gap == 0.0)
                continue;
            const std::size_t x2 = u / (na * ns);
            const std::size_t a2 = (u / ns) % na;
            const std::size_t y2 = u % ns;
            const double denom = ds[x * ns + x2] + da[a * na + a2] + ds[y * ns + y2];
            best = std::max(best, gap / denom);
        }
    }
    return best;
}

double estimate_kernel_lipschitz(const TransitionKernel& kernel, int q, const CostMatrix& cost,
                                 const StateSpace& states, const ActionSpace& actions) {
    const std::size_t ns = states.size();
    const std::size_t na = actions.size();
    if (kernel.num_states() != ns || kernel.num_actions() != na)
        throw Error(Errc::dimension_mismatch, "estimate_kernel_lipschitz: kernel shape mismatch");
    const std::size_t pairs = ns * na;
    double best = 0.0;
    for (std::size_t s = 0; s < pairs; ++s) {
        const std::size_t x = s / na, a = s % na;
        const auto& p = kernel(x, a);
        for (std::size_t t = s + 1; t < pairs; ++t) {
            const std::size_t x2 = t / na, a2 = t % na;
            const auto& p2 = kernel(x2, a2);
            if (p == p2)
                continue;
            const double w = wasserstein_distance(p, p2, q, cost);
            best = std::max(best, w / (states.distance(x, x2) + actions.distance(a, a2)));
        }
    }
    return best;
}

MembershipCheck check_membership(const ProblemSpec& problem) {
    if (!problem.true_kernel())
        throw Error(Errc::missing_true_kernel, "membership check needs a true kernel");
    const auto& truth = *problem.true_kernel();
    const auto& amb = problem.ambiguity();
    MembershipCheck out;
    for (std::size_t x = 0; x < problem.num_states(); ++x)
        for (std::size_t a = 0; a < problem.num_actions(); ++a)
            out.max_distance = std::max(out.max_distance,
                                        wasserstein_distance(truth(x, a), problem.center()(x, a),
                                                             amb.q, problem.cost()));
    out.ok = out.max_distance <= amb.epsilon + membership_slack;
    return out;
}

double compute_c_p(const ProblemSpec& problem, double center_lipschitz,
                   bool force_unbounded_formula) {
    if (!force_unbounded_formula)
        return 1.0;
    const auto& states = problem.states();
    numvec norms(problem.num_states());
    for (std::size_t z = 0; z < norms.size(); ++z)
        norms[z] = states.norm(z);

    double sup_a = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < problem.num_actions(); ++a) {
        double inf_x = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < problem.num_states(); ++x)
            inf_x = std::min(inf_x, problem.center()(x, a).expectation(norms) +
                                        center_lipschitz * norms[x]);
        sup_a = std::max(sup_a, inf_x);
    }
    return std::max(1.0 + problem.ambiguity().epsilon + sup_a, center_lipschitz);
}

double double_series_sum(double alpha, double lipschitz) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(Errc::invalid_discount, "double_series_sum: alpha must lie in (0, 1)");
    if (!(lipschitz >= 0.0))
        throw Error(Errc::invalid_argument, "double_series_sum: Lipschitz constant must be >= 0");
    if (alpha * lipschitz >= 1.0)
        throw Error(Errc::divergent_series,
                    "series diverges: alpha * L_P = " + std::to_string(alpha * lipschitz) + " >= 1");
    // sum_i alpha^i (1 - L^{i+1}) / (1 - L) simplifies to this for every L,
    // including L = 1 where it reads 1 / (1 - alpha)^2.
    return 1.0 / ((1.0 - alpha) * (1.0 - alpha * lipschitz));
}

double theorem_bound(double reward_lipschitz, double kernel_lipschitz, double alpha,
                     double epsilon, bool centered) {
    if (!(reward_lipschitz >= 0.0) || !(epsilon >= 0.0))
        throw Error(Errc::invalid_argument, "theorem_bound: constants must be >= 0");
    const double series = double_series_sum(alpha, kernel_lipschitz);
    if (epsilon == 0.0)
        return 0.0;
    const double factor = centered ? 1.0 : 2.0;
    return factor * reward_lipschitz * epsilon * (1.0 + alpha) * series;
}

double iterate_gap_bound(double reward_lipschitz, double kernel_lipschitz, double alpha,
                         double epsilon, bool centered, std::size_t n) {
    // term_i = alpha^i sum_{j<=i} L^j; term_{i+1} = alpha term_i + (alpha L)^{i+1}
    double outer = 0.0;
    double term = 1.0;
    double ratio = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        outer += term;
        ratio *= alpha * kernel_lipschitz;
        term = alpha * term + ratio;
    }
    return (centered ? 1.0 : 2.0) * reward_lipschitz * epsilon * (1.0 + alpha) * outer;
}

double iterate_lipschitz_bound(double reward_lipschitz, double kernel_lipschitz, double alpha,
                               std::size_t n) {
    double sum = 0.0;
    double term = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += term;
        term *= alpha * kernel_lipschitz;
    }
    return reward_lipschitz * (1.0 + kernel_lipschitz * (1.0 + alpha) * sum);
}

CertificateReport certify(const ProblemSpec& problem, const CertifyOptions& options) {
    CertificateReport rep;
    const auto& ov = options.overrides;
    rep.overrides_applied = ov;
    const int q = problem.ambiguity().q;

    rep.true_kernel_assumed = !problem.true_kernel().has_value();
    const TransitionKernel& truth = problem.nominal_kernel();

    rep.estimates.reward = ov.reward ? *ov.reward : estimate_reward_lipschitz(problem);
    rep.estimates.center_kernel =
        ov.center_kernel ? *ov.center_kernel
                         : estimate_kernel_lipschitz(problem.center(), q, problem.cost(),
                                                     problem.states(), problem.actions());
    if (ov.true_kernel)
        rep.estimates.true_kernel = *ov.true_kernel;
    else if (truth == problem.center() && !ov.center_kernel)
        rep.estimates.true_kernel = rep.estimates.center_kernel;
    else
        rep.estimates.true_kernel = estimate_kernel_lipschitz(truth, q, problem.cost(),
                                                              problem.states(), problem.actions());

    rep.c_p = compute_c_p(problem, rep.estimates.center_kernel, options.force_unbounded_formula);
    rep.alpha_ok = problem.alpha() < 1.0 / rep.c_p;
    rep.contraction_ok = problem.alpha() * rep.estimates.true_kernel < 1.0;

    if (rep.true_kernel_assumed) {
        rep.membership_ok = true;
        rep.max_membership_distance = 0.0;
        rep.centered = true;
    } else {
        const auto m = check_membership(problem);
        rep.membership_ok = m.ok;
        rep.max_membership_distance = m.max_distance;
        rep.centered = truth == problem.center() || m.max_distance <= centered_tolerance;
    }

    rep.bound = rep.contraction_ok
                    ? theorem_bound(rep.estimates.reward, rep.estimates.true_kernel,
                                    problem.alpha(), problem.ambiguity().epsilon, rep.centered)
                    : std::numeric_limits<double>::infinity();
    return rep;
}

} // namespace drmdp
