#include "drmdp/qlearn.hpp"

#include "drmdp/error.hpp"
#include "drmdp/transport.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace drmdp {

namespace {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) from the top 53 bits of one engine draw.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::size_t index(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }

    /// Inverse-CDF draw; never lands on a zero-weight state.
    std::size_t draw(const DiscreteDistribution& dist) {
        const double u = uniform();
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (dist[i] <= 0.0)
                continue;
            acc += dist[i];
            last = i;
            if (u < acc)
                return i;
        }
        return last;
    }

private:
    std::mt19937_64 engine_;
};

std::size_t greedy_action(const QFunction& q, std::size_t x) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < q.num_actions; ++a)
        if (q(x, a) > q(x, best))
            best = a;
    return best;
}

} // namespace

QFunction robust_q_learning(const ProblemSpec& problem, const LearningConfig& config) {
    if (!(config.exploration >= 0.0 && config.exploration <= 1.0))
        throw Error(Errc::invalid_argument, "exploration rate must lie in [0, 1]");
    if (!config.learning_rate)
        throw Error(Errc::invalid_argument, "learning-rate schedule is empty");

    const std::size_t ns = problem.num_states();
    const std::size_t na = problem.num_actions();
    const auto& env = problem.nominal_kernel();
    const auto& amb = problem.ambiguity();
    const double alpha = problem.alpha();

    QFunction q(ns, na);
    std::vector<std::size_t> visits(ns * na, 0);
    ValueFunction v = ValueFunction::zeros(ns);
    numvec payoff(ns);
    Sampler rng(config.seed);

    for (std::size_t ep = 0; ep < config.episodes; ++ep) {
        std::size_t x = rng.index(ns);
        for (std::size_t step = 0; step < config.steps_per_episode; ++step) {
            const std::size_t a =
                rng.uniform() < config.exploration ? rng.index(na) : greedy_action(q, x);

            const auto r = problem.reward().row(x, a);
            for (std::size_t y = 0; y < ns; ++y)
                payoff[y] = r[y] + alpha * v[y];
            const double target =
                worst_case_expectation(payoff, problem.center()(x, a), amb.epsilon, amb.q,
                                       problem.cost())
                    .value;

            std::size_t& count = visits[x * na + a];
            const double rate = config.learning_rate(count);
            if (!(rate > 0.0 && rate <= 1.0))
                throw Error(Errc::invalid_argument, "learning rate " + std::to_string(rate) +
                                                        " outside (0, 1]");
            ++count;
            q(x, a) = (1.0 - rate) * q(x, a) + rate * target;

            double vx = q(x, 0);
            for (std::size_t b = 1; b < na; ++b)
                vx = std::max(vx, q(x, b));
            v[x] = vx;

            x = rng.draw(env(x, a));
        }
    }
    return q;
}

} // namespace drmdp
