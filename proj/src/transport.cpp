#include "drmdp/transport.hpp"

#include "drmdp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace drmdp {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
// Masses below this are treated as exhausted by the flow solver.
constexpr double mass_eps = 1e-15;

double ipow(double base, int q) {
    double r = 1.0;
    for (int k = 0; k < q; ++k)
        r *= base;
    return r;
}

void check_sizes(std::size_t a, std::size_t b, const CostMatrix& cost, const char* where) {
    if (a != cost.size() || b != cost.size())
        throw Error(Errc::dimension_mismatch, std::string(where) + ": sizes " + std::to_string(a) +
                                                  " and " + std::to_string(b) +
                                                  " do not match the cost matrix (" +
                                                  std::to_string(cost.size()) + ")");
}

/// Multiplier above which every source keeps its mass in place.
double lambda_ceiling(std::span<const double> payoff, const CostMatrix& cost) {
    const auto [lo, hi] = std::minmax_element(payoff.begin(), payoff.end());
    const double cmin = cost.min_positive();
    if (cmin <= 0.0)
        return 1.0;
    return (*hi - *lo) / cmin + 1.0;
}

} // namespace

CostMatrix::CostMatrix(const StateSpace& states, int q) : n_(states.size()), q_(q) {
    if (q < 1)
        throw Error(Errc::invalid_ambiguity, "Wasserstein order must be >= 1, got " + std::to_string(q));
    entries_.assign(n_ * n_, 0.0);
    min_positive_ = n_ > 1 ? inf : 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double c = ipow(states.distance(i, j), q);
            entries_[i * n_ + j] = c;
            entries_[j * n_ + i] = c;
            min_positive_ = std::min(min_positive_, c);
            max_entry_ = std::max(max_entry_, c);
        }
}

Coupling optimal_coupling(const DiscreteDistribution& p1, const DiscreteDistribution& p2,
                          const CostMatrix& cost) {
    check_sizes(p1.size(), p2.size(), cost, "optimal_coupling");
    const std::size_t n = cost.size();

    Coupling out;
    out.n = n;
    out.plan.assign(n * n, 0.0);

    numvec supply(p1.weights().begin(), p1.weights().end());
    numvec demand(p2.weights().begin(), p2.weights().end());

    // Successive shortest paths on the residual graph.
    // Nodes: sources 0..n-1, sinks n..2n-1, sink terminal T = 2n.
    // The super-source is implicit: source i is seeded with the reduced
    // cost of S -> i, which is -phi[i].
    const std::size_t nodes = 2 * n + 1;
    const std::size_t T = 2 * n;
    numvec phi(nodes, 0.0);
    numvec dist(nodes);
    std::vector<std::size_t> prev(nodes);
    std::vector<char> done(nodes);
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    const std::size_t max_rounds = 4 * n * n + 64;
    for (std::size_t round = 0;; ++round) {
        if (round > max_rounds)
            throw Error(Errc::lp_failure, "optimal_coupling: augmentation limit exceeded");

        bool any_supply = false;
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(prev.begin(), prev.end(), none);
        std::fill(done.begin(), done.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
            if (supply[i] > mass_eps) {
                any_supply = true;
                dist[i] = std::max(0.0, -phi[i]);
            }
        if (!any_supply)
            break;

        for (;;) {
            std::size_t u = none;
            double best = inf;
            for (std::size_t v = 0; v < nodes; ++v)
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = v;
                }
            if (u == none)
                break;
            done[u] = 1;
            if (u == T)
                continue;
            auto relax = [&](std::size_t v, double reduced) {
                const double d = dist[u] + std::max(0.0, reduced);
                if (d < dist[v]) {
                    dist[v] = d;
                    prev[v] = u;
                }
            };
            if (u < n) {
                for (std::size_t j = 0; j < n; ++j)
                    relax(n + j, cost(u, j) + phi[u] - phi[n + j]);
            } else {
                const std::size_t j = u - n;
                for (std::size_t i = 0; i < n; ++i)
                    if (out.plan[i * n + j] > mass_eps)
                        relax(i, -cost(i, j) + phi[u] - phi[i]);
                if (demand[j] > mass_eps)
                    relax(T, phi[u] - phi[T]);
            }
        }
        if (!std::isfinite(dist[T]))
            break; // remaining supply is round-off

        double dmax = 0.0;
        for (double d : dist)
            if (std::isfinite(d))
                dmax = std::max(dmax, d);
        for (std::size_t v = 0; v < nodes; ++v)
            phi[v] += std::isfinite(dist[v]) ? dist[v] : dmax;

        // Path: T <- sink <- source (<- sink <- source)*; arcs sink -> source
        // are reverse arcs limited by the mass already shipped on them.
        const std::size_t last_sink = prev[T];
        double push = demand[last_sink - n];
        std::size_t v = last_sink;
        while (prev[v] != none) {
            const std::size_t u = prev[v];
            if (v < n)
                push = std::min(push, out.plan[v * n + (u - n)]);
            v = u;
        }
        const std::size_t first_source = v;
        push = std::min(push, supply[first_source]);

        v = last_sink;
        while (prev[v] != none) {
            const std::size_t u = prev[v];
            if (v >= n)
                out.plan[u * n + (v - n)] += push;
            else
                out.plan[v * n + (u - n)] -= push;
            v = u;
        }
        supply[first_source] -= push;
        demand[last_sink - n] -= push;
    }

    double total = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) {
        if (out.plan[k] < 0.0)
            out.plan[k] = 0.0;
        total += out.plan[k] * cost(k / n, k % n);
    }
    out.cost = total;
    return out;
}

double wasserstein_distance(const DiscreteDistribution& p1, const DiscreteDistribution& p2, int q,
                            const CostMatrix& cost) {
    if (q != cost.order())
        throw Error(Errc::dimension_mismatch, "wasserstein_distance: order " + std::to_string(q) +
                                                  " differs from the cost matrix order " +
                                                  std::to_string(cost.order()));
    if (p1 == p2)
        return 0.0;
    const double c = optimal_coupling(p1, p2, cost).cost;
    return q == 1 ? c : std::pow(c, 1.0 / q);
}

namespace {

struct HullEdge {
    double key;  // nondecreasing along a row
    double slope;
    std::size_t row;
    std::size_t seq;
    std::size_t from;
    std::size_t to;
};

// Lower convex hull of {(cost_ij, payoff_j)} walked from (0, payoff_row) to
// the first point of minimal payoff. Collinear points are kept so that mass
// reaches the cheaper destination first.
void row_hull_edges(std::size_t row, std::span<const double> payoff, const CostMatrix& cost,
                    std::vector<std::size_t>& scratch, std::vector<HullEdge>& edges) {
    const std::size_t n = payoff.size();
    scratch.clear();
    for (std::size_t j = 0; j < n; ++j)
        if (j == row || payoff[j] < payoff[row])
            scratch.push_back(j);
    if (scratch.size() == 1)
        return;
    const auto c = cost.row(row);
    std::sort(scratch.begin(), scratch.end(), [&](std::size_t a, std::size_t b) {
        if (c[a] != c[b])
            return c[a] < c[b];
        if (payoff[a] != payoff[b])
            return payoff[a] < payoff[b];
        return a < b;
    });

    std::vector<std::size_t> hull;
    hull.reserve(scratch.size());
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (c[a] - c[o]) * (payoff[b] - payoff[o]) - (payoff[a] - payoff[o]) * (c[b] - c[o]);
    };
    for (std::size_t j : scratch) {
        if (!hull.empty() && c[hull.back()] == c[j] && payoff[hull.back()] == payoff[j])
            continue;
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), j) < 0.0)
            hull.pop_back();
        hull.push_back(j);
    }

    std::size_t stop = 0;
    for (std::size_t k = 1; k < hull.size(); ++k)
        if (payoff[hull[k]] < payoff[hull[stop]])
            stop = k;

    double key = -inf;
    for (std::size_t k = 0; k < stop; ++k) {
        const std::size_t a = hull[k];
        const std::size_t b = hull[k + 1];
        const double dc = c[b] - c[a];
        if (dc <= 0.0)
            continue;
        const double slope = (payoff[b] - payoff[a]) / dc;
        key = std::max(key, slope);
        edges.push_back({key, slope, row, k, a, b});
    }
}

} // namespace

RobustExpectationResult worst_case_expectation(std::span<const double> payoff,
                                               const DiscreteDistribution& reference,
                                               double epsilon, int q, const CostMatrix& cost) {
    check_sizes(payoff.size(), reference.size(), cost, "worst_case_expectation");
    if (q != cost.order())
        throw Error(Errc::dimension_mismatch, "worst_case_expectation: order mismatch");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw Error(Errc::invalid_ambiguity, "worst_case_expectation: epsilon must be finite and >= 0");
    const std::size_t n = cost.size();

    RobustExpectationResult out;
    const double budget = ipow(epsilon, q);
    if (budget == 0.0) {
        out.value = reference.expectation(payoff);
        out.worst_case = reference;
        out.multiplier = lambda_ceiling(payoff, cost);
        return out;
    }

    std::vector<HullEdge> edges;
    std::vector<std::size_t> scratch;
    for (std::size_t i = 0; i < n; ++i)
        if (reference[i] > 0.0)
            row_hull_edges(i, payoff, cost, scratch, edges);
    std::sort(edges.begin(), edges.end(), [](const HullEdge& a, const HullEdge& b) {
        if (a.key != b.key)
            return a.key < b.key;
        if (a.row != b.row)
            return a.row < b.row;
        return a.seq < b.seq;
    });

    // Destination of each row's mass: `at` holds 1 - split, `next` holds split.
    std::vector<std::size_t> at(n);
    for (std::size_t i = 0; i < n; ++i)
        at[i] = i;
    std::size_t split_row = n;
    std::size_t split_to = 0;
    double split = 0.0;

    double remaining = budget;
    out.multiplier = 0.0;
    for (const auto& e : edges) {
        const double need = reference[e.row] * (cost(e.row, e.to) - cost(e.row, e.from));
        if (need <= remaining) {
            remaining -= need;
            at[e.row] = e.to;
            continue;
        }
        split_row = e.row;
        split_to = e.to;
        split = remaining / need;
        remaining = 0.0;
        out.multiplier = -e.slope;
        break;
    }

    numvec q_weights(n, 0.0);
    double used = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = reference[i];
        if (m <= 0.0)
            continue;
        if (i == split_row) {
            q_weights[at[i]] += m * (1.0 - split);
            q_weights[split_to] += m * split;
            used += m * ((1.0 - split) * cost(i, at[i]) + split * cost(i, split_to));
        } else {
            q_weights[at[i]] += m;
            used += m * cost(i, at[i]);
        }
    }
    out.worst_case = DiscreteDistribution(std::move(q_weights));
    out.value = out.worst_case.expectation(payoff);
    out.budget_used = used;
    return out;
}

double inner_dual_objective(std::span<const double> payoff, const DiscreteDistribution& reference,
                            double budget, const CostMatrix& cost, double lambda) {
    const std::size_t n = cost.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (reference[i] <= 0.0)
            continue;
        double best = inf;
        for (std::size_t j = 0; j < n; ++j)
            best = std::min(best, payoff[j] + lambda * cost(i, j));
        total += reference[i] * best;
    }
    return total - lambda * budget;
}

namespace {

// Right derivative of the dual function: argmin ties resolved to the
// cheapest destination.
double dual_right_slope(std::span<const double> payoff, const DiscreteDistribution& reference,
                        double budget, const CostMatrix& cost, double lambda) {
    const std::size_t n = cost.size();
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (reference[i] <= 0.0)
            continue;
        double best = inf;
        double best_cost = inf;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = payoff[j] + lambda * cost(i, j);
            if (v < best || (v == best && cost(i, j) < best_cost)) {
                best = v;
                best_cost = cost(i, j);
            }
        }
        moved += reference[i] * best_cost;
    }
    return moved - budget;
}

} // namespace

InnerDualSolution solve_inner_dual(std::span<const double> payoff,
                                   const DiscreteDistribution& reference, double budget,
                                   const CostMatrix& cost) {
    check_sizes(payoff.size(), reference.size(), cost, "solve_inner_dual");
    if (!(budget >= 0.0))
        throw Error(Errc::invalid_argument, "solve_inner_dual: budget must be >= 0");

    const double ceiling = lambda_ceiling(payoff, cost);
    if (budget == 0.0)
        return {ceiling, reference.expectation(payoff)};

    if (dual_right_slope(payoff, reference, budget, cost, 0.0) <= 0.0)
        return {0.0, inner_dual_objective(payoff, reference, budget, cost, 0.0)};

    double lo = 0.0;
    double hi = ceiling;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (dual_right_slope(payoff, reference, budget, cost, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double g_lo = inner_dual_objective(payoff, reference, budget, cost, lo);
    const double g_hi = inner_dual_objective(payoff, reference, budget, cost, hi);
    return g_hi >= g_lo ? InnerDualSolution{hi, g_hi} : InnerDualSolution{lo, g_lo};
}

} // namespace drmdp
