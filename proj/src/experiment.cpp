#include "drmdp/experiment.hpp"

#include "drmdp/bellman.hpp"
#include "drmdp/certify.hpp"
#include "drmdp/error.hpp"
#include "drmdp/problem.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>

namespace drmdp {

std::vector<double> CoinTossOptions::default_epsilon_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k)
        grid.push_back(0.05 * k);
    return grid;
}

namespace {

constexpr std::size_t coin_states = 11;

std::vector<ExperimentRow> solve_one(const CoinTossOptions& opt, double epsilon) {
    const auto problem = coin_toss_problem(opt.alpha, {opt.q, epsilon});
    const auto nominal = value_iteration(problem, OperatorMode::nominal(), std::nullopt, opt.tol);
    const auto robust = value_iteration(problem, OperatorMode::robust(), std::nullopt, opt.tol);
    if (!nominal.converged || !robust.converged)
        throw Error(Errc::non_convergence, "coin toss value iteration did not converge at epsilon " +
                                               std::to_string(epsilon));
    const auto report = certify(problem);

    const std::size_t last = opt.all_states ? coin_states - 1 : (coin_states - 1) / 2;
    std::vector<ExperimentRow> rows;
    for (std::size_t x0 = 0; x0 <= last; ++x0) {
        ExperimentRow row;
        row.epsilon = epsilon;
        row.x0 = x0;
        row.v_true = nominal.value[x0];
        row.v_robust = robust.value[x0];
        row.diff = row.v_true - row.v_robust;
        row.bound = report.bound;
        row.ratio = report.bound == 0.0 ? 0.0 : row.diff / report.bound;
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::vector<ExperimentRow> run_cointoss_experiment(const CoinTossOptions& options) {
    for (double e : options.epsilons)
        if (!(e >= 0.0) || !std::isfinite(e))
            throw Error(Errc::invalid_ambiguity, "epsilon grid values must be finite and >= 0");

    std::vector<std::future<std::vector<ExperimentRow>>> jobs;
    jobs.reserve(options.epsilons.size());
    for (double e : options.epsilons)
        jobs.push_back(std::async(std::launch::async, solve_one, std::cref(options), e));

    std::vector<ExperimentRow> rows;
    for (auto& j : jobs) {
        auto part = j.get();
        rows.insert(rows.end(), part.begin(), part.end());
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
        if (a.epsilon != b.epsilon)
            return a.epsilon < b.epsilon;
        return a.x0 < b.x0;
    });
    return rows;
}

std::string format_decimal(double value, int digits) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (value == 0.0)
        return "0";

    // Exponent after rounding to `digits` significant digits.
    std::array<char, 64> sci{};
    auto res = std::to_chars(sci.data(), sci.data() + sci.size(), value,
                             std::chars_format::scientific, digits - 1);
    const char* e = std::find(sci.data(), res.ptr, 'e');
    const int exponent = std::atoi(e + 1);
    const int decimals = std::max(0, digits - 1 - exponent);

    std::string out(static_cast<std::size_t>(std::abs(exponent) + decimals + 8), '\0');
    res = std::to_chars(out.data(), out.data() + out.size(), value, std::chars_format::fixed,
                        decimals);
    out.resize(static_cast<std::size_t>(res.ptr - out.data()));
    return out;
}

void write_csv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
    out << csv_header << '\n';
    for (const auto& r : rows)
        out << format_decimal(r.epsilon) << ',' << r.x0 << ',' << format_decimal(r.v_true) << ','
            << format_decimal(r.v_robust) << ',' << format_decimal(r.diff) << ','
            << format_decimal(r.bound) << ',' << format_decimal(r.ratio) << '\n';
}

void emit_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
    write_csv(rows, out);
    out.flush();
    if (!out)
        throw Error(Errc::io_error, "write failed for " + path.string());
}

} // namespace drmdp
