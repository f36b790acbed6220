// Command-line front end: the coin-toss experiment, problem-file solving,
// certification reports and the closed-form bound.

#include "drmdp/bellman.hpp"
#include "drmdp/certify.hpp"
#include "drmdp/error.hpp"
#include "drmdp/experiment.hpp"
#include "drmdp/problem_io.hpp"
#include "drmdp/qlearn.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;
using namespace drmdp;

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_nonconvergence = 3;
constexpr int exit_assumption = 4;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size())
            throw Error(Errc::invalid_argument, "not a number in list: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::io_error, "cannot open " + path + " for writing");
    out << text;
    if (!out)
        throw Error(Errc::io_error, "write failed for " + path);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json kernel_json(const TransitionKernel& k) {
    json out = json::array();
    for (std::size_t x = 0; x < k.num_states(); ++x) {
        json row = json::array();
        for (std::size_t a = 0; a < k.num_actions(); ++a) {
            const auto w = k(x, a).weights();
            row.push_back(numvec(w.begin(), w.end()));
        }
        out.push_back(std::move(row));
    }
    return out;
}

struct CoinTossArgs {
    double alpha = 0.45;
    std::string epsilons;
    int q = 1;
    double tol = 1e-9;
    bool all_states = false;
    std::string out;
};

int run_cointoss(const CoinTossArgs& args) {
    CoinTossOptions opt;
    opt.alpha = args.alpha;
    if (!args.epsilons.empty())
        opt.epsilons = parse_list(args.epsilons);
    opt.q = args.q;
    opt.tol = args.tol;
    opt.all_states = args.all_states;
    const auto rows = run_cointoss_experiment(opt);
    if (args.out.empty() || args.out == "-")
        write_csv(rows, std::cout);
    else
        emit_csv(rows, args.out);
    return exit_ok;
}

struct SolveArgs {
    std::string problem;
    std::string mode = "robust";
    double tol = 1e-9;
    std::size_t max_iter = 100000;
    std::uint64_t seed = 42;
    std::size_t episodes = LearningConfig{}.episodes;
    std::size_t steps = LearningConfig{}.steps_per_episode;
    double exploration = LearningConfig{}.exploration;
    std::string out;
};

int run_solve(const SolveArgs& args) {
    const auto problem = load_problem(args.problem);
    json doc;
    doc["mode"] = args.mode;
    int rc = exit_ok;

    if (args.mode == "qlearn") {
        LearningConfig cfg;
        cfg.seed = args.seed;
        cfg.episodes = args.episodes;
        cfg.steps_per_episode = args.steps;
        cfg.exploration = args.exploration;
        const auto q = robust_q_learning(problem, cfg);
        doc["rng"] = std::string(rng_algorithm);
        doc["seed"] = cfg.seed;
        doc["episodes"] = cfg.episodes;
        doc["steps_per_episode"] = cfg.steps_per_episode;
        doc["exploration"] = cfg.exploration;
        doc["learning_rate"] = "1/(1+visits)";
        json table = json::array();
        for (std::size_t x = 0; x < q.num_states; ++x) {
            json row = json::array();
            for (std::size_t a = 0; a < q.num_actions; ++a)
                row.push_back(q(x, a));
            table.push_back(std::move(row));
        }
        doc["q"] = std::move(table);
        const auto v = greedy_value(q);
        doc["value"] = v.values;
        std::vector<std::size_t> policy(q.num_states);
        for (std::size_t x = 0; x < q.num_states; ++x) {
            std::size_t best = 0;
            for (std::size_t a = 1; a < q.num_actions; ++a)
                if (q(x, a) > q(x, best))
                    best = a;
            policy[x] = best;
        }
        doc["policy"] = policy;
    } else {
        OperatorMode mode = OperatorMode::robust();
        if (args.mode == "nominal")
            mode = OperatorMode::nominal();
        else if (args.mode != "robust")
            throw Error(Errc::invalid_argument, "unknown mode '" + args.mode + "'");
        const auto rep = value_iteration(problem, mode, std::nullopt, args.tol, args.max_iter);
        doc["converged"] = rep.converged;
        doc["iterations"] = rep.iterations;
        doc["residual"] = rep.residual;
        doc["tol"] = args.tol;
        doc["value"] = rep.value.values;
        doc["policy"] = extract_policy(problem, mode, rep.value).action_index;
        if (mode.kind() == OperatorMode::Kind::robust)
            doc["worst_case_kernel"] = kernel_json(extract_worst_case_kernel(problem, rep.value));
        if (!rep.converged) {
            std::cerr << "value iteration did not converge after " << rep.iterations
                      << " sweeps (residual " << rep.residual << ")\n";
            rc = exit_nonconvergence;
        }
    }
    write_text(args.out, doc.dump(2) + "\n");
    return rc;
}

struct CertifyArgs {
    std::string problem;
    std::string out;
    bool strict = false;
    bool force_unbounded = false;
    double tol = 1e-9;
    std::optional<double> lr, lp, lcenter;
};

int run_certify(const CertifyArgs& args) {
    const auto problem = load_problem(args.problem);
    CertifyOptions opt;
    opt.overrides.reward = args.lr;
    opt.overrides.true_kernel = args.lp;
    opt.overrides.center_kernel = args.lcenter;
    opt.force_unbounded_formula = args.force_unbounded;
    const auto rep = certify(problem, opt);

    json doc;
    doc["L_r"] = rep.estimates.reward;
    doc["L_P"] = rep.estimates.true_kernel;
    doc["L_center"] = rep.estimates.center_kernel;
    doc["overridden"] = {{"L_r", rep.overrides_applied.reward.has_value()},
                         {"L_P", rep.overrides_applied.true_kernel.has_value()},
                         {"L_center", rep.overrides_applied.center_kernel.has_value()}};
    doc["C_P"] = rep.c_p;
    doc["alpha"] = problem.alpha();
    doc["epsilon"] = problem.ambiguity().epsilon;
    doc["q"] = problem.ambiguity().q;
    doc["alpha_ok"] = rep.alpha_ok;
    doc["contraction_ok"] = rep.contraction_ok;
    doc["membership_ok"] = rep.membership_ok;
    doc["max_membership_distance"] = rep.max_membership_distance;
    doc["centered"] = rep.centered;
    doc["true_kernel_assumed"] = rep.true_kernel_assumed;
    doc["bound"] = number_or_null(rep.bound);
    doc["bound_finite"] = std::isfinite(rep.bound);

    int rc = exit_ok;
    const auto nominal = value_iteration(problem, OperatorMode::nominal(), std::nullopt, args.tol);
    const auto robust = value_iteration(problem, OperatorMode::robust(), std::nullopt, args.tol);
    if (nominal.converged && robust.converged) {
        json gap = json::array(), ratio = json::array();
        for (std::size_t x = 0; x < problem.num_states(); ++x) {
            const double d = nominal.value[x] - robust.value[x];
            gap.push_back(d);
            ratio.push_back(rep.bound > 0.0 && std::isfinite(rep.bound) ? json(d / rep.bound)
                                                                         : json(0.0));
        }
        doc["v_true"] = nominal.value.values;
        doc["v_robust"] = robust.value.values;
        doc["gap"] = std::move(gap);
        doc["ratio"] = std::move(ratio);
    } else {
        rc = exit_nonconvergence;
    }

    write_text(args.out, doc.dump(2) + "\n");
    if (args.strict && !rep.all_ok()) {
        std::cerr << "assumption check failed\n";
        return exit_assumption;
    }
    return rc;
}

struct BoundArgs {
    double lr = 1.0;
    double lp = 0.0;
    double alpha = 0.45;
    double epsilon = 0.0;
    bool centered = false;
};

int run_bound(const BoundArgs& args) {
    std::cout << format_decimal(theorem_bound(args.lr, args.lp, args.alpha, args.epsilon,
                                              args.centered))
              << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wasserstein-robust MDP solver and value-gap certificates"};
    app.require_subcommand(1);

    CoinTossArgs ct;
    auto* cointoss = app.add_subcommand("cointoss", "coin-toss experiment, CSV output");
    cointoss->add_option("--alpha", ct.alpha, "discount factor")->capture_default_str();
    cointoss->add_option("--epsilons", ct.epsilons, "comma-separated radii (default 0,0.05,...,0.5)");
    cointoss->add_option("--q", ct.q, "Wasserstein order")->capture_default_str();
    cointoss->add_option("--tol", ct.tol, "fixed-point tolerance")->capture_default_str();
    cointoss->add_flag("--all-states", ct.all_states, "emit rows for states 0..10");
    cointoss->add_option("--out", ct.out, "CSV path (stdout when omitted)");

    SolveArgs sv;
    auto* solve = app.add_subcommand("solve", "solve a problem file");
    solve->add_option("--problem", sv.problem, "problem JSON")->required();
    solve->add_option("--mode", sv.mode, "nominal | robust | qlearn")
        ->check(CLI::IsMember({"nominal", "robust", "qlearn"}))
        ->capture_default_str();
    solve->add_option("--tol", sv.tol)->capture_default_str();
    solve->add_option("--max-iter", sv.max_iter)->capture_default_str();
    solve->add_option("--seed", sv.seed)->capture_default_str();
    solve->add_option("--episodes", sv.episodes)->capture_default_str();
    solve->add_option("--steps", sv.steps, "steps per episode")->capture_default_str();
    solve->add_option("--exploration", sv.exploration)->capture_default_str();
    solve->add_option("--out", sv.out, "JSON path (stdout when omitted)");

    CertifyArgs cf;
    auto* cert = app.add_subcommand("certify", "estimate constants and evaluate the bound");
    cert->add_option("--problem", cf.problem, "problem JSON")->required();
    cert->add_option("--out", cf.out, "JSON path (stdout when omitted)");
    cert->add_flag("--strict", cf.strict, "exit 4 when an assumption fails");
    cert->add_flag("--force-unbounded-cp", cf.force_unbounded, "unbounded-reward C_P formula");
    cert->add_option("--tol", cf.tol)->capture_default_str();
    cert->add_option("--lr", cf.lr, "override the reward Lipschitz constant");
    cert->add_option("--lp", cf.lp, "override the true-kernel Lipschitz constant");
    cert->add_option("--lcenter", cf.lcenter, "override the center-kernel Lipschitz constant");

    BoundArgs bd;
    auto* bound = app.add_subcommand("bound", "closed-form value-gap bound");
    bound->add_option("--lr", bd.lr)->capture_default_str();
    bound->add_option("--lp", bd.lp)->capture_default_str();
    bound->add_option("--alpha", bd.alpha)->capture_default_str();
    bound->add_option("--epsilon", bd.epsilon)->required();
    bound->add_flag("--centered", bd.centered);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_invalid;
    }

    try {
        if (*cointoss)
            return run_cointoss(ct);
        if (*solve)
            return run_solve(sv);
        if (*cert)
            return run_certify(cf);
        if (*bound)
            return run_bound(bd);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return e.code() == Errc::non_convergence ? exit_nonconvergence : exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid;
    }
    return exit_ok;
}
