#include "drmdp/problem_io.hpp"

#include "drmdp/error.hpp"

#include <fstream>
#include <sstream>

namespace drmdp {

using nlohmann::json;

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(ParseErrc::missing_field, child(path, key),
                         "missing field '" + key + "' at " + (path.empty() ? "/" : path));
    return *it;
}

const json& require_array(const json& v, const std::string& path) {
    if (!v.is_array())
        throw ParseError(ParseErrc::type_mismatch, path, "expected an array at " + path);
    return v;
}

const json& require_sized(const json& v, std::size_t n, const std::string& path) {
    require_array(v, path);
    if (v.size() != n)
        throw ParseError(ParseErrc::shape, path,
                         "expected " + std::to_string(n) + " entries at " + path + ", found " +
                             std::to_string(v.size()));
    return v;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number())
        throw ParseError(ParseErrc::type_mismatch, path, "expected a number at " + path);
    return v.get<double>();
}

numvec numbers(const json& v, const std::string& path) {
    require_array(v, path);
    numvec out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number(v[i], child(path, i)));
    return out;
}

template <class Space> Space parse_points(const json& v, const std::string& path) {
    require_array(v, path);
    std::vector<numvec> pts;
    for (std::size_t i = 0; i < v.size(); ++i)
        pts.push_back(numbers(v[i], child(path, i)));
    try {
        return Space(std::move(pts));
    } catch (const Error& e) {
        throw ParseError(ParseErrc::invalid_value, path, std::string(e.what()) + " at " + path);
    }
}

DiscreteDistribution parse_distribution(const json& v, std::size_t ns, const std::string& path) {
    require_sized(v, ns, path);
    numvec w = numbers(v, path);
    try {
        return DiscreteDistribution(std::move(w));
    } catch (const Error& e) {
        const auto kind = e.code() == Errc::distribution_sum ? ParseErrc::distribution_sum
                                                             : ParseErrc::invalid_value;
        throw ParseError(kind, path, std::string(e.what()) + " at " + path);
    }
}

// A JSON null entry leaves the kernel entry unset so that build_problem
// reports it as missing.
TransitionKernel parse_kernel(const json& v, std::size_t ns, std::size_t na,
                              const std::string& path) {
    require_sized(v, ns, path);
    TransitionKernel k(ns, na);
    for (std::size_t x = 0; x < ns; ++x) {
        const auto px = child(path, x);
        require_sized(v[x], na, px);
        for (std::size_t a = 0; a < na; ++a) {
            if (v[x][a].is_null())
                continue;
            k.set(x, a, parse_distribution(v[x][a], ns, child(px, a)));
        }
    }
    return k;
}

RewardTable parse_reward(const json& v, std::size_t ns, std::size_t na, const std::string& path) {
    require_sized(v, ns, path);
    RewardTable r(ns, na);
    for (std::size_t x = 0; x < ns; ++x) {
        const auto px = child(path, x);
        require_sized(v[x], na, px);
        for (std::size_t a = 0; a < na; ++a) {
            const auto pa = child(px, a);
            require_sized(v[x][a], ns, pa);
            for (std::size_t y = 0; y < ns; ++y)
                r(x, a, y) = number(v[x][a][y], child(pa, y));
        }
    }
    return r;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json kernel_to_json(const TransitionKernel& k) {
    json out = json::array();
    for (std::size_t x = 0; x < k.num_states(); ++x) {
        json row = json::array();
        for (std::size_t a = 0; a < k.num_actions(); ++a) {
            const auto w = k(x, a).weights();
            row.push_back(json(numvec(w.begin(), w.end())));
        }
        out.push_back(std::move(row));
    }
    return out;
}

// Arrays of scalars on one line, everything else one element per line.
void write_compact(std::ostream& os, const json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
    if (v.is_object()) {
        os << "{\n";
        std::size_t i = 0;
        for (auto it = v.begin(); it != v.end(); ++it, ++i) {
            os << inner << json(it.key()).dump() << ": ";
            write_compact(os, it.value(), indent + 2);
            os << (i + 1 < v.size() ? ",\n" : "\n");
        }
        os << pad << "}";
        return;
    }
    if (v.is_array()) {
        bool flat = true;
        for (const auto& e : v)
            flat = flat && !e.is_structured();
        if (flat) {
            os << v.dump();
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            os << inner;
            write_compact(os, v[i], indent + 2);
            os << (i + 1 < v.size() ? ",\n" : "\n");
        }
        os << pad << "]";
        return;
    }
    os << v.dump();
}

} // namespace

ProblemSpec parse_problem(const json& doc) {
    if (!doc.is_object())
        throw ParseError(ParseErrc::type_mismatch, "", "problem document must be a JSON object");

    auto states = parse_points<StateSpace>(require(doc, "states", ""), "/states");
    auto actions = parse_points<ActionSpace>(require(doc, "actions", ""), "/actions");
    const std::size_t ns = states.size();
    const std::size_t na = actions.size();

    const double alpha = number(require(doc, "alpha", ""), "/alpha");

    const auto& amb = require(doc, "ambiguity", "");
    if (!amb.is_object())
        throw ParseError(ParseErrc::type_mismatch, "/ambiguity", "expected an object at /ambiguity");
    const auto& qv = require(amb, "q", "/ambiguity");
    if (!qv.is_number_integer())
        throw ParseError(ParseErrc::type_mismatch, "/ambiguity/q", "expected an integer at /ambiguity/q");
    AmbiguityConfig ambiguity{qv.get<int>(),
                              number(require(amb, "epsilon", "/ambiguity"), "/ambiguity/epsilon")};

    auto center = parse_kernel(require(doc, "center", ""), ns, na, "/center");
    std::optional<TransitionKernel> truth;
    if (const auto it = doc.find("true_kernel"); it != doc.end() && !it->is_null())
        truth = parse_kernel(*it, ns, na, "/true_kernel");
    auto reward = parse_reward(require(doc, "reward", ""), ns, na, "/reward");

    return build_problem(std::move(states), std::move(actions), std::move(center),
                         std::move(truth), std::move(reward), alpha, ambiguity);
}

ProblemSpec parse_problem(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(ParseErrc::syntax, "",
                         "JSON syntax error at line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + e.what());
    }
    return parse_problem(doc);
}

ProblemSpec load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(ParseErrc::io, "", "cannot open problem file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_problem(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(e.kind(), e.field(), path.string() + ": " + e.what());
    }
}

json problem_to_json(const ProblemSpec& problem) {
    json doc;
    doc["states"] = problem.states().points();
    doc["actions"] = problem.actions().points();
    doc["alpha"] = problem.alpha();
    doc["ambiguity"] = {{"q", problem.ambiguity().q}, {"epsilon", problem.ambiguity().epsilon}};
    doc["center"] = kernel_to_json(problem.center());
    if (problem.true_kernel())
        doc["true_kernel"] = kernel_to_json(*problem.true_kernel());
    json reward = json::array();
    for (std::size_t x = 0; x < problem.num_states(); ++x) {
        json row = json::array();
        for (std::size_t a = 0; a < problem.num_actions(); ++a) {
            const auto r = problem.reward().row(x, a);
            row.push_back(json(numvec(r.begin(), r.end())));
        }
        reward.push_back(std::move(row));
    }
    doc["reward"] = std::move(reward);
    return doc;
}

void write_problem(const ProblemSpec& problem, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::io_error, "cannot write problem file " + path.string());
    write_compact(out, problem_to_json(problem), 0);
    out << '\n';
    if (!out)
        throw Error(Errc::io_error, "write failed for " + path.string());
}

} // namespace drmdp
