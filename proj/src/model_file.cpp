#include "levydiv/model_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "levydiv/error.hpp"

namespace levydiv {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

double to_number(const std::string& key, std::string text) {
    boost::algorithm::trim(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        if (!std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::logic_error&) {
        parse_error("key '" + key + "': '" + text + "' is not a number");
    }
}

std::vector<double> to_numbers(const std::string& key, const std::string& text) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::is_any_of(",; \t"), boost::token_compress_on);
    std::vector<double> out;
    for (const auto& p : parts)
        if (!boost::algorithm::trim_copy(p).empty()) out.push_back(to_number(key, p));
    if (out.empty()) parse_error("key '" + key + "' has no values");
    return out;
}

std::map<std::string, std::string> flatten(const boost::property_tree::ptree& tree) {
    std::map<std::string, std::string> out;
    auto put = [&](const std::string& key, const std::string& value) {
        if (!out.emplace(key, value).second) parse_error("duplicate key '" + key + "'");
    };
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            put(key, node.data());
        } else {
            for (const auto& [inner, leaf] : node) put(inner, leaf.data());
        }
    }
    return out;
}

}  // namespace

PhaseTypeLaw parse_jump_shorthand(const std::string& raw) {
    const std::string text = boost::algorithm::trim_copy(raw);
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open || close + 1 != text.size())
        parse_error("jumps: expected exp(mu) or hyperexp(w:mu, ...), got '" + text + "'");
    const std::string kind = boost::algorithm::trim_copy(text.substr(0, open));
    const std::string args = text.substr(open + 1, close - open - 1);
    if (kind == "exp") return PhaseTypeLaw::exponential(to_number("jumps", args));
    if (kind == "hyperexp") {
        std::vector<std::string> items;
        boost::algorithm::split(items, args, boost::is_any_of(","));
        std::vector<double> w, mu;
        for (const auto& item : items) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) parse_error("jumps: hyperexp component '" + item + "' needs weight:rate");
            w.push_back(to_number("jumps", item.substr(0, colon)));
            mu.push_back(to_number("jumps", item.substr(colon + 1)));
        }
        return PhaseTypeLaw::hyperexponential(w, mu);
    }
    parse_error("jumps: unknown law '" + kind + "'");
}

ModelSpec parse_model(std::istream& is) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        parse_error("line " + std::to_string(e.line()) + ": " + e.message());
    }
    const auto kv = flatten(tree);
    static const char* known[] = {"c", "sigma", "kappa", "alpha", "T", "jumps", "q", "beta", "delta"};
    for (const auto& [key, value] : kv)
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            parse_error("unknown key '" + key + "'");
    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto required = [&](const std::string& key) {
        const std::string* v = get(key);
        if (!v) parse_error("missing required key '" + key + "'");
        return to_number(key, *v);
    };

    ModelSpec spec;
    spec.model.c = required("c");
    spec.model.sigma = get("sigma") ? to_number("sigma", *get("sigma")) : 0.0;
    spec.model.kappa = get("kappa") ? to_number("kappa", *get("kappa")) : 0.0;
    spec.params.q = required("q");
    spec.params.beta = required("beta");
    spec.params.delta = required("delta");

    const bool shorthand = get("jumps") != nullptr;
    const bool explicit_law = get("alpha") || get("T");
    if (shorthand && explicit_law) parse_error("give either 'jumps' or 'alpha'/'T', not both");
    try {
        if (shorthand) {
            spec.model.jumps = parse_jump_shorthand(*get("jumps"));
        } else if (explicit_law) {
            if (!get("alpha") || !get("T")) parse_error("'alpha' and 'T' must be given together");
            const auto alpha = to_numbers("alpha", *get("alpha"));
            const auto t = to_numbers("T", *get("T"));
            const auto n = static_cast<Eigen::Index>(alpha.size());
            if (static_cast<Eigen::Index>(t.size()) != n * n)
                parse_error("'T' needs " + std::to_string(n * n) + " entries for " + std::to_string(n) + " phases, got " +
                            std::to_string(t.size()));
            Eigen::VectorXd a(n);
            Eigen::MatrixXd m(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                a(i) = alpha[static_cast<std::size_t>(i)];
                for (Eigen::Index j = 0; j < n; ++j) m(i, j) = t[static_cast<std::size_t>(i * n + j)];
            }
            spec.model.jumps = PhaseTypeLaw(a, m);
        } else if (spec.model.kappa > 0.0) {
            parse_error("kappa > 0 requires a jump law ('jumps' or 'alpha'/'T')");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        parse_error(e.what());
    }
    return spec;
}

ModelSpec load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) parse_error("cannot open model file '" + path + "'");
    return parse_model(in);
}

}  // namespace levydiv
