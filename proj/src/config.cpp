#include "hardy/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

constexpr const char* kCommandNames[] = {"classify", "transforms", "verify", "identities",
                                         "sharpness", "minimize",   "report"};
constexpr const char* kInequalities[] = {"nct1", "nct2", "c1", "monotone"};

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string number(double x) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

// Splits the CLI11 inputs further at commas.
std::vector<std::string> items(const std::vector<std::string>& inputs) {
    std::vector<std::string> out;
    for (const auto& in : inputs) {
        std::stringstream ss(in);
        std::string part;
        while (std::getline(ss, part, ','))
            if (!part.empty() && part.find_first_not_of(' ') != std::string::npos)
                out.push_back(part.substr(part.find_first_not_of(' '), part.find_last_not_of(' ') + 1 -
                                                                            part.find_first_not_of(' ')));
    }
    return out;
}

class Reader {
public:
    std::vector<std::string> violations;

    double real(const std::string& key, const std::vector<std::string>& inputs) {
        const auto parts = items(inputs);
        double x = 0.0;
        if (parts.size() != 1 || !parse(parts[0], x)) violations.push_back(key + ": expected a number");
        return x;
    }
    long long integer(const std::string& key, const std::vector<std::string>& inputs) {
        const auto parts = items(inputs);
        long long x = 0;
        if (parts.size() != 1) {
            violations.push_back(key + ": expected an integer");
            return 0;
        }
        const auto& s = parts[0];
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) violations.push_back(key + ": expected an integer");
        return x;
    }
    std::vector<double> reals(const std::string& key, const std::vector<std::string>& inputs) {
        std::vector<double> out;
        for (const auto& s : items(inputs)) {
            double x = 0.0;
            if (!parse(s, x)) violations.push_back(key + ": '" + s + "' is not a number");
            out.push_back(x);
        }
        return out;
    }
    std::string text(const std::string& key, const std::vector<std::string>& inputs) {
        if (inputs.empty()) violations.push_back(key + ": missing value");
        return join(inputs, " ");
    }

private:
    static bool parse(const std::string& s, double& x) {
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        return r.ec == std::errc() && r.ptr == s.data() + s.size();
    }
};

}  // namespace

const char* to_string(Command c) { return kCommandNames[static_cast<int>(c)]; }

std::optional<Command> command_from_string(const std::string& name) {
    for (int i = 0; i < 7; ++i)
        if (name == kCommandNames[i]) return static_cast<Command>(i);
    return std::nullopt;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument("invalid configuration: " + join(violations, "; ")), violations_(std::move(violations)) {}

double RunConfig::remainder_M() const { return M ? *M : std::max(2.0, 4.0 / (mu * (p - 1.0))); }

TransformParams RunConfig::params() const {
    TransformParams tp;
    tp.p = p;
    tp.eta = eta;
    tp.mu = mu;
    return tp;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    Reader rd;
    std::istringstream in(text);
    std::vector<CLI::ConfigItem> entries;
    try {
        entries = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError({std::string("unreadable configuration: ") + e.what()});
    }
    for (const auto& item : entries) {
        if (item.name == "++" || item.name == "--") continue;
        const std::string section = item.parents.empty() ? "" : item.parents.front();
        const std::string& key = item.name;
        const std::string where = (section.empty() ? "" : section + ".") + key;
        const auto& v = item.inputs;
        if (section == "weight") {
            if (key == "family") cfg.weight.family = rd.text(where, v);
            else if (key == "alpha") cfg.weight.alpha = rd.real(where, v);
            else if (key == "sign") cfg.weight.sign = static_cast<int>(rd.integer(where, v));
            else if (key == "beta") cfg.weight.beta = rd.real(where, v);
            else if (key == "preset") cfg.weight.preset = rd.text(where, v);
            else if (key == "table") cfg.weight.table = rd.text(where, v);
            else rd.violations.push_back("unknown key " + where);
        } else if (section == "params") {
            if (key == "p") cfg.p = rd.real(where, v);
            else if (key == "eta") cfg.eta = rd.real(where, v);
            else if (key == "mu") cfg.mu = rd.real(where, v);
            else if (key == "M") cfg.M = rd.real(where, v);
            else if (key == "R") cfg.R = rd.real(where, v);
            else if (key == "alpha") cfg.alpha = rd.real(where, v);
            else rd.violations.push_back("unknown key " + where);
        } else if (section == "run") {
            if (key == "command") {
                const std::string name = rd.text(where, v);
                cfg.command = command_from_string(name);
                if (!cfg.command) rd.violations.push_back("unknown command '" + name + "'");
            } else if (key == "tol") cfg.tol = rd.real(where, v);
            else if (key == "out") cfg.out = rd.text(where, v);
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(rd.integer(where, v));
            else if (key == "corpus") cfg.corpus = rd.text(where, v);
            else if (key == "count") cfg.count = static_cast<std::size_t>(std::max(0LL, rd.integer(where, v)));
            else if (key == "inequalities") cfg.inequalities = items(v);
            else if (key == "corollary") {
                const std::string c = rd.text(where, v);
                if (c == "D") cfg.corollary = Corollary::D;
                else if (c == "G") cfg.corollary = Corollary::G;
                else if (c == "F") cfg.corollary = Corollary::F;
                else if (c == "E") cfg.corollary = Corollary::E;
                else if (c == "B") cfg.corollary = Corollary::B;
                else rd.violations.push_back("unknown corollary '" + c + "' (expected D, G, F, E or B)");
            } else if (key == "eps") cfg.eps = rd.reals(where, v);
            else if (key == "nodes") cfg.nodes = static_cast<std::size_t>(std::max(0LL, rd.integer(where, v)));
            else if (key == "t_floor") cfg.t_floor = rd.real(where, v);
            else if (key == "boundary") {
                const std::string b = rd.text(where, v);
                if (b == "free") cfg.boundary.kind = Boundary::free_at_eta;
                else if (b == "pinned") cfg.boundary.kind = Boundary::pinned;
                else rd.violations.push_back("boundary must be 'free' or 'pinned'");
            } else if (key == "boundary_value") cfg.boundary.value = rd.real(where, v);
            else if (key == "infimum_floors") cfg.infimum_floors = rd.reals(where, v);
            else if (key == "points") cfg.points = static_cast<std::size_t>(std::max(0LL, rd.integer(where, v)));
            else if (key == "t_min") cfg.t_min = rd.real(where, v);
            else rd.violations.push_back("unknown key " + where);
        } else {
            rd.violations.push_back(section.empty() ? "key '" + key + "' outside a section"
                                                    : "unknown section [" + section + "]");
        }
    }
    auto violations = std::move(rd.violations);
    for (auto& v : validate(cfg)) violations.push_back(std::move(v));
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> out;
    const auto& w = cfg.weight;
    static const std::vector<std::string> families = {"constant", "power", "exp_inv_pow", "power_times_exp", "table",
                                                      "preset"};
    if (std::find(families.begin(), families.end(), w.family) == families.end())
        out.push_back("unknown family '" + w.family + "'");
    if (w.family == "exp_inv_pow" || w.family == "power_times_exp") {
        if (w.sign != 1 && w.sign != -1) out.push_back("weight.sign = " + std::to_string(w.sign) + ": must be +1 or -1");
        if (!(w.beta > 0.0)) out.push_back("weight.beta = " + number(w.beta) + ": requires beta > 0");
    }
    if (w.family == "preset" && w.preset.empty()) out.push_back("family = preset needs weight.preset");
    if (w.family == "table" && w.table.empty()) out.push_back("family = table needs weight.table");
    if (!(cfg.p > 1.0) || !std::isfinite(cfg.p)) out.push_back("p = " + number(cfg.p) + ": requires 1<p<\\infty");
    if (!(cfg.eta > 0.0) || !std::isfinite(cfg.eta)) out.push_back("eta = " + number(cfg.eta) + ": requires eta > 0");
    if (!(cfg.mu > 0.0) || !std::isfinite(cfg.mu)) out.push_back("mu = " + number(cfg.mu) + ": requires mu > 0");
    if (cfg.M) {
        if (!(*cfg.M > 0.0)) out.push_back("M = " + number(*cfg.M) + ": requires M > 0");
        else if (cfg.p > 1.0 && cfg.p < 2.0 && cfg.mu > 0.0) {
            if (*cfg.M < 1.0) out.push_back("M = " + number(*cfg.M) + ": requires M >= 1 for 1<p<2");
            if (!(1.0 - 2.0 / (cfg.mu * (cfg.p - 1.0) * *cfg.M) > 0.0))
                out.push_back("M = " + number(*cfg.M) + ": requires 1 - 2/(mu (p-1) M) > 0");
        }
    }
    if (cfg.corollary == Corollary::E && !(cfg.R > std::numbers::e))
        out.push_back("R = " + number(cfg.R) + ": corollary E requires R > e");
    if (!(cfg.tol > 0.0)) out.push_back("tol = " + number(cfg.tol) + ": requires tol > 0");
    for (const auto& name : cfg.inequalities)
        if (std::find(std::begin(kInequalities), std::end(kInequalities), name) == std::end(kInequalities))
            out.push_back("unknown inequality '" + name + "' (expected nct1, nct2, c1 or monotone)");
    for (std::size_t i = 0; i < cfg.eps.size(); ++i) {
        if (!(cfg.eps[i] > 0.0)) out.push_back("eps entries must be > 0");
        if (i && !(cfg.eps[i] < cfg.eps[i - 1])) out.push_back("eps must be strictly decreasing");
    }
    if (cfg.nodes < 3) out.push_back("nodes = " + std::to_string(cfg.nodes) + ": a mesh needs at least 3 nodes");
    if (cfg.t_floor && !(*cfg.t_floor > 0.0 && *cfg.t_floor < cfg.eta))
        out.push_back("t_floor = " + number(*cfg.t_floor) + ": requires 0 < t_floor < eta");
    for (double f : cfg.infimum_floors)
        if (!(f > 0.0 && f < cfg.eta)) out.push_back("infimum_floors entry " + number(f) + ": requires 0 < t < eta");
    if (!(cfg.boundary.value >= 0.0)) out.push_back("boundary_value must be >= 0");
    if (cfg.points < 2) out.push_back("points must be >= 2");
    if (!(cfg.t_min > 0.0 && cfg.t_min < 1.0)) out.push_back("t_min = " + number(cfg.t_min) + ": requires 0 < t_min < 1");
    return out;
}

std::string to_text(const RunConfig& cfg) {
    std::ostringstream out;
    std::vector<std::string> eps, floors;
    for (double e : cfg.eps) eps.push_back(number(e));
    for (double f : cfg.infimum_floors) floors.push_back(number(f));
    out << "[weight]\n"
        << "family = " << cfg.weight.family << "\n"
        << "alpha = " << number(cfg.weight.alpha) << "\n"
        << "sign = " << cfg.weight.sign << "\n"
        << "beta = " << number(cfg.weight.beta) << "\n";
    if (!cfg.weight.preset.empty()) out << "preset = \"" << cfg.weight.preset << "\"\n";
    if (!cfg.weight.table.empty()) out << "table = \"" << cfg.weight.table << "\"\n";
    out << "\n[params]\n"
        << "p = " << number(cfg.p) << "\n"
        << "eta = " << number(cfg.eta) << "\n"
        << "mu = " << number(cfg.mu) << "\n"
        << "M = " << number(cfg.remainder_M()) << "\n"
        << "R = " << number(cfg.R) << "\n"
        << "alpha = " << number(cfg.alpha) << "\n"
        << "\n[run]\n";
    if (cfg.command) out << "command = " << to_string(*cfg.command) << "\n";
    out << "tol = " << number(cfg.tol) << "\n"
        << "out = \"" << cfg.out << "\"\n"
        << "seed = " << cfg.seed << "\n";
    if (!cfg.corpus.empty()) out << "corpus = \"" << cfg.corpus << "\"\n";
    out << "count = " << cfg.count << "\n"
        << "inequalities = " << join(cfg.inequalities, ",") << "\n";
    if (cfg.corollary) out << "corollary = " << to_string(*cfg.corollary) << "\n";
    out << "eps = " << join(eps, ",") << "\n"
        << "nodes = " << cfg.nodes << "\n";
    if (cfg.t_floor) out << "t_floor = " << number(*cfg.t_floor) << "\n";
    out << "boundary = " << (cfg.boundary.kind == Boundary::pinned ? "pinned" : "free") << "\n"
        << "boundary_value = " << number(cfg.boundary.value) << "\n";
    if (!floors.empty()) out << "infimum_floors = " << join(floors, ",") << "\n";
    out << "points = " << cfg.points << "\n"
        << "t_min = " << number(cfg.t_min) << "\n";
    return out.str();
}

WeightSpec make_weight(const RunConfig& cfg) {
    const auto& w = cfg.weight;
    const double p = cfg.p;
    if (w.family == "constant") return WeightSpec::constant(p);
    if (w.family == "power") return WeightSpec::power(w.alpha, p);
    if (w.family == "exp_inv_pow") return WeightSpec::exp_inv_pow(w.sign, w.beta, p);
    if (w.family == "power_times_exp") return WeightSpec::power_times_exp(w.alpha, w.sign, w.beta, p);
    if (w.family == "preset") {
        if (w.preset == "t_squared") return t_squared(p);
        if (w.preset == "constant") return WeightSpec::constant(p);
        std::vector<std::string> names;
        for (const auto& spec : builtin_weights(p)) {
            if (spec.name == w.preset) return spec;
            names.push_back(spec.name);
        }
        throw PreconditionError("unknown preset '" + w.preset + "' (known: t_squared, constant, " + join(names, ", ") +
                                ")");
    }
    if (w.family == "table") {
        std::ifstream in(w.table);
        if (!in) throw DomainError("cannot open weight table " + w.table);
        std::vector<std::pair<double, double>> rows;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto parts = items({line});
            if (parts.empty() || parts[0][0] == '#' || parts[0] == "t") continue;
            double t = 0.0, value = 0.0;
            if (parts.size() != 2 || std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), t).ec != std::errc() ||
                std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), value).ec != std::errc())
                throw DomainError("weight table line " + std::to_string(line_no) + ": expected 't,w'");
            if (!(value > 0.0)) throw DomainError("weight table line " + std::to_string(line_no) + ": requires w > 0");
            rows.emplace_back(t, std::log(value));
        }
        return WeightSpec::user_table(rows, p);
    }
    throw PreconditionError("unknown family '" + w.family + "'");
}

}  // namespace hardy
