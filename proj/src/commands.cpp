#include "hardy/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "hardy/corpus.hpp"
#include "hardy/errors.hpp"
#include "hardy/extremals.hpp"
#include "hardy/identities.hpp"
#include "hardy/variational.hpp"

namespace hardy {

namespace {

constexpr const char* kVersion = "1.0.0";

struct TagEntry {
    const char* id;
    const char* tag;
};

// Result ids and the equation tags they reproduce.
constexpr TagEntry kTags[] = {
    {"classification", "Def. 2.2"},
    {"derivative_identities", "2.13"},
    {"nct1", "nct1"},
    {"nct2", "nct2"},
    {"c1", "c1"},
    {"corollary_D", "D"},
    {"corollary_G", "G"},
    {"corollary_F", "F"},
    {"corollary_E", "E"},
    {"corollary_B", "B"},
    {"monotone_comparison", "3.2"},
    {"elementary_constant", "3.1"},
    {"identity_I413", "4.13"},
    {"identity_I414", "4.14"},
    {"identity_I415", "4.15"},
    {"identity_I416", "4.16"},
    {"identity_I417", "4.17"},
    {"boundary_integral", "4.21"},
    {"assembled_remainder", "4.22"},
    {"ground_state", "Lemma 8.1"},
    {"ground_state_full", "4.32'"},
    {"t_weight_bound", "Lemma 4.9"},
    {"pointwise_bound", "Lemma 4.8"},
    {"sharpness", "nct1"},
    {"minimize", "nct1"},
    {"infimum_zero", "7.1"},
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string short_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

struct Run {
    const RunConfig& cfg;
    std::ostream& out;
    std::ostream& err;
    std::filesystem::path dir;
    std::vector<ResultRow> rows;
    std::vector<std::string> files;
    int code = kExitOk;

    std::ofstream open(const std::string& name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw OutputError("cannot write " + (dir / name).string());
        files.push_back(name);
        return f;
    }
    void add(ResultRow row) {
        if (!row.pass) code = combine_exit_codes(code, kExitFailure);
        rows.push_back(std::move(row));
    }
};

TransformSet transforms_for(const RunConfig& cfg) { return build_transforms(make_weight(cfg), cfg.params()); }

std::vector<TestFunction> load_corpus(const RunConfig& cfg) {
    std::vector<TestFunction> corpus = cfg.corpus.empty() ? random_corpus(cfg.count, cfg.eta, cfg.seed) : read_corpus(cfg.corpus);
    if (corpus.empty()) throw UsageError("empty corpus: nothing to verify");
    for (const auto& u : corpus)
        if (std::fabs(u.eta() - cfg.eta) > 1e-12 * cfg.eta)
            throw UsageError("test function '" + u.name + "' ends at " + num(u.eta()) + ", not at eta = " + num(cfg.eta));
    return corpus;
}

void write_corpus(Run& run, const std::vector<TestFunction>& corpus) {
    auto f = run.open("corpus.csv");
    if (run.cfg.corpus.empty()) f << "# seed " << run.cfg.seed << "\n\n";
    for (const auto& u : corpus) write_corpus_block(f, u);
}

// Aggregates per-function outcomes into one summary row per check.
class Tally {
public:
    /// `value` is a residual (larger is worse) or a relative slack (smaller is worse).
    void note(const std::string& id, bool pass, double value, bool residual) {
        auto& e = entry(id);
        e.residual = residual;
        ++e.total;
        if (pass) ++e.passed;
        if (e.total == 1 || (residual ? value > e.worst : value < e.worst)) e.worst = value;
    }
    void skip(const std::string& id) { ++entry(id).skipped; }
    void flush(Run& run, const std::string& subject) const {
        std::vector<std::pair<int, std::string>> order;
        for (const auto& [id, e] : entries_) order.emplace_back(e.order, id);
        std::sort(order.begin(), order.end());
        for (const auto& [_, id] : order) {
            const auto& e = entries_.at(id);
            std::string detail = std::to_string(e.passed) + "/" + std::to_string(e.total) + " passed";
            if (e.total) detail += std::string(e.residual ? ", worst residual " : ", min relative slack ") + short_num(e.worst);
            if (e.skipped) detail += ", " + std::to_string(e.skipped) + " skipped";
            run.add({id, subject, e.passed == e.total, detail});
        }
    }

private:
    struct Entry {
        int order = -1;
        int total = 0, passed = 0, skipped = 0;
        double worst = 0.0;
        bool residual = false;
    };
    Entry& entry(const std::string& id) {
        auto& e = entries_[id];
        if (e.order < 0) e.order = static_cast<int>(entries_.size());
        return e;
    }
    std::map<std::string, Entry> entries_;
};

double relative_slack(const InequalityReport& r) {
    const double scale = std::max({std::fabs(r.lhs), std::fabs(r.rhs), 1.0});
    return r.slack / scale;
}

void cmd_classify(Run& run) {
    const WeightSpec spec = make_weight(run.cfg);
    const WeightClass wc = classify(spec, run.cfg.eta);
    const std::string line = std::string(to_string(wc.kind)) + ", " + (wc.admissible ? "admissible" : "non-admissible") +
                             ", s = " + (wc.switching_sign < 0 ? "-1" : "+1");
    run.out << line << "\n";
    auto f = run.open("classify.csv");
    f << "weight,kind,admissible,K,s,limit_at_zero,limit_value,first_violation_t\n";
    f << csv_field(spec.describe()) << "," << to_string(wc.kind) << "," << (wc.admissible ? "true" : "false") << ","
      << (wc.admissibility_constant_K ? num(*wc.admissibility_constant_K) : "") << "," << wc.switching_sign << ","
      << to_string(wc.limit_at_zero) << "," << num(wc.limit_value) << ","
      << (wc.first_violation_t ? num(*wc.first_violation_t) : "") << "\n";
    run.add({"classification", spec.describe(), true, line});
}

void cmd_transforms(Run& run) {
    const auto& cfg = run.cfg;
    const TransformSet set = transforms_for(cfg);
    std::vector<double> grid(cfg.points);
    const double lo = std::log(cfg.t_min * cfg.eta), hi = std::log(cfg.eta);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = std::exp(lo + (hi - lo) * double(i) / double(grid.size() - 1));
    grid.back() = cfg.eta;
    auto f = run.open("transforms.csv");
    f << "t,f,F,G,g,mode\n";
    for (double t : grid)
        f << num(t) << "," << num(set.eval(Which::f, t)) << "," << num(set.eval(Which::F, t)) << ","
          << num(set.eval(Which::G, t)) << "," << num(set.eval(Which::g, t)) << "," << to_string(set.mode()) << "\n";

    const std::vector<double> interior(grid.begin() + 1, grid.end() - 1);
    const auto check = check_derivative_identities(set, interior, std::max(cfg.tol, 1e-6));
    auto d = run.open("derivative_checks.csv");
    d << "t,identity,finite_difference,expected,residual,pass\n";
    for (const auto& r : check.rows)
        d << num(r.t) << "," << csv_field(r.identity) << "," << num(r.finite_difference) << "," << num(r.expected) << ","
          << num(r.residual) << "," << (r.pass ? "true" : "false") << "\n";
    double worst = 0.0;
    for (const auto& r : check.rows) worst = std::max(worst, r.residual);
    run.add({"derivative_identities", set.spec().describe(), check.skipped || check.all_pass(),
             check.skipped ? "skipped: " + check.notice
                           : std::to_string(check.rows.size()) + " checks, worst residual " + short_num(worst)});
}

void cmd_verify(Run& run) {
    const auto& cfg = run.cfg;
    const TransformSet set = transforms_for(cfg);
    const auto corpus = load_corpus(cfg);
    write_corpus(run, corpus);
    const double M = cfg.remainder_M();
    auto needs = [&](const char* name) {
        return std::find(cfg.inequalities.begin(), cfg.inequalities.end(), name) != cfg.inequalities.end();
    };
    std::optional<RemainderConstants> k;
    if (needs("nct2") || needs("c1")) k = remainder_constants(set, M);
    if (needs("c1") && !set.weight_class().admissible)
        throw PreconditionError("c1 requires an admissible weight (sqrt(t) G(t) bounded)");
    if (needs("monotone") && set.switching_sign() != 1)
        throw PreconditionError("monotone comparison requires a Q-class weight (1/w integrable at 0)");

    auto f = run.open("verify.csv");
    f << "function,inequality,lhs,rhs,slack,tolerance,pass,log_scale,flags,terms\n";
    Tally tally;
    auto emit = [&](const TestFunction& u, const std::string& id, const InequalityReport& r) {
        std::string terms, flags;
        for (const auto& [name, value] : r.lhs_terms) terms += (terms.empty() ? "" : ";") + ("lhs:" + name + "=" + num(value));
        for (const auto& [name, value] : r.rhs_terms) terms += (terms.empty() ? "" : ";") + ("rhs:" + name + "=" + num(value));
        for (const auto& fl : r.flags) flags += (flags.empty() ? "" : ";") + fl;
        f << csv_field(u.name) << "," << id << "," << num(r.lhs) << "," << num(r.rhs) << "," << num(r.slack) << ","
          << num(r.tolerance_used) << "," << (r.pass ? "true" : "false") << "," << num(r.log_scale) << ","
          << csv_field(flags) << "," << csv_field(terms) << "\n";
        tally.note(id, r.pass, relative_slack(r), false);
    };
    const auto ramp = [eta = cfg.eta](double t) { return t / eta; };
    for (const auto& u : corpus) {
        try {
            const HardyTerms terms = hardy_terms(u, set);
            for (const auto& name : cfg.inequalities) {
                if (name == "nct1") emit(u, "nct1", report_nct1(terms, set, cfg.tol));
                else if (name == "nct2") emit(u, "nct2", report_nct2(terms, set, *k, cfg.tol));
                else if (name == "c1") {
                    const double K = *set.weight_class().admissibility_constant_K;
                    emit(u, "c1", report_c1(u, set, k->C / 2.0, 1e-3 * k->C / (K * K), k->L, cfg.tol));
                } else if (name == "monotone") emit(u, "monotone_comparison", monotone_comparison(u, set, ramp, cfg.tol));
            }
            if (cfg.corollary) {
                CorollaryParams cp{cfg.p, cfg.eta, cfg.mu, cfg.alpha, cfg.R};
                const auto c = corollary_check(*cfg.corollary, u, cp, cfg.tol);
                InequalityReport r = c.report;
                r.flags.push_back("cross_check=" + num(c.cross_check_residual));
                emit(u, std::string("corollary_") + to_string(*cfg.corollary), r);
            }
        } catch (const DivergenceError& e) {
            f << csv_field(u.name) << ",all,,,,,false,,divergent," << csv_field(e.what()) << "\n";
            run.code = combine_exit_codes(run.code, kExitNonConvergence);
            run.err << "function " << u.name << ": " << e.what() << "\n";
        }
    }
    tally.flush(run, std::to_string(corpus.size()) + " functions, " + set.spec().describe());
}

void cmd_identities(Run& run) {
    const auto& cfg = run.cfg;
    const TransformSet set = transforms_for(cfg);
    const auto corpus = load_corpus(cfg);
    write_corpus(run, corpus);
    const double M = cfg.remainder_M();
    const auto& wc = set.weight_class();
    auto f = run.open("identities.csv");
    f << "function,check,value,threshold,pass,detail\n";
    Tally tally;
    auto emit = [&](const std::string& fn, const std::string& id, double value, double threshold, bool pass,
                    const std::string& detail, bool residual) {
        f << csv_field(fn) << "," << id << "," << num(value) << "," << num(threshold) << "," << (pass ? "true" : "false")
          << "," << csv_field(detail) << "\n";
        tally.note(id, pass, value, residual);
    };

    const ElementaryConstant c = cfg.p >= 2.0 ? elementary_lower_bound_q(cfg.p, 2.0) : elementary_lower_bound_M(cfg.p, M);
    emit("-", "elementary_constant", c.c_estimate, 0.0, c.c_estimate > 0.0, "argmin X = " + num(c.argmin_X),
         false);

    for (const auto& u : corpus) {
        const SubstitutionFrame frame = substitution_frame(u, set, M);
        for (const auto& s : sweep_identities(frame)) {
            const std::string detail = "worst at t = " + num(s.worst_t) + ", " + std::to_string(s.checked) +
                                       " checked, " + std::to_string(s.skipped) + " skipped";
            emit(u.name, std::string("identity_") + to_string(s.id), s.worst_residual, 1e-8, s.worst_residual <= 1e-8,
                 detail, true);
        }
        try {
            const auto b = boundary_integral_check(frame);
            emit(u.name, "boundary_integral", b.residual, 1e-6, b.residual <= 1e-6,
                 "lhs " + num(b.lhs) + ", rhs " + num(b.rhs), true);
        } catch (const PreconditionError& e) {
            f << csv_field(u.name) << ",boundary_integral,,1e-06,skipped," << csv_field(e.what()) << "\n";
            tally.skip("boundary_integral");
        }
        auto report_row = [&](const std::string& id, const InequalityReport& r) {
            f << csv_field(u.name) << "," << id << "," << num(r.slack) << "," << num(-r.tolerance_used) << ","
              << (r.pass ? "true" : "false") << "," << csv_field("lhs " + num(r.lhs) + ", rhs " + num(r.rhs)) << "\n";
            tally.note(id, r.pass, relative_slack(r), false);
        };
        report_row("ground_state", ground_state_check(frame, std::vector<bool>(frame.nodes.size(), true), cfg.tol));
        report_row("ground_state_full", ground_state_full(frame, cfg.tol));
        report_row("assembled_remainder", assembled_remainder_check(frame, cfg.tol));
        if (wc.admissible) report_row("t_weight_bound", weighted_t_bound_check(u, set, *wc.admissibility_constant_K, cfg.tol));
        const auto pb = pointwise_derivative_bound(frame);
        emit(u.name, "pointwise_bound", pb.worst_ratio, 1.0 + 1e-9, pb.worst_ratio <= 1.0 + 1e-9,
             std::to_string(pb.checked) + " checked, " + std::to_string(pb.skipped) + " skipped", true);
    }
    tally.flush(run, std::to_string(corpus.size()) + " functions, " + set.spec().describe());
}

void cmd_sharpness(Run& run) {
    const auto& cfg = run.cfg;
    const TransformSet set = transforms_for(cfg);
    const auto rows = sharpness_sweep(set, cfg.eps);
    const double pp = cfg.p * set.params().conjugate();
    auto f = run.open("sharpness.csv");
    f << "ε,lhs,rhs,ratio,convexity_gap\n";
    auto d = run.open("sharpness_detail.csv");
    d << "eps,analytic_lhs,analytic_rhs,analytic_ratio,discrepancy,discrepancy_flag,analytic_only,exponent_warning,notice\n";
    for (const auto& r : rows) {
        f << num(r.eps) << "," << num(r.lhs) << "," << num(r.rhs) << "," << num(r.ratio) << "," << num(r.convexity_gap)
          << "\n";
        d << num(r.eps) << "," << num(r.analytic_lhs) << "," << num(r.analytic_rhs) << "," << num(r.analytic_ratio) << ","
          << num(r.discrepancy) << "," << (r.discrepancy_flag ? "true" : "false") << ","
          << (r.analytic_only ? "true" : "false") << "," << (r.exponent_warning ? "true" : "false") << ","
          << csv_field(r.notice) << "\n";
        const bool ratio_ok = 1.0 - r.ratio <= 3.0 * r.eps * pp;
        const bool agree = r.analytic_only || r.eps < 1e-3 || r.discrepancy <= 1e-4;
        const bool pass = ratio_ok && r.convexity_gap >= 0.0 && agree;
        run.add({"sharpness", "eps = " + num(r.eps), pass,
                 "ratio " + num(r.ratio) + ", 1 - ratio <= 3 eps p p' " + (ratio_ok ? "holds" : "fails") +
                     ", discrepancy " + short_num(r.discrepancy) + (r.analytic_only ? " (analytic only)" : "")});
    }
}

void cmd_minimize(Run& run) {
    const auto& cfg = run.cfg;
    const TransformSet set = transforms_for(cfg);
    const double floor = cfg.t_floor ? *cfg.t_floor : default_t_floor(set);
    const auto r = minimize_quotient(set, log_mesh(floor, cfg.eta, cfg.nodes), cfg.boundary);
    auto h = run.open("history.csv");
    h << "iteration,value\n";
    for (std::size_t i = 0; i < r.history.size(); ++i) h << i << "," << num(r.history[i]) << "\n";
    auto m = run.open("minimizer.csv");
    write_corpus_block(m, r.minimizer);
    const double lambda = cfg.params().lambda_p();
    run.add({"minimize", set.spec().describe() + ", t_floor = " + num(floor), r.value >= lambda - 1e-9,
             "value " + num(r.value) + " vs Lambda_p " + num(lambda) + ", " + r.method + ", " +
                 std::to_string(r.iterations) + " iterations" + (r.converged ? "" : ", not converged")});
    if (!r.converged) {
        run.err << "minimization did not converge within the iteration budget\n";
        run.code = combine_exit_codes(run.code, kExitNonConvergence);
    }
    if (!cfg.infimum_floors.empty()) {
        std::vector<Mesh> meshes;
        for (double t : cfg.infimum_floors) meshes.push_back(log_mesh(t, cfg.eta, cfg.nodes));
        const auto rows = infimum_zero_demo(make_weight(cfg), cfg.params(), meshes);
        auto f = run.open("infimum.csv");
        f << "t_floor,minimum,log_minimum,log_continuum_minimum,log_vanishing_energy\n";
        bool decreasing = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& x = rows[i];
            f << num(x.t_floor) << "," << num(x.minimum) << "," << num(x.log_minimum) << ","
              << num(x.log_continuum_minimum) << "," << num(x.log_vanishing_energy) << "\n";
            if (i && !(x.log_minimum < rows[i - 1].log_minimum)) decreasing = false;
        }
        std::string detail = "minima";
        for (const auto& x : rows) detail += " " + short_num(x.minimum);
        detail += decreasing ? ", decreasing as t_floor decreases" : ", NOT decreasing";
        run.add({"infimum_zero", set.spec().describe(), decreasing, detail});
    }
}

using Handler = void (*)(Run&);

Handler handler_for(Command c) {
    switch (c) {
        case Command::classify: return cmd_classify;
        case Command::transforms: return cmd_transforms;
        case Command::verify: return cmd_verify;
        case Command::identities: return cmd_identities;
        case Command::sharpness: return cmd_sharpness;
        case Command::minimize: return cmd_minimize;
        case Command::report: return nullptr;
    }
    return nullptr;
}

// Runs one handler and maps exceptions to exit codes.
int guarded(Run& run, Handler h) {
    try {
        h(run);
        return kExitOk;
    } catch (const OutputError& e) {
        run.err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        run.err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        run.err << "precondition violated: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        run.err << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ExtrapolationError& e) {
        run.err << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InconclusiveError& e) {
        run.err << "inconclusive: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const DivergenceError& e) {
        run.err << "divergent integral: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const EvaluationError& e) {
        run.err << "numerical failure: " << e.what() << "\n";
        return kExitNonConvergence;
    }
}

void write_summary(Run& run) {
    auto f = run.open("summary.txt");
    f << "tag\tresult\tsubject\tstatus\tdetail\n";
    for (const auto& r : run.rows)
        f << equation_tag(r.id) << "\t" << r.id << "\t" << r.subject << "\t" << (r.pass ? "PASS" : "FAIL") << "\t"
          << r.detail << "\n";
}

void write_manifest(Run& run, double seconds) {
    std::ofstream f(run.dir / "manifest.txt", std::ios::binary);
    if (!f) throw OutputError("cannot write manifest");
    f << "hardy " << kVersion << "\n"
      << "command: " << to_string(*run.cfg.command) << "\n"
      << "seed: " << run.cfg.seed << "\n"
      << "exit_code: " << run.code << "\n"
      << "wall_time_s: " << short_num(seconds) << "\n"
      << "compiler: " << __VERSION__ << "\n"
      << "outputs:";
    for (const auto& name : run.files) f << " " << name;
    f << " manifest.txt\n\n# effective configuration\n" << to_text(run.cfg);
}

}  // namespace

std::string equation_tag(const std::string& id) {
    for (const auto& e : kTags)
        if (id == e.id) return e.tag;
    return "-";
}

int combine_exit_codes(int a, int b) {
    auto rank = [](int c) { return c == kExitUsage ? 3 : c == kExitNonConvergence ? 2 : c == kExitFailure ? 1 : 0; };
    return rank(a) >= rank(b) ? a : b;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.command) {
        err << "usage error: no command given\n";
        return kExitUsage;
    }
    const auto violations = validate(cfg);
    if (!violations.empty()) {
        for (const auto& v : violations) err << "invalid configuration: " << v << "\n";
        return kExitUsage;
    }
    const auto start = std::chrono::steady_clock::now();
    Run run{cfg, out, err, std::filesystem::path(cfg.out), {}, {}, kExitOk};
    std::error_code ec;
    std::filesystem::create_directories(run.dir, ec);
    if (ec || !std::filesystem::is_directory(run.dir)) {
        err << "error: cannot create output directory " << cfg.out << "\n";
        return kExitUsage;
    }

    int code = kExitOk;
    if (*cfg.command == Command::report) {
        for (Command c : {Command::classify, Command::transforms, Command::verify, Command::identities,
                          Command::sharpness, Command::minimize})
            code = combine_exit_codes(code, guarded(run, handler_for(c)));
    } else {
        code = guarded(run, handler_for(*cfg.command));
    }
    run.code = combine_exit_codes(run.code, code);
    try {
        write_summary(run);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(run, seconds);
    } catch (const OutputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    for (const auto& r : run.rows)
        if (!r.pass) out << "FAIL " << r.id << " [" << equation_tag(r.id) << "] " << r.subject << ": " << r.detail << "\n";
    return run.code;
}

}  // namespace hardy
