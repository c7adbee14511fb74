#pragma once

// Hardy-type inequality functionals evaluated on test functions, with
// itemized terms and signed slack.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hardy/test_function.hpp"
#include "hardy/transforms.hpp"

namespace hardy {

using TermList = std::vector<std::pair<std::string, double>>;

struct InequalityReport {
    std::string inequality_id;
    TermList lhs_terms;
    TermList rhs_terms;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // lhs - rhs
    double tolerance_used = 0.0;
    bool pass = true;
    std::vector<std::string> flags;
    double log_scale = 0.0;  // every term is multiplied by exp(-log_scale)

    double term(const std::string& name) const;
};

/// Default tolerance: rel_tol * max(|lhs|, |rhs|, 1).
InequalityReport make_report(std::string id, TermList lhs, TermList rhs, double rel_tol = 1e-6);

using LogTermList = std::vector<std::pair<std::string, LogValue>>;
/// Same as make_report; when a term would overflow a double, all terms are
/// divided by a common factor exp(log_scale) first.
InequalityReport make_log_report(std::string id, const LogTermList& lhs, const LogTermList& rhs,
                                 double rel_tol = 1e-6);
/// Largest finite log-magnitude above 600, else 0.
double common_log_scale(const std::vector<LogValue>& values);

/// Integrals shared by the reports, all over (0, eta].
struct HardyTerms {
    double energy = 0.0;     // int |u'|^p W_p
    double hardy = 0.0;      // int |u|^p W_p / F^p
    double remainder = 0.0;  // int |u|^p W_p / (F^p G^2)
    double boundary = 0.0;   // |u(eta)|^p / f(eta)^{p-1}
    bool improper_tail = false;
    double log_scale = 0.0;  // the four values above are multiplied by exp(-log_scale)
};

double energy(const TestFunction& u, const TransformSet& set);
double hardy_integral(const TestFunction& u, const TransformSet& set);
double remainder_integral(const TestFunction& u, const TransformSet& set);
HardyTerms hardy_terms(const TestFunction& u, const TransformSet& set, bool with_remainder = true);

InequalityReport report_nct1(const TestFunction& u, const TransformSet& set, double rel_tol = 1e-6);
InequalityReport report_nct1(const HardyTerms& terms, const TransformSet& set, double rel_tol = 1e-6);

struct RemainderConstants {
    double c = 0.0;      // elementary constant c(p)
    double d = 0.0;      // c(p) 4 p' / p^2
    double d_used = 0.0; // d, capped in the Q class so that L > 0
    double M = 1.0;
    double C = 0.0;
    double L = 0.0;
};

/// C and L of the remainder inequality. For p >= 2, M is ignored.
/// Throws PreconditionError for 1 < p < 2 when 1 - 2/(mu (p-1) M) <= 0.
RemainderConstants remainder_constants(const TransformSet& set, double M);

InequalityReport report_nct2(const TestFunction& u, const TransformSet& set, double M, double rel_tol = 1e-6);
InequalityReport report_nct2(const HardyTerms& terms, const TransformSet& set, const RemainderConstants& k,
                             double rel_tol = 1e-6);

/// Two-sided remainder form with t-weighted right-hand side; admissible weights only.
InequalityReport report_c1(const TestFunction& u, const TransformSet& set, double C0, double C1, double L,
                           double rel_tol = 1e-6);

enum class Corollary { D, G, F, E, B };
const char* to_string(Corollary c);

struct CorollaryParams {
    double p = 2.0;
    double eta = 1.0;
    double mu = 1.0;     // D
    double alpha = 0.0;  // F, B
    double R = 0.0;      // E
};

struct CorollaryReport {
    InequalityReport report;
    InequalityReport nct1;       // same inequality through the transforms
    double cross_check_residual;  // max relative term discrepancy
};

/// Evaluates the corollary with its explicit potential and cross-checks it
/// against report_nct1 with the matching weight and mu.
CorollaryReport corollary_check(Corollary which, const TestFunction& u, const CorollaryParams& params,
                                double rel_tol = 1e-6);

/// int (|u'|^p - Lambda_p |u|^p / F^p) W_p  >=  the same with the extra factor f.
/// Q class only; f must be non-decreasing with f(eta) <= 1.
InequalityReport monotone_comparison(const TestFunction& u, const TransformSet& set,
                                     const std::function<double(double)>& f, double rel_tol = 1e-6);

}  // namespace hardy
