#include "hardy/corpus.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& text, double& out) {
    const std::string s = trim(text);
    const char* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, out);
    return r.ec == std::errc() && r.ptr == end;
}

}  // namespace

TestFunction random_test_function(std::mt19937_64& rng, double eta, int min_nodes, int max_nodes) {
    std::uniform_int_distribution<int> count(min_nodes, max_nodes);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = count(rng);
    const double lo = eta * std::pow(10.0, -1.0 - 3.0 * unit(rng));
    std::vector<double> grid, values;
    for (int i = 0; i < n; ++i) {
        grid.push_back(lo * std::pow(eta / lo, static_cast<double>(i) / (n - 1)));
        values.push_back(i == 0 ? 0.0 : unit(rng));
    }
    grid.back() = eta;
    return TestFunction::piecewise_linear(grid, values);
}

std::vector<TestFunction> random_corpus(std::size_t count, double eta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TestFunction> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(random_test_function(rng, eta));
        out.back().name = "random_" + std::to_string(seed) + "_" + std::to_string(i);
    }
    return out;
}

std::vector<TestFunction> parse_corpus(std::istream& in) {
    std::vector<TestFunction> out;
    std::vector<double> grid, values;
    std::string name;
    int line_no = 0;
    auto flush = [&]() {
        if (grid.empty()) return;
        TestFunction u = TestFunction::piecewise_linear(grid, values);
        u.name = name.empty() ? "function_" + std::to_string(out.size()) : name;
        out.push_back(std::move(u));
        grid.clear();
        values.clear();
        name.clear();
    };
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty()) {
            flush();
            continue;
        }
        if (s[0] == '#') {
            flush();
            name = trim(s.substr(1));
            continue;
        }
        if (s == "t,u") continue;
        const auto comma = s.find(',');
        double t = 0.0, u = 0.0;
        if (comma == std::string::npos || !parse_double(s.substr(0, comma), t) ||
            !parse_double(s.substr(comma + 1), u))
            throw DomainError("corpus line " + std::to_string(line_no) + ": expected 't,u', got '" + s + "'");
        grid.push_back(t);
        values.push_back(u);
    }
    flush();
    return out;
}

std::vector<TestFunction> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open corpus file " + path);
    return parse_corpus(in);
}

void write_corpus_block(std::ostream& out, const TestFunction& u) {
    if (!u.name.empty()) out << "# " << u.name << "\n";
    out << "t,u\n";
    const auto values = u.values();
    const auto& grid = u.grid();
    out << std::setprecision(17);
    for (std::size_t i = 0; i < grid.size(); ++i) out << grid[i] << "," << values[i] << "\n";
    out << "\n";
}

}  // namespace hardy
