#pragma once

// Corpora of piecewise-linear test functions: CSV blocks on disk and
// seeded random generation.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "hardy/test_function.hpp"

namespace hardy {

/// Random piecewise-linear function on a log-spaced grid from eta 10^{-1-3U} to eta,
/// vanishing at its first node, with values in [0, 1].
TestFunction random_test_function(std::mt19937_64& rng, double eta, int min_nodes = 8, int max_nodes = 64);

/// `count` functions named "random_<seed>_<index>".
std::vector<TestFunction> random_corpus(std::size_t count, double eta, std::uint64_t seed);

/// Blocks of "t,u" rows separated by blank lines. A line "# name" names the next
/// block and a "t,u" header line is skipped. Throws DomainError with the line
/// number on malformed rows.
std::vector<TestFunction> parse_corpus(std::istream& in);
std::vector<TestFunction> read_corpus(const std::string& path);

/// Writes one block in the format read by parse_corpus.
void write_corpus_block(std::ostream& out, const TestFunction& u);

}  // namespace hardy
