#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace mixhit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sorted, duplicate-free list of state indices.
using StateSet = std::vector<std::size_t>;

StateSet make_set(std::vector<std::size_t> members, std::size_t n);
StateSet complement(const StateSet& set, std::size_t n);
StateSet all_states(std::size_t n);
std::vector<char> indicator(const StateSet& set, std::size_t n);
double measure(const Vector& pi, const StateSet& set);
bool contains(const StateSet& set, std::size_t x);
bool is_subset(const StateSet& small, const StateSet& big);

// Lexicographic order on sorted index lists.
bool lex_less(const StateSet& a, const StateSet& b);

std::string format_set(const StateSet& set, const std::vector<std::string>& labels);

}  // namespace mixhit
