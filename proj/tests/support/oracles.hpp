#pragma once

// Slow, obviously-correct reference implementations used only by tests.

#include <cstddef>
#include <vector>

#include "structcode/graph.hpp"

namespace oracles {

// Minimum number of node/edge insertions and deletions turning g1 into g2,
// where a node may only survive onto a node with the same normalized label.
// Enumerates every partial injective node map, builds the edit script it
// implies, applies it to a copy of g1 and checks the result equals g2 up to
// renaming before accepting its cost.
std::size_t brute_force_ged(const structcode::LabeledGraph& g1, const structcode::LabeledGraph& g2);

// Tries all |V|! bijections, labels ignored.
bool brute_force_isomorphic(const structcode::LabeledGraph& g1, const structcode::LabeledGraph& g2);

// Max total weight of a one-to-one matching, by enumerating permutations of
// the larger side.
double brute_force_assignment(const std::vector<std::vector<double>>& w);

}  // namespace oracles
