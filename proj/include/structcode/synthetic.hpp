#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "structcode/graph.hpp"
#include "structcode/random.hpp"

namespace structcode {

// Deterministic generators for demo datasets and property tests. Labels are
// lowercase word sequences, unique per graph after sanitization, so every
// generated instance round-trips through every applicable format.

std::string random_label(Rng& rng, std::size_t min_words = 2, std::size_t max_words = 4);

// Weakly connected DAG with `n` nodes: each node after the first gets an edge
// from a random earlier node, plus extra forward edges with probability
// `extra_edge_prob`. Edge and node order are shuffled.
LabeledGraph random_dag(Rng& rng, std::size_t n, double extra_edge_prob = 0.2);

TaskInstance random_script(Rng& rng, const std::string& id, TaskKind task, std::size_t min_nodes = 3,
                           std::size_t max_nodes = 12);

// Explanation graph that passes structural_accuracy against its own belief
// and argument: two concepts from each, joined into one connected DAG with
// typed edges.
TaskInstance random_explanation(Rng& rng, const std::string& id);

TaskInstance random_trace(Rng& rng, const std::string& id);

// `count` instances with ids "<prefix>0", "<prefix>1", ...
std::vector<TaskInstance> synthetic_dataset(TaskKind task, std::size_t count, std::uint64_t seed,
                                            const std::string& prefix = "x");

}  // namespace structcode
