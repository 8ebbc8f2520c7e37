#pragma once

#include "viralcm/graph.hpp"

#include <cstdint>
#include <vector>

namespace viralcm {

struct BowTie {
    std::vector<VertexId> core;    // largest SCC, ties broken by smallest contained id
    std::vector<VertexId> in_set;  // reaches the core, core excluded
    std::vector<VertexId> out_set; // reachable from the core, core excluded
};

struct ComponentReport {
    double epsilon = 0.0;
    std::size_t n = 0;
    std::uint64_t core_size = 0;
    std::uint64_t in_size = 0;
    std::uint64_t out_size = 0;
    std::uint64_t c_star_size = 0;     // |core ∪ OUT|
    std::uint64_t c_bar_star_size = 0; // |core ∪ IN|
    std::uint64_t count_small = 0;
    std::uint64_t count_large = 0;
    std::uint64_t count_small_bar = 0;
    std::uint64_t count_large_bar = 0;
    std::uint64_t sample_violations = 0;
    std::uint64_t sample_size = 0;
    bool has_big_component = false;
    double max_sampled_forward_frac = 0.0; // max |C(x)|/n over the sampled vertices

    // membership masks kept for the duality statistics
    std::vector<std::uint8_t> influenced_mask; // core ∪ OUT  (C*)
    std::vector<std::uint8_t> pioneer_mask;    // core ∪ IN   (structural big-forward class)
};

struct DualityReport {
    double epsilon = 0.0;
    double theorem5_lhs = 0.0;
    double corollary6_lhs = 0.0;
    bool has_big_component = false;
};

// Directed reachability including the source itself.
std::vector<VertexId> forward_set(const Digraph& g, VertexId x);
std::vector<VertexId> backward_set(const Digraph& g, VertexId y);

BowTie bow_tie(const Digraph& g);

// Structural classification (core ∪ IN big, rest small) plus exact forward
// searches on a uniform vertex sample to count contradictions.
ComponentReport classify(const Digraph& g, double epsilon, std::size_t sample_size,
                         std::uint64_t seed);

DualityReport duality_stats(const Digraph& g, double epsilon, const ComponentReport& report);

// Sampled (or exhaustive when pairs >= n^2) check of y ∈ C(x) ⟺ x ∈ C̄(y).
std::uint64_t tautology_check(const Digraph& g, std::uint64_t pairs, std::uint64_t seed);

// |C(x) △ C(x')|/n for sampled pairs x, x' from the structural big-forward
// class; empty when the report has no big component.
std::vector<double> uniqueness_probe(const Digraph& g, const ComponentReport& report,
                                     std::size_t pairs, std::uint64_t seed);

} // namespace viralcm
