#pragma once

#include "viralcm/degree_model.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace viralcm {

using VertexId = std::uint32_t;
using HalfEdgeId = std::uint32_t;

enum class HalfEdgeKind : std::uint8_t { Receiver = 0, Transmitter = 1 };

struct DegreeSequence {
    std::vector<int> d_r; // receiver degrees per vertex
    std::vector<int> d_t; // transmitter degrees per vertex

    std::size_t n() const { return d_r.size(); }
    std::uint64_t total_half_edges() const; // 2m
    int d_max() const;
    // empirical cell counts u_{k,l}
    std::map<std::pair<int, int>, std::uint64_t> cell_counts() const;
};

// i.i.d. draws from the pmf; if the resulting total degree is odd one extra
// receiver half-edge goes to a uniformly chosen vertex.
DegreeSequence sample_degree_sequence(const JointDegreeDistribution& dist, std::size_t n,
                                      std::uint64_t seed);

struct HalfEdge {
    VertexId owner;
    HalfEdgeKind kind;
};

// Directed influence graph in CSR form; one arc per transmitter half-edge,
// from its owner to the matched partner's owner. Self-loops retained.
struct Digraph {
    std::size_t n = 0;
    std::vector<std::uint64_t> offsets; // n+1
    std::vector<VertexId> targets;

    static Digraph from_arcs(std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& arcs);
    Digraph transpose() const;
    std::uint64_t arc_count() const { return targets.size(); }
};

struct MultigraphStats {
    std::uint64_t self_loops = 0;
    std::uint64_t multi_edges = 0; // edges in excess over distinct non-loop vertex pairs
    int d_max = 0;
};

struct EnhancedMultigraph {
    std::vector<HalfEdge> half_edges;
    std::vector<HalfEdgeId> matching; // fixed-point-free involution on half-edge ids
    std::size_t n = 0;

    // Builds from an explicit matched pair list (tests, oracle, exploration).
    static EnhancedMultigraph from_pairs(const DegreeSequence& seq,
                                         const std::vector<std::pair<HalfEdgeId, HalfEdgeId>>& pairs);

    Digraph influence_digraph() const;
    MultigraphStats stats() const;
};

// Half-edges laid out vertex by vertex, receivers first; the order only fixes
// indexing, the shuffle below makes the matching uniform.
std::vector<HalfEdge> build_half_edges(const DegreeSequence& seq);

// Uniform perfect matching via Fisher-Yates shuffle paired consecutively.
EnhancedMultigraph uniform_matching(const DegreeSequence& seq, std::uint64_t seed);

} // namespace viralcm
