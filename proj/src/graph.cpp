#include "viralcm/graph.hpp"

#include "viralcm/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace viralcm {

std::uint64_t DegreeSequence::total_half_edges() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < d_r.size(); ++i)
        s += static_cast<std::uint64_t>(d_r[i]) + static_cast<std::uint64_t>(d_t[i]);
    return s;
}

int DegreeSequence::d_max() const {
    int m = 0;
    for (std::size_t i = 0; i < d_r.size(); ++i)
        m = std::max(m, d_r[i] + d_t[i]);
    return m;
}

std::map<std::pair<int, int>, std::uint64_t> DegreeSequence::cell_counts() const {
    std::map<std::pair<int, int>, std::uint64_t> u;
    for (std::size_t i = 0; i < d_r.size(); ++i)
        ++u[{d_r[i], d_t[i]}];
    return u;
}

DegreeSequence sample_degree_sequence(const JointDegreeDistribution& dist, std::size_t n,
                                      std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");

    const auto& cells = dist.cells();
    std::vector<double> cdf(cells.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        acc += cells[i].p;
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    SplitMix64 rng(seed);
    DegreeSequence seq;
    seq.d_r.resize(n);
    seq.d_t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_double();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const auto& c = cells[static_cast<std::size_t>(it - cdf.begin())];
        seq.d_r[i] = c.k;
        seq.d_t[i] = c.l;
    }
    if (seq.total_half_edges() % 2 != 0) {
        // parity fix: one extra receiver half-edge, transmitter counts untouched
        seq.d_r[rng.next_below(n)] += 1;
    }
    return seq;
}

std::vector<HalfEdge> build_half_edges(const DegreeSequence& seq) {
    std::vector<HalfEdge> halves;
    halves.reserve(seq.total_half_edges());
    for (std::size_t v = 0; v < seq.n(); ++v) {
        for (int j = 0; j < seq.d_r[v]; ++j)
            halves.push_back({static_cast<VertexId>(v), HalfEdgeKind::Receiver});
        for (int j = 0; j < seq.d_t[v]; ++j)
            halves.push_back({static_cast<VertexId>(v), HalfEdgeKind::Transmitter});
    }
    return halves;
}

EnhancedMultigraph EnhancedMultigraph::from_pairs(
    const DegreeSequence& seq, const std::vector<std::pair<HalfEdgeId, HalfEdgeId>>& pairs) {
    EnhancedMultigraph g;
    g.n = seq.n();
    g.half_edges = build_half_edges(seq);
    g.matching.assign(g.half_edges.size(), 0);
    std::vector<bool> seen(g.half_edges.size(), false);
    if (pairs.size() * 2 != g.half_edges.size())
        throw std::invalid_argument("pair list does not cover all half-edges");
    for (const auto& [a, b] : pairs) {
        if (a == b || a >= g.half_edges.size() || b >= g.half_edges.size() || seen[a] || seen[b])
            throw std::invalid_argument("invalid matching pair");
        seen[a] = seen[b] = true;
        g.matching[a] = b;
        g.matching[b] = a;
    }
    return g;
}

EnhancedMultigraph uniform_matching(const DegreeSequence& seq, std::uint64_t seed) {
    EnhancedMultigraph g;
    g.n = seq.n();
    g.half_edges = build_half_edges(seq);
    const std::size_t total = g.half_edges.size();
    if (total < 2) throw std::invalid_argument("need at least one edge worth of half-edges");
    if (total % 2 != 0) throw std::invalid_argument("odd number of half-edges");

    std::vector<HalfEdgeId> perm(total);
    std::iota(perm.begin(), perm.end(), 0u);
    SplitMix64 rng(seed);
    for (std::size_t i = total - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.next_below(i + 1)]);

    g.matching.assign(total, 0);
    for (std::size_t i = 0; i < total; i += 2) {
        g.matching[perm[i]] = perm[i + 1];
        g.matching[perm[i + 1]] = perm[i];
    }
    return g;
}

Digraph EnhancedMultigraph::influence_digraph() const {
    std::vector<std::pair<VertexId, VertexId>> arcs;
    arcs.reserve(half_edges.size() / 2);
    for (HalfEdgeId h = 0; h < half_edges.size(); ++h)
        if (half_edges[h].kind == HalfEdgeKind::Transmitter)
            arcs.emplace_back(half_edges[h].owner, half_edges[matching[h]].owner);
    return Digraph::from_arcs(n, arcs);
}

MultigraphStats EnhancedMultigraph::stats() const {
    MultigraphStats s;
    std::map<std::pair<VertexId, VertexId>, std::uint64_t> mult;
    std::vector<int> deg(n, 0);
    for (HalfEdgeId h = 0; h < half_edges.size(); ++h) {
        ++deg[half_edges[h].owner];
        const HalfEdgeId p = matching[h];
        if (h < p) {
            VertexId u = half_edges[h].owner, v = half_edges[p].owner;
            if (u == v) {
                ++s.self_loops;
            } else {
                if (u > v) std::swap(u, v);
                ++mult[{u, v}];
            }
        }
    }
    for (const auto& [_, c] : mult)
        if (c > 1) s.multi_edges += c - 1;
    for (int d : deg) s.d_max = std::max(s.d_max, d);
    return s;
}

Digraph Digraph::from_arcs(std::size_t n,
                           const std::vector<std::pair<VertexId, VertexId>>& arcs) {
    Digraph g;
    g.n = n;
    g.offsets.assign(n + 1, 0);
    for (const auto& [u, v] : arcs) {
        if (u >= n || v >= n) throw std::invalid_argument("arc endpoint out of range");
        ++g.offsets[u + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets[i + 1] += g.offsets[i];
    g.targets.resize(arcs.size());
    std::vector<std::uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
    for (const auto& [u, v] : arcs) g.targets[cursor[u]++] = v;
    return g;
}

Digraph Digraph::transpose() const {
    Digraph t;
    t.n = n;
    t.offsets.assign(n + 1, 0);
    for (const VertexId v : targets) ++t.offsets[v + 1];
    for (std::size_t i = 0; i < n; ++i) t.offsets[i + 1] += t.offsets[i];
    t.targets.resize(targets.size());
    std::vector<std::uint64_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
    for (std::size_t u = 0; u < n; ++u)
        for (std::uint64_t j = offsets[u]; j < offsets[u + 1]; ++j)
            t.targets[cursor[targets[j]]++] = static_cast<VertexId>(u);
    return t;
}

} // namespace viralcm
