#include "viralcm/propagation.hpp"

#include "viralcm/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace viralcm {

namespace {

// BFS into a caller-provided visited mask; returns visited vertex list.
std::vector<VertexId> reach(const Digraph& g, VertexId source, std::vector<std::uint8_t>& visited,
                            std::vector<VertexId>& queue) {
    queue.clear();
    queue.push_back(source);
    visited[source] = 1;
    std::size_t head = 0;
    while (head < queue.size()) {
        const VertexId u = queue[head++];
        for (std::uint64_t j = g.offsets[u]; j < g.offsets[u + 1]; ++j) {
            const VertexId v = g.targets[j];
            if (!visited[v]) {
                visited[v] = 1;
                queue.push_back(v);
            }
        }
    }
    return queue;
}

std::vector<VertexId> reach_from_many(const Digraph& g, const std::vector<VertexId>& sources,
                                      std::vector<std::uint8_t>& visited) {
    std::vector<VertexId> queue;
    for (const VertexId s : sources) {
        visited[s] = 1;
        queue.push_back(s);
    }
    std::size_t head = 0;
    while (head < queue.size()) {
        const VertexId u = queue[head++];
        for (std::uint64_t j = g.offsets[u]; j < g.offsets[u + 1]; ++j) {
            const VertexId v = g.targets[j];
            if (!visited[v]) {
                visited[v] = 1;
                queue.push_back(v);
            }
        }
    }
    return queue;
}

// Iterative Tarjan; recursion would overflow on long chains at n = 1e5+.
std::vector<std::vector<VertexId>> strongly_connected_components(const Digraph& g) {
    const std::size_t n = g.n;
    constexpr std::uint32_t kUnset = 0xffffffffu;
    std::vector<std::uint32_t> index(n, kUnset), lowlink(n, 0);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<VertexId> stack;
    std::vector<std::vector<VertexId>> sccs;
    std::uint32_t counter = 0;

    struct Frame {
        VertexId v;
        std::uint64_t next_arc;
    };
    std::vector<Frame> call;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        call.push_back({static_cast<VertexId>(root), g.offsets[root]});
        index[root] = lowlink[root] = counter++;
        stack.push_back(static_cast<VertexId>(root));
        on_stack[root] = 1;

        while (!call.empty()) {
            Frame& f = call.back();
            const VertexId v = f.v;
            if (f.next_arc < g.offsets[v + 1]) {
                const VertexId w = g.targets[f.next_arc++];
                if (index[w] == kUnset) {
                    index[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, g.offsets[w]});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
            } else {
                call.pop_back();
                if (!call.empty())
                    lowlink[call.back().v] = std::min(lowlink[call.back().v], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    std::vector<VertexId> scc;
                    for (;;) {
                        const VertexId w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        scc.push_back(w);
                        if (w == v) break;
                    }
                    sccs.push_back(std::move(scc));
                }
            }
        }
    }
    return sccs;
}

} // namespace

std::vector<VertexId> forward_set(const Digraph& g, VertexId x) {
    if (x >= g.n) throw std::invalid_argument("vertex id out of range");
    std::vector<std::uint8_t> visited(g.n, 0);
    std::vector<VertexId> queue;
    return reach(g, x, visited, queue);
}

std::vector<VertexId> backward_set(const Digraph& g, VertexId y) {
    return forward_set(g.transpose(), y);
}

BowTie bow_tie(const Digraph& g) {
    if (g.n == 0) throw std::invalid_argument("empty digraph");
    auto sccs = strongly_connected_components(g);

    std::size_t best = 0;
    VertexId best_min = *std::min_element(sccs[0].begin(), sccs[0].end());
    for (std::size_t i = 1; i < sccs.size(); ++i) {
        const VertexId mn = *std::min_element(sccs[i].begin(), sccs[i].end());
        if (sccs[i].size() > sccs[best].size() ||
            (sccs[i].size() == sccs[best].size() && mn < best_min)) {
            best = i;
            best_min = mn;
        }
    }

    BowTie bt;
    bt.core = std::move(sccs[best]);
    std::sort(bt.core.begin(), bt.core.end());

    std::vector<std::uint8_t> in_core(g.n, 0);
    for (const VertexId v : bt.core) in_core[v] = 1;

    std::vector<std::uint8_t> fwd(g.n, 0);
    for (const VertexId v : reach_from_many(g, bt.core, fwd))
        if (!in_core[v]) bt.out_set.push_back(v);

    std::vector<std::uint8_t> bwd(g.n, 0);
    const Digraph gt = g.transpose();
    for (const VertexId v : reach_from_many(gt, bt.core, bwd))
        if (!in_core[v]) bt.in_set.push_back(v);

    std::sort(bt.out_set.begin(), bt.out_set.end());
    std::sort(bt.in_set.begin(), bt.in_set.end());
    return bt;
}

ComponentReport classify(const Digraph& g, double epsilon, std::size_t sample_size,
                         std::uint64_t seed) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon outside (0,1)");

    const auto bt = bow_tie(g);
    ComponentReport rep;
    rep.epsilon = epsilon;
    rep.n = g.n;
    rep.core_size = bt.core.size();
    rep.in_size = bt.in_set.size();
    rep.out_size = bt.out_set.size();
    rep.c_star_size = rep.core_size + rep.out_size;
    rep.c_bar_star_size = rep.core_size + rep.in_size;
    rep.has_big_component =
        static_cast<double>(rep.c_star_size) >= epsilon * static_cast<double>(g.n);

    rep.influenced_mask.assign(g.n, 0);
    rep.pioneer_mask.assign(g.n, 0);
    if (rep.has_big_component) {
        for (const VertexId v : bt.core) {
            rep.influenced_mask[v] = 1;
            rep.pioneer_mask[v] = 1;
        }
        for (const VertexId v : bt.out_set) rep.influenced_mask[v] = 1;
        for (const VertexId v : bt.in_set) rep.pioneer_mask[v] = 1;
        rep.count_large = rep.c_bar_star_size;
        rep.count_small = g.n - rep.count_large;
        rep.count_large_bar = rep.c_star_size;
        rep.count_small_bar = g.n - rep.count_large_bar;
    } else {
        rep.count_small = g.n;
        rep.count_small_bar = g.n;
    }

    // exact forward searches on a uniform sample, checked against the class
    rep.sample_size = sample_size;
    SplitMix64 rng(seed);
    std::vector<std::uint8_t> visited(g.n, 0);
    std::vector<VertexId> queue;
    const double nd = static_cast<double>(g.n);
    for (std::size_t s = 0; s < sample_size; ++s) {
        const VertexId x = static_cast<VertexId>(rng.next_below(g.n));
        const auto& cx = reach(g, x, visited, queue);
        const double frac = static_cast<double>(cx.size()) / nd;
        rep.max_sampled_forward_frac = std::max(rep.max_sampled_forward_frac, frac);
        bool ok;
        if (rep.has_big_component && rep.pioneer_mask[x]) {
            std::uint64_t overlap = 0;
            for (const VertexId v : cx) overlap += rep.influenced_mask[v];
            const std::uint64_t sym_diff = cx.size() + rep.c_star_size - 2 * overlap;
            ok = static_cast<double>(sym_diff) < epsilon * nd;
        } else {
            ok = frac < epsilon;
        }
        if (!ok) ++rep.sample_violations;
        for (const VertexId v : cx) visited[v] = 0;
    }
    return rep;
}

DualityReport duality_stats(const Digraph& g, double epsilon, const ComponentReport& report) {
    if (report.n != g.n || report.influenced_mask.size() != g.n)
        throw std::invalid_argument("report does not match digraph");
    DualityReport d;
    d.epsilon = epsilon;
    d.has_big_component = report.has_big_component;
    if (!report.has_big_component) return d;

    // The stored structural sets identify the big-forward class and C̄* with
    // the same vertex set (core ∪ IN), and the big-backward class with
    // core ∪ OUT. Both statistics are computed from those sets; the sampled
    // verification in classify() measures how far the exact classes drift
    // from this identification.
    const double nd = static_cast<double>(g.n);
    const double large_bar_frac = static_cast<double>(report.count_large_bar) / nd;
    const double c_bar_star_frac = static_cast<double>(report.c_bar_star_size) / nd;
    const double large_frac = static_cast<double>(report.count_large) / nd;
    d.theorem5_lhs = large_bar_frac * std::abs(c_bar_star_frac - large_frac);

    const std::vector<std::uint8_t>& class_large = report.pioneer_mask;
    const std::vector<std::uint8_t>& c_bar_star = report.pioneer_mask;
    std::uint64_t sym_diff = 0;
    for (std::size_t v = 0; v < g.n; ++v)
        sym_diff += static_cast<std::uint64_t>(class_large[v] != c_bar_star[v]);
    d.corollary6_lhs = static_cast<double>(sym_diff) / nd;
    return d;
}

std::vector<double> uniqueness_probe(const Digraph& g, const ComponentReport& report,
                                     std::size_t pairs, std::uint64_t seed) {
    std::vector<double> fractions;
    if (!report.has_big_component) return fractions;
    std::vector<VertexId> members;
    for (std::size_t v = 0; v < g.n; ++v)
        if (report.pioneer_mask[v]) members.push_back(static_cast<VertexId>(v));
    if (members.size() < 2) return fractions;

    SplitMix64 rng(seed);
    std::vector<std::uint8_t> mask_a(g.n, 0), mask_b(g.n, 0);
    std::vector<VertexId> qa, qb;
    const double nd = static_cast<double>(g.n);
    for (std::size_t i = 0; i < pairs; ++i) {
        const VertexId x = members[rng.next_below(members.size())];
        const VertexId xp = members[rng.next_below(members.size())];
        const auto& ca = reach(g, x, mask_a, qa);
        const auto& cb = reach(g, xp, mask_b, qb);
        std::uint64_t overlap = 0;
        for (const VertexId v : ca) overlap += mask_b[v];
        const std::uint64_t sym = ca.size() + cb.size() - 2 * overlap;
        fractions.push_back(static_cast<double>(sym) / nd);
        for (const VertexId v : ca) mask_a[v] = 0;
        for (const VertexId v : cb) mask_b[v] = 0;
    }
    return fractions;
}

std::uint64_t tautology_check(const Digraph& g, std::uint64_t pairs, std::uint64_t seed) {
    const Digraph gt = g.transpose();
    std::vector<std::uint8_t> vis_f(g.n, 0), vis_b(g.n, 0);
    std::vector<VertexId> qf, qb;
    std::uint64_t violations = 0;

    const std::uint64_t n64 = g.n;
    if (pairs >= n64 * n64) {
        // exhaustive: forward set of every x against backward set of every y
        std::vector<std::vector<std::uint8_t>> fwd(g.n);
        for (VertexId x = 0; x < g.n; ++x) {
            const auto& cx = reach(g, x, vis_f, qf);
            fwd[x].assign(g.n, 0);
            for (const VertexId v : cx) {
                fwd[x][v] = 1;
                vis_f[v] = 0;
            }
        }
        for (VertexId y = 0; y < g.n; ++y) {
            const auto& cy = reach(gt, y, vis_b, qb);
            std::vector<std::uint8_t> bwd(g.n, 0);
            for (const VertexId v : cy) {
                bwd[v] = 1;
                vis_b[v] = 0;
            }
            for (VertexId x = 0; x < g.n; ++x)
                if (fwd[x][y] != bwd[x]) ++violations;
        }
        return violations;
    }

    SplitMix64 rng(seed);
    for (std::uint64_t i = 0; i < pairs; ++i) {
        const VertexId x = static_cast<VertexId>(rng.next_below(g.n));
        const VertexId y = static_cast<VertexId>(rng.next_below(g.n));
        const auto& cx = reach(g, x, vis_f, qf);
        const bool y_in_cx = vis_f[y] != 0;
        const auto& cy = reach(gt, y, vis_b, qb);
        const bool x_in_cy = vis_b[x] != 0;
        if (y_in_cx != x_in_cy) ++violations;
        for (const VertexId v : cx) vis_f[v] = 0;
        for (const VertexId v : cy) vis_b[v] = 0;
    }
    return violations;
}

} // namespace viralcm
