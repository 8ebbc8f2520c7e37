#include "viralcm/oracle.hpp"

#include "viralcm/rng.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

namespace viralcm {

namespace {

// reachability closure on <= 16 vertices via adjacency bitmasks
void accumulate_matching(const std::vector<HalfEdge>& halves,
                         const std::vector<int>& partner, std::size_t n,
                         std::vector<std::uint64_t>& reach_counts,
                         std::uint64_t& matchings) {
    std::array<std::uint32_t, 16> adj{};
    for (std::size_t v = 0; v < n; ++v) adj[v] = 1u << v;
    for (std::size_t h = 0; h < halves.size(); ++h)
        if (halves[h].kind == HalfEdgeKind::Transmitter)
            adj[halves[h].owner] |= 1u << halves[partner[h]].owner;

    // closure by iterating bit-or until stable; n is tiny
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            std::uint32_t acc = adj[v];
            std::uint32_t rest = acc;
            while (rest) {
                const int w = std::countr_zero(rest);
                rest &= rest - 1;
                acc |= adj[w];
            }
            if (acc != adj[v]) {
                adj[v] = acc;
                changed = true;
            }
        }
    }

    ++matchings;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            if (adj[x] & (1u << y)) ++reach_counts[x * n + y];
}

void enumerate_rec(const std::vector<HalfEdge>& halves, std::vector<int>& partner,
                   std::size_t n, std::vector<std::uint64_t>& reach_counts,
                   std::uint64_t& matchings) {
    std::size_t first = halves.size();
    for (std::size_t h = 0; h < halves.size(); ++h)
        if (partner[h] < 0) {
            first = h;
            break;
        }
    if (first == halves.size()) {
        accumulate_matching(halves, partner, n, reach_counts, matchings);
        return;
    }
    for (std::size_t h = first + 1; h < halves.size(); ++h) {
        if (partner[h] >= 0) continue;
        partner[first] = static_cast<int>(h);
        partner[h] = static_cast<int>(first);
        enumerate_rec(halves, partner, n, reach_counts, matchings);
        partner[first] = -1;
        partner[h] = -1;
    }
}

} // namespace

ExactSummary enumerate(const DegreeSequence& seq) {
    const auto halves = build_half_edges(seq);
    if (halves.size() > 16)
        throw TooLarge("enumeration capped at 2m <= 16 half-edges");
    if (halves.size() % 2 != 0)
        throw std::invalid_argument("odd number of half-edges");

    ExactSummary s;
    s.n = seq.n();
    std::vector<std::uint64_t> reach_counts(s.n * s.n, 0);
    std::vector<int> partner(halves.size(), -1);
    enumerate_rec(halves, partner, s.n, reach_counts, s.matching_count);

    s.reach_probability.resize(s.n * s.n);
    s.expected_forward_size.assign(s.n, 0.0);
    s.expected_backward_size.assign(s.n, 0.0);
    const double total = static_cast<double>(s.matching_count);
    for (std::size_t x = 0; x < s.n; ++x)
        for (std::size_t y = 0; y < s.n; ++y) {
            const double p = static_cast<double>(reach_counts[x * s.n + y]) / total;
            s.reach_probability[x * s.n + y] = p;
            s.expected_forward_size[x] += p;
            s.expected_backward_size[y] += p;
        }
    return s;
}

double gw_survival(const JointDegreeDistribution& dist, int max_generations, std::uint64_t reps,
                   std::uint64_t seed) {
    if (reps == 0) throw std::invalid_argument("reps must be >= 1");

    const auto root_law = dist.transmitter_marginal();
    const auto child_law = dist.size_biased().transmitter_marginal();
    auto make_cdf = [](const std::vector<double>& pmf) {
        std::vector<double> cdf(pmf.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < pmf.size(); ++i) {
            acc += pmf[i];
            cdf[i] = acc;
        }
        if (!cdf.empty()) cdf.back() = 1.0;
        return cdf;
    };
    const auto root_cdf = make_cdf(root_law);
    const auto child_cdf = make_cdf(child_law);
    auto draw = [](const std::vector<double>& cdf, SplitMix64& rng) {
        const double u = rng.next_double();
        return static_cast<std::uint64_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    };

    // once the population is this large, extinction mass is below 1e-100
    constexpr std::uint64_t kSurvivalCap = 1024;

    SplitMix64 rng(seed);
    std::uint64_t alive_count = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        std::uint64_t population = draw(root_cdf, rng);
        bool alive = population > 0;
        for (int g = 1; g < max_generations && alive && population < kSurvivalCap; ++g) {
            std::uint64_t next = 0;
            for (std::uint64_t i = 0; i < population; ++i) next += draw(child_cdf, rng);
            population = next;
            alive = population > 0;
        }
        if (alive) ++alive_count;
    }
    return static_cast<double>(alive_count) / static_cast<double>(reps);
}

} // namespace viralcm
