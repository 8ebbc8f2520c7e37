// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not configurable.

#include "viralcm/experiment.hpp"
#include "viralcm/exploration.hpp"
#include "viralcm/graph.hpp"
#include "viralcm/oracle.hpp"
#include "viralcm/propagation.hpp"
#include "viralcm/rng.hpp"
#include "viralcm/theory.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace viralcm;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

JointDegreeDistribution default_family() {
    return JointDegreeDistribution::make_thinned_poisson(4.0, 0.5, 30);
}

// independent fixed-point oracle: rho = 1 - exp(-2 rho)
double survival_root() {
    double rho = 0.5;
    for (int i = 0; i < 2000; ++i) {
        const double next = 1.0 - std::exp(-2.0 * rho);
        if (std::abs(next - rho) < 1e-15) {
            rho = next;
            break;
        }
        rho = next;
    }
    return rho;
}

struct Replicate {
    DegreeSequence seq;
    Digraph digraph;
    ComponentReport report;
};

constexpr std::size_t kN = 100000;
constexpr int kReplicates = 20;
constexpr double kEpsilon = 0.05;

std::vector<Replicate> supercritical_replicates() {
    const auto dist = default_family();
    std::vector<Replicate> reps(kReplicates);
    for (int r = 0; r < kReplicates; ++r) {
        SplitMix64 s(derive_seed(2026, static_cast<std::uint64_t>(r)));
        reps[r].seq = sample_degree_sequence(dist, kN, s.next_u64());
        reps[r].digraph = uniform_matching(reps[r].seq, s.next_u64()).influence_digraph();
        reps[r].report = classify(reps[r].digraph, kEpsilon, 200, s.next_u64());
    }
    return reps;
}

void criterion1_theory_solver() {
    const auto start = std::chrono::steady_clock::now();
    const auto dist = default_family();
    const double xi = solve_xi(dist, 1e-10);
    const double xi_bar = solve_xi_bar(dist, 1e-10);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const double rho = survival_root();
    const double xi_ref = 1.0 - 0.5 * rho;
    const double xi_bar_ref = 1.0 - rho;
    const bool pass = std::abs(xi - xi_ref) <= 1e-4 && std::abs(xi_bar - xi_bar_ref) <= 1e-4 &&
                      std::abs(xi - 0.601594) <= 1e-4 && std::abs(xi_bar - 0.203188) <= 1e-4 &&
                      elapsed < 1.0;
    report(1, "theory solver roots", pass,
           "xi=" + fmt(xi) + " xi_bar=" + fmt(xi_bar) + " time=" + fmt(elapsed) + "s");
}

void criterion2_influenced_size(const std::vector<Replicate>& reps, const TheoryPrediction& pred,
                                double elapsed_build) {
    double mean = 0.0;
    for (const auto& r : reps) mean += static_cast<double>(r.report.c_star_size) / kN;
    mean /= reps.size();
    const bool pass = std::abs(mean - pred.influenced_fraction) <= 0.015 && elapsed_build < 60.0;
    report(2, "influenced component size", pass,
           "mean|C*|/n=" + fmt(mean) + " target=" + fmt(pred.influenced_fraction) +
               " build_time=" + fmt(elapsed_build) + "s");
}

void criterion3_pioneer_fraction(const std::vector<Replicate>& reps,
                                 const TheoryPrediction& pred) {
    double mean = 0.0;
    double worst_violation_rate = 0.0;
    for (const auto& r : reps) {
        mean += static_cast<double>(r.report.count_large) / kN;
        worst_violation_rate =
            std::max(worst_violation_rate, static_cast<double>(r.report.sample_violations) /
                                               static_cast<double>(r.report.sample_size));
    }
    mean /= reps.size();
    const bool pass =
        std::abs(mean - pred.pioneer_fraction) <= 0.015 && worst_violation_rate <= 0.02;
    report(3, "pioneer fraction", pass,
           "mean|CL|/n=" + fmt(mean) + " target=" + fmt(pred.pioneer_fraction) +
               " max_violation_rate=" + fmt(worst_violation_rate));
}

void criterion4_uniqueness(const std::vector<Replicate>& reps) {
    std::uint64_t total = 0, close = 0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const auto fractions =
            uniqueness_probe(reps[r].digraph, reps[r].report, 50, derive_seed(31, r));
        for (const double f : fractions) {
            ++total;
            if (f < 0.01) ++close;
        }
    }
    const double rate = total ? static_cast<double>(close) / static_cast<double>(total) : 0.0;
    report(4, "big component uniqueness", rate >= 0.98,
           "close_pairs=" + fmt(rate * 100) + "% of " + std::to_string(total));
}

void criterion5_subcritical_null() {
    const auto dist = JointDegreeDistribution::make_thinned_poisson(4.0, 0.2, 30);
    double worst = 0.0;
    for (int r = 0; r < kReplicates; ++r) {
        SplitMix64 s(derive_seed(5150, static_cast<std::uint64_t>(r)));
        const auto seq = sample_degree_sequence(dist, kN, s.next_u64());
        const auto digraph = uniform_matching(seq, s.next_u64()).influence_digraph();
        const auto rep = classify(digraph, kEpsilon, 200, s.next_u64());
        worst = std::max(worst, rep.max_sampled_forward_frac);
    }
    report(5, "subcritical null", worst < 0.01, "max sampled |C(x)|/n=" + fmt(worst));
}

void criterion6_fluid_limits(const TheoryPrediction& pred) {
    const auto dist = default_family();
    const auto seq = sample_degree_sequence(dist, kN, derive_seed(606, 0));
    const auto fwd = fluid_deviation(run_forward(seq, derive_seed(606, 1)), dist, pred);
    const auto rev = fluid_deviation(run_reverse(seq, derive_seed(606, 2)), dist, pred);

    const bool pass = fwd.living.sup < 0.02 && fwd.receivers->sup < 0.02 &&
                      fwd.sleeping_half.window < 0.02 && fwd.active_half.window < 0.02 &&
                      fwd.watch_max.window < 0.02 && rev.living.sup < 0.02 &&
                      rev.sleeping_half.window < 0.02 && rev.active_half.window < 0.02 &&
                      rev.watch_max.window < 0.02;
    report(6, "fluid limits", pass,
           "fwd L=" + fmt(fwd.living.sup) + " R=" + fmt(fwd.receivers->sup) + " S_T=" +
               fmt(fwd.sleeping_half.window) + " A_T=" + fmt(fwd.active_half.window) + " V=" +
               fmt(fwd.watch_max.window) + " | rev L=" + fmt(rev.living.sup) + " S=" +
               fmt(rev.sleeping_half.window) + " A=" + fmt(rev.active_half.window) + " V=" +
               fmt(rev.watch_max.window));
}

void criterion7_big_window(const std::vector<Replicate>& reps, const TheoryPrediction& pred) {
    int hits = 0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const auto trace = run_forward(reps[r].seq, derive_seed(707, r));
        const auto w = big_window(trace, pred);
        const double frac = static_cast<double>(w.c_double_prime_size) / kN;
        if (std::abs(w.t2 - pred.tau) <= 0.05 &&
            std::abs(frac - pred.influenced_fraction) <= 0.015)
            ++hits;
    }
    report(7, "big exploration window", hits >= 18,
           std::to_string(hits) + "/" + std::to_string(reps.size()) + " replicates in bounds");
}

void criterion8_duality_stats(const std::vector<Replicate>& reps) {
    double worst5 = 0.0, worst6 = 0.0;
    for (const auto& r : reps) {
        const auto d = duality_stats(r.digraph, kEpsilon, r.report);
        worst5 = std::max(worst5, d.theorem5_lhs);
        worst6 = std::max(worst6, d.corollary6_lhs);
    }
    report(8, "duality statistics", worst5 <= 0.05 && worst6 <= 0.05,
           "max theorem5_lhs=" + fmt(worst5) + " max corollary6_lhs=" + fmt(worst6));
}

void criterion9_oracle_equivalence() {
    const std::vector<std::vector<std::pair<int, int>>> sequences = {
        {{0, 1}, {1, 0}},
        {{0, 2}, {1, 0}, {1, 0}},
        {{1, 1}, {0, 2}, {2, 0}},
        {{1, 1}, {1, 1}, {1, 0}, {0, 1}},
        {{2, 1}, {1, 2}, {1, 0}, {0, 1}},
    };
    const std::uint64_t reps = 100000;
    bool pass = true;
    std::string detail;

    for (std::size_t si = 0; si < sequences.size(); ++si) {
        DegreeSequence seq;
        for (auto [k, l] : sequences[si]) {
            seq.d_r.push_back(k);
            seq.d_t.push_back(l);
        }
        if (seq.total_half_edges() > 10) continue;
        const auto exact = enumerate(seq);
        std::vector<std::uint64_t> hits(exact.n * exact.n, 0);
        for (std::uint64_t r = 0; r < reps; ++r) {
            const auto dig = uniform_matching(seq, derive_seed(909 + si, r)).influence_digraph();
            for (VertexId x = 0; x < exact.n; ++x)
                for (const VertexId y : forward_set(dig, x)) ++hits[x * exact.n + y];
        }
        for (std::size_t i = 0; i < hits.size() && pass; ++i) {
            const double p = exact.reach_probability[i];
            const double phat = static_cast<double>(hits[i]) / static_cast<double>(reps);
            const double bound = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
            if (std::abs(phat - p) > bound) {
                pass = false;
                detail = "sequence " + std::to_string(si) + " pair " + std::to_string(i) +
                         " off by " + fmt(std::abs(phat - p));
            }
        }
    }

    // the matching induced by the forward exploration on a 4-half-edge sequence
    DegreeSequence tiny;
    tiny.d_r = {0, 1, 1};
    tiny.d_t = {2, 0, 0};
    const auto exact = enumerate(tiny);
    std::map<std::vector<HalfEdgeId>, std::uint64_t> freq;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto g = run_forward(tiny, derive_seed(911, r)).to_multigraph(tiny);
        std::vector<HalfEdgeId> canon;
        for (HalfEdgeId h = 0; h < 4; ++h)
            if (h < g.matching[h]) {
                canon.push_back(h);
                canon.push_back(g.matching[h]);
            }
        ++freq[canon];
    }
    const double expected = 1.0 / static_cast<double>(exact.matching_count);
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(reps));
    if (freq.size() != exact.matching_count) pass = false;
    for (const auto& [_, count] : freq) {
        const double f = static_cast<double>(count) / static_cast<double>(reps);
        if (std::abs(f - expected) > 4.0 * sigma) {
            pass = false;
            detail = "exploration matching frequency " + fmt(f) + " vs " + fmt(expected);
        }
    }
    report(9, "oracle equivalence", pass, pass ? "all pairs within 4 sigma" : detail);
}

void criterion10_branching(const TheoryPrediction& pred) {
    const auto dist = default_family();
    const auto [pt, pe] = branching_extinction(dist, 1e-10);
    const double survival = gw_survival(dist, 50, 100000, derive_seed(1010, 0));
    const bool pass =
        std::abs(survival - (1.0 - pe)) <= 0.01 && std::abs(pt - pred.xi_bar) <= 1e-8;
    report(10, "branching consistency", pass,
           "gw=" + fmt(survival) + " 1-p_ext=" + fmt(1.0 - pe) +
               " |p_ext_tilde-xi_bar|=" + fmt(std::abs(pt - pred.xi_bar)));
}

void criterion11_tautology() {
    const auto dist = default_family();
    std::uint64_t violations = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto seq = sample_degree_sequence(dist, 1000, derive_seed(1111, 2 * s));
        const auto dig = uniform_matching(seq, derive_seed(1111, 2 * s + 1)).influence_digraph();
        violations += tautology_check(dig, static_cast<std::uint64_t>(dig.n) * dig.n, 0);
    }
    report(11, "reachability tautology", violations == 0,
           std::to_string(violations) + " violations over 10 exhaustive checks");
}

void criterion12_determinism() {
    ExperimentConfig cfg;
    cfg.pipeline = Pipeline::Simulate;
    cfg.n = 5000;
    cfg.replicates = 6;
    cfg.master_seed = 99;
    cfg.sample_size = 50;
    cfg.threads = 1;
    const auto once = run(cfg).to_json().dump(2);
    const auto twice = run(cfg).to_json().dump(2);
    cfg.threads = 4;
    auto parallel = Json::parse(run(cfg).to_json().dump(2));
    auto serial = Json::parse(once);
    parallel["config"].erase("threads");
    serial["config"].erase("threads");
    const bool pass = once == twice && parallel.dump() == serial.dump();
    report(12, "deterministic reports", pass,
           pass ? "bit-identical across runs and thread counts" : "outputs diverge");
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();

    criterion1_theory_solver();
    const auto pred = predict(default_family(), 1e-10);

    const auto build_start = std::chrono::steady_clock::now();
    const auto reps = supercritical_replicates();
    const double build_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - build_start).count();

    criterion2_influenced_size(reps, pred, build_time);
    criterion3_pioneer_fraction(reps, pred);
    criterion4_uniqueness(reps);
    criterion5_subcritical_null();
    criterion6_fluid_limits(pred);
    criterion7_big_window(reps, pred);
    criterion8_duality_stats(reps);
    criterion9_oracle_equivalence();
    criterion10_branching(pred);
    criterion11_tautology();
    criterion12_determinism();

    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d criteria failed; total time %.1fs\n", failures, total);
    return failures == 0 ? 0 : 1;
}
