#include "viralcm/experiment.hpp"

#include "viralcm/exploration.hpp"
#include "viralcm/graph.hpp"
#include "viralcm/oracle.hpp"
#include "viralcm/propagation.hpp"
#include "viralcm/rng.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace viralcm {

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct ReplicateSeeds {
    std::uint64_t sequence, matching, classify, tautology, uniqueness, forward, reverse;
};

ReplicateSeeds replicate_seeds(std::uint64_t master, std::uint64_t index) {
    SplitMix64 s(derive_seed(master, index));
    ReplicateSeeds r;
    r.sequence = s.next_u64();
    r.matching = s.next_u64();
    r.classify = s.next_u64();
    r.tautology = s.next_u64();
    r.uniqueness = s.next_u64();
    r.forward = s.next_u64();
    r.reverse = s.next_u64();
    return r;
}

void write_trajectory_csv(const std::string& path, const ExplorationTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    if (trace.direction == Direction::Forward) {
        out << "t,L,R,S_T,A_T,sleeping\n";
        for (const auto& e : trace.events)
            out << format_double(e.t) << ',' << e.living << ',' << e.receivers << ','
                << e.sleeping_half << ',' << e.active_half << ',' << e.sleeping_vertices << '\n';
    } else {
        out << "t,L,S,A,sleeping\n";
        for (const auto& e : trace.events)
            out << format_double(e.t) << ',' << e.living << ',' << e.sleeping_half << ','
                << e.active_half << ',' << e.sleeping_vertices << '\n';
    }
}

void write_edge_list(const std::string& path, const EnhancedMultigraph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (HalfEdgeId h = 0; h < g.half_edges.size(); ++h) {
        const HalfEdgeId p = g.matching[h];
        if (h < p)
            out << g.half_edges[h].owner << ' ' << g.half_edges[p].owner << ' '
                << static_cast<int>(g.half_edges[h].kind) << ' '
                << static_cast<int>(g.half_edges[p].kind) << '\n';
    }
}

// short tokens and their long aliases are interchangeable
std::string canonical_format(const std::string& fmt) {
    if (fmt == "summary-text") return "summary";
    if (fmt == "machine-structured") return "json";
    if (fmt == "csv-trajectories") return "csv";
    return fmt;
}

bool wants_format(const ExperimentConfig& cfg, const std::string& fmt) {
    for (const auto& f : cfg.formats)
        if (canonical_format(f) == fmt) return true;
    return false;
}

TheoryBlock make_theory_block(const JointDegreeDistribution& dist, double tol) {
    TheoryBlock tb;
    tb.moments = dist.moments();
    const auto crit = dist.criticality();
    tb.verdict = crit.verdict == Criticality::Supercritical ? "Supercritical" : "SubOrCritical";
    tb.margin = crit.margin;
    tb.near_critical = crit.near_critical;
    if (crit.verdict == Criticality::Supercritical && std::abs(crit.margin) >= 1e-9)
        tb.prediction = predict(dist, tol);
    return tb;
}

// runs fn(r) for r in [0, count) on up to `threads` workers, rethrowing the
// first failure annotated with its replicate index
template <typename Fn>
void parallel_replicates(std::uint64_t count, unsigned threads, Fn&& fn) {
    unsigned hw = threads == 0 ? std::thread::hardware_concurrency() : threads;
    if (hw == 0) hw = 1;
    hw = static_cast<unsigned>(std::min<std::uint64_t>(hw, count));

    if (hw <= 1) {
        for (std::uint64_t r = 0; r < count; ++r) fn(r);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::string> errors(hw);
    for (unsigned w = 0; w < hw; ++w) {
        pool.emplace_back([&, w] {
            for (;;) {
                const std::uint64_t r = next.fetch_add(1);
                if (r >= count) return;
                try {
                    fn(r);
                } catch (const std::exception& e) {
                    errors[w] = "replicate " + std::to_string(r) + ": " + e.what();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
}

void aggregate_stats(AggregateReport& report) {
    if (report.replicates.empty()) return;
    for (const auto& [key, _] : report.replicates.front().values) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& rep : report.replicates) {
            if (const auto v = rep.get(key)) {
                sum += *v;
                ++count;
            }
        }
        if (count == 0) continue;
        const double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (const auto& rep : report.replicates)
            if (const auto v = rep.get(key)) ss += (*v - mean) * (*v - mean);
        const double stddev = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
        report.aggregate.push_back({key, mean, stddev});
    }
}

std::optional<double> aggregate_mean(const AggregateReport& report, const std::string& key) {
    for (const auto& a : report.aggregate)
        if (a.key == key) return a.mean;
    return std::nullopt;
}

void run_simulate(const ExperimentConfig& cfg, const JointDegreeDistribution& dist,
                  AggregateReport& report) {
    report.replicates.resize(cfg.replicates);
    std::vector<std::string> artifacts(cfg.replicates);
    parallel_replicates(cfg.replicates, cfg.threads, [&](std::uint64_t r) {
        const auto seeds = replicate_seeds(cfg.master_seed, r);
        const auto seq = sample_degree_sequence(dist, cfg.n, seeds.sequence);
        const auto graph = uniform_matching(seq, seeds.matching);
        const auto digraph = graph.influence_digraph();
        const auto stats = graph.stats();
        const auto rep = classify(digraph, cfg.epsilon, cfg.sample_size, seeds.classify);
        const auto dual = duality_stats(digraph, cfg.epsilon, rep);

        ReplicateStats& out = report.replicates[r];
        const double nd = static_cast<double>(cfg.n);
        out.set("c_star_frac", rep.c_star_size / nd);
        out.set("c_bar_star_frac", rep.c_bar_star_size / nd);
        out.set("pioneer_class_frac", rep.count_large / nd);
        out.set("core_frac", rep.core_size / nd);
        out.set("violation_rate",
                cfg.sample_size ? static_cast<double>(rep.sample_violations) /
                                      static_cast<double>(cfg.sample_size)
                                : 0.0);
        out.set("max_sampled_forward_frac", rep.max_sampled_forward_frac);
        out.set("has_big_component", rep.has_big_component ? 1.0 : 0.0);
        out.set("theorem5_lhs", dual.theorem5_lhs);
        out.set("corollary6_lhs", dual.corollary6_lhs);
        if (cfg.pipeline == Pipeline::Duality) {
            const auto violations = tautology_check(digraph, cfg.tautology_pairs, seeds.tautology);
            out.set("tautology_violations", static_cast<double>(violations));
        }
        if (cfg.uniqueness_pairs > 0 && rep.has_big_component) {
            const auto fractions =
                uniqueness_probe(digraph, rep, cfg.uniqueness_pairs, seeds.uniqueness);
            std::size_t close = 0;
            for (double f : fractions)
                if (f < 0.01) ++close;
            out.set("uniqueness_close_rate",
                    fractions.empty() ? 1.0
                                      : static_cast<double>(close) /
                                            static_cast<double>(fractions.size()));
        }
        out.set("self_loops", static_cast<double>(stats.self_loops));
        out.set("multi_edges", static_cast<double>(stats.multi_edges));
        out.set("d_max", static_cast<double>(stats.d_max));

        if (cfg.dump_edges && !cfg.out_dir.empty()) {
            const std::string path =
                (std::filesystem::path(cfg.out_dir) / ("edges_r" + std::to_string(r) + ".txt"))
                    .string();
            write_edge_list(path, graph);
            artifacts[r] = path;
        }
    });
    for (auto& a : artifacts)
        if (!a.empty()) report.artifacts.push_back(std::move(a));

    aggregate_stats(report);
    if (cfg.check && report.theory && report.theory->prediction) {
        const auto& pred = *report.theory->prediction;
        const auto mean_c = aggregate_mean(report, "c_star_frac");
        const auto mean_p = aggregate_mean(report, "pioneer_class_frac");
        const auto mean_v = aggregate_mean(report, "violation_rate");
        report.checks.emplace_back(
            "influenced_fraction_match",
            mean_c && std::abs(*mean_c - pred.influenced_fraction) <= cfg.tol_mean_fraction);
        report.checks.emplace_back(
            "pioneer_fraction_match",
            mean_p && std::abs(*mean_p - pred.pioneer_fraction) <= cfg.tol_mean_fraction);
        report.checks.emplace_back("violation_rate_bound",
                                   mean_v && *mean_v <= cfg.tol_violation_rate);
        bool duality_ok = true;
        for (const auto& rep : report.replicates) {
            if (const auto t5 = rep.get("theorem5_lhs"); t5 && *t5 > cfg.epsilon)
                duality_ok = false;
            if (const auto c6 = rep.get("corollary6_lhs"); c6 && *c6 > cfg.epsilon)
                duality_ok = false;
        }
        report.checks.emplace_back("duality_bounds", duality_ok);
        if (cfg.pipeline == Pipeline::Duality) {
            bool taut_ok = true;
            for (const auto& rep : report.replicates)
                if (const auto t = rep.get("tautology_violations"); t && *t != 0.0)
                    taut_ok = false;
            report.checks.emplace_back("tautology_zero_violations", taut_ok);
        }
    }
}

void run_explore(const ExperimentConfig& cfg, const JointDegreeDistribution& dist,
                 AggregateReport& report) {
    const bool csv = wants_format(cfg, "csv") && !cfg.out_dir.empty();
    report.replicates.resize(cfg.replicates);
    std::vector<std::array<std::string, 2>> artifacts(cfg.replicates);

    std::optional<TheoryPrediction> pred;
    if (report.theory) pred = report.theory->prediction;

    ExplorationOptions options;
    options.max_watch_cells = cfg.watch_cells;
    options.explicit_cells = cfg.watch_list;

    parallel_replicates(cfg.replicates, cfg.threads, [&](std::uint64_t r) {
        const auto seeds = replicate_seeds(cfg.master_seed, r);
        const auto seq = sample_degree_sequence(dist, cfg.n, seeds.sequence);
        ReplicateStats& out = report.replicates[r];
        const double nd = static_cast<double>(cfg.n);

        const auto fwd = run_forward(seq, seeds.forward, options);
        out.set("pairings", static_cast<double>(fwd.inprocess_pairs));
        out.set("posthoc_pairs", static_cast<double>(fwd.posthoc_pairs));
        out.set("c1_count", static_cast<double>(fwd.c1_times().size()));
        if (pred) {
            const auto dev = fluid_deviation(fwd, dist, *pred);
            out.set("fwd_dev_L_sup", dev.living.sup);
            out.set("fwd_dev_R_sup", dev.receivers->sup);
            out.set("fwd_dev_ST_window", dev.sleeping_half.window);
            out.set("fwd_dev_AT_window", dev.active_half.window);
            out.set("fwd_dev_V_window", dev.watch_max.window);
            const auto window = big_window(fwd, *pred);
            out.set("t1", window.t1);
            out.set("t2", window.t2);
            out.set("c_double_prime_frac",
                    static_cast<double>(window.c_double_prime_size) / nd);
        }
        const auto rev = run_reverse(seq, seeds.reverse, options);
        if (pred) {
            const auto dev = fluid_deviation(rev, dist, *pred);
            out.set("rev_dev_L_sup", dev.living.sup);
            out.set("rev_dev_S_window", dev.sleeping_half.window);
            out.set("rev_dev_A_window", dev.active_half.window);
            out.set("rev_dev_V_window", dev.watch_max.window);
        }
        if (csv) {
            const auto dir = std::filesystem::path(cfg.out_dir);
            const std::string fpath = (dir / ("traj_forward_r" + std::to_string(r) + ".csv")).string();
            const std::string rpath = (dir / ("traj_reverse_r" + std::to_string(r) + ".csv")).string();
            write_trajectory_csv(fpath, fwd);
            write_trajectory_csv(rpath, rev);
            artifacts[r] = {fpath, rpath};
        }
    });
    for (auto& a : artifacts)
        for (auto& p : a)
            if (!p.empty()) report.artifacts.push_back(std::move(p));

    aggregate_stats(report);
    if (cfg.check && pred) {
        bool fluid_ok = true;
        for (const auto& rep : report.replicates)
            for (const char* key : {"fwd_dev_L_sup", "fwd_dev_R_sup", "fwd_dev_ST_window",
                                    "fwd_dev_AT_window", "fwd_dev_V_window", "rev_dev_L_sup",
                                    "rev_dev_S_window", "rev_dev_A_window", "rev_dev_V_window"})
                if (const auto v = rep.get(key); v && *v >= cfg.tol_fluid) fluid_ok = false;
        report.checks.emplace_back("fluid_deviations", fluid_ok);

        std::size_t t2_hits = 0, c2_hits = 0;
        for (const auto& rep : report.replicates) {
            if (const auto t2 = rep.get("t2");
                t2 && std::abs(*t2 - pred->tau) <= cfg.tol_t2)
                ++t2_hits;
            if (const auto c = rep.get("c_double_prime_frac");
                c && std::abs(*c - pred->influenced_fraction) <= cfg.tol_mean_fraction)
                ++c2_hits;
        }
        const std::size_t need = (report.replicates.size() * 9 + 9) / 10; // ceil(0.9 r)
        report.checks.emplace_back("big_window_t2", t2_hits >= need);
        report.checks.emplace_back("big_window_size", c2_hits >= need);
    }
}

void run_oracle(const ExperimentConfig& cfg, AggregateReport& report) {
    if (cfg.degrees.empty() && !cfg.gw)
        throw ConfigError("oracle pipeline needs a degree list, --gw, or both");

    ReplicateStats out;
    if (!cfg.degrees.empty()) {
        DegreeSequence seq;
        for (const auto& [k, l] : cfg.degrees) {
            seq.d_r.push_back(k);
            seq.d_t.push_back(l);
        }
        const auto exact = enumerate(seq);
        out.set("matching_count", static_cast<double>(exact.matching_count));
        for (std::size_t v = 0; v < exact.n; ++v)
            out.set("expected_forward_size_v" + std::to_string(v), exact.expected_forward_size[v]);
        for (std::size_t v = 0; v < exact.n; ++v)
            out.set("expected_backward_size_v" + std::to_string(v),
                    exact.expected_backward_size[v]);

        if (cfg.oracle_empirical_reps > 0) {
            std::vector<std::uint64_t> hits(exact.n * exact.n, 0);
            for (std::uint64_t r = 0; r < cfg.oracle_empirical_reps; ++r) {
                const auto g = uniform_matching(seq, derive_seed(cfg.master_seed, r));
                const auto digraph = g.influence_digraph();
                for (VertexId x = 0; x < exact.n; ++x)
                    for (const VertexId y : forward_set(digraph, x)) ++hits[x * exact.n + y];
            }
            double worst = 0.0;
            const double reps = static_cast<double>(cfg.oracle_empirical_reps);
            for (std::size_t i = 0; i < hits.size(); ++i)
                worst = std::max(worst,
                                 std::abs(static_cast<double>(hits[i]) / reps -
                                          exact.reach_probability[i]));
            out.set("empirical_max_abs_error", worst);
        }
    }
    if (cfg.gw) {
        const auto dist = cfg.distribution.build();
        const double survival =
            gw_survival(dist, cfg.max_generations, cfg.gw_reps, derive_seed(cfg.master_seed, 0));
        const auto [pt, pe] = branching_extinction(dist, cfg.solver_tol);
        out.set("gw_survival", survival);
        out.set("one_minus_p_ext", 1.0 - pe);
        out.set("p_ext_tilde", pt);
        if (cfg.check)
            report.checks.emplace_back("gw_matches_extinction",
                                       std::abs(survival - (1.0 - pe)) <= 0.01);
    }
    report.replicates.push_back(std::move(out));
}

void run_sweep(const ExperimentConfig& cfg, AggregateReport& report) {
    if (cfg.distribution.family != "thinned_poisson")
        throw ConfigError("sweep pipeline requires the thinned_poisson family");
    auto qs = cfg.sweep_q;
    if (qs.empty())
        for (int i = 1; i <= 9; ++i) qs.push_back(0.1 * i);

    for (const double q : qs) {
        DistributionSpec spec = cfg.distribution;
        spec.q = q;
        const auto dist = spec.build();
        const auto crit = dist.criticality();
        ReplicateStats out;
        out.set("q", q);
        out.set("supercritical", crit.verdict == Criticality::Supercritical ? 1.0 : 0.0);
        out.set("margin", crit.margin);
        if (crit.verdict == Criticality::Supercritical && std::abs(crit.margin) >= 1e-9) {
            const auto pred = predict(dist, cfg.solver_tol);
            out.set("xi", pred.xi);
            out.set("xi_bar", pred.xi_bar);
            out.set("influenced_fraction", pred.influenced_fraction);
            out.set("pioneer_fraction", pred.pioneer_fraction);
        }
        report.replicates.push_back(std::move(out));
    }
}

} // namespace

JointDegreeDistribution DistributionSpec::build() const {
    if (family == "thinned_poisson") return JointDegreeDistribution::make_thinned_poisson(mu, q, cutoff);
    if (family == "table") return JointDegreeDistribution::from_table(table);
    throw ConfigError("unknown distribution family: " + family);
}

Json DistributionSpec::to_json() const {
    Json j;
    j["family"] = family;
    if (family == "thinned_poisson") {
        j["mu"] = mu;
        j["q"] = q;
        j["cutoff"] = cutoff;
    } else {
        Json rows = Json::array();
        for (const auto& c : table) rows.push_back(Json::array({c.k, c.l, c.p}));
        j["rows"] = rows;
    }
    return j;
}

DistributionSpec DistributionSpec::from_json(const Json& j) {
    DistributionSpec s;
    s.family = j.value("family", "thinned_poisson");
    if (s.family == "thinned_poisson") {
        s.mu = j.value("mu", 4.0);
        s.q = j.value("q", 0.5);
        s.cutoff = j.value("cutoff", 30);
    } else if (s.family == "table") {
        if (!j.contains("rows")) throw ConfigError("table distribution needs \"rows\"");
        for (const auto& row : j.at("rows")) {
            if (!row.is_array() || row.size() != 3)
                throw ConfigError("table row must be [k, l, p]");
            s.table.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<double>()});
        }
    } else {
        throw ConfigError("unknown distribution family: " + s.family);
    }
    return s;
}

std::string pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::Theory: return "theory";
        case Pipeline::Simulate: return "simulate";
        case Pipeline::Explore: return "explore";
        case Pipeline::Duality: return "duality";
        case Pipeline::Oracle: return "oracle";
        case Pipeline::Sweep: return "sweep";
    }
    return "theory";
}

Pipeline pipeline_from_name(const std::string& name) {
    for (Pipeline p : {Pipeline::Theory, Pipeline::Simulate, Pipeline::Explore, Pipeline::Duality,
                       Pipeline::Oracle, Pipeline::Sweep})
        if (pipeline_name(p) == name) return p;
    throw ConfigError("unknown subcommand: " + name);
}

void ExperimentConfig::validate() const {
    if (n < 1) throw ConfigError("n must be >= 1");
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0,1)");
    if (!(solver_tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (max_generations < 1) throw ConfigError("max_generations must be >= 1");
    for (const auto& f : formats) {
        const auto c = canonical_format(f);
        if (c != "summary" && c != "json" && c != "csv")
            throw ConfigError("unknown format: " + f);
    }
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["subcommand"] = pipeline_name(pipeline);
    j["distribution"] = distribution.to_json();
    j["n"] = n;
    j["replicates"] = replicates;
    j["master_seed"] = master_seed;
    j["epsilon"] = epsilon;
    j["solver_tol"] = solver_tol;
    j["sample_size"] = sample_size;
    j["tautology_pairs"] = tautology_pairs;
    j["uniqueness_pairs"] = uniqueness_pairs;
    j["max_generations"] = max_generations;
    j["gw_reps"] = gw_reps;
    if (gw) j["gw"] = gw;
    j["watch_cells"] = watch_cells;
    if (!watch_list.empty()) {
        Json w = Json::array();
        for (const auto& [k, l] : watch_list) w.push_back(Json::array({k, l}));
        j["watch_list"] = w;
    }
    j["threads"] = threads;
    j["check"] = check;
    j["dump_edges"] = dump_edges;
    if (!sweep_q.empty()) j["sweep_q"] = sweep_q;
    if (!degrees.empty()) {
        Json d = Json::array();
        for (const auto& [k, l] : degrees) d.push_back(Json::array({k, l}));
        j["degrees"] = d;
    }
    if (oracle_empirical_reps) j["oracle_empirical_reps"] = oracle_empirical_reps;
    j["out_dir"] = out_dir;
    j["formats"] = formats;
    j["tolerances"] = {{"mean_fraction", tol_mean_fraction},
                       {"violation_rate", tol_violation_rate},
                       {"fluid", tol_fluid},
                       {"t2", tol_t2}};
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("subcommand")) c.pipeline = pipeline_from_name(j.at("subcommand"));
        if (j.contains("distribution"))
            c.distribution = DistributionSpec::from_json(j.at("distribution"));
        c.n = j.value("n", c.n);
        c.replicates = j.value("replicates", c.replicates);
        c.master_seed = j.value("master_seed", c.master_seed);
        c.epsilon = j.value("epsilon", c.epsilon);
        c.solver_tol = j.value("solver_tol", c.solver_tol);
        c.sample_size = j.value("sample_size", c.sample_size);
        c.tautology_pairs = j.value("tautology_pairs", c.tautology_pairs);
        c.uniqueness_pairs = j.value("uniqueness_pairs", c.uniqueness_pairs);
        c.max_generations = j.value("max_generations", c.max_generations);
        c.gw_reps = j.value("gw_reps", c.gw_reps);
        c.gw = j.value("gw", c.gw);
        c.watch_cells = j.value("watch_cells", c.watch_cells);
        if (j.contains("watch_list"))
            for (const auto& row : j.at("watch_list"))
                c.watch_list.emplace_back(row[0].get<int>(), row[1].get<int>());
        c.threads = j.value("threads", c.threads);
        c.check = j.value("check", c.check);
        c.dump_edges = j.value("dump_edges", c.dump_edges);
        if (j.contains("sweep_q")) c.sweep_q = j.at("sweep_q").get<std::vector<double>>();
        if (j.contains("degrees"))
            for (const auto& row : j.at("degrees"))
                c.degrees.emplace_back(row[0].get<int>(), row[1].get<int>());
        c.oracle_empirical_reps = j.value("oracle_empirical_reps", c.oracle_empirical_reps);
        c.out_dir = j.value("out_dir", c.out_dir);
        if (j.contains("formats")) c.formats = j.at("formats").get<std::vector<std::string>>();
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            c.tol_mean_fraction = t.value("mean_fraction", c.tol_mean_fraction);
            c.tol_violation_rate = t.value("violation_rate", c.tol_violation_rate);
            c.tol_fluid = t.value("fluid", c.tol_fluid);
            c.tol_t2 = t.value("t2", c.tol_t2);
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return from_json(j);
}

std::optional<double> ReplicateStats::get(const std::string& key) const {
    for (const auto& [k, v] : values)
        if (k == key) return v;
    return std::nullopt;
}

bool AggregateReport::all_checks_pass() const {
    for (const auto& [_, ok] : checks)
        if (!ok) return false;
    return true;
}

AggregateReport run(const ExperimentConfig& config) {
    config.validate();
    AggregateReport report;
    report.subcommand = pipeline_name(config.pipeline);
    report.config_echo = config.to_json();

    if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);

    if (config.pipeline == Pipeline::Oracle) {
        run_oracle(config, report);
        return report;
    }
    if (config.pipeline == Pipeline::Sweep) {
        run_sweep(config, report);
        return report;
    }

    const auto dist = config.distribution.build();
    report.theory = make_theory_block(dist, config.solver_tol);

    switch (config.pipeline) {
        case Pipeline::Theory: {
            if (report.theory->prediction) {
                const auto& p = *report.theory->prediction;
                ReplicateStats out;
                out.set("xi", p.xi);
                out.set("xi_bar", p.xi_bar);
                out.set("tau", p.tau);
                out.set("tau_bar", p.tau_bar);
                out.set("influenced_fraction", p.influenced_fraction);
                out.set("pioneer_fraction", p.pioneer_fraction);
                out.set("p_ext_tilde", p.p_ext_tilde);
                out.set("p_ext", p.p_ext);
                report.replicates.push_back(std::move(out));
                if (config.check) {
                    report.checks.emplace_back("extinction_root_consistency",
                                               std::abs(p.p_ext_tilde - p.xi_bar) <=
                                                   10.0 * config.solver_tol);
                    report.checks.emplace_back(
                        "pioneer_extinction_consistency",
                        std::abs(p.pioneer_fraction - (1.0 - p.p_ext)) <= 10.0 * config.solver_tol);
                }
            } else {
                const auto [pt, pe] = branching_extinction(dist, config.solver_tol);
                ReplicateStats out;
                out.set("p_ext_tilde", pt);
                out.set("p_ext", pe);
                report.replicates.push_back(std::move(out));
            }
            break;
        }
        case Pipeline::Simulate:
        case Pipeline::Duality:
            run_simulate(config, dist, report);
            break;
        case Pipeline::Explore:
            run_explore(config, dist, report);
            break;
        default:
            break;
    }
    return report;
}

Json AggregateReport::to_json() const {
    Json j;
    j["schema"] = "viralcm-report-v1";
    j["subcommand"] = subcommand;
    j["config"] = config_echo;
    if (theory) {
        Json t;
        t["lambda_r"] = theory->moments.lambda_r;
        t["lambda_t"] = theory->moments.lambda_t;
        t["lambda"] = theory->moments.lambda;
        t["e_dt_d"] = theory->moments.e_dt_d;
        t["e_d2"] = theory->moments.e_d2;
        t["p_d1"] = theory->moments.p_d1;
        t["criticality"] = theory->verdict;
        t["margin"] = theory->margin;
        t["near_critical"] = theory->near_critical;
        if (theory->prediction) {
            const auto& p = *theory->prediction;
            t["xi"] = p.xi;
            t["xi_bar"] = p.xi_bar;
            t["tau"] = p.tau;
            t["tau_bar"] = p.tau_bar;
            t["influenced_fraction"] = p.influenced_fraction;
            t["pioneer_fraction"] = p.pioneer_fraction;
            t["p_ext_tilde"] = p.p_ext_tilde;
            t["p_ext"] = p.p_ext;
        }
        j["theory"] = t;
    }
    Json reps = Json::array();
    for (const auto& r : replicates) {
        Json one;
        for (const auto& [k, v] : r.values) one[k] = v;
        reps.push_back(one);
    }
    j["replicates"] = reps;
    Json agg;
    for (const auto& a : aggregate) agg[a.key] = {{"mean", a.mean}, {"stddev", a.stddev}};
    j["aggregate"] = agg;
    Json chk;
    for (const auto& [name, ok] : checks) chk[name] = ok;
    j["checks"] = chk;
    j["artifacts"] = artifacts;
    return j;
}

AggregateReport AggregateReport::from_json(const Json& j) {
    AggregateReport r;
    r.subcommand = j.at("subcommand").get<std::string>();
    r.config_echo = j.at("config");
    if (j.contains("theory")) {
        const auto& t = j.at("theory");
        TheoryBlock tb;
        tb.moments.lambda_r = t.at("lambda_r").get<double>();
        tb.moments.lambda_t = t.at("lambda_t").get<double>();
        tb.moments.lambda = t.at("lambda").get<double>();
        tb.moments.e_dt_d = t.at("e_dt_d").get<double>();
        tb.moments.e_d2 = t.at("e_d2").get<double>();
        tb.moments.p_d1 = t.at("p_d1").get<double>();
        tb.verdict = t.at("criticality").get<std::string>();
        tb.margin = t.at("margin").get<double>();
        tb.near_critical = t.at("near_critical").get<bool>();
        if (t.contains("xi")) {
            TheoryPrediction p;
            p.xi = t.at("xi").get<double>();
            p.xi_bar = t.at("xi_bar").get<double>();
            p.tau = t.at("tau").get<double>();
            p.tau_bar = t.at("tau_bar").get<double>();
            p.influenced_fraction = t.at("influenced_fraction").get<double>();
            p.pioneer_fraction = t.at("pioneer_fraction").get<double>();
            p.p_ext_tilde = t.at("p_ext_tilde").get<double>();
            p.p_ext = t.at("p_ext").get<double>();
            tb.prediction = p;
        }
        r.theory = tb;
    }
    for (const auto& one : j.at("replicates")) {
        ReplicateStats rs;
        for (const auto& [k, v] : one.items()) rs.set(k, v.get<double>());
        r.replicates.push_back(std::move(rs));
    }
    for (const auto& [k, v] : j.at("aggregate").items())
        r.aggregate.push_back({k, v.at("mean").get<double>(), v.at("stddev").get<double>()});
    for (const auto& [k, v] : j.at("checks").items()) r.checks.emplace_back(k, v.get<bool>());
    r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    return r;
}

std::string AggregateReport::summary_text() const {
    std::ostringstream os;
    os << "viralcm " << subcommand << " report\n";
    os << "config: " << config_echo.dump() << "\n";
    if (theory) {
        os << "moments: lambda_r=" << format_double(theory->moments.lambda_r)
           << " lambda_t=" << format_double(theory->moments.lambda_t)
           << " lambda=" << format_double(theory->moments.lambda)
           << " E[DtD]=" << format_double(theory->moments.e_dt_d)
           << " P(D=1)=" << format_double(theory->moments.p_d1) << "\n";
        os << "criticality: " << theory->verdict << " (margin=" << format_double(theory->margin)
           << (theory->near_critical ? ", near-critical" : "") << ")\n";
        if (theory->prediction) {
            const auto& p = *theory->prediction;
            os << "xi=" << format_double(p.xi) << " xi_bar=" << format_double(p.xi_bar)
               << " tau=" << format_double(p.tau) << " tau_bar=" << format_double(p.tau_bar)
               << "\n";
            os << "influenced_fraction=" << format_double(p.influenced_fraction) << "\n";
            os << "pioneer_fraction=" << format_double(p.pioneer_fraction) << "\n";
            os << "p_ext_tilde=" << format_double(p.p_ext_tilde)
               << " p_ext=" << format_double(p.p_ext) << "\n";
        }
    }
    for (std::size_t i = 0; i < replicates.size(); ++i) {
        os << "replicate " << i << ":";
        for (const auto& [k, v] : replicates[i].values) os << ' ' << k << '=' << format_double(v);
        os << "\n";
    }
    if (!aggregate.empty()) {
        os << "aggregate:\n";
        for (const auto& a : aggregate)
            os << "  " << a.key << ": mean=" << format_double(a.mean)
               << " stddev=" << format_double(a.stddev) << "\n";
    }
    if (!checks.empty()) {
        os << "checks:\n";
        for (const auto& [name, ok] : checks)
            os << "  " << (ok ? "PASS" : "FAIL") << ' ' << name << "\n";
    }
    for (const auto& a : artifacts) os << "artifact: " << a << "\n";
    return os.str();
}

std::vector<std::string> emit(const AggregateReport& report, const ExperimentConfig& config) {
    std::vector<std::string> written;
    if (config.out_dir.empty()) return written;
    std::filesystem::create_directories(config.out_dir);
    const auto dir = std::filesystem::path(config.out_dir);
    if (wants_format(config, "summary")) {
        const std::string path = (dir / "report.txt").string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path);
        out << report.summary_text();
        written.push_back(path);
    }
    if (wants_format(config, "json")) {
        const std::string path = (dir / "report.json").string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path);
        out << report.to_json().dump(2) << "\n";
        written.push_back(path);
    }
    return written;
}

} // namespace viralcm
