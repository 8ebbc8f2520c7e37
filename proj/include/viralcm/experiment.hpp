#pragma once

#include "viralcm/degree_model.hpp"
#include "viralcm/theory.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace viralcm {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DistributionSpec {
    std::string family = "thinned_poisson"; // or "table"
    double mu = 4.0;
    double q = 0.5;
    int cutoff = 30;
    std::vector<DegreeCell> table;

    JointDegreeDistribution build() const;
    Json to_json() const;
    static DistributionSpec from_json(const Json& j);
};

enum class Pipeline { Theory, Simulate, Explore, Duality, Oracle, Sweep };

std::string pipeline_name(Pipeline p);
Pipeline pipeline_from_name(const std::string& name);

struct ExperimentConfig {
    Pipeline pipeline = Pipeline::Theory;
    DistributionSpec distribution;
    std::size_t n = 100000;
    std::uint64_t replicates = 1;
    std::uint64_t master_seed = 1;
    double epsilon = 0.05;
    double solver_tol = 1e-10;
    std::size_t sample_size = 200;
    std::uint64_t tautology_pairs = 1000;
    std::size_t uniqueness_pairs = 50;
    int max_generations = 50;
    std::uint64_t gw_reps = 100000;
    bool gw = false; // oracle pipeline: also run the branching simulation
    std::size_t watch_cells = 10;
    std::vector<std::pair<int, int>> watch_list; // explicit (k,l) cells for explore
    unsigned threads = 0; // 0 = all available cores
    bool check = false;
    bool dump_edges = false;
    std::vector<double> sweep_q;                // sweep pipeline
    std::vector<std::pair<int, int>> degrees;   // oracle pipeline: explicit (d_r, d_t) list
    std::uint64_t oracle_empirical_reps = 0;    // 0 = exact enumeration only
    std::string out_dir;
    std::vector<std::string> formats = {"summary", "json"};

    // check-mode tolerances
    double tol_mean_fraction = 0.015;
    double tol_violation_rate = 0.02;
    double tol_fluid = 0.02;
    double tol_t2 = 0.05;

    void validate() const;
    Json to_json() const;
    static ExperimentConfig from_json(const Json& j);
    // Throws ConfigError with a line/column diagnostic on parse failure.
    static ExperimentConfig from_json_text(const std::string& text);
};

struct ReplicateStats {
    std::vector<std::pair<std::string, double>> values;

    void set(const std::string& key, double v) { values.emplace_back(key, v); }
    std::optional<double> get(const std::string& key) const;
};

struct TheoryBlock {
    MomentSummary moments;
    std::string verdict; // "Supercritical" | "SubOrCritical"
    double margin = 0.0;
    bool near_critical = false;
    std::optional<TheoryPrediction> prediction; // absent when not supercritical
};

struct AggregateEntry {
    std::string key;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation
};

struct AggregateReport {
    std::string subcommand;
    Json config_echo;
    std::optional<TheoryBlock> theory;
    std::vector<ReplicateStats> replicates;
    std::vector<AggregateEntry> aggregate;
    std::vector<std::pair<std::string, bool>> checks;
    std::vector<std::string> artifacts; // files written during the run (trajectories, edges)

    bool all_checks_pass() const;
    Json to_json() const;
    static AggregateReport from_json(const Json& j);
    std::string summary_text() const;
};

// Runs the configured pipeline with replicate-level parallelism; results are
// ordered by replicate index so the report does not depend on thread count.
AggregateReport run(const ExperimentConfig& config);

// Writes the requested formats into config.out_dir (report.txt, report.json);
// returns the paths written. Trajectory CSVs are streamed during run().
std::vector<std::string> emit(const AggregateReport& report, const ExperimentConfig& config);

} // namespace viralcm
