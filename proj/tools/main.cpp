#include "viralcm/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using viralcm::ExperimentConfig;
using viralcm::Json;
using viralcm::Pipeline;

struct CommonFlags {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> replicates;
    std::optional<double> epsilon;
    std::optional<std::string> out_dir;
    std::optional<std::string> formats;
    std::optional<unsigned> threads;
    std::optional<std::size_t> sample_size;
    std::optional<std::uint64_t> pairs;
    std::optional<double> mu;
    std::optional<double> q;
    std::optional<int> cutoff;
    bool check = false;
    bool dump_edges = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON experiment config");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--n", f.n, "vertex count");
    cmd->add_option("--replicates", f.replicates, "independent replicates");
    cmd->add_option("--epsilon", f.epsilon, "relative-size threshold");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--format", f.formats, "comma list of summary,json,csv");
    cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    cmd->add_option("--sample-size", f.sample_size, "classification sample size");
    cmd->add_option("--pairs", f.pairs, "tautology pair sample");
    cmd->add_option("--mu", f.mu, "thinned-Poisson mean total degree");
    cmd->add_option("--q", f.q, "thinned-Poisson transmitter fraction");
    cmd->add_option("--cutoff", f.cutoff, "thinned-Poisson truncation cutoff");
    cmd->add_flag("--check", f.check, "exit 2 when a declared tolerance fails");
    cmd->add_flag("--dump-edges", f.dump_edges, "write edge lists (u v tu tv)");
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

ExperimentConfig build_config(Pipeline pipeline, const CommonFlags& f) {
    ExperimentConfig cfg;
    if (f.config_path) {
        std::ifstream in(*f.config_path);
        if (!in) throw viralcm::ConfigError("cannot read config file " + *f.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = ExperimentConfig::from_json_text(buf.str());
    }
    cfg.pipeline = pipeline;
    if (f.seed) cfg.master_seed = *f.seed;
    if (f.n) cfg.n = *f.n;
    if (f.replicates) cfg.replicates = *f.replicates;
    if (f.epsilon) cfg.epsilon = *f.epsilon;
    if (f.out_dir) cfg.out_dir = *f.out_dir;
    if (f.formats) cfg.formats = split_csv(*f.formats);
    if (f.threads) cfg.threads = *f.threads;
    if (f.sample_size) cfg.sample_size = *f.sample_size;
    if (f.pairs) cfg.tautology_pairs = *f.pairs;
    if (f.mu) cfg.distribution.mu = *f.mu;
    if (f.q) cfg.distribution.q = *f.q;
    if (f.cutoff) cfg.distribution.cutoff = *f.cutoff;
    if (f.check) cfg.check = true;
    if (f.dump_edges) cfg.dump_edges = true;
    return cfg;
}

std::vector<std::pair<int, int>> parse_degrees(const std::string& text) {
    // "k,l;k,l;..." pairs
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto comma = item.find(',');
        if (comma == std::string::npos)
            throw viralcm::ConfigError("degree pair must look like k,l");
        out.emplace_back(std::stoi(item.substr(0, comma)), std::stoi(item.substr(comma + 1)));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"influence propagation on the enhanced configuration model"};
    app.require_subcommand(1);

    std::map<std::string, Pipeline> pipelines = {
        {"theory", Pipeline::Theory},   {"simulate", Pipeline::Simulate},
        {"explore", Pipeline::Explore}, {"duality", Pipeline::Duality},
        {"oracle", Pipeline::Oracle},   {"sweep", Pipeline::Sweep},
    };
    std::map<std::string, CommonFlags> flags;
    std::string degrees_text;
    std::string sweep_q_text;
    std::uint64_t oracle_reps = 0;
    bool gw = false;

    for (auto& [name, pipeline] : pipelines) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common(cmd, flags[name]);
        if (pipeline == Pipeline::Oracle) {
            cmd->add_option("--degrees", degrees_text, "semicolon list of k,l pairs");
            cmd->add_option("--empirical-reps", oracle_reps,
                            "uniform matchings for the empirical cross-check");
            cmd->add_flag("--gw", gw, "run the branching-process survival simulation");
        }
        if (pipeline == Pipeline::Sweep)
            cmd->add_option("--q-values", sweep_q_text, "comma list of q values");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string chosen = app.get_subcommands().front()->get_name();
    try {
        ExperimentConfig cfg = build_config(pipelines.at(chosen), flags.at(chosen));
        if (!degrees_text.empty()) cfg.degrees = parse_degrees(degrees_text);
        if (oracle_reps) cfg.oracle_empirical_reps = oracle_reps;
        if (gw) cfg.gw = true;
        if (!sweep_q_text.empty()) {
            cfg.sweep_q.clear();
            for (const auto& v : split_csv(sweep_q_text)) cfg.sweep_q.push_back(std::stod(v));
        }
        cfg.validate();

        const auto report = viralcm::run(cfg);
        const auto written = viralcm::emit(report, cfg);
        std::cout << report.summary_text();
        for (const auto& path : written) std::cerr << "wrote " << path << "\n";

        if (cfg.check && !report.all_checks_pass()) return 2;
        return 0;
    } catch (const viralcm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
