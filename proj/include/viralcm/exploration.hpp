#pragma once

#include "viralcm/graph.hpp"
#include "viralcm/theory.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace viralcm {

enum class Direction { Forward, Reverse };

struct ExplorationEvent {
    double t = 0.0;
    std::uint64_t living = 0;            // L
    std::uint64_t receivers = 0;         // R, living receiver half-edges
    std::uint64_t sleeping_half = 0;     // S_T (forward) or S-bar (reverse)
    std::uint64_t active_half = 0;       // A_T (forward) or A-bar (reverse)
    std::uint64_t sleeping_vertices = 0;
};

struct WakeRecord {
    double t = 0.0;
    VertexId vertex = 0;
    bool via_c1 = false;
};

struct ExplorationOptions {
    std::size_t max_watch_cells = 10; // highest-count (k,l) cells of the sequence
    bool watch_all_cells = false;
    std::vector<std::pair<int, int>> explicit_cells; // overrides the selection when non-empty
    // Literal reading of the reverse step: receiver deaths go unpaired and the
    // trace does not complete a multigraph. Experimental, no assertions.
    bool literal_reverse = false;
};

struct ExplorationTrace {
    Direction direction = Direction::Forward;
    std::size_t n = 0;
    std::uint64_t two_m = 0;
    std::vector<ExplorationEvent> events; // first entry at t = 0, then one per recorded pairing
    std::vector<WakeRecord> wakes;        // every wake in order, C1 and influence alike
    std::vector<std::pair<int, int>> watch_cells;
    std::vector<std::uint64_t> watch_initial;           // u_{k,l} of each watched cell
    std::vector<std::vector<std::uint32_t>> watch_series; // per cell, aligned with events
    std::vector<std::pair<HalfEdgeId, HalfEdgeId>> pairs; // in-process then post-hoc
    std::uint64_t inprocess_pairs = 0;
    std::uint64_t posthoc_pairs = 0;
    std::uint64_t unmatched_half_edges = 0; // literal reverse mode only
    std::uint64_t final_living = 0;         // after post-hoc completion
    double end_time = 0.0;
    std::uint64_t event_stride = 1;
    bool degenerate_no_transmitters = false;
    bool literal_reverse = false;

    std::vector<WakeRecord> c1_times() const;
    EnhancedMultigraph to_multigraph(const DegreeSequence& seq) const;
};

ExplorationTrace run_forward(const DegreeSequence& seq, std::uint64_t seed,
                             const ExplorationOptions& options = {});
ExplorationTrace run_reverse(const DegreeSequence& seq, std::uint64_t seed,
                             const ExplorationOptions& options = {});

struct DeviationPair {
    double sup = 0.0;    // over all event times
    double window = 0.0; // restricted to t <= tau - 0.1 (tau_bar for reverse)
};

struct FluidDeviation {
    Direction direction = Direction::Forward;
    DeviationPair living;                    // vs lambda e^{-2t}
    std::optional<DeviationPair> receivers;  // vs lambda_r e^{-t}, forward only
    DeviationPair sleeping_half;             // vs h(e^{-t}) / hbar(e^{-t})
    DeviationPair active_half;               // vs H(e^{-t}) / Hbar(e^{-t})
    std::vector<DeviationPair> watch;        // per watched cell
    DeviationPair watch_max;
};

FluidDeviation fluid_deviation(const ExplorationTrace& trace, const JointDegreeDistribution& dist,
                               const TheoryPrediction& prediction);

class NoWindow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BigWindow {
    double t1 = 0.0; // last C1 before tau/2
    double t2 = 0.0; // next C1 after t1, or the end time
    std::uint64_t c_double_prime_size = 0;
};

BigWindow big_window(const ExplorationTrace& trace, const TheoryPrediction& prediction);

} // namespace viralcm
