#include "viralcm/exploration.hpp"

#include "viralcm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace viralcm {

namespace {

// swap-pop set of ids supporting uniform draws and O(1) removal
class DynamicSet {
public:
    explicit DynamicSet(std::size_t universe) : pos_(universe, kAbsent) {}

    void insert(std::uint32_t id) {
        pos_[id] = static_cast<std::uint32_t>(items_.size());
        items_.push_back(id);
    }
    void erase(std::uint32_t id) {
        const std::uint32_t p = pos_[id];
        const std::uint32_t last = items_.back();
        items_[p] = last;
        pos_[last] = p;
        items_.pop_back();
        pos_[id] = kAbsent;
    }
    bool contains(std::uint32_t id) const { return pos_[id] != kAbsent; }
    std::uint32_t draw(SplitMix64& rng) const {
        return items_[rng.next_below(items_.size())];
    }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::vector<std::uint32_t>& items() const { return items_; }

private:
    static constexpr std::uint32_t kAbsent = 0xffffffffu;
    std::vector<std::uint32_t> items_;
    std::vector<std::uint32_t> pos_;
};

struct Engine {
    const DegreeSequence& seq;
    const Direction direction;
    const ExplorationOptions& options;
    SplitMix64 rng;

    std::vector<HalfEdge> halves;
    std::vector<std::uint64_t> hstart; // CSR of half-edges per vertex
    std::vector<std::uint8_t> alive;
    std::vector<std::uint8_t> awake;

    DynamicSet living;
    DynamicSet active;   // forward: active transmitters; reverse: all active halves
    DynamicSet sleeping; // vertex ids

    std::uint64_t count_living = 0;
    std::uint64_t count_receivers = 0;
    std::uint64_t count_sleeping_half = 0; // forward: sleeping transmitters; reverse: sleeping-owned living
    std::uint64_t count_active_half = 0;

    std::vector<int> vertex_cell; // watched-cell slot per vertex, -1 if unwatched
    std::vector<std::uint32_t> cell_counts;

    ExplorationTrace trace;
    double now = 0.0;
    std::uint64_t pairings_recorded = 0;

    Engine(const DegreeSequence& s, Direction dir, std::uint64_t seed,
           const ExplorationOptions& opt)
        : seq(s), direction(dir), options(opt), rng(seed),
          living(0), active(0), sleeping(s.n()) {
        halves = build_half_edges(s);
        living = DynamicSet(halves.size());
        active = DynamicSet(halves.size());

        hstart.assign(s.n() + 1, 0);
        for (std::size_t v = 0; v < s.n(); ++v)
            hstart[v + 1] = hstart[v] + static_cast<std::uint64_t>(seq.d_r[v] + seq.d_t[v]);

        alive.assign(halves.size(), 1);
        awake.assign(s.n(), 0);
        for (std::uint32_t h = 0; h < halves.size(); ++h) {
            living.insert(h);
            if (halves[h].kind == HalfEdgeKind::Receiver) ++count_receivers;
        }
        count_living = halves.size();
        for (std::size_t v = 0; v < s.n(); ++v) sleeping.insert(static_cast<std::uint32_t>(v));

        if (direction == Direction::Forward) {
            std::uint64_t st = 0;
            for (std::size_t v = 0; v < s.n(); ++v) st += seq.d_t[v];
            count_sleeping_half = st;
        } else {
            count_sleeping_half = halves.size();
        }

        setup_watch();
        trace.direction = direction;
        trace.n = s.n();
        trace.two_m = halves.size();
        trace.literal_reverse = (direction == Direction::Reverse) && options.literal_reverse;
        const std::uint64_t max_events = halves.size() / 2 + 1;
        trace.event_stride =
            max_events > 2000000 ? (max_events + 1999999) / 2000000 : 1;
    }

    void setup_watch() {
        const auto u = seq.cell_counts();
        std::vector<std::pair<std::pair<int, int>, std::uint64_t>> ordered;
        if (!options.explicit_cells.empty()) {
            for (const auto& cell : options.explicit_cells) {
                const auto it = u.find(cell);
                ordered.emplace_back(cell, it == u.end() ? 0 : it->second);
            }
        } else {
            ordered.assign(u.begin(), u.end());
            std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            if (!options.watch_all_cells && ordered.size() > options.max_watch_cells)
                ordered.resize(options.max_watch_cells);
        }
        const std::size_t keep = ordered.size();
        std::map<std::pair<int, int>, int> slot;
        for (std::size_t i = 0; i < keep; ++i) {
            trace.watch_cells.push_back(ordered[i].first);
            trace.watch_initial.push_back(ordered[i].second);
            slot[ordered[i].first] = static_cast<int>(i);
        }
        trace.watch_series.resize(keep);
        cell_counts.resize(keep);
        for (std::size_t i = 0; i < keep; ++i)
            cell_counts[i] = static_cast<std::uint32_t>(trace.watch_initial[i]);

        vertex_cell.assign(seq.n(), -1);
        for (std::size_t v = 0; v < seq.n(); ++v) {
            const auto it = slot.find({seq.d_r[v], seq.d_t[v]});
            if (it != slot.end()) vertex_cell[v] = it->second;
        }
    }

    bool is_transmitter(std::uint32_t h) const {
        return halves[h].kind == HalfEdgeKind::Transmitter;
    }

    void wake(VertexId v, bool via_c1) {
        sleeping.erase(v);
        awake[v] = 1;
        for (std::uint64_t h = hstart[v]; h < hstart[v + 1]; ++h) {
            if (!alive[h]) continue;
            if (direction == Direction::Forward) {
                if (is_transmitter(static_cast<std::uint32_t>(h))) {
                    --count_sleeping_half;
                    ++count_active_half;
                    active.insert(static_cast<std::uint32_t>(h));
                }
            } else {
                --count_sleeping_half;
                ++count_active_half;
                active.insert(static_cast<std::uint32_t>(h));
            }
        }
        if (vertex_cell[v] >= 0) --cell_counts[vertex_cell[v]];
        trace.wakes.push_back({now, v, via_c1});
    }

    // C2 / C2-bar: the chosen half-edge is active by construction
    void kill(std::uint32_t h) {
        alive[h] = 0;
        living.erase(h);
        active.erase(h);
        --count_living;
        --count_active_half;
        if (!is_transmitter(h)) --count_receivers;
    }

    // spontaneous death of a living half-edge
    void die(std::uint32_t h) {
        alive[h] = 0;
        living.erase(h);
        --count_living;
        if (!is_transmitter(h)) --count_receivers;
        const VertexId owner = halves[h].owner;
        if (direction == Direction::Forward) {
            if (is_transmitter(h)) {
                if (awake[owner]) {
                    --count_active_half;
                    active.erase(h);
                } else {
                    --count_sleeping_half;
                }
            }
        } else {
            if (awake[owner]) {
                --count_active_half;
                active.erase(h);
            } else {
                --count_sleeping_half;
            }
        }
    }

    // C1 loop followed by the kill step; false once the process stops
    bool advance(std::uint32_t& killed) {
        while (count_active_half == 0) {
            if (sleeping.empty()) return false;
            wake(sleeping.draw(rng), true);
        }
        killed = active.draw(rng);
        kill(killed);
        return true;
    }

    void record_state() {
        trace.events.push_back({now, count_living, count_receivers, count_sleeping_half,
                                count_active_half, sleeping.size()});
        for (std::size_t i = 0; i < cell_counts.size(); ++i)
            trace.watch_series[i].push_back(cell_counts[i]);
    }

    void record_pairing(bool force) {
        ++pairings_recorded;
        if (force || trace.event_stride == 1 ||
            (pairings_recorded - 1) % trace.event_stride == 0)
            record_state();
    }

    void run() {
        bool transmitters_exist = false;
        for (std::size_t v = 0; v < seq.n(); ++v)
            if (seq.d_t[v] > 0) transmitters_exist = true;
        trace.degenerate_no_transmitters = !transmitters_exist;

        const bool literal = trace.literal_reverse;
        std::uint32_t killed = 0;
        bool running = advance(killed);
        record_state(); // t = 0 state, after the initial C1 wakes and kill

        while (running) {
            if (count_living == 0) break; // literal mode can strand the killed half-edge
            // wait for the next spontaneous death; in literal reverse mode
            // receiver deaths pass unpaired until a transmitter dies
            std::uint32_t victim;
            bool paired = true;
            for (;;) {
                now += rng.next_exponential(static_cast<double>(count_living));
                victim = living.draw(rng);
                die(victim);
                if (!literal || is_transmitter(victim)) break;
                record_state(); // unpaired receiver death
                if (count_living == 0) {
                    paired = false;
                    break;
                }
            }
            if (!paired) break;

            trace.pairs.emplace_back(killed, victim);
            ++trace.inprocess_pairs;
            const VertexId owner = halves[victim].owner;
            const bool wakes_owner =
                direction == Direction::Forward ? true : is_transmitter(victim);
            if (!awake[owner] && wakes_owner) wake(owner, false);

            running = advance(killed);
            record_pairing(!running);
        }

        trace.end_time = now;
        finish();
    }

    void finish() {
        // leftover living half-edges are matched uniformly post-hoc so the
        // trace still induces a complete multigraph
        std::vector<std::uint32_t> leftover(living.items());
        if (trace.literal_reverse) {
            trace.unmatched_half_edges = trace.two_m - 2 * trace.inprocess_pairs;
            trace.final_living = leftover.size();
            return;
        }
        if (!leftover.empty()) {
            for (std::size_t i = leftover.size() - 1; i > 0; --i)
                std::swap(leftover[i], leftover[rng.next_below(i + 1)]);
            for (std::size_t i = 0; i + 1 < leftover.size(); i += 2) {
                trace.pairs.emplace_back(leftover[i], leftover[i + 1]);
                ++trace.posthoc_pairs;
            }
        }
        trace.final_living = leftover.size() % 2; // 0 once 2m is even
    }
};

} // namespace

std::vector<WakeRecord> ExplorationTrace::c1_times() const {
    std::vector<WakeRecord> out;
    for (const auto& w : wakes)
        if (w.via_c1) out.push_back(w);
    return out;
}

EnhancedMultigraph ExplorationTrace::to_multigraph(const DegreeSequence& seq) const {
    return EnhancedMultigraph::from_pairs(seq, pairs);
}

ExplorationTrace run_forward(const DegreeSequence& seq, std::uint64_t seed,
                             const ExplorationOptions& options) {
    Engine engine(seq, Direction::Forward, seed, options);
    engine.run();
    return std::move(engine.trace);
}

ExplorationTrace run_reverse(const DegreeSequence& seq, std::uint64_t seed,
                             const ExplorationOptions& options) {
    Engine engine(seq, Direction::Reverse, seed, options);
    engine.run();
    return std::move(engine.trace);
}

FluidDeviation fluid_deviation(const ExplorationTrace& trace, const JointDegreeDistribution& dist,
                               const TheoryPrediction& prediction) {
    const auto& m = dist.moments();
    const double nd = static_cast<double>(trace.n);
    const bool forward = trace.direction == Direction::Forward;
    const double window_end = (forward ? prediction.tau : prediction.tau_bar) - 0.1;

    FluidDeviation dev;
    dev.direction = trace.direction;
    if (forward) dev.receivers = DeviationPair{};
    dev.watch.resize(trace.watch_cells.size());

    auto update = [&](DeviationPair& d, double value, double target, double t) {
        const double err = std::abs(value - target);
        d.sup = std::max(d.sup, err);
        if (t <= window_end) d.window = std::max(d.window, err);
    };

    for (std::size_t e = 0; e < trace.events.size(); ++e) {
        const auto& ev = trace.events[e];
        const double x = std::exp(-ev.t);
        update(dev.living, ev.living / nd, m.lambda * x * x, ev.t);
        if (forward) {
            update(*dev.receivers, ev.receivers / nd, m.lambda_r * x, ev.t);
            update(dev.sleeping_half, ev.sleeping_half / nd, dist.h_forward(x), ev.t);
            update(dev.active_half, ev.active_half / nd, dist.H_forward(x), ev.t);
        } else {
            update(dev.sleeping_half, ev.sleeping_half / nd, dist.h_bar(x), ev.t);
            update(dev.active_half, ev.active_half / nd, dist.H_bar(x), ev.t);
        }
        for (std::size_t c = 0; c < trace.watch_cells.size(); ++c) {
            const auto [k, l] = trace.watch_cells[c];
            const double p = dist.pmf(k, l);
            const double target = forward ? p * std::exp(-(k + l) * ev.t) : p * std::exp(-l * ev.t);
            update(dev.watch[c], trace.watch_series[c][e] / nd, target, ev.t);
        }
    }
    for (const auto& w : dev.watch) {
        dev.watch_max.sup = std::max(dev.watch_max.sup, w.sup);
        dev.watch_max.window = std::max(dev.watch_max.window, w.window);
    }
    return dev;
}

BigWindow big_window(const ExplorationTrace& trace, const TheoryPrediction& prediction) {
    if (trace.direction != Direction::Forward)
        throw std::invalid_argument("big_window expects a forward trace");
    const double half_tau = prediction.tau / 2.0;

    // positions of C1 wakes inside the ordered wake log
    std::vector<std::size_t> c1_pos;
    for (std::size_t i = 0; i < trace.wakes.size(); ++i)
        if (trace.wakes[i].via_c1) c1_pos.push_back(i);

    std::ptrdiff_t last = -1;
    for (std::size_t j = 0; j < c1_pos.size(); ++j)
        if (trace.wakes[c1_pos[j]].t < half_tau) last = static_cast<std::ptrdiff_t>(j);
    if (last < 0) throw NoWindow("no C1 trigger before tau/2");

    BigWindow w;
    const std::size_t begin = c1_pos[static_cast<std::size_t>(last)];
    w.t1 = trace.wakes[begin].t;
    std::size_t end;
    if (static_cast<std::size_t>(last) + 1 < c1_pos.size()) {
        end = c1_pos[static_cast<std::size_t>(last) + 1];
        w.t2 = trace.wakes[end].t;
    } else {
        end = trace.wakes.size();
        w.t2 = trace.end_time;
    }
    w.c_double_prime_size = end - begin;
    return w;
}

} // namespace viralcm
