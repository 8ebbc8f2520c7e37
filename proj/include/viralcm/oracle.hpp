#pragma once

#include "viralcm/degree_model.hpp"
#include "viralcm/graph.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace viralcm {

class TooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact ground truth over every perfect matching of a tiny degree sequence.
struct ExactSummary {
    std::size_t n = 0;
    std::uint64_t matching_count = 0; // (2m-1)!!
    // reach_probability[x*n + y] = P(y in C(x)), uniform over matchings
    std::vector<double> reach_probability;
    std::vector<double> expected_forward_size;  // E|C(x)|
    std::vector<double> expected_backward_size; // E|C(y)-bar|

    double p_reach(std::size_t x, std::size_t y) const { return reach_probability[x * n + y]; }
};

// Iterates every perfect matching (smallest unmatched half-edge against each
// candidate). Throws TooLarge when 2m > 16.
ExactSummary enumerate(const DegreeSequence& seq);

// Two-stage branching process of the degree law: root offspring drawn as the
// transmitter degree, later generations from the size-biased law. Returns the
// fraction of trees still alive at max_generations.
double gw_survival(const JointDegreeDistribution& dist, int max_generations, std::uint64_t reps,
                   std::uint64_t seed);

} // namespace viralcm
