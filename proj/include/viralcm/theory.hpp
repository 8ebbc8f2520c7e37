#pragma once

#include "viralcm/degree_model.hpp"

#include <stdexcept>

namespace viralcm {

class NotSupercritical : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoSignChange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TheoryPrediction {
    double xi = 0.0;                  // root of H on (0,1)
    double xi_bar = 0.0;              // root of Hbar on (0,1)
    double tau = 0.0;                 // -ln(xi)
    double tau_bar = 0.0;             // -ln(xi_bar)
    double influenced_fraction = 0.0; // 1 - g(xi, xi)
    double pioneer_fraction = 0.0;    // 1 - gbar(xi_bar)
    double p_ext_tilde = 0.0;         // smallest fixed point of the size-biased offspring pgf
    double p_ext = 0.0;               // gbar(p_ext_tilde)
};

// Bisection on the unique sign change of H (resp. Hbar) in (0,1).
// Throws NotSupercritical when the threshold condition fails or the margin is
// within 1e-9 of criticality; NoSignChange when no bracket can be found.
double solve_xi(const JointDegreeDistribution& dist, double tol = 1e-10);
double solve_xi_bar(const JointDegreeDistribution& dist, double tol = 1e-10);

// Smallest fixed point of x = E[x^Dt~] by monotone iteration from 0, plus
// p_ext = E[p_ext_tilde^Dt]. Sub/critical laws come out as (1,1).
// Throws std::runtime_error after 1e6 iterations without convergence.
std::pair<double, double> branching_extinction(const JointDegreeDistribution& dist,
                                               double tol = 1e-10);

TheoryPrediction predict(const JointDegreeDistribution& dist, double tol = 1e-10);

} // namespace viralcm
