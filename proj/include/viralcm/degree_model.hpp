#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace viralcm {

// One support cell of the joint (receiver, transmitter) degree law.
struct DegreeCell {
    int k = 0; // receiver degree
    int l = 0; // transmitter degree
    double p = 0.0;
};

struct MomentSummary {
    double lambda_r = 0.0; // E[receiver degree]
    double lambda_t = 0.0; // E[transmitter degree]
    double lambda = 0.0;   // lambda_r + lambda_t
    double e_dt_d = 0.0;   // E[Dt * D]
    double e_d2 = 0.0;     // E[D^2]
    double p_d1 = 0.0;     // P(D = 1)
};

enum class Criticality { Supercritical, SubOrCritical };

struct CriticalityReport {
    Criticality verdict = Criticality::SubOrCritical;
    // E[Dt*D] - (lambda_t + lambda); positive means supercritical
    double margin = 0.0;
    bool near_critical = false;
};

// Finite-support joint degree pmf. Immutable after construction; entries are
// kept sorted by (k+l, k) and all generating-function sums run in that order.
class JointDegreeDistribution {
public:
    // Validates, merges duplicate cells and renormalizes. Throws
    // std::invalid_argument on negative mass, non-finite entries, or zero
    // total mass; throws if lambda == 0 unless allow_zero_lambda (needed for
    // size-biased outputs whose support can collapse to the origin).
    static JointDegreeDistribution from_table(std::vector<DegreeCell> cells,
                                              bool allow_zero_lambda = false);

    // Product of Poisson(mu(1-q)) receiver and Poisson(mu q) transmitter
    // marginals truncated to k+l <= cutoff and renormalized. Throws when the
    // discarded tail mass exceeds 1e-9.
    static JointDegreeDistribution make_thinned_poisson(double mu, double q, int cutoff);

    const std::vector<DegreeCell>& cells() const { return cells_; }
    int support_bound() const { return support_bound_; } // max k+l
    const MomentSummary& moments() const { return moments_; }
    bool condition_iv_ok() const { return moments_.p_d1 > 0.0; }

    double pmf(int k, int l) const;

    // g(x,y) = sum p_{k,l} x^k y^l, for (x,y) in [0,1]^2
    double pgf_g(double x, double y) const;
    // h(x) = E[Dt x^D]
    double h_forward(double x) const;
    // H(x) = lambda x^2 - lambda_r x - h(x)
    double H_forward(double x) const;
    // gbar(x) = E[x^Dt]
    double g_bar(double x) const;
    // hbar(x) = E[Dt x^Dt] + x E[Dr x^Dt]
    double h_bar(double x) const;
    // Hbar(x) = lambda x^2 - hbar(x)
    double H_bar(double x) const;

    // p~_{v,w} = ((v+1) p_{v+1,w} + (w+1) p_{v,w+1}) / lambda
    JointDegreeDistribution size_biased() const;

    // Marginal law of the transmitter degree, index = l.
    std::vector<double> transmitter_marginal() const;

    // Strict threshold E[Dt*D] > lambda_t + lambda; margins within 1e-12 of
    // equality report SubOrCritical with the near-critical flag set.
    // Throws std::domain_error if P(D=1) = 0 (Condition 1(iv)).
    CriticalityReport criticality() const;

private:
    JointDegreeDistribution() = default;
    void finalize(bool allow_zero_lambda);

    std::vector<DegreeCell> cells_;
    int support_bound_ = 0;
    MomentSummary moments_;
};

MomentSummary moments(const JointDegreeDistribution& dist);

} // namespace viralcm
