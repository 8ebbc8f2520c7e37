#include "viralcm/theory.hpp"

#include <cmath>
#include <functional>

namespace viralcm {

namespace {

constexpr double kNearCriticalMargin = 1e-9;
constexpr int kMaxBisectionSteps = 200;

void require_supercritical(const JointDegreeDistribution& dist) {
    const auto crit = dist.criticality();
    if (crit.verdict != Criticality::Supercritical)
        throw NotSupercritical("distribution fails E[Dt*D] > E[Dt] + E[D]");
    if (std::abs(crit.margin) < kNearCriticalMargin)
        throw NotSupercritical("distribution is within 1e-9 of criticality; root merges with 1");
}

// H is negative on (0, root) and positive on (root, 1); the lower endpoint is
// reliable, the upper one is probed inward until the computed sign is positive.
double bisect_root(const std::function<double(double)>& f, double tol) {
    double lo = 1e-12;
    if (!(f(lo) < 0.0))
        throw NoSignChange("no negative value near 0");

    double hi = -1.0;
    for (double delta : {1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2,
                         0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
        const double x = 1.0 - delta;
        if (x <= lo) break;
        if (f(x) > 0.0) {
            hi = x;
            break;
        }
    }
    if (hi < 0.0)
        throw NoSignChange("no positive value found on (0,1)");

    for (int i = 0; i < kMaxBisectionSteps && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double solve_xi(const JointDegreeDistribution& dist, double tol) {
    require_supercritical(dist);
    return bisect_root([&](double x) { return dist.H_forward(x); }, tol);
}

double solve_xi_bar(const JointDegreeDistribution& dist, double tol) {
    require_supercritical(dist);
    return bisect_root([&](double x) { return dist.H_bar(x); }, tol);
}

std::pair<double, double> branching_extinction(const JointDegreeDistribution& dist, double tol) {
    const auto offspring = dist.size_biased().transmitter_marginal();
    const auto pgf = [&](double x) {
        double s = 0.0, xw = 1.0;
        for (std::size_t w = 0; w < offspring.size(); ++w) {
            s += offspring[w] * xw;
            xw *= x;
        }
        return s;
    };

    double x = 0.0;
    bool converged = false;
    for (long i = 0; i < 1000000; ++i) {
        const double next = pgf(x);
        if (std::abs(next - x) < tol) {
            x = next;
            converged = true;
            break;
        }
        x = next;
    }
    if (!converged)
        throw std::runtime_error("extinction fixed-point iteration did not converge; tol too small");

    return {x, dist.g_bar(std::min(x, 1.0))};
}

TheoryPrediction predict(const JointDegreeDistribution& dist, double tol) {
    TheoryPrediction p;
    p.xi = solve_xi(dist, tol);
    p.xi_bar = solve_xi_bar(dist, tol);
    p.tau = -std::log(p.xi);
    p.tau_bar = -std::log(p.xi_bar);
    p.influenced_fraction = 1.0 - dist.pgf_g(p.xi, p.xi);
    p.pioneer_fraction = 1.0 - dist.g_bar(p.xi_bar);
    const auto [pt, pe] = branching_extinction(dist, tol);
    p.p_ext_tilde = pt;
    p.p_ext = pe;
    return p;
}

} // namespace viralcm
