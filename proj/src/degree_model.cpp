#include "viralcm/degree_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace viralcm {

namespace {

void check_unit_interval(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error(std::string(name) + " outside [0,1]");
}

// log pmf of Poisson(mean) at j; mean == 0 handled as a point mass at 0
double poisson_pmf(double mean, int j) {
    if (mean == 0.0) return j == 0 ? 1.0 : 0.0;
    return std::exp(j * std::log(mean) - mean - std::lgamma(static_cast<double>(j) + 1.0));
}

// powers[i] = x^i for i up to bound
std::vector<double> power_table(double x, int bound) {
    std::vector<double> powers(static_cast<std::size_t>(bound) + 1);
    powers[0] = 1.0;
    for (int i = 1; i <= bound; ++i) powers[i] = powers[i - 1] * x;
    return powers;
}

} // namespace

JointDegreeDistribution JointDegreeDistribution::from_table(std::vector<DegreeCell> cells,
                                                            bool allow_zero_lambda) {
    std::map<std::pair<int, int>, double> merged;
    for (const auto& c : cells) {
        if (c.k < 0 || c.l < 0)
            throw std::invalid_argument("degree cell with negative degree");
        if (!std::isfinite(c.p) || c.p < 0.0)
            throw std::invalid_argument("degree cell with invalid probability");
        if (c.p == 0.0) continue;
        merged[{c.k, c.l}] += c.p;
    }
    if (merged.empty())
        throw std::invalid_argument("empty degree table");

    JointDegreeDistribution d;
    for (const auto& [kl, p] : merged)
        d.cells_.push_back({kl.first, kl.second, p});
    d.finalize(allow_zero_lambda);
    return d;
}

JointDegreeDistribution JointDegreeDistribution::make_thinned_poisson(double mu, double q,
                                                                      int cutoff) {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q outside [0,1]");
    if (cutoff < 0) throw std::invalid_argument("negative cutoff");

    const double mean_r = mu * (1.0 - q);
    const double mean_t = mu * q;

    JointDegreeDistribution d;
    double kept = 0.0;
    for (int k = 0; k <= cutoff; ++k) {
        const double pk = poisson_pmf(mean_r, k);
        for (int l = 0; k + l <= cutoff; ++l) {
            const double p = pk * poisson_pmf(mean_t, l);
            if (p > 0.0) {
                d.cells_.push_back({k, l, p});
                kept += p;
            }
        }
    }
    const double discarded = 1.0 - kept;
    if (discarded > 1e-9)
        throw std::invalid_argument("thinned-Poisson cutoff " + std::to_string(cutoff) +
                                    " discards mass " + std::to_string(discarded));
    d.finalize(false);
    return d;
}

void JointDegreeDistribution::finalize(bool allow_zero_lambda) {
    std::sort(cells_.begin(), cells_.end(), [](const DegreeCell& a, const DegreeCell& b) {
        if (a.k + a.l != b.k + b.l) return a.k + a.l < b.k + b.l;
        if (a.k != b.k) return a.k < b.k;
        return a.l < b.l;
    });

    double total = 0.0;
    for (const auto& c : cells_) total += c.p;
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::invalid_argument("degree table mass is not positive and finite");
    for (auto& c : cells_) c.p /= total;

    support_bound_ = 0;
    MomentSummary m;
    for (const auto& c : cells_) {
        const double deg = static_cast<double>(c.k + c.l);
        support_bound_ = std::max(support_bound_, c.k + c.l);
        m.lambda_r += c.k * c.p;
        m.lambda_t += c.l * c.p;
        m.e_dt_d += c.l * deg * c.p;
        m.e_d2 += deg * deg * c.p;
        if (c.k + c.l == 1) m.p_d1 += c.p;
    }
    m.lambda = m.lambda_r + m.lambda_t;
    moments_ = m;

    if (!allow_zero_lambda && !(m.lambda > 0.0))
        throw std::invalid_argument("mean total degree must be positive");
}

double JointDegreeDistribution::pmf(int k, int l) const {
    for (const auto& c : cells_)
        if (c.k == k && c.l == l) return c.p;
    return 0.0;
}

double JointDegreeDistribution::pgf_g(double x, double y) const {
    check_unit_interval(x, "x");
    check_unit_interval(y, "y");
    const auto xp = power_table(x, support_bound_);
    const auto yp = power_table(y, support_bound_);
    double s = 0.0;
    for (const auto& c : cells_)
        s += c.p * xp[c.k] * yp[c.l];
    return s;
}

double JointDegreeDistribution::h_forward(double x) const {
    check_unit_interval(x, "x");
    const auto xp = power_table(x, support_bound_);
    double s = 0.0;
    for (const auto& c : cells_)
        if (c.l > 0) s += c.l * c.p * xp[c.k + c.l];
    return s;
}

double JointDegreeDistribution::H_forward(double x) const {
    check_unit_interval(x, "x");
    return moments_.lambda * x * x - moments_.lambda_r * x - h_forward(x);
}

double JointDegreeDistribution::g_bar(double x) const {
    check_unit_interval(x, "x");
    const auto xp = power_table(x, support_bound_);
    double s = 0.0;
    for (const auto& c : cells_)
        s += c.p * xp[c.l];
    return s;
}

double JointDegreeDistribution::h_bar(double x) const {
    check_unit_interval(x, "x");
    const auto xp = power_table(x, support_bound_);
    double st = 0.0, sr = 0.0;
    for (const auto& c : cells_) {
        const double xl = xp[c.l];
        st += c.l * c.p * xl;
        sr += c.k * c.p * xl;
    }
    return st + x * sr;
}

double JointDegreeDistribution::H_bar(double x) const {
    check_unit_interval(x, "x");
    return moments_.lambda * x * x - h_bar(x);
}

JointDegreeDistribution JointDegreeDistribution::size_biased() const {
    if (!(moments_.lambda > 0.0))
        throw std::domain_error("size-biased distribution undefined for lambda = 0");
    std::map<std::pair<int, int>, double> out;
    for (const auto& c : cells_) {
        // (v+1) p_{v+1,w} contribution: cell (k,l) feeds (k-1, l)
        if (c.k >= 1) out[{c.k - 1, c.l}] += c.k * c.p;
        // (w+1) p_{v,w+1} contribution: cell (k,l) feeds (k, l-1)
        if (c.l >= 1) out[{c.k, c.l - 1}] += c.l * c.p;
    }
    std::vector<DegreeCell> cells;
    cells.reserve(out.size());
    for (const auto& [kl, w] : out)
        cells.push_back({kl.first, kl.second, w / moments_.lambda});
    return from_table(std::move(cells), /*allow_zero_lambda=*/true);
}

std::vector<double> JointDegreeDistribution::transmitter_marginal() const {
    std::vector<double> q;
    for (const auto& c : cells_) {
        if (static_cast<int>(q.size()) <= c.l) q.resize(c.l + 1, 0.0);
        q[c.l] += c.p;
    }
    return q;
}

CriticalityReport JointDegreeDistribution::criticality() const {
    if (!condition_iv_ok())
        throw std::domain_error("P(D=1) = 0 violates Condition 1(iv)");
    CriticalityReport r;
    r.margin = moments_.e_dt_d - (moments_.lambda_t + moments_.lambda);
    r.near_critical = std::abs(r.margin) < 1e-12;
    r.verdict = (r.margin > 0.0 && !r.near_critical) ? Criticality::Supercritical
                                                     : Criticality::SubOrCritical;
    return r;
}

MomentSummary moments(const JointDegreeDistribution& dist) { return dist.moments(); }

} // namespace viralcm
