#include "mcs/trust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcs {

void check_trust_config(const TrustConfig& cfg) {
    if (cfg.cells.empty()) throw GroupError("trust: no cells configured");
    if (cfg.cells.size() != cfg.weights.size())
        throw GroupError("trust: one weight per cell required");
    if (!(cfg.gamma > 0)) throw GroupError("trust: gamma must be positive");
    double sum = 0;
    for (double w : cfg.weights) {
        if (!(w > 0) || w > 1) throw GroupError("trust: weight outside (0,1]");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw GroupError("trust: weights must sum to 1");
    for (size_t i = 0; i + 1 < cfg.cells.size(); ++i)
        for (size_t j = i + 1; j < cfg.cells.size(); ++j)
            if (cfg.cells[i] == cfg.cells[j]) throw GroupError("trust: duplicate cell");
}

std::vector<std::vector<size_t>> group_reports(const std::vector<ReportCells>& reports,
                                               const TrustConfig& cfg) {
    check_trust_config(cfg);
    std::vector<std::vector<size_t>> groups(cfg.cells.size());
    for (size_t i = 0; i < reports.size(); ++i) {
        if (reports[i].cells.empty()) throw GroupError("trust: report covers no cell");
        for (const GridCell& c : reports[i].cells) {
            auto it = std::find(cfg.cells.begin(), cfg.cells.end(), c);
            if (it == cfg.cells.end()) throw GroupError("trust: cell outside the sensing area");
            size_t z = size_t(it - cfg.cells.begin());
            auto& g = groups[z];
            if (g.empty() || g.back() != i) g.push_back(i);
        }
    }
    return groups;
}

double default_similarity(double value, double group_median, double gamma) {
    double scale = std::max(std::fabs(group_median), 1.0);
    double agreement = 1.0 / (1.0 + std::fabs(value - group_median) / scale);
    if (value * group_median < 0) return -gamma * (1.0 - agreement);
    return gamma * agreement;
}

SimilarityMatrix compute_similarities(const std::vector<ReportCells>& reports,
                                      const std::vector<double>& values, const TrustConfig& cfg,
                                      const std::function<double(double, double, double)>& sim) {
    if (values.size() != reports.size())
        throw GroupError("trust: one value per report required");
    auto groups = group_reports(reports, cfg);
    SimilarityMatrix V(reports.size(), std::vector<double>(cfg.cells.size(), 0.0));
    for (size_t z = 0; z < groups.size(); ++z) {
        if (groups[z].empty()) continue;
        std::vector<double> vals;
        for (size_t i : groups[z]) vals.push_back(values[i]);
        std::sort(vals.begin(), vals.end());
        size_t n = vals.size();
        double med = (n % 2) ? vals[n / 2] : (vals[n / 2 - 1] + vals[n / 2]) / 2.0;
        for (size_t i : groups[z]) {
            double v = sim(values[i], med, cfg.gamma);
            if (std::fabs(v) > cfg.gamma) throw GroupError("trust: similarity beyond gamma");
            V[i][z] = v;
        }
    }
    return V;
}

TrustOutcome trust_levels(const std::vector<ReportCells>& reports, const SimilarityMatrix& V,
                          const std::vector<int64_t>& thresholds, const TrustConfig& cfg) {
    auto groups = group_reports(reports, cfg);
    if (V.size() != reports.size() || thresholds.size() != reports.size())
        throw GroupError("trust: similarity and threshold rows must match the reports");
    for (const auto& row : V)
        if (row.size() != cfg.cells.size())
            throw GroupError("trust: similarity columns must match the cells");

    TrustOutcome out;
    std::vector<double> acc(reports.size(), 0.0);
    std::vector<size_t> covered(reports.size(), 0);
    for (size_t z = 0; z < groups.size(); ++z) {
        if (groups[z].empty()) continue;
        double exp_z = 0;
        for (size_t i : groups[z]) {
            if (std::fabs(V[i][z]) > cfg.gamma) throw GroupError("trust: similarity beyond gamma");
            exp_z += V[i][z] * double(thresholds[i]);
        }
        if (exp_z == 0) {
            out.degenerate.push_back(z);
            for (size_t i : groups[z]) covered[i]++;
            continue;
        }
        for (size_t i : groups[z]) {
            double rho = V[i][z] * double(thresholds[i]);
            acc[i] += (rho / exp_z) * cfg.weights[z] * cfg.gamma;
            covered[i]++;
        }
    }
    out.eps.resize(reports.size(), 0.0);
    for (size_t i = 0; i < reports.size(); ++i) {
        double e = covered[i] ? acc[i] / double(covered[i]) : 0.0;
        out.eps[i] = std::clamp(e, -cfg.gamma, cfg.gamma);
    }
    return out;
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::uniform: return "uniform";
        case Strategy::gaussian_high: return "gaussian-high";
        case Strategy::gaussian_low: return "gaussian-low";
        case Strategy::exact: return "exact";
    }
    throw GroupError("trust: unknown strategy");
}

namespace {

double unit_double(RandomSource& rng) {
    return double(rng.u64() >> 11) * 0x1.0p-53;
}

// Box-Muller off the seeded stream; std::normal_distribution is not
// byte-stable across library versions and the CSV fixtures must be.
double gaussian(RandomSource& rng) {
    constexpr double two_pi = 6.28318530717958647692;
    double u1 = unit_double(rng);
    double u2 = unit_double(rng);
    while (u1 == 0) u1 = unit_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

int64_t draw_threshold(Strategy s, int64_t P, RandomSource& rng) {
    switch (s) {
        case Strategy::uniform: return int64_t(rng.below(uint64_t(P)));
        case Strategy::exact: return P - 1;
        case Strategy::gaussian_high:
        case Strategy::gaussian_low: {
            double mean = (s == Strategy::gaussian_high) ? 0.75 : 0.25;
            for (int tries = 0; tries < 8; ++tries) {
                double q = (mean + 0.25 * gaussian(rng)) * double(P);
                int64_t Q = int64_t(std::llround(q));
                if (Q >= 0 && Q < P) return Q;
            }
            double q = (mean + 0.25 * gaussian(rng)) * double(P);
            return std::clamp(int64_t(std::llround(q)), int64_t(0), P - 1);
        }
    }
    throw GroupError("trust: unknown strategy");
}

}  // namespace

RateCurve simulate_rates(size_t N, size_t w, Strategy s, size_t trials, uint64_t seed,
                         int64_t credit_max) {
    if (N == 0 || w == 0 || w > N) throw GroupError("trust: need 1 <= w <= N");
    if (trials == 0) throw GroupError("trust: need at least one trial");
    if (credit_max < 1) throw GroupError("trust: credit_max must be positive");

    RandomSource root(seed);
    RateCurve sum;
    for (size_t t = 0; t < trials; ++t) {
        RandomSource credit_rng = root.fork("credits", t);
        RandomSource thr_rng = root.fork(strategy_name(s), t);

        std::vector<int64_t> P(N), Q(N);
        for (size_t i = 0; i < N; ++i) P[i] = 1 + int64_t(credit_rng.below(uint64_t(credit_max)));
        for (size_t i = 0; i < N; ++i) Q[i] = draw_threshold(s, P[i], thr_rng);

        std::vector<size_t> by_thr(N), by_credit(N);
        std::iota(by_thr.begin(), by_thr.end(), 0);
        by_credit = by_thr;
        std::sort(by_thr.begin(), by_thr.end(),
                  [&](size_t a, size_t b) { return Q[a] != Q[b] ? Q[a] > Q[b] : a < b; });
        std::sort(by_credit.begin(), by_credit.end(),
                  [&](size_t a, size_t b) { return P[a] != P[b] ? P[a] > P[b] : a < b; });

        int64_t min_thr = Q[by_thr[w - 1]];
        std::vector<char> selected(N, 0), topw(N, 0);
        for (size_t i = 0; i < w; ++i) selected[by_thr[i]] = 1;
        for (size_t i = 0; i < w; ++i) topw[by_credit[i]] = 1;

        size_t hits = 0, eligible = 0;
        int64_t sel_mass = 0, top_mass = 0;
        double hidden = 0;
        for (size_t i = 0; i < N; ++i) {
            if (selected[i] && topw[i]) hits++;
            if (P[i] > min_thr) eligible++;
            if (selected[i]) sel_mass += P[i];
            if (topw[i]) top_mass += P[i];
            hidden += double(P[i] - Q[i]) / double(P[i]);
        }
        sum.accuracy_a += double(hits) / double(w);
        sum.accuracy_b += double(sel_mass) / double(top_mass);
        sum.privacy_a += 1.0 - double(w) / double(eligible);
        sum.privacy_b += hidden / double(N);
    }
    double inv = 1.0 / double(trials);
    return {sum.accuracy_a * inv, sum.accuracy_b * inv, sum.privacy_a * inv,
            sum.privacy_b * inv};
}

}  // namespace mcs
