#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mcs/geo.hpp"
#include "mcs/group.hpp"
#include "mcs/rng.hpp"

namespace mcs {

// Per-task trust evaluation settings: the sensing area's cells with one
// weight omega_z each (summing to 1), and the trust-level cap gamma.
struct TrustConfig {
    std::vector<GridCell> cells;
    std::vector<double> weights;
    double gamma = 1.0;
};

// Throws unless the weights lie in (0,1] and sum to 1 (1e-9 slack).
void check_trust_config(const TrustConfig& cfg);

// Cells a report's data was collected from; a report joins the group of
// every cell it covers.
struct ReportCells {
    std::vector<GridCell> cells;
};

// groups[z] lists the indices of the reports that cover cfg.cells[z].
// A report naming a cell outside the configured area is an error.
std::vector<std::vector<size_t>> group_reports(const std::vector<ReportCells>& reports,
                                               const TrustConfig& cfg);

// Similarity scores V[i][z] for report i in the group of cell z: negative
// in [-gamma,0] for outliers, positive in (0,gamma] otherwise, and exactly
// 0 whenever report i does not cover cell z.
using SimilarityMatrix = std::vector<std::vector<double>>;

// Default similarity hook: scaled agreement between a report's numeric
// value and the group median, negative when the signs oppose.
double default_similarity(double value, double group_median, double gamma);

// Builds V from per-report numeric values using the hook per group.
SimilarityMatrix compute_similarities(
    const std::vector<ReportCells>& reports, const std::vector<double>& values,
    const TrustConfig& cfg,
    const std::function<double(double, double, double)>& sim = default_similarity);

struct TrustOutcome {
    std::vector<double> eps;         // trust level per report, in [-gamma, gamma]
    std::vector<size_t> degenerate;  // cells whose contributions cancelled to zero
};

// Weighted share of each group's confidence mass: eps_{i,z} =
// (V_{i,z} Q_i / sum_j V_{j,z} Q_j) omega_z gamma, averaged over the cells
// the report covers. A group whose mass sums to zero contributes nothing
// and is flagged. Results are clamped to [-gamma, gamma]; the raw ratio can
// leave the interval when positive and negative scores nearly cancel.
TrustOutcome trust_levels(const std::vector<ReportCells>& reports, const SimilarityMatrix& V,
                          const std::vector<int64_t>& thresholds, const TrustConfig& cfg);

// Threshold-choosing strategies for the credit simulation: how a user with
// P credit points picks the public threshold Q in [0, P).
enum class Strategy {
    uniform,        // Q uniform over [0, P)
    gaussian_high,  // Q ~ N(3P/4, P/4), aggressive staking
    gaussian_low,   // Q ~ N(P/4, P/4), conservative staking
    exact,          // Q = P - 1, thresholds reproduce the credit order
};
const char* strategy_name(Strategy s);

// Four per-strategy figures of merit, each in [0,1], averaged over trials.
// The provider picks the w highest thresholds; "eligible" reports are those
// whose credit exceeds the lowest selected threshold (every selected and
// every top-w report is eligible).
//   accuracy_a: fraction of selected reports holding top-w credit
//   accuracy_b: credit mass of the selected reports over the top-w mass
//   privacy_a:  chance an eligible report is not a top-w holder
//   privacy_b:  mean fraction of a credit value left undisclosed, (P-Q)/P
struct RateCurve {
    double accuracy_a = 0;
    double accuracy_b = 0;
    double privacy_a = 0;
    double privacy_b = 0;
};

// Monte-Carlo estimate over `trials` independent populations of N users
// with credits uniform on [1, credit_max]. Deterministic per seed; the
// credit draw is shared across strategies so curves compare paired samples.
RateCurve simulate_rates(size_t N, size_t w, Strategy s, size_t trials, uint64_t seed,
                         int64_t credit_max = 1000);

}  // namespace mcs
