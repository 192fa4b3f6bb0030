#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mcs/trust.hpp"

using namespace mcs;

namespace {

TrustConfig uniform_config(const std::vector<GridCell>& cells, double gamma = 1.0) {
    TrustConfig cfg;
    cfg.cells = cells;
    cfg.weights.assign(cells.size(), 1.0 / double(cells.size()));
    cfg.gamma = gamma;
    return cfg;
}

// Independent grouping oracle: straight double scan, set semantics.
std::vector<std::set<size_t>> scan_groups(const std::vector<ReportCells>& reports,
                                          const std::vector<GridCell>& cells) {
    std::vector<std::set<size_t>> out(cells.size());
    for (size_t z = 0; z < cells.size(); ++z)
        for (size_t i = 0; i < reports.size(); ++i)
            for (const GridCell& c : reports[i].cells)
                if (c == cells[z]) out[z].insert(i);
    return out;
}

}  // namespace

TEST_CASE("trust config validation") {
    std::vector<GridCell> cells{{0, 0}, {0, 1}};
    TrustConfig cfg = uniform_config(cells);
    CHECK_NOTHROW(check_trust_config(cfg));

    TrustConfig bad = cfg;
    bad.weights = {0.6, 0.6};
    CHECK_THROWS_AS(check_trust_config(bad), GroupError);
    bad.weights = {1.0, 0.0};  // zero weight excluded by (0,1]
    CHECK_THROWS_AS(check_trust_config(bad), GroupError);
    bad.weights = {1.2, -0.2};
    CHECK_THROWS_AS(check_trust_config(bad), GroupError);
    bad = cfg;
    bad.gamma = 0;
    CHECK_THROWS_AS(check_trust_config(bad), GroupError);
    bad = cfg;
    bad.cells = {{0, 0}, {0, 0}};
    CHECK_THROWS_AS(check_trust_config(bad), GroupError);
    bad = cfg;
    bad.cells.clear();
    bad.weights.clear();
    CHECK_THROWS_AS(check_trust_config(bad), GroupError);
    bad = cfg;
    bad.weights.push_back(0.1);
    CHECK_THROWS_AS(check_trust_config(bad), GroupError);
}

TEST_CASE("grouping matches a brute-force cell scan") {
    // a report covering two cells joins both groups
    std::vector<GridCell> cells{{0, 0}, {0, 1}, {1, 0}};
    TrustConfig cfg = uniform_config(cells);
    std::vector<ReportCells> reports{{{GridCell{0, 0}, GridCell{0, 1}}}, {{GridCell{1, 0}}}};
    auto groups = group_reports(reports, cfg);
    CHECK(groups[0] == std::vector<size_t>{0});
    CHECK(groups[1] == std::vector<size_t>{0});
    CHECK(groups[2] == std::vector<size_t>{1});

    // single-cell reports partition
    std::vector<ReportCells> singles{{{GridCell{0, 0}}}, {{GridCell{0, 1}}}, {{GridCell{0, 0}}}};
    auto parts = group_reports(singles, cfg);
    size_t total = 0;
    for (const auto& g : parts) total += g.size();
    CHECK(total == singles.size());

    // random 20-report instance against the scan oracle
    RandomSource rng(0x67727570);
    std::vector<GridCell> area;
    for (uint32_t r = 0; r < 4; ++r)
        for (uint32_t c = 0; c < 4; ++c) area.push_back({r, c});
    TrustConfig big = uniform_config(area);
    std::vector<ReportCells> rnd;
    for (int i = 0; i < 20; ++i) {
        ReportCells rc;
        size_t k = 1 + rng.below(3);
        std::set<GridCell> chosen;
        while (chosen.size() < k)
            chosen.insert(area[rng.below(area.size())]);
        rc.cells.assign(chosen.begin(), chosen.end());
        rnd.push_back(rc);
    }
    auto got = group_reports(rnd, big);
    auto want = scan_groups(rnd, area);
    REQUIRE(got.size() == want.size());
    for (size_t z = 0; z < got.size(); ++z)
        CHECK(std::set<size_t>(got[z].begin(), got[z].end()) == want[z]);

    // out-of-area and empty provenance are errors
    std::vector<ReportCells> out{{{GridCell{9, 9}}}};
    CHECK_THROWS_AS(group_reports(out, cfg), GroupError);
    std::vector<ReportCells> none{{}};
    CHECK_THROWS_AS(group_reports(none, cfg), GroupError);
}

TEST_CASE("trust levels normalize exactly") {
    std::vector<GridCell> one{{0, 0}};
    TrustConfig cfg = uniform_config(one, 0.75);

    // a lone report takes the whole group share regardless of V and Q
    std::vector<ReportCells> lone{{{GridCell{0, 0}}}};
    auto out = trust_levels(lone, {{0.37}}, {123}, cfg);
    CHECK(out.eps[0] == 0.75);
    CHECK(out.degenerate.empty());

    // equal contributions split the share in half, exactly
    std::vector<ReportCells> pair{{{GridCell{0, 0}}}, {{GridCell{0, 0}}}};
    auto halves = trust_levels(pair, {{0.4}, {0.4}}, {50, 50}, cfg);
    CHECK(halves.eps[0] == 0.375);
    CHECK(halves.eps[1] == 0.375);

    // all-positive groups telescope to omega_z * gamma
    RandomSource rng(0x65707332);
    std::vector<GridCell> cells{{0, 0}, {0, 1}, {1, 1}};
    TrustConfig cfg3;
    cfg3.cells = cells;
    cfg3.weights = {0.5, 0.3, 0.2};
    cfg3.gamma = 2.0;
    std::vector<ReportCells> reports;
    SimilarityMatrix V;
    std::vector<int64_t> Q;
    for (int i = 0; i < 12; ++i) {
        size_t z = rng.below(3);
        reports.push_back({{cells[z]}});
        std::vector<double> row(3, 0.0);
        row[z] = 0.05 + double(rng.below(1000)) / 1000.0 * 1.9;
        V.push_back(row);
        Q.push_back(1 + int64_t(rng.below(500)));
    }
    auto res = trust_levels(reports, V, Q, cfg3);
    for (size_t z = 0; z < 3; ++z) {
        double sum = 0;
        bool any = false;
        for (size_t i = 0; i < reports.size(); ++i)
            if (reports[i].cells[0] == cells[z]) {
                sum += res.eps[i];
                any = true;
            }
        if (any) CHECK(std::fabs(sum - cfg3.weights[z] * cfg3.gamma) < 1e-9);
    }
    for (double e : res.eps) CHECK(std::fabs(e) <= cfg3.gamma);
}

TEST_CASE("trust levels handle cancellation and multiple cells") {
    std::vector<GridCell> cells{{0, 0}, {0, 1}};
    TrustConfig cfg;
    cfg.cells = cells;
    cfg.weights = {0.6, 0.4};
    cfg.gamma = 1.0;

    // exact cancellation flags the group and contributes zero
    std::vector<ReportCells> rr{{{GridCell{0, 0}}}, {{GridCell{0, 0}}}};
    SimilarityMatrix V{{0.5, 0.0}, {-0.5, 0.0}};
    auto out = trust_levels(rr, V, {10, 10}, cfg);
    CHECK(out.degenerate == std::vector<size_t>{0});
    CHECK(out.eps[0] == 0.0);
    CHECK(out.eps[1] == 0.0);

    // near-cancellation blows the raw ratio up; results stay within gamma
    SimilarityMatrix W{{0.5, 0.0}, {-0.499, 0.0}};
    auto tight = trust_levels(rr, W, {10, 10}, cfg);
    CHECK(tight.degenerate.empty());
    for (double e : tight.eps) CHECK(std::fabs(e) <= cfg.gamma);

    // a two-cell report averages its per-cell shares
    std::vector<ReportCells> mix{{{GridCell{0, 0}, GridCell{0, 1}}}, {{GridCell{0, 0}}}};
    SimilarityMatrix M{{0.5, 0.8}, {0.5, 0.0}};
    auto avg = trust_levels(mix, M, {10, 30}, cfg);
    // cell 0: rho = (5, 15), shares 0.25*w0, 0.75*w0; cell 1: report 0 alone
    double c0 = (5.0 / 20.0) * 0.6 * 1.0;
    double c1 = 1.0 * 0.4 * 1.0;
    CHECK(avg.eps[0] == doctest::Approx(0.5 * (c0 + c1)).epsilon(1e-12));
    CHECK(avg.eps[1] == doctest::Approx((15.0 / 20.0) * 0.6).epsilon(1e-12));

    // dimension mismatches are errors
    CHECK_THROWS_AS(trust_levels(rr, SimilarityMatrix{{0.5, 0.0}}, {10, 10}, cfg), GroupError);
    CHECK_THROWS_AS(trust_levels(rr, V, {10}, cfg), GroupError);
    SimilarityMatrix ragged{{0.5}, {-0.5}};
    CHECK_THROWS_AS(trust_levels(rr, ragged, {10, 10}, cfg), GroupError);
    SimilarityMatrix hot{{1.5, 0.0}, {-0.5, 0.0}};
    CHECK_THROWS_AS(trust_levels(rr, hot, {10, 10}, cfg), GroupError);
}

TEST_CASE("similarity defaults score agreement and opposition") {
    std::vector<GridCell> cells{{0, 0}};
    TrustConfig cfg = uniform_config(cells, 1.0);
    std::vector<ReportCells> rr{{{cells[0]}}, {{cells[0]}}, {{cells[0]}}};

    auto V = compute_similarities(rr, {12.0, 12.0, -12.0}, cfg);
    CHECK(V[0][0] == 1.0);  // equals the median, full agreement
    CHECK(V[1][0] == 1.0);
    CHECK(V[2][0] < 0.0);  // opposite sign of the median
    CHECK(V[2][0] >= -1.0);

    // even group size: median is the midpoint
    std::vector<ReportCells> four(4, ReportCells{{cells[0]}});
    auto W = compute_similarities(four, {1.0, 3.0, 5.0, 7.0}, cfg);
    CHECK(W[1][0] == doctest::Approx(0.8).epsilon(1e-12));  // 1/(1 + |3-4|/4)

    // custom hook plugs in
    auto flat = compute_similarities(rr, {1.0, 2.0, 3.0}, cfg,
                                     [](double, double, double g) { return g / 2; });
    CHECK(flat[0][0] == 0.5);

    CHECK_THROWS_AS(compute_similarities(rr, {1.0}, cfg), GroupError);
    auto hot = [](double, double, double g) { return 2 * g; };
    CHECK_THROWS_AS(compute_similarities(rr, {1.0, 2.0, 3.0}, cfg, hot), GroupError);
}

namespace {

// Rate oracle: same seeded draws, independently computed rates (argmax
// scans and set arithmetic instead of sorts and flag arrays).
RateCurve oracle_rates(size_t N, size_t w, Strategy s, size_t trials, uint64_t seed,
                       int64_t cmax) {
    REQUIRE((s == Strategy::uniform || s == Strategy::exact));
    RandomSource root(seed);
    RateCurve acc;
    for (size_t t = 0; t < trials; ++t) {
        RandomSource crng = root.fork("credits", t);
        RandomSource trng = root.fork(strategy_name(s), t);
        std::vector<int64_t> P(N), Q(N);
        for (auto& p : P) p = 1 + int64_t(crng.below(uint64_t(cmax)));
        for (size_t i = 0; i < N; ++i)
            Q[i] = (s == Strategy::exact) ? P[i] - 1 : int64_t(trng.below(uint64_t(P[i])));

        auto top_by = [&](const std::vector<int64_t>& key) {
            std::set<size_t> picked;
            while (picked.size() < w) {
                size_t best = N;
                for (size_t i = 0; i < N; ++i) {
                    if (picked.count(i)) continue;
                    if (best == N || key[i] > key[best]) best = i;
                }
                picked.insert(best);
            }
            return picked;
        };
        std::set<size_t> selected = top_by(Q), topw = top_by(P);
        int64_t min_thr = INT64_MAX;
        for (size_t i : selected) min_thr = std::min(min_thr, Q[i]);

        size_t both = 0;
        for (size_t i : selected) both += topw.count(i);
        double selm = 0, topm = 0, elig = 0, hid = 0;
        for (size_t i : selected) selm += double(P[i]);
        for (size_t i : topw) topm += double(P[i]);
        for (size_t i = 0; i < N; ++i) {
            if (P[i] > min_thr) elig += 1;
            hid += double(P[i] - Q[i]) / double(P[i]);
        }
        acc.accuracy_a += double(both) / double(w);
        acc.accuracy_b += selm / topm;
        acc.privacy_a += 1.0 - double(w) / elig;
        acc.privacy_b += hid / double(N);
    }
    return {acc.accuracy_a / trials, acc.accuracy_b / trials, acc.privacy_a / trials,
            acc.privacy_b / trials};
}

}  // namespace

TEST_CASE("rate simulation agrees with the desk-scale oracle") {
    for (Strategy s : {Strategy::uniform, Strategy::exact}) {
        RateCurve got = simulate_rates(5, 2, s, 3, 0x6f7261, 40);
        RateCurve want = oracle_rates(5, 2, s, 3, 0x6f7261, 40);
        CHECK(got.accuracy_a == doctest::Approx(want.accuracy_a).epsilon(1e-12));
        CHECK(got.accuracy_b == doctest::Approx(want.accuracy_b).epsilon(1e-12));
        CHECK(got.privacy_a == doctest::Approx(want.privacy_a).epsilon(1e-12));
        CHECK(got.privacy_b == doctest::Approx(want.privacy_b).epsilon(1e-12));
    }
    // a larger uniform instance, same oracle
    RateCurve got = simulate_rates(40, 7, Strategy::uniform, 5, 0x6f7262, 1000);
    RateCurve want = oracle_rates(40, 7, Strategy::uniform, 5, 0x6f7262, 1000);
    CHECK(got.accuracy_a == doctest::Approx(want.accuracy_a).epsilon(1e-12));
    CHECK(got.accuracy_b == doctest::Approx(want.accuracy_b).epsilon(1e-12));
    CHECK(got.privacy_a == doctest::Approx(want.privacy_a).epsilon(1e-12));
    CHECK(got.privacy_b == doctest::Approx(want.privacy_b).epsilon(1e-12));
}

TEST_CASE("strategy properties") {
    // determinism per seed
    RateCurve a = simulate_rates(100, 10, Strategy::gaussian_high, 20, 7, 1000);
    RateCurve b = simulate_rates(100, 10, Strategy::gaussian_high, 20, 7, 1000);
    CHECK(a.accuracy_a == b.accuracy_a);
    CHECK(a.accuracy_b == b.accuracy_b);
    CHECK(a.privacy_a == b.privacy_a);
    CHECK(a.privacy_b == b.privacy_b);
    RateCurve c = simulate_rates(100, 10, Strategy::gaussian_high, 20, 8, 1000);
    CHECK(a.accuracy_a != c.accuracy_a);

    // staking the full balance reproduces the credit order
    RateCurve exact = simulate_rates(200, 25, Strategy::exact, 10, 11, 1000);
    CHECK(exact.accuracy_a == 1.0);
    CHECK(exact.accuracy_b == 1.0);

    // accuracy-A rises with the strategy mean (1/4 P, 1/2 P, 3/4 P)
    RateCurve lo = simulate_rates(300, 30, Strategy::gaussian_low, 60, 13, 1000);
    RateCurve un = simulate_rates(300, 30, Strategy::uniform, 60, 13, 1000);
    RateCurve hi = simulate_rates(300, 30, Strategy::gaussian_high, 60, 13, 1000);
    CHECK(lo.accuracy_a <= un.accuracy_a);
    CHECK(un.accuracy_a <= hi.accuracy_a);

    // the published ordering at reduced scale: aggressive staking wins on
    // accuracy, conservative staking wins on privacy
    CHECK(hi.accuracy_a > un.accuracy_a);
    CHECK(hi.accuracy_a > lo.accuracy_a);
    CHECK(hi.accuracy_b > un.accuracy_b);
    CHECK(hi.accuracy_b > lo.accuracy_b);
    CHECK(lo.privacy_a > un.privacy_a);
    CHECK(lo.privacy_a > hi.privacy_a);
    CHECK(lo.privacy_b > un.privacy_b);
    CHECK(lo.privacy_b > hi.privacy_b);

    // rates are probabilities or ratios in [0,1]
    for (const RateCurve& r : {lo, un, hi}) {
        CHECK(r.accuracy_a >= 0);
        CHECK(r.accuracy_a <= 1);
        CHECK(r.accuracy_b >= 0);
        CHECK(r.accuracy_b <= 1);
        CHECK(r.privacy_a >= 0);
        CHECK(r.privacy_a <= 1);
        CHECK(r.privacy_b >= 0);
        CHECK(r.privacy_b <= 1);
    }

    CHECK_THROWS_AS(simulate_rates(0, 1, Strategy::uniform, 1, 1, 10), GroupError);
    CHECK_THROWS_AS(simulate_rates(5, 0, Strategy::uniform, 1, 1, 10), GroupError);
    CHECK_THROWS_AS(simulate_rates(5, 6, Strategy::uniform, 1, 1, 10), GroupError);
    CHECK_THROWS_AS(simulate_rates(5, 2, Strategy::uniform, 0, 1, 10), GroupError);
    CHECK_THROWS_AS(simulate_rates(5, 2, Strategy::uniform, 1, 1, 0), GroupError);
}
