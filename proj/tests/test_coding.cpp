#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "test_util.hpp"
#include "umlaut/coding.hpp"
#include "umlaut/optim.hpp"

using namespace umlaut;
using testutil::random_density;
using testutil::random_kraus;

namespace {

std::vector<ComplexMatrix> gad_kraus(double gamma, double beta) {
    ComplexMatrix a1 = ComplexMatrix::Zero(2, 2), a2 = ComplexMatrix::Zero(2, 2),
                  a3 = ComplexMatrix::Zero(2, 2), a4 = ComplexMatrix::Zero(2, 2);
    a1(0, 0) = std::sqrt(1 - beta);
    a1(1, 1) = std::sqrt(1 - beta) * std::sqrt(1 - gamma);
    a2(0, 1) = std::sqrt(gamma * (1 - beta));
    a3(0, 0) = std::sqrt(beta) * std::sqrt(1 - gamma);
    a3(1, 1) = std::sqrt(beta);
    a4(1, 0) = std::sqrt(gamma * beta);
    return {a1, a2, a3, a4};
}

Channel replacer_channel(const ComplexMatrix& sigma) {
    const Eigen::Index d = sigma.rows();
    ComplexMatrix sh = matrix_func(sigma, ScalarFunc::Sqrt);
    std::vector<ComplexMatrix> ks;
    for (Eigen::Index kcol = 0; kcol < d; ++kcol)
        for (Eigen::Index i = 0; i < d; ++i) {
            ComplexMatrix m = ComplexMatrix::Zero(d, d);
            m.col(i) = sh.col(kcol);
            ks.push_back(m);
        }
    return choi_from_kraus(ks);
}

// classical NS error for a binary-input channel: fine grid over the input
// distribution with an exact fractional-allocation inner maximization
double classical_ns_error(const RealMatrix& w, int messages) {
    const Eigen::Index nx = w.rows(), ny = w.cols();
    double best = 0.0;
    for (int g = 0; g <= 1000; ++g) {
        RealVector p(2);
        p << g / 1000.0, 1.0 - g / 1000.0;
        double success = 0.0;
        for (Eigen::Index y = 0; y < ny; ++y) {
            std::vector<Eigen::Index> order(static_cast<size_t>(nx), 0);
            for (Eigen::Index x = 0; x < nx; ++x) order[size_t(x)] = x;
            std::sort(order.begin(), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return w(a, y) > w(b, y); });
            double cap = 1.0;
            for (Eigen::Index x : order) {
                double take = std::min(cap, messages * p(x));
                success += w(x, y) * take / messages;
                cap -= take;
                if (cap <= 0) break;
            }
        }
        best = std::max(best, success);
    }
    return 1.0 - best;
}

double classical_renyi(const RealVector& p, const RealVector& q, double alpha) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > 0) acc += std::pow(p(i), alpha) * std::pow(q(i), 1.0 - alpha);
    return std::log(acc) / (alpha - 1.0);
}

ComplexMatrix diag2(double a, double b) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

}  // namespace

TEST_CASE("solve_sdp basics") {
    // min Tr X subject to X >= I
    SdpProblem p;
    p.blocks = {{2, true}};
    p.objective = {ComplexMatrix::Identity(2, 2)};
    SdpConstraint lower;
    lower.maps = {[](const ComplexMatrix& x) { return ComplexMatrix(-x); }};
    lower.sense = SdpConstraint::Sense::Le;
    lower.rhs = -ComplexMatrix::Identity(2, 2);
    p.constraints.push_back(lower);
    SdpSolution sol = solve_sdp(p);
    CHECK(sol.status == "optimal");
    CHECK(sol.primal_value == doctest::Approx(2.0).epsilon(1e-7));

    // weak duality along near-feasible iterates
    for (const auto& it : sol.iterates)
        if (it.primal_residual <= 1e-7 && it.dual_residual <= 1e-7)
            CHECK(it.dual <= it.primal + 1e-9);

    // LP as a diagonal SDP: min x1 + 2 x2, x1 + x2 = 1, x >= 0
    SdpProblem lp;
    lp.blocks = {{1, true}, {1, true}};
    lp.objective = {ComplexMatrix::Identity(1, 1), 2.0 * ComplexMatrix::Identity(1, 1)};
    SdpConstraint sum;
    sum.maps = {[](const ComplexMatrix& x) { return x; },
                [](const ComplexMatrix& x) { return x; }};
    sum.sense = SdpConstraint::Sense::Eq;
    sum.rhs = ComplexMatrix::Identity(1, 1);
    lp.constraints.push_back(sum);
    SdpSolution lsol = solve_sdp(lp);
    CHECK(lsol.status == "optimal");
    CHECK(lsol.primal_value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("hypothesis testing primal sdp") {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 10; ++t) {
        DensityOperator rho(random_density(rng, 2)), sigma(random_density(rng, 2));
        double eps = 0.1 + 0.05 * t;
        ExtendedReal prim = hypothesis_testing_primal_sdp(rho, sigma, eps);
        ExtendedReal dual = hypothesis_testing_divergence(rho, sigma, eps);
        CHECK(std::abs(prim.value - dual.value) < 1e-6);
    }
}

TEST_CASE("ns error probability") {
    std::mt19937_64 rng(62);
    ComplexMatrix sigma = random_density(rng, 2);
    Channel rep = replacer_channel(sigma);
    for (int m : {2, 3, 4}) {
        NsErrorResult r = ns_error_probability(rep, m);
        CHECK(r.sdp.status == "optimal");
        CHECK(std::abs(r.epsilon - (1.0 - 1.0 / m)) < 1e-6);
    }

    Channel id = choi_from_kraus({ComplexMatrix::Identity(2, 2)});
    CHECK(ns_error_probability(id, 2).epsilon <= 1e-7);

    // classical binary symmetric channel, flip 0.1, as a diagonal Choi
    double delta = 0.1;
    ComplexMatrix k0 = ComplexMatrix::Zero(2, 2), k1 = ComplexMatrix::Zero(2, 2),
                  k2 = ComplexMatrix::Zero(2, 2), k3 = ComplexMatrix::Zero(2, 2);
    k0(0, 0) = std::sqrt(1 - delta);
    k1(1, 0) = std::sqrt(delta);
    k2(1, 1) = std::sqrt(1 - delta);
    k3(0, 1) = std::sqrt(delta);
    Channel bsc = choi_from_kraus({k0, k1, k2, k3});
    RealMatrix w(2, 2);
    w << 1 - delta, delta, delta, 1 - delta;
    NsErrorResult rb = ns_error_probability(bsc, 2);
    CHECK(std::abs(rb.epsilon - classical_ns_error(w, 2)) < 1e-5);
}

TEST_CASE("ns degradation and meta-converse grid") {
    // more post-processing noise cannot decrease the NS error
    Channel gad = choi_from_kraus(gad_kraus(0.3, 0.2));
    std::vector<ComplexMatrix> noisy;
    for (const auto& a : gad_kraus(0.3, 0.2))
        for (const auto& b : gad_kraus(0.4, 0.2)) noisy.push_back(b * a);
    Channel worse = choi_from_kraus(noisy);
    double e1 = ns_error_probability(gad, 2).epsilon;
    double e2 = ns_error_probability(worse, 2).epsilon;
    CHECK(e2 >= e1 - 1e-8);

    // -log eps dominates a product-grid lower bound of sup-min D_H^{1/M}
    NsErrorResult r = ns_error_probability(gad, 2);
    double grid = -1e300;
    for (int i = 1; i < 21; ++i) {
        ComplexMatrix rho = diag2(i / 21.0, 1.0 - i / 21.0);
        ComplexMatrix rh = matrix_func(rho, ScalarFunc::Sqrt);
        ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
        ComplexMatrix joint = tensor(rh, id2) * gad.choi.matrix() * tensor(rh, id2);
        auto dh_at = [&](double qv) {
            ComplexMatrix sg = diag2(qv, 1.0 - qv);
            return hypothesis_testing_divergence(DensityOperator(tensor(rho, sg)),
                                                 DensityOperator(joint), 0.5)
                .or_inf();
        };
        double inner = 1e300, qbest = 0.5;
        for (int j = 1; j < 21; ++j) {
            double v = dh_at(j / 21.0);
            if (v < inner) {
                inner = v;
                qbest = j / 21.0;
            }
        }
        // refine the coarse inner minimum so the grid stays a lower bound
        auto [qr, vr] = golden_section_minimize(
            dh_at, std::max(0.0, qbest - 0.1), std::min(1.0, qbest + 0.1), 1e-7);
        (void)qr;
        grid = std::max(grid, std::min(inner, vr));
    }
    CHECK(r.meta_converse.value >= grid - 1e-3);
}

TEST_CASE("nussbaum szkola") {
    std::mt19937_64 rng(63);
    ComplexMatrix r = random_density(rng, 2);
    auto [pp, qq] = nussbaum_szkola(DensityOperator(r), DensityOperator(r));
    CHECK((pp - qq).cwiseAbs().maxCoeff() < 1e-12);

    // commuting diagonal pair: p and q carry the diagonal values on matching
    // indices (eigenvalues come out in ascending order)
    DensityOperator d1(diag2(0.7, 0.3)), d2(diag2(0.2, 0.8));
    auto [p, q] = nussbaum_szkola(d1, d2);
    std::vector<std::pair<double, double>> pairs;
    for (Eigen::Index i = 0; i < 4; ++i)
        if (p(i) + q(i) > 0) pairs.emplace_back(p(i), q(i));
    std::sort(pairs.begin(), pairs.end());
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].first == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(pairs[0].second == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(pairs[1].first == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(pairs[1].second == doctest::Approx(0.2).epsilon(1e-12));

    for (int t = 0; t < 5; ++t) {
        DensityOperator rho(random_density(rng, 2)), sg(random_density(rng, 2));
        auto [pa, qa] = nussbaum_szkola(rho, sg);
        for (double alpha : {0.3, 0.5, 0.7}) {
            double qd = petz_renyi(rho, sg, alpha).value;
            CHECK(std::abs(classical_renyi(pa, qa, alpha) - qd) < 1e-8);
        }
    }
}

TEST_CASE("audenaert gap") {
    std::mt19937_64 rng(64);
    ComplexMatrix r = random_density(rng, 2);
    auto [a, b] = audenaert_gap(DensityOperator(r), DensityOperator(r));
    CHECK(a == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b == doctest::Approx(1.0).epsilon(1e-10));

    auto [c, d] = audenaert_gap(DensityOperator(diag2(1.0, 0.0)), DensityOperator(diag2(0.0, 1.0)));
    CHECK(std::abs(c) < 1e-12);
    CHECK(std::abs(d) < 1e-12);

    for (int t = 0; t < 100; ++t) {
        auto [qm, cl] =
            audenaert_gap(DensityOperator(random_density(rng, 2)),
                          DensityOperator(random_density(rng, 2)));
        CHECK(qm >= 0.5 * cl - 1e-10);
    }
}

TEST_CASE("zero rate exponent") {
    std::mt19937_64 rng(65);
    std::vector<DensityOperator> one{DensityOperator(random_density(rng, 2))};
    CHECK(zero_rate_unassisted_exponent_cq(one).value.value == 0.0);

    std::vector<DensityOperator> two{DensityOperator(random_density(rng, 2)),
                                     DensityOperator(random_density(rng, 2))};
    ComplexMatrix r0 = matrix_func(two[0].matrix(), ScalarFunc::Sqrt);
    ComplexMatrix r1 = matrix_func(two[1].matrix(), ScalarFunc::Sqrt);
    double c01 = -std::log((r0 * r1).trace().real());
    ZeroRateResult zr = zero_rate_unassisted_exponent_cq(two);
    CHECK(zr.value.value == doctest::Approx(c01 / 2.0).epsilon(1e-12));
    CHECK(zr.optimizer(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_FALSE(zr.heuristic);

    std::vector<DensityOperator> orth{DensityOperator(diag2(1.0, 0.0)),
                                      DensityOperator(diag2(0.0, 1.0))};
    CHECK(zero_rate_unassisted_exponent_cq(orth).value.is_inf);

    for (size_t n : {2, 3}) {
        std::vector<DensityOperator> sts;
        for (size_t i = 0; i < n; ++i) sts.push_back(DensityOperator(random_density(rng, 2)));
        ZeroRateResult z = zero_rate_unassisted_exponent_cq(sts);
        double u = cq_channel_umlaut(sts).value.value;
        CHECK(z.value.value <= u + 1e-6);
    }

    std::vector<DensityOperator> four;
    for (int i = 0; i < 4; ++i) four.push_back(DensityOperator(random_density(rng, 2)));
    ZeroRateResult zh = zero_rate_unassisted_exponent_cq(four);
    CHECK(zh.heuristic);
    double u4 = cq_channel_umlaut(four).value.value;
    CHECK(zh.value.value <= u4 + 1e-6);
}

TEST_CASE("sanov finite n estimate") {
    std::mt19937_64 rng(66);

    // product state: the estimate collapses toward -(1/n) log(1 - eps)
    ComplexMatrix pa = random_density(rng, 2), pb = random_density(rng, 2);
    BipartiteState prod{2, 2, DensityOperator(tensor(pa, pb))};
    for (int n : {1, 2}) {
        SanovEstimate e = sanov_finite_n_estimate(prod, 0.5, n);
        CHECK(e.value <= -std::log(0.5) / n + 0.05);
        CHECK(e.value >= 0.0);
    }

    // full-rank correlated state at n = 3 stays above U - 0.2
    BipartiteState s{2, 2, DensityOperator(random_density(rng, 4, 0.2))};
    double u = umlaut_information(s).value.value;
    OptimizerOptions oo;
    oo.max_iter = 60;
    SanovEstimate e3 = sanov_finite_n_estimate(s, 0.5, 3, oo);
    CHECK(e3.value >= u - 0.2);
    CHECK(e3.value <= u + (1.0 + u) / (3.0 * 0.5) + 0.1);
    CHECK(!e3.caveat.empty());

    SanovEstimate lo = sanov_finite_n_estimate(s, 0.01, 2, oo);
    SanovEstimate hi = sanov_finite_n_estimate(s, 0.99, 2, oo);
    CHECK(std::isfinite(lo.value));
    CHECK(std::isfinite(hi.value));
    CHECK(hi.value >= lo.value - 1e-9);

    CHECK_THROWS_AS(sanov_finite_n_estimate(s, 0.5, 7), SizeGuardError);
}
