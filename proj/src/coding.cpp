#include "umlaut/coding.hpp"

#include <cmath>

#include "umlaut/optim.hpp"

namespace umlaut {

NsErrorResult ns_error_probability(const Channel& ch, int messages, const SdpOptions& opts) {
    if (messages < 2) throw InvariantError("ns_error_probability: need at least 2 messages");
    const Eigen::Index din = ch.d_in, dout = ch.d_out, djoint = din * dout;
    if (djoint > 16) throw SizeGuardError("ns_error_probability: d_in*d_out above 16");
    const double m = double(messages);

    SdpProblem p;
    p.blocks = {{din, true}, {djoint, true}};  // rho, Lambda
    p.objective = {ComplexMatrix::Zero(din, din), ComplexMatrix(-ch.choi.matrix() / m)};

    SdpConstraint trace_one;
    trace_one.maps = {[](const ComplexMatrix& r) {
                          ComplexMatrix s(1, 1);
                          s(0, 0) = r.trace();
                          return s;
                      },
                      nullptr};
    trace_one.sense = SdpConstraint::Sense::Eq;
    trace_one.rhs = ComplexMatrix::Identity(1, 1);
    p.constraints.push_back(trace_one);

    SdpConstraint lam_b;
    lam_b.maps = {nullptr, [&](const ComplexMatrix& l) {
                      return partial_trace(l, din, dout, Subsystem::B);
                  }};
    lam_b.sense = SdpConstraint::Sense::Le;
    lam_b.rhs = ComplexMatrix::Identity(dout, dout);
    p.constraints.push_back(lam_b);

    SdpConstraint lam_cap;
    lam_cap.maps = {[&](const ComplexMatrix& r) {
                        return ComplexMatrix(
                            -m * tensor(r, ComplexMatrix::Identity(dout, dout)));
                    },
                    [](const ComplexMatrix& l) { return l; }};
    lam_cap.sense = SdpConstraint::Sense::Le;
    lam_cap.rhs = ComplexMatrix::Zero(djoint, djoint);
    p.constraints.push_back(lam_cap);

    NsErrorResult out;
    out.sdp = solve_sdp(p, opts);
    double success = std::clamp(-out.sdp.primal_value, 0.0, 1.0);
    out.epsilon = 1.0 - success;
    out.meta_converse = out.epsilon <= 1e-300
                            ? ExtendedReal::infinity()
                            : ExtendedReal::finite(-std::log(out.epsilon));
    return out;
}

ExtendedReal hypothesis_testing_primal_sdp(const DensityOperator& rho,
                                           const DensityOperator& sigma, double eps,
                                           const SdpOptions& opts) {
    if (!(eps > 0.0 && eps < 1.0))
        throw InvariantError("hypothesis_testing_primal_sdp: eps outside (0,1)");
    const Eigen::Index d = rho.dim();
    SdpProblem p;
    p.blocks = {{d, true}};
    p.objective = {sigma.matrix()};

    SdpConstraint cap;
    cap.maps = {[](const ComplexMatrix& t) { return t; }};
    cap.sense = SdpConstraint::Sense::Le;
    cap.rhs = ComplexMatrix::Identity(d, d);
    p.constraints.push_back(cap);

    SdpConstraint power;
    power.maps = {[&](const ComplexMatrix& t) {
        ComplexMatrix s(1, 1);
        s(0, 0) = -(rho.matrix() * t).trace();
        return s;
    }};
    power.sense = SdpConstraint::Sense::Le;
    power.rhs = -(1.0 - eps) * ComplexMatrix::Identity(1, 1);
    p.constraints.push_back(power);

    SdpSolution sol = solve_sdp(p, opts);
    double beta = sol.primal_value;
    if (beta <= 1e-300) return ExtendedReal::infinity();
    return ExtendedReal::finite(-std::log(beta));
}

std::pair<RealVector, RealVector> nussbaum_szkola(const DensityOperator& rho,
                                                  const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) throw InvariantError("nussbaum_szkola: dimension mismatch");
    const Eigen::Index d = rho.dim();
    SpectralDecomposition sr = eigh(rho.matrix()), ss = eigh(sigma.matrix());
    RealVector p(d * d), q(d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            double ov = std::norm(sr.eigenvectors.col(a).dot(ss.eigenvectors.col(b)));
            p(a * d + b) = std::max(0.0, sr.eigenvalues(a)) * ov;
            q(a * d + b) = std::max(0.0, ss.eigenvalues(b)) * ov;
        }
    if (std::abs(p.sum() - 1.0) > 1e-10 || std::abs(q.sum() - 1.0) > 1e-10)
        throw InvariantError("nussbaum_szkola: distributions fail to normalize");
    return {p, q};
}

std::pair<double, double> audenaert_gap(const DensityOperator& rho,
                                        const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) throw InvariantError("audenaert_gap: dimension mismatch");
    ComplexMatrix pos =
        matrix_func(ComplexMatrix(rho.matrix() - sigma.matrix()), ScalarFunc::PosPart);
    double quantum = 1.0 - pos.trace().real();
    auto [p, q] = nussbaum_szkola(rho, sigma);
    double classical = p.cwiseMin(q).sum();
    if (quantum < 0.5 * classical - 1e-10)
        throw InvariantError("audenaert_gap: factor-2 comparison violated");
    return {quantum, classical};
}

ZeroRateResult zero_rate_unassisted_exponent_cq(const std::vector<DensityOperator>& states,
                                                const OptimizerOptions& opts) {
    const Eigen::Index n = Eigen::Index(states.size());
    if (n == 0) throw InvariantError("zero_rate_unassisted_exponent_cq: empty alphabet");
    if (n > 16) throw SizeGuardError("zero_rate_unassisted_exponent_cq: alphabet above 16");

    ZeroRateResult out;
    if (n == 1) {
        out.value = ExtendedReal::finite(0.0);
        out.optimizer = RealVector::Ones(1);
        return out;
    }
    std::vector<ComplexMatrix> roots;
    for (const auto& s : states) roots.push_back(matrix_func(s.matrix(), ScalarFunc::Sqrt));
    RealMatrix c = RealMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double t = (roots[size_t(i)] * roots[size_t(j)]).trace().real();
            if (t <= 1e-300) {
                // an orthogonal pair makes the supremum infinite
                out.value = ExtendedReal::infinity();
                out.optimizer = RealVector::Zero(n);
                out.optimizer(i) = out.optimizer(j) = 0.5;
                return out;
            }
            c(i, j) = c(j, i) = -std::log(t);
        }

    auto quad = [&](const RealVector& p) { return p.dot(c * p); };
    double best = 0.0;
    RealVector bestp = RealVector::Zero(n);
    bestp(0) = 1.0;
    if (n <= 3) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                if (c(i, j) / 2.0 > best) {
                    best = c(i, j) / 2.0;
                    bestp = RealVector::Zero(n);
                    bestp(i) = bestp(j) = 0.5;
                }
        if (n == 3) {
            // interior stationary point: 2 C P = lambda 1, sum P = 1
            RealMatrix sys = RealMatrix::Zero(4, 4);
            sys.block(0, 0, 3, 3) = 2.0 * c;
            sys.block(0, 3, 3, 1) = -RealVector::Ones(3);
            sys.block(3, 0, 1, 3) = RealVector::Ones(3).transpose();
            RealVector rhs = RealVector::Zero(4);
            rhs(3) = 1.0;
            Eigen::FullPivLU<RealMatrix> lu(sys);
            if (lu.isInvertible()) {
                RealVector sol = lu.solve(rhs);
                RealVector p = sol.head(3);
                if (p.minCoeff() > 0 && quad(p) > best) {
                    best = quad(p);
                    bestp = p;
                }
            }
        }
    } else {
        out.heuristic = true;
        MirrorOptions mo;
        mo.max_iter = opts.max_iter;
        mo.tol = 1e-12;
        mo.patience = 20;
        for (int s = 0; s < 8; ++s) {
            RealVector init;
            if (s == 0)
                init = RealVector::Constant(n, 1.0 / double(n));
            else {
                std::mt19937_64 rng(opts.seed + std::uint64_t(s) * 131);
                std::normal_distribution<double> g;
                init.resize(n);
                for (Eigen::Index i = 0; i < n; ++i) init(i) = std::exp(g(rng));
                init /= init.sum();
            }
            SimplexResult sr =
                simplex_minimize([&](const RealVector& p) { return -quad(p); }, init, mo);
            if (-sr.value > best) {
                best = -sr.value;
                bestp = sr.p;
            }
        }
    }
    out.value = ExtendedReal::finite(best);
    out.optimizer = bestp;
    return out;
}

SanovEstimate sanov_finite_n_estimate(const BipartiteState& s, double eps, int n,
                                      const OptimizerOptions& opts) {
    if (n < 1) throw InvariantError("sanov_finite_n_estimate: n must be positive");
    double total = std::pow(double(s.d_a * s.d_b), n);
    if (total > 4096.0) throw SizeGuardError("sanov_finite_n_estimate: dimension above 4096");

    ComplexMatrix rho_a = s.marginal_a();
    ComplexMatrix rho_abn = s.rho.matrix();
    for (int k = 1; k < n; ++k) rho_abn = tensor(rho_abn, s.rho.matrix());
    DensityOperator alt(rho_abn);

    auto f = [&](const ComplexMatrix& sigma_raw) {
        ComplexMatrix p = matrix_func(sigma_raw, ScalarFunc::PosPart);
        double tr = p.trace().real();
        if (tr <= 0) return std::numeric_limits<double>::infinity();
        p /= tr;
        ComplexMatrix block = tensor(rho_a, p);
        ComplexMatrix taun = block;
        for (int k = 1; k < n; ++k) taun = tensor(taun, block);
        return hypothesis_testing_divergence(DensityOperator(taun), alt, eps).or_inf() /
               double(n);
    };
    MirrorOptions mo;
    mo.max_iter = std::min(opts.max_iter, 200);
    mo.tol = 1e-6;
    mo.patience = 5;
    // candidate starts: maximally mixed, ordinary marginal, umlaut-marginal
    std::vector<ComplexMatrix> starts{
        ComplexMatrix::Identity(s.d_b, s.d_b) / double(s.d_b), s.marginal_b()};
    if (finiteness_check(s)) starts.push_back(umlaut_marginal(s).matrix());
    ComplexMatrix init = starts[0];
    double best0 = std::numeric_limits<double>::infinity();
    for (const auto& c : starts) {
        double v = f(c);
        if (v < best0) {
            best0 = v;
            init = c;
        }
    }
    MirrorResult mr = mirror_minimize(f, init, mo);
    SanovEstimate est;
    est.value = std::min(mr.value, best0);
    est.caveat = "alternative restricted to i.i.d. sigma^(x)n; upper estimate";
    return est;
}

}  // namespace umlaut
