#include "umlaut/umlaut_channel.hpp"

#include <algorithm>
#include <cmath>

#include "umlaut/optim.hpp"

namespace umlaut {

namespace {

double inf_norm(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ComplexMatrix clip_density(const ComplexMatrix& x) {
    ComplexMatrix p = matrix_func(x, ScalarFunc::PosPart);
    double tr = p.trace().real();
    if (tr <= 0) throw InvariantError("clip_density: zero trace");
    return p / tr;
}

// orthonormal basis of the common support of a family of states
ComplexMatrix common_support(const std::vector<const ComplexMatrix*>& states) {
    const Eigen::Index d = states.front()->rows();
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    for (const auto* s : states)
        acc += ComplexMatrix::Identity(d, d) - support_projector(*s);
    SpectralDecomposition sd = eigh(acc);
    double cutoff = 1e-8 * std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
        if (sd.eigenvalues(i) <= cutoff) keep.push_back(i);
    ComplexMatrix v(d, Eigen::Index(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) v.col(k) = sd.eigenvectors.col(keep[k]);
    return v;
}

// -log Tr exp(sum_x w(x) log rho_x) on the common support of the
// participating states; +infinity if that support is trivial
double neg_log_tr_exp(const std::vector<const ComplexMatrix*>& states,
                      const std::vector<double>& w) {
    ComplexMatrix v = common_support(states);
    if (v.cols() == 0) return std::numeric_limits<double>::infinity();
    ComplexMatrix acc = ComplexMatrix::Zero(v.cols(), v.cols());
    for (size_t i = 0; i < states.size(); ++i) {
        ComplexMatrix r = v.adjoint() * (*states[i]) * v;
        r = 0.5 * (r + r.adjoint().eval());
        acc += w[i] * matrix_func(r, ScalarFunc::Log, KernelPolicy::restrict());
    }
    SpectralDecomposition sd = eigh(acc);
    double shift = sd.eigenvalues.maxCoeff();
    double tr = (sd.eigenvalues.array() - shift).exp().sum();
    return -(std::log(tr) + shift);
}

}  // namespace

Channel::Channel(Eigen::Index din, Eigen::Index dout, HermitianOperator j,
                 std::optional<CqStructure> cq_s, std::optional<CovariantStructure> cov_s)
    : d_in(din), d_out(dout), choi(std::move(j)), cq(std::move(cq_s)),
      covariant(std::move(cov_s)) {
    if (choi.dim() != d_in * d_out)
        throw InvariantError("Channel: Choi dimension mismatch");
    SpectralDecomposition sd = eigh(choi.matrix());
    double scale = std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
    if (sd.eigenvalues.minCoeff() < -tol::psd * scale)
        throw InvariantError("Channel: Choi not PSD");
    ComplexMatrix tb = partial_trace(choi.matrix(), d_in, d_out, Subsystem::A);
    if (inf_norm(tb - ComplexMatrix::Identity(d_in, d_in)) > 1e-8)
        throw InvariantError("Channel: not trace preserving");
    if (cq) {
        if (Eigen::Index(cq->states.size()) != d_in)
            throw InvariantError("Channel: cq alphabet size mismatch");
        ComplexMatrix want = ComplexMatrix::Zero(choi.dim(), choi.dim());
        for (Eigen::Index x = 0; x < d_in; ++x)
            want.block(x * d_out, x * d_out, d_out, d_out) = cq->states[x].matrix();
        if (inf_norm(want - choi.matrix()) > 1e-10)
            throw InvariantError("Channel: Choi does not match cq structure");
    }
    if (covariant) {
        if (covariant->group_in.size() != covariant->group_out.size())
            throw InvariantError("Channel: covariant group size mismatch");
        for (size_t g = 0; g < covariant->group_in.size(); ++g) {
            ComplexMatrix w = tensor(covariant->group_in[g].conjugate(),
                                     covariant->group_out[g]);
            if (inf_norm(w * choi.matrix() * w.adjoint() - choi.matrix()) >
                1e-8 * std::max(1.0, inf_norm(choi.matrix())))
                throw InvariantError("Channel: covariance verification failure");
        }
    }
}

Channel choi_from_kraus(const std::vector<ComplexMatrix>& kraus) {
    if (kraus.empty()) throw InvariantError("choi_from_kraus: empty Kraus set");
    const Eigen::Index dout = kraus[0].rows(), din = kraus[0].cols();
    ComplexMatrix acc = ComplexMatrix::Zero(din, din);
    for (const auto& k : kraus) acc += k.adjoint() * k;
    if (inf_norm(acc - ComplexMatrix::Identity(din, din)) > 1e-8)
        throw InvariantError("choi_from_kraus: Kraus set not trace preserving");
    ComplexMatrix j = ComplexMatrix::Zero(din * dout, din * dout);
    for (const auto& k : kraus) {
        // vec(K) as a column of the A'B space gives J += vec vec^dagger
        ComplexMatrix v(din * dout, 1);
        for (Eigen::Index i = 0; i < din; ++i)
            for (Eigen::Index o = 0; o < dout; ++o) v(i * dout + o, 0) = k(o, i);
        j += v * v.adjoint();
    }
    return Channel(din, dout, HermitianOperator(j));
}

BipartiteState output_state(const Channel& ch, const DensityOperator& rho_in) {
    if (rho_in.dim() != ch.d_in)
        throw InvariantError("output_state: input dimension mismatch");
    ComplexMatrix rh = matrix_func(rho_in.matrix(), ScalarFunc::Sqrt);
    ComplexMatrix s = tensor(rh, ComplexMatrix::Identity(ch.d_out, ch.d_out));
    ComplexMatrix m = s * ch.choi.matrix() * s;
    m = 0.5 * (m + m.adjoint().eval());
    m /= m.trace().real();
    return BipartiteState(ch.d_in, ch.d_out, DensityOperator(m));
}

Channel tensor_square(const Channel& ch) {
    ComplexMatrix j2 = tensor(ch.choi.matrix(), ch.choi.matrix());
    j2 = reorder_systems(j2, {ch.d_in, ch.d_out, ch.d_in, ch.d_out}, {0, 2, 1, 3});
    return Channel(ch.d_in * ch.d_in, ch.d_out * ch.d_out, HermitianOperator(j2));
}

bool channel_finiteness_check(const Channel& ch) {
    if (ch.cq) {
        std::vector<const ComplexMatrix*> ptrs;
        for (const auto& s : ch.cq->states) ptrs.push_back(&s.matrix());
        return common_support(ptrs).cols() > 0;
    }
    ComplexMatrix q = ComplexMatrix::Identity(ch.choi.dim(), ch.choi.dim()) -
                      support_projector(ch.choi.matrix());
    ComplexMatrix tb = partial_trace(q, ch.d_in, ch.d_out, Subsystem::B);
    SpectralDecomposition sd = eigh(tb);
    return sd.eigenvalues.minCoeff() <=
           1e-8 * std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
}

namespace {

double channel_objective(const Channel& ch, const ComplexMatrix& rho_raw) {
    // callers run this only after the global finiteness check, so an infinite
    // value here is a support-cutoff artifact near the boundary of the state
    // set; retry with a growing full-rank floor, then reject the point
    ComplexMatrix p0 = clip_density(rho_raw);
    const Eigen::Index d = p0.rows();
    for (double delta : {0.0, 1e-9, 1e-6}) {
        ComplexMatrix p =
            (1.0 - delta) * p0 + delta * ComplexMatrix::Identity(d, d) / double(d);
        ExtendedReal v = umlaut_information(output_state(ch, DensityOperator(p))).value;
        if (!v.is_inf) return v.value;
    }
    return -std::numeric_limits<double>::infinity();
}

struct AscentOutcome {
    ComplexMatrix rho;
    double value;
    Diagnostics diag;
};

AscentOutcome multi_start_ascent(const std::function<double(const ComplexMatrix&)>& g,
                                 Eigen::Index d, const OptimizerOptions& opts,
                                 int starts,
                                 const std::function<ComplexMatrix(ComplexMatrix)>&
                                     project = nullptr) {
    MirrorOptions mo;
    mo.eta0 = 2.0;
    mo.max_iter = opts.max_iter;
    mo.tol = 1e-9;
    mo.patience = 50;
    AscentOutcome out;
    out.value = -std::numeric_limits<double>::infinity();
    auto f = [&](const ComplexMatrix& x) { return -g(x); };
    for (int s = 0; s < starts; ++s) {
        ComplexMatrix init = s == 0 ? ComplexMatrix::Identity(d, d) / double(d)
                                    : seeded_density(opts.seed + std::uint64_t(s), d);
        if (project) init = project(init);
        MirrorResult mr = mirror_minimize(f, init, mo);
        out.diag.start_values.push_back(-mr.value);
        if (-mr.value > out.value) {
            out.value = -mr.value;
            out.rho = mr.x;
            out.diag.iterations = mr.iterations;
            out.diag.converged = mr.converged;
        }
    }
    double lo = *std::min_element(out.diag.start_values.begin(),
                                  out.diag.start_values.end());
    if (out.value - lo > 1e-4)
        out.diag.warnings.push_back("multi-start disagreement above 1e-4");
    // final gradient norm as an attainment diagnostic
    double gn = 0.0;
    for (const auto& b : gell_mann_basis(d)) {
        double gp = g(out.rho + 1e-6 * b), gm = g(out.rho - 1e-6 * b);
        double c = (gp - gm) / 2e-6;
        gn += c * c;
    }
    out.diag.residual = std::sqrt(gn);
    return out;
}

}  // namespace

ChannelUmlautResult channel_umlaut(const Channel& ch, const OptimizerOptions& opts) {
    ChannelUmlautResult r;
    if (!channel_finiteness_check(ch)) {
        r.value = ExtendedReal::infinity();
        return r;
    }
    auto g = [&](const ComplexMatrix& x) { return channel_objective(ch, x); };
    AscentOutcome out = multi_start_ascent(g, ch.d_in, opts, 8);
    r.value = ExtendedReal::finite(out.value);
    ComplexMatrix p0 = clip_density(out.rho);
    const Eigen::Index d = p0.rows();
    for (double delta : {0.0, 1e-9, 1e-6}) {
        ComplexMatrix p =
            (1.0 - delta) * p0 + delta * ComplexMatrix::Identity(d, d) / double(d);
        DensityOperator rho(p);
        BipartiteState out_state = output_state(ch, rho);
        if (!finiteness_check(out_state)) continue;
        r.optimizer_sigma = umlaut_marginal(out_state);
        r.optimizer_rho = std::move(rho);
        break;
    }
    r.diagnostics = std::move(out.diag);
    return r;
}

ChannelUmlautResult channel_umlaut_covariant(const Channel& ch,
                                             const OptimizerOptions& opts) {
    if (!ch.covariant)
        throw InvariantError("channel_umlaut_covariant: no covariant structure");
    ChannelUmlautResult r;
    if (!channel_finiteness_check(ch)) {
        r.value = ExtendedReal::infinity();
        return r;
    }
    const Eigen::Index d = ch.d_in;
    const auto& group = ch.covariant->group_in;

    // invariant Hermitian subspace on A' by twirling a fixed basis
    auto twirl = [&](const ComplexMatrix& b) {
        ComplexMatrix acc = ComplexMatrix::Zero(d, d);
        for (const auto& u : group) {
            ComplexMatrix uc = u.conjugate();
            acc += uc * b * uc.adjoint();
        }
        return ComplexMatrix(acc / double(group.size()));
    };
    std::vector<ComplexMatrix> inv_basis;
    std::vector<ComplexMatrix> probe = gell_mann_basis(d);
    probe.insert(probe.begin(), ComplexMatrix::Identity(d, d));
    for (const auto& b : probe) {
        ComplexMatrix t = twirl(b);
        for (const auto& e : inv_basis) t -= (e.adjoint() * t).trace() * e;
        double n = t.norm();
        if (n > 1e-10) inv_basis.push_back(t / n);
    }

    auto g = [&](const ComplexMatrix& x) { return channel_objective(ch, x); };

    bool diagonal_family = d == 2 && inv_basis.size() == 2;
    for (const auto& b : inv_basis) {
        ComplexMatrix off = b;
        off.diagonal().setZero();
        if (inf_norm(off) > 1e-12) diagonal_family = false;
    }

    Diagnostics diag;
    ComplexMatrix best_rho;
    double best = 0.0;
    if (diagonal_family) {
        // Z-covariant qubit case: rho(p) = diag(p, 1-p), golden-section search
        auto fp = [&](double p) {
            ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
            rho(0, 0) = p;
            rho(1, 1) = 1.0 - p;
            return -g(rho);
        };
        auto [p, negv] = golden_section_minimize(fp, 0.0, 1.0, 1e-10);
        best = -negv;
        best_rho = ComplexMatrix::Zero(2, 2);
        best_rho(0, 0) = p;
        best_rho(1, 1) = 1.0 - p;
        diag.converged = true;
    } else {
        auto project = [&](ComplexMatrix x) { return clip_density(twirl(x)); };
        AscentOutcome out = multi_start_ascent(g, d, opts, 8, project);
        best = out.value;
        best_rho = clip_density(out.rho);
        diag = std::move(out.diag);
    }
    r.value = ExtendedReal::finite(best);
    ComplexMatrix p0 = clip_density(best_rho);
    for (double delta : {0.0, 1e-9, 1e-6}) {
        ComplexMatrix p =
            (1.0 - delta) * p0 + delta * ComplexMatrix::Identity(d, d) / double(d);
        DensityOperator rho(p);
        BipartiteState out_state = output_state(ch, rho);
        if (!finiteness_check(out_state)) continue;
        r.optimizer_sigma = umlaut_marginal(out_state);
        r.optimizer_rho = std::move(rho);
        break;
    }
    r.diagnostics = std::move(diag);
    return r;
}

double cq_umlaut_at(const std::vector<DensityOperator>& states, const RealVector& p) {
    std::vector<const ComplexMatrix*> ptrs;
    std::vector<double> w;
    for (Eigen::Index x = 0; x < p.size(); ++x) {
        if (p(x) > 1e-15) {
            ptrs.push_back(&states[size_t(x)].matrix());
            w.push_back(p(x));
        }
    }
    return neg_log_tr_exp(ptrs, w);
}

ChannelUmlautResult cq_channel_umlaut(const std::vector<DensityOperator>& states,
                                      const OptimizerOptions& opts) {
    ChannelUmlautResult r;
    std::vector<const ComplexMatrix*> ptrs;
    for (const auto& s : states) ptrs.push_back(&s.matrix());
    ComplexMatrix v = common_support(ptrs);
    if (v.cols() == 0) {
        r.value = ExtendedReal::infinity();
        return r;
    }
    const Eigen::Index n = Eigen::Index(states.size());
    auto f = [&](const RealVector& p) {
        RealVector q = p.cwiseMax(0.0);
        q /= q.sum();
        return -cq_umlaut_at(states, q);
    };
    MirrorOptions mo;
    mo.max_iter = opts.max_iter;
    mo.tol = opts.tol;
    mo.patience = 20;
    SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(opts.seed + 77);
    for (int s = 0; s < 4; ++s) {
        RealVector init(n);
        if (s == 0) {
            init.setConstant(1.0 / double(n));
        } else {
            std::normal_distribution<double> g;
            for (Eigen::Index i = 0; i < n; ++i) init(i) = std::exp(g(rng));
            init /= init.sum();
        }
        SimplexResult sr = simplex_minimize(f, init, mo);
        r.diagnostics.start_values.push_back(-sr.value);
        if (sr.value < best.value) best = sr;
    }
    r.value = ExtendedReal::finite(-best.value);
    r.diagnostics.iterations = best.iterations;
    r.diagnostics.converged = best.converged;
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) rho(i, i) = best.p(i);
    r.optimizer_rho = DensityOperator(rho);
    // umlaut-marginal of the induced CQ state at the optimal P
    ComplexMatrix acc = ComplexMatrix::Zero(v.cols(), v.cols());
    for (Eigen::Index x = 0; x < n; ++x) {
        if (best.p(x) <= 1e-15) continue;
        ComplexMatrix rr = v.adjoint() * states[size_t(x)].matrix() * v;
        rr = 0.5 * (rr + rr.adjoint().eval());
        acc += best.p(x) * matrix_func(rr, ScalarFunc::Log, KernelPolicy::restrict());
    }
    ComplexMatrix e = matrix_func(acc, ScalarFunc::Exp);
    r.optimizer_sigma = DensityOperator(v * (e / e.trace().real()) * v.adjoint());
    return r;
}

namespace {

// annealed soft-max minimization of sigma -> max_x d_x(sigma), with d_x given
// by a divergence evaluator on the common-support coordinates
ChannelUmlautResult anneal_minimax(
    Eigen::Index k, const std::function<RealVector(const ComplexMatrix&)>& ds,
    const ComplexMatrix& v, const OptimizerOptions& opts, int starts) {
    auto smooth = [&](const ComplexMatrix& tau, double t) {
        RealVector d = ds(clip_density(tau));
        double m = d.maxCoeff();
        return m + t * std::log(((d.array() - m) / t).exp().sum());
    };
    ChannelUmlautResult r;
    double bestv = std::numeric_limits<double>::infinity();
    ComplexMatrix bestx;
    Diagnostics diag;
    for (int s = 0; s < starts; ++s) {
        ComplexMatrix x = s == 0 ? ComplexMatrix::Identity(k, k) / double(k)
                                 : seeded_density(opts.seed + std::uint64_t(s), k);
        int iters = 0;
        for (double t = 1.0; t > 1e-5; t *= 0.7) {
            MirrorOptions mo;
            mo.max_iter = 2000;
            mo.tol = 1e-10;
            mo.patience = 5;
            MirrorResult mr = mirror_minimize(
                [&](const ComplexMatrix& tau) { return smooth(tau, t); }, x, mo);
            x = mr.x;
            iters += mr.iterations;
        }
        double hard = ds(clip_density(x)).maxCoeff();
        diag.start_values.push_back(hard);
        if (hard < bestv) {
            bestv = hard;
            bestx = x;
            diag.iterations = iters;
        }
    }
    r.value = ExtendedReal::finite(bestv);
    r.optimizer_sigma = DensityOperator(v * clip_density(bestx) * v.adjoint());
    r.diagnostics = std::move(diag);
    return r;
}

}  // namespace

ChannelUmlautResult cq_channel_umlaut_dual(const std::vector<DensityOperator>& states,
                                           const OptimizerOptions& opts) {
    std::vector<const ComplexMatrix*> ptrs;
    for (const auto& s : states) ptrs.push_back(&s.matrix());
    ComplexMatrix v = common_support(ptrs);
    ChannelUmlautResult r;
    if (v.cols() == 0) {
        r.value = ExtendedReal::infinity();
        return r;
    }
    const Eigen::Index k = v.cols();
    std::vector<ComplexMatrix> logs;  // restricted log rho_x on the subspace
    for (const auto& s : states) {
        ComplexMatrix rr = v.adjoint() * s.matrix() * v;
        rr = 0.5 * (rr + rr.adjoint().eval());
        logs.push_back(matrix_func(rr, ScalarFunc::Log, KernelPolicy::restrict()));
    }
    auto ds = [&](const ComplexMatrix& tau) {
        ComplexMatrix lt = matrix_func(tau, ScalarFunc::Log, KernelPolicy::restrict());
        RealVector d(Eigen::Index(states.size()));
        for (size_t x = 0; x < states.size(); ++x)
            d(Eigen::Index(x)) = (tau * (lt - logs[x])).trace().real();
        return d;
    };
    return anneal_minimax(k, ds, v, opts, 4);
}

double lower_umlaut_ell(const std::vector<DensityOperator>& states, const RealVector& p,
                        int k, const RealVector& q) {
    const size_t n = states.size();
    if (std::pow(double(n), k) > 1e6)
        throw SizeGuardError("lower_umlaut_ell: |X|^k exceeds 1e6");
    if (std::abs(q.sum() - 1.0) > 1e-12)
        throw InvariantError("lower_umlaut_ell: q does not sum to 1");
    if (q.size() != k) throw InvariantError("lower_umlaut_ell: q has wrong length");

    double acc = 0.0;
    std::vector<size_t> idx(size_t(k), 0);
    while (true) {
        double weight = 1.0;
        for (int i = 0; i < k; ++i) weight *= p(Eigen::Index(idx[size_t(i)]));
        if (weight > 0.0) {
            std::vector<const ComplexMatrix*> ptrs;
            std::vector<double> w;
            for (int i = 0; i < k; ++i) {
                ptrs.push_back(&states[idx[size_t(i)]].matrix());
                w.push_back(q(i));
            }
            acc += weight * neg_log_tr_exp(ptrs, w);
        }
        int pos = k - 1;
        while (pos >= 0 && ++idx[size_t(pos)] == n) idx[size_t(pos--)] = 0;
        if (pos < 0) break;
    }
    return acc;
}

double ell_convergence_bound(const std::vector<DensityOperator>& states,
                             const RealVector& p, int k) {
    // all states in supp(P) must share support
    std::vector<const ComplexMatrix*> ptrs;
    std::vector<double> w;
    Eigen::Index rank = -1;
    for (Eigen::Index x = 0; x < p.size(); ++x) {
        if (p(x) <= 1e-15) continue;
        const ComplexMatrix& m = states[size_t(x)].matrix();
        Eigen::Index rk = Eigen::Index(
            std::lround(support_projector(m).trace().real()));
        if (rank < 0) rank = rk;
        if (rk != rank) throw InvariantError("ell_convergence_bound: differing supports");
        ptrs.push_back(&m);
        w.push_back(p(x));
    }
    ComplexMatrix v = common_support(ptrs);
    if (v.cols() != rank)
        throw InvariantError("ell_convergence_bound: differing supports");

    double u = neg_log_tr_exp(ptrs, w);
    ComplexMatrix rp = ComplexMatrix::Zero(v.cols(), v.cols());
    for (const auto* m : ptrs) {
        ComplexMatrix rr = v.adjoint() * (*m) * v;
        rr = 0.5 * (rr + rr.adjoint().eval());
        rp -= matrix_func(rr, ScalarFunc::Log, KernelPolicy::restrict());
    }
    double lmax = eigh(rp).eigenvalues.maxCoeff();
    double pmin = *std::min_element(w.begin(), w.end());
    double pstar = std::cbrt(2.0 * u / lmax) / std::cbrt(double(k));
    if (pstar < pmin)
        return 3.0 / std::cbrt(double(k)) * std::pow(0.5 * u * u * lmax, 2.0 / 3.0);
    return u / (double(k) * pmin * pmin) + pmin * lmax;
}

ExtendedReal chernoff_lower_bound(const std::vector<DensityOperator>& states,
                                  const RealVector& p) {
    double acc = 0.0;
    for (Eigen::Index x = 0; x < p.size(); ++x)
        for (Eigen::Index y = 0; y < p.size(); ++y) {
            if (p(x) * p(y) <= 0.0) continue;
            ComplexMatrix sx = matrix_func(states[size_t(x)].matrix(), ScalarFunc::Sqrt);
            ComplexMatrix sy = matrix_func(states[size_t(y)].matrix(), ScalarFunc::Sqrt);
            double t = (sx * sy).trace().real();
            if (t <= 1e-300) return ExtendedReal::infinity();
            acc += p(x) * p(y) * (-std::log(t));
        }
    return ExtendedReal::finite(acc);
}

ChannelUmlautResult bs_channel_umlaut(const Channel& ch, const OptimizerOptions& opts) {
    ChannelUmlautResult r;
    if (!channel_finiteness_check(ch)) {
        r.value = ExtendedReal::infinity();
        return r;
    }
    if (ch.cq) {
        // min_sigma max_x D_BS(sigma || rho_x) on the common support
        std::vector<const ComplexMatrix*> ptrs;
        for (const auto& s : ch.cq->states) ptrs.push_back(&s.matrix());
        ComplexMatrix v = common_support(ptrs);
        const Eigen::Index k = v.cols();
        std::vector<ComplexMatrix> invs;
        for (const auto& s : ch.cq->states) {
            ComplexMatrix rr = v.adjoint() * s.matrix() * v;
            rr = 0.5 * (rr + rr.adjoint().eval());
            invs.push_back(matrix_func(rr, ScalarFunc::Power, KernelPolicy::restrict(), -1.0));
        }
        auto ds = [&](const ComplexMatrix& tau) {
            ComplexMatrix th = matrix_func(tau, ScalarFunc::Sqrt, KernelPolicy::restrict());
            RealVector d(Eigen::Index(invs.size()));
            for (size_t x = 0; x < invs.size(); ++x) {
                ComplexMatrix m = th * invs[x] * th;
                ComplexMatrix lm = matrix_func(m, ScalarFunc::Log, KernelPolicy::restrict());
                d(Eigen::Index(x)) = (tau * lm).trace().real();
            }
            return d;
        };
        return anneal_minimax(k, ds, v, opts, 5);
    }

    // generic: min over sigma on K of || Tr_B[(1 x sigma) log((1 x sigma^1/2)
    // J^+ (1 x sigma^1/2))] ||_inf, smoothed over the A' spectrum
    ComplexMatrix q = ComplexMatrix::Identity(ch.choi.dim(), ch.choi.dim()) -
                      support_projector(ch.choi.matrix());
    ComplexMatrix tb = partial_trace(q, ch.d_in, ch.d_out, Subsystem::B);
    SpectralDecomposition sd = eigh(tb);
    double cutoff = 1e-8 * std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
        if (sd.eigenvalues(i) <= cutoff) keep.push_back(i);
    ComplexMatrix v(ch.d_out, Eigen::Index(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) v.col(i) = sd.eigenvectors.col(keep[i]);
    const Eigen::Index k = v.cols();

    ComplexMatrix jinv = matrix_func(ch.choi.matrix(), ScalarFunc::Power,
                                     KernelPolicy::restrict(), -1.0);
    ComplexMatrix id_a = ComplexMatrix::Identity(ch.d_in, ch.d_in);
    auto ds = [&](const ComplexMatrix& tau) {
        ComplexMatrix sigma = v * tau * v.adjoint();
        ComplexMatrix sh = matrix_func(sigma, ScalarFunc::Sqrt, KernelPolicy::restrict());
        ComplexMatrix shb = tensor(id_a, sh);
        ComplexMatrix g = shb * jinv * shb;
        ComplexMatrix lg = matrix_func(g, ScalarFunc::Log, KernelPolicy::restrict());
        ComplexMatrix m = partial_trace(tensor(id_a, sigma) * lg, ch.d_in, ch.d_out,
                                        Subsystem::A);
        m = 0.5 * (m + m.adjoint().eval());
        return RealVector(eigh(m).eigenvalues);  // smoothed toward the max
    };
    return anneal_minimax(k, ds, v, opts, 5);
}

double two_copy_lower_bound(const Channel& ch, const DensityOperator& rho_two_copy) {
    if (rho_two_copy.dim() != ch.d_in * ch.d_in)
        throw InvariantError("two_copy_lower_bound: input dimension mismatch");
    Channel sq = tensor_square(ch);
    return umlaut_information(output_state(sq, rho_two_copy)).value.or_inf();
}

ChannelUmlautResult channel_lautum(const Channel& ch, const OptimizerOptions& opts) {
    ChannelUmlautResult r;
    r.diagnostics.heuristic = true;
    if (!channel_finiteness_check(ch)) {
        r.value = ExtendedReal::infinity();
        return r;
    }
    // rank-deficient Choi: any full-rank input gives a rank-deficient joint
    // state against a full-rank product marginal, so L(N) = +infinity
    double rank = support_projector(ch.choi.matrix()).trace().real();
    if (rank < double(ch.choi.dim()) - 0.5) {
        r.value = ExtendedReal::infinity();
        r.diagnostics.warnings.push_back("singular Choi: lautum diverges");
        return r;
    }
    auto g = [&](const ComplexMatrix& x) {
        // with a full-rank Choi, L is finite on every input state; an
        // infinity near the boundary is a support-cutoff artifact
        ComplexMatrix p0 = clip_density(x);
        const Eigen::Index d = p0.rows();
        for (double delta : {0.0, 1e-9, 1e-6}) {
            ComplexMatrix p = (1.0 - delta) * p0 +
                              delta * ComplexMatrix::Identity(d, d) / double(d);
            ExtendedReal v = lautum(output_state(ch, DensityOperator(p)));
            if (!v.is_inf) return v.value;
        }
        return -std::numeric_limits<double>::infinity();
    };
    AscentOutcome out = multi_start_ascent(g, ch.d_in, opts, 16);
    r.value = ExtendedReal::finite(out.value);
    r.optimizer_rho = DensityOperator(clip_density(out.rho));
    r.diagnostics.start_values = std::move(out.diag.start_values);
    r.diagnostics.iterations = out.diag.iterations;
    r.diagnostics.converged = out.diag.converged;
    r.diagnostics.residual = out.diag.residual;
    r.diagnostics.warnings.push_back("lower bound only: concavity not established");
    return r;
}

}  // namespace umlaut
