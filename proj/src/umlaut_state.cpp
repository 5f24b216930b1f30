#include "umlaut/umlaut_state.hpp"

#include <cmath>

#include "umlaut/optim.hpp"

namespace umlaut {

namespace {

// clip a Hermitian perturbation of a density matrix back to the PSD simplex;
// used so finite-difference probes stay inside the objective's domain
ComplexMatrix clip_density(const ComplexMatrix& x) {
    ComplexMatrix p = matrix_func(x, ScalarFunc::PosPart);
    double tr = p.trace().real();
    if (tr <= 0) throw InvariantError("clip_density: zero trace");
    return p / tr;
}

// Umegaki divergence of rho_A x sigma against rho_AB with logs restricted to
// supports; valid whenever supp(rho_A x sigma) is inside supp(rho_AB), which
// the admissible-subspace parameterization guarantees
double restricted_umegaki(const ComplexMatrix& p, const ComplexMatrix& labr) {
    ComplexMatrix lp = matrix_func(p, ScalarFunc::Log, KernelPolicy::restrict());
    return (p * lp).trace().real() - (p * labr).trace().real();
}

double restricted_bs(const ComplexMatrix& p, const ComplexMatrix& rho_inv) {
    ComplexMatrix ph = matrix_func(p, ScalarFunc::Sqrt, KernelPolicy::restrict(), 0.5);
    ComplexMatrix m = ph * rho_inv * ph;
    ComplexMatrix lm = matrix_func(m, ScalarFunc::Log, KernelPolicy::restrict());
    return (p * lm).trace().real();
}

}  // namespace

ComplexMatrix admissible_subspace(const BipartiteState& s) {
    ComplexMatrix pia = support_projector(s.marginal_a());
    ComplexMatrix q = ComplexMatrix::Identity(s.rho.dim(), s.rho.dim()) -
                      support_projector(s.rho.matrix());
    ComplexMatrix piai = tensor(pia, ComplexMatrix::Identity(s.d_b, s.d_b));
    ComplexMatrix t = partial_trace(piai * q * piai, s.d_a, s.d_b, Subsystem::B);
    SpectralDecomposition sd = eigh(t);
    double cutoff = 1e-8 * std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
        if (sd.eigenvalues(i) <= cutoff) keep.push_back(i);
    ComplexMatrix v(s.d_b, Eigen::Index(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) v.col(k) = sd.eigenvectors.col(keep[k]);
    return v;
}

bool finiteness_check(const BipartiteState& s) {
    return admissible_subspace(s).cols() > 0;
}

namespace {

struct ClosedForm {
    double entropy_a;
    double log_tr;       // log Tr exp(X_K)
    ComplexMatrix sigma;  // umlaut-marginal on B
};

ClosedForm closed_form(const BipartiteState& s, const ComplexMatrix& v) {
    ComplexMatrix rho_a = s.marginal_a();
    ComplexMatrix labr =
        matrix_func(s.rho.matrix(), ScalarFunc::Log, KernelPolicy::restrict());
    ComplexMatrix x = partial_trace(
        tensor(rho_a, ComplexMatrix::Identity(s.d_b, s.d_b)) * labr, s.d_a, s.d_b,
        Subsystem::B);
    ComplexMatrix xk = v.adjoint() * x * v;
    xk = 0.5 * (xk + xk.adjoint().eval());
    SpectralDecomposition sd = eigh(xk);
    double shift = sd.eigenvalues.maxCoeff();
    RealVector ex = (sd.eigenvalues.array() - shift).exp();
    double tr = ex.sum();
    ComplexMatrix ek = sd.eigenvectors * ex.asDiagonal() * sd.eigenvectors.adjoint();
    ClosedForm cf;
    cf.entropy_a = von_neumann_entropy(DensityOperator(rho_a));
    cf.log_tr = std::log(tr) + shift;
    cf.sigma = v * (ek / tr) * v.adjoint();
    return cf;
}

}  // namespace

DensityOperator umlaut_marginal(const BipartiteState& s) {
    ComplexMatrix v = admissible_subspace(s);
    if (v.cols() == 0)
        throw InvariantError("umlaut_marginal: umlaut information is infinite");
    return DensityOperator(closed_form(s, v).sigma);
}

UmlautResult umlaut_information(const BipartiteState& s) {
    UmlautResult r;
    ComplexMatrix v = admissible_subspace(s);
    if (v.cols() == 0) {
        r.value = ExtendedReal::infinity();
        return r;
    }
    ClosedForm cf = closed_form(s, v);
    r.value = ExtendedReal::finite(-cf.entropy_a - cf.log_tr);
    DensityOperator sigma(cf.sigma);
    // cross-check against the defining divergence
    ExtendedReal d = relative_entropy(
        DensityOperator(tensor(s.marginal_a(), sigma.matrix())), s.rho);
    r.diagnostics.residual = std::abs(d.or_inf() - r.value.value);
    if (r.diagnostics.residual > 1e-8)
        r.diagnostics.warnings.push_back("closed form vs divergence residual above 1e-8");
    r.optimizer_sigma = std::move(sigma);
    return r;
}

UmlautResult umlaut_information_direct(const BipartiteState& s,
                                       const OptimizerOptions& opts) {
    ComplexMatrix v = admissible_subspace(s);
    if (v.cols() == 0)
        throw InvariantError("umlaut_information_direct: umlaut information is infinite");
    const Eigen::Index k = v.cols();
    ComplexMatrix rho_a = s.marginal_a();
    ComplexMatrix labr =
        matrix_func(s.rho.matrix(), ScalarFunc::Log, KernelPolicy::restrict());
    auto f = [&](const ComplexMatrix& tau) {
        ComplexMatrix sigma = v * clip_density(tau) * v.adjoint();
        return restricted_umegaki(tensor(rho_a, sigma), labr);
    };
    MirrorOptions mo;
    mo.max_iter = opts.max_iter;
    mo.tol = opts.tol;
    ComplexMatrix init = opts.seed == 0 ? ComplexMatrix::Identity(k, k) / double(k)
                                        : seeded_density(opts.seed, k);
    MirrorResult mr = mirror_minimize(f, init, mo);
    UmlautResult r;
    r.value = ExtendedReal::finite(mr.value);
    r.optimizer_sigma = DensityOperator(v * clip_density(mr.x) * v.adjoint());
    r.diagnostics.iterations = mr.iterations;
    r.diagnostics.converged = mr.converged;
    if (!mr.converged)
        r.diagnostics.warnings.push_back("mirror descent hit iteration limit");
    return r;
}

UmlautResult petz_umlaut(const BipartiteState& s, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvariantError("petz_umlaut: alpha outside (0,1)");
    ComplexMatrix ra = matrix_func(s.marginal_a(), ScalarFunc::Power,
                                   KernelPolicy::restrict(), alpha);
    ComplexMatrix rab = matrix_func(s.rho.matrix(), ScalarFunc::Power,
                                    KernelPolicy::restrict(), 1.0 - alpha);
    ComplexMatrix y = partial_trace(
        tensor(ra, ComplexMatrix::Identity(s.d_b, s.d_b)) * rab, s.d_a, s.d_b,
        Subsystem::B);
    y = 0.5 * (y + y.adjoint().eval());
    const double p = 1.0 / (1.0 - alpha);
    double norm = schatten_norm(y, p);
    UmlautResult r;
    if (norm <= 1e-300) {
        r.value = ExtendedReal::infinity();
        return r;
    }
    r.value = ExtendedReal::finite(-p * std::log(norm));
    ComplexMatrix yp = matrix_func(y, ScalarFunc::Power, KernelPolicy::restrict(), p);
    r.optimizer_sigma = DensityOperator(yp / yp.trace().real());
    return r;
}

UmlautResult bs_umlaut_state(const BipartiteState& s, const OptimizerOptions& opts) {
    ComplexMatrix v = admissible_subspace(s);
    if (v.cols() == 0) {
        UmlautResult r;
        r.value = ExtendedReal::infinity();
        return r;
    }
    const Eigen::Index k = v.cols();
    ComplexMatrix rho_a = s.marginal_a();
    ComplexMatrix rab_inv = matrix_func(s.rho.matrix(), ScalarFunc::Power,
                                        KernelPolicy::restrict(), -1.0);
    auto f = [&](const ComplexMatrix& tau) {
        ComplexMatrix sigma = v * clip_density(tau) * v.adjoint();
        return restricted_bs(tensor(rho_a, sigma), rab_inv);
    };
    MirrorOptions mo;
    mo.max_iter = opts.max_iter;
    mo.tol = opts.tol;
    UmlautResult r;
    MirrorResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (int start = 0; start < 5; ++start) {
        ComplexMatrix init = start == 0
                                 ? ComplexMatrix::Identity(k, k) / double(k)
                                 : seeded_density(opts.seed + std::uint64_t(start), k);
        MirrorResult mr = mirror_minimize(f, init, mo);
        r.diagnostics.start_values.push_back(mr.value);
        if (mr.value < best.value) best = mr;
    }
    r.value = ExtendedReal::finite(best.value);
    r.optimizer_sigma = DensityOperator(v * clip_density(best.x) * v.adjoint());
    r.diagnostics.iterations = best.iterations;
    r.diagnostics.converged = best.converged;
    if (!best.converged)
        r.diagnostics.warnings.push_back("mirror descent hit iteration limit");
    return r;
}

ExtendedReal lautum(const BipartiteState& s) {
    return relative_entropy(
        DensityOperator(tensor(s.marginal_a(), s.marginal_b())), s.rho);
}

ExtendedReal bs_lautum(const BipartiteState& s) {
    return bs_relative_entropy(
        DensityOperator(tensor(s.marginal_a(), s.marginal_b())), s.rho);
}

}  // namespace umlaut
