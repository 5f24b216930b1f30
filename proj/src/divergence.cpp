#include "umlaut/divergence.hpp"

#include <cmath>

namespace umlaut {

namespace {

bool support_contained(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                       double supp_tol) {
    ComplexMatrix pr = support_projector(rho);
    ComplexMatrix ps = support_projector(sigma);
    ComplexMatrix leak = (ComplexMatrix::Identity(ps.rows(), ps.cols()) - ps) * pr;
    return schatten_norm(leak, std::numeric_limits<double>::infinity()) <= supp_tol;
}

}  // namespace

ExtendedReal relative_entropy(const DensityOperator& rho, const DensityOperator& sigma,
                              double supp_tol) {
    if (rho.dim() != sigma.dim())
        throw InvariantError("relative_entropy: dimension mismatch");
    if (!support_contained(rho.matrix(), sigma.matrix(), supp_tol))
        return ExtendedReal::infinity();
    ComplexMatrix lr = matrix_func(rho.matrix(), ScalarFunc::Log, KernelPolicy::restrict());
    ComplexMatrix ls = matrix_func(sigma.matrix(), ScalarFunc::Log, KernelPolicy::restrict());
    return ExtendedReal::finite((rho.matrix() * (lr - ls)).trace().real());
}

ExtendedReal petz_renyi(const DensityOperator& rho, const DensityOperator& sigma,
                        double alpha) {
    if (rho.dim() != sigma.dim())
        throw InvariantError("petz_renyi: dimension mismatch");
    if (!(alpha > 0.0 && alpha != 1.0 && alpha <= 2.0))
        throw InvariantError("petz_renyi: alpha outside (0,1) u (1,2]");
    if (alpha > 1.0 && !support_contained(rho.matrix(), sigma.matrix(), tol::supp))
        return ExtendedReal::infinity();
    ComplexMatrix ra =
        matrix_func(rho.matrix(), ScalarFunc::Power, KernelPolicy::restrict(), alpha);
    ComplexMatrix sb = matrix_func(sigma.matrix(), ScalarFunc::Power,
                                   KernelPolicy::restrict(), 1.0 - alpha);
    double t = (ra * sb).trace().real();
    if (t <= 1e-300) return ExtendedReal::infinity();  // orthogonal supports, alpha < 1
    return ExtendedReal::finite(std::log(t) / (alpha - 1.0));
}

ExtendedReal bs_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim())
        throw InvariantError("bs_relative_entropy: dimension mismatch");
    if (!support_contained(rho.matrix(), sigma.matrix(), tol::supp))
        return ExtendedReal::infinity();
    ComplexMatrix si =
        matrix_func(sigma.matrix(), ScalarFunc::Power, KernelPolicy::restrict(), -1.0);
    ComplexMatrix rh =
        matrix_func(rho.matrix(), ScalarFunc::Sqrt, KernelPolicy::restrict(), 0.5);
    ComplexMatrix m = rh * si * rh;
    ComplexMatrix lm = matrix_func(m, ScalarFunc::Log, KernelPolicy::restrict());
    return ExtendedReal::finite((rho.matrix() * lm).trace().real());
}

ExtendedReal hypothesis_testing_divergence(const DensityOperator& rho,
                                           const DensityOperator& sigma, double eps) {
    if (rho.dim() != sigma.dim())
        throw InvariantError("hypothesis_testing_divergence: dimension mismatch");
    if (!(eps > 0.0 && eps < 1.0))
        throw InvariantError("hypothesis_testing_divergence: eps outside (0,1)");

    // g(lambda) = lambda(1-eps) - Tr[(lambda rho - sigma)_+], concave; the
    // derivative (1-eps) - Tr[rho P_+] comes from the same eigendecomposition.
    auto eval = [&](double lam) {
        SpectralDecomposition sd = eigh(lam * rho.matrix() - sigma.matrix());
        double pos = 0.0, dpos = 0.0;
        for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
            if (sd.eigenvalues(i) > 0.0) {
                pos += sd.eigenvalues(i);
                auto v = sd.eigenvectors.col(i);
                dpos += (v.adjoint() * rho.matrix() * v)(0, 0).real();
            }
        }
        return std::pair<double, double>{lam * (1.0 - eps) - pos, (1.0 - eps) - dpos};
    };

    double hi = 1.0;
    while (eval(hi).second > 0.0 && hi < 1e18) hi *= 2.0;
    double lo = 0.0;
    while (hi - lo > 1e-10 * (1.0 + 0.5 * (hi + lo))) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (eval(m1).first < eval(m2).first)
            lo = m1;
        else
            hi = m2;
    }
    double beta = eval(0.5 * (lo + hi)).first;
    if (beta <= 1e-300) return ExtendedReal::infinity();
    return ExtendedReal::finite(-std::log(beta));
}

}  // namespace umlaut
