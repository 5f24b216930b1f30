#ifndef UMLAUT_DIVERGENCE_HPP
#define UMLAUT_DIVERGENCE_HPP

#include "umlaut/matcore.hpp"

namespace umlaut {

// Real value extended with +infinity; the infinite branch only ever arises
// from a support-condition failure, never from floating-point overflow.
struct ExtendedReal {
    double value = 0.0;
    bool is_inf = false;

    static ExtendedReal finite(double v) { return {v, false}; }
    static ExtendedReal infinity() { return {0.0, true}; }
    double or_inf() const {
        return is_inf ? std::numeric_limits<double>::infinity() : value;
    }
};

/// Umegaki relative entropy D(rho||sigma) = Tr[rho (log rho - log sigma)],
/// +infinity iff supp(rho) is not contained in supp(sigma).
ExtendedReal relative_entropy(const DensityOperator& rho, const DensityOperator& sigma,
                              double supp_tol = tol::supp);

/// Petz-Renyi divergence, alpha in (0,1) u (1,2].
ExtendedReal petz_renyi(const DensityOperator& rho, const DensityOperator& sigma,
                        double alpha);

/// Belavkin-Staszewski divergence Tr[rho log(rho^{1/2} sigma^{-1} rho^{1/2})].
ExtendedReal bs_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);

/// Hypothesis-testing divergence D_H^eps via the scalar Neyman-Pearson dual
/// beta* = max_{lambda >= 0} [lambda(1-eps) - Tr[(lambda rho - sigma)_+]].
ExtendedReal hypothesis_testing_divergence(const DensityOperator& rho,
                                           const DensityOperator& sigma, double eps);

}  // namespace umlaut

#endif
