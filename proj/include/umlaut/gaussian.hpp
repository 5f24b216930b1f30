#ifndef UMLAUT_GAUSSIAN_HPP
#define UMLAUT_GAUSSIAN_HPP

#include <vector>

#include "umlaut/matcore.hpp"

namespace umlaut {

/// Canonical symplectic form, block-diagonal [[0,1],[-1,0]] per mode, for the
/// quadrature ordering (x1, p1, x2, p2, ...).
struct SymplecticForm {
    Eigen::Index modes;
    RealMatrix matrix;
    explicit SymplecticForm(Eigen::Index m);
};

/// Gaussian state at the mean/Hamiltonian level, rho ~ exp(-(R-m)^T H (R-m)/2).
/// H is the canonical store; the covariance V is a derived cache.
struct GaussianState {
    Eigen::Index modes;
    RealVector mean;
    RealMatrix hamiltonian;
    RealMatrix covariance;

    GaussianState(Eigen::Index m, RealVector mean_in, RealMatrix h);
    static GaussianState from_covariance(Eigen::Index m, RealVector mean_in, RealMatrix v);
};

/// V(H) = coth(i Omega H / 2) i Omega via complex eigendecomposition.
RealMatrix covariance_from_hamiltonian(const RealMatrix& h, const SymplecticForm& omega);

/// H(V) = 2 i Omega arccoth(V i Omega); inverse of covariance_from_hamiltonian.
RealMatrix hamiltonian_from_covariance(const RealMatrix& v, const SymplecticForm& omega);

/// Ordinary marginal: restrict the mean and take the covariance submatrix.
GaussianState gaussian_marginal(const GaussianState& s, const std::vector<Eigen::Index>& keep);

/// Umlaut-marginal: restrict the mean and take the Hamiltonian submatrix.
GaussianState gaussian_umlaut_marginal(const GaussianState& s,
                                       const std::vector<Eigen::Index>& keep_b);

}  // namespace umlaut

#endif
