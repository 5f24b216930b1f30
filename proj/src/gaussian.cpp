#include "umlaut/gaussian.hpp"

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Eigenvalues>

namespace umlaut {

namespace {

// f(M) for a real (generally non-normal) matrix through its complex
// eigendecomposition; the imaginary residue of the final real result is
// checked by the callers
ComplexMatrix complex_matrix_func(const ComplexMatrix& m,
                                  const std::function<Complex(Complex)>& f) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("complex eigendecomposition failed");
    Eigen::VectorXcd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = f(ev(i));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().inverse();
}

RealMatrix real_part_checked(const ComplexMatrix& m, const char* what) {
    if (m.imag().cwiseAbs().maxCoeff() > 1e-9)
        throw InvariantError(std::string(what) + ": imaginary residue above 1e-9");
    RealMatrix r = m.real();
    return 0.5 * (r + r.transpose().eval());
}

void check_symmetric(const RealMatrix& m, const char* what) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvariantError(std::string(what) + ": matrix not symmetric");
}

void check_physical(const RealMatrix& v, const SymplecticForm& omega) {
    ComplexMatrix h = v.cast<Complex>() + Complex(0, 1) * omega.matrix.cast<Complex>();
    SpectralDecomposition sd = eigh(ComplexMatrix(0.5 * (h + h.adjoint().eval())));
    if (sd.eigenvalues.minCoeff() < -1e-8)
        throw InvariantError("gaussian state: covariance violates V + i Omega >= 0");
}

}  // namespace

SymplecticForm::SymplecticForm(Eigen::Index m) : modes(m), matrix(RealMatrix::Zero(2 * m, 2 * m)) {
    if (m <= 0) throw InvariantError("symplectic form: mode count must be positive");
    for (Eigen::Index k = 0; k < m; ++k) {
        matrix(2 * k, 2 * k + 1) = 1.0;
        matrix(2 * k + 1, 2 * k) = -1.0;
    }
}

RealMatrix covariance_from_hamiltonian(const RealMatrix& h, const SymplecticForm& omega) {
    check_symmetric(h, "covariance_from_hamiltonian");
    ComplexMatrix iom = Complex(0, 1) * omega.matrix.cast<Complex>();
    ComplexMatrix m = iom * h.cast<Complex>();
    double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::ComplexEigenSolver<ComplexMatrix> probe(m, false);
    for (Eigen::Index i = 0; i < probe.eigenvalues().size(); ++i)
        if (std::abs(probe.eigenvalues()(i)) < 1e-10 * scale)
            throw InvariantError(
                "covariance_from_hamiltonian: near-zero eigenvalue of i Omega H");
    ComplexMatrix c = complex_matrix_func(m, [](Complex z) {
        Complex hz = z / 2.0;
        return std::cosh(hz) / std::sinh(hz);
    });
    return real_part_checked(c * iom, "covariance_from_hamiltonian");
}

RealMatrix hamiltonian_from_covariance(const RealMatrix& v, const SymplecticForm& omega) {
    check_symmetric(v, "hamiltonian_from_covariance");
    ComplexMatrix iom = Complex(0, 1) * omega.matrix.cast<Complex>();
    ComplexMatrix m = v.cast<Complex>() * iom;
    Eigen::ComplexEigenSolver<ComplexMatrix> probe(m, false);
    for (Eigen::Index i = 0; i < probe.eigenvalues().size(); ++i)
        if (std::abs(probe.eigenvalues()(i)) <= 1.0 + 1e-10)
            throw InvariantError(
                "hamiltonian_from_covariance: symplectic eigenvalue at or below 1");
    ComplexMatrix a = complex_matrix_func(
        m, [](Complex z) { return 0.5 * std::log((z + 1.0) / (z - 1.0)); });
    return real_part_checked(2.0 * iom * a, "hamiltonian_from_covariance");
}

GaussianState::GaussianState(Eigen::Index m, RealVector mean_in, RealMatrix h)
    : modes(m), mean(std::move(mean_in)), hamiltonian(std::move(h)) {
    if (mean.size() != 2 * m || hamiltonian.rows() != 2 * m || hamiltonian.cols() != 2 * m)
        throw InvariantError("gaussian state: dimension mismatch");
    check_symmetric(hamiltonian, "gaussian state");
    SymplecticForm omega(m);
    covariance = covariance_from_hamiltonian(hamiltonian, omega);
    check_physical(covariance, omega);
}

GaussianState GaussianState::from_covariance(Eigen::Index m, RealVector mean_in, RealMatrix v) {
    SymplecticForm omega(m);
    return GaussianState(m, std::move(mean_in), hamiltonian_from_covariance(v, omega));
}

namespace {

// quadrature index list for a mode subset, validated and order-preserving
std::vector<Eigen::Index> quad_indices(const GaussianState& s,
                                       const std::vector<Eigen::Index>& keep) {
    if (keep.empty()) throw InvariantError("gaussian marginal: empty mode subset");
    std::vector<bool> seen(size_t(s.modes), false);
    std::vector<Eigen::Index> q;
    for (Eigen::Index k : keep) {
        if (k < 0 || k >= s.modes) throw InvariantError("gaussian marginal: mode out of range");
        if (seen[size_t(k)]) throw InvariantError("gaussian marginal: repeated mode");
        seen[size_t(k)] = true;
        q.push_back(2 * k);
        q.push_back(2 * k + 1);
    }
    return q;
}

RealMatrix submatrix(const RealMatrix& m, const std::vector<Eigen::Index>& idx) {
    RealMatrix out(Eigen::Index(idx.size()), Eigen::Index(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j) out(Eigen::Index(i), Eigen::Index(j)) = m(idx[i], idx[j]);
    return out;
}

RealVector subvector(const RealVector& v, const std::vector<Eigen::Index>& idx) {
    RealVector out(Eigen::Index(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) out(Eigen::Index(i)) = v(idx[i]);
    return out;
}

}  // namespace

GaussianState gaussian_marginal(const GaussianState& s, const std::vector<Eigen::Index>& keep) {
    std::vector<Eigen::Index> q = quad_indices(s, keep);
    return GaussianState::from_covariance(Eigen::Index(keep.size()), subvector(s.mean, q),
                                          submatrix(s.covariance, q));
}

GaussianState gaussian_umlaut_marginal(const GaussianState& s,
                                       const std::vector<Eigen::Index>& keep_b) {
    std::vector<Eigen::Index> q = quad_indices(s, keep_b);
    return GaussianState(Eigen::Index(keep_b.size()), subvector(s.mean, q),
                         submatrix(s.hamiltonian, q));
}

}  // namespace umlaut
