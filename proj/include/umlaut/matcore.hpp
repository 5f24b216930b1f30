#ifndef UMLAUT_MATCORE_HPP
#define UMLAUT_MATCORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace umlaut {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Error taxonomy shared by all modules; `code` follows the CLI exit-code
// contract (2 parse, 3 invariant, 4 non-convergence, 5 size guard).
struct Error : std::runtime_error {
    int code;
    Error(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};
struct InvariantError : Error {
    explicit InvariantError(const std::string& msg) : Error(3, msg) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(4, msg) {}
};
struct SizeGuardError : Error {
    explicit SizeGuardError(const std::string& msg) : Error(5, msg) {}
};

namespace tol {
inline constexpr double herm = 1e-10;
inline constexpr double psd = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double eig = 1e-9;
inline constexpr double supp = 1e-8;
inline constexpr double spec_cutoff_rel = 1e-12;  // relative to lambda_max
}  // namespace tol

/// Dense square matrix asserted Hermitian on construction.
class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix m, double herm_tol = tol::herm);
    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }

private:
    ComplexMatrix m_;
};

/// Hermitian, PSD within psd_tol, unit trace within trace_tol.
class DensityOperator {
public:
    explicit DensityOperator(ComplexMatrix m, double psd_tol = tol::psd,
                             double trace_tol = tol::trace);
    Eigen::Index dim() const { return op_.dim(); }
    const ComplexMatrix& matrix() const { return op_.matrix(); }
    const HermitianOperator& op() const { return op_; }

private:
    HermitianOperator op_;
};

struct SpectralDecomposition {
    RealVector eigenvalues;      // ascending
    ComplexMatrix eigenvectors;  // unitary, columns matched to eigenvalues
};

enum class Subsystem { A, B };

/// Kronecker product, first factor slow index.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix partial_trace(const ComplexMatrix& m, Eigen::Index d_a,
                            Eigen::Index d_b, Subsystem keep);

/// Reorder tensor factors of an operator on H_0 x H_1 x ... per `perm`,
/// where perm[k] is the old position of the factor now at position k.
ComplexMatrix reorder_systems(const ComplexMatrix& m,
                              const std::vector<Eigen::Index>& dims,
                              const std::vector<int>& perm);

/// Deterministic Hermitian eigendecomposition: ascending eigenvalues, each
/// eigenvector's largest-magnitude component rotated to the positive real axis.
SpectralDecomposition eigh(const ComplexMatrix& h);

enum class ScalarFunc {
    Log,
    Exp,
    Power,  // needs alpha
    Sqrt,
    NegPart,
    PosPart,
    CothHalfArg,  // coth(x/2)
    Arccoth,
};

struct KernelPolicy {
    enum Kind { Error, Zero, Floor, Restrict } kind = Error;
    double tau = 1e-14;  // Floor only
    static KernelPolicy error() { return {Error, 0}; }
    static KernelPolicy zero() { return {Zero, 0}; }
    static KernelPolicy floor(double t) { return {Floor, t}; }
    static KernelPolicy restrict() { return {Restrict, 0}; }
};

/// f applied spectrally. The kernel policy governs eigenvalues within
/// spec_cutoff of zero for the singular choices of f (log, negative powers,
/// coth_half_arg); `restrict` returns the operator on the support subspace,
/// zero on the kernel.
ComplexMatrix matrix_func(const ComplexMatrix& h, ScalarFunc f,
                          KernelPolicy policy = KernelPolicy::error(),
                          double alpha = 0.0);

/// Orthogonal projector onto the span of eigenvectors with eigenvalue > cutoff.
/// A negative cutoff requests the default relative spectral cutoff.
ComplexMatrix support_projector(const ComplexMatrix& h, double cutoff = -1.0);

/// Schatten p-norm, p >= 1 or +infinity (pass std::numeric_limits infinity).
double schatten_norm(const ComplexMatrix& m, double p);

/// -sum lambda log lambda, natural log, 0 log 0 = 0.
double von_neumann_entropy(const DensityOperator& rho);

}  // namespace umlaut

#endif
