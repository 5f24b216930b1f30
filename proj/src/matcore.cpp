#include "umlaut/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace umlaut {

namespace {

double inf_norm(const ComplexMatrix& m) {
    return m.cwiseAbs().maxCoeff();
}

bool singular_func(ScalarFunc f, double alpha) {
    switch (f) {
        case ScalarFunc::Log:
        case ScalarFunc::CothHalfArg:
            return true;
        case ScalarFunc::Power:
            return alpha < 0.0;
        default:
            return false;
    }
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m, double herm_tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
        throw InvariantError("HermitianOperator: matrix not square");
    if (!m_.allFinite())
        throw InvariantError("HermitianOperator: non-finite entries");
    const double scale = std::max(1.0, inf_norm(m_));
    if (inf_norm(m_ - m_.adjoint()) > herm_tol * scale)
        throw InvariantError("HermitianOperator: not Hermitian within tolerance");
    m_ = 0.5 * (m_ + m_.adjoint().eval());
}

DensityOperator::DensityOperator(ComplexMatrix m, double psd_tol, double trace_tol)
    : op_(std::move(m)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op_.matrix(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
        throw InvariantError("DensityOperator: negative eigenvalue beyond tolerance");
    if (std::abs(op_.matrix().trace().real() - 1.0) > trace_tol ||
        std::abs(op_.matrix().trace().imag()) > trace_tol)
        throw InvariantError("DensityOperator: trace differs from 1 beyond tolerance");
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Eigen::Index d_a, Eigen::Index d_b,
                            Subsystem keep) {
    if (m.rows() != d_a * d_b || m.cols() != d_a * d_b)
        throw InvariantError("partial_trace: dimension mismatch");
    if (keep == Subsystem::B) {
        ComplexMatrix out = ComplexMatrix::Zero(d_b, d_b);
        for (Eigen::Index a = 0; a < d_a; ++a)
            out += m.block(a * d_b, a * d_b, d_b, d_b);
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(d_a, d_a);
    for (Eigen::Index i = 0; i < d_a; ++i)
        for (Eigen::Index j = 0; j < d_a; ++j)
            out(i, j) = m.block(i * d_b, j * d_b, d_b, d_b).trace();
    return out;
}

ComplexMatrix reorder_systems(const ComplexMatrix& m, const std::vector<Eigen::Index>& dims,
                              const std::vector<int>& perm) {
    const size_t n = dims.size();
    if (perm.size() != n) throw InvariantError("reorder_systems: permutation size mismatch");
    Eigen::Index total = 1;
    for (auto d : dims) total *= d;
    if (m.rows() != total || m.cols() != total)
        throw InvariantError("reorder_systems: dimension mismatch");

    // strides of the old factor layout (slow-first)
    std::vector<Eigen::Index> stride(n, 1);
    for (size_t k = n; k-- > 1;) stride[k - 1] = stride[k] * dims[k];

    // new_index -> old_index lookup
    std::vector<Eigen::Index> newdims(n);
    for (size_t k = 0; k < n; ++k) newdims[k] = dims[perm[k]];
    std::vector<Eigen::Index> map(total);
    std::vector<Eigen::Index> idx(n, 0);
    for (Eigen::Index r = 0; r < total; ++r) {
        Eigen::Index old = 0;
        for (size_t k = 0; k < n; ++k) old += idx[k] * stride[perm[k]];
        map[r] = old;
        for (size_t k = n; k-- > 0;) {
            if (++idx[k] < newdims[k]) break;
            idx[k] = 0;
        }
    }
    ComplexMatrix out(total, total);
    for (Eigen::Index r = 0; r < total; ++r)
        for (Eigen::Index c = 0; c < total; ++c) out(r, c) = m(map[r], map[c]);
    return out;
}

SpectralDecomposition eigh(const ComplexMatrix& h) {
    if (!h.allFinite()) throw InvariantError("eigh: non-finite entries");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) {
        // retry on a rescaled, lightly regularized copy
        double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
        ComplexMatrix hs = h / scale;
        hs.diagonal().array() += 1e-14;
        es.compute(hs);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("eigh: eigensolver failed to converge");
        SpectralDecomposition sd{es.eigenvalues() * scale, es.eigenvectors()};
        for (Eigen::Index c = 0; c < sd.eigenvectors.cols(); ++c) {
            Eigen::Index imax = 0;
            double best = -1.0;
            for (Eigen::Index r = 0; r < sd.eigenvectors.rows(); ++r) {
                double a = std::abs(sd.eigenvectors(r, c));
                if (a > best + 1e-15) {
                    best = a;
                    imax = r;
                }
            }
            Complex z = sd.eigenvectors(imax, c);
            if (std::abs(z) > 0) sd.eigenvectors.col(c) *= std::conj(z) / std::abs(z);
        }
        return sd;
    }
    SpectralDecomposition sd{es.eigenvalues(), es.eigenvectors()};
    // phase-fix each column: largest-magnitude component made real positive
    for (Eigen::Index c = 0; c < sd.eigenvectors.cols(); ++c) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < sd.eigenvectors.rows(); ++r) {
            double a = std::abs(sd.eigenvectors(r, c));
            if (a > best + 1e-15) {
                best = a;
                imax = r;
            }
        }
        Complex z = sd.eigenvectors(imax, c);
        if (std::abs(z) > 0) sd.eigenvectors.col(c) *= std::conj(z) / std::abs(z);
    }
    return sd;
}

ComplexMatrix matrix_func(const ComplexMatrix& h, ScalarFunc f, KernelPolicy policy,
                          double alpha) {
    SpectralDecomposition sd = eigh(h);
    const Eigen::Index n = sd.eigenvalues.size();
    const double lmax = sd.eigenvalues.cwiseAbs().maxCoeff();
    const double cutoff = tol::spec_cutoff_rel * std::max(lmax, 1e-300);
    const bool singular = singular_func(f, alpha);

    auto apply = [&](double x) -> double {
        switch (f) {
            case ScalarFunc::Log:
                if (x < -tol::psd) throw InvariantError("matrix_func: log of negative eigenvalue");
                return std::log(x);
            case ScalarFunc::Exp:
                return std::exp(x);
            case ScalarFunc::Power:
                if (x < -tol::psd) throw InvariantError("matrix_func: power of negative eigenvalue");
                return std::pow(std::max(x, 0.0), alpha);
            case ScalarFunc::Sqrt:
                if (x < -tol::psd) throw InvariantError("matrix_func: sqrt of negative eigenvalue");
                return std::sqrt(std::max(x, 0.0));
            case ScalarFunc::NegPart:
                return std::min(x, 0.0);
            case ScalarFunc::PosPart:
                return std::max(x, 0.0);
            case ScalarFunc::CothHalfArg:
                return 1.0 / std::tanh(0.5 * x);
            case ScalarFunc::Arccoth:
                if (std::abs(x) <= 1.0)
                    throw InvariantError("matrix_func: arccoth argument inside [-1,1]");
                return 0.5 * std::log((x + 1.0) / (x - 1.0));
        }
        return 0.0;
    };

    RealVector fx(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = sd.eigenvalues(i);
        if (singular && std::abs(x) <= cutoff) {
            switch (policy.kind) {
                case KernelPolicy::Error:
                    throw InvariantError("matrix_func: near-zero eigenvalue under singular function");
                case KernelPolicy::Zero:
                case KernelPolicy::Restrict:
                    fx(i) = 0.0;
                    continue;
                case KernelPolicy::Floor:
                    fx(i) = apply(policy.tau);
                    continue;
            }
        }
        fx(i) = apply(x);
    }
    return sd.eigenvectors * fx.asDiagonal() * sd.eigenvectors.adjoint();
}

ComplexMatrix support_projector(const ComplexMatrix& h, double cutoff) {
    SpectralDecomposition sd = eigh(h);
    if (sd.eigenvalues.minCoeff() < -tol::psd)
        throw InvariantError("support_projector: input not PSD");
    if (cutoff < 0.0)
        cutoff = tol::spec_cutoff_rel * std::max(sd.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
    const Eigen::Index n = sd.eigenvalues.size();
    RealVector fx = RealVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (sd.eigenvalues(i) > cutoff) fx(i) = 1.0;
    return sd.eigenvectors * fx.asDiagonal() * sd.eigenvectors.adjoint();
}

double schatten_norm(const ComplexMatrix& m, double p) {
    if (p < 1.0) throw InvariantError("schatten_norm: p must be >= 1");
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    if (std::isinf(p)) return s.size() ? s.maxCoeff() : 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
    return std::pow(acc, 1.0 / p);
}

double von_neumann_entropy(const DensityOperator& rho) {
    SpectralDecomposition sd = eigh(rho.matrix());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
        const double x = sd.eigenvalues(i);
        if (x > 0.0) acc -= x * std::log(x);
    }
    return acc;
}

}  // namespace umlaut
