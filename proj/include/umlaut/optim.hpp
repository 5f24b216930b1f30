#ifndef UMLAUT_OPTIM_HPP
#define UMLAUT_OPTIM_HPP

#include <functional>
#include <random>

#include "umlaut/matcore.hpp"

namespace umlaut {

struct MirrorOptions {
    double eta0 = 1.0;
    int max_iter = 10000;
    double tol = 1e-10;   // stop when improvement over `patience` iters < tol
    int patience = 1;
    double fd_step = 1e-6;
};

struct MirrorResult {
    ComplexMatrix x;  // density matrix (or diagonal-free probability for simplex)
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Generalized Gell-Mann basis: d^2 - 1 traceless Hermitian matrices in a
/// fixed deterministic ordering (symmetric, antisymmetric, then diagonal).
inline std::vector<ComplexMatrix> gell_mann_basis(Eigen::Index d) {
    std::vector<ComplexMatrix> out;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = j + 1; k < d; ++k) {
            ComplexMatrix s = ComplexMatrix::Zero(d, d);
            s(j, k) = s(k, j) = 1.0;
            out.push_back(s);
            ComplexMatrix a = ComplexMatrix::Zero(d, d);
            a(j, k) = Complex(0, -1);
            a(k, j) = Complex(0, 1);
            out.push_back(a);
        }
    for (Eigen::Index l = 1; l < d; ++l) {
        ComplexMatrix m = ComplexMatrix::Zero(d, d);
        double norm = std::sqrt(2.0 / double(l * (l + 1)));
        for (Eigen::Index j = 0; j < l; ++j) m(j, j) = norm;
        m(l, l) = -norm * double(l);
        out.push_back(m);
    }
    return out;
}

/// Deterministic random full-rank density matrix: exp(G)/Tr exp(G) with G a
/// standard-normal Hermitian draw from `seed`.
inline ComplexMatrix seeded_density(std::uint64_t seed, Eigen::Index d) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
    ComplexMatrix h = 0.5 * (m + m.adjoint().eval());
    ComplexMatrix e = matrix_func(h, ScalarFunc::Exp);
    return e / e.trace().real();
}

/// Exponentiated-gradient (mirror) descent over density matrices:
/// x_{t+1} proportional to exp(log x_t - eta_t G_t), eta_t = eta0/sqrt(t),
/// with G_t the central-difference gradient on the Gell-Mann basis. A simple
/// backtracking halving on non-decreasing steps keeps the objective monotone
/// so the decrease-based stop is sound.
inline MirrorResult mirror_minimize(const std::function<double(const ComplexMatrix&)>& f,
                                    ComplexMatrix x, const MirrorOptions& opt = {}) {
    const Eigen::Index d = x.rows();
    const auto basis = gell_mann_basis(d);
    double fx = f(x);
    double eta0 = opt.eta0;
    MirrorResult res;
    double best = fx;
    int since_improve = 0;
    int t = 1;
    for (; t <= opt.max_iter; ++t) {
        ComplexMatrix grad = ComplexMatrix::Zero(d, d);
        for (const auto& b : basis) {
            double gp = f(x + opt.fd_step * b);
            double gm = f(x - opt.fd_step * b);
            double c = (gp - gm) / (2.0 * opt.fd_step);
            // probes can leave the objective's effective domain; keep the
            // direction but cap the magnitude so the mirror step stays finite
            if (!std::isfinite(c)) {
                if (std::isfinite(gm) && !std::isfinite(gp))
                    c = 1e8;
                else if (std::isfinite(gp) && !std::isfinite(gm))
                    c = -1e8;
                else
                    c = 0.0;
            }
            grad += c * b;
        }
        ComplexMatrix lx = matrix_func(x, ScalarFunc::Log, KernelPolicy::floor(1e-300));
        double eta = eta0 / std::sqrt(double(t));
        ComplexMatrix xn;
        double fn = fx;
        for (int bt = 0; bt < 30; ++bt) {
            ComplexMatrix arg = lx - eta * grad;
            // stabilize exp by shifting the spectrum
            SpectralDecomposition sd = eigh(arg);
            RealVector ev = sd.eigenvalues.array() - sd.eigenvalues.maxCoeff();
            RealVector ex = ev.array().exp();
            xn = sd.eigenvectors * ex.asDiagonal() * sd.eigenvectors.adjoint();
            xn /= xn.trace().real();
            fn = f(xn);
            if (fn <= fx || grad.norm() < 1e-14) break;
            eta *= 0.5;
        }
        double decrease = fx - fn;
        if (fn <= fx) {
            x = xn;
            fx = fn;
        }
        if (fx < best - opt.tol) {
            best = fx;
            since_improve = 0;
        } else if (++since_improve >= opt.patience) {
            res.converged = true;
            ++t;
            break;
        }
        (void)decrease;
    }
    res.x = x;
    res.value = fx;
    res.iterations = t - 1;
    if (res.iterations >= opt.max_iter) res.converged = false;
    return res;
}

struct SimplexResult {
    RealVector p;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Exponentiated-gradient descent over the probability simplex.
inline SimplexResult simplex_minimize(const std::function<double(const RealVector&)>& f,
                                      RealVector p, const MirrorOptions& opt = {}) {
    const Eigen::Index n = p.size();
    double fp = f(p);
    SimplexResult res;
    int since_improve = 0;
    double best = fp;
    int t = 1;
    for (; t <= opt.max_iter; ++t) {
        RealVector grad(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            RealVector e = RealVector::Zero(n);
            e(i) = opt.fd_step;
            grad(i) = (f(p + e) - f(p - e)) / (2.0 * opt.fd_step);
        }
        double eta = opt.eta0 / std::sqrt(double(t));
        RealVector pn;
        double fn = fp;
        for (int bt = 0; bt < 30; ++bt) {
            RealVector lg = p.array().max(1e-300).log() - eta * grad.array();
            lg.array() -= lg.maxCoeff();
            pn = lg.array().exp();
            pn /= pn.sum();
            fn = f(pn);
            if (fn <= fp || grad.norm() < 1e-14) break;
            eta *= 0.5;
        }
        if (fn <= fp) {
            p = pn;
            fp = fn;
        }
        if (fp < best - opt.tol) {
            best = fp;
            since_improve = 0;
        } else if (++since_improve >= opt.patience) {
            res.converged = true;
            ++t;
            break;
        }
    }
    res.p = p;
    res.value = fp;
    res.iterations = t - 1;
    if (res.iterations >= opt.max_iter) res.converged = false;
    return res;
}

/// Golden-section search for the minimum of a unimodal f on [a, b].
inline std::pair<double, double> golden_section_minimize(
    const std::function<double(double)>& f, double a, double b, double width) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > width) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

}  // namespace umlaut

#endif
