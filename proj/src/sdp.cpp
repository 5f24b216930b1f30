#include "umlaut/sdp.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace umlaut {

namespace {

// orthonormal Hermitian basis of k x k matrices
std::vector<ComplexMatrix> herm_basis(Eigen::Index k) {
    std::vector<ComplexMatrix> out;
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < k; ++i) {
        ComplexMatrix e = ComplexMatrix::Zero(k, k);
        e(i, i) = 1.0;
        out.push_back(e);
    }
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j) {
            ComplexMatrix s = ComplexMatrix::Zero(k, k);
            s(i, j) = s(j, i) = r;
            out.push_back(s);
            ComplexMatrix a = ComplexMatrix::Zero(k, k);
            a(i, j) = Complex(0, -r);
            a(j, i) = Complex(0, r);
            out.push_back(a);
        }
    return out;
}

double rtr(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.cwiseProduct(b.transpose())).sum().real();
}

struct ScalarConstraint {
    std::vector<ComplexMatrix> coeff;  // per block; 0x0 when absent
    double b = 0.0;
};

// max alpha in (0, 1] with X + alpha dX psd, damped by tau
double step_length(const std::vector<ComplexMatrix>& x,
                   const std::vector<ComplexMatrix>& dx, double tau) {
    double amax = std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < x.size(); ++b) {
        Eigen::LLT<ComplexMatrix> llt(x[b]);
        ComplexMatrix l = llt.matrixL();
        ComplexMatrix w = l.triangularView<Eigen::Lower>().solve(dx[b]);
        w = l.triangularView<Eigen::Lower>().solve(w.adjoint().eval()).adjoint();
        w = 0.5 * (w + w.adjoint().eval());
        double lmin = eigh(w).eigenvalues.minCoeff();
        if (lmin < 0) amax = std::min(amax, -1.0 / lmin);
    }
    return std::min(1.0, tau * amax);
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts) {
    const size_t nuser = p.blocks.size();
    if (p.objective.size() != nuser)
        throw InvariantError("solve_sdp: objective/block count mismatch");

    // internal psd block list: free blocks split as P - N, then slack blocks
    struct Internal {
        Eigen::Index dim;
        size_t user;  // index of originating user block, or SIZE_MAX for slack
        double sign;  // contribution sign into the user variable
    };
    std::vector<Internal> blocks;
    std::vector<std::vector<size_t>> user_parts(nuser);
    for (size_t b = 0; b < nuser; ++b) {
        if (p.blocks[b].dim <= 0) throw InvariantError("solve_sdp: non-positive block dim");
        user_parts[b].push_back(blocks.size());
        blocks.push_back({p.blocks[b].dim, b, 1.0});
        if (!p.blocks[b].psd) {
            user_parts[b].push_back(blocks.size());
            blocks.push_back({p.blocks[b].dim, b, -1.0});
        }
    }
    std::vector<size_t> slack_of(p.constraints.size(), SIZE_MAX);
    for (size_t c = 0; c < p.constraints.size(); ++c)
        if (p.constraints[c].sense == SdpConstraint::Sense::Le) {
            slack_of[c] = blocks.size();
            blocks.push_back({p.constraints[c].rhs.rows(), SIZE_MAX, 0.0});
        }
    const size_t nb = blocks.size();

    std::vector<ComplexMatrix> cost(nb);
    for (size_t ib = 0; ib < nb; ++ib) {
        if (blocks[ib].user == SIZE_MAX)
            cost[ib] = ComplexMatrix::Zero(blocks[ib].dim, blocks[ib].dim);
        else
            cost[ib] = blocks[ib].sign * p.objective[blocks[ib].user];
    }

    // scalarize each operator constraint over a Hermitian basis of its range
    std::vector<ScalarConstraint> cons;
    Eigen::Index total_real_dim = 0;
    for (size_t ib = 0; ib < nb; ++ib) total_real_dim += blocks[ib].dim * blocks[ib].dim;
    if (total_real_dim > 5000) throw SizeGuardError("solve_sdp: total dimension above 5000");

    for (size_t c = 0; c < p.constraints.size(); ++c) {
        const SdpConstraint& sc = p.constraints[c];
        if (sc.maps.size() != nuser)
            throw InvariantError("solve_sdp: constraint map/block count mismatch");
        const Eigen::Index k = sc.rhs.rows();
        std::vector<ComplexMatrix> ebasis = herm_basis(k);

        // images of each block's Hermitian basis under the constraint map
        std::vector<std::vector<ComplexMatrix>> fbasis(nuser), images(nuser);
        for (size_t b = 0; b < nuser; ++b) {
            if (!sc.maps[b]) continue;
            fbasis[b] = herm_basis(p.blocks[b].dim);
            for (const auto& f : fbasis[b]) {
                ComplexMatrix g = sc.maps[b](f);
                if (g.rows() != k || g.cols() != k)
                    throw InvariantError("solve_sdp: constraint map range mismatch");
                images[b].push_back(0.5 * (g + g.adjoint().eval()));
            }
        }
        for (const auto& e : ebasis) {
            ScalarConstraint row;
            row.coeff.resize(nb);
            row.b = rtr(e, sc.rhs);
            for (size_t b = 0; b < nuser; ++b) {
                if (!sc.maps[b]) continue;
                const Eigen::Index d = p.blocks[b].dim;
                ComplexMatrix a = ComplexMatrix::Zero(d, d);
                for (size_t m = 0; m < fbasis[b].size(); ++m)
                    a += rtr(e, images[b][m]) * fbasis[b][m];
                for (size_t part : user_parts[b]) row.coeff[part] = blocks[part].sign * a;
            }
            if (slack_of[c] != SIZE_MAX) row.coeff[slack_of[c]] = e;
            // row scaling for conditioning
            double s = 0.0;
            for (size_t ib = 0; ib < nb; ++ib)
                if (row.coeff[ib].size() > 0) s += row.coeff[ib].squaredNorm();
            s = std::sqrt(std::max(s, 1e-24));
            for (size_t ib = 0; ib < nb; ++ib)
                if (row.coeff[ib].size() > 0) row.coeff[ib] /= s;
            row.b /= s;
            cons.push_back(std::move(row));
        }
    }
    const size_t m = cons.size();

    // interior start
    double bscale = 1.0, cscale = 1.0;
    for (const auto& r : cons) bscale = std::max(bscale, std::abs(r.b));
    for (const auto& cm : cost) cscale = std::max(cscale, cm.size() ? cm.norm() : 0.0);
    std::vector<ComplexMatrix> x(nb), z(nb);
    double ndim = 0.0;
    for (size_t ib = 0; ib < nb; ++ib) {
        x[ib] = bscale * ComplexMatrix::Identity(blocks[ib].dim, blocks[ib].dim);
        z[ib] = cscale * ComplexMatrix::Identity(blocks[ib].dim, blocks[ib].dim);
        ndim += double(blocks[ib].dim);
    }
    RealVector y = RealVector::Zero(Eigen::Index(m));

    auto primal_obj = [&]() {
        double v = 0.0;
        for (size_t ib = 0; ib < nb; ++ib) v += rtr(cost[ib], x[ib]);
        return v;
    };
    auto dual_obj = [&]() {
        double v = 0.0;
        for (size_t j = 0; j < m; ++j) v += cons[j].b * y(Eigen::Index(j));
        return v;
    };

    SdpSolution sol;
    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        std::vector<ComplexMatrix> zi(nb);
        bool cone_ok = true;
        for (size_t ib = 0; ib < nb && cone_ok; ++ib) {
            SpectralDecomposition sd = eigh(z[ib]);
            double top = std::max(1.0, sd.eigenvalues.maxCoeff());
            double low = sd.eigenvalues.minCoeff();
            if (low <= -1e-10 * top) {
                cone_ok = false;  // genuine cone exit: stop with the last iterate
                break;
            }
            // nonpositive eigenvalues at the boundary are rounding noise;
            // floor them for the inversion and keep iterating
            RealVector ev = low > 0 ? sd.eigenvalues
                                    : RealVector(sd.eigenvalues.cwiseMax(1e-14 * top));
            zi[ib] = sd.eigenvectors * ev.cwiseInverse().asDiagonal() *
                     sd.eigenvectors.adjoint();
        }
        if (!cone_ok) break;

        RealVector rp = RealVector::Zero(Eigen::Index(m));
        for (size_t j = 0; j < m; ++j) {
            double ax = 0.0;
            for (size_t ib = 0; ib < nb; ++ib)
                if (cons[j].coeff[ib].size() > 0) ax += rtr(cons[j].coeff[ib], x[ib]);
            rp(Eigen::Index(j)) = cons[j].b - ax;
        }
        std::vector<ComplexMatrix> rd(nb);
        double rdnorm = 0.0;
        for (size_t ib = 0; ib < nb; ++ib) {
            ComplexMatrix aty = ComplexMatrix::Zero(blocks[ib].dim, blocks[ib].dim);
            for (size_t j = 0; j < m; ++j)
                if (cons[j].coeff[ib].size() > 0) aty += y(Eigen::Index(j)) * cons[j].coeff[ib];
            rd[ib] = cost[ib] - aty - z[ib];
            rdnorm += rd[ib].squaredNorm();
        }
        rdnorm = std::sqrt(rdnorm);
        double mu = 0.0;
        for (size_t ib = 0; ib < nb; ++ib) mu += rtr(x[ib], z[ib]);
        mu /= ndim;

        SdpIterate rec{primal_obj(), dual_obj(), rp.norm() / (1.0 + bscale),
                       rdnorm / (1.0 + cscale)};
        sol.iterates.push_back(rec);
        double gap_rel = std::abs(rec.primal - rec.dual) / (1.0 + std::abs(rec.primal));
        if (rec.primal_residual <= opts.tol && rec.dual_residual <= opts.tol &&
            gap_rel <= opts.tol) {
            converged = true;
            break;
        }
        if (y.norm() > 1e10) break;  // dual ray: treat as infeasible

        // Schur complement M_ij = sum_b <A_i, X A_j Z^-1>
        std::vector<std::vector<ComplexMatrix>> w(m);
        for (size_t j = 0; j < m; ++j) {
            w[j].resize(nb);
            for (size_t ib = 0; ib < nb; ++ib)
                if (cons[j].coeff[ib].size() > 0)
                    w[j][ib] = x[ib] * cons[j].coeff[ib] * zi[ib];
        }
        RealMatrix sm = RealMatrix::Zero(Eigen::Index(m), Eigen::Index(m));
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) {
                double v = 0.0;
                for (size_t ib = 0; ib < nb; ++ib)
                    if (cons[i].coeff[ib].size() > 0 && w[j][ib].size() > 0)
                        v += rtr(cons[i].coeff[ib], w[j][ib]);
                sm(Eigen::Index(i), Eigen::Index(j)) = v;
            }
        sm = 0.5 * (sm + sm.transpose().eval());
        sm.diagonal().array() += 1e-13 * (1.0 + sm.trace() / double(m));
        Eigen::LDLT<RealMatrix> ldlt(sm);

        auto solve_direction = [&](const std::vector<ComplexMatrix>& rc,
                                   std::vector<ComplexMatrix>& dx,
                                   std::vector<ComplexMatrix>& dz, RealVector& dy) {
            RealVector rhs = RealVector::Zero(Eigen::Index(m));
            for (size_t j = 0; j < m; ++j) {
                double a = 0.0;
                for (size_t ib = 0; ib < nb; ++ib)
                    if (cons[j].coeff[ib].size() > 0)
                        a += rtr(cons[j].coeff[ib],
                                 ComplexMatrix((rc[ib] - x[ib] * rd[ib]) * zi[ib]));
                rhs(Eigen::Index(j)) = rp(Eigen::Index(j)) - a;
            }
            dy = ldlt.solve(rhs);
            dx.resize(nb);
            dz.resize(nb);
            for (size_t ib = 0; ib < nb; ++ib) {
                ComplexMatrix aty = ComplexMatrix::Zero(blocks[ib].dim, blocks[ib].dim);
                for (size_t j = 0; j < m; ++j)
                    if (cons[j].coeff[ib].size() > 0)
                        aty += dy(Eigen::Index(j)) * cons[j].coeff[ib];
                dz[ib] = rd[ib] - aty;
                ComplexMatrix d = (rc[ib] - x[ib] * dz[ib]) * zi[ib];
                dx[ib] = 0.5 * (d + d.adjoint().eval());
            }
        };

        // predictor
        std::vector<ComplexMatrix> rc(nb), dxa, dza;
        RealVector dya;
        for (size_t ib = 0; ib < nb; ++ib) rc[ib] = -x[ib] * z[ib];
        solve_direction(rc, dxa, dza, dya);
        double apa = step_length(x, dxa, 1.0), ada = step_length(z, dza, 1.0);
        double mua = 0.0;
        for (size_t ib = 0; ib < nb; ++ib)
            mua += rtr(ComplexMatrix(x[ib] + apa * dxa[ib]),
                       ComplexMatrix(z[ib] + ada * dza[ib]));
        mua /= ndim;
        double sigma = std::pow(std::clamp(mua / mu, 0.0, 1.0), 3.0);

        // corrector
        std::vector<ComplexMatrix> dx, dz;
        RealVector dy;
        for (size_t ib = 0; ib < nb; ++ib)
            rc[ib] = sigma * mu *
                         ComplexMatrix::Identity(blocks[ib].dim, blocks[ib].dim) -
                     x[ib] * z[ib] - dxa[ib] * dza[ib];
        solve_direction(rc, dx, dz, dy);
        double ap = step_length(x, dx, 0.98), ad = step_length(z, dz, 0.98);
        for (size_t ib = 0; ib < nb; ++ib) {
            x[ib] += ap * dx[ib];
            x[ib] = 0.5 * (x[ib] + x[ib].adjoint().eval());
            z[ib] += ad * dz[ib];
            z[ib] = 0.5 * (z[ib] + z[ib].adjoint().eval());
        }
        y += ad * dy;
    }

    sol.primal_value = primal_obj();
    sol.dual_value = dual_obj();
    sol.gap = std::abs(sol.primal_value - sol.dual_value);
    const SdpIterate& last = sol.iterates.back();
    if (converged || (sol.gap <= 1e-6 * (1.0 + std::abs(sol.primal_value)) &&
                      last.primal_residual <= 1e-7 && last.dual_residual <= 1e-7))
        sol.status = "optimal";
    else if (y.norm() > 1e10)
        sol.status = "infeasible";
    else
        sol.status = "max-iter";

    sol.variables.resize(nuser);
    for (size_t b = 0; b < nuser; ++b) {
        sol.variables[b] = ComplexMatrix::Zero(p.blocks[b].dim, p.blocks[b].dim);
        for (size_t part : user_parts[b]) sol.variables[b] += blocks[part].sign * x[part];
    }
    return sol;
}

}  // namespace umlaut
