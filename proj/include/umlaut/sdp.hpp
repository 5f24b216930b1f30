#ifndef UMLAUT_SDP_HPP
#define UMLAUT_SDP_HPP

#include <functional>
#include <string>
#include <vector>

#include "umlaut/matcore.hpp"

namespace umlaut {

struct SdpBlock {
    Eigen::Index dim;
    bool psd = true;  // false: free Hermitian block
};

/// One operator-valued linear constraint sum_b L_b(X_b) {<=,=} rhs.
/// maps[b] applies L_b to a Hermitian matrix of block b's dimension; a null
/// entry means the block does not appear in the constraint.
struct SdpConstraint {
    enum class Sense { Eq, Le };
    std::vector<std::function<ComplexMatrix(const ComplexMatrix&)>> maps;
    Sense sense = Sense::Eq;
    ComplexMatrix rhs;
};

/// min sum_b <C_b, X_b> over PSD (or free Hermitian) blocks subject to the
/// listed operator constraints.
struct SdpProblem {
    std::vector<SdpBlock> blocks;
    std::vector<ComplexMatrix> objective;
    std::vector<SdpConstraint> constraints;
};

struct SdpOptions {
    int max_iter = 100;
    double tol = 1e-9;
};

struct SdpIterate {
    double primal = 0.0, dual = 0.0;
    double primal_residual = 0.0, dual_residual = 0.0;
};

struct SdpSolution {
    double primal_value = 0.0, dual_value = 0.0, gap = 0.0;
    std::vector<ComplexMatrix> variables;
    std::string status;  // optimal | max-iter | infeasible
    std::vector<SdpIterate> iterates;
};

/// Dense primal-dual interior-point solve (Mehrotra predictor-corrector).
SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts = {});

}  // namespace umlaut

#endif
