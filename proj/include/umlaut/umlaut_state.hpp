#ifndef UMLAUT_UMLAUT_STATE_HPP
#define UMLAUT_UMLAUT_STATE_HPP

#include <optional>
#include <string>
#include <vector>

#include "umlaut/divergence.hpp"
#include "umlaut/matcore.hpp"

namespace umlaut {

struct BipartiteState {
    Eigen::Index d_a, d_b;
    DensityOperator rho;

    BipartiteState(Eigen::Index da, Eigen::Index db, DensityOperator r)
        : d_a(da), d_b(db), rho(std::move(r)) {
        if (rho.dim() != d_a * d_b)
            throw InvariantError("BipartiteState: dims do not factor the operator");
    }
    ComplexMatrix marginal_a() const {
        return partial_trace(rho.matrix(), d_a, d_b, Subsystem::A);
    }
    ComplexMatrix marginal_b() const {
        return partial_trace(rho.matrix(), d_a, d_b, Subsystem::B);
    }
};

struct Diagnostics {
    int iterations = 0;
    double residual = 0.0;
    bool converged = true;
    bool heuristic = false;
    std::vector<double> start_values;  // multi-start outcomes
    std::vector<std::string> warnings;
};

struct UmlautResult {
    ExtendedReal value;
    std::optional<DensityOperator> optimizer_sigma;
    Diagnostics diagnostics;
};

struct OptimizerOptions {
    std::uint64_t seed = 0;
    int max_iter = 10000;
    double tol = 1e-10;
};

/// True iff U(A;B) is finite: ker(Tr_A[(Pi_A x I) Q_AB (Pi_A x I)]) != {0}
/// with Pi_A the support projector of rho_A and Q_AB the kernel projector
/// of rho_AB.
bool finiteness_check(const BipartiteState& s);

/// Orthonormal basis (columns) of the admissible subspace K on B; empty
/// matrix when U = +infinity.
ComplexMatrix admissible_subspace(const BipartiteState& s);

/// The unique minimizer: normalized exp of Tr_A[(rho_A x 1) log rho_AB],
/// evaluated on the admissible subspace.
DensityOperator umlaut_marginal(const BipartiteState& s);

/// Closed form U = -S(rho_A) - log Tr[exp X_B].
UmlautResult umlaut_information(const BipartiteState& s);

/// Direct mirror-descent minimization of sigma -> D(rho_A x sigma || rho_AB).
UmlautResult umlaut_information_direct(const BipartiteState& s,
                                       const OptimizerOptions& opts = {});

/// Petz-Renyi alpha-umlaut via its Schatten-norm closed form, alpha in (0,1).
UmlautResult petz_umlaut(const BipartiteState& s, double alpha);

/// Geometric (BS) umlaut by multi-start mirror descent.
UmlautResult bs_umlaut_state(const BipartiteState& s, const OptimizerOptions& opts = {});

ExtendedReal lautum(const BipartiteState& s);
ExtendedReal bs_lautum(const BipartiteState& s);

}  // namespace umlaut

#endif
