#ifndef UMLAUT_UMLAUT_CHANNEL_HPP
#define UMLAUT_UMLAUT_CHANNEL_HPP

#include <optional>

#include "umlaut/umlaut_state.hpp"

namespace umlaut {

struct CqStructure {
    std::vector<DensityOperator> states;  // one output state per input letter
};

struct CovariantStructure {
    std::vector<ComplexMatrix> group_in;   // unitaries on A'
    std::vector<ComplexMatrix> group_out;  // matching unitaries on B
};

/// Choi-matrix channel representation (un-normalized Choi, A' slow / B fast).
struct Channel {
    Eigen::Index d_in, d_out;
    HermitianOperator choi;
    std::optional<CqStructure> cq;
    std::optional<CovariantStructure> covariant;

    Channel(Eigen::Index din, Eigen::Index dout, HermitianOperator j,
            std::optional<CqStructure> cq_s = std::nullopt,
            std::optional<CovariantStructure> cov_s = std::nullopt);
};

struct ChannelUmlautResult {
    ExtendedReal value;
    std::optional<DensityOperator> optimizer_rho;    // input state on A'
    std::optional<DensityOperator> optimizer_sigma;  // output side
    Diagnostics diagnostics;
};

Channel choi_from_kraus(const std::vector<ComplexMatrix>& kraus);

/// rho^{(N)}_{A'B} = (rho^{1/2} x 1) J (rho^{1/2} x 1).
BipartiteState output_state(const Channel& ch, const DensityOperator& rho_in);

/// Tensor square of a channel, Choi reshuffled to (A'1 A'2; B1 B2) ordering.
Channel tensor_square(const Channel& ch);

/// True iff U(N) < infinity: ker(Tr_{A'} Q_{A'B}) != {0} with Q the kernel
/// projector of the Choi matrix.
bool channel_finiteness_check(const Channel& ch);

/// U(N) by mirror ascent over input states (multi-start, closed-form inner
/// minimization).
ChannelUmlautResult channel_umlaut(const Channel& ch, const OptimizerOptions& opts = {});

/// U(N) restricted to group-invariant inputs; Z-covariant qubit channels
/// reduce to a golden-section search over rho(p) = diag(p, 1-p).
ChannelUmlautResult channel_umlaut_covariant(const Channel& ch,
                                             const OptimizerOptions& opts = {});

/// CQ closed form: sup_P -log Tr[exp(sum_x P(x) log rho_x)].
ChannelUmlautResult cq_channel_umlaut(const std::vector<DensityOperator>& states,
                                      const OptimizerOptions& opts = {});

/// Dual CQ form min_sigma sup_x D(sigma||rho_x), soft-max annealed.
ChannelUmlautResult cq_channel_umlaut_dual(const std::vector<DensityOperator>& states,
                                           const OptimizerOptions& opts = {});

/// Umlaut information of the CQ state at fixed input distribution P:
/// -log Tr exp(sum_{x in supp P} P(x) log rho_x).
double cq_umlaut_at(const std::vector<DensityOperator>& states, const RealVector& p);

/// (k,q)-lower umlaut information, exact enumeration over |X|^k tuples.
double lower_umlaut_ell(const std::vector<DensityOperator>& states, const RealVector& p,
                        int k, const RealVector& q);

/// Quantitative convergence estimate for U - ell_{k,u_k}.
double ell_convergence_bound(const std::vector<DensityOperator>& states,
                             const RealVector& p, int k);

/// Golden-Thompson / Chernoff-type bound sum P P (-log Tr[sqrt rho sqrt rho]).
ExtendedReal chernoff_lower_bound(const std::vector<DensityOperator>& states,
                                  const RealVector& p);

/// Geometric channel umlaut via the infinity-norm formula, annealed soft-max.
ChannelUmlautResult bs_channel_umlaut(const Channel& ch, const OptimizerOptions& opts = {});

/// U of the two-copy output at a fixed joint input on A'^2.
double two_copy_lower_bound(const Channel& ch, const DensityOperator& rho_two_copy);

/// Best-effort maximization of the channel lautum information (heuristic).
ChannelUmlautResult channel_lautum(const Channel& ch, const OptimizerOptions& opts = {});

}  // namespace umlaut

#endif
