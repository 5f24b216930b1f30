#ifndef UMLAUT_CODING_HPP
#define UMLAUT_CODING_HPP

#include "umlaut/divergence.hpp"
#include "umlaut/sdp.hpp"
#include "umlaut/umlaut_channel.hpp"

namespace umlaut {

struct NsErrorResult {
    double epsilon = 0.0;
    ExtendedReal meta_converse;  // -log epsilon
    SdpSolution sdp;
};

/// Activated non-signalling error probability for M messages over ch, by the
/// joint SDP in (rho, Lambda).
NsErrorResult ns_error_probability(const Channel& ch, int messages,
                                   const SdpOptions& opts = {});

/// D_H^eps(rho||sigma) through the primal SDP over tests 0 <= T <= 1.
ExtendedReal hypothesis_testing_primal_sdp(const DensityOperator& rho,
                                           const DensityOperator& sigma, double eps,
                                           const SdpOptions& opts = {});

/// Nussbaum-Szkola distributions (p_ab, q_ab) of a state pair.
std::pair<RealVector, RealVector> nussbaum_szkola(const DensityOperator& rho,
                                                  const DensityOperator& sigma);

/// (Tr[rho ^ sigma], Tr[p ^ q]) with ^ the operator / entrywise minimum;
/// checks the factor-2 comparison between the two.
std::pair<double, double> audenaert_gap(const DensityOperator& rho,
                                        const DensityOperator& sigma);

struct ZeroRateResult {
    ExtendedReal value;
    RealVector optimizer;
    bool heuristic = false;
};

/// sup_P sum_{x1,x2} P(x1)P(x2) (-log Tr[sqrt(rho_x1) sqrt(rho_x2)]); exact
/// enumeration for alphabets up to 3, projected-gradient heuristic above.
ZeroRateResult zero_rate_unassisted_exponent_cq(const std::vector<DensityOperator>& states,
                                                const OptimizerOptions& opts = {});

struct SanovEstimate {
    double value = 0.0;
    std::string caveat;  // i.i.d.-restricted alternative
};

/// min_sigma (1/n) D_H^eps(rho_A^{(x)n} (x) sigma^{(x)n} || rho_AB^{(x)n}),
/// an upper estimate of the n-th Sanov quantity.
SanovEstimate sanov_finite_n_estimate(const BipartiteState& s, double eps, int n,
                                      const OptimizerOptions& opts = {});

}  // namespace umlaut

#endif
