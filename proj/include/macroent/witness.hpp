#pragma once

#include <map>
#include <optional>
#include <string>

#include "macroent/quantum.hpp"

namespace macroent {

// Term vocabulary shared by every witness form:
//   f = var_xa + var_xb + 2*cov_x + var_pa + var_pb - 2*cov_p - comm_a - comm_b
// i.e. Var(x_A + x_B) + Var(p_A - p_B) minus the two commutator magnitudes.
struct WitnessReport {
    double f = 0.0;
    std::map<std::string, double> terms;
    std::string regime = "noiseless";
    double level = 0.0;
    std::optional<double> q;

    double reconstruct() const;  // recombines terms; equals f within 1e-12
};

struct NoiseSpec {
    enum class Kind { none, depolarize, loss, povm };
    Kind kind = Kind::none;
    double level = 0.0;

    void validate() const;
};

// Re tr[sigma (X (x) Y)] without forming the Kronecker product.
double pair_expect(const CMatrix& sigma, const CMatrix& X, const CMatrix& Y);

// slot-symmetrized single-particle mean and two-slot joint
double sym_mean(const CMatrix& sigma, const CMatrix& X);
double sym_joint(const CMatrix& sigma, const CMatrix& X, const CMatrix& Y);

// Generalized two-mode witness on an explicit bipartition: x_a/p_a act on
// the first factor (dim split.first), x_b/p_b on the second.
WitnessReport f_general(const CMatrix& rho, const Observable& x_a, const Observable& p_a,
                        const Observable& x_b, const Observable& p_b,
                        std::pair<int, int> split);

// Fixed-split pair witness; N-independent for iid copies.
WitnessReport f_iid(const PairScenario& s);

// Random-bipartition witness at particle probability q (Alice) / 1-q (Bob).
WitnessReport f_q(const PairScenario& s, double q);

// q-averaged witness (exact integral of f_q over q in [0,1]).
WitnessReport f_avg(const PairScenario& s);

bool is_permutation_symmetric(const CMatrix& sigma, int dim, double tol = 1e-10);

WitnessReport f_iid_noisy(const PairScenario& s, const NoiseSpec& noise);
WitnessReport f_avg_noisy(const PairScenario& s, const NoiseSpec& noise);

// Worst-case measured witness under epsilon-perturbed POVMs; declared here,
// implemented by the adversary in povm.cpp.
WitnessReport f_iid_povm_worstcase(const PairScenario& s, double eps,
                                   bool positivity = true);
WitnessReport f_avg_povm_worstcase(const PairScenario& s, double eps,
                                   bool positivity = true);

}  // namespace macroent
