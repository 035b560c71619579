#pragma once

#include <cstdint>
#include <vector>

#include "macroent/quantum.hpp"
#include "macroent/witness.hpp"

namespace macroent {

enum class WitnessForm { iid, averaged };

// Outcome-indexed perturbation families for the six measured observables of a
// pair scenario: the four setting observables plus the two commutator
// observables K_A = -i[A1,A2], K_B = -i[B1,B2]. Each vector aligns with
// eig_hermitian(O).eigenvalues (descending) of the corresponding observable,
// sums to zero, and respects the admissibility constraints when produced by
// sample_admissible_families.
struct FamilyPerturbation {
    std::vector<CMatrix> a1, a2, b1, b2, ka, kb;
};

// Random feasible point: Gaussian matrices projected (Dykstra) onto the
// admissible set. Used to cross-check that the worst-case solver dominates
// every sampled family.
FamilyPerturbation sample_admissible_families(const PairScenario& s, double eps,
                                              bool positivity, std::uint64_t seed);

// Measured witness value when every detector reports outcome statistics
// perturbed by the given families at strength eps.
double f_measured_with_families(const PairScenario& s, double eps,
                                const FamilyPerturbation& fams, WitnessForm form);

}  // namespace macroent
