#pragma once

#include <cstdint>
#include <vector>

#include "macroent/quantum.hpp"

namespace macroent {

// spin_plane: observables are cos(phi)Sx + sin(phi)Sy, one angle each.
// general: observables are arbitrary Hermitian matrices squashed onto
// operator norm <= 1 through their eigenvalues.
enum class SearchMode { spin_plane, general };

struct ParamLayout {
    int dim = 2;
    bool symmetric_state = false;    // upper-triangle amplitudes, c_ij = c_ji
    bool fix_state_phiplus = false;  // state pinned to the maximally entangled ket
    SearchMode mode = SearchMode::spin_plane;

    int state_params() const;
    int observable_params() const;
    int total() const { return state_params() + observable_params(); }
    void validate() const;
};

struct ParamVector {
    ParamLayout layout;
    std::vector<double> values;
};

// Always yields a valid scenario: amplitudes normalized (all-zero falls back
// to the first basis ket), observables norm-capped at 1.
PairScenario decode(const ParamVector& p);

// Inverse of decode for scenarios reachable by the layout; the state gauge is
// fixed by making the largest-magnitude amplitude real-positive.
ParamVector encode(const PairScenario& s, const ParamLayout& layout);

struct OptResult {
    double best_f = 0.0;
    PairScenario scenario;
    int starts = 0;
    std::uint64_t seed = 0;
    std::vector<double> per_start_bests;  // best_f == min of these
};

// Minimize f_iid over two-qubit pure states and observables in the chosen
// mode; fix_state_phiplus restricts the search to observables only, with the
// state pinned to (|00> + |11>)/sqrt(2).
OptResult optimize_rme(int starts, std::uint64_t seed, SearchMode mode,
                       bool fix_state_phiplus = false);

// Minimize f_avg over permutation-symmetric two-qudit pure states and planar
// spin observables; dim 2 or 3.
OptResult optimize_ime(int dim, int starts, std::uint64_t seed);

}  // namespace macroent
