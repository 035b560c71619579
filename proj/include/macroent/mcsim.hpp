#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "macroent/quantum.hpp"
#include "macroent/rng.hpp"
#include "macroent/witness.hpp"

namespace macroent {

struct RunConfig {
    enum class Bipartition { fixed_split, fixed_q, random_q };

    int pairs = 1;   // N
    int shots = 2;   // runs per measurement setting
    double loss_p = 0.0;
    double depolarize_lambda = 0.0;
    Bipartition bipartition = Bipartition::fixed_split;
    double q = 0.5;  // Alice probability, used by fixed_q
    std::uint64_t seed = 0;

    void validate() const;
};

struct McEstimate {
    double f_hat = 0.0;
    double std_error = 0.0;
    // per measured setting: estimate and its standard error
    std::map<std::string, std::pair<double, double>> terms;
    RunConfig config;
};

// Joint projective/POVM outcome for one pair: P(a,b) = tr[sigma (E_a (x) F_b)].
std::pair<double, double> sample_pair(const CMatrix& sigma, const Povm& e_a, const Povm& e_b,
                                      SplitMix64& rng);

// Fixed-split finite-N estimator: four settings (x pair, p pair, each
// commutator observable alone), intensities divided by sqrt(N), per-particle
// depolarization branch sampling and Bernoulli loss (lost outcomes read 0),
// standard errors from 16 shot batches.
McEstimate estimate_f_iid(const PairScenario& s, const RunConfig& cfg);

// Random-bipartition estimator: every particle lands on Alice's side with
// probability q (redrawn per shot when bipartition = random_q).
McEstimate estimate_f_bipartition(const PairScenario& s, const RunConfig& cfg);

// Exact pooled expectation of every estimator term by enumerating all 2^(2N)
// loss patterns with Bernoulli weights; matches f_iid_noisy(s, loss p).
WitnessReport exact_loss_oracle(const PairScenario& s, int pairs, double p);

// ||[A^(N), B^(N)]|| for collective observables sum a_i / N^alpha without
// building the 2^n-dimensional operator: identical summands on distinct
// factors make the triangle bound tight, giving n^(1-2 alpha) ||[a,b]||.
double collective_commutator_norm(const Observable& a, const Observable& b, int n, double alpha);

}  // namespace macroent
