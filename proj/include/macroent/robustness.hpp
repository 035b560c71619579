#pragma once

#include <array>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "macroent/povm.hpp"
#include "macroent/quantum.hpp"
#include "macroent/witness.hpp"

namespace macroent {

struct ThresholdResult {
    std::string parameter;             // "lambda", "p" or "epsilon"
    double critical_value = 0.0;
    std::array<double, 2> bracket{};   // final bracket, opposite witness signs
    int iterations = 0;
    double residual = 0.0;             // |f(critical_value)|, <= requested tol
};

struct SweepTable {
    std::string parameter;
    std::vector<double> grid;
    std::vector<double> values;
    // maximal grid runs where f < 0, as [first, last] grid values
    std::vector<std::array<double, 2>> negative_intervals;

    void validate() const;  // equal lengths, strictly increasing grid
};

// Bisection on a sign-changing function of one parameter. Stops once the
// bracket is narrower than tol AND the midpoint witness value is within tol
// of zero, so both the parameter and the residual meet the tolerance.
ThresholdResult find_threshold(const std::function<double(double)>& witness, double lo, double hi,
                               double tol, const std::string& parameter_name);

// Locate the noise level where the witness for `s` crosses zero. The bracket
// is seeded from a coarse 11-point pre-sweep of the kind's natural domain.
// tol <= 0 picks the default: 1e-10 for the closed-form noise models, 1e-4
// for the POVM adversary.
ThresholdResult noise_threshold(const PairScenario& s, NoiseSpec::Kind kind, WitnessForm form,
                                double tol = 0.0);

// f_q on a uniform grid over [0,1] with `steps` points including endpoints.
SweepTable sweep_q(const PairScenario& s, int steps);

SweepTable sweep_noise(const PairScenario& s, NoiseSpec::Kind kind,
                       const std::vector<double>& grid, WitnessForm form);

// CSV with header `param,f`, one row per grid point, 17 significant digits,
// LF line endings.
void write_csv(const SweepTable& t, std::ostream& os);
void write_csv_file(const SweepTable& t, const std::string& path);

}  // namespace macroent
