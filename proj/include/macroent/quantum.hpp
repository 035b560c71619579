#pragma once

#include <string>
#include <vector>

#include "macroent/linalg.hpp"

namespace macroent {

struct Ket {
    int dim = 0;
    CVector amplitudes;

    void validate() const;  // throws unless norm is 1 within 1e-10
    CMatrix density() const;
};

struct Observable {
    CMatrix matrix;
    double norm_bound = 1.0;

    void validate() const;  // Hermitian within 1e-10, norm within bound + 1e-9
    int dim() const { return static_cast<int>(matrix.rows()); }
};

struct Povm {
    std::vector<double> outcomes;
    std::vector<CMatrix> elements;
};

struct PovmValidation {
    double hermiticity = 0.0;   // worst |E - E^dag| entry
    double min_eigenvalue = 0.0;
    double completeness = 0.0;  // worst |sum E - I| entry
    bool passes = false;
};

PovmValidation validate_povm(const Povm& p);

// One entangled pair plus the four single-particle observables; the atom
// every witness consumes. sigma lives on C^d (x) C^d, slot 0 = side A in
// the fixed-split forms.
struct PairScenario {
    int dim = 0;
    CMatrix sigma;
    Observable a1, a2, b1, b2;

    void validate() const;
};

struct DepolarizingChannel {
    int dim = 0;
    double lambda = 0.0;

    void validate() const;
};

// Pauli / spin-1 basics
CMatrix sigma_x();
CMatrix sigma_y();
CMatrix sigma_z();
CMatrix spin1_x();
CMatrix spin1_y();
CMatrix spin1_z();

// cos(phi) Sx + sin(phi) Sy in dimension 2 or 3; operator norm exactly 1.
Observable spin_plane_observable(int dim, double phi);

// K with [a1, a2] = iK, i.e. K = -i[a1, a2]; norm_bound set to its norm.
Observable commutator_observable(const Observable& a1, const Observable& a2);

// Canonical qubit scenario: cos(pi/8)|00> - sin(pi/8)|11>, A1 = B1 = sigma_x,
// A2 = B2 = sigma_y.
PairScenario rme_state();

// Canonical qutrit scenario: symmetric two-decimal amplitudes renormalized,
// planar observables at phi = 1.20 with B2 = -Sx.
PairScenario ime_state();
Ket ime_ket();
Ket rme_ket();

// (1-l)^2 rho + l(1-l)(tr_B rho (x) I/d + I/d (x) tr_A rho) + l^2 I/d (x) I/d
CMatrix depolarize_pair(const CMatrix& sigma, const DepolarizingChannel& channel);

// Singular values of the dim x dim amplitude matrix, descending.
std::vector<double> schmidt_coefficients(const Ket& pair_ket);

// Pure ket from a density matrix that is rank one within tolerance.
Ket dominant_ket(const CMatrix& sigma, int dim);

PairScenario make_pure_scenario(int dim, const CVector& amplitudes,
                                const Observable& a1, const Observable& a2,
                                const Observable& b1, const Observable& b2);

}  // namespace macroent
