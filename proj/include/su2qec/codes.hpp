#pragma once

#include <optional>
#include <vector>

#include "su2qec/channels.hpp"
#include "su2qec/half_int.hpp"
#include "su2qec/statevec.hpp"

namespace su2qec::codes {

using channels::KrausChannel;
using channels::MomentMatrix;
using statevec::DensityMatrix;
using statevec::Matrix;
using statevec::StateVector;

// Equally spaced ladder code span {|J, M_min + x*Delta>; x = 0..count-1}.
struct CodeSpec {
    HalfInt s;
    int N = 0;
    HalfInt J;
    HalfInt M_min;
    int delta = 1;
    int count = 2;

    CodeSpec(HalfInt s, int N, HalfInt J, HalfInt M_min, int delta, int count);

    HalfInt M_max() const { return M_min + HalfInt(delta) * (count - 1); }
    HalfInt codeword_m(int x) const { return M_min + HalfInt(delta) * x; }
    double logical_qubits() const;  // log2(count)

    // Delta >= 2sd+1 (shared-site-set channels).
    bool theorem_spacing_ok(int d) const { return delta >= s.twice() * d + 1; }
    // Delta >= 4sd+1 (Kraus operators on different site sets).
    bool multiset_spacing_ok(int d) const { return delta >= 2 * s.twice() * d + 1; }
};

// Explicit codeword vectors; requires J = sN (the permutation-symmetric
// ladder, the only case with explicit constructions here).
std::vector<StateVector> build_codewords(const CodeSpec& code);

// max over codeword pairs x != y and Kraus pairs (i, j) of
// |<J,M_x| K_i^dagger K_j |J,M_y>|. Exactly zero whenever the code spacing
// clears the channel's total magnetization reach.
double kl_offdiagonal_check(const CodeSpec& code, const KrausChannel& ch);

// A d-local test operator with its site set.
struct DLocalOperator {
    std::vector<int> sites;
    Matrix op;
};

struct DiagPairCheck {
    HalfInt M_lo, M_hi;
    double lhs;  // |<J,hi|F|J,hi> - <J,lo|F|J,lo>|
    double rhs;  // d q0 ||F||_op C(lo, hi)
};

struct DiagBoundReport {
    std::vector<DiagPairCheck> pairs;
    double q0 = 0.0;       // 2 ||q^+_site||_op
    double f_norm = 0.0;   // ||F||_op
    bool holds = false;    // every lhs <= rhs + 1e-10
};

// Ladder-difference bound on diagonal moments for one d-local operator.
DiagBoundReport kl_diagonal_bound_check(const CodeSpec& code, const DLocalOperator& f);

// Uhlmann fidelity ||sqrt(B) sqrt(A)||_1 = Tr sqrt(sqrt(A) B sqrt(A)).
double matrix_fidelity(const DensityMatrix& a, const DensityMatrix& b);
// Same on raw Hermitian PSD trace-one matrices (tolerance-checked).
double matrix_fidelity(const Matrix& a, const Matrix& b);

struct KLReport {
    double offdiag_residual = 0.0;
    MomentMatrix lambda0;                  // moments of the M_min codeword
    std::vector<MomentMatrix> sigmas;      // per codeword
    std::vector<double> fidelities;        // f(Sigma_x, lambda0)
    double epsilon_hat = 0.0;              // sqrt(1 - min_x f^2)
};

// Achievable-inaccuracy estimate for a d-local Kraus channel, built from the
// codeword moment matrices with lambda taken at M_min. Errors out when the
// off-diagonal residual exceeds 1e-8 (the construction's premise).
KLReport inaccuracy_generic(const CodeSpec& code, const KrausChannel& ch);

struct ErasureReport {
    std::vector<double> fidelities;  // f(rho^x_alpha, tau^0_alpha) per codeword
    double epsilon_hat = 0.0;
    HalfInt reference_m;             // 0, or 1/2 when sN is half-integral
    bool reference_substituted = false;
    // |closed-form - explicit| when the explicit cross-check ran.
    std::optional<double> explicit_deviation;
};

// Achievable-inaccuracy estimate against heralded erasure of `sites`,
// computed from stretched coupling coefficients (any N); an explicit
// partial-trace cross-check runs automatically when the register is small
// enough and must agree within 1e-8.
ErasureReport inaccuracy_erasure(const CodeSpec& code, const std::vector<int>& sites);

// Fidelity f(rho_Ma, rho_Mb) of d-site reductions of |J=sN, M> codewords.
double erased_fidelity(HalfInt s, int N, HalfInt Ma, HalfInt Mb, int d);

}  // namespace su2qec::codes
