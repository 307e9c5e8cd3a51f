#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "su2qec/half_int.hpp"
#include "su2qec/statevec.hpp"

namespace su2qec::metrology {

using statevec::DensityMatrix;
using statevec::Matrix;
using statevec::StateVector;

// Eigenvalue support cutoff separating exact zeros of the erased-probe
// spectrum from rounding noise.
inline constexpr double kSupportCutoff = 1e-12;

// QFI of (rho, d_theta rho) through the symmetric-logarithmic-derivative
// double sum over the eigendecomposition of rho, kernel cross-terms included:
//   sum_{a,b: lam_a+lam_b > 0} 2 |<a| drho |b>|^2 / (lam_a + lam_b).
// drho must be Hermitian and traceless within 1e-10.
double qfi_sld(const DensityMatrix& rho, const Matrix& drho);

// The operator R itself, solving rho R + R rho = 2 drho on the support:
// R = sum_{a,b} 2 <a|drho|b> / (lam_a + lam_b) |a><b|. Tr(rho R^2) recovers
// the QFI above.
Matrix sld_operator(const DensityMatrix& rho, const Matrix& drho);

struct QFIReport {
    double qfi = 0.0;
    std::vector<HalfInt> support;  // m with lambda_m above the cutoff
    std::vector<double> lambda_m;  // spectrum (a_m^2 + b_m^2)/2, all m
    std::vector<double> a_m;       // <j1 m; j2 M-m | J M>
    std::vector<double> b_m;       // <j1 m; j2 -M-m | J -M>
    double overlap_a = 0.0;        // A = sum_m a_m b_m
    std::optional<Matrix> sld;     // filled by the explicit route only
};

// QFI of the probe (|J,M> + |J,-M>)/sqrt(2) after erasing d sites, from the
// block closed form 4M^2 * sum_m 2 a_m^2 b_m^2 / (a_m^2 + b_m^2); requires
// M > j1 = sd so the two coherence branches never collide. Runs at large J
// through log-binomials. d = 0 reduces to the pure-state value 4M^2.
QFIReport qfi_erased_probe(HalfInt s, int N, HalfInt M, int d);

// Same quantity at the (J, j1) level without a site register, for sweeps
// where N = J/s and d = j1/s are only implicit.
QFIReport qfi_erased_probe_jlevel(HalfInt J, HalfInt M, HalfInt j1);

// Explicit route: build the probe on an actual register, evolve, erase the
// first d sites, and return (rho_theta, d_theta rho_theta) expressed in the
// collective Dicke basis of the kept sites (faithfulness is verified, not
// assumed). Feeds qfi_sld as the closed form's independent cross-check.
struct ErasedProbeExplicit {
    DensityMatrix rho;
    Matrix drho;
    double completeness = 0.0;
    std::vector<HalfInt> kept_m_labels;
};
ErasedProbeExplicit erased_probe_explicit(HalfInt s, int N, HalfInt M, int d,
                                          double theta);

// Closed-form fidelity f(rho_M, rho_0) between d-site reductions of |J=sN,M>
// and |J=sN,0>; requires the integral ladder (sN integer).
double fidelity_erased_codewords(HalfInt s, int N, HalfInt M, int d);

// The printed second-order expansion of the reduction fidelity,
//   1 - J^-2 (j1 M^2/4 + 7 j1^2/8 - 2 j1^2 M^2 - 4 j1^3 M - j1^3/2 - 3 j1/8),
// kept verbatim for diagnostics; it deviates from the exact closed form
// beyond the leading j1 M^2 / (4 J^2) term, which diagnostics report.
double lemma3_asymptotic(HalfInt J, HalfInt M, HalfInt j1);

struct LossBoundReport {
    double qfi_ideal = 0.0;      // 4 M^2
    double qfi_erased = 0.0;
    double delta_f_ratio = 0.0;  // (ideal - erased)/ideal
    double epsilon_hat = 0.0;    // erasure inaccuracy of span{|J,-M>, |J,M>}
    double four_epsilon = 0.0;
    bool holds = false;          // delta_f_ratio <= 4 eps + 1e-8
};

// QFI-loss chain: the erased probe's QFI deficit against four times the
// achievable erasure inaccuracy of the two-codeword span, using
// ||d_theta psi||_1 = ||d_theta psi||_op = M.
LossBoundReport verify_qfi_loss_bound(HalfInt s, int N, HalfInt M, int d);

enum class Scheme { LocalD, GlobalDPrime, LocalDBar };

struct EstimatorReport {
    Scheme scheme = Scheme::LocalD;
    double theta = 0.0;
    std::int64_t nu = 0;
    double expectation = 0.0;   // analytic signal mean
    double variance = 0.0;      // analytic signal variance
    double delta_theta = 0.0;   // propagated standard error
    double amplitude = 0.0;     // 1, A, or a0*b0
    int d_effective = 0;        // LocalDBar may discard one extra qudit
    bool d_adjusted = false;
    // Monte Carlo section (nu > 0): binary +-1 outcomes at the true theta.
    std::optional<double> mc_mean;
    std::optional<double> mc_delta_theta;
    std::optional<double> mc_theta_hat;
};

// Parity-type estimators of theta from <D> = amplitude * cos(2 M theta).
// LocalD needs d = 0; the erased schemes need M > j1. theta with
// sin(2 M theta) ~ 0 is rejected (estimator singularity).
EstimatorReport measurement_estimate(Scheme scheme, HalfInt s, int N, HalfInt M,
                                     int d, double theta, std::int64_t nu,
                                     std::uint64_t seed);

// Default demonstration phase, kept away from the estimator singularity.
double default_theta(HalfInt M);

}  // namespace su2qec::metrology
