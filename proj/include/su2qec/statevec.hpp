#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "su2qec/half_int.hpp"

namespace su2qec::statevec {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Explicit-vector feasibility guard on (2s+1)^N.
inline constexpr std::int64_t kDimGuard = std::int64_t(1) << 24;

// N spin-s sites. Basis convention, fixed across the whole library:
// full index i = sum_j digit_j * (2s+1)^j  (site 0 varies fastest),
// local digit 0 <-> m = -s, digit 2s <-> m = +s.
struct QuditRegister {
    QuditRegister(HalfInt s, int N);

    HalfInt s;
    int N;
    int local_dim;     // 2s+1
    std::int64_t dim;  // (2s+1)^N

    // Local magnetic number of `digit` at any site: digit - s.
    HalfInt local_m(int digit) const { return HalfInt::from_twice(2 * digit - s.twice()); }
    // Total magnetic number of a full basis index.
    HalfInt total_m(std::int64_t index) const;

    bool operator==(const QuditRegister& o) const {
        return s == o.s && N == o.N;
    }
};

// Unit-norm dense state over a QuditRegister.
class StateVector {
  public:
    StateVector(QuditRegister reg, Vector amplitudes);

    const QuditRegister& reg() const { return reg_; }
    const Vector& amp() const { return amp_; }
    std::int64_t dim() const { return reg_.dim; }

  private:
    QuditRegister reg_;
    Vector amp_;
};

// Hermitian, trace-one, PSD-within-tolerance matrix, optionally carrying the
// site structure it lives on (absent for collective-basis reductions).
class DensityMatrix {
  public:
    static DensityMatrix from_matrix(Matrix m, std::optional<QuditRegister> reg = {});
    // Pure-state density matrix |psi><psi|.
    static DensityMatrix pure(const StateVector& psi);

    const Matrix& mat() const { return mat_; }
    const std::optional<QuditRegister>& reg() const { return reg_; }
    std::int64_t dim() const { return mat_.rows(); }

  private:
    DensityMatrix(Matrix m, std::optional<QuditRegister> reg)
        : mat_(std::move(m)), reg_(std::move(reg)) {}
    Matrix mat_;
    std::optional<QuditRegister> reg_;
};

// ---------------------------------------------------------------------------
// Raw operator application (unnormalized outputs).

// Apply a (2s+1)^d square operator living on `sites` (ascending, distinct;
// op digit a corresponds to sites[a], sites[0] fastest) to a full-register
// vector.
Vector apply_on_sites(const Vector& v, const Matrix& op,
                      const std::vector<int>& sites, const QuditRegister& reg);

// Q^z v, Q^+ v, Q^- v with Q^x = sum_j q^x_j.
Vector apply_qz(const Vector& v, const QuditRegister& reg);
Vector apply_qplus(const Vector& v, const QuditRegister& reg);
Vector apply_qminus(const Vector& v, const QuditRegister& reg);

// Local spin matrices for one spin-s site (digit 0 <-> m = -s).
Matrix local_qz(HalfInt s);
Matrix local_qplus(HalfInt s);
Matrix local_qminus(HalfInt s);

double expectation_qz(const StateVector& psi);
double variance_qz(const StateVector& psi);

// ---------------------------------------------------------------------------
// State constructors.

// |J = sN, M>, built by repeated normalized lowering from |s>^{(x)N}.
// Construction is checked: ||Q^z psi - M psi|| <= 1e-10 and the total-spin
// residual ||(Q^+Q^- + Q^z(Q^z-1) - J(J+1)) psi|| <= 1e-8.
StateVector dicke_state(HalfInt s, int N, HalfInt M);

// Q^- psi / c^-_M for a numerically verified |J, M> eigenstate; M = -J is a
// domain error, an input failing the eigen-residual check at 1e-8 is a
// numerics error.
StateVector lower_state(const StateVector& psi, HalfInt J, HalfInt M);

// (|J,M> + |J,-M>)/sqrt(2) with J = sN; requires M > 0.
StateVector probe_state(HalfInt s, int N, HalfInt M);

// Multiply each basis amplitude by exp(-i theta m_total).
StateVector evolve_phase(const StateVector& psi, double theta);

// ---------------------------------------------------------------------------
// Scar states on the |+-s> doublet.

// |S_M> = Z_M (J^+)^M |-s>^{(x)N} with J^+ = sum_j e^{i phi_j} |s><-s|_j.
StateVector scar_state(HalfInt s, int N, int M, const std::vector<double>& phases);

// The doublet phase gauge u_j = e^{-i phi_j/2}|s><s| + e^{+i phi_j/2}|-s><-s|
// (+ identity in between), applied as a tensor product; inverse conjugates
// the phases.
StateVector apply_scar_gauge(const StateVector& psi, const std::vector<double>& phases,
                             bool inverse);

// The spin-1/2 Dicke state with M raised sites, embedded in the {|-s>,|s>}
// doublet of each site.
StateVector embedded_doublet_dicke(HalfInt s, int N, int M);

// Eigenvalue check operator of the doublet algebra:
// Jz = (1/2) sum_j (|s><s| - |-s><-s|)_j, applied to a vector.
Vector apply_doublet_jz(const Vector& v, const QuditRegister& reg);

// ---------------------------------------------------------------------------
// Reduction.

// Trace out `sites`; returns the reduced density matrix on the complement
// (site order preserved).
DensityMatrix partial_trace(const StateVector& psi, const std::vector<int>& sites);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& sites);

// All |j = s*n, m> Dicke states of an n-site register, m = -j ... +j.
std::vector<StateVector> dicke_basis(HalfInt s, int n);

// Overlap matrix W[a, t] = <(basis_a on keep_sites) (x) (t on the rest) | psi>,
// where basis_a runs over the collective Dicke ladder of keep_sites and t over
// the computational basis of the remaining sites. The reduced state on
// keep_sites is W W^dagger whenever ||W||_F^2 accounts for the full norm,
// which holds for any state supported on the maximal collective ladder of
// keep_sites; callers must check `completeness` (= ||W||_F^2 vs the state
// norm) before trusting the reduction.
struct CollectiveOverlap {
    Matrix w;                      // (2j+1) x (traced dim)
    std::vector<HalfInt> m_labels; // row labels, ascending
    double completeness;           // ||W||_F^2
};
CollectiveOverlap collective_overlap(const StateVector& psi,
                                     const std::vector<int>& keep_sites);

}  // namespace su2qec::statevec
