#include "su2qec/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "su2qec/angmom.hpp"
#include "su2qec/errors.hpp"

namespace su2qec::statevec {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kEigResidualTol = 1e-8;
constexpr double kQzResidualTol = 1e-10;
constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdTol = 1e-10;

void check_sites(const std::vector<int>& sites, int N, const char* who) {
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] < 0 || sites[i] >= N) {
            throw DimensionError(std::string(who) + ": site index " +
                                 std::to_string(sites[i]) + " outside register");
        }
        if (i > 0 && sites[i] <= sites[i - 1]) {
            throw DimensionError(std::string(who) + ": sites must be ascending and distinct");
        }
    }
}

std::vector<int> complement_sites(const std::vector<int>& sites, int N) {
    std::vector<int> out;
    out.reserve(N - sites.size());
    std::size_t k = 0;
    for (int j = 0; j < N; ++j) {
        if (k < sites.size() && sites[k] == j) {
            ++k;
        } else {
            out.push_back(j);
        }
    }
    return out;
}

// Full-index offsets of all digit assignments over `sites`, digit for
// sites[0] varying fastest.
std::vector<std::int64_t> subspace_offsets(const std::vector<int>& sites,
                                           const QuditRegister& reg) {
    const int q = reg.local_dim;
    std::int64_t count = 1;
    for (std::size_t i = 0; i < sites.size(); ++i) count *= q;
    std::vector<std::int64_t> strides(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        std::int64_t st = 1;
        for (int j = 0; j < sites[i]; ++j) st *= q;
        strides[i] = st;
    }
    std::vector<std::int64_t> off(count, 0);
    for (std::int64_t t = 0; t < count; ++t) {
        std::int64_t rem = t, o = 0;
        for (std::size_t i = 0; i < sites.size(); ++i) {
            o += (rem % q) * strides[i];
            rem /= q;
        }
        off[t] = o;
    }
    return off;
}

double local_lowering_coeff(HalfInt s, int digit) {
    // q^-|s, m> = sqrt((s+m)(s-m+1)) |s, m-1>, digit = m + s.
    const double sp = s.value();
    const double m = -sp + digit;
    return std::sqrt((sp + m) * (sp - m + 1.0));
}

}  // namespace

QuditRegister::QuditRegister(HalfInt s, int N) : s(s), N(N) {
    if (s.twice() < 1) throw std::domain_error("QuditRegister: s must be >= 1/2");
    if (N < 1) throw std::domain_error("QuditRegister: N must be >= 1");
    local_dim = static_cast<int>(s.twice()) + 1;
    dim = 1;
    for (int j = 0; j < N; ++j) {
        if (dim > kDimGuard / local_dim) {
            throw DimensionError("QuditRegister: (2s+1)^N exceeds the 2^24 guard");
        }
        dim *= local_dim;
    }
}

HalfInt QuditRegister::total_m(std::int64_t index) const {
    long long digit_sum = 0;
    for (int j = 0; j < N; ++j) {
        digit_sum += index % local_dim;
        index /= local_dim;
    }
    return HalfInt::from_twice(2 * digit_sum - N * s.twice());
}

StateVector::StateVector(QuditRegister reg, Vector amplitudes)
    : reg_(reg), amp_(std::move(amplitudes)) {
    if (amp_.size() != reg_.dim) {
        throw DimensionError("StateVector: amplitude length does not match register");
    }
    if (std::abs(amp_.norm() - 1.0) > kNormTol) {
        throw NumericsError("StateVector: norm deviates from 1 beyond 1e-12");
    }
}

DensityMatrix DensityMatrix::from_matrix(Matrix m, std::optional<QuditRegister> reg) {
    if (m.rows() != m.cols()) throw DimensionError("DensityMatrix: not square");
    if (reg && reg->dim != m.rows()) {
        throw DimensionError("DensityMatrix: register does not match matrix size");
    }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermTol) {
        throw NumericsError("DensityMatrix: not Hermitian within 1e-12");
    }
    if (std::abs(m.trace().real() - 1.0) > kTraceTol ||
        std::abs(m.trace().imag()) > kTraceTol) {
        throw NumericsError("DensityMatrix: trace deviates from 1 beyond 1e-12");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol) {
        throw NumericsError("DensityMatrix: eigenvalue below -1e-10");
    }
    return DensityMatrix(std::move(m), std::move(reg));
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return from_matrix(psi.amp() * psi.amp().adjoint(), psi.reg());
}

Vector apply_on_sites(const Vector& v, const Matrix& op,
                      const std::vector<int>& sites, const QuditRegister& reg) {
    check_sites(sites, reg.N, "apply_on_sites");
    const int q = reg.local_dim;
    std::int64_t sub = 1;
    for (std::size_t i = 0; i < sites.size(); ++i) sub *= q;
    if (op.rows() != sub || op.cols() != sub) {
        throw DimensionError("apply_on_sites: operator size does not match site set");
    }
    const auto loc = subspace_offsets(sites, reg);
    const auto rest = subspace_offsets(complement_sites(sites, reg.N), reg);
    Vector out = Vector::Zero(reg.dim);
    Vector x(sub);
    for (const std::int64_t base : rest) {
        for (std::int64_t t = 0; t < sub; ++t) x[t] = v[base + loc[t]];
        const Vector y = op * x;
        for (std::int64_t t = 0; t < sub; ++t) out[base + loc[t]] = y[t];
    }
    return out;
}

Vector apply_qz(const Vector& v, const QuditRegister& reg) {
    Vector out(reg.dim);
    for (std::int64_t i = 0; i < reg.dim; ++i) {
        out[i] = v[i] * reg.total_m(i).value();
    }
    return out;
}

namespace {

// Shared body for Q^+/Q^-: moves one digit up or down at every site.
Vector apply_ladder_sum(const Vector& v, const QuditRegister& reg, bool raising) {
    const int q = reg.local_dim;
    Vector out = Vector::Zero(reg.dim);
    std::int64_t stride = 1;
    for (int j = 0; j < reg.N; ++j) {
        for (std::int64_t i = 0; i < reg.dim; ++i) {
            const int digit = static_cast<int>((i / stride) % q);
            if (raising) {
                if (digit == q - 1) continue;
                // q^+|m> = c |m+1> with c = lowering coeff at digit+1
                out[i + stride] += local_lowering_coeff(reg.s, digit + 1) * v[i];
            } else {
                if (digit == 0) continue;
                out[i - stride] += local_lowering_coeff(reg.s, digit) * v[i];
            }
        }
        stride *= q;
    }
    return out;
}

}  // namespace

Vector apply_qplus(const Vector& v, const QuditRegister& reg) {
    return apply_ladder_sum(v, reg, true);
}

Vector apply_qminus(const Vector& v, const QuditRegister& reg) {
    return apply_ladder_sum(v, reg, false);
}

Matrix local_qz(HalfInt s) {
    const int q = static_cast<int>(s.twice()) + 1;
    Matrix m = Matrix::Zero(q, q);
    for (int d = 0; d < q; ++d) m(d, d) = -s.value() + d;
    return m;
}

Matrix local_qplus(HalfInt s) {
    const int q = static_cast<int>(s.twice()) + 1;
    Matrix m = Matrix::Zero(q, q);
    for (int d = 0; d + 1 < q; ++d) m(d + 1, d) = local_lowering_coeff(s, d + 1);
    return m;
}

Matrix local_qminus(HalfInt s) {
    return local_qplus(s).adjoint();
}

double expectation_qz(const StateVector& psi) {
    double e = 0.0;
    for (std::int64_t i = 0; i < psi.dim(); ++i) {
        e += std::norm(psi.amp()[i]) * psi.reg().total_m(i).value();
    }
    return e;
}

double variance_qz(const StateVector& psi) {
    double e = 0.0, e2 = 0.0;
    for (std::int64_t i = 0; i < psi.dim(); ++i) {
        const double p = std::norm(psi.amp()[i]);
        const double m = psi.reg().total_m(i).value();
        e += p * m;
        e2 += p * m * m;
    }
    return e2 - e * e;
}

namespace {

void check_dicke_residuals(const Vector& v, const QuditRegister& reg, HalfInt J,
                           HalfInt M) {
    const Vector qz = apply_qz(v, reg);
    if ((qz - M.value() * v).norm() > kQzResidualTol) {
        throw NumericsError("dicke_state: Q^z eigen-residual above 1e-10");
    }
    // Casimir route: Q^+Q^- + Q^z(Q^z - 1) = J(J+1) on |J, M>.
    const Vector qm = apply_qminus(v, reg);
    const Vector cas = apply_qplus(qm, reg) +
                       apply_qz(qz, reg) - qz;
    const double jj = J.value() * (J.value() + 1.0);
    if ((cas - jj * v).norm() > kEigResidualTol) {
        throw NumericsError("dicke_state: total-spin residual above 1e-8");
    }
}

}  // namespace

StateVector dicke_state(HalfInt s, int N, HalfInt M) {
    const QuditRegister reg(s, N);
    const HalfInt J = s * N;
    if (M.abs() > J) {
        throw std::domain_error("dicke_state: |M| > sN");
    }
    if (!same_ladder(J, M)) {
        throw std::domain_error("dicke_state: sN - M is not an integer");
    }
    Vector v = Vector::Zero(reg.dim);
    v[reg.dim - 1] = 1.0;  // |s>^(x)N: every digit maximal
    const long long steps = (J - M).twice() / 2;
    HalfInt cur = J;
    for (long long k = 0; k < steps; ++k) {
        v = apply_qminus(v, reg) /
            angmom::ladder_coeff(J, cur, angmom::LadderSign::Minus);
        cur -= HalfInt(1);
    }
    v.normalize();  // scrub accumulated rounding; coefficients above are exact scale
    check_dicke_residuals(v, reg, J, M);
    return StateVector(reg, std::move(v));
}

StateVector lower_state(const StateVector& psi, HalfInt J, HalfInt M) {
    if (M == -J) throw std::domain_error("lower_state: M = -J is annihilated");
    if (M.abs() > J) throw std::domain_error("lower_state: |M| > J");
    const auto& reg = psi.reg();
    const Vector qz = apply_qz(psi.amp(), reg);
    if ((qz - M.value() * psi.amp()).norm() > kEigResidualTol) {
        throw NumericsError("lower_state: input fails the Q^z eigen-residual check");
    }
    Vector v = apply_qminus(psi.amp(), reg) /
               angmom::ladder_coeff(J, M, angmom::LadderSign::Minus);
    v.normalize();
    return StateVector(reg, std::move(v));
}

StateVector probe_state(HalfInt s, int N, HalfInt M) {
    if (M.twice() <= 0) {
        throw std::domain_error("probe_state: M must be positive");
    }
    const StateVector up = dicke_state(s, N, M);
    const StateVector dn = dicke_state(s, N, -M);
    Vector v = (up.amp() + dn.amp()) / std::sqrt(2.0);
    return StateVector(up.reg(), std::move(v));
}

StateVector evolve_phase(const StateVector& psi, double theta) {
    Vector v(psi.dim());
    for (std::int64_t i = 0; i < psi.dim(); ++i) {
        const double m = psi.reg().total_m(i).value();
        v[i] = psi.amp()[i] * std::polar(1.0, -theta * m);
    }
    return StateVector(psi.reg(), std::move(v));
}

StateVector scar_state(HalfInt s, int N, int M, const std::vector<double>& phases) {
    const QuditRegister reg(s, N);
    if (M < 0 || M > N) throw std::domain_error("scar_state: M outside 0..N");
    if (static_cast<int>(phases.size()) != N) {
        throw std::domain_error("scar_state: need one phase per site");
    }
    const int q = reg.local_dim;
    Vector v = Vector::Zero(reg.dim);
    v[0] = 1.0;  // |-s>^(x)N
    for (int k = 0; k < M; ++k) {
        Vector next = Vector::Zero(reg.dim);
        std::int64_t stride = 1;
        for (int j = 0; j < N; ++j) {
            const Complex ph = std::polar(1.0, phases[j]);
            for (std::int64_t i = 0; i < reg.dim; ++i) {
                if ((i / stride) % q == 0) next[i + stride * (q - 1)] += ph * v[i];
            }
            stride *= q;
        }
        v = std::move(next);
        const double n = v.norm();
        if (n == 0.0) throw NumericsError("scar_state: raising annihilated the state");
        v /= n;
    }
    return StateVector(reg, std::move(v));
}

StateVector apply_scar_gauge(const StateVector& psi, const std::vector<double>& phases,
                             bool inverse) {
    const auto& reg = psi.reg();
    if (static_cast<int>(phases.size()) != reg.N) {
        throw std::domain_error("apply_scar_gauge: need one phase per site");
    }
    const int q = reg.local_dim;
    const double sign = inverse ? -1.0 : 1.0;
    Vector v = psi.amp();
    for (std::int64_t i = 0; i < reg.dim; ++i) {
        double arg = 0.0;
        std::int64_t rem = i;
        for (int j = 0; j < reg.N; ++j) {
            const int digit = static_cast<int>(rem % q);
            rem /= q;
            if (digit == q - 1) arg -= phases[j] / 2.0;
            else if (digit == 0) arg += phases[j] / 2.0;
        }
        v[i] *= std::polar(1.0, sign * arg);
    }
    return StateVector(reg, std::move(v));
}

StateVector embedded_doublet_dicke(HalfInt s, int N, int M) {
    const QuditRegister reg(s, N);
    if (M < 0 || M > N) throw std::domain_error("embedded_doublet_dicke: M outside 0..N");
    return scar_state(s, N, M, std::vector<double>(N, 0.0));
}

Vector apply_doublet_jz(const Vector& v, const QuditRegister& reg) {
    const int q = reg.local_dim;
    Vector out(reg.dim);
    for (std::int64_t i = 0; i < reg.dim; ++i) {
        double jz = 0.0;
        std::int64_t rem = i;
        for (int j = 0; j < reg.N; ++j) {
            const int digit = static_cast<int>(rem % q);
            rem /= q;
            if (digit == q - 1) jz += 0.5;
            else if (digit == 0) jz -= 0.5;
        }
        out[i] = jz * v[i];
    }
    return out;
}

DensityMatrix partial_trace(const StateVector& psi, const std::vector<int>& sites) {
    const auto& reg = psi.reg();
    check_sites(sites, reg.N, "partial_trace");
    const auto keep = complement_sites(sites, reg.N);
    if (keep.empty()) {
        throw DimensionError("partial_trace: tracing out every site leaves no register");
    }
    const auto keep_off = subspace_offsets(keep, reg);
    const auto traced_off = subspace_offsets(sites, reg);
    const std::int64_t dk = static_cast<std::int64_t>(keep_off.size());
    const std::int64_t dt = static_cast<std::int64_t>(traced_off.size());
    Matrix grouped(dk, dt);
    for (std::int64_t t = 0; t < dt; ++t) {
        for (std::int64_t k = 0; k < dk; ++k) {
            grouped(k, t) = psi.amp()[keep_off[k] + traced_off[t]];
        }
    }
    Matrix rho = grouped * grouped.adjoint();
    std::optional<QuditRegister> out_reg;
    if (!keep.empty()) out_reg = QuditRegister(reg.s, static_cast<int>(keep.size()));
    return DensityMatrix::from_matrix(std::move(rho), out_reg);
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& sites) {
    if (!rho.reg()) {
        throw DimensionError("partial_trace: density matrix carries no register");
    }
    const auto& reg = *rho.reg();
    check_sites(sites, reg.N, "partial_trace");
    const auto keep = complement_sites(sites, reg.N);
    if (keep.empty()) {
        throw DimensionError("partial_trace: tracing out every site leaves no register");
    }
    const auto keep_off = subspace_offsets(keep, reg);
    const auto traced_off = subspace_offsets(sites, reg);
    const std::int64_t dk = static_cast<std::int64_t>(keep_off.size());
    Matrix out = Matrix::Zero(dk, dk);
    for (const std::int64_t t : traced_off) {
        for (std::int64_t a = 0; a < dk; ++a) {
            for (std::int64_t b = 0; b < dk; ++b) {
                out(a, b) += rho.mat()(keep_off[a] + t, keep_off[b] + t);
            }
        }
    }
    return DensityMatrix::from_matrix(std::move(out),
                                      QuditRegister(reg.s, static_cast<int>(keep.size())));
}

std::vector<StateVector> dicke_basis(HalfInt s, int n) {
    const HalfInt j = s * n;
    std::vector<StateVector> basis;
    basis.reserve(j.twice() + 1);
    // Build by successive lowering instead of one dicke_state call per m.
    StateVector cur = dicke_state(s, n, j);
    basis.push_back(cur);
    for (HalfInt m = j; m > -j; m -= HalfInt(1)) {
        cur = lower_state(cur, j, m);
        basis.push_back(cur);
    }
    std::reverse(basis.begin(), basis.end());  // ascending m
    return basis;
}

CollectiveOverlap collective_overlap(const StateVector& psi,
                                     const std::vector<int>& keep_sites) {
    const auto& reg = psi.reg();
    check_sites(keep_sites, reg.N, "collective_overlap");
    if (keep_sites.empty() || static_cast<int>(keep_sites.size()) == reg.N) {
        throw DimensionError("collective_overlap: keep set must be a proper subset");
    }
    const auto traced = complement_sites(keep_sites, reg.N);
    const auto keep_off = subspace_offsets(keep_sites, reg);
    const auto traced_off = subspace_offsets(traced, reg);
    const auto basis = dicke_basis(reg.s, static_cast<int>(keep_sites.size()));
    const std::int64_t dt = static_cast<std::int64_t>(traced_off.size());
    const std::int64_t na = static_cast<std::int64_t>(basis.size());

    CollectiveOverlap out;
    out.w = Matrix::Zero(na, dt);
    const HalfInt j = reg.s * static_cast<long long>(keep_sites.size());
    for (std::int64_t a = 0; a < na; ++a) {
        out.m_labels.push_back(HalfInt::from_twice(-j.twice() + 2 * a));
        const Vector& b = basis[a].amp();
        for (std::int64_t t = 0; t < dt; ++t) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < keep_off.size(); ++k) {
                acc += std::conj(b[static_cast<std::int64_t>(k)]) *
                       psi.amp()[keep_off[k] + traced_off[t]];
            }
            out.w(a, t) = acc;
        }
    }
    out.completeness = out.w.squaredNorm();
    return out;
}

}  // namespace su2qec::statevec
