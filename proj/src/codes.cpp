#include "su2qec/codes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "su2qec/angmom.hpp"
#include "su2qec/errors.hpp"

namespace su2qec::codes {

namespace {

constexpr double kBoundSlack = 1e-10;
constexpr double kOffdiagPremiseTol = 1e-8;
constexpr double kCrossCheckTol = 1e-8;
// Explicit erasure cross-check runs automatically below this register size.
constexpr std::int64_t kAutoExplicitDim = std::int64_t(1) << 14;

double operator_norm(const Matrix& m) {
    return m.jacobiSvd().singularValues()(0);
}

bool explicit_route_feasible(HalfInt s, int N) {
    const std::int64_t q = s.twice() + 1;
    std::int64_t dim = 1;
    for (int j = 0; j < N; ++j) {
        if (dim > kAutoExplicitDim / q) return false;
        dim *= q;
    }
    return true;
}

// Reduced matrix of |J=sN, M> on `keep` sites, expressed in their collective
// Dicke ladder (the reduction is exactly supported there; the completeness of
// the overlap matrix is checked rather than assumed).
Matrix collective_reduction(HalfInt s, int N, HalfInt M, const std::vector<int>& keep) {
    const auto psi = statevec::dicke_state(s, N, M);
    const auto ov = statevec::collective_overlap(psi, keep);
    if (std::abs(ov.completeness - 1.0) > 1e-10) {
        throw NumericsError(
            "collective_reduction: weight escaped the collective ladder");
    }
    return ov.w * ov.w.adjoint();
}

Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

void check_density_like(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) throw DimensionError(std::string(who) + ": not square");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw NumericsError(std::string(who) + ": not Hermitian within tolerance");
    }
    if (std::abs(m.trace().real() - 1.0) > 1e-8) {
        throw NumericsError(std::string(who) + ": trace deviates from 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw NumericsError(std::string(who) + ": input not PSD within tolerance");
    }
}

}  // namespace

CodeSpec::CodeSpec(HalfInt s, int N, HalfInt J, HalfInt M_min, int delta, int count)
    : s(s), N(N), J(J), M_min(M_min), delta(delta), count(count) {
    if (delta < 1) throw std::domain_error("CodeSpec: Delta must be >= 1");
    if (count < 1) throw std::domain_error("CodeSpec: need at least one codeword");
    if (J.is_negative() || J > s * N) {
        throw std::domain_error("CodeSpec: J outside 0..sN");
    }
    if (!same_ladder(J, M_min)) {
        throw std::domain_error("CodeSpec: M_min not on the J ladder");
    }
    if (M_min.abs() > J || M_max() > J) {
        throw std::domain_error("CodeSpec: codewords leave the |M| <= J range");
    }
}

double CodeSpec::logical_qubits() const {
    return std::log2(static_cast<double>(count));
}

std::vector<StateVector> build_codewords(const CodeSpec& code) {
    if (code.J != code.s * code.N) {
        throw std::domain_error(
            "build_codewords: explicit vectors exist only for J = sN");
    }
    std::vector<StateVector> words;
    words.reserve(code.count);
    for (int x = 0; x < code.count; ++x) {
        words.push_back(statevec::dicke_state(code.s, code.N, code.codeword_m(x)));
    }
    return words;
}

double kl_offdiagonal_check(const CodeSpec& code, const KrausChannel& ch) {
    const auto words = build_codewords(code);
    std::vector<std::vector<statevec::Vector>> images;
    images.reserve(words.size());
    for (const auto& w : words) images.push_back(channels::apply_all_kraus(w, ch));
    double worst = 0.0;
    for (std::size_t x = 0; x < words.size(); ++x) {
        for (std::size_t y = x + 1; y < words.size(); ++y) {
            for (const auto& vi : images[x]) {
                for (const auto& vj : images[y]) {
                    worst = std::max(worst, std::abs(vi.dot(vj)));
                }
            }
        }
    }
    return worst;
}

DiagBoundReport kl_diagonal_bound_check(const CodeSpec& code, const DLocalOperator& f) {
    const auto words = build_codewords(code);
    const int d = static_cast<int>(f.sites.size());
    DiagBoundReport rep;
    rep.q0 = 2.0 * operator_norm(statevec::local_qplus(code.s));
    rep.f_norm = operator_norm(f.op);
    std::vector<std::complex<double>> diag(words.size());
    for (std::size_t x = 0; x < words.size(); ++x) {
        const auto fv = statevec::apply_on_sites(words[x].amp(), f.op, f.sites,
                                                 words[x].reg());
        diag[x] = words[x].amp().dot(fv);
    }
    rep.holds = true;
    for (std::size_t x = 0; x < words.size(); ++x) {
        for (std::size_t y = x + 1; y < words.size(); ++y) {
            DiagPairCheck c{code.codeword_m(static_cast<int>(x)),
                            code.codeword_m(static_cast<int>(y)),
                            std::abs(diag[y] - diag[x]), 0.0};
            c.rhs = d * rep.q0 * rep.f_norm *
                    angmom::ladder_inverse_sum(code.J, c.M_lo, c.M_hi);
            rep.holds = rep.holds && (c.lhs <= c.rhs + kBoundSlack);
            rep.pairs.push_back(std::move(c));
        }
    }
    return rep;
}

double matrix_fidelity(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("matrix_fidelity: size mismatch");
    }
    check_density_like(a, "matrix_fidelity");
    check_density_like(b, "matrix_fidelity");
    const Matrix sa = psd_sqrt(a);
    const Matrix inner = sa * b * sa;
    Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
    // Rank-deficiency noise sits at ~eps * ||inner|| but costs sqrt(eps) per
    // mode if kept; clip well above it, far below any genuine weight.
    const double clip = 1e-13 * std::max(0.0, es.eigenvalues().maxCoeff());
    double f = 0.0;
    for (std::int64_t i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) > clip) f += std::sqrt(es.eigenvalues()(i));
    }
    return f;
}

double matrix_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    return matrix_fidelity(a.mat(), b.mat());
}

KLReport inaccuracy_generic(const CodeSpec& code, const KrausChannel& ch) {
    const double resid = kl_offdiagonal_check(code, ch);
    if (resid > kOffdiagPremiseTol) {
        throw NumericsError(
            "inaccuracy_generic: off-diagonal residual above 1e-8; "
            "the code spacing does not clear this channel");
    }
    const auto words = build_codewords(code);
    std::vector<MomentMatrix> sigmas;
    sigmas.reserve(words.size());
    for (const auto& w : words) {
        sigmas.push_back(channels::complementary_moment_matrix(w, ch));
    }
    MomentMatrix lambda0 = sigmas.front();  // the M_min codeword
    std::vector<double> fids;
    double fmin = 1.0;
    for (const auto& sig : sigmas) {
        const double f = matrix_fidelity(sig.mat(), lambda0.mat());
        fids.push_back(f);
        fmin = std::min(fmin, f);
    }
    const double eps = std::sqrt(std::max(0.0, 1.0 - fmin * fmin));
    return KLReport{resid, std::move(lambda0), std::move(sigmas), std::move(fids), eps};
}

double erased_fidelity(HalfInt s, int N, HalfInt Ma, HalfInt Mb, int d) {
    if (d < 0 || d >= N) throw std::domain_error("erased_fidelity: d outside 0..N-1");
    const HalfInt J = s * N;
    return angmom::cg_overlap_sum(J, Ma, Mb, s * d);
}

ErasureReport inaccuracy_erasure(const CodeSpec& code, const std::vector<int>& sites) {
    std::vector<int> erased = sites;
    std::sort(erased.begin(), erased.end());
    const int d = static_cast<int>(erased.size());
    if (d < 1) throw std::domain_error("inaccuracy_erasure: empty erased set");
    if (d >= code.N) throw std::domain_error("inaccuracy_erasure: d must be < N");
    if (code.J != code.s * code.N) {
        throw std::domain_error("inaccuracy_erasure: requires J = sN");
    }
    if (!code.theorem_spacing_ok(d)) {
        throw std::domain_error(
            "inaccuracy_erasure: Delta < 2sd+1, the off-diagonal premise fails");
    }
    ErasureReport rep;
    rep.reference_m = code.J.is_integer() ? HalfInt(0) : HalfInt::from_twice(1);
    rep.reference_substituted = !code.J.is_integer();

    double fmin = 1.0;
    for (int x = 0; x < code.count; ++x) {
        const double f =
            erased_fidelity(code.s, code.N, code.codeword_m(x), rep.reference_m, d);
        rep.fidelities.push_back(f);
        fmin = std::min(fmin, f);
    }
    rep.epsilon_hat = std::sqrt(std::max(0.0, 1.0 - fmin * fmin));

    // Explicit route: reduce each codeword onto the erased sites (what the
    // environment sees) in their collective ladder basis and take Uhlmann
    // fidelities there.
    if (explicit_route_feasible(code.s, code.N)) {
        const auto tau = collective_reduction(code.s, code.N, rep.reference_m, erased);
        double fmin_explicit = 1.0;
        for (int x = 0; x < code.count; ++x) {
            const auto rho =
                collective_reduction(code.s, code.N, code.codeword_m(x), erased);
            fmin_explicit = std::min(fmin_explicit, matrix_fidelity(rho, tau));
        }
        const double eps_explicit =
            std::sqrt(std::max(0.0, 1.0 - fmin_explicit * fmin_explicit));
        rep.explicit_deviation = std::abs(eps_explicit - rep.epsilon_hat);
        if (*rep.explicit_deviation > kCrossCheckTol) {
            throw NumericsError(
                "inaccuracy_erasure: coefficient route and explicit partial-trace "
                "route disagree beyond 1e-8");
        }
    }
    return rep;
}

}  // namespace su2qec::codes
