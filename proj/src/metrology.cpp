#include "su2qec/metrology.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "su2qec/angmom.hpp"
#include "su2qec/codes.hpp"
#include "su2qec/errors.hpp"

namespace su2qec::metrology {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kSingularityTol = 1e-8;
constexpr double kCeilingSlack = 1e-8;

std::vector<int> first_sites(int d) {
    std::vector<int> s(d);
    for (int i = 0; i < d; ++i) s[i] = i;
    return s;
}

}  // namespace

double qfi_sld(const DensityMatrix& rho, const Matrix& drho) {
    if (drho.rows() != rho.dim() || drho.cols() != rho.dim()) {
        throw DimensionError("qfi_sld: derivative size mismatch");
    }
    if ((drho - drho.adjoint()).cwiseAbs().maxCoeff() > kHermTol) {
        throw std::domain_error("qfi_sld: drho is not Hermitian");
    }
    if (std::abs(drho.trace()) > kTraceTol) {
        throw std::domain_error("qfi_sld: drho is not traceless");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
    const Eigen::VectorXd lam_raw = es.eigenvalues();
    const Matrix d_in_eig = es.eigenvectors().adjoint() * drho * es.eigenvectors();
    const std::int64_t n = lam_raw.size();
    double qfi = 0.0;
    for (std::int64_t a = 0; a < n; ++a) {
        const double la = lam_raw(a) > kSupportCutoff ? lam_raw(a) : 0.0;
        for (std::int64_t b = 0; b < n; ++b) {
            const double lb = lam_raw(b) > kSupportCutoff ? lam_raw(b) : 0.0;
            if (la + lb <= 0.0) continue;
            qfi += 2.0 * std::norm(d_in_eig(a, b)) / (la + lb);
        }
    }
    return qfi;
}

Matrix sld_operator(const DensityMatrix& rho, const Matrix& drho) {
    if (drho.rows() != rho.dim() || drho.cols() != rho.dim()) {
        throw DimensionError("sld_operator: derivative size mismatch");
    }
    if ((drho - drho.adjoint()).cwiseAbs().maxCoeff() > kHermTol) {
        throw std::domain_error("sld_operator: drho is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
    const Eigen::VectorXd lam = es.eigenvalues();
    const Matrix d_in_eig = es.eigenvectors().adjoint() * drho * es.eigenvectors();
    Matrix r = Matrix::Zero(rho.dim(), rho.dim());
    for (std::int64_t a = 0; a < lam.size(); ++a) {
        const double la = lam(a) > kSupportCutoff ? lam(a) : 0.0;
        for (std::int64_t b = 0; b < lam.size(); ++b) {
            const double lb = lam(b) > kSupportCutoff ? lam(b) : 0.0;
            if (la + lb <= 0.0) continue;
            r(a, b) = 2.0 * d_in_eig(a, b) / (la + lb);
        }
    }
    return es.eigenvectors() * r * es.eigenvectors().adjoint();
}

QFIReport qfi_erased_probe_jlevel(HalfInt J, HalfInt M, HalfInt j1) {
    if (j1.is_negative() || j1 > J) {
        throw std::domain_error("qfi_erased_probe: j1 outside 0..J");
    }
    if (M <= j1) {
        throw std::domain_error(
            "qfi_erased_probe: closed form needs M > j1 (distinct branches)");
    }
    if (M > J || !same_ladder(J, M)) {
        throw std::domain_error("qfi_erased_probe: M not on the J ladder");
    }
    QFIReport rep;
    const double m2 = M.value() * M.value();
    double qfi = 0.0;
    double overlap = 0.0;
    for (HalfInt m = -j1; m <= j1; m += HalfInt(1)) {
        const double a = angmom::stretched_cg(J, M, j1, m);
        const double b = angmom::stretched_cg(J, -M, j1, m);
        const double lam = 0.5 * (a * a + b * b);
        rep.a_m.push_back(a);
        rep.b_m.push_back(b);
        rep.lambda_m.push_back(lam);
        overlap += a * b;
        if (lam > kSupportCutoff) {
            rep.support.push_back(m);
            qfi += 4.0 * m2 * 2.0 * a * a * b * b / (a * a + b * b);
        }
    }
    rep.qfi = qfi;
    rep.overlap_a = overlap;
    if (rep.qfi > 4.0 * m2 + kCeilingSlack) {
        throw NumericsError("qfi_erased_probe: value above the 4M^2 ceiling");
    }
    return rep;
}

QFIReport qfi_erased_probe(HalfInt s, int N, HalfInt M, int d) {
    if (d < 0 || d >= N) throw std::domain_error("qfi_erased_probe: d outside 0..N-1");
    return qfi_erased_probe_jlevel(s * N, M, s * d);
}

ErasedProbeExplicit erased_probe_explicit(HalfInt s, int N, HalfInt M, int d,
                                          double theta) {
    if (d < 0 || d >= N) throw std::domain_error("erased_probe_explicit: bad d");
    const StateVector psi0 = statevec::probe_state(s, N, M);
    const StateVector psi = statevec::evolve_phase(psi0, theta);
    // d_theta |psi> = -i Q^z |psi>
    const statevec::Vector dpsi =
        std::complex<double>(0.0, -1.0) * statevec::apply_qz(psi.amp(), psi.reg());

    if (d == 0) {
        Matrix drho = dpsi * psi.amp().adjoint() + psi.amp() * dpsi.adjoint();
        return {DensityMatrix::pure(psi), std::move(drho), 1.0, {}};
    }
    std::vector<int> keep;
    for (int j = d; j < N; ++j) keep.push_back(j);
    const auto ov = statevec::collective_overlap(psi, keep);
    if (std::abs(ov.completeness - 1.0) > 1e-10) {
        throw NumericsError(
            "erased_probe_explicit: reduction leaks outside the collective ladder");
    }
    // W' for the derivative: same contraction applied to -i Q^z |psi>.
    const StateVector dstate_like(psi.reg(), dpsi / dpsi.norm());
    const auto ovd = statevec::collective_overlap(dstate_like, keep);
    if (std::abs(ovd.completeness - 1.0) > 1e-10) {
        throw NumericsError(
            "erased_probe_explicit: derivative leaks outside the collective ladder");
    }
    const Matrix wd = ovd.w * dpsi.norm();
    Matrix drho = wd * ov.w.adjoint() + ov.w * wd.adjoint();
    return {DensityMatrix::from_matrix(ov.w * ov.w.adjoint()), std::move(drho),
            ov.completeness, ov.m_labels};
}

double fidelity_erased_codewords(HalfInt s, int N, HalfInt M, int d) {
    const HalfInt J = s * N;
    if (!J.is_integer()) {
        throw std::domain_error(
            "fidelity_erased_codewords: sN must be integral for the M = 0 reference");
    }
    if (d < 0 || d >= N) throw std::domain_error("fidelity_erased_codewords: bad d");
    return angmom::cg_overlap_sum(J, M, HalfInt(0), s * d);
}

double lemma3_asymptotic(HalfInt J, HalfInt M, HalfInt j1) {
    if (J.twice() <= 0) throw std::domain_error("lemma3_asymptotic: J must be positive");
    const double j = J.value(), m = M.value(), x = j1.value();
    const double poly = 0.25 * x * m * m + 0.875 * x * x - 2.0 * x * x * m * m -
                        4.0 * x * x * x * m - 0.5 * x * x * x - 0.375 * x;
    return 1.0 - poly / (j * j);
}

LossBoundReport verify_qfi_loss_bound(HalfInt s, int N, HalfInt M, int d) {
    LossBoundReport rep;
    const QFIReport qfi = qfi_erased_probe(s, N, M, d);  // d = 0 gives 4M^2 exactly
    rep.qfi_ideal = 4.0 * M.value() * M.value();
    rep.qfi_erased = qfi.qfi;
    rep.delta_f_ratio = (rep.qfi_ideal - rep.qfi_erased) / rep.qfi_ideal;
    if (d == 0) {
        rep.epsilon_hat = 0.0;
    } else {
        // span{|J,-M>, |J,M>}: Delta = 2M, which must clear 2sd+1.
        const codes::CodeSpec code(s, N, s * N, -M,
                                   static_cast<int>(M.twice()), 2);
        if (!code.theorem_spacing_ok(d)) {
            throw std::domain_error(
                "verify_qfi_loss_bound: 2M < 2sd+1, the probe span is not "
                "erasure-admissible at this d");
        }
        rep.epsilon_hat = codes::inaccuracy_erasure(code, first_sites(d)).epsilon_hat;
    }
    rep.four_epsilon = 4.0 * rep.epsilon_hat;
    rep.holds = rep.delta_f_ratio <= rep.four_epsilon + kCeilingSlack;
    return rep;
}

double default_theta(HalfInt M) {
    return M_PI / (8.0 * M.value());
}

namespace {

struct SignalModel {
    double amplitude;  // <D> = amplitude * cos(2 M theta)
    int d_effective;
    bool d_adjusted;
};

SignalModel signal_model(Scheme scheme, HalfInt s, int N, HalfInt M, int d) {
    switch (scheme) {
        case Scheme::LocalD: {
            if (d != 0) {
                throw std::domain_error(
                    "measurement_estimate: the all-site parity estimator needs d = 0");
            }
            return {1.0, 0, false};
        }
        case Scheme::GlobalDPrime: {
            const auto rep = qfi_erased_probe(s, N, M, d);
            return {rep.overlap_a, d, false};
        }
        case Scheme::LocalDBar: {
            // The kept-site parity picks up only the m = 0 block, so j1 must
            // be integral; discard one more qudit when it is not.
            int d_eff = d;
            HalfInt j1 = s * d_eff;
            bool adjusted = false;
            if (!j1.is_integer()) {
                d_eff += 1;
                j1 = s * d_eff;
                adjusted = true;
                if (!j1.is_integer()) {
                    throw std::domain_error(
                        "measurement_estimate: cannot make j1 integral");
                }
            }
            if (d_eff >= N) throw std::domain_error("measurement_estimate: d too large");
            if (M <= j1) {
                throw std::domain_error("measurement_estimate: needs M > j1");
            }
            const HalfInt J = s * N;
            const double a0 = angmom::stretched_cg(J, M, j1, HalfInt(0));
            const double b0 = angmom::stretched_cg(J, -M, j1, HalfInt(0));
            return {a0 * b0, d_eff, adjusted};
        }
    }
    throw std::logic_error("measurement_estimate: unknown scheme");
}

}  // namespace

EstimatorReport measurement_estimate(Scheme scheme, HalfInt s, int N, HalfInt M,
                                     int d, double theta, std::int64_t nu,
                                     std::uint64_t seed) {
    if (M.twice() <= 0) throw std::domain_error("measurement_estimate: M must be positive");
    const double two_m_theta = 2.0 * M.value() * theta;
    if (std::abs(std::sin(two_m_theta)) <= kSingularityTol) {
        throw std::domain_error(
            "measurement_estimate: sin(2 M theta) vanishes; estimator singular");
    }
    const SignalModel model = signal_model(scheme, s, N, M, d);

    EstimatorReport rep;
    rep.scheme = scheme;
    rep.theta = theta;
    rep.nu = nu;
    rep.amplitude = model.amplitude;
    rep.d_effective = model.d_effective;
    rep.d_adjusted = model.d_adjusted;
    rep.expectation = model.amplitude * std::cos(two_m_theta);
    // The observable squares to the identity on the signal support, so the
    // second moment is 1 for every scheme.
    rep.variance = 1.0 - rep.expectation * rep.expectation;
    const double slope =
        2.0 * M.value() * model.amplitude * std::abs(std::sin(two_m_theta));
    const double samples = nu > 0 ? static_cast<double>(nu) : 1.0;
    rep.delta_theta = std::sqrt(rep.variance) / (std::sqrt(samples) * slope);

    if (nu > 0) {
        // Binary +-1 outcomes with mean = analytic expectation.
        std::mt19937_64 rng(seed);
        const double p_plus = 0.5 * (1.0 + rep.expectation);
        std::int64_t plus = 0;
        for (std::int64_t i = 0; i < nu; ++i) {
            const double u = (rng() >> 11) * (1.0 / 9007199254740992.0);
            if (u < p_plus) ++plus;
        }
        const double mean = (2.0 * plus - nu) / static_cast<double>(nu);
        const double var_hat =
            (nu > 1) ? (1.0 - mean * mean) * nu / static_cast<double>(nu - 1) : 0.0;
        rep.mc_mean = mean;
        rep.mc_delta_theta = std::sqrt(std::max(0.0, var_hat)) /
                             (std::sqrt(static_cast<double>(nu)) * slope);
        const double clamped =
            std::clamp(mean / model.amplitude, -1.0, 1.0);
        rep.mc_theta_hat = std::acos(clamped) / (2.0 * M.value());
    }
    return rep;
}

}  // namespace su2qec::metrology
