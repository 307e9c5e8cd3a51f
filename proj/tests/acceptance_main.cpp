// Acceptance suite: one check per shipped claim, one [PASS]/[FAIL] line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "su2qec/angmom.hpp"
#include "su2qec/channels.hpp"
#include "su2qec/codes.hpp"
#include "su2qec/half_int.hpp"
#include "su2qec/metrology.hpp"
#include "su2qec/statevec.hpp"
#include "su2qec/sweep.hpp"

namespace {

using namespace su2qec;
using Clock = std::chrono::steady_clock;

HalfInt h(long long twice) { return HalfInt::from_twice(twice); }

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

// ---------------------------------------------------------------------------
// 1. QFI-loss scaling law: slope(log DF/(4M^2) vs log J) = 2b + c - 2.

bool crit_scaling_law(std::string& note) {
    const auto t0 = Clock::now();
    const std::vector<std::int64_t> grid = sweep::geometric_grid(64, 8192, 5);
    bool ok = true;
    std::string detail;
    for (const HalfInt s : {h(1), HalfInt(1)}) {
        for (const auto& [b, c] : std::vector<std::pair<double, double>>{
                 {3.0 / 5.0, 1.0 / 5.0}, {2.0 / 3.0, 1.0 / 4.0}, {3.0 / 4.0, 1.0 / 8.0}}) {
            sweep::SweepConfig cfg;
            cfg.mode = sweep::Mode::Fig2;
            cfg.s = s;
            cfg.b = b;
            cfg.c = c;
            cfg.grid = grid;
            const auto res = sweep::run_sweep(cfg);
            std::vector<std::pair<double, double>> pts;
            for (const auto& row : res.rows) {
                pts.push_back({row.J.value(), row.loss_ratio});
            }
            const auto fit = sweep::fit_loglog_slope(pts);
            const double target = 2.0 * b + c - 2.0;
            const bool here =
                std::abs(fit.slope - target) <= 0.1 && fit.r_squared >= 0.98;
            ok = ok && here;
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          " s=%s b=%.3f c=%.3f slope=%+.4f target=%+.4f r2=%.4f%s",
                          s.str().c_str(), b, c, fit.slope, target, fit.r_squared,
                          here ? "" : " <-- out of gate");
            detail += std::string("\n   ") + buf;
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    ok = ok && secs <= 120.0;
    note = "J grid {64,215,724,2435,8192}, gates |slope-target|<=0.1, r2>=0.98, "
           "runtime " + std::to_string(secs) + "s (limit 120)" + detail;
    return ok;
}

// ---------------------------------------------------------------------------
// 2. Closed-form QFI equals the SLD eigendecomposition route.

bool crit_qfi_equivalence(std::string& note) {
    const auto t0 = Clock::now();
    int cases = 0;
    double worst = 0.0;
    bool ok = true;
    for (const HalfInt s : {h(1), HalfInt(1)}) {
        for (int N = 2; N <= 8; ++N) {
            const HalfInt J = s * N;
            for (int d = 0; d < N; ++d) {
                // d = 0 is the trivial pure-state row; sample it only where the
                // full density matrix is small.
                if (d == 0 && (s.twice() > 1 || N > 5)) continue;
                const HalfInt j1 = s * d;
                for (long long tm = j1.twice() + 1; tm <= J.twice(); ++tm) {
                    const HalfInt M = h(tm);
                    if (!same_ladder(J, M) || M.twice() <= 0) continue;
                    const auto closed = metrology::qfi_erased_probe(s, N, M, d);
                    const auto ex = metrology::erased_probe_explicit(
                        s, N, M, d, metrology::default_theta(M));
                    const double sld = metrology::qfi_sld(ex.rho, ex.drho);
                    ++cases;
                    const double ceiling = 4.0 * M.value() * M.value();
                    if (std::max(closed.qfi, sld) <= 1e-12 * ceiling) continue;
                    const double rel = std::abs(closed.qfi - sld) / sld;
                    worst = std::max(worst, rel);
                    ok = ok && rel <= 1e-10;
                }
            }
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    ok = ok && secs <= 60.0;
    note = std::to_string(cases) + " (s,N,M,d) cases, worst relative deviation " +
           std::to_string(worst) + ", runtime " + std::to_string(secs) +
           "s (limit 60)";
    return ok;
}

// ---------------------------------------------------------------------------
// 3. GHZ probes lose all information to one erasure.

bool crit_ghz_collapse(std::string& note) {
    double worst = 0.0;
    for (int N = 2; N <= 12; ++N) {
        const auto rep = metrology::qfi_erased_probe(h(1), N, h(N), 1);
        worst = std::max(worst, rep.qfi);
        if (N <= 8) {
            const auto ex = metrology::erased_probe_explicit(
                h(1), N, h(N), 1, metrology::default_theta(h(N)));
            worst = std::max(worst, metrology::qfi_sld(ex.rho, ex.drho));
        }
    }
    note = "N <= 12 closed form (SLD cross-check N <= 8), worst erased QFI " +
           std::to_string(worst);
    return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// 4. Off-diagonal moments vanish exactly at admissible spacing.

bool crit_offdiagonal_zero(std::string& note) {
    struct Combo {
        HalfInt s;
        int N;
        int d;
    };
    const std::vector<Combo> combos = {
        {h(1), 10, 1}, {h(1), 10, 2}, {HalfInt(1), 8, 1}, {HalfInt(1), 8, 2}};
    double worst_single = 0.0, worst_multi = 0.0;
    int n_single = 0, n_multi = 0;
    std::mt19937_64 seeds(20240601);
    for (const auto& combo : combos) {
        const HalfInt J = combo.s * combo.N;
        const int q = static_cast<int>(combo.s.twice()) + 1;
        const int nd = std::min(static_cast<int>(std::pow(q, 2 * combo.d)), 9);

        // shared site set, Delta = 2sd+1
        {
            const int delta = static_cast<int>(combo.s.twice()) * combo.d + 1;
            const HalfInt M_min = -HalfInt(delta);
            const codes::CodeSpec code(combo.s, combo.N, J, M_min, delta, 3);
            std::vector<int> sites(combo.d);
            for (int i = 0; i < combo.d; ++i) sites[i] = 2 + i;
            for (int t = 0; t < 25; ++t) {
                const auto ch =
                    channels::random_dlocal_channel(combo.s, sites, nd, seeds());
                worst_single =
                    std::max(worst_single, codes::kl_offdiagonal_check(code, ch));
                ++n_single;
            }
        }
        // Kraus operators on different site sets, Delta = 4sd+1
        {
            const int delta = 2 * static_cast<int>(combo.s.twice()) * combo.d + 1;
            if (delta > J.twice()) continue;  // span does not fit this register
            const HalfInt M_min = -HalfInt(delta / 2) - (delta % 2 ? h(1) : HalfInt(0));
            const HalfInt M_lo = same_ladder(J, M_min) ? M_min : M_min + h(1);
            const codes::CodeSpec code(combo.s, combo.N, J, M_lo, delta, 2);
            std::vector<std::vector<int>> sets;
            sets.push_back({});
            sets.push_back({});
            for (int i = 0; i < combo.d; ++i) {
                sets[0].push_back(i);
                sets[1].push_back(combo.N - combo.d + i);
            }
            for (int t = 0; t < 25; ++t) {
                const auto ch =
                    channels::random_multiset_channel(combo.s, sets, nd, seeds());
                worst_multi =
                    std::max(worst_multi, codes::kl_offdiagonal_check(code, ch));
                ++n_multi;
            }
        }
    }
    note = std::to_string(n_single) + " shared-set channels (worst residual " +
           std::to_string(worst_single) + "), " + std::to_string(n_multi) +
           " multi-set channels (worst residual " + std::to_string(worst_multi) + ")";
    return worst_single <= 1e-12 && worst_multi <= 1e-12;
}

// ---------------------------------------------------------------------------
// 5. Diagonal-difference bound holds for random local operators.

bool crit_diagonal_bound(std::string& note) {
    const codes::CodeSpec code(h(1), 10, HalfInt(5), HalfInt(-2), 1, 5);
    std::mt19937_64 rng(987654321);
    std::normal_distribution<double> g;
    int violations = 0;
    double worst_ratio = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int d = 1 + (t % 2);
        std::vector<int> sites;
        if (d == 1) {
            sites = {static_cast<int>(rng() % 10)};
        } else {
            const int a = static_cast<int>(rng() % 10);
            int b = static_cast<int>(rng() % 10);
            while (b == a) b = static_cast<int>(rng() % 10);
            sites = {std::min(a, b), std::max(a, b)};
        }
        const int dim = d == 1 ? 2 : 4;
        statevec::Matrix f(dim, dim);
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) f(r, c) = {g(rng), g(rng)};
        }
        const auto rep = codes::kl_diagonal_bound_check(code, {sites, f});
        if (!rep.holds) ++violations;
        for (const auto& p : rep.pairs) {
            if (p.rhs > 0) worst_ratio = std::max(worst_ratio, p.lhs / p.rhs);
        }
    }
    note = "1000 random 1- and 2-site operators on the N=10 ladder, q0 = 2||q^+||; "
           "violations " + std::to_string(violations) + ", worst lhs/rhs " +
           std::to_string(worst_ratio);
    return violations == 0;
}

// ---------------------------------------------------------------------------
// 6. Reduction-fidelity closed form: explicit agreement and the quoted
//    second-order constant.

bool crit_fidelity_closed_form(std::string& note) {
    bool ok = true;
    double worst = 0.0;
    int cases = 0;
    for (const HalfInt s : {h(1), HalfInt(1)}) {
        for (int N = 2; N <= 8; ++N) {
            const HalfInt J = s * N;
            if (!J.is_integer()) continue;  // M = 0 reference needs the integral ladder
            for (int d = 1; d < N; ++d) {
                const auto tau =
                    statevec::collective_overlap(statevec::dicke_state(s, N, HalfInt(0)),
                                                 [&] {
                                                     std::vector<int> ks(d);
                                                     for (int i = 0; i < d; ++i) ks[i] = i;
                                                     return ks;
                                                 }());
                const statevec::Matrix tau_m = tau.w * tau.w.adjoint();
                for (long long tm = 0; tm <= J.twice(); tm += 2) {
                    const HalfInt M = h(tm);
                    const double closed =
                        metrology::fidelity_erased_codewords(s, N, M, d);
                    std::vector<int> keep(d);
                    for (int i = 0; i < d; ++i) keep[i] = i;
                    const auto ov = statevec::collective_overlap(
                        statevec::dicke_state(s, N, M), keep);
                    if (std::abs(ov.completeness - 1.0) > 1e-10) {
                        ok = false;
                        continue;
                    }
                    const double explicit_f =
                        codes::matrix_fidelity(ov.w * ov.w.adjoint(), tau_m);
                    worst = std::max(worst, std::abs(closed - explicit_f));
                    ++cases;
                }
            }
        }
    }
    ok = ok && worst <= 1e-8;

    // Second-order residual against the quoted constant D_{d,M} at d=2, M=5.
    const double D = 2.0 * 2.0 / 8.0 +
                     (2.0 * (1 + 25 + 10) + 2.0 * 8.0 + 4.0 * (2 * 5 - 1)) / 4.0;
    std::vector<std::pair<double, double>> resid;
    std::string rtxt;
    for (const int N : {200, 500, 1000, 2000}) {
        const double f = metrology::fidelity_erased_codewords(h(1), N, HalfInt(5), 2);
        const double r = std::abs(f - (1.0 - D / (static_cast<double>(N) * N)));
        resid.push_back({static_cast<double>(N), r});
        char buf[64];
        std::snprintf(buf, sizeof(buf), " r(%d)*N^3=%.1f", N,
                      r * std::pow(static_cast<double>(N), 3));
        rtxt += buf;
    }
    const auto fit = sweep::fit_loglog_slope(resid);
    const bool second_order_ok = fit.slope <= -2.5;
    ok = ok && second_order_ok;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%d explicit comparisons (worst gap %.2e); residual vs 1-D/N^2 "
                  "(D=%.1f) has slope %.3f, gate <= -2.5;%s",
                  cases, worst, D, fit.slope, rtxt.c_str());
    note = buf;
    if (!second_order_ok) {
        note += "\n   note: the exact N^-2 coefficient of 1-f at (d=2, M=5) is "
                "d*M^2/2 = 25, not the quoted 31.5; the residual therefore decays "
                "as N^-2 and this gate cannot pass (see the angular-momentum "
                "re-derivation in the test suite).";
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 7. Erasure inaccuracy decays like 1/N at fixed code parameters.

bool crit_erasure_rate(std::string& note) {
    sweep::SweepConfig cfg;
    cfg.mode = sweep::Mode::ErasureEps;
    cfg.s = h(1);
    cfg.m_max = HalfInt(2);
    cfg.delta = 2;
    cfg.count = 3;
    cfg.d = 1;
    cfg.grid = {8, 16, 32, 64};
    const auto res = sweep::run_sweep(cfg);
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : res.rows) {
        pts.push_back({static_cast<double>(row.N), *row.epsilon_hat});
    }
    const auto fit = sweep::fit_loglog_slope(pts);
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "codewords {-2,0,2}, Delta=2, d=1: slope %.4f (gate -1 +- 0.15), "
                  "r2 %.5f", fit.slope, fit.r_squared);
    note = buf;
    return std::abs(fit.slope + 1.0) <= 0.15;
}

// ---------------------------------------------------------------------------
// 8. QFI-loss bound chain DF/(4M^2) <= 4 eps-hat.

bool crit_loss_bound_chain(std::string& note) {
    bool ok = true;
    std::string skipped;
    int checked = 0;
    for (int N = 8; N <= 14; ++N) {
        const HalfInt J = h(N);  // s = 1/2
        if (!same_ladder(J, HalfInt(2))) {
            skipped += " " + std::to_string(N);
            continue;
        }
        const auto rep = metrology::verify_qfi_loss_bound(h(1), N, HalfInt(2), 1);
        ok = ok && rep.holds;
        ++checked;
    }
    note = std::to_string(checked) + " ladder-valid points of N in 8..14 hold";
    if (!skipped.empty()) {
        note += "; skipped N =" + skipped + " (M = 2 is not on the J = N/2 ladder "
                "for odd N, the stated points are vacuous)";
    }
    return ok && checked == 4;
}

// ---------------------------------------------------------------------------
// 9. Binomial power-sum identities, exact.

bool crit_binomial_moments(std::string& note) {
    using angmom::BigRational;
    using angmom::BigUInt;
    bool ok = true;
    for (long long tj = 0; tj <= 100; ++tj) {  // j1 = 0, 1/2, ..., 50
        const BigRational x(tj, 2);
        BigUInt pow2 = 1;
        pow2 <<= static_cast<unsigned>(tj);
        for (int p = 0; p <= 4; ++p) {
            BigRational form;
            switch (p) {
                case 0: form = 1; break;
                case 1: form = x; break;
                case 2: form = x / 2 + x * x; break;
                case 3: form = x * x * (2 * x + 3) / 2; break;
                case 4: form = x * (2 * x + 1) * (2 * x * x + 5 * x - 1) / 4; break;
            }
            form = form * BigRational(pow2);
            if (BigRational(angmom::binomial_moment(h(tj), p)) != form) ok = false;
        }
    }
    note = "p <= 4, j1 <= 50, big-integer equality; the p = 4 closed form is the "
           "standard 2^(2j1-4) (2j1)(2j1+1)(4j1^2+10j1-2) - the 1/4 j1 "
           "(1-3j1+16j1^2+4j1^3) variant printed alongside it fails exact "
           "summation from j1 = 3/2 (132 vs 138)";
    return ok;
}

// ---------------------------------------------------------------------------
// 10. Estimator checks.

bool crit_estimators(std::string& note) {
    using metrology::Scheme;
    bool ok = true;

    // analytic saturation of 1/(2 M sqrt(nu))
    double worst_sat = 0.0;
    for (const double theta : {0.03, 0.11, 0.29}) {
        for (const long long tm : {2LL, 4LL, 8LL}) {
            const HalfInt M = h(tm);
            for (const std::int64_t nu : {100LL, 10000LL}) {
                const auto rep = metrology::measurement_estimate(
                    Scheme::LocalD, h(1), 10, M, 0, theta, nu, 1);
                const double target =
                    1.0 / (2.0 * M.value() * std::sqrt(static_cast<double>(nu)));
                worst_sat = std::max(worst_sat, std::abs(rep.delta_theta - target));
            }
        }
    }
    ok = ok && worst_sat <= 1e-12;

    // Monte Carlo at nu = 1e4 within 15%
    double worst_mc = 0.0;
    std::mt19937_64 seeds(4242);
    for (int t = 0; t < 20; ++t) {
        const auto rep = metrology::measurement_estimate(
            Scheme::LocalD, h(1), 10, HalfInt(2), 0,
            metrology::default_theta(HalfInt(2)), 10000, seeds());
        worst_mc = std::max(worst_mc, std::abs(*rep.mc_delta_theta - rep.delta_theta) /
                                          rep.delta_theta);
    }
    ok = ok && worst_mc <= 0.15;

    // global parity expectation against explicit states
    double worst_glob = 0.0;
    for (const double theta : {0.13, 0.31}) {
        const HalfInt s = h(1);
        const int N = 6, d = 1;
        const HalfInt M(2);
        const auto rep = metrology::measurement_estimate(Scheme::GlobalDPrime, s, N,
                                                         M, d, theta, 0, 0);
        const auto psi =
            statevec::evolve_phase(statevec::probe_state(s, N, M), theta);
        const auto rho = statevec::partial_trace(psi, {0});
        const auto basis = statevec::dicke_basis(s, N - d);
        statevec::Matrix dprime =
            statevec::Matrix::Zero(rho.dim(), rho.dim());
        const long long tj2 = s.twice() * (N - d);
        for (long long tmm = -1; tmm <= 1; tmm += 2) {  // m = -1/2, 1/2
            const long long a = (tj2 + (M.twice() - tmm)) / 2;    // j2 + (M - m)
            const long long b = (tj2 + (-M.twice() - tmm)) / 2;   // j2 + (-M - m)
            dprime += basis[a].amp() * basis[b].amp().adjoint() +
                      basis[b].amp() * basis[a].amp().adjoint();
        }
        const double explicit_exp = (rho.mat() * dprime).trace().real();
        worst_glob = std::max(worst_glob, std::abs(explicit_exp - rep.expectation));
    }
    ok = ok && worst_glob <= 1e-10;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "saturation gap %.2e (gate 1e-12), MC gap %.1f%% (gate 15%%), "
                  "global-parity explicit gap %.2e (gate 1e-10)",
                  worst_sat, 100.0 * worst_mc, worst_glob);
    note = buf;
    return ok;
}

// ---------------------------------------------------------------------------
// 11. Scar states are gauge-equivalent to the embedded Dicke ladder.

bool crit_scar_equivalence(std::string& note) {
    std::mt19937_64 rng(1111);
    double worst = 1.0;
    int cases = 0;
    for (int N = 2; N <= 8; ++N) {
        std::vector<double> phases(N);
        for (auto& p : phases) p = 2.0 * M_PI * (rng() % 100000) / 100000.0;
        for (int M = 0; M <= N; ++M) {
            const auto sm = statevec::scar_state(HalfInt(1), N, M, phases);
            const auto gauged = statevec::apply_scar_gauge(sm, phases, false);
            const auto dicke = statevec::embedded_doublet_dicke(HalfInt(1), N, M);
            worst = std::min(worst, std::abs(gauged.amp().dot(dicke.amp())));
            ++cases;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "s=1, N <= 8, random phases, %d states; worst overlap modulus "
                  "1 - %.2e (doublet gauge applied with the printed phase signs)",
                  cases, 1.0 - worst);
    note = buf;
    return std::abs(worst - 1.0) <= 1e-10;
}

// ---------------------------------------------------------------------------
// 12. Byte-identical reruns.

bool crit_determinism(std::string& note) {
    sweep::SweepConfig cfg;
    cfg.mode = sweep::Mode::Fig2;
    cfg.s = h(1);
    cfg.b = 2.0 / 3.0;
    cfg.c = 0.25;
    cfg.grid = {64, 128, 256, 512};
    cfg.seed = 31415;
    const auto r1 = sweep::run_sweep(cfg);
    const auto r2 = sweep::run_sweep(cfg);
    bool ok = sweep::to_csv(r1) == sweep::to_csv(r2) &&
              sweep::to_json(r1) == sweep::to_json(r2);

    sweep::SweepConfig gcfg;
    gcfg.mode = sweep::Mode::GenericEps;
    gcfg.s = h(1);
    gcfg.m_max = HalfInt(2);
    gcfg.delta = 4;
    gcfg.count = 2;
    gcfg.d = 1;
    gcfg.n_kraus = 4;
    gcfg.seed = 999;
    gcfg.grid = {6, 8, 10};
    ok = ok && sweep::to_csv(sweep::run_sweep(gcfg)) ==
                   sweep::to_csv(sweep::run_sweep(gcfg));
    note = "fig2 and generic-noise sweeps re-serialized byte-identically "
           "(timing lives in the segregated metadata file)";
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 QFI-loss scaling law slope 2b+c-2", crit_scaling_law},
        {"2 closed-form/SLD QFI equivalence", crit_qfi_equivalence},
        {"3 GHZ collapse under one erasure", crit_ghz_collapse},
        {"4 off-diagonal moments vanish (shared and multi-set)", crit_offdiagonal_zero},
        {"5 diagonal-difference bound", crit_diagonal_bound},
        {"6 reduction-fidelity closed form", crit_fidelity_closed_form},
        {"7 erasure inaccuracy ~ 1/N", crit_erasure_rate},
        {"8 QFI-loss bound chain", crit_loss_bound_chain},
        {"9 binomial power-sum identities", crit_binomial_moments},
        {"10 estimator checks", crit_estimators},
        {"11 scar / Dicke gauge equivalence", crit_scar_equivalence},
        {"12 sweep determinism", crit_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        std::string note;
        bool ok = false;
        try {
            ok = c.run(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("[%s] %s (%.2fs)\n", ok ? "PASS" : "FAIL", c.name.c_str(), secs);
        if (!note.empty()) std::printf("   %s\n", note.c_str());
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
