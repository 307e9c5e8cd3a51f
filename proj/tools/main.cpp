// su2qec command-line front end: single-shot access to the library operations
// plus the reproducible sweep runner.
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical-contract
// violation, 3 dimension-guard refusal.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "su2qec/angmom.hpp"
#include "su2qec/channels.hpp"
#include "su2qec/codes.hpp"
#include "su2qec/errors.hpp"
#include "su2qec/half_int.hpp"
#include "su2qec/metrology.hpp"
#include "su2qec/statevec.hpp"
#include "su2qec/sweep.hpp"

namespace {

using json = nlohmann::json;
using namespace su2qec;

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out);
    f << text;
}

std::string scalar_csv(const json& v) {
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Flat key,value rendering of a report; arrays join with ';', nested objects
// with dotted keys. Key order is json's (sorted), so the bytes are stable.
std::string report_csv(const json& j, const std::string& prefix = "") {
    std::string out;
    for (const auto& [key, value] : j.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            out += report_csv(value, name);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ';';
                joined += scalar_csv(item);
            }
            out += name + ',' + joined + '\n';
        } else {
            out += name + ',' + scalar_csv(value) + '\n';
        }
    }
    return out;
}

void emit_report(const json& j, const std::string& out, const std::string& format) {
    emit(format == "csv" ? report_csv(j) : j.dump(2) + "\n", out);
}

json code_json(const codes::CodeSpec& code) {
    json j;
    j["s"] = code.s.str();
    j["N"] = code.N;
    j["J"] = code.J.str();
    j["M_min"] = code.M_min.str();
    j["delta"] = code.delta;
    j["count"] = code.count;
    j["M_max"] = code.M_max().str();
    j["logical_qubits"] = code.logical_qubits();
    return j;
}

json channel_meta_json(const channels::KrausChannel& ch) {
    json j;
    j["n_kraus"] = ch.n_kraus();
    j["d"] = ch.locality();
    j["single_site_set"] = ch.single_site_set();
    j["sites"] = ch.site_union();
    if (ch.meta()) {
        j["seed"] = ch.meta()->seed;
        j["prng"] = ch.meta()->algorithm;
    }
    return j;
}

struct CodeArgs {
    std::string s = "1/2";
    int N = 8;
    std::string m_min = "-2";
    int delta = 2;
    int count = 3;

    codes::CodeSpec build() const {
        const HalfInt sv = parse_half_int(s);
        return codes::CodeSpec(sv, N, sv * N, parse_half_int(m_min), delta, count);
    }
};

void add_code_options(CLI::App* cmd, CodeArgs& args) {
    cmd->add_option("--s", args.s, "local spin, e.g. 1/2, 1, 3/2");
    cmd->add_option("--N", args.N, "number of sites");
    cmd->add_option("--m-min", args.m_min, "lowest codeword M");
    cmd->add_option("--delta", args.delta, "codeword spacing");
    cmd->add_option("--count", args.count, "number of codewords");
}

int dispatch(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const DimensionError& e) {
        std::cerr << "dimension guard: " << e.what() << "\n";
        return 3;
    } catch (const NumericsError& e) {
        std::cerr << "numerical contract violation: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SU(2)-ladder covariant code toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value config file with [section] headers");

    std::string out;
    app.add_option("--out", out, "output path (default: stdout)")->configurable(true);
    std::string report_format = "json";
    app.add_option("--format", report_format, "report rendering")
        ->check(CLI::IsMember({"csv", "json"}));

    // ---- cg
    auto* cg = app.add_subcommand("cg", "stretched coupling coefficient");
    std::string cg_J = "1", cg_M = "0", cg_j1 = "1/2", cg_m1 = "1/2";
    cg->add_option("--J", cg_J);
    cg->add_option("--M", cg_M);
    cg->add_option("--j1", cg_j1);
    cg->add_option("--m1", cg_m1);

    // ---- qfi
    auto* qfi = app.add_subcommand("qfi", "erased-probe quantum Fisher information");
    std::string qfi_s = "1/2", qfi_M = "2";
    int qfi_N = 6, qfi_d = 1;
    bool qfi_explicit = false;
    qfi->add_option("--s", qfi_s);
    qfi->add_option("--N", qfi_N);
    qfi->add_option("--M", qfi_M);
    qfi->add_option("--d", qfi_d);
    qfi->add_flag("--explicit", qfi_explicit,
                  "cross-check against the eigendecomposition route");

    // ---- fidelity
    auto* fid = app.add_subcommand("fidelity", "reduction fidelity f(rho_M, rho_0)");
    std::string fid_s = "1/2", fid_M = "2";
    int fid_N = 8, fid_d = 1;
    fid->add_option("--s", fid_s);
    fid->add_option("--N", fid_N);
    fid->add_option("--M", fid_M);
    fid->add_option("--d", fid_d);

    // ---- kl-check
    auto* kl = app.add_subcommand("kl-check",
                                  "Knill-Laflamme moments of a seeded channel");
    CodeArgs kl_code;
    add_code_options(kl, kl_code);
    std::vector<int> kl_sites{0};
    int kl_nkraus = 4;
    std::uint64_t kl_seed = 0;
    bool kl_multiset = false;
    kl->add_option("--sites", kl_sites, "channel site set")->delimiter(',');
    kl->add_option("--n-kraus", kl_nkraus);
    kl->add_option("--seed", kl_seed);
    kl->add_flag("--multiset", kl_multiset,
                 "one single-site sub-channel per listed site");

    // ---- inaccuracy
    auto* inx = app.add_subcommand("inaccuracy", "achievable recovery inaccuracy");
    CodeArgs inx_code;
    add_code_options(inx, inx_code);
    std::string inx_mode = "erasure";
    std::vector<int> inx_sites{0};
    int inx_nkraus = 4;
    std::uint64_t inx_seed = 0;
    inx->add_option("--mode", inx_mode)->check(CLI::IsMember({"erasure", "generic"}));
    inx->add_option("--sites", inx_sites, "erased / noisy site set")->delimiter(',');
    inx->add_option("--n-kraus", inx_nkraus);
    inx->add_option("--seed", inx_seed);

    // ---- measure
    auto* meas = app.add_subcommand("measure", "parity estimators of theta");
    std::string meas_scheme = "local-d", meas_s = "1/2", meas_M = "2";
    int meas_N = 8, meas_d = 0;
    double meas_theta = -1.0;
    std::int64_t meas_nu = 0;
    std::uint64_t meas_seed = 0;
    meas->add_option("--scheme", meas_scheme)
        ->check(CLI::IsMember({"local-d", "global-dprime", "local-dbar"}));
    meas->add_option("--s", meas_s);
    meas->add_option("--N", meas_N);
    meas->add_option("--M", meas_M);
    meas->add_option("--d", meas_d);
    meas->add_option("--theta", meas_theta, "default: pi/(8M)");
    meas->add_option("--nu", meas_nu, "Monte Carlo sample count (0: analytic only)");
    meas->add_option("--seed", meas_seed);

    // ---- sweep / fig2
    sweep::SweepConfig swcfg;
    std::string sw_mode = "fig2", sw_s = "1/2", sw_mmax = "2", sw_format = "csv";
    std::vector<std::int64_t> sw_grid;
    auto add_sweep_options = [&](CLI::App* cmd) {
        cmd->add_option("--mode", sw_mode)
            ->check(CLI::IsMember({"fig2", "erasure-eps", "generic-eps"}));
        cmd->add_option("--s", sw_s);
        cmd->add_option("--b", swcfg.b);
        cmd->add_option("--c", swcfg.c);
        cmd->add_option("--grid", sw_grid, "J grid (fig2) or N grid (eps modes)")
            ->delimiter(',');
        cmd->add_option("--m-max", sw_mmax);
        cmd->add_option("--delta", swcfg.delta);
        cmd->add_option("--count", swcfg.count);
        cmd->add_option("--d", swcfg.d);
        cmd->add_option("--n-kraus", swcfg.n_kraus);
        cmd->add_option("--seed", swcfg.seed);
        cmd->add_option("--format", sw_format)->check(CLI::IsMember({"csv", "json"}));
    };
    auto* sw = app.add_subcommand("sweep", "parameter sweep over a grid");
    add_sweep_options(sw);
    auto* fig2 = app.add_subcommand(
        "fig2", "QFI-loss scaling sweep (geometric J grid, factor 2)");
    add_sweep_options(fig2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    return dispatch([&] {
        if (*cg) {
            const double v =
                angmom::stretched_cg(parse_half_int(cg_J), parse_half_int(cg_M),
                                     parse_half_int(cg_j1), parse_half_int(cg_m1));
            json j;
            j["J"] = cg_J;
            j["M"] = cg_M;
            j["j1"] = cg_j1;
            j["m1"] = cg_m1;
            j["value"] = v;
            emit_report(j, out, report_format);
        } else if (*qfi) {
            const HalfInt s = parse_half_int(qfi_s), M = parse_half_int(qfi_M);
            const auto rep = metrology::qfi_erased_probe(s, qfi_N, M, qfi_d);
            json j;
            j["s"] = qfi_s;
            j["N"] = qfi_N;
            j["M"] = qfi_M;
            j["d"] = qfi_d;
            j["qfi"] = rep.qfi;
            j["qfi_ideal"] = 4.0 * M.value() * M.value();
            j["overlap_A"] = rep.overlap_a;
            j["lambda_m"] = rep.lambda_m;
            j["a_m"] = rep.a_m;
            j["b_m"] = rep.b_m;
            j["support"] = json::array();
            for (const auto& m : rep.support) j["support"].push_back(m.str());
            if (qfi_explicit) {
                const auto ex = metrology::erased_probe_explicit(
                    s, qfi_N, M, qfi_d, metrology::default_theta(M));
                j["qfi_sld"] = metrology::qfi_sld(ex.rho, ex.drho);
                j["reduction_completeness"] = ex.completeness;
            }
            emit_report(j, out, report_format);
        } else if (*fid) {
            const HalfInt s = parse_half_int(fid_s), M = parse_half_int(fid_M);
            json j;
            j["s"] = fid_s;
            j["N"] = fid_N;
            j["M"] = fid_M;
            j["d"] = fid_d;
            j["fidelity"] = metrology::fidelity_erased_codewords(s, fid_N, M, fid_d);
            j["second_order_printed"] =
                metrology::lemma3_asymptotic(s * fid_N, M, s * fid_d);
            emit_report(j, out, report_format);
        } else if (*kl) {
            const auto code = kl_code.build();
            const HalfInt s = parse_half_int(kl_code.s);
            channels::KrausChannel ch = [&] {
                if (kl_multiset) {
                    std::vector<std::vector<int>> sets;
                    for (const int site : kl_sites) sets.push_back({site});
                    return channels::random_multiset_channel(s, sets, kl_nkraus, kl_seed);
                }
                return channels::random_dlocal_channel(s, kl_sites, kl_nkraus, kl_seed);
            }();
            json j;
            j["code"] = code_json(code);
            j["channel_meta"] = channel_meta_json(ch);
            j["offdiag_residual"] = codes::kl_offdiagonal_check(code, ch);
            j["spacing_ok"] = kl_multiset ? code.multiset_spacing_ok(ch.locality())
                                          : code.theorem_spacing_ok(ch.locality());
            j["diag_checks"] = json::array();
            if (ch.single_site_set()) {
                // Lemma-style diagonal checks on the channel's own products.
                for (int i = 0; i < ch.n_kraus(); ++i) {
                    for (int k = i; k < ch.n_kraus(); ++k) {
                        const codes::DLocalOperator f{
                            ch.terms()[i].sites,
                            ch.terms()[i].op.adjoint() * ch.terms()[k].op};
                        const auto rep = codes::kl_diagonal_bound_check(code, f);
                        json entry;
                        entry["kraus_pair"] = {i, k};
                        entry["q0"] = rep.q0;
                        entry["f_norm"] = rep.f_norm;
                        entry["holds"] = rep.holds;
                        double worst = 0.0;
                        for (const auto& p : rep.pairs) {
                            worst = std::max(worst, p.rhs > 0 ? p.lhs / p.rhs : 0.0);
                        }
                        entry["worst_lhs_over_rhs"] = worst;
                        j["diag_checks"].push_back(entry);
                    }
                }
            }
            emit_report(j, out, report_format);
        } else if (*inx) {
            const auto code = inx_code.build();
            const HalfInt s = parse_half_int(inx_code.s);
            json j;
            j["code"] = code_json(code);
            if (inx_mode == "erasure") {
                const auto rep = codes::inaccuracy_erasure(code, inx_sites);
                j["channel_meta"] = {{"kind", "heralded erasure"},
                                     {"sites", inx_sites}};
                j["epsilon_hat"] = rep.epsilon_hat;
                j["fidelities"] = rep.fidelities;
                j["reference_m"] = rep.reference_m.str();
                j["reference_substituted"] = rep.reference_substituted;
                if (rep.explicit_deviation) {
                    j["explicit_deviation"] = *rep.explicit_deviation;
                }
            } else {
                const auto ch =
                    channels::random_dlocal_channel(s, inx_sites, inx_nkraus, inx_seed);
                const auto rep = codes::inaccuracy_generic(code, ch);
                j["channel_meta"] = channel_meta_json(ch);
                j["offdiag_residual"] = rep.offdiag_residual;
                j["epsilon_hat"] = rep.epsilon_hat;
                j["fidelities"] = rep.fidelities;
            }
            emit_report(j, out, report_format);
        } else if (*meas) {
            const HalfInt s = parse_half_int(meas_s), M = parse_half_int(meas_M);
            const double theta =
                meas_theta >= 0.0 ? meas_theta : metrology::default_theta(M);
            const metrology::Scheme scheme =
                meas_scheme == "local-d"
                    ? metrology::Scheme::LocalD
                    : (meas_scheme == "global-dprime" ? metrology::Scheme::GlobalDPrime
                                                      : metrology::Scheme::LocalDBar);
            const auto rep = metrology::measurement_estimate(scheme, s, meas_N, M,
                                                             meas_d, theta, meas_nu,
                                                             meas_seed);
            json j;
            j["scheme"] = meas_scheme;
            j["s"] = meas_s;
            j["N"] = meas_N;
            j["M"] = meas_M;
            j["d"] = meas_d;
            j["d_effective"] = rep.d_effective;
            j["d_adjusted"] = rep.d_adjusted;
            j["theta"] = rep.theta;
            j["nu"] = rep.nu;
            j["expectation"] = rep.expectation;
            j["variance"] = rep.variance;
            j["amplitude"] = rep.amplitude;
            j["delta_theta"] = rep.delta_theta;
            if (rep.mc_mean) {
                j["mc"] = {{"mean", *rep.mc_mean},
                           {"delta_theta", *rep.mc_delta_theta},
                           {"theta_hat", *rep.mc_theta_hat},
                           {"seed", meas_seed}};
            }
            emit_report(j, out, report_format);
        } else if (*sw || *fig2) {
            swcfg.s = parse_half_int(sw_s);
            swcfg.m_max = parse_half_int(sw_mmax);
            swcfg.mode = sw_mode == "fig2"
                             ? sweep::Mode::Fig2
                             : (sw_mode == "erasure-eps" ? sweep::Mode::ErasureEps
                                                         : sweep::Mode::GenericEps);
            swcfg.format = sw_format == "csv" ? sweep::Format::Csv : sweep::Format::Json;
            swcfg.grid = sw_grid;
            if (swcfg.grid.empty() && swcfg.mode == sweep::Mode::Fig2) {
                for (std::int64_t j = 64; j <= 4096; j *= 2) swcfg.grid.push_back(j);
            }
            swcfg.out = out;
            const auto result = sweep::run_sweep(swcfg);
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
            if (out.empty()) {
                std::cout << (swcfg.format == sweep::Format::Csv
                                  ? sweep::to_csv(result)
                                  : sweep::to_json(result));
            } else {
                sweep::write_outputs(result, out);
            }
        }
    });
}
