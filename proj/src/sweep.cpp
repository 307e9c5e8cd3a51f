#include "su2qec/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "su2qec/channels.hpp"
#include "su2qec/codes.hpp"
#include "su2qec/errors.hpp"
#include "su2qec/metrology.hpp"

namespace su2qec::sweep {

namespace {

using json = nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_halfint(HalfInt h) {
    if (h.is_integer()) return std::to_string(h.twice() / 2);
    return fmt_double(h.value());
}

struct PointOutcome {
    std::optional<SweepRow> row;
    std::optional<std::string> warning;
};

// fig2 schedule at one grid value J: M = round(J^b), d = round(N^c), j1 = s d.
PointOutcome fig2_point(const SweepConfig& cfg, std::int64_t Jv) {
    PointOutcome out;
    const HalfInt J(Jv);
    if ((2 * Jv) % cfg.s.twice() != 0) {
        out.warning = "J=" + std::to_string(Jv) + ": N = J/s not integral, skipped";
        return out;
    }
    const std::int64_t N = 2 * Jv / cfg.s.twice();
    const HalfInt M(std::max<std::int64_t>(
        1, round_ties_down(std::pow(static_cast<double>(Jv), cfg.b))));
    const int d = static_cast<int>(std::max<std::int64_t>(
        1, round_ties_down(std::pow(static_cast<double>(N), cfg.c))));
    const HalfInt j1 = cfg.s * d;
    if (M <= j1) {
        out.warning = "J=" + std::to_string(Jv) + ": M=" + M.str() +
                      " <= j1=" + j1.str() + ", skipped";
        return out;
    }
    if (M > J) {
        out.warning = "J=" + std::to_string(Jv) + ": M exceeds J, skipped";
        return out;
    }
    const auto rep = metrology::qfi_erased_probe_jlevel(J, M, j1);
    SweepRow row;
    row.J = J;
    row.N = N;
    row.M = M;
    row.d = d;
    row.qfi_ideal = 4.0 * M.value() * M.value();
    row.qfi_erased = rep.qfi;
    row.loss_ratio = (row.qfi_ideal - row.qfi_erased) / row.qfi_ideal;

    // Small enough for explicit vectors: cross-check the closed form against
    // the eigendecomposition route.
    const std::int64_t q = cfg.s.twice() + 1;
    bool feasible = true;
    std::int64_t dim = 1;
    for (std::int64_t j = 0; j < N && feasible; ++j) {
        feasible = dim <= (std::int64_t(1) << 14) / q;
        dim *= q;
    }
    if (feasible) {
        const auto ex = metrology::erased_probe_explicit(
            cfg.s, static_cast<int>(N), M, d, metrology::default_theta(M));
        const double sld = metrology::qfi_sld(ex.rho, ex.drho);
        if (std::abs(sld - rep.qfi) > 1e-8 * std::max(1.0, sld)) {
            throw NumericsError("run_sweep: closed-form QFI disagrees with the "
                                "explicit route at J=" + J.str());
        }
    }
    out.row = row;
    return out;
}

PointOutcome eps_point(const SweepConfig& cfg, std::int64_t Nv) {
    PointOutcome out;
    const int N = static_cast<int>(Nv);
    const HalfInt J = cfg.s * N;
    const HalfInt M_min = cfg.m_max - HalfInt(cfg.delta) * (cfg.count - 1);
    if (!same_ladder(J, cfg.m_max)) {
        out.warning = "N=" + std::to_string(Nv) + ": M_max=" + cfg.m_max.str() +
                      " not on the J=" + J.str() + " ladder, skipped";
        return out;
    }
    const codes::CodeSpec code(cfg.s, N, J, M_min, cfg.delta, cfg.count);
    std::vector<int> sites(cfg.d);
    for (int i = 0; i < cfg.d; ++i) sites[i] = i;

    SweepRow row;
    row.J = J;
    row.N = Nv;
    row.M = cfg.m_max;
    row.d = cfg.d;
    if (cfg.mode == Mode::ErasureEps) {
        row.epsilon_hat = codes::inaccuracy_erasure(code, sites).epsilon_hat;
    } else {
        const auto ch = channels::random_dlocal_channel(cfg.s, sites, cfg.n_kraus,
                                                        cfg.seed);
        row.epsilon_hat = codes::inaccuracy_generic(code, ch).epsilon_hat;
    }
    // Probe-state QFI at M_max for context, when the premise M > j1 holds.
    const HalfInt j1 = cfg.s * cfg.d;
    row.qfi_ideal = 4.0 * cfg.m_max.value() * cfg.m_max.value();
    if (cfg.m_max > j1) {
        row.qfi_erased = metrology::qfi_erased_probe(cfg.s, N, cfg.m_max, cfg.d).qfi;
        row.loss_ratio = (row.qfi_ideal - row.qfi_erased) / row.qfi_ideal;
    } else {
        row.qfi_erased = 0.0;
        row.loss_ratio = 1.0;
    }
    out.row = row;
    return out;
}

json row_json(const SweepRow& row) {
    json j;
    j["J"] = row.J.value();
    j["N"] = row.N;
    j["M"] = row.M.value();
    j["d"] = row.d;
    j["qfi_ideal"] = row.qfi_ideal;
    j["qfi_erased"] = row.qfi_erased;
    j["loss_ratio"] = row.loss_ratio;
    if (row.epsilon_hat) {
        j["epsilon_hat"] = *row.epsilon_hat;
    } else {
        j["epsilon_hat"] = nullptr;
    }
    return j;
}

json config_json(const SweepConfig& cfg) {
    json j;
    switch (cfg.mode) {
        case Mode::Fig2: j["mode"] = "fig2"; break;
        case Mode::ErasureEps: j["mode"] = "erasure_eps"; break;
        case Mode::GenericEps: j["mode"] = "generic_eps"; break;
    }
    j["s"] = cfg.s.str();
    j["a"] = cfg.a;
    j["b"] = cfg.b;
    j["c"] = cfg.c;
    j["grid"] = cfg.grid;
    j["m_max"] = cfg.m_max.str();
    j["delta"] = cfg.delta;
    j["count"] = cfg.count;
    j["d"] = cfg.d;
    j["n_kraus"] = cfg.n_kraus;
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace

void SweepConfig::validate() const {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] <= grid[i - 1]) {
            throw std::domain_error("sweep config: grid must be strictly increasing");
        }
    }
    for (const auto v : grid) {
        if (v < 1) throw std::domain_error("sweep config: grid values must be positive");
    }
    if (mode == Mode::Fig2) {
        if (!(0.0 <= c && c <= b && b < 1.0)) {
            throw std::domain_error("sweep config: fig2 needs 0 <= c <= b < 1");
        }
    } else {
        if (delta < 1 || count < 1 || d < 1) {
            throw std::domain_error("sweep config: delta, count and d must be positive");
        }
    }
}

SweepResult run_sweep(const SweepConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<PointOutcome> outcomes(config.grid.size());
    std::vector<double> times(config.grid.size(), 0.0);

    // Points are independent; evaluate them on a small pool and assemble in
    // grid order so the output is schedule-independent.
    std::atomic<std::size_t> next{0};
    std::mutex fail_mu;
    std::exception_ptr failure;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config.grid.size()) return;
            const auto p0 = std::chrono::steady_clock::now();
            try {
                outcomes[i] = (config.mode == Mode::Fig2)
                                  ? fig2_point(config, config.grid[i])
                                  : eps_point(config, config.grid[i]);
            } catch (...) {
                std::lock_guard lk(fail_mu);
                if (!failure) failure = std::current_exception();
                return;
            }
            times[i] = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - p0).count();
        }
    };
    const unsigned n_threads = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()),
        static_cast<unsigned>(std::max<std::size_t>(config.grid.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    SweepResult result;
    result.config = config;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].warning) result.warnings.push_back(*outcomes[i].warning);
        if (outcomes[i].row) {
            SweepRow row = *outcomes[i].row;
            row.wall_time_s = times[i];
            if (row.loss_ratio < -1e-12 || row.loss_ratio > 1.0 + 1e-12) {
                throw NumericsError("run_sweep: loss_ratio left [0, 1]");
            }
            result.rows.push_back(std::move(row));
        }
    }
    result.total_wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::string to_csv(const SweepResult& r) {
    std::string out = "J,N,M,d,qfi_ideal,qfi_erased,loss_ratio,epsilon_hat\n";
    for (const auto& row : r.rows) {
        out += fmt_halfint(row.J) + ',' + std::to_string(row.N) + ',' +
               fmt_halfint(row.M) + ',' + std::to_string(row.d) + ',' +
               fmt_double(row.qfi_ideal) + ',' + fmt_double(row.qfi_erased) + ',' +
               fmt_double(row.loss_ratio) + ',' +
               (row.epsilon_hat ? fmt_double(*row.epsilon_hat) : std::string()) + '\n';
    }
    return out;
}

std::string to_json(const SweepResult& r) {
    json j;
    j["config"] = config_json(r.config);
    j["metadata"] = {{"prng", channels::kPrngAlgorithm}, {"seed", r.config.seed}};
    j["rows"] = json::array();
    for (const auto& row : r.rows) j["rows"].push_back(row_json(row));
    return j.dump(2) + "\n";
}

std::string metadata_json(const SweepResult& r) {
    json j;
    j["config"] = config_json(r.config);
    j["prng"] = channels::kPrngAlgorithm;
    j["warnings"] = r.warnings;
    j["total_wall_time_s"] = r.total_wall_time_s;
    j["row_wall_times_s"] = json::array();
    for (const auto& row : r.rows) j["row_wall_times_s"].push_back(row.wall_time_s);
    return j.dump(2) + "\n";
}

void write_outputs(const SweepResult& r, const std::string& path) {
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << (r.config.format == Format::Csv ? to_csv(r) : to_json(r));
    }
    std::ofstream meta(path + ".meta.json", std::ios::binary);
    if (!meta) throw std::runtime_error("cannot open metadata file: " + path + ".meta.json");
    meta << metadata_json(r);
}

LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) {
        throw std::domain_error("fit_loglog_slope: need at least 3 points");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw std::domain_error("fit_loglog_slope: points must be strictly positive");
        }
        const double lx = std::log10(x), ly = std::log10(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(points.size());
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) {
        throw std::domain_error("fit_loglog_slope: degenerate abscissae");
    }
    LogLogFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (const auto& [x, y] : points) {
        const double ly = std::log10(y);
        const double pred = fit.slope * std::log10(x) + fit.intercept;
        ss_res += (ly - pred) * (ly - pred);
        ss_tot += (ly - mean_y) * (ly - mean_y);
    }
    fit.r_squared = (ss_tot > 0.0) ? std::max(0.0, 1.0 - ss_res / ss_tot)
                                   : (ss_res <= 1e-20 ? 1.0 : 0.0);
    return fit;
}

std::int64_t round_ties_down(double x) {
    const double f = std::floor(x);
    const double frac = x - f;
    if (frac > 0.5) return static_cast<std::int64_t>(f) + 1;
    return static_cast<std::int64_t>(f);
}

std::vector<std::int64_t> geometric_grid(std::int64_t lo, std::int64_t hi, int n) {
    if (n < 2 || lo < 1 || hi <= lo) {
        throw std::domain_error("geometric_grid: need n >= 2 and 1 <= lo < hi");
    }
    const double ratio = std::pow(static_cast<double>(hi) / lo, 1.0 / (n - 1));
    std::vector<std::int64_t> grid;
    for (int i = 0; i < n; ++i) {
        const std::int64_t v =
            round_ties_down(static_cast<double>(lo) * std::pow(ratio, i));
        if (grid.empty() || v > grid.back()) grid.push_back(v);
    }
    if (grid.back() != hi) grid.back() = hi;
    return grid;
}

}  // namespace su2qec::sweep
