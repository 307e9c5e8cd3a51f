#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "su2qec/half_int.hpp"

namespace su2qec::sweep {

enum class Mode { Fig2, ErasureEps, GenericEps };

enum class Format { Csv, Json };

// One experiment family:
//   fig2        — QFI loss of the erased probe along a geometric J grid,
//                 with M ~ J^b and d ~ N^c (closed-form path).
//   erasure_eps — erasure inaccuracy of a fixed ladder code along an N grid.
//   generic_eps — generic-noise inaccuracy (explicit vectors) along an N grid.
struct SweepConfig {
    Mode mode = Mode::Fig2;
    HalfInt s = HalfInt::from_twice(1);
    double a = 1.0;  // J ~ N^a (bookkeeping only; grids are explicit)
    double b = 2.0 / 3.0;
    double c = 0.25;
    std::vector<std::int64_t> grid;  // J values (fig2) or N values (eps modes)
    // eps-mode code family
    HalfInt m_max = HalfInt(2);
    int delta = 2;
    int count = 3;
    int d = 1;
    int n_kraus = 4;  // generic mode
    std::uint64_t seed = 0;
    std::string out;  // empty = stdout
    Format format = Format::Csv;

    void validate() const;
};

struct SweepRow {
    HalfInt J;
    std::int64_t N = 0;
    HalfInt M;
    int d = 0;
    double qfi_ideal = 0.0;
    double qfi_erased = 0.0;
    double loss_ratio = 0.0;
    std::optional<double> epsilon_hat;
    double wall_time_s = 0.0;  // segregated into the metadata file on output
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepRow> rows;
    std::vector<std::string> warnings;  // skipped points, etc.
    double total_wall_time_s = 0.0;
};

// Deterministic for a fixed config+seed; grid points are evaluated in
// parallel and assembled in grid order.
SweepResult run_sweep(const SweepConfig& config);

// Fixed-column CSV (no timing): J,N,M,d,qfi_ideal,qfi_erased,loss_ratio,epsilon_hat
std::string to_csv(const SweepResult& r);
// CSV schema as JSON rows plus config echo and PRNG metadata (no timing).
std::string to_json(const SweepResult& r);
// Wall times and warnings, kept out of the main artifact so that byte-level
// reproducibility of the data holds.
std::string metadata_json(const SweepResult& r);

// Writes the data file and `<path>.meta.json` next to it.
void write_outputs(const SweepResult& r, const std::string& path);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares on (log10 x, log10 y); needs >= 3 strictly positive
// points.
LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

// Nearest integer with ties toward smaller magnitude (the documented
// rounding rule for M and d schedules).
std::int64_t round_ties_down(double x);

// Geometric grid from lo to hi inclusive with n points (rounded to integers).
std::vector<std::int64_t> geometric_grid(std::int64_t lo, std::int64_t hi, int n);

}  // namespace su2qec::sweep
