#include "su2qec/angmom.hpp"

#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

#include "su2qec/errors.hpp"

namespace su2qec::angmom {

namespace {

void require_ladder(HalfInt J, HalfInt M, const char* who) {
    if (J.is_negative()) throw std::domain_error(std::string(who) + ": J < 0");
    if (M.abs() > J) {
        throw std::domain_error(std::string(who) + ": |M| > J (J=" + J.str() +
                                ", M=" + M.str() + ")");
    }
    if (!same_ladder(J, M)) {
        throw std::domain_error(std::string(who) + ": M=" + M.str() +
                                " not on the J=" + J.str() + " ladder");
    }
}

// Lazily grown ln(n!) table. Entries are appended under an exclusive lock
// with Kahan-compensated long-double accumulation and never modified after
// publication, so shared-lock readers always see finished values.
class LogFactorialTable {
  public:
    long double at(std::int64_t n) {
        {
            std::shared_lock lk(mu_);
            if (static_cast<std::size_t>(n) < table_.size()) return table_[n];
        }
        std::unique_lock lk(mu_);
        while (table_.size() <= static_cast<std::size_t>(n)) {
            const long double term = std::log(static_cast<long double>(table_.size()));
            const long double y = term - comp_;
            const long double t = sum_ + y;
            comp_ = (t - sum_) - y;
            sum_ = t;
            table_.push_back(sum_);
        }
        return table_[n];
    }

  private:
    std::shared_mutex mu_;
    std::vector<long double> table_{0.0L};  // ln(0!) = 0
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

LogFactorialTable& lf_table() {
    static LogFactorialTable table;
    return table;
}

long double log_binomial_l(std::int64_t n, std::int64_t k) {
    return lf_table().at(n) - lf_table().at(k) - lf_table().at(n - k);
}

struct CgBinomials {
    // C(n1,k1) * C(n2,k2) / C(n3,k3), all indices in ordinary (not twice) units.
    std::int64_t n1, k1, n2, k2, n3, k3;
    bool vanishes;  // a numerator lower index fell outside [0, n]
};

CgBinomials cg_binomials(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1) {
    if (J.is_negative() || j1.is_negative()) {
        throw std::domain_error("stretched_cg: negative spin");
    }
    const HalfInt j2 = J - j1;
    if (j2.is_negative()) {
        throw std::domain_error("stretched_cg: j1=" + j1.str() + " exceeds J=" + J.str());
    }
    require_ladder(J, M, "stretched_cg");
    if (!same_ladder(j1, m1)) {
        throw std::domain_error("stretched_cg: m1=" + m1.str() +
                                " not on the j1=" + j1.str() + " ladder");
    }
    CgBinomials b{};
    b.n1 = j1.twice();
    b.k1 = (j1 + m1).twice() / 2;
    b.n2 = j2.twice();
    b.k2 = (j2 + (M - m1)).twice() / 2;
    b.n3 = J.twice();
    b.k3 = (J + M).twice() / 2;
    b.vanishes = (b.k1 < 0 || b.k1 > b.n1 || b.k2 < 0 || b.k2 > b.n2);
    return b;
}

}  // namespace

double ladder_coeff(HalfInt J, HalfInt M, LadderSign sign) {
    require_ladder(J, M, "ladder_coeff");
    // (J -+ M)(J +- M + 1) in quarter units: twice-values give 4x the product.
    const long long a = (sign == LadderSign::Plus) ? (J - M).twice() : (J + M).twice();
    const long long b = (sign == LadderSign::Plus) ? (J + M).twice() + 2
                                                   : (J - M).twice() + 2;
    return std::sqrt(static_cast<double>(a) * static_cast<double>(b)) / 2.0;
}

double ladder_inverse_sum(HalfInt J, HalfInt n, HalfInt m) {
    if (n > m) throw std::domain_error("ladder_inverse_sum: n > m");
    require_ladder(J, n, "ladder_inverse_sum");
    if (!same_ladder(n, m)) {
        throw std::domain_error("ladder_inverse_sum: n and m on different ladders");
    }
    if (m > J) {
        throw std::domain_error(
            "ladder_inverse_sum: summand with c^+ = 0 (m > J)");
    }
    double total = 0.0;
    for (HalfInt M = n; M < m; M += HalfInt(1)) {
        total += 1.0 / ladder_coeff(J, M, LadderSign::Plus);
    }
    return total;
}

long double log_factorial(std::int64_t n) {
    if (n < 0) throw std::domain_error("log_factorial: n < 0");
    return lf_table().at(n);
}

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) throw std::domain_error("log_binomial: k outside [0, n]");
    return static_cast<double>(log_binomial_l(n, k));
}

BigUInt exact_binomial(std::int64_t n, std::int64_t k) {
    if (n < 0) throw std::domain_error("exact_binomial: n < 0");
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigUInt c = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        c *= (n - k + i);
        c /= i;  // exact: C(n-k+i, i) is integral
    }
    return c;
}

BigUInt binomial_moment(HalfInt j1, int p) {
    if (p < 0 || p > 4) throw std::domain_error("binomial_moment: p outside 0..4");
    if (j1.is_negative()) throw std::domain_error("binomial_moment: j1 < 0");
    const std::int64_t n = j1.twice();  // = 2 j1, integral by HalfInt construction
    BigUInt total = 0;
    for (std::int64_t r = 0; r <= n; ++r) {
        BigUInt rp = 1;
        for (int q = 0; q < p; ++q) rp *= r;
        total += exact_binomial(n, r) * rp;
    }
    return total;
}

double stretched_cg_log(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1) {
    const CgBinomials b = cg_binomials(J, M, j1, m1);
    if (b.vanishes) return 0.0;
    const long double lg = log_binomial_l(b.n1, b.k1) + log_binomial_l(b.n2, b.k2) -
                           log_binomial_l(b.n3, b.k3);
    return static_cast<double>(std::exp(0.5L * lg));
}

BigRational stretched_cg_exact_sq(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1) {
    const CgBinomials b = cg_binomials(J, M, j1, m1);
    if (b.vanishes) return 0;
    return BigRational(exact_binomial(b.n1, b.k1) * exact_binomial(b.n2, b.k2),
                       exact_binomial(b.n3, b.k3));
}

double stretched_cg_exact(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1) {
    return std::sqrt(static_cast<double>(stretched_cg_exact_sq(J, M, j1, m1)));
}

double stretched_cg(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1) {
    if (J.twice() <= kExactCgTwiceJMax) return stretched_cg_exact(J, M, j1, m1);
    return stretched_cg_log(J, M, j1, m1);
}

double cg_overlap_sum(HalfInt J, HalfInt Ma, HalfInt Mb, HalfInt j1) {
    require_ladder(J, Ma, "cg_overlap_sum");
    require_ladder(J, Mb, "cg_overlap_sum");
    double total = 0.0;
    for (HalfInt m1 = -j1; m1 <= j1; m1 += HalfInt(1)) {
        total += stretched_cg(J, Ma, j1, m1) * stretched_cg(J, Mb, j1, m1);
    }
    return total;
}

}  // namespace su2qec::angmom
