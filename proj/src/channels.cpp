#include "su2qec/channels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "su2qec/errors.hpp"

namespace su2qec::channels {

namespace {

constexpr double kCompletenessTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kHermTol = 1e-12;
constexpr double kPsdTol = 1e-10;

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Lift an operator from `from` sites to the superset `to` (identity on the
// extra sites), preserving the digit convention.
Matrix lift_operator(const Matrix& op, const std::vector<int>& from,
                     const std::vector<int>& to, int q) {
    const std::int64_t dto = ipow(q, static_cast<int>(to.size()));
    // Position of each `from` site inside `to`, plus the free positions.
    std::vector<int> pos;
    for (int sfrom : from) {
        const auto it = std::find(to.begin(), to.end(), sfrom);
        if (it == to.end()) throw DimensionError("lift_operator: site set not contained");
        pos.push_back(static_cast<int>(it - to.begin()));
    }
    std::vector<std::int64_t> stride(to.size());
    for (std::size_t i = 0; i < to.size(); ++i) stride[i] = ipow(q, static_cast<int>(i));

    Matrix out = Matrix::Zero(dto, dto);
    const std::int64_t dfrom = op.rows();
    // Enumerate assignments of the free digits; scatter op into the block.
    std::vector<int> free_pos;
    for (std::size_t i = 0; i < to.size(); ++i) {
        if (std::find(pos.begin(), pos.end(), static_cast<int>(i)) == pos.end()) {
            free_pos.push_back(static_cast<int>(i));
        }
    }
    const std::int64_t nfree = ipow(q, static_cast<int>(free_pos.size()));
    std::vector<std::int64_t> from_off(dfrom);
    for (std::int64_t t = 0; t < dfrom; ++t) {
        std::int64_t rem = t, o = 0;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            o += (rem % q) * stride[pos[i]];
            rem /= q;
        }
        from_off[t] = o;
    }
    for (std::int64_t f = 0; f < nfree; ++f) {
        std::int64_t rem = f, base = 0;
        for (std::size_t i = 0; i < free_pos.size(); ++i) {
            base += (rem % q) * stride[free_pos[i]];
            rem /= q;
        }
        for (std::int64_t a = 0; a < dfrom; ++a) {
            for (std::int64_t b = 0; b < dfrom; ++b) {
                out(base + from_off[a], base + from_off[b]) = op(a, b);
            }
        }
    }
    return out;
}

void check_term_sites(const KrausTerm& term, int q) {
    if (term.sites.empty()) throw std::domain_error("KrausTerm: empty site set");
    for (std::size_t i = 1; i < term.sites.size(); ++i) {
        if (term.sites[i] <= term.sites[i - 1]) {
            throw std::domain_error("KrausTerm: sites must be ascending and distinct");
        }
    }
    if (term.sites.front() < 0) throw std::domain_error("KrausTerm: negative site");
    const std::int64_t d = ipow(q, static_cast<int>(term.sites.size()));
    if (term.op.rows() != d || term.op.cols() != d) {
        throw DimensionError("KrausTerm: operator size does not match site set");
    }
}

}  // namespace

KrausChannel KrausChannel::from_terms(HalfInt s, std::vector<KrausTerm> terms,
                                      std::optional<ChannelMeta> meta) {
    if (terms.empty()) throw std::domain_error("KrausChannel: no terms");
    const int q = static_cast<int>(s.twice()) + 1;
    for (const auto& t : terms) check_term_sites(t, q);

    std::set<int> uset;
    for (const auto& t : terms) uset.insert(t.sites.begin(), t.sites.end());
    const std::vector<int> uni(uset.begin(), uset.end());

    const std::int64_t du = ipow(q, static_cast<int>(uni.size()));
    Matrix acc = Matrix::Zero(du, du);
    for (const auto& t : terms) {
        const Matrix lifted = lift_operator(t.op, t.sites, uni, q);
        acc += lifted.adjoint() * lifted;
    }
    if ((acc - Matrix::Identity(du, du)).cwiseAbs().maxCoeff() > kCompletenessTol) {
        throw NumericsError("KrausChannel: completeness residual above 1e-10");
    }
    // n_d bound for the shared-site-set case
    bool single = true;
    for (const auto& t : terms) single = single && (t.sites == terms.front().sites);
    if (single) {
        const std::int64_t nd_max =
            ipow(q, 2 * static_cast<int>(terms.front().sites.size()));
        if (static_cast<std::int64_t>(terms.size()) > nd_max) {
            throw std::domain_error("KrausChannel: more terms than (2s+1)^(2d)");
        }
    }
    return KrausChannel(s, std::move(terms), std::move(meta));
}

int KrausChannel::locality() const {
    std::size_t d = 0;
    for (const auto& t : terms_) d = std::max(d, t.sites.size());
    return static_cast<int>(d);
}

bool KrausChannel::single_site_set() const {
    for (const auto& t : terms_) {
        if (t.sites != terms_.front().sites) return false;
    }
    return true;
}

std::vector<int> KrausChannel::site_union() const {
    std::set<int> u;
    for (const auto& t : terms_) u.insert(t.sites.begin(), t.sites.end());
    return {u.begin(), u.end()};
}

MomentMatrix MomentMatrix::from_matrix(Matrix m) {
    if (m.rows() != m.cols()) throw DimensionError("MomentMatrix: not square");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermTol) {
        throw NumericsError("MomentMatrix: not Hermitian within 1e-12");
    }
    if (std::abs(m.trace().real() - 1.0) > kTraceTol ||
        std::abs(m.trace().imag()) > kTraceTol) {
        throw NumericsError("MomentMatrix: trace deviates from 1 beyond 1e-10");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol) {
        throw NumericsError("MomentMatrix: eigenvalue below -1e-10");
    }
    return MomentMatrix(std::move(m));
}

DensityMatrix apply_kraus(const DensityMatrix& rho, const KrausChannel& ch) {
    if (!rho.reg()) throw DimensionError("apply_kraus: density matrix has no register");
    const auto& reg = *rho.reg();
    if (reg.s != ch.s()) throw DimensionError("apply_kraus: spin mismatch");
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (const auto& term : ch.terms()) {
        if (term.sites.back() >= reg.N) {
            throw DimensionError("apply_kraus: channel site outside register");
        }
        // K rho K^dagger = (K (K rho)^dagger)^dagger
        Matrix a(rho.dim(), rho.dim());
        for (std::int64_t c = 0; c < rho.dim(); ++c) {
            a.col(c) = statevec::apply_on_sites(rho.mat().col(c), term.op, term.sites, reg);
        }
        Matrix b = a.adjoint();
        for (std::int64_t c = 0; c < rho.dim(); ++c) {
            b.col(c) = statevec::apply_on_sites(Vector(b.col(c)), term.op, term.sites, reg);
        }
        out += b.adjoint();
    }
    if (std::abs(out.trace().real() - 1.0) > kTraceTol) {
        throw NumericsError("apply_kraus: trace not preserved within 1e-10");
    }
    return DensityMatrix::from_matrix(std::move(out), reg);
}

std::vector<Vector> apply_all_kraus(const StateVector& psi, const KrausChannel& ch) {
    const auto& reg = psi.reg();
    if (reg.s != ch.s()) throw DimensionError("apply_all_kraus: spin mismatch");
    std::vector<Vector> out;
    out.reserve(ch.terms().size());
    for (const auto& term : ch.terms()) {
        if (term.sites.back() >= reg.N) {
            throw DimensionError("apply_all_kraus: channel site outside register");
        }
        out.push_back(statevec::apply_on_sites(psi.amp(), term.op, term.sites, reg));
    }
    return out;
}

MomentMatrix complementary_moment_matrix(const StateVector& codeword,
                                         const KrausChannel& ch) {
    const auto images = apply_all_kraus(codeword, ch);
    const int n = static_cast<int>(images.size());
    Matrix sigma(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            sigma(i, j) = images[i].dot(images[j]);  // conjugates the left factor
            sigma(j, i) = std::conj(sigma(i, j));
        }
    }
    return MomentMatrix::from_matrix(std::move(sigma));
}

namespace {

// Box-Muller on mt19937_64 output; avoids the implementation-defined
// std::normal_distribution so seeds reproduce across standard libraries.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

  private:
    double uniform() {
        return (rng_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_ = false;
};

}  // namespace

KrausChannel random_dlocal_channel(HalfInt s, const std::vector<int>& sites,
                                   int n_kraus, std::uint64_t seed) {
    if (sites.empty()) throw std::domain_error("random_dlocal_channel: empty site set");
    const int q = static_cast<int>(s.twice()) + 1;
    const int d = static_cast<int>(sites.size());
    const std::int64_t D = ipow(q, d);
    const std::int64_t nd_max = ipow(q, 2 * d);
    if (n_kraus < 1 || n_kraus > nd_max) {
        throw std::domain_error("random_dlocal_channel: n_kraus outside 1..(2s+1)^(2d)");
    }
    GaussianStream g(seed);
    Matrix stacked(n_kraus * D, D);
    for (std::int64_t r = 0; r < stacked.rows(); ++r) {
        for (std::int64_t c = 0; c < D; ++c) {
            stacked(r, c) = Complex(g.next(), g.next());
        }
    }
    // Thin QR; fixing the R diagonal to be positive makes Q unique, hence
    // bit-stable for a given Gaussian draw.
    Eigen::HouseholderQR<Matrix> qr(stacked);
    Matrix thin_q = qr.householderQ() * Matrix::Identity(stacked.rows(), D);
    const Matrix r_full = qr.matrixQR().topRows(D).triangularView<Eigen::Upper>();
    for (std::int64_t c = 0; c < D; ++c) {
        const Complex rd = r_full(c, c);
        if (std::abs(rd) > 0) thin_q.col(c) *= std::conj(rd) / std::abs(rd);
    }
    std::vector<KrausTerm> terms;
    std::vector<int> sorted = sites;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n_kraus; ++i) {
        terms.push_back({sorted, thin_q.middleRows(i * D, D)});
    }
    return KrausChannel::from_terms(s, std::move(terms), ChannelMeta{seed});
}

KrausChannel random_multiset_channel(HalfInt s,
                                     const std::vector<std::vector<int>>& site_sets,
                                     int n_kraus_per_set, std::uint64_t seed) {
    if (site_sets.empty()) throw std::domain_error("random_multiset_channel: no site sets");
    const double p = 1.0 / static_cast<double>(site_sets.size());
    std::vector<KrausTerm> terms;
    for (std::size_t t = 0; t < site_sets.size(); ++t) {
        const auto part = random_dlocal_channel(
            s, site_sets[t], n_kraus_per_set,
            seed ^ (0x9e3779b97f4a7c15ull * (t + 1)));
        for (const auto& term : part.terms()) {
            terms.push_back({term.sites, std::sqrt(p) * term.op});
        }
    }
    return KrausChannel::from_terms(s, std::move(terms), ChannelMeta{seed});
}

}  // namespace su2qec::channels
