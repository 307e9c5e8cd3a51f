#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "su2qec/half_int.hpp"
#include "su2qec/statevec.hpp"

namespace su2qec::channels {

using statevec::Complex;
using statevec::DensityMatrix;
using statevec::Matrix;
using statevec::QuditRegister;
using statevec::StateVector;
using statevec::Vector;

// Stable PRNG pipeline identifier echoed into output metadata.
inline constexpr const char* kPrngAlgorithm = "mt19937_64/box-muller/householder-qr";

struct ChannelMeta {
    std::uint64_t seed = 0;
    std::string algorithm = kPrngAlgorithm;
};

// One Kraus operator together with the (ascending) site set it acts on.
struct KrausTerm {
    std::vector<int> sites;
    Matrix op;  // (2s+1)^|sites| square, digit a <-> sites[a], sites[0] fastest
};

// A channel with d-local Kraus operators. All terms usually share one site
// set; terms on different sets are allowed (the completeness condition is
// then checked on the union embedding).
class KrausChannel {
  public:
    static KrausChannel from_terms(HalfInt s, std::vector<KrausTerm> terms,
                                   std::optional<ChannelMeta> meta = {});

    HalfInt s() const { return s_; }
    const std::vector<KrausTerm>& terms() const { return terms_; }
    const std::optional<ChannelMeta>& meta() const { return meta_; }
    int n_kraus() const { return static_cast<int>(terms_.size()); }
    // Largest per-term locality d.
    int locality() const;
    bool single_site_set() const;
    // Union of all term site sets, ascending.
    std::vector<int> site_union() const;

  private:
    KrausChannel(HalfInt s, std::vector<KrausTerm> terms, std::optional<ChannelMeta> meta)
        : s_(s), terms_(std::move(terms)), meta_(std::move(meta)) {}
    HalfInt s_;
    std::vector<KrausTerm> terms_;
    std::optional<ChannelMeta> meta_;
};

// Hermitian, PSD, trace-one matrix of codeword moments
// Sigma_ij = <psi| K_i^dagger K_j |psi>.
class MomentMatrix {
  public:
    static MomentMatrix from_matrix(Matrix m);
    const Matrix& mat() const { return mat_; }
    std::int64_t dim() const { return mat_.rows(); }

  private:
    explicit MomentMatrix(Matrix m) : mat_(std::move(m)) {}
    Matrix mat_;
};

// sum_i K_i rho K_i^dagger, with each K_i embedded on its site set.
DensityMatrix apply_kraus(const DensityMatrix& rho, const KrausChannel& ch);

// K_i |psi> for every term, as raw vectors (the workhorse for moment and
// Knill-Laflamme computations).
std::vector<Vector> apply_all_kraus(const StateVector& psi, const KrausChannel& ch);

// Sigma_ij = <psi|K_i^dagger K_j|psi> for an explicit codeword.
MomentMatrix complementary_moment_matrix(const StateVector& codeword,
                                         const KrausChannel& ch);

// n_kraus Kraus operators on one site set, drawn by QR-orthonormalizing a
// stacked complex Gaussian block so completeness holds by construction.
// Deterministic for a fixed seed.
KrausChannel random_dlocal_channel(HalfInt s, const std::vector<int>& sites,
                                   int n_kraus, std::uint64_t seed);

// Equal-weight mixture of independent per-set random channels; Kraus
// operators act on different site sets (the Corollary-style noise model).
KrausChannel random_multiset_channel(HalfInt s,
                                     const std::vector<std::vector<int>>& site_sets,
                                     int n_kraus_per_set, std::uint64_t seed);

}  // namespace su2qec::channels
