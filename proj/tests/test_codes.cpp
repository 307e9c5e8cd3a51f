#include <cmath>
#include <random>

#include "doctest.h"
#include "su2qec/angmom.hpp"
#include "su2qec/codes.hpp"
#include "su2qec/errors.hpp"

using namespace su2qec;
using namespace su2qec::codes;

namespace {

HalfInt h(long long twice) { return HalfInt::from_twice(twice); }

channels::Matrix random_complex_matrix(int dim, std::mt19937_64& rng) {
    channels::Matrix m(dim, dim);
    std::normal_distribution<double> g;
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) m(r, c) = {g(rng), g(rng)};
    }
    return m;
}

}  // namespace

TEST_CASE("code spec bookkeeping") {
    const CodeSpec code(h(1), 8, HalfInt(4), HalfInt(-2), 2, 3);
    CHECK(code.M_max() == HalfInt(2));
    CHECK(code.codeword_m(1) == HalfInt(0));
    CHECK(code.theorem_spacing_ok(1));        // Delta=2 >= 2*(1/2)*1+1
    CHECK_FALSE(code.theorem_spacing_ok(2));  // needs 3
    CHECK_FALSE(code.multiset_spacing_ok(1)); // needs 3
    CHECK(code.logical_qubits() == doctest::Approx(std::log2(3.0)));
    CHECK_THROWS_AS(CodeSpec(h(1), 8, HalfInt(4), HalfInt(3), 2, 2), std::domain_error);
    CHECK_THROWS_AS(CodeSpec(h(1), 8, HalfInt(4), h(1), 2, 2), std::domain_error);
    CHECK_THROWS_AS(CodeSpec(h(1), 4, HalfInt(2), HalfInt(0), 0, 1), std::domain_error);
}

TEST_CASE("off-diagonal moments vanish at admissible spacing") {
    const CodeSpec code(h(1), 8, HalfInt(4), HalfInt(-2), 2, 3);
    std::mt19937_64 seeds(1234);
    for (int t = 0; t < 10; ++t) {
        const auto ch = channels::random_dlocal_channel(h(1), {3}, 4, seeds());
        CHECK(kl_offdiagonal_check(code, ch) <= 1e-12);
    }
    // identity channel: plain orthogonality
    const auto id = channels::KrausChannel::from_terms(
        h(1), {{std::vector<int>{0}, channels::Matrix::Identity(2, 2)}});
    CHECK(kl_offdiagonal_check(code, id) == 0.0);
}

TEST_CASE("spacing one exposes the ladder matrix element") {
    // {|up><up|, |up><down|}: the cross product K_1^dag K_0 is the site
    // lowering operator, whose codeword matrix element is c^+_M / N.
    channels::Matrix k0 = channels::Matrix::Zero(2, 2);
    channels::Matrix k1 = channels::Matrix::Zero(2, 2);
    k0(1, 1) = 1.0;
    k1(1, 0) = 1.0;
    const auto ch = channels::KrausChannel::from_terms(
        h(1), {{std::vector<int>{0}, k0}, {std::vector<int>{0}, k1}});
    const int N = 8;
    const CodeSpec code(h(1), N, HalfInt(4), HalfInt(0), 1, 2);  // {|4,0>, |4,1>}
    const double expected =
        angmom::ladder_coeff(HalfInt(4), HalfInt(0), angmom::LadderSign::Plus) / N;
    CHECK(kl_offdiagonal_check(code, ch) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(kl_offdiagonal_check(code, ch) > 0.0);
}

TEST_CASE("diagonal bound") {
    const CodeSpec code(h(1), 10, HalfInt(5), HalfInt(-2), 1, 5);

    SUBCASE("identity operator: both sides trivial") {
        const DLocalOperator f{{2}, channels::Matrix::Identity(2, 2)};
        const auto rep = kl_diagonal_bound_check(code, f);
        CHECK(rep.holds);
        for (const auto& p : rep.pairs) CHECK(p.lhs < 1e-14);
    }

    SUBCASE("q^z on one site: lhs is |n-m|/N exactly") {
        const DLocalOperator f{{0}, statevec::local_qz(h(1))};
        const auto rep = kl_diagonal_bound_check(code, f);
        CHECK(rep.holds);
        CHECK(rep.q0 == doctest::Approx(2.0));  // 2 ||q^+|| at s = 1/2
        for (const auto& p : rep.pairs) {
            const double gap = (p.M_hi - p.M_lo).value();
            CHECK(p.lhs == doctest::Approx(gap / 10.0).epsilon(1e-10));
        }
    }

    SUBCASE("random one- and two-site operators never violate the bound") {
        std::mt19937_64 rng(2024);
        for (int t = 0; t < 100; ++t) {
            const bool two = (t % 2 == 0);
            std::vector<int> sites =
                two ? std::vector<int>{static_cast<int>(rng() % 5),
                                       static_cast<int>(5 + rng() % 5)}
                    : std::vector<int>{static_cast<int>(rng() % 10)};
            const DLocalOperator f{sites, random_complex_matrix(two ? 4 : 2, rng)};
            const auto rep = kl_diagonal_bound_check(code, f);
            CHECK(rep.holds);
        }
    }
}

TEST_CASE("matrix fidelity") {
    using statevec::DensityMatrix;
    const auto rho = DensityMatrix::from_matrix(
        (channels::Matrix(2, 2) << 0.5, 0, 0, 0.5).finished());
    CHECK(matrix_fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));

    const auto sig = DensityMatrix::from_matrix(
        (channels::Matrix(2, 2) << 0.9, 0, 0, 0.1).finished());
    const double expected = std::sqrt(0.45) + std::sqrt(0.05);
    CHECK(matrix_fidelity(rho, sig) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(matrix_fidelity(sig, rho) == doctest::Approx(expected).epsilon(1e-12));

    // pure states: overlap modulus
    const auto a = statevec::dicke_state(h(1), 3, h(1));
    const auto b = statevec::probe_state(h(1), 3, h(1));
    const double ov = std::abs(a.amp().dot(b.amp()));
    CHECK(matrix_fidelity(DensityMatrix::pure(a), DensityMatrix::pure(b)) ==
          doctest::Approx(ov).epsilon(1e-10));

    CHECK_THROWS_AS(
        matrix_fidelity(rho.mat(),
                        (channels::Matrix(2, 2) << 2.0, 0, 0, -1.0).finished()),
        NumericsError);
}

TEST_CASE("generic inaccuracy") {
    SUBCASE("single codeword or identity channel give zero") {
        const CodeSpec one(h(1), 6, HalfInt(3), HalfInt(1), 2, 1);
        const auto ch = channels::random_dlocal_channel(h(1), {0}, 4, 5);
        CHECK(inaccuracy_generic(one, ch).epsilon_hat == 0.0);

        const CodeSpec code(h(1), 6, HalfInt(3), HalfInt(-1), 2, 2);
        const auto id = channels::KrausChannel::from_terms(
            h(1), {{std::vector<int>{0}, channels::Matrix::Identity(2, 2)}});
        CHECK(inaccuracy_generic(code, id).epsilon_hat < 1e-12);
    }

    SUBCASE("premise failure errors out") {
        const CodeSpec tight(h(1), 6, HalfInt(3), HalfInt(0), 1, 2);
        channels::Matrix k0 = channels::Matrix::Zero(2, 2), k1 = k0;
        k0(1, 1) = 1.0;
        k1(1, 0) = 1.0;
        const auto raising = channels::KrausChannel::from_terms(
            h(1), {{std::vector<int>{0}, k0}, {std::vector<int>{0}, k1}});
        CHECK_THROWS_AS(inaccuracy_generic(tight, raising), NumericsError);
    }

    SUBCASE("pinned seeded value and shrink with N") {
        std::vector<double> eps;
        for (const int N : {6, 8, 10, 12}) {
            const CodeSpec code(h(1), N, h(N), HalfInt(-2), 4, 2);
            const auto ch = channels::random_dlocal_channel(h(1), {0}, 4, 2718);
            const auto rep = inaccuracy_generic(code, ch);
            CHECK(rep.offdiag_residual <= 1e-12);
            CHECK(rep.fidelities.front() == doctest::Approx(1.0).epsilon(1e-12));
            eps.push_back(rep.epsilon_hat);
        }
        // regression pin from the first run at N = 10 (seed 2718)
        CHECK(eps[2] == doctest::Approx(0.29252050057043344).epsilon(1e-10));
        // non-increasing along the grid, one slack step allowed
        int violations = 0;
        for (std::size_t i = 1; i < eps.size(); ++i) {
            if (eps[i] > eps[i - 1] + 1e-12) ++violations;
        }
        CHECK(violations <= 1);
    }
}

TEST_CASE("erasure inaccuracy") {
    SUBCASE("two-codeword qubit example") {
        const CodeSpec code(h(1), 4, HalfInt(2), HalfInt(-2), 4, 2);
        const auto rep = inaccuracy_erasure(code, {0});
        CHECK(rep.epsilon_hat == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
        CHECK(rep.fidelities.size() == 2);
        CHECK(rep.fidelities[0] ==
              doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
        REQUIRE(rep.explicit_deviation.has_value());
        CHECK(*rep.explicit_deviation < 1e-8);
        CHECK_FALSE(rep.reference_substituted);
    }

    SUBCASE("degenerate single-codeword code") {
        const CodeSpec code(h(1), 4, HalfInt(2), HalfInt(0), 2, 1);
        const auto rep = inaccuracy_erasure(code, {1});
        CHECK(rep.epsilon_hat < 1e-12);
    }

    SUBCASE("half-integral ladder substitutes the reference") {
        const CodeSpec code(h(1), 5, h(5), h(-5), 5, 2);
        const auto rep = inaccuracy_erasure(code, {0});
        CHECK(rep.reference_substituted);
        CHECK(rep.reference_m == h(1));
        CHECK(rep.epsilon_hat > 0.0);
        CHECK(rep.epsilon_hat <= 1.0);
    }

    SUBCASE("spacing premise is enforced") {
        const CodeSpec code(h(1), 6, HalfInt(3), HalfInt(0), 1, 2);
        CHECK_THROWS_AS(inaccuracy_erasure(code, {0}), std::domain_error);
    }

    SUBCASE("explicit and coefficient routes agree across s") {
        for (const HalfInt s : {h(1), HalfInt(1)}) {
            for (int N = 4; N <= (s.twice() == 1 ? 8 : 6); N += 2) {
                const HalfInt J = s * N;
                const CodeSpec code(s, N, J, -J, static_cast<int>(J.twice()), 2);
                for (int d = 1; d <= 2 && s.twice() * d + 1 <= code.delta; ++d) {
                    std::vector<int> sites(d);
                    for (int i = 0; i < d; ++i) sites[i] = N - 1 - i;
                    const auto rep = inaccuracy_erasure(code, sites);
                    REQUIRE(rep.explicit_deviation.has_value());
                    CHECK(*rep.explicit_deviation < 1e-8);
                }
            }
        }
    }

    SUBCASE("reduction fidelity is even in M") {
        CHECK(erased_fidelity(h(1), 8, HalfInt(2), HalfInt(0), 2) ==
              doctest::Approx(erased_fidelity(h(1), 8, HalfInt(-2), HalfInt(0), 2))
                  .epsilon(1e-14));
    }
}
