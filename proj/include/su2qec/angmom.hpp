#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "su2qec/half_int.hpp"

namespace su2qec::angmom {

// Exact arithmetic backing for the binomial identities; nonnegative by use.
using BigUInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

enum class LadderSign { Plus, Minus };

// c^+_M = sqrt((J-M)(J+M+1)),  c^-_M = sqrt((J+M)(J-M+1)).
// Zero exactly at the annihilated boundary (M = J for plus, M = -J for minus).
double ladder_coeff(HalfInt J, HalfInt M, LadderSign sign);

// C(n, m) = sum_{M=n}^{m-1} 1/c^+_M. Empty sum (n == m) is 0.
// Every summand must have c^+_M > 0, i.e. m <= J is required.
double ladder_inverse_sum(HalfInt J, HalfInt n, HalfInt m);

// ln(n!) from a lazily grown, concurrently readable table. Accumulated with
// compensated long-double summation so differences of large entries stay
// accurate to ~1e-13 absolute up to n ~ 1e6.
long double log_factorial(std::int64_t n);

// ln C(n, k); domain error unless 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

// Exact C(n, k) (0 when k is out of [0, n]).
BigUInt exact_binomial(std::int64_t n, std::int64_t k);

// sum_{r=0}^{2 j1} C(2 j1, r) r^p, exact, for p in 0..4.
BigUInt binomial_moment(HalfInt j1, int p);

// Coupling coefficient <j1 m1; j2 m2 | J M> in the maximal (stretched) case
// j2 = J - j1, m2 = M - m1:
//
//   sqrt( C(2j1, j1+m1) C(2j2, j2+m2) / C(2J, J+M) )
//
// Nonnegative. Vanishing numerator binomials (m1 or m2 off the ladder range)
// yield 0 rather than an error. Dispatches to exact big-rational arithmetic
// for 2J <= 400 and to log-factorials beyond; both paths are exposed for
// cross-validation.
double stretched_cg(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1);
double stretched_cg_log(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1);
double stretched_cg_exact(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1);
// Squared coefficient as an exact rational (exact path only).
BigRational stretched_cg_exact_sq(HalfInt J, HalfInt M, HalfInt j1, HalfInt m1);

// sum_{m1} <J Ma | j1 m1> <J Mb | j1 m1>  over the shared j1 ladder; this is
// the fidelity between the rank-(2j1+1) diagonal reduced states of |J,Ma> and
// |J,Mb> after keeping a subsystem of total spin j1.
double cg_overlap_sum(HalfInt J, HalfInt Ma, HalfInt Mb, HalfInt j1);

// Threshold (in 2J) below which the exact big-rational CG path is used.
inline constexpr long long kExactCgTwiceJMax = 400;

}  // namespace su2qec::angmom
