#pragma once

// Seeded generators for randomized checks: palette rationals, ambient
// operators, exactly majorized pairs via flag averaging, weakly majorized
// positive pairs, majorized vectors via T-transform mixing, doubly
// stochastic matrices, and dense symmetric matrices. All draws come straight
// from the raw engine so equal seeds give equal objects everywhere.

#include <random>
#include <utility>
#include <vector>

#include "opmaj/finite.hpp"
#include "opmaj/majorize.hpp"
#include "opmaj/spectral.hpp"

namespace opmaj {

using Rng = std::mt19937_64;

// Uniform in [0, 1) from the top 53 bits.
double runif(Rng& rng);
// Uniform integer in [lo, hi].
long long rint_in(Rng& rng, long long lo, long long hi);
// num/den with den in 1..max_den and |value| <= max_abs.
Rat rand_rat(Rng& rng, long long max_abs = 3, long long max_den = 8);
// Same restricted to [0, max_abs].
Rat rand_rat_nonneg(Rng& rng, long long max_abs = 3, long long max_den = 8);

// 2..5 finite atoms plus 1..2 infinite ones; positive forces values >= 0
// with an infinite atom at 0.
StepOperator rand_ambient(Rng& rng, bool positive);

// Trace-weighted block averages of consecutive finite atoms; infinite atoms
// are kept as separators, so the result is exactly majorized by op.
StepOperator flag_average(const StepOperator& op);

// (a, b) with a exactly majorized by b.
std::pair<StepOperator, StepOperator> rand_majorized_pair(Rng& rng);
// Positive (a, b) with a weakly majorized by b.
std::pair<StepOperator, StepOperator> rand_weak_pair(Rng& rng);

// Up to max_values distinct palette values; total finite multiplicity at
// most max_total; ambient adds an infinite entry.
Profile rand_profile(Rng& rng, long long max_values, long long max_total,
                     bool ambient);

std::vector<Rat> rand_vec(Rng& rng, std::size_t n, bool nonneg);

// (x, y) with x = D y for a product of random exact T-transforms, so
// vec_majorizes(x, y) holds exactly.
std::pair<std::vector<Rat>, std::vector<Rat>> rand_vec_majorized(Rng& rng,
                                                                 std::size_t n);

// Nonnegative (f, g) with vec_submajorizes(f, g), sizes p and q.
std::pair<std::vector<Rat>, std::vector<Rat>> rand_vec_weak(Rng& rng,
                                                            std::size_t p,
                                                            std::size_t q);

// Convex combination of at most terms random permutations, exact.
RatMat rand_doubly_stochastic(Rng& rng, std::size_t n, int terms);

// Dense symmetric with entries in [-1, 1].
Mat rand_symmetric(Rng& rng, std::size_t n);

}  // namespace opmaj
