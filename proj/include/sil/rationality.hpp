#pragma once
// rational structure behind nearly-monomial phase data: brute-force q
// certificates for polynomial phases, cube search over pair sets, s-fold
// corner reduction, and a desk-scale solver plus planted generator for the
// relation || n1^s alpha2(n2) - n2^s alpha1(n1) || <= eps on [P, 2P].
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sil/arith.hpp"
#include "sil/phases.hpp"

namespace sil {

// q together with ||q P||_{C^inf(I)}; recomputable from (q, phase, window)
struct RationalityCertificate {
    int64_t q = 1;
    double smoothness = 0.0;
};

// scan q = 1..q_max for the scaled phase of smallest C^inf norm over w.
// hit_set only witnesses where ||P(n)|| was observed small and must lie in
// w; ties go to the smaller q, and a worst q still gets its certificate
RationalityCertificate vinogradov_solve(const PolyPhase& phase, Window w,
                                        const std::vector<int64_t>& hit_set, int64_t q_max,
                                        int threads = 1);

struct CubeResult {
    std::vector<int64_t> h;  // one entry per cube dimension, each in [1, H]
    int64_t count = 0;       // pairs whose full corner set stays in the pair set
};

// maximize #{(n1,n2) in N : (n1, n2 + omega.h) in N for all omega in {0,1}^s}
// over h in [1, H]^s. Exhaustive in lexicographic order when H^s <= budget,
// otherwise budget seeded random draws plus one coordinate-descent polish;
// output is identical for every thread count
CubeResult find_cube(const std::vector<std::pair<int64_t, int64_t>>& pairs, int64_t H, int s,
                     uint64_t budget = 1u << 18, int threads = 1);

// exact alternating corner sum sum_omega (-1)^{s-|omega|} (n20 + omega.h)^s
// over {0,1}^s with s = h.size(), evaluated in 128-bit integers; identically
// equal to s! h_1 ... h_s
int64_t s_fold_alternating_sum(int64_t n20, const std::vector<int64_t>& h);

struct SFoldResult {
    int64_t h_scalar = 0;  // s! h_1 ... h_s
    double beta = 0.0;     // alternating corner sum of the alpha values, mod 1
};

// alternating corner sum of alpha2 (support/values as parallel sorted arrays)
// at column n20, with the integer corner identity verified exactly; throws
// parameter_error when a needed corner is missing from the support
SFoldResult s_fold_reduce(const std::vector<int64_t>& support, const std::vector<double>& values,
                          int64_t n20, const std::vector<int64_t>& h);

// phase data on [P, 2P]: alpha_i on S_i as parallel arrays (values mod 1 in
// [-1/2, 1/2)), the pair set where the monomial relation holds to epsilon,
// and the claimed density eta with |pairs| >= eta P^2
struct ContagionInstance {
    int64_t P = 4;
    int s = 1;
    std::vector<int64_t> S1, S2;
    std::vector<double> alpha1, alpha2;
    double epsilon = 0.0;
    double eta = 0.0;
    std::vector<std::pair<int64_t, int64_t>> pairs;  // lexicographically sorted
};

struct ContagionSolution {
    double alpha_star = 0.0;
    int64_t q = 1;
    int64_t satisfied = 0;
    double tol_factor = 100.0;
    double tolerance = 0.0;  // tol_factor * epsilon / P^s, echoed into outputs
};

// generated instance with the planted truth kept alongside
struct ContagionPlant {
    ContagionInstance instance;
    double alpha_star = 0.0;  // quantized to 26 dyadic bits before use
    int64_t q = 1;
};

// max over pairs of || n1^s alpha2(n2) - n2^s alpha1(n1) ||
double contagion_defect(const ContagionInstance& inst);

// shape, membership, defect <= epsilon and |pairs| >= eta P^2; throws
// parameter_error with the failed condition
void validate_contagion_instance(const ContagionInstance& inst);

// per-pair flags for || q (alpha_i(n_i) - alpha_star n_i^s) || <= tol on both
// sides; the satisfied count of a solution is the popcount of its mask
std::vector<char> contagion_satisfied_mask(const ContagionInstance& inst, int64_t q,
                                           double alpha_star, double tol);

// cube -> s-fold reduction at a pigeonholed column -> q certificate for
// beta n^s over S1 -> ascending q scan with a finite-difference ladder for
// q alpha* -> local 1-D polish. Maximizes the satisfied count, ties to the
// smaller q; degenerate inputs degrade to a small satisfied count
ContagionSolution contagion_solve(const ContagionInstance& inst, int64_t q_max = 10000,
                                  double tol_factor = 100.0, int threads = 1);

// instance on S1 = S2 = [P, 2P] with alpha_i(n) = alpha* n^s + noise, a
// constant offset c/q planted on half of S2, and the pair set restricted so
// the hypothesis holds by construction; epsilon = 0 demands a power-of-two q
// and (2P)^s <= 2^26 so every stored value and residual is exact
ContagionPlant plant_contagion_instance(int64_t P, int s, double eta, double epsilon, int64_t q,
                                        double alpha_star, uint64_t seed);

// sets as sorted arrays, maps and pair coordinates as parallel arrays
std::string contagion_instance_json(const ContagionInstance& inst);
ContagionInstance contagion_instance_from_json(const std::string& text);
std::string contagion_solution_json(const ContagionSolution& sol);

}  // namespace sil
