#pragma once
// Combinatorial decompositions of Lambda, mu and d_k into convolutions of
// dyadically supported factors, plus the support-based classification into
// type I / type I_2 / type II forms, a prime-window bilinear split and a
// Turan-Kubilius style concentration check for short intervals.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sil/arith.hpp"

namespace sil {

// Thrown when a support tuple fits none of the three classification cases.
// With theta >= 1/3 the case analysis is provably total, so seeing this
// means the exponents were not produced by the generator's bookkeeping.
struct classification_error : std::runtime_error {
    explicit classification_error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class factor_kind {
    unit,           // a(n) = 1 on the block
    log_weight,     // a(n) = log n on the block
    mobius_block,   // a(n) = mu(n) on the block
    explicit_seq,   // arbitrary values carried alongside
};

// One convolution factor supported on the dyadic block (2^{e-1}, 2^e];
// e = 0 means the singleton {1}.  explicit_seq factors carry their own
// half-open support (seq_lo, seq_hi] with seq->at(i) = a(seq_lo + 1 + i).
struct FactorSpec {
    factor_kind kind = factor_kind::unit;
    int e = 0;
    std::shared_ptr<const std::vector<double>> seq;
    int64_t seq_lo = 0;
    int64_t seq_hi = 0;

    int64_t lo() const {
        if (kind == factor_kind::explicit_seq) return seq_lo;
        return e == 0 ? 0 : int64_t(1) << (e - 1);
    }
    int64_t hi() const {
        if (kind == factor_kind::explicit_seq) return seq_hi;
        return int64_t(1) << e;
    }
};

// A signed multiple of a convolution of block factors.  Factors are stored
// with non-increasing block size; repeated blocks within a kind are folded
// into the coefficient (distinct orderings of equal multisets), so the sum
// of |coefficient| over all components equals the ordered tuple count.
// The convolution is supported on the integers in (support_lo, support_hi].
struct ConvComponent {
    int64_t coefficient = 1;
    std::vector<FactorSpec> factors;
    int64_t support_lo = 0;
    int64_t support_hi = 0;
};

// Decompose f on the window (ceil(X/2) - 1, 4X] into block convolutions:
// f = sum over components of coefficient * (a_1 * ... * a_l) there.
// f is one of lambda, mu, dk (k = dk order, ignored otherwise).  Each
// component has at most 2L factors for lambda (2L - 1 for mu, k for d_k),
// Mobius blocks of size at most 4 X^{1/L}, and total support within a
// factor 2^{l+1} of X.  Throws parameter_error on unsupported inputs.
std::vector<ConvComponent> heath_brown_components(fn_kind f, uint64_t X, int L, int k = 2);

// Streaming form: emit(component) for each component without materializing
// the whole list.  Emission order is deterministic and matches the vector.
void for_each_hb_component(fn_kind f, uint64_t X, int L, int k,
                           const std::function<void(const ConvComponent&)>& emit);

// Window covered by the decomposition at scale X.
inline Window hb_full_window(uint64_t X) {
    uint64_t lo = (X + 1) / 2 - 1;
    return make_window(lo, 4 * X - lo);
}

// Evaluate one component as a function on the window by generating all
// factorizations n = m_1 ... m_l with m_i in the i-th block, n in window.
// Exact divisor enumeration, no transform-based approximation; the result
// table has kind fn_kind::custom.  Throws capacity_error when the window
// or a Mobius block is too large to enumerate.
ValueTable evaluate_component(const ConvComponent& comp, Window window);

// Sum coefficient * evaluate_component over the full decomposition of f.
// window must lie inside hb_full_window(X).  Components are evaluated in
// parallel and reduced in component-index order, so the output is
// bit-identical for every thread count.
ValueTable hb_reconstruct(fn_kind f, uint64_t X, int L, Window window, int k = 2,
                          int threads = 1);
ValueTable hb_reconstruct(fn_kind f, uint64_t X, int L, int k = 2, int threads = 1);

enum class sum_class { type_I, type_I2, type_II };

// Classification of a component by its support exponents.  For type I,
// a1 is the support exponent of the rough factor alpha (everything except
// the largest block); for type I_2, everything except the two largest; for
// type II, [a1, a2] is the exponent range of the extracted middle factor.
struct ComponentClass {
    sum_class tag = sum_class::type_I;
    double a1 = 0.0;
    double a2 = 0.0;
};

// Support exponents n_i = log N_i / log X of the component's blocks, in
// non-increasing order (explicit factors use their actual lower endpoint).
std::vector<double> component_exponents(const ConvComponent& comp, uint64_t X);

// Case analysis on the exponent tuple, thresholds scaled by s = sum n_i:
//   I   when n_1 > (1 - theta - eps/2) s,
//   I_2 when n_1 + n_2 > (3(1-theta)/2 - eps/2) s,
//   II  otherwise: greedy merge from the third-largest block upward until
//       the merged exponent reaches (eps/10) s; it then stays below
//       ((1-theta)/2) s + one block's worth of slack.
// Requires theta in [1/3, 1 - eps] and sum n_i within dyadic slack of 1.
// Total for theta >= 1/3; classification_error is never reached for tuples
// produced by heath_brown_components.
ComponentClass classify_component(std::vector<double> exponents, uint64_t X, double theta,
                                  double epsilon);

// Total variation of values on residue classes mod q: for each class, the
// sup of |f| plus the total jump, counting the entry and exit jumps from
// the zero extension outside the window.  first_n is the integer the first
// entry corresponds to (classes are taken mod q in the integers).
double tv_norm(std::span<const double> values, int64_t q = 1, int64_t first_n = 1);

// Materialize a combinatorial factor's values on its block; index i holds
// the value at lo() + 1 + i.
std::vector<double> factor_values(const FactorSpec& f);

// Bilinear split of f against the primes in (P1, P2]:
//   f(n) #{p in (P1, P2] : p | n} = sum_{n = p m, p in (P1, P2]} f(p) f(m)
// exactly unless p^2 | n for some such p (those n are flagged in
// error_mask).  Both sides are returned for audit, together with the same
// bilinear form packaged as a two-factor explicit component.
struct RamareParts {
    ValueTable lhs;
    ValueTable rhs;
    std::vector<uint8_t> error_mask;
    ConvComponent main;
};
RamareParts ramare_decompose(Window window, fn_kind f, int k, int64_t P1, int64_t P2);

// Concentration of the centered prime-divisor count over a short interval:
//   lhs = sum_{x < n <= x+H} d_k(n) |sum_{X^{eps1} < p <= X^{eps2}} (1_{p|n} - k/p)|
//   rhs = 20 sqrt(k) H (log X)^{k-1} sqrt(log(eps2/eps1))
// pass is lhs <= rhs.  Requires eps1 <= eps2 e^{-2k} and x in [X, 2X].
struct TKCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};
TKCheck turan_kubilius_check(uint64_t X, uint64_t H, uint64_t x, double eps1, double eps2,
                             int k);

// JSON listing of a decomposition: coefficients, supports, factor kinds.
std::string hb_components_json(const std::vector<ConvComponent>& comps);

// CSV table of classified exponent tuples: ell,exponents,tag,a1,a2.
struct ClassificationRow {
    std::vector<double> exponents;
    ComponentClass cls;
};
std::string classification_table_csv(const std::vector<ClassificationRow>& rows);

}  // namespace sil
