#pragma once

// Finite-n moments of Z = Phi^{(x) r}(rho) from the orthogonal Weingarten
// formula, and the leading-order large-n moment formula.
//
// For pairings a (rows) and b (columns) of the 2pr boxes of a p-th moment
// diagram, the term is
//     n^{#(delta a)/2} k^{#(gamma a)/2} f_b(rho) Wg_{kn}(a, b),
// where f_b contracts the input state rho^{(x) p} along the column pairing b.

#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "orthochan/channels.hpp"
#include "orthochan/pairings.hpp"

namespace orthochan {

struct MomentOptions {
  int max_points = 8;                                // cap on 2pr for the exact engine
  std::size_t max_contraction = std::size_t{1} << 24;  // cap on d^{pr} index tuples in f_b
  DenseBudget dense;
  Limits limits;
};

// Hard ceiling for MomentOptions::max_points (10395 pairings).
inline constexpr int kMaxExactPoints = 12;

// f_b(rho) = Tr[rho^{(x) p} M(b)] by walking the pairs of b; M(b) is never
// formed. b acts on 2pr boxes laid out by BoxLayout{p, r}.
Complex f_beta(const Pairing& beta, const InputState& rho, int p, const MomentOptions& options = {});
Complex f_beta(const Pairing& beta, const ComplexMatrix& rho, int d, int r, int p,
               const MomentOptions& options = {});

// E Tr Z^p, exact at finite n. d = floor(t k n) must equal rho.d().
double exact_trace_moment(int p, int r, int k, int n, double t, const InputState& rho,
                          const MomentOptions& options = {});

// E Z, exact at finite n; a k^r x k^r matrix.
ComplexMatrix exact_mean_output(int r, int k, int n, double t, const InputState& rho,
                                const MomentOptions& options = {});

struct MomentTerm {
  std::size_t alpha = 0;  // canonical pairing indices
  std::size_t beta = 0;
  int n_exp = 0;  // #(delta alpha)/2
  int k_exp = 0;  // #(gamma alpha)/2
  Complex f_beta;
  double wg = 0.0;
  Complex value;
};

// Every term of the exact sum, sorted by |value| descending (ties by index).
std::vector<MomentTerm> term_report(int p, int r, int k, int n, double t, const InputState& rho,
                                    const MomentOptions& options = {});

// Power of n carried by a term at large n, bumps and Weingarten decay
// included: #(delta a)/2 + bumps(b) - pr - |ab|/2. Never positive; zero
// exactly on dominant pairs.
int leading_exponent(const Pairing& alpha, const Pairing& beta, int p, int r);

// g_B for cell partial pairings B of the p*r cells.
using GFunction = std::function<double(const PartialPairing& cells)>;

// sum over B in C_p (C_{p,in} when p <= 2) and A subset of B of
//   k^{#(gamma alpha_A)/2 + |A| - pr} t^{|B|} g_B (-1)^{|B|-|A|}.
// Throws ValidationError when some g_B lies outside [0, 1].
double asymptotic_trace_moment(int p, int r, int k, double t, const GFunction& g);

// Same, with g given as a map. Keys on r points are per-copy values and are
// multiplied across copies (valid for inward B only); keys on p*r points are
// used as-is. A missing value throws ValidationError.
double asymptotic_trace_moment(int p, int r, int k, double t, const std::map<PartialPairing, double>& g);

// g_B = f_{beta_B}(rho) / (t n k)^{|B|} evaluated from an input state.
GFunction g_from_input(const InputState& rho, int p, int k, int n, double t, const MomentOptions& options = {});

}  // namespace orthochan
