#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "grushin/half_int.hpp"

namespace grushin {

// Eigenvalue of the (positive) Laplacian on S^d at index l in N_d:
// lambda^d_l = (l + (d-1)/2)(l - (d-1)/2) = l^2 - ((d-1)/2)^2.
double laplace_eigenvalue(int d, HalfInt l);

// Joint eigenvalue lambda^{d,k}_{l,m} = lambda^d_l - lambda^k_m of the
// signed-difference operator on S^d, for (l,m) with l >= m + (d-k)/2.
double grushin_eigenvalue(int d, int k, HalfInt l, HalfInt m);

// dim of the spherical harmonic eigenspace on S^d at index l (exact integer).
std::int64_t sphere_dim(int d, HalfInt l);

// A chain of indices (l_d, l_{d-1}, ..., l_k), non-increasing, l_r in N_r.
// ell[0] is the level-d entry; ell[d-k] the level-k entry.
struct ChainIndex {
  int d = 2, k = 1;
  std::vector<HalfInt> ell;

  HalfInt at_level(int r) const { return ell.at(static_cast<size_t>(d - r)); }
  HalfInt top() const { return ell.front(); }     // l_d
  HalfInt bottom() const { return ell.back(); }   // l_k
  double lambda() const;                          // joint eigenvalue
  void validate() const;                          // throws std::domain_error
};

enum class Regime { all, elliptic, subelliptic };

// Spectral window lambda in [i^2, (i+1)^2), optionally restricted to one
// regime of the bottom-vs-top index ratio (ties land in both regimes).
struct SpectralWindow {
  int i = 1;
  Regime regime = Regime::all;
  double epsilon = 0;  // <=0 means use default_epsilon(d,k)

  void validate() const;
};

double default_epsilon(int d, int k);

// Enumerates every chain with lo <= lambda < hi (or <= hi when inclusive_hi),
// in lexicographic order of (l_d, l_{d-1}, ..., l_k). Returns the count.
std::int64_t enumerate_lambda_range(
    int d, int k, double lo, double hi, bool inclusive_hi, Regime regime,
    double epsilon, const std::function<void(const ChainIndex&, double)>& fn);

std::int64_t enumerate_chains(
    int d, int k, const SpectralWindow& w,
    const std::function<void(const ChainIndex&, double)>& fn);

std::vector<ChainIndex> enumerate_chains(int d, int k, const SpectralWindow& w);

// Largest possible l_d over chains with lambda <= lam_max (used for sizing).
HalfInt max_top_index(int d, int k, double lam_max);

}  // namespace grushin
