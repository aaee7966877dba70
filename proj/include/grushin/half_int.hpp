#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace grushin {

// Half-integer stored as twice its value, so lattice membership tests and
// index arithmetic stay exact.
struct HalfInt {
  int twice = 0;

  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int tw) : twice(tw) {}
  static constexpr HalfInt of_int(int n) { return HalfInt{2 * n}; }

  constexpr double value() const { return 0.5 * twice; }
  constexpr bool is_integer() const { return twice % 2 == 0; }

  friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;
  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt{a.twice + b.twice}; }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt{a.twice - b.twice}; }

  std::string str() const {
    if (is_integer()) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }
};

// The admissible index set for the Laplacian on S^d: N_d = N + (d-1)/2.
constexpr bool in_lattice(HalfInt l, int d) {
  return l.twice >= d - 1 && (l.twice - (d - 1)) % 2 == 0;
}

constexpr HalfInt lattice_min(int d) { return HalfInt{d - 1}; }

// Polynomial degree l' = l - (d-1)/2 of an index l in N_d.
constexpr int lattice_degree(HalfInt l, int d) { return (l.twice - (d - 1)) / 2; }

inline void require_lattice(HalfInt l, int d, const char* what) {
  if (!in_lattice(l, d))
    throw std::domain_error(std::string(what) + "=" + l.str() +
                            " is not in N + " + HalfInt{d - 1}.str());
}

}  // namespace grushin
