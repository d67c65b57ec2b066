#ifndef A2DMM_SPECTRA_HPP_
#define A2DMM_SPECTRA_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <ostream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "a2dmm/errors.hpp"
#include "a2dmm/format.hpp"
#include "a2dmm/operator_forms.hpp"

namespace a2dmm {

using Complex = std::complex<double>;

//! Eigenvalues closer than this to 1 count as the structural (integral) mode.
inline constexpr double kUnitTolerance = 1e-9;

struct SpectralBranch {
  //! Scalar factor of F on one eigenspace of P: 1 on the -1 eigenspace, 1 - 2 eps alpha on the +1 eigenspace.
  double phi;
  //! Roots of s^2 - mu phi s + (mu - 1) = 0.
  std::array<Complex, 2> roots;
};

struct SpectralReport {
  std::array<SpectralBranch, 2> branches;
  //! Each root appears this many times in the spectrum of L (nd).
  std::size_t multiplicity = 1;
  bool unit_eigenvalue_present = false;
  double beta1 = 0.0;                 //!< |1 - 2 alpha|, integral mode excluded
  double beta2 = 0.0;                 //!< largest non-unit modulus with momentum
  double beta1_with_integral = 1.0;   //!< max(1, |1 - 2 alpha|)
  double beta2_with_integral = 1.0;   //!< largest modulus including the unit root
  bool stable = false;                //!< every non-unit modulus < 1
  bool accelerated = false;           //!< beta2 < beta1
};

inline std::array<Complex, 2> momentum_roots(double mu, double phi) {
  const Complex disc = std::sqrt(Complex(mu * mu * phi * phi - 4.0 * (mu - 1.0), 0.0));
  return {(mu * phi + disc) / 2.0, (mu * phi - disc) / 2.0};
}

inline bool is_unit_root(const Complex& z) { return std::abs(z - Complex(1.0, 0.0)) <= kUnitTolerance; }

/// Closed-form eigenvalues of the edge-variable dynamics.
///
/// P has eigenvalues +1 and -1, each with multiplicity nd, so L splits into
/// nd copies of two 2x2 companion blocks with characteristic polynomial
/// s^2 - mu phi s + (mu - 1), phi in {1, 1 - 2 eps alpha}.
inline SpectralReport closed_form_spectrum(double mu, double epsilon, double alpha, std::size_t multiplicity = 1) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterOutOfRange("alpha must lie in (0,1)");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ParameterOutOfRange("epsilon must lie in (0,1]");
  if (!(mu > 0.0 && mu < 2.0 + 1e-15) || !std::isfinite(mu)) throw ParameterOutOfRange("mu must lie in (0,2]");
  SpectralReport rep;
  rep.multiplicity = multiplicity;
  const double phis[2] = {1.0, 1.0 - 2.0 * epsilon * alpha};
  double beta2 = 0.0;
  double beta2_all = 0.0;
  bool stable = true;
  for (int b = 0; b < 2; ++b) {
    rep.branches[b] = {phis[b], momentum_roots(mu, phis[b])};
    for (const Complex& r : rep.branches[b].roots) {
      const double m = std::abs(r);
      beta2_all = std::max(beta2_all, m);
      if (is_unit_root(r)) {
        rep.unit_eigenvalue_present = true;
        continue;
      }
      beta2 = std::max(beta2, m);
      if (!(m < 1.0)) stable = false;
    }
  }
  rep.beta1 = std::abs(1.0 - 2.0 * alpha);
  rep.beta1_with_integral = std::max(1.0, rep.beta1);
  rep.beta2 = beta2;
  rep.beta2_with_integral = beta2_all;
  rep.stable = stable;
  rep.accelerated = rep.beta2 < rep.beta1;
  return rep;
}

//! Every closed-form root repeated by its multiplicity.
inline std::vector<Complex> closed_form_multiset(const SpectralReport& rep) {
  std::vector<Complex> out;
  out.reserve(4 * rep.multiplicity);
  for (const auto& br : rep.branches) {
    for (const auto& r : br.roots) out.insert(out.end(), rep.multiplicity, r);
  }
  return out;
}

//! All eigenvalues of L from a dense eigensolver, sorted by modulus descending.
inline std::vector<Complex> numeric_spectrum(const AuxMatrix& aux) {
  Eigen::EigenSolver<Matrix> solver(aux.dense(), false);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed on the auxiliary matrix");
  std::vector<Complex> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::stable_sort(ev.begin(), ev.end(), [](const Complex& a, const Complex& b) { return std::abs(a) > std::abs(b); });
  return ev;
}

/// Largest distance in a nearest-neighbor matching of two eigenvalue
/// multisets; +inf when the sizes differ.
inline double multiset_distance(const std::vector<Complex>& expected, const std::vector<Complex>& actual) {
  if (expected.size() != actual.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(actual.size(), false);
  double worst = 0.0;
  for (const Complex& e : expected) {
    std::size_t best = actual.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < actual.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(actual[k] - e);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

struct Rates {
  double beta1;
  double beta2;
  double beta1_with_integral;
};

inline Rates rates(double alpha, double epsilon, double mu) {
  const SpectralReport rep = closed_form_spectrum(mu, epsilon, alpha);
  return {rep.beta1, rep.beta2, rep.beta1_with_integral};
}

//! count midpoints of equal cells over (lo, hi); every point is interior.
inline std::vector<double> open_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = lo + (static_cast<double>(k) + 0.5) * (hi - lo) / static_cast<double>(count);
  return g;
}

struct ScanRow {
  double alpha;
  double epsilon;
  double mu;
  double beta1;
  double beta2;
  bool stable;
  bool accelerated;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  std::size_t stable_count = 0;
  std::size_t accelerated_count = 0;
  //! Row indices where beta2 >= beta1.
  std::vector<std::size_t> counterexamples;
};

inline ScanTable acceleration_scan(const std::vector<double>& alpha_grid, const std::vector<double>& epsilon_grid,
                                   const std::vector<double>& mu_grid) {
  ScanTable t;
  t.rows.reserve(alpha_grid.size() * epsilon_grid.size() * mu_grid.size());
  for (double a : alpha_grid) {
    for (double e : epsilon_grid) {
      for (double m : mu_grid) {
        const SpectralReport rep = closed_form_spectrum(m, e, a);
        t.rows.push_back({a, e, m, rep.beta1, rep.beta2, rep.stable, rep.accelerated});
        if (rep.stable) ++t.stable_count;
        if (rep.accelerated) {
          ++t.accelerated_count;
        } else {
          t.counterexamples.push_back(t.rows.size() - 1);
        }
      }
    }
  }
  return t;
}

inline void write_scan_csv(std::ostream& os, const ScanTable& t) {
  os << "alpha,epsilon,mu,beta1,beta2,stable,accelerated\n";
  for (const auto& r : t.rows) {
    os << format_number(r.alpha) << ',' << format_number(r.epsilon) << ',' << format_number(r.mu) << ','
       << format_number(r.beta1) << ',' << format_number(r.beta2) << ',' << (r.stable ? "true" : "false") << ','
       << (r.accelerated ? "true" : "false") << '\n';
  }
}

}  // namespace a2dmm

#endif  // A2DMM_SPECTRA_HPP_
