#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lineorder/grho.hpp"
#include "lineorder/thompson.hpp"

namespace lineorder {

/// G_rho marked by (z1, z2, z3, x1, x2, x3); triviality decided by is_trivial.
using MarkedGroup = LabellingPtr;

/// nu is exact (first disagreement at length nu + 1, with witness) or a lower
/// bound nu >= k_max.
struct NuResult {
  bool exact = false;
  std::int64_t nu = 0;
  std::optional<GroupWord> witness;
  std::uint64_t words_checked = 0;
  /// 2^-nu when exact, otherwise an upper bound on the distance.
  std::string distance() const;
};

/// Every freely reduced word of length 1..k_max in the twelve symbols, in
/// enumeration order. Lengths are scanned in parallel batches; the reported
/// witness is the first disagreement in that order. threads = 0 picks the
/// hardware concurrency.
NuResult nu_bound(const MarkedGroup& a, const MarkedGroup& b, int k_max, unsigned threads = 0);

/// The words of one length, in the order used by nu_bound.
std::vector<GroupWord> reduced_words(int length);

struct ConvergenceRow {
  int n = 0;
  std::int64_t k = 0;  // factor length of the approximation, 4n
  std::int64_t period_letters = 0;
  NuResult nu;
  double wall_time_ms = 0;
  bool passes() const { return nu.nu >= n; }
};
/// rho_n = periodic_approximation(rho, 4n) against rho, enumerated to k_max = n.
std::vector<ConvergenceRow> convergence_table(const LabellingPtr& rho, int n_max, unsigned threads = 0);

/// n,k,period_letters,nu_lower_bound,witness_word,wall_time_ms
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

/// Circle map induced on [0, p]/{0, p}. Throws InternalError when the
/// restriction to [p, 2p] is not the p-translate of the one to [0, p].
CircleMap quotient_circle(const LazyHomeo& h);
CircleMap quotient_circle(const LabellingPtr& sigma, const GroupWord& w);

/// lim (0.h^n)/n on the line, exact or enclosed.
RotationNumber translation_number(const LazyHomeo& h, int Q = 64, int N = 4096);
RotationNumber translation_number(const LabellingPtr& sigma, const GroupWord& w, int Q = 64, int N = 4096);

}  // namespace lineorder
