#include "lineorder/markedspace.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <mutex>
#include <thread>

namespace lineorder {

std::string NuResult::distance() const {
  std::string d = "2^-" + std::to_string(nu);
  return exact ? d : "<= " + d;
}

std::vector<GroupWord> reduced_words(int length) {
  std::vector<GroupWord> out;
  out.reserve(reduced_word_count(6, length));
  for_each_reduced_word(6, length, [&](const std::vector<int>& w) {
    std::vector<GenSymbol> s;
    s.reserve(w.size());
    for (int l : w) s.push_back(GenSymbol::from_generator(std::abs(l) - 1, l < 0));
    out.emplace_back(std::move(s));
  });
  return out;
}

namespace {

// Index of the first word on which the oracles disagree, or words.size().
std::size_t first_disagreement(const MarkedGroup& a, const MarkedGroup& b, const std::vector<GroupWord>& words,
                               unsigned threads) {
  std::atomic<std::size_t> best{words.size()};
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  constexpr std::size_t chunk = 64;
  auto work = [&] {
    try {
      for (;;) {
        std::size_t lo = next.fetch_add(chunk);
        // chunks beyond a known disagreement cannot improve it
        if (lo >= words.size() || lo >= best.load() || failed.load()) return;
        std::size_t hi = std::min(words.size(), lo + chunk);
        for (std::size_t i = lo; i < hi && i < best.load(); ++i) {
          bool ta = is_trivial(a, words[i]).trivial;
          bool tb = is_trivial(b, words[i]).trivial;
          if (ta != tb) {
            std::size_t cur = best.load();
            while (i < cur && !best.compare_exchange_weak(cur, i)) {
            }
            break;
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return best.load();
}

}  // namespace

NuResult nu_bound(const MarkedGroup& a, const MarkedGroup& b, int k_max, unsigned threads) {
  if (k_max < 1) throw InvalidInput("k_max must be at least 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  NuResult out;
  for (int L = 1; L <= k_max; ++L) {
    std::vector<GroupWord> words = reduced_words(L);
    std::size_t i = first_disagreement(a, b, words, threads);
    if (i < words.size()) {
      out.exact = true;
      out.nu = L - 1;
      out.witness = words[i];
      out.words_checked += i + 1;
      return out;
    }
    out.words_checked += words.size();
  }
  out.nu = k_max;
  return out;
}

std::vector<ConvergenceRow> convergence_table(const LabellingPtr& rho, int n_max, unsigned threads) {
  if (n_max < 1) throw InvalidInput("n_max must be at least 1");
  std::vector<ConvergenceRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    auto start = std::chrono::steady_clock::now();
    ConvergenceRow row;
    row.n = n;
    row.k = 4 * n;
    LabellingPtr approx = periodic_approximation(*rho, static_cast<std::size_t>(row.k));
    row.period_letters = *approx->period_letters();
    row.nu = nu_bound(approx, rho, n, threads);
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "n,k,period_letters,nu_lower_bound,witness_word,wall_time_ms\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.k << ',' << r.period_letters << ',' << r.nu.nu << ','
        << (r.nu.witness ? r.nu.witness->to_string() : "") << ',' << static_cast<std::int64_t>(r.wall_time_ms)
        << '\n';
  }
  return out.str();
}

namespace {

std::int64_t period_of(const LazyHomeo& h) {
  auto P = h.labelling()->period_letters();
  if (!P) throw InvalidInput("quotient to the circle needs a periodic labelling");
  return *P / 2;
}

}  // namespace

CircleMap quotient_circle(const LazyHomeo& h) {
  std::int64_t p = period_of(h);
  PLMap base = window_restrict(h, Interval(Dyadic(0), Dyadic(p)));
  PLMap next = window_restrict(h, Interval(Dyadic(p), Dyadic(2 * p)));
  if (translate(base, Dyadic(p)) != next) throw InternalError("element does not commute with translation by p");
  return CircleMap::from_lift(base, p);
}

CircleMap quotient_circle(const LabellingPtr& sigma, const GroupWord& w) {
  return quotient_circle(LazyHomeo::from_word(sigma, w));
}

RotationNumber translation_number(const LazyHomeo& h, int Q, int N) {
  std::int64_t p = period_of(h);
  PLMap lift = window_restrict(h, Interval(Dyadic(0), Dyadic(p)));
  return lift_translation_number(lift, Dyadic(p), Q, N);
}

RotationNumber translation_number(const LabellingPtr& sigma, const GroupWord& w, int Q, int N) {
  return translation_number(LazyHomeo::from_word(sigma, w), Q, N);
}

}  // namespace lineorder
