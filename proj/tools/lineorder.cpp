// lineorder: command-line front end for computing in G_rho.
//
// Exit codes: 0 success, 2 invalid input, 3 internal assertion.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lineorder/atoms.hpp"
#include "lineorder/markedspace.hpp"

using namespace lineorder;
using json = nlohmann::json;

namespace {

struct Common {
  std::string labelling;
  std::string word;
  bool json_out = false;
  std::string csv;
  std::string svg;
  std::vector<long> window;
  unsigned threads = 0;
};

Interval window_of(const Common& c, long lo, long hi) {
  if (c.window.empty()) return {Dyadic(lo), Dyadic(hi)};
  if (c.window[0] >= c.window[1]) throw InvalidInput("--window needs LO < HI");
  return {Dyadic(c.window[0]), Dyadic(c.window[1])};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LazyHomeo element(const LabellingPtr& rho, const std::string& word) { return LazyHomeo::from_word(rho, GroupWord::parse(word)); }

void emit(const Common& c, const json& j, const std::string& text) {
  if (c.json_out) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

json atoms_json(const std::vector<DecoratedAtom>& atoms, const AtomClasses& classes) {
  json arr = json::array();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    arr.push_back({{"carrier", {atoms[i].atom.carrier.lo.to_string(), atoms[i].atom.carrier.hi.to_string()}},
                   {"class", classes.class_of[i]},
                   {"context", atoms[i].context.to_string()}});
  }
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations in groups of piecewise-linear homeomorphisms of the line"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub, bool needs_labelling, bool needs_word) {
    if (needs_labelling) sub->add_option("--labelling,-l", c.labelling, "labelling file")->required()->check(CLI::ExistingFile);
    if (needs_word) sub->add_option("--word,-w", c.word, "word in z1..z3, x1..x3 with ' for inverses")->required();
    sub->add_flag("--json", c.json_out, "JSON output");
    sub->add_option("--window", c.window, "integer window LO HI")->expected(2);
  };

  std::string x_text;
  auto* eval = app.add_subcommand("eval", "evaluate a word at a dyadic point");
  add_common(eval, true, true);
  eval->add_option("--x", x_text, "dyadic point, e.g. 3/2^4 or 0.1875")->required();

  auto* restrict_cmd = app.add_subcommand("restrict", "exact restriction of a word to a window (default [0, 4])");
  add_common(restrict_cmd, true, true);
  restrict_cmd->add_option("--svg", c.svg, "write an SVG plot");

  auto* trivial = app.add_subcommand("trivial", "decide whether a word is the identity");
  add_common(trivial, true, true);

  std::string label_a, label_b;
  int kmax = 4;
  auto* distance = app.add_subcommand("distance", "nu and d = 2^-nu between two marked groups");
  distance->add_option("--a", label_a, "first labelling file")->required()->check(CLI::ExistingFile);
  distance->add_option("--b", label_b, "second labelling file")->required()->check(CLI::ExistingFile);
  distance->add_option("--kmax", kmax, "longest word length enumerated")->capture_default_str();
  distance->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  distance->add_flag("--json", c.json_out, "JSON output");

  int nmax = 4;
  auto* converge = app.add_subcommand("converge", "convergence of periodic approximations (k = 4n)");
  add_common(converge, true, false);
  converge->add_option("--nmax", nmax, "last row")->capture_default_str();
  converge->add_option("--csv", c.csv, "write the table as CSV");
  converge->add_option("--threads", c.threads, "worker threads (0 = all cores)");

  std::size_t k_factor = 8;
  auto* approx = app.add_subcommand("approx", "periodic labelling with the same factors up to length k");
  add_common(approx, true, false);
  approx->add_option("--k", k_factor, "factor length")->capture_default_str();

  std::int64_t depth = 0;
  auto* atoms = app.add_subcommand("atoms", "atoms of a word on a window (default [-8, 8])");
  add_common(atoms, true, true);
  atoms->add_option("--n", depth, "decoration depth (0 = locality constant)")->capture_default_str();
  atoms->add_option("--csv", c.csv, "write the atom table as CSV");

  auto* cells = app.add_subcommand("cells", "cellular decomposition over a periodic labelling");
  add_common(cells, true, true);

  int Q = 64, N = 4096;
  auto* rotation = app.add_subcommand("rotation", "rotation and translation numbers over a periodic labelling");
  add_common(rotation, true, true);
  rotation->add_option("--q", Q, "largest period searched")->capture_default_str();
  rotation->add_option("--iterations", N, "iterations of the fallback estimate")->capture_default_str();

  std::size_t axiom_k = 8;
  auto* axioms = app.add_subcommand("axioms", "recurrence bounds and inverse closure of factors");
  add_common(axioms, true, false);
  axioms->add_option("--k", axiom_k, "longest factor")->capture_default_str();

  int free_len = 8;
  auto* free_check = app.add_subcommand("free-check", "nontriviality of reduced words in lambda(f), pi(f)");
  add_common(free_check, true, false);
  free_check->add_option("--length", free_len, "longest word")->capture_default_str();

  std::string f_file, g_file;
  auto* chain = app.add_subcommand("chain", "commuting chain between lambda(f) and pi(g)");
  add_common(chain, true, false);
  chain->add_option("--f", f_file, "JSON map for f (default: free pair map)")->check(CLI::ExistingFile);
  chain->add_option("--g", g_file, "JSON map for g (default: free pair map)")->check(CLI::ExistingFile);

  std::string r_text;
  int max_len = 12;
  std::uint64_t budget = 200000;
  auto* to_zero = app.add_subcommand("to-zero", "element sending a dyadic to 0");
  add_common(to_zero, true, false);
  to_zero->add_option("--r", r_text, "dyadic point")->required();
  to_zero->add_option("--max-length", max_len, "longest search word")->capture_default_str();
  to_zero->add_option("--budget", budget, "expanded node budget")->capture_default_str();

  std::int64_t krho_k = 2;
  std::vector<long> special;
  auto* krho = app.add_subcommand("krho-check", "K_rho clauses on a window (default [-32, 32])");
  add_common(krho, true, false);
  krho->add_option("--word,-w", c.word, "word to check");
  krho->add_option("--special", special, "special element I_LO I_HI N built from the free pair map")->expected(3);
  krho->add_option("--k", krho_k, "constant k (0 with --special: 2|W(I, n)|)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    LabellingPtr rho = c.labelling.empty() ? nullptr : load_labelling(c.labelling);

    if (*eval) {
      Dyadic x = Dyadic::parse(x_text);
      Dyadic y = element(rho, c.word)(x);
      emit(c, {{"x", x.to_string()}, {"value", y.to_string()}}, y.to_string() + "\n");
    } else if (*restrict_cmd) {
      Interval W = window_of(c, 0, 4);
      PLMap m = window_restrict(element(rho, c.word), W);
      if (!c.svg.empty()) write_file(c.svg, to_svg(m, c.word));
      emit(c, json::parse(to_json(m)), to_json(m) + "\n");
    } else if (*trivial) {
      auto r = is_trivial(element(rho, c.word));
      json j{{"trivial", r.trivial}};
      std::string text = "trivial\n";
      if (!r.trivial) {
        j["witness"] = r.witness->to_string();
        text = "nontrivial (moves " + r.witness->to_string() + ")\n";
      }
      emit(c, j, text);
    } else if (*distance) {
      std::uint64_t words = 0;
      for (int L = 1; L <= kmax; ++L) words += reduced_word_count(6, L);
      std::cerr << "enumerating up to " << words << " reduced words\n";
      auto a = load_labelling(label_a);
      auto b = load_labelling(label_b);
      NuResult r = nu_bound(a, b, kmax, c.threads);
      json j{{"nu", r.nu}, {"exact", r.exact}, {"distance", r.distance()}, {"words_checked", r.words_checked}};
      std::string text = (r.exact ? "nu = " : "nu >= ") + std::to_string(r.nu) + "\nd " +
                         (r.exact ? "= " : "") + r.distance() + "\n";
      if (r.witness) {
        j["witness"] = r.witness->to_string();
        text += "witness: " + r.witness->to_string() + "\n";
      }
      emit(c, j, text);
    } else if (*converge) {
      auto rows = convergence_table(rho, nmax, c.threads);
      std::string csv = convergence_csv(rows);
      if (!c.csv.empty()) write_file(c.csv, csv);
      json arr = json::array();
      for (const auto& r : rows) {
        arr.push_back({{"n", r.n}, {"k", r.k}, {"period_letters", r.period_letters}, {"nu_lower_bound", r.nu.nu},
                       {"witness_word", r.nu.witness ? r.nu.witness->to_string() : ""},
                       {"wall_time_ms", static_cast<std::int64_t>(r.wall_time_ms)}, {"passes", r.passes()}});
      }
      emit(c, arr, csv);
    } else if (*approx) {
      auto sigma = periodic_approximation(*rho, k_factor);
      bool same = same_factors_up_to(*rho, *sigma, k_factor);
      std::string word = static_cast<const PeriodicLabelling&>(*sigma).word().to_string();
      emit(c, {{"word", word}, {"period_letters", *sigma->period_letters()}, {"same_factors", same}},
           "type: periodic\nword: " + word + "\n# same factors up to length " + std::to_string(k_factor) + ": " +
               (same ? "yes" : "no") + "\n");
    } else if (*atoms) {
      LazyHomeo h = element(rho, c.word);
      Interval W = window_of(c, -8, 8);
      std::int64_t n = depth > 0 ? depth : locality_constant(h, W);
      std::vector<DecoratedAtom> decorated;
      bool partial = false;
      for (const auto& a : atoms_in_window(h, W)) {
        partial = partial || a.partial;
        if (!a.partial) decorated.push_back(decorate(*rho, a, n));
      }
      AtomClasses classes = classify(decorated);
      std::string csv = atoms_csv(decorated, classes);
      if (!c.csv.empty()) write_file(c.csv, csv);
      emit(c, {{"n", n}, {"partial_atoms", partial}, {"classes", classes.count}, {"atoms", atoms_json(decorated, classes)}},
           csv + (partial ? "# partial atoms at the window boundary omitted\n" : ""));
    } else if (*cells) {
      LazyHomeo h = element(rho, c.word);
      StabilityReport st = periodic_stability(h);
      if (!st.stable) {
        emit(c, {{"stable", false}, {"run", st.unstable_run->to_string()}},
             "unstable: activity covers " + st.unstable_run->to_string() + "\n");
      } else {
        Interval P(Dyadic(0), Dyadic(st.period));
        std::int64_t k = locality_constant(h, P);
        auto cd = cellular_decomposition(h, k, *st.window);
        std::int64_t lf = k + cd.max_atom_length;
        LazyHomeo prod = LazyHomeo::identity(rho);
        json pieces = json::array();
        std::string text = "period " + std::to_string(st.period) + ", k " + std::to_string(k) + ", l_f " +
                           std::to_string(lf) + ", classes " + std::to_string(cd.classes.count) + "\n";
        Interval check(Dyadic(-2 * st.period), Dyadic(2 * st.period));
        for (std::size_t i = 0; i < cd.pieces.size(); ++i) {
          prod = prod * cd.pieces[i];
          bool ok = krho_window_check(cd.pieces[i], lf, check).passed;
          pieces.push_back({{"class", i}, {"krho", ok}});
          text += "piece " + std::to_string(i) + ": krho(l_f) " + (ok ? "pass" : "FAIL") + "\n";
        }
        bool product = window_restrict(prod, P) == window_restrict(h, P);
        text += std::string("product equals element on [0, p]: ") + (product ? "yes" : "no") + "\n";
        text += atoms_csv(cd.atoms, cd.classes);
        emit(c, {{"stable", true}, {"period", st.period}, {"k", k}, {"l_f", lf}, {"pieces", pieces},
                 {"product_matches", product}, {"atoms", atoms_json(cd.atoms, cd.classes)}},
             text);
      }
    } else if (*rotation) {
      LazyHomeo h = element(rho, c.word);
      CircleMap t = quotient_circle(h);
      RotationNumber rot = rotation_number(t, Q, N);
      RotationNumber tr = translation_number(h, Q, N);
      emit(c, {{"period", t.period()}, {"rotation", rot.to_string()}, {"rotation_exact", rot.exact},
               {"translation", tr.to_string()}, {"translation_exact", tr.exact}},
           "rotation " + rot.to_string() + (rot.exact ? "" : " (enclosure)") + "\ntranslation " + tr.to_string() +
               (tr.exact ? "" : " (enclosure)") + "\n");
    } else if (*axioms) {
      AxiomReport r = axiom_report(*rho, axiom_k);
      json arr = json::array();
      std::string text = "word,recurrence_bound,inverse_present\n";
      for (const auto& e : r.entries) {
        arr.push_back({{"word", e.word.to_string()}, {"recurrence_bound", e.recurrence_bound},
                       {"inverse_present", e.inverse_present}});
        text += e.word.to_string() + "," + std::to_string(e.recurrence_bound) + "," +
                (e.inverse_present ? "yes" : "no") + "\n";
      }
      emit(c, {{"recurrent", r.recurrent}, {"inverse_closed", r.inverse_closed}, {"entries", arr}}, text);
    } else if (*free_check) {
      FreePair p = free_pair(rho);
      std::vector<LazyHomeo> gens{p.lambda_f, p.pi_f};
      std::uint64_t total = 0, nontrivial = 0;
      std::optional<std::string> counterexample;
      for (int L = 1; L <= free_len; ++L) {
        for_each_reduced_word(2, L, [&](const std::vector<int>& w) {
          LazyHomeo h = LazyHomeo::identity(rho);
          for (int l : w) h = h * (l > 0 ? gens[static_cast<std::size_t>(l - 1)] : gens[static_cast<std::size_t>(-l - 1)].inverse());
          ++total;
          if (!is_trivial(h).trivial) {
            ++nontrivial;
          } else if (!counterexample) {
            counterexample = h.describe();
          }
        });
      }
      json j{{"words", total}, {"nontrivial", nontrivial}};
      if (counterexample) j["trivial_word"] = *counterexample;
      emit(c, j, std::to_string(nontrivial) + " of " + std::to_string(total) + " reduced words nontrivial\n");
    } else if (*chain) {
      PLMap f = f_file.empty() ? free_pair_map() : plmap_from_json(read_file(f_file));
      PLMap g = g_file.empty() ? free_pair_map() : plmap_from_json(read_file(g_file));
      CommutingChain ch = commuting_chain(rho, f, g);
      json j{{"eps", ch.eps.to_string()}, {"delta", ch.delta.to_string()}, {"certified", ch.certified()},
             {"commutators_trivial", {ch.commutators_trivial[0], ch.commutators_trivial[1], ch.commutators_trivial[2]}},
             {"supports_disjoint", {ch.supports_disjoint[0], ch.supports_disjoint[1], ch.supports_disjoint[2]}}};
      std::string text = "h1 = lambda(bump " + ch.eps.to_string() + "), h2 = pi(bump " + ch.delta.to_string() + ")\n";
      const char* names[3] = {"[f, h1]", "[h1, h2]", "[h2, g]"};
      for (int i = 0; i < 3; ++i) {
        text += std::string(names[i]) + (ch.commutators_trivial[i] ? " = e" : " != e") +
                (ch.supports_disjoint[i] ? ", disjoint supports\n" : ", supports meet\n");
      }
      emit(c, j, text + (ch.certified() ? "certified\n" : "NOT certified\n"));
    } else if (*to_zero) {
      Dyadic r = Dyadic::parse(r_text);
      ToZeroResult z = map_dyadic_to_zero(rho, r, max_len, budget);
      emit(c, {{"word", z.word.to_string()}, {"transporter", json::parse(to_json(z.transporter))}, {"nodes", z.nodes}},
           "word: " + z.word.to_string() + "\nthen pi of " + to_json(z.transporter) + "\n");
    } else if (*krho) {
      Interval W = window_of(c, -32, 32);
      std::optional<LazyHomeo> h;
      std::int64_t k = krho_k;
      if (!special.empty()) {
        Interval I{Dyadic(special[0]), Dyadic(special[1])};
        h = special_element(rho, I, special[2], free_pair_map());
        if (k == 0) k = 2 * static_cast<std::int64_t>(word_on_interval(*rho, I, special[2]).size());
      } else if (!c.word.empty()) {
        h = element(rho, c.word);
      } else {
        throw InvalidInput("krho-check needs --word or --special");
      }
      KrhoReport r = krho_window_check(*h, k, W);
      json j{{"passed", r.passed}, {"k", k}, {"cells", r.cells_checked}, {"classes", r.classes}};
      std::string text = std::string(r.passed ? "pass" : "fail") + " (k = " + std::to_string(k) + ", " +
                         std::to_string(r.cells_checked) + " cells)\n";
      if (!r.passed) {
        j["clause"] = r.clause;
        j["cells_failed"] = {*r.cell_x, *r.cell_y};
        text += "clause " + r.clause + " fails for cells " + std::to_string(*r.cell_x) + " and " +
                std::to_string(*r.cell_y) + "\n";
      }
      emit(c, j, text);
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
