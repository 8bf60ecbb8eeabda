// Acceptance battery: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "hup/experiments.hpp"
#include "hup/lab.hpp"

using namespace hup;
using lab::json;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  " << id << ". " << title << ": " << detail << std::endl;
  failures += pass ? 0 : 1;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const json& member(const json& suite, const std::string& name) {
  for (const auto& m : suite["results"]["members"])
    if (m["name"] == name) return m;
  throw std::runtime_error("suite has no member " + name);
}

double max_of(const json& rows, const char* key) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r[key].get<double>());
  return m;
}

}  // namespace

int main() {
  lab::SuiteOptions opt;
  std::cout << "running suite all (seed " << opt.seed << ")" << std::endl;
  const json first = lab::run_suite("all", opt);

  {
    const auto& m = member(first, "funk_hecke");
    const double spread = max_of(m["results"]["rows"], "spread");
    report(1, "Funk-Hecke eigenvalue ratio", m["verdict"] == "PASS" && spread < 1e-6,
           "n=2, l<=6, F in {1,t,t^2,exp(-t)}, 5 trials, max spread " + sci(spread));
  }
  {
    const auto& m = member(first, "bessel_form");
    const auto& rows = m["results"]["rows"];
    const double spread = max_of(rows, "spread"), offset = max_of(rows, "zero_offset");
    report(2, "Bessel form of the transform", m["verdict"] == "PASS" && spread < 1e-5 && offset < 1e-6,
           "max ratio spread " + sci(spread) + ", max zero offset " + sci(offset));
  }
  {
    const auto& r = member(first, "hecke_bochner")["results"];
    const double spread = r["spread"], zero = r["k_lt_q_spectral_max_abs"];
    report(3, "Hecke-Bochner proportionality", spread < 1e-5 && zero < 1e-9 && r["k_lt_q_closed_form_max_abs"] == 0.0,
           "spread " + sci(spread) + " over " + std::to_string(r["evaluations"].get<int>()) +
               " projections, k<q max " + sci(zero));
  }
  {
    const double err = member(first, "hermite_diagonal_sum")["results"]["max_abs_err"];
    report(4, "diagonal special Hermite sum", err < 1e-7, "max abs error " + sci(err));
  }
  {
    const auto& r = member(first, "plancherel")["results"];
    double worst = 0.0;
    int n = 0;
    for (const auto& row : r["rows"])
      if (row["lambda"] == 1.0) worst = std::max(worst, row["rel_err_net_of_tail"].get<double>()), ++n;
    report(5, "Weyl Plancherel", n >= 10 && r["max_rel_err"].get<double>() <= 0.01,
           std::to_string(n) + " functions at lambda=1, M=40, max rel err " + sci(worst) + ", all lambdas " +
               sci(r["max_rel_err"].get<double>()) + ", tail " + sci(r["max_tail_rel"].get<double>()));
  }
  {
    const auto& rows = member(first, "hs_identity")["results"]["rows"];
    const double rel = max_of(rows, "rel_err"), kern = max_of(rows, "kernel_vs_basis");
    bool dominated = false;
    for (const auto& row : rows) dominated = dominated || row["truncation_dominated"].get<bool>();
    report(6, "HS norm of E_A F_N", rows.size() == 3 && rel < 0.02 && kern < 1e-4 && !dominated,
           "unit disk, N=1,2,4, M=40, max rel err " + sci(rel) + ", kernel vs basis " + sci(kern));
  }
  {
    const auto& rows = member(first, "annihilation_probe")["results"]["rows"];
    bool ok = rows.size() == 3;
    std::string detail;
    for (const auto& row : rows) {
      ok = ok && row["count_near_one"] == 0 && row["count_near_one"].get<int>() <= row["bound"].get<int>();
      detail += "N=" + std::to_string(row["N"].get<int>()) + " s1=" +
                sci(row["leading_singular_values"][0].get<double>()) + " count " +
                std::to_string(row["count_near_one"].get<int>()) + "<=" + std::to_string(row["bound"].get<int>());
      if (&row != &rows.back()) detail += "; ";
    }
    report(7, "no singular value of E_A F_N near 1", ok, detail);
  }
  {
    const auto& h = member(first, "hup_rank_h_cone")["results"];
    const auto& harm = member(first, "hup_rank_harmonic_cone")["results"];
    const auto& quad = member(first, "hup_rank_quadric_cone")["results"];
    const double ratio = h["ratio"];
    const bool forward = ratio > 1e-6;
    const bool backward = harm["harmonic_residual"].get<double>() < 1e-8 && harm["nullity"] == harm["direct_vanishing_count"] &&
                          harm["nullity"].get<int>() > 0;
    std::ostringstream d;
    d << "H cone a=4, L=3: sigma ratio " << sci(ratio) << ", nullity " << h["nullity"] << " = vanishing count "
      << h["direct_vanishing_count"] << " (the cone lies in the zero set of the harmonic Im(z1 conj z2))"
      << "; quadric cone ratio " << sci(quad["ratio"].get<double>()) << "; harmonic cone residual "
      << sci(harm["harmonic_residual"].get<double>()) << ", nullity " << harm["nullity"] << " = "
      << harm["direct_vanishing_count"];
    report(8, "rank test on cones, both directions", forward && backward, d.str());
  }
  {
    const auto& g = member(first, "spectral_determinacy")["results"];
    const auto& a = member(first, "spectral_determinacy_adversarial")["results"];
    bool moved = true;
    for (const auto& w : a["witnesses"])
      if (w["p"] == 1 && w["q"] == 1) moved = moved && w["k"] != 3;
    const bool ok = g["rank_verdict"] == "FULL-RANK" && a["rank_verdict"] == "FULL-RANK" && g["all_witnessed"] == true &&
                    a["all_witnessed"] == true && moved && g["k_lt_q_max_abs"] == 0.0 && a["k_lt_q_max_abs"] == 0.0;
    report(9, "two-sphere spectral determinacy", ok,
           "generic ratio " + sci(g["ratio"].get<double>()) + ", adversarial r2=" + sci(a["r2"].get<double>()) +
               " ratio " + sci(a["ratio"].get<double>()) + ", k<q blocks exactly 0");
  }
  {
    const auto& r = member(first, "geodesic_means")["results"];
    report(10, "geodesic means vs zonal projections", r["agreements"] == 2 * r["trials"].get<int>() &&
                                                          r["annihilated_with_vanishing_projections"] == r["trials"],
           std::to_string(r["trials"].get<int>()) + " functions, annihilated max " +
               sci(r["annihilated_max_abs"].get<double>()) + ", generic min " + sci(r["generic_min_abs"].get<double>()));
  }
  {
    const auto& r = member(first, "laguerre_zeros")["results"];
    report(11, "simple zeros of L_k^1", r["all_counts_match"] == true && r["all_sign_changes"] == true &&
                                            r["min_gap"].get<double>() > 1e-8,
           "k<=20, min gap " + sci(r["min_gap"].get<double>()));
  }
  {
    auto again = opt;
    again.jobs = 2;
    std::cout << "running suite all again, two members at a time" << std::endl;
    const json second = lab::run_suite("all", again);
    const bool same = first["results"].dump() == second["results"].dump();
    report(12, "determinism of suite all", same,
           std::to_string(first["results"].dump().size()) + " bytes of results, " + (same ? "identical" : "different"));
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
