// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "chmr/jet/properties.hpp"
#include "chmr/numerics/numerics.hpp"
#include "chmr/reductions/reductions.hpp"
#include "chmr/systems/systems.hpp"
#include "chmr/transforms/transforms.hpp"

using namespace chmr;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (ok) return;
    passed = false;
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool has_passing(const Report& r, const std::string& fragment) {
  for (const auto& o : r.residuals)
    if (o.label.find(fragment) != std::string::npos && o.ok() && o.expect_zero) return true;
  return false;
}

const NumericMeasure* find_measure(const Report& r, const std::string& prefix) {
  for (const auto& m : r.measures)
    if (m.label.rfind(prefix, 0) == 0) return &m;
  return nullptr;
}

Outcome hierarchies() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t ch[] = {3, 4, 5}, mch[] = {4, 6, 8};
  for (int n = 1; n <= 3; ++n) {
    o.require(systems::build_ch_system(n).equations.size() == ch[n - 1], "CH count at n = " + std::to_string(n));
    o.require(systems::build_mch_system(n).equations.size() == mch[n - 1], "mCH count at n = " + std::to_string(n));
    o.require(systems::verify_hierarchies(n).passed(), "constant solutions at n = " + std::to_string(n));
  }
  const double s = seconds_since(t0);
  o.require(s < 1.0, "runtime " + fmt("%.2f s", s));
  if (o.passed) o.detail = "counts 3/4/5 and 4/6/8, constant solutions vanish, " + fmt("%.3f s", s);
  return o;
}

Outcome reciprocal() {
  Outcome o;
  double at3 = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    o.require(transforms::verify_reciprocal_ch(n).passed(), "CH at n = " + std::to_string(n));
    o.require(transforms::verify_reciprocal_mch(n).passed(), "mCH at n = " + std::to_string(n));
    if (n == 3) at3 = seconds_since(t0);
  }
  o.require(at3 < 60.0, "n = 3 runtime " + fmt("%.1f s", at3));
  if (o.passed) o.detail = "CH and mCH pushed residuals match targets up to units for n = 1..3, n = 3 in " + fmt("%.3f s", at3);
  return o;
}

Outcome miura() {
  Outcome o;
  for (int n = 1; n <= 3; ++n) o.require(transforms::verify_miura(n).passed(), "n = " + std::to_string(n));
  if (o.passed) o.detail = "CBS reduces to zero modulo mCBS via 4M = x_0 - m for n = 1..3";
  return o;
}

Outcome composite() {
  Outcome o;
  for (int n = 2; n <= 3; ++n) {
    const Report r = transforms::verify_composite_dictionary(n);
    o.require(r.passed(), "n = " + std::to_string(n));
  }
  if (o.passed) o.detail = "dictionary identities and the three derivation chains reduce for n = 2, 3";
  return o;
}

Outcome lax() {
  Outcome o;
  std::size_t mutations = 0;
  double at3 = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto check = [&](const systems::LaxPair& pair, const systems::EquationSystem& sys, const std::string& name) {
      o.require(systems::check_lax_compatibility(pair, sys).passed(), name + " at n = " + std::to_string(n));
      for (std::size_t k = 0; k < pair.coefficient_count(); ++k) {
        const Report r = systems::check_lax_compatibility(pair.with_flipped_sign(k), sys);
        bool caught = false;
        for (const auto& x : r.residuals) caught = caught || !x.reduced_to_zero;
        o.require(caught && !r.budget_exhausted, name + " flip of " + pair.coefficient_label(k) + " missed");
        ++mutations;
      }
    };
    check(systems::build_ch_lax(n), systems::build_ch_system(n), "CH");
    check(systems::build_mch_lax(n), systems::build_mch_system(n), "mCH");
    if (n == 3) at3 = seconds_since(t0);
  }
  o.require(at3 < 120.0, "n = 3 runtime " + fmt("%.1f s", at3));
  if (o.passed)
    o.detail = "both pairs compatible for n = 1..3, " + std::to_string(mutations) + " sign flips all caught, n = 3 in " +
               fmt("%.3f s", at3);
  return o;
}

Outcome reductions_check() {
  Outcome o;
  const Report c1 = reductions::reduce_case1(), c2 = reductions::reduce_case2();
  o.require(c1.passed(), "case 1");
  o.require(c2.passed(), "case 2");
  o.require(has_passing(c1, "k1 = 2 k2"), "k1 = 2 k2 not certified");
  o.require(has_passing(c1, "U_T = k1"), "Dym missing");
  o.require(has_passing(c1, "u_t = k2"), "Qiao missing");
  o.require(has_passing(c1, "CBS at z1 = z0"), "potential KdV missing");
  o.require(has_passing(c1, "mCBS at z1 = z0"), "potential mKdV missing");
  if (o.passed) o.detail = "Dym, Qiao, potential KdV and mKdV, k1 = 2 k2 derived; case 2 targets reproduced";
  return o;
}

Outcome numerics_check() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Report r = numerics::numeric_check();
  const double s = seconds_since(t0);
  const NumericMeasure* dym = find_measure(r, "manufactured Dym");
  const NumericMeasure* transport = find_measure(r, "Qiao residual");
  const NumericMeasure* mutation = find_measure(r, "mutation control: Qiao residual");
  const NumericMeasure* kdv = find_measure(r, "potential KdV");
  o.require(dym && dym->passed && std::abs(dym->order - 2.0) <= 0.3, "manufactured Dym slope");
  o.require(transport && transport->passed && transport->order >= 1.7 &&
                transport->resolutions == std::vector<std::size_t>{256, 512, 1024},
            "transport slope");
  o.require(mutation && mutation->passed, "mutation control does not plateau");
  o.require(kdv && kdv->passed && kdv->order >= 1.7, "Miura wave order");
  o.require(r.passed(), "numeric suite has failing entries");
  o.require(s < 300.0, "runtime " + fmt("%.1f s", s));
  if (o.passed)
    o.detail = "manufactured Dym slope " + fmt("%.3f", dym->order) + ", transport slope " +
               fmt("%.3f", transport->order) + " on 256/512/1024 with the mutation plateauing, Miura order " +
               fmt("%.3f", kdv->order) + ", suite " + fmt("%.1f s", s);
  return o;
}

Outcome engine(std::uint64_t seed) {
  Outcome o;
  const jet::PropertyCounts counts = jet::default_property_counts();
  o.require(counts.leibniz + counts.commutation + counts.round_trip == 1000 && counts.zero_tests == 200 &&
                counts.points == 20,
            "case counts");
  const Report r = jet::engine_property_check(seed, counts);
  for (const auto& x : r.residuals) o.require(x.ok(), x.label + ": " + x.remainder_text);
  if (o.passed) o.detail = "1000 property cases and 200 zero-tests at 20 points agree, seed " + std::to_string(seed);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 0;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"hierarchy construction", hierarchies},
      {"reciprocal links", reciprocal},
      {"Miura link", miura},
      {"composite dictionary", composite},
      {"Lax compatibility", lax},
      {"reductions", reductions_check},
      {"numerics", numerics_check},
      {"engine soundness", [seed] { return engine(seed); }},
  };
  int failures = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("raised: ") + e.what();
    }
    failures += !o.passed;
    std::printf("criterion %d %s %s: %s\n", index, o.passed ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
