#include "chmr/jet/properties.hpp"

#include <chrono>
#include <map>

#include "chmr/errors.hpp"

namespace chmr::jet {

RandomExpressions::RandomExpressions(std::uint64_t seed) : rng_(seed) {
  space_ = parse_catalog("var X, Y, T\nfield A(X,Y,T)\nfield B(X,Y,T)\nconst k\n");
}

int RandomExpressions::pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

Rational RandomExpressions::random_value() { return Rational(pick(-40, 40), pick(1, 9)); }

JetVar RandomExpressions::random_jet() {
  const FieldId f = static_cast<FieldId>(pick(0, 2));
  JetVar j(f);
  if (space_->field(f).kind == FieldKind::kField)
    for (VarId v = 0; v < 3; ++v) j = j.differentiated(v, static_cast<unsigned>(pick(0, 1)));
  return j;
}

Expression RandomExpressions::poly(int terms) {
  Polynomial p;
  for (int i = 0; i < terms; ++i) {
    Monomial m;
    const int factors = pick(0, 3);
    for (int f = 0; f < factors; ++f) m = m * Monomial(random_jet(), static_cast<std::uint32_t>(pick(1, 2)));
    p += Polynomial(m, Rational(pick(-5, 5), pick(1, 4)));
  }
  return Expression(space_, p);
}

Expression RandomExpressions::rational() {
  Expression d = poly(2);
  while (d.is_zero()) d = poly(2);
  return poly(3) / d;
}

std::optional<Rational> sample_at_random_point(const Expression& e, RandomExpressions& gen) {
  std::map<JetVar, GaussianRational> values;
  const auto value = [&](JetVar j) {
    auto it = values.find(j);
    if (it == values.end()) it = values.emplace(j, GaussianRational{gen.random_value(), Rational(0)}).first;
    return it->second;
  };
  const GaussianRational d = evaluate_exact(e.denominator(), value);
  if (d.is_zero()) return std::nullopt;
  return evaluate_exact(e.numerator(), value).re / d.re;
}

PropertyCounts default_property_counts() { return {334, 333, 333, 200, 20}; }

namespace {

struct Tally {
  int cases = 0, failures = 0;
  std::string first;
  void record(bool ok, const std::string& witness) {
    ++cases;
    if (ok) return;
    if (failures++ == 0) first = witness;
  }
  ResidualOutcome outcome(const std::string& label) const {
    ResidualOutcome o;
    o.label = label + " (" + std::to_string(cases) + " cases)";
    o.reduced_to_zero = failures == 0;
    o.remainder_text = failures == 0 ? "0" : std::to_string(failures) + " failures, first: " + first;
    return o;
  }
};

// True when e vanishes at every one of `points` random points.
bool vanishes_at_samples(const Expression& e, RandomExpressions& gen, int points) {
  bool all_zero = true;
  for (int taken = 0, tries = 0; taken < points; ++tries) {
    if (tries > 50 * points) throw Error("random points keep hitting the denominator");
    const auto v = sample_at_random_point(e, gen);
    if (!v) continue;
    ++taken;
    all_zero = all_zero && sgn(*v) == 0;
  }
  return all_zero;
}

// Even draws build an identity that must cancel; odd draws a generic expression.
Expression zero_test_candidate(RandomExpressions& gen, int index) {
  const Expression a = gen.rational();
  Expression b = gen.rational();
  while (b.is_zero()) b = gen.rational();
  if (index % 2 == 1) return index % 4 == 1 ? a * b + Expression(1) - b * a : a - b;
  switch (index / 2 % 3) {
    case 0: return (a + b) * (a - b) - (a * a - b * b);
    case 1: return a / b * b - a;
    default: {
      const VarId v = static_cast<VarId>(gen.pick(0, 2));
      return differentiate(a / b, v) - (differentiate(a, v) * b - a * differentiate(b, v)) / (b * b);
    }
  }
}

}  // namespace

Report engine_property_check(std::uint64_t seed, const PropertyCounts& counts) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.task = "engine-properties";
  rep.add_assumption("random rational functions over var X, Y, T with fields A, B and constant k, seed " +
                     std::to_string(seed));
  RandomExpressions gen(seed);

  Tally leibniz;
  for (int i = 0; i < counts.leibniz; ++i) {
    const Expression a = gen.rational(), b = gen.rational();
    const VarId v = static_cast<VarId>(gen.pick(0, 2));
    const Expression gap = differentiate(a * b, v) - (differentiate(a, v) * b + a * differentiate(b, v));
    leibniz.record(gap.is_zero(), gap.to_string());
  }
  rep.residuals.push_back(leibniz.outcome("D(a b) - (D a) b - a D b"));

  Tally commute;
  for (int i = 0; i < counts.commutation; ++i) {
    const Expression e = gen.rational();
    const VarId v1 = static_cast<VarId>(gen.pick(0, 2)), v2 = static_cast<VarId>(gen.pick(0, 2));
    const Expression gap = differentiate(differentiate(e, v1), v2) - differentiate(differentiate(e, v2), v1);
    commute.record(gap.is_zero(), gap.to_string());
  }
  rep.residuals.push_back(commute.outcome("D_v D_w e - D_w D_v e"));

  Tally round;
  for (int i = 0; i < counts.round_trip; ++i) {
    const Expression e = gen.rational();
    const Expression back = parse_expression(e.to_string(), gen.space());
    round.record(back == e, e.to_string());
  }
  rep.residuals.push_back(round.outcome("parse(print(e)) - e"));

  Tally zero;
  int identities = 0;
  for (int i = 0; i < counts.zero_tests; ++i) {
    const Expression e = zero_test_candidate(gen, i);
    identities += e.is_zero();
    zero.record(e.is_zero() == vanishes_at_samples(e, gen, counts.points), e.to_string());
  }
  ResidualOutcome agree = zero.outcome("zero-test against " + std::to_string(counts.points) +
                                       "-point rational evaluation, disagreements");
  agree.label += ", " + std::to_string(identities) + " identically zero";
  rep.residuals.push_back(agree);

  rep.steps = static_cast<std::size_t>(counts.leibniz + counts.commutation + counts.round_trip + counts.zero_tests);
  rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace chmr::jet
