#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "chmr/jet/expression.hpp"
#include "chmr/report.hpp"

namespace chmr::jet {

/// Random rational functions over var X, Y, T with fields A, B and a constant k.
/// Jets carry derivative orders up to 1 in each variable.
class RandomExpressions {
 public:
  explicit RandomExpressions(std::uint64_t seed);
  const SpacePtr& space() const { return space_; }

  Expression poly(int terms);
  /// poly(3) / poly(2) with a nonzero denominator.
  Expression rational();
  JetVar random_jet();
  int pick(int lo, int hi);
  Rational random_value();

 private:
  std::mt19937_64 rng_;
  SpacePtr space_;
};

/// Value of e at one random rational point, or nothing when the denominator vanishes there.
std::optional<Rational> sample_at_random_point(const Expression& e, RandomExpressions& gen);

struct PropertyCounts {
  int leibniz = 0, commutation = 0, round_trip = 0;
  int zero_tests = 0;
  int points = 20;
};
/// Leibniz rule, commutation of total derivatives and print/parse round trip on random
/// rational functions, then the symbolic zero-test against evaluation at `points`
/// random rational points. One residual line per property with its failure count.
Report engine_property_check(std::uint64_t seed, const PropertyCounts& counts);
/// 1000 property cases split evenly and 200 zero-tests at 20 points.
PropertyCounts default_property_counts();

}  // namespace chmr::jet
