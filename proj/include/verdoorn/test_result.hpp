#pragma once

#include <string>
#include <vector>

#include "verdoorn/numerics.hpp"

namespace verdoorn {

struct Distribution {
  enum class Kind { F, ChiSquared, Normal, StudentT };
  Kind kind = Kind::Normal;
  double df1 = 0.0;
  double df2 = 0.0;

  static Distribution f(double d1, double d2) { return {Kind::F, d1, d2}; }
  static Distribution chi_squared(double df) { return {Kind::ChiSquared, df, 0.0}; }
  static Distribution normal() { return {Kind::Normal, 0.0, 0.0}; }
  static Distribution student_t(double df) { return {Kind::StudentT, df, 0.0}; }

  std::string label() const;
};

enum class Tail { Upper, Lower, TwoSided };

// The tail mass of `dist` beyond `statistic`, in the direction each test
// rejects toward.
double tail_probability(const Distribution& dist, Tail tail, double statistic);

struct TestResult {
  std::string name;
  double statistic = 0.0;
  Distribution distribution;
  Tail tail = Tail::Upper;
  double p_value = 1.0;
  std::string null_hypothesis;
  bool significant_5pct = false;
  std::vector<std::string> flags;
};

TestResult make_test_result(std::string name, double statistic, Distribution dist,
                            Tail tail, std::string null_hypothesis);

}  // namespace verdoorn
