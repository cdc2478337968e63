#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace locrho {

/// Pass/fail evidence from a verifier: named scalar metrics in insertion
/// order plus free-form notes.
struct VerificationReport {
  std::string check;
  bool pass = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;
  std::optional<std::uint64_t> seed;

  void add_metric(std::string name, double value) { metrics.emplace_back(std::move(name), value); }
  /// NaN if the metric is absent.
  double metric(const std::string& name) const;
};

}  // namespace locrho
