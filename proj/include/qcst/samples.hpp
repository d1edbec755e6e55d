// Phase-space sample sets: the data every estimator in the library consumes.

#pragma once

#include "qcst/common.hpp"

#include <string>
#include <vector>

namespace qcst {

enum class SampleSource { analytic_gaussian, rejection, external_file };

inline std::string to_string(SampleSource s) {
  switch (s) {
    case SampleSource::analytic_gaussian: return "analytic-gaussian";
    case SampleSource::rejection: return "rejection";
    case SampleSource::external_file: return "external-file";
  }
  return "unknown";
}

inline SampleSource parse_sample_source(const std::string& s) {
  if (s == "analytic-gaussian") return SampleSource::analytic_gaussian;
  if (s == "rejection") return SampleSource::rejection;
  if (s == "external-file") return SampleSource::external_file;
  throw InvalidArgument("unknown sample source '" + s + "'");
}

/// Ordered phase-space samples alpha_j together with where they came from.
struct PhaseSampleSet {
  std::vector<Complex> samples;
  std::uint64_t seed = 0;
  SampleSource source = SampleSource::external_file;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  void validate() const {
    for (Complex z : samples) require(is_finite(z), "PhaseSampleSet: non-finite sample");
  }
};

}  // namespace qcst
