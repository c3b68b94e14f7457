#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gaan {

struct GradCheckClass {
  std::string cls;
  int entries = 0;        // scalar entries compared
  double max_rel_err = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckClass> classes;
  bool pass = true;
  double tolerance = 1e-4;
};

// Compares the analytic gradient of the training loss (multitask label loss
// plus weighted reconstruction loss, training-mode norm statistics) against
// central finite differences (step 1e-6) on a fixed two-graph batch that
// exercises every parameter class: leaf folds, a mutual pair merge, a ring
// collapse, learnable lambda, and the autoencoder.
//
// corrupt_class is a test hook: when non-empty, the analytic gradient of the
// first parameter in that class is perturbed so the report names a failure.
GradCheckReport run_gradcheck(std::uint64_t seed, const std::string& corrupt_class = "");

std::string format_gradcheck_report(const GradCheckReport& report);

}  // namespace gaan
