#pragma once

#include <string>

#include "aiid/classical.hpp"
#include "aiid/states.hpp"
#include "aiid/tensor.hpp"

namespace aiid {

// All numeric output is rounded to 12 significant digits before
// serialization; +/-infinity serializes as the string "inf" / "-inf".
double round_for_output(double v);
std::string format_number(double v);

// Operator files: {"site_dim": d, "n_sites": n, "re": [[...]], "im": [[...]]}
// with row-major d^n x d^n arrays.
SiteOperator read_operator(const std::string& path);
DensityOperator read_density(const std::string& path);
void write_operator(const std::string& path, const SiteOperator& op);

// Projector export: operator format plus a "rank" annotation.
void write_projector(const std::string& path, const SpanProjector& proj);

// Distribution files: {"d": 2, "n": 4, "probs": {"0101": 0.25, ...}}.
ClassicalDistribution read_distribution(const std::string& path);
void write_distribution(const std::string& path,
                        const ClassicalDistribution& dist);

}  // namespace aiid
