#pragma once

#include <vector>

#include "sv/fields.hpp"

namespace sv {

/// Closed-form test fields on the unit square. The first five are the
/// default set for identity checks; "kink" has limited Sobolev regularity
/// (about H^{2.1}) for reduced-order studies.
const std::vector<AnalyticField>& field_catalog();

const AnalyticField& field_by_name(const std::string& name);

/// Smooth bump supported in the axis-aligned box, for locality experiments.
AnalyticField box_bump(double x0, double x1, double y0, double y1);

/// Finite-difference check of the analytic divergence at sample points.
double catalog_divergence_mismatch(const AnalyticField& f, int points,
                                   unsigned long long seed);

}  // namespace sv
