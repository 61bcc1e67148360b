#pragma once

#include "bouss/integrator.hpp"

#include <iosfwd>
#include <string>

namespace bouss {

// CSV snapshot: one row per vertex, columns x,y,u1,u2,p,theta, values
// printed with 17 significant digits (decimal round trip)
void export_fields_csv(const FieldState& state, const DiscreteSpaces& sp, std::ostream& os);

// VTU unstructured-grid XML snapshot (ascii), points = vertices
void export_fields_vtu(const FieldState& state, const DiscreteSpaces& sp, std::ostream& os);

// dispatching writer; format is "csv" or "vtu"; returns the file name used
std::string export_fields(const FieldState& state, const DiscreteSpaces& sp,
                          const std::string& dir, const std::string& stem,
                          const std::string& format);

}  // namespace bouss
