#pragma once

#include <string>

#include "polyfk/dgspace.hpp"
#include "polyfk/sparse.hpp"

namespace polyfk {

// Legacy unstructured-grid text snapshot: the sub-triangulated geometry with
// per-vertex values of c_h evaluated element-locally. Vertices shared by
// neighboring elements are written once per element, so the file preserves
// the DG discontinuities.
void write_snapshot(const DgSpace &space, const SubTriangulation &sub, const StateVector &C,
                    double t, const std::string &path);

} // namespace polyfk
