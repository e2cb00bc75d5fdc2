#pragma once

// Grid functions on the P1 mesh. Nodal values stand in for H and V; interior
// values with implicit zero endpoints stand in for V0; the coupled
// bulk/boundary pair realizes the space W = {[w, w_Gamma] : w|_Gamma = w_Gamma}.

#include <cmath>
#include <string>
#include <vector>

#include "kwc/errors.hpp"
#include "kwc/mesh.hpp"

namespace kwc {

using Vec = std::vector<double>;

inline void require_size(const Vec& v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                         std::to_string(v.size()));
}

inline void require_finite(const Vec& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw ConfigError(std::string(what) + ": non-finite value");
}

struct BoundaryPair {
  double at0 = 0.0;
  double at1 = 0.0;

  double operator()(int ell) const { return ell == 0 ? at0 : at1; }
};

// Values at interior nodes only; both endpoints identically zero.
struct GridFn0 {
  Vec interior;

  GridFn0() = default;
  explicit GridFn0(const Mesh1D& mesh) : interior(mesh.n_interior(), 0.0) {}
  GridFn0(const Mesh1D& mesh, Vec vals) : interior(std::move(vals)) {
    require_size(interior, mesh.n_interior(), "GridFn0");
    require_finite(interior, "GridFn0");
  }

  // padded nodal vector including the zero endpoints
  Vec full() const {
    Vec out(interior.size() + 2, 0.0);
    for (std::size_t j = 0; j < interior.size(); ++j) out[j + 1] = interior[j];
    return out;
  }
};

// Trace-compatible pair [w, w_Gamma]; construction rejects incompatible data.
struct BulkBoundaryFn {
  Vec bulk;
  BoundaryPair boundary;

  BulkBoundaryFn() = default;

  BulkBoundaryFn(const Mesh1D& mesh, Vec bulk_vals, BoundaryPair bdry)
      : bulk(std::move(bulk_vals)), boundary(bdry) {
    require_size(bulk, static_cast<std::size_t>(mesh.n_nodes()), "BulkBoundaryFn");
    require_finite(bulk, "BulkBoundaryFn");
    if (bulk.front() != boundary.at0 || bulk.back() != boundary.at1)
      throw ConfigError("BulkBoundaryFn: trace incompatibility, bulk|_Gamma != boundary values");
  }

  static BulkBoundaryFn from_bulk(const Mesh1D& mesh, Vec bulk_vals) {
    BoundaryPair bdry{bulk_vals.front(), bulk_vals.back()};
    return BulkBoundaryFn(mesh, std::move(bulk_vals), bdry);
  }
};

}  // namespace kwc
