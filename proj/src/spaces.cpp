#include "kwc/spaces.hpp"

#include <cmath>
#include <numeric>

namespace kwc {

Vec lumped_weights(const Mesh1D& mesh) {
  Vec w(mesh.n_nodes(), mesh.h);
  w.front() = 0.5 * mesh.h;
  w.back() = 0.5 * mesh.h;
  return w;
}

Vec apply_mass(const Mesh1D& mesh, MassKind mass, const Vec& nodal) {
  require_size(nodal, static_cast<std::size_t>(mesh.n_nodes()), "apply_mass");
  const int n = mesh.n_nodes();
  Vec out(n, 0.0);
  if (mass == MassKind::lumped) {
    const Vec w = lumped_weights(mesh);
    for (int j = 0; j < n; ++j) out[j] = w[j] * nodal[j];
  } else {
    const double h6 = mesh.h / 6.0;
    for (int c = 0; c < mesh.n_cells; ++c) {
      out[c] += h6 * (2.0 * nodal[c] + nodal[c + 1]);
      out[c + 1] += h6 * (nodal[c] + 2.0 * nodal[c + 1]);
    }
  }
  return out;
}

Vec apply_mass_interior(const Mesh1D& mesh, MassKind mass, const Vec& nodal_full) {
  const Vec full = apply_mass(mesh, mass, nodal_full);
  return Vec(full.begin() + 1, full.end() - 1);
}

double inner_H(const Mesh1D& mesh, MassKind mass, const Vec& f, const Vec& g) {
  require_size(f, static_cast<std::size_t>(mesh.n_nodes()), "inner_H");
  require_size(g, static_cast<std::size_t>(mesh.n_nodes()), "inner_H");
  const Vec mg = apply_mass(mesh, mass, g);
  return std::inner_product(f.begin(), f.end(), mg.begin(), 0.0);
}

double norm_H(const Mesh1D& mesh, MassKind mass, const Vec& f) {
  return std::sqrt(std::max(0.0, inner_H(mesh, mass, f, f)));
}

double inner_X(const Mesh1D& mesh, MassKind mass, const BulkBoundaryFn& f, const BulkBoundaryFn& g) {
  return inner_H(mesh, mass, f.bulk, g.bulk) + f.boundary.at0 * g.boundary.at0 +
         f.boundary.at1 * g.boundary.at1;
}

double norm_X(const Mesh1D& mesh, MassKind mass, const BulkBoundaryFn& f) {
  return std::sqrt(std::max(0.0, inner_X(mesh, mass, f, f)));
}

Vec diff_x(const Mesh1D& mesh, const Vec& nodal) {
  require_size(nodal, static_cast<std::size_t>(mesh.n_nodes()), "diff_x");
  Vec d(mesh.n_cells, 0.0);
  for (int c = 0; c < mesh.n_cells; ++c) d[c] = (nodal[c + 1] - nodal[c]) / mesh.h;
  return d;
}

Vec diff_x(const Mesh1D& mesh, const GridFn0& f) { return diff_x(mesh, f.full()); }

double seminorm_grad(const Mesh1D& mesh, const Vec& nodal) {
  const Vec d = diff_x(mesh, nodal);
  double s = 0.0;
  for (double v : d) s += v * v;
  return std::sqrt(s * mesh.h);
}

double norm_V(const Mesh1D& mesh, MassKind mass, const Vec& f) {
  const double g = seminorm_grad(mesh, f);
  return std::sqrt(inner_H(mesh, mass, f, f) + g * g);
}

double norm_W(const Mesh1D& mesh, MassKind mass, const BulkBoundaryFn& f) {
  const double v = norm_V(mesh, mass, f.bulk);
  return std::sqrt(v * v + f.boundary.at0 * f.boundary.at0 + f.boundary.at1 * f.boundary.at1);
}

double norm_V0(const Mesh1D& mesh, const GridFn0& f) { return seminorm_grad(mesh, f.full()); }

double norm_H0(const Mesh1D& mesh, MassKind mass, const GridFn0& f) {
  return norm_H(mesh, mass, f.full());
}

double dual_norm_V0(const Mesh1D& mesh, const Vec& interior_load) {
  require_size(interior_load, static_cast<std::size_t>(mesh.n_interior()), "dual_norm_V0");
  const Tridiag k0 = stiffness_interior(mesh);
  const Vec y = k0.solve(interior_load);
  const double v = std::inner_product(interior_load.begin(), interior_load.end(), y.begin(), 0.0);
  return std::sqrt(std::max(0.0, v));
}

double dual_norm_V0_of_density(const Mesh1D& mesh, MassKind mass, const GridFn0& f) {
  return dual_norm_V0(mesh, apply_mass_interior(mesh, mass, f.full()));
}

Tridiag weighted_mass(const Mesh1D& mesh, MassKind mass, const Vec& weight_nodal) {
  require_size(weight_nodal, static_cast<std::size_t>(mesh.n_nodes()), "weighted_mass");
  Tridiag m(mesh.n_nodes());
  if (mass == MassKind::lumped) {
    const Vec w = lumped_weights(mesh);
    for (int j = 0; j < mesh.n_nodes(); ++j) m.diag[j] = w[j] * weight_nodal[j];
    return m;
  }
  // exact cell integrals of g*u*phi with g, u both P1 (degree-3 polynomials)
  for (int c = 0; c < mesh.n_cells; ++c) {
    const double ga = weight_nodal[c], gb = weight_nodal[c + 1], h = mesh.h;
    const double maa = h * (ga / 4.0 + gb / 12.0);
    const double mab = h * (ga + gb) / 12.0;
    const double mbb = h * (ga / 12.0 + gb / 4.0);
    m.diag[c] += maa;
    m.diag[c + 1] += mbb;
    m.upper[c] += mab;
    m.lower[c + 1] += mab;
  }
  return m;
}

Tridiag weighted_mass_interior(const Mesh1D& mesh, MassKind mass, const Vec& weight_nodal) {
  const Tridiag full = weighted_mass(mesh, mass, weight_nodal);
  const int m = mesh.n_interior();
  Tridiag out(m);
  for (int i = 0; i < m; ++i) {
    out.diag[i] = full.diag[i + 1];
    out.lower[i] = (i > 0) ? full.lower[i + 1] : 0.0;
    out.upper[i] = (i + 1 < m) ? full.upper[i + 1] : 0.0;
  }
  return out;
}

Tridiag weighted_stiffness(const Mesh1D& mesh, const Vec& cell_weights) {
  require_size(cell_weights, static_cast<std::size_t>(mesh.n_cells), "weighted_stiffness");
  Tridiag k(mesh.n_nodes());
  for (int c = 0; c < mesh.n_cells; ++c) {
    const double s = cell_weights[c] / mesh.h;
    k.diag[c] += s;
    k.diag[c + 1] += s;
    k.upper[c] -= s;
    k.lower[c + 1] -= s;
  }
  return k;
}

Tridiag weighted_stiffness_interior(const Mesh1D& mesh, const Vec& cell_weights) {
  const Tridiag full = weighted_stiffness(mesh, cell_weights);
  const int m = mesh.n_interior();
  Tridiag out(m);
  for (int i = 0; i < m; ++i) {
    out.diag[i] = full.diag[i + 1];
    out.lower[i] = (i > 0) ? full.lower[i + 1] : 0.0;
    out.upper[i] = (i + 1 < m) ? full.upper[i + 1] : 0.0;
  }
  return out;
}

Tridiag stiffness(const Mesh1D& mesh) { return weighted_stiffness(mesh, Vec(mesh.n_cells, 1.0)); }

Tridiag stiffness_interior(const Mesh1D& mesh) {
  return weighted_stiffness_interior(mesh, Vec(mesh.n_cells, 1.0));
}

Vec cell_average(const Vec& nodal) {
  Vec out(nodal.size() - 1, 0.0);
  for (std::size_t c = 0; c + 1 < nodal.size(); ++c) out[c] = 0.5 * (nodal[c] + nodal[c + 1]);
  return out;
}

Vec node_average_of_cells(const Mesh1D& mesh, const Vec& cellwise) {
  require_size(cellwise, static_cast<std::size_t>(mesh.n_cells), "node_average_of_cells");
  Vec out(mesh.n_nodes(), 0.0);
  out.front() = cellwise.front();
  out.back() = cellwise.back();
  for (int j = 1; j < mesh.n_cells; ++j) out[j] = 0.5 * (cellwise[j - 1] + cellwise[j]);
  return out;
}

}  // namespace kwc
