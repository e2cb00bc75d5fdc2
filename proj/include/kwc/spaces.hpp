#pragma once

// Discrete inner products, norms, differentiation and the mass/stiffness
// assemblies on the P1 mesh. The H mass is lumped by default; the consistent
// mass sits behind MassKind for convergence studies. The X = H x H_Gamma inner
// product adds the plain two-point boundary product (H_Gamma ~ R^2).

#include "kwc/fields.hpp"
#include "kwc/linalg.hpp"
#include "kwc/mesh.hpp"

namespace kwc {

enum class MassKind { lumped, consistent };

// lumped weights (h/2, h, ..., h, h/2)
Vec lumped_weights(const Mesh1D& mesh);

// load vector L_j = (f, phi_j)_H for nodal f
Vec apply_mass(const Mesh1D& mesh, MassKind mass, const Vec& nodal);
// interior rows of (f, psi_j)_H for full nodal f (used for V0 pairings)
Vec apply_mass_interior(const Mesh1D& mesh, MassKind mass, const Vec& nodal_full);

double inner_H(const Mesh1D& mesh, MassKind mass, const Vec& f, const Vec& g);
double norm_H(const Mesh1D& mesh, MassKind mass, const Vec& f);

double inner_X(const Mesh1D& mesh, MassKind mass, const BulkBoundaryFn& f, const BulkBoundaryFn& g);
double norm_X(const Mesh1D& mesh, MassKind mass, const BulkBoundaryFn& f);

// forward cell differences (f_{j+1} - f_j)/h, length n_cells
Vec diff_x(const Mesh1D& mesh, const Vec& nodal);
Vec diff_x(const Mesh1D& mesh, const GridFn0& f);

// exact Dirichlet seminorm |d_x f|_H of the P1 interpolant
double seminorm_grad(const Mesh1D& mesh, const Vec& nodal);
double norm_V(const Mesh1D& mesh, MassKind mass, const Vec& f);
double norm_W(const Mesh1D& mesh, MassKind mass, const BulkBoundaryFn& f);
double norm_V0(const Mesh1D& mesh, const GridFn0& f);
double norm_H0(const Mesh1D& mesh, MassKind mass, const GridFn0& f);

// discrete V0* norm of a load vector (interior entries): sqrt(load^T K0^{-1} load)
double dual_norm_V0(const Mesh1D& mesh, const Vec& interior_load);
// V0* norm of an H density: pairs through the mass first
double dual_norm_V0_of_density(const Mesh1D& mesh, MassKind mass, const GridFn0& f);

// assemblies -----------------------------------------------------------------

// mass matrix weighted by a nodal coefficient (identity weight: pass ones)
Tridiag weighted_mass(const Mesh1D& mesh, MassKind mass, const Vec& weight_nodal);
// interior-only version for V0 unknowns
Tridiag weighted_mass_interior(const Mesh1D& mesh, MassKind mass, const Vec& weight_nodal);

// stiffness with cellwise weights: (c dx u, dx phi)_H
Tridiag weighted_stiffness(const Mesh1D& mesh, const Vec& cell_weights);
Tridiag weighted_stiffness_interior(const Mesh1D& mesh, const Vec& cell_weights);
Tridiag stiffness(const Mesh1D& mesh);
Tridiag stiffness_interior(const Mesh1D& mesh);

// helpers for the midpoint-per-cell quadrature of nonlinear flux terms
Vec cell_average(const Vec& nodal);            // (f_c + f_{c+1})/2 per cell
Vec node_average_of_cells(const Mesh1D& mesh, const Vec& cellwise);  // adjacent-cell average per node

}  // namespace kwc
