#pragma once

#include <vector>

#include "tac/material.hpp"
#include "tac/mesh.hpp"
#include "tac/types.hpp"

namespace tac {

/// All P1 forms of the coupled problem on one mesh. Vector fields are stored
/// interleaved: dof 2*i is u_x at node i, dof 2*i+1 is u_y. Surface fields are
/// indexed by the position in mesh.surface_nodes. Immutable after assemble().
struct AssembledForms {
  // scalar bulk forms
  SpMat M_bulk;  // consistent mass
  SpMat K_bulk;  // stiffness (pure Neumann, kernel = constants)
  Vec m_lump;    // lumped bulk mass (row sums of M_bulk)

  // contact-surface forms (1-D interface)
  Mat A_surf;   // surface stiffness, kernel = constants
  Mat M_surf;   // consistent surface mass
  Vec ms_lump;  // lumped surface mass

  // vector elasticity forms on the full interleaved dof set
  SpMat a_form;  // elastic energy  a(u,v) = int eps(u):K_e:eps(v)
  SpMat b_form;  // viscous energy  b(u,v) = int eps(u):K_v:eps(v)
  SpMat D;       // divergence coupling, D(i,J) = int psi_i div(Phi_J)
  SpMat G_vec;   // vector H^1 Gram matrix (mass + full-gradient stiffness)

  std::vector<int> free_dof;    // u-dofs not clamped on Gamma1
  std::vector<int> dof_to_free; // inverse map, -1 for clamped dofs

  // boundary data
  Vec gamma2_lump;                // lumped Gamma2 edge mass per node (0 elsewhere)
  std::vector<int> surf_of_node;  // surface index per node, -1 off GammaC
  std::vector<int> surface_nodes; // node id per surface index (x-ordered)
  Vec2 normal, tangent;

  int num_nodes = 0;
  int num_surface = 0;

  // --- helpers on fields -------------------------------------------------
  double mean_bulk(const Vec& w) const;
  double mean_surface(const Vec& w) const;

  /// Normal/tangential split of the trace of a bulk vector field on GammaC:
  /// u_N = u . n (positive = penetration), u_T = tangential scalar along t.
  Vec normal_trace(const Vec& u) const;
  Vec tangential_trace(const Vec& u) const;
  /// Trace of a bulk scalar field on the surface nodes.
  Vec surface_trace(const Vec& w) const;

  Vec restrict_free(const Vec& full) const;
  Vec extend_free(const Vec& reduced) const;

  /// Smallest generalized eigenvalue of form vs the vector H^1 Gram on the
  /// Gamma1-constrained subspace (dense solve; Korn ellipticity constants).
  double min_constrained_eigenvalue(const SpMat& form) const;
};

/// Assembles every form. Validates mesh conformity and the ellipticity of
/// K_e / K_v by sampling; throws on zero-area triangles.
AssembledForms assemble(const Mesh& mesh, const MaterialModel& material);

/// Per-element squared gradient of a P1 scalar field (gradients are constant
/// on each triangle).
Vec element_gradient_sq(const Mesh& mesh, const Vec& w);

/// Per-element strain components of a P1 vector field.
struct ElementStrains {
  Vec e11, e22, e12;
};
ElementStrains element_strains(const Mesh& mesh, const Vec& u);

}  // namespace tac
