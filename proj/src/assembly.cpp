#include "tac/assembly.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace tac {

namespace {

struct TriGeom {
  double area;
  double bx[3], by[3];  // gradients of the barycentric basis
};

TriGeom tri_geometry(const Mesh& mesh, const std::array<int, 3>& t) {
  const Vec2 &p0 = mesh.nodes[t[0]], &p1 = mesh.nodes[t[1]], &p2 = mesh.nodes[t[2]];
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  if (!(det > 1e-300)) throw std::runtime_error("assemble: zero-area or inverted triangle");
  TriGeom g;
  g.area = 0.5 * det;
  g.bx[0] = (p1.y() - p2.y()) / det;
  g.by[0] = (p2.x() - p1.x()) / det;
  g.bx[1] = (p2.y() - p0.y()) / det;
  g.by[1] = (p0.x() - p2.x()) / det;
  g.bx[2] = (p0.y() - p1.y()) / det;
  g.by[2] = (p1.x() - p0.x()) / det;
  return g;
}

}  // namespace

AssembledForms assemble(const Mesh& mesh, const MaterialModel& material) {
  mesh.validate();
  {
    // cheap ellipticity screen before building energy forms
    auto rep = validate_hypotheses(material);
    for (const auto& it : rep.items) {
      if (!it.pass && (it.name.rfind("K_e", 0) == 0 || it.name.rfind("K_v", 0) == 0))
        throw std::runtime_error("assemble: material tensor check failed: " + it.name);
    }
  }

  AssembledForms f;
  const int nn = mesh.num_nodes();
  const int ns = mesh.num_surface_nodes();
  f.num_nodes = nn;
  f.num_surface = ns;
  f.normal = mesh.contact_normal();
  f.tangent = mesh.contact_tangent();

  std::vector<Triplet> tm, tk, ta, tb, td, tg;
  f.m_lump = Vec::Zero(nn);

  for (const auto& t : mesh.triangles) {
    const TriGeom g = tri_geometry(mesh, t);
    const double A = g.area;
    for (int i = 0; i < 3; ++i) {
      f.m_lump[t[i]] += A / 3.0;
      for (int j = 0; j < 3; ++j) {
        tm.emplace_back(t[i], t[j], A / 12.0 * (i == j ? 2.0 : 1.0));
        tk.emplace_back(t[i], t[j], A * (g.bx[i] * g.bx[j] + g.by[i] * g.by[j]));
      }
    }
    // strain-displacement rows (e_xx, e_yy, gamma_xy), constant on the element
    Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
      B(0, 2 * i) = g.bx[i];
      B(1, 2 * i + 1) = g.by[i];
      B(2, 2 * i) = g.by[i];
      B(2, 2 * i + 1) = g.bx[i];
    }
    const Eigen::Matrix<double, 6, 6> Ae = A * B.transpose() * material.K_e * B;
    const Eigen::Matrix<double, 6, 6> Be = A * B.transpose() * material.K_v * B;
    for (int i = 0; i < 3; ++i) {
      for (int ci = 0; ci < 2; ++ci) {
        const int I = 2 * t[i] + ci;
        for (int j = 0; j < 3; ++j) {
          for (int cj = 0; cj < 2; ++cj) {
            const int J = 2 * t[j] + cj;
            ta.emplace_back(I, J, Ae(2 * i + ci, 2 * j + cj));
            tb.emplace_back(I, J, Be(2 * i + ci, 2 * j + cj));
            // vector H^1 Gram: componentwise mass + full gradient
            double gij = (ci == cj)
                             ? A / 12.0 * (i == j ? 2.0 : 1.0) +
                                   A * (g.bx[i] * g.bx[j] + g.by[i] * g.by[j])
                             : 0.0;
            if (gij != 0.0) tg.emplace_back(I, J, gij);
          }
        }
      }
      // D(i, J) = int psi_i div(Phi_J); div of one P1 vector basis is constant
      for (int j = 0; j < 3; ++j) {
        td.emplace_back(t[i], 2 * t[j], g.bx[j] * A / 3.0);
        td.emplace_back(t[i], 2 * t[j] + 1, g.by[j] * A / 3.0);
      }
    }
  }

  f.M_bulk.resize(nn, nn);
  f.M_bulk.setFromTriplets(tm.begin(), tm.end());
  f.K_bulk.resize(nn, nn);
  f.K_bulk.setFromTriplets(tk.begin(), tk.end());
  f.a_form.resize(2 * nn, 2 * nn);
  f.a_form.setFromTriplets(ta.begin(), ta.end());
  f.b_form.resize(2 * nn, 2 * nn);
  f.b_form.setFromTriplets(tb.begin(), tb.end());
  f.D.resize(nn, 2 * nn);
  f.D.setFromTriplets(td.begin(), td.end());
  f.G_vec.resize(2 * nn, 2 * nn);
  f.G_vec.setFromTriplets(tg.begin(), tg.end());

  // surface forms on the ordered GammaC nodes
  f.A_surf = Mat::Zero(ns, ns);
  f.M_surf = Mat::Zero(ns, ns);
  f.ms_lump = Vec::Zero(ns);
  for (int k = 0; k + 1 < ns; ++k) {
    const double len =
        (mesh.nodes[mesh.surface_nodes[k + 1]] - mesh.nodes[mesh.surface_nodes[k]]).norm();
    f.A_surf(k, k) += 1.0 / len;
    f.A_surf(k + 1, k + 1) += 1.0 / len;
    f.A_surf(k, k + 1) -= 1.0 / len;
    f.A_surf(k + 1, k) -= 1.0 / len;
    f.M_surf(k, k) += len / 3.0;
    f.M_surf(k + 1, k + 1) += len / 3.0;
    f.M_surf(k, k + 1) += len / 6.0;
    f.M_surf(k + 1, k) += len / 6.0;
    f.ms_lump[k] += 0.5 * len;
    f.ms_lump[k + 1] += 0.5 * len;
  }

  f.surf_of_node.assign(nn, -1);
  f.surface_nodes = mesh.surface_nodes;
  for (int k = 0; k < ns; ++k) f.surf_of_node[mesh.surface_nodes[k]] = k;

  f.gamma2_lump = Vec::Zero(nn);
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == BoundaryTag::Gamma2) {
      const double len = (mesh.nodes[e.b] - mesh.nodes[e.a]).norm();
      f.gamma2_lump[e.a] += 0.5 * len;
      f.gamma2_lump[e.b] += 0.5 * len;
    }
  }

  const auto clamped = mesh.gamma1_node_mask();
  f.dof_to_free.assign(2 * nn, -1);
  for (int i = 0; i < nn; ++i) {
    if (!clamped[i]) {
      for (int c = 0; c < 2; ++c) {
        f.dof_to_free[2 * i + c] = static_cast<int>(f.free_dof.size());
        f.free_dof.push_back(2 * i + c);
      }
    }
  }
  return f;
}

double AssembledForms::mean_bulk(const Vec& w) const {
  return m_lump.dot(w) / m_lump.sum();
}

double AssembledForms::mean_surface(const Vec& w) const {
  return ms_lump.dot(w) / ms_lump.sum();
}

Vec AssembledForms::normal_trace(const Vec& u) const {
  Vec out(num_surface);
  for (int k = 0; k < num_surface; ++k) {
    const int i = surface_nodes[k];
    out[k] = u[2 * i] * normal.x() + u[2 * i + 1] * normal.y();
  }
  return out;
}

Vec AssembledForms::tangential_trace(const Vec& u) const {
  Vec out(num_surface);
  for (int k = 0; k < num_surface; ++k) {
    const int i = surface_nodes[k];
    out[k] = u[2 * i] * tangent.x() + u[2 * i + 1] * tangent.y();
  }
  return out;
}

Vec AssembledForms::surface_trace(const Vec& w) const {
  Vec out(num_surface);
  for (int i = 0; i < num_nodes; ++i)
    if (surf_of_node[i] >= 0) out[surf_of_node[i]] = w[i];
  return out;
}

Vec AssembledForms::restrict_free(const Vec& full) const {
  Vec r(free_dof.size());
  for (size_t k = 0; k < free_dof.size(); ++k) r[k] = full[free_dof[k]];
  return r;
}

Vec AssembledForms::extend_free(const Vec& reduced) const {
  Vec full = Vec::Zero(2 * num_nodes);
  for (size_t k = 0; k < free_dof.size(); ++k) full[free_dof[k]] = reduced[k];
  return full;
}

Vec element_gradient_sq(const Mesh& mesh, const Vec& w) {
  Vec out(mesh.triangles.size());
  for (size_t e = 0; e < mesh.triangles.size(); ++e) {
    const TriGeom g = tri_geometry(mesh, mesh.triangles[e]);
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      gx += g.bx[i] * w[mesh.triangles[e][i]];
      gy += g.by[i] * w[mesh.triangles[e][i]];
    }
    out[e] = gx * gx + gy * gy;
  }
  return out;
}

ElementStrains element_strains(const Mesh& mesh, const Vec& u) {
  const size_t ne = mesh.triangles.size();
  ElementStrains s{Vec::Zero(ne), Vec::Zero(ne), Vec::Zero(ne)};
  for (size_t e = 0; e < ne; ++e) {
    const TriGeom g = tri_geometry(mesh, mesh.triangles[e]);
    for (int i = 0; i < 3; ++i) {
      const int n = mesh.triangles[e][i];
      s.e11[e] += g.bx[i] * u[2 * n];
      s.e22[e] += g.by[i] * u[2 * n + 1];
      s.e12[e] += 0.5 * (g.by[i] * u[2 * n] + g.bx[i] * u[2 * n + 1]);
    }
  }
  return s;
}

double AssembledForms::min_constrained_eigenvalue(const SpMat& form) const {
  const int nf = static_cast<int>(free_dof.size());
  Mat A = Mat::Zero(nf, nf), G = Mat::Zero(nf, nf);
  for (int k = 0; k < form.outerSize(); ++k) {
    for (SpMat::InnerIterator it(form, k); it; ++it) {
      const int I = dof_to_free[it.row()], J = dof_to_free[it.col()];
      if (I >= 0 && J >= 0) A(I, J) += it.value();
    }
  }
  for (int k = 0; k < G_vec.outerSize(); ++k) {
    for (SpMat::InnerIterator it(G_vec, k); it; ++it) {
      const int I = dof_to_free[it.row()], J = dof_to_free[it.col()];
      if (I >= 0 && J >= 0) G(I, J) += it.value();
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()),
                                                   0.5 * (G + G.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace tac
