#pragma once

#include <functional>

#include "tac/assembly.hpp"
#include "tac/types.hpp"

namespace tac {

/// Discrete kernel of the history-dependent surface operator
///   R(eta)(x_i, t) = (int_0^t <eta(.,s), l(x_i,.)> ds) * w,
/// with W(i,j) = weight(x_i, x_j) * ms_j realizing the surface pairing
/// against the scalar normal-traction field, and w the fixed unit direction
/// (the contact tangent).
struct KernelMatrix {
  Mat W;          // pairing matrix including lumped surface masses
  Vec ell_norms;  // ||l(x_i, .)||_{L2(GammaC)} per surface node
  Vec2 w_dir;
};

/// Gaussian kernel weight exp(-|x-y|^2 / rho^2) by default; tests may pass a
/// custom weight function of the two surface x-coordinates.
KernelMatrix build_kernel(const Mesh& mesh, const AssembledForms& forms, double rho);
KernelMatrix build_kernel(const Mesh& mesh, const AssembledForms& forms,
                          const std::function<double(double, double)>& weight);

/// Running value of int_0^t <eta(.,s), l(x_i,.)> ds per surface node.
/// Owned by the time loop; reset only at simulation start.
struct HistoryAccumulator {
  Vec acc;
  double t_now = 0.0;

  static HistoryAccumulator zero(int num_surface) {
    return {Vec::Zero(num_surface), 0.0};
  }
};

/// Rectangle-rule slab update: acc_i += dt * sum_j W(i,j) eta_j.
void advance(HistoryAccumulator& h, const KernelMatrix& kernel, const Vec& eta, double dt);

/// R evaluated from an accumulator (optionally with a provisional newest slab
/// supplied by the caller): R(x_i) = acc_i * w_dir, |R|(x_i) = |acc_i|.
Vec eval_R_magnitude(const HistoryAccumulator& h);
Vec eval_R_magnitude(const HistoryAccumulator& h, const KernelMatrix& kernel,
                     const Vec& eta_slab, double dt_slab);
Mat eval_R(const HistoryAccumulator& h, const KernelMatrix& kernel);  // num_surface x 2

}  // namespace tac
