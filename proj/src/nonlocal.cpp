#include "tac/nonlocal.hpp"

#include <cmath>
#include <stdexcept>

namespace tac {

KernelMatrix build_kernel(const Mesh& mesh, const AssembledForms& forms, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("build_kernel: rho must be > 0");
  return build_kernel(mesh, forms, [rho](double x, double y) {
    const double d = x - y;
    return std::exp(-d * d / (rho * rho));
  });
}

KernelMatrix build_kernel(const Mesh& mesh, const AssembledForms& forms,
                          const std::function<double(double, double)>& weight) {
  const int ns = forms.num_surface;
  KernelMatrix k;
  k.W = Mat::Zero(ns, ns);
  k.ell_norms = Vec::Zero(ns);
  for (int i = 0; i < ns; ++i) {
    const double xi = mesh.nodes[mesh.surface_nodes[i]].x();
    double n2 = 0.0;
    for (int j = 0; j < ns; ++j) {
      const double xj = mesh.nodes[mesh.surface_nodes[j]].x();
      const double w = weight(xi, xj);
      k.W(i, j) = w * forms.ms_lump[j];
      n2 += w * w * forms.ms_lump[j];
    }
    k.ell_norms[i] = std::sqrt(n2);
  }
  k.w_dir = forms.tangent;
  return k;
}

void advance(HistoryAccumulator& h, const KernelMatrix& kernel, const Vec& eta, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance: dt must be > 0");
  h.acc += dt * (kernel.W * eta);
  h.t_now += dt;
}

Vec eval_R_magnitude(const HistoryAccumulator& h) { return h.acc.cwiseAbs(); }

Vec eval_R_magnitude(const HistoryAccumulator& h, const KernelMatrix& kernel,
                     const Vec& eta_slab, double dt_slab) {
  return (h.acc + dt_slab * (kernel.W * eta_slab)).cwiseAbs();
}

Mat eval_R(const HistoryAccumulator& h, const KernelMatrix& kernel) {
  Mat R(h.acc.size(), 2);
  R.col(0) = h.acc * kernel.w_dir.x();
  R.col(1) = h.acc * kernel.w_dir.y();
  return R;
}

}  // namespace tac
