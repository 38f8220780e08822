#include "polyfk/assembly.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "parallel.hpp"
#include "polyfk/errors.hpp"
#include "polyfk/kernels.hpp"

namespace polyfk {

double penalty(const PolyMesh &mesh, const Face &face, const DgSpace &space,
               const PenaltySpec &spec) {
  if (spec.eta0 <= 0.0)
    throw ContractViolation("penalty: eta0 must be positive");
  const double p2 = static_cast<double>(space.degree()) * space.degree();
  if (face.kind == FaceKind::neumann)
    throw ContractViolation("penalty requested on a Neumann face");
  if (face.kind == FaceKind::dirichlet)
    return spec.eta0 * p2 / mesh.element_diameters[face.element_plus];
  const double hp = mesh.element_diameters[face.element_plus];
  const double hm = mesh.element_diameters[face.element_minus];
  const double harmonic = 2.0 * hp * hm / (hp + hm);
  return spec.eta0 * p2 / harmonic;
}

// --- context ----------------------------------------------------------------

AssemblyContext::AssemblyContext(const DgSpace &space, const SubTriangulation &sub, int order)
    : space_(&space), order_(order > 0 ? order : space.default_order()) {
  const PolyMesh &mesh = space.mesh();
  const int n_el = mesh.n_elements();
  const int n_local = space.n_local();

  elem_pts_.resize(n_el);
  elem_w_.resize(n_el);
  elem_vals_.resize(n_el);
  elem_gx_.resize(n_el);
  elem_gy_.resize(n_el);
  basis_int_.resize(n_el);

  parallel_for(n_el, [&](int k) {
    QuadratureRule rule = element_quadrature(mesh, sub, k, order_);
    const int nq = rule.size();
    elem_vals_[k].resize(static_cast<std::size_t>(nq) * n_local);
    elem_gx_[k].resize(static_cast<std::size_t>(nq) * n_local);
    elem_gy_[k].resize(static_cast<std::size_t>(nq) * n_local);
    basis_int_[k].assign(n_local, 0.0);
    std::vector<double> vals;
    std::vector<Point2> grads;
    for (int q = 0; q < nq; ++q) {
      space.eval_basis(k, rule.points[q], vals, grads);
      for (int i = 0; i < n_local; ++i) {
        elem_vals_[k][static_cast<std::size_t>(q) * n_local + i] = vals[i];
        elem_gx_[k][static_cast<std::size_t>(q) * n_local + i] = grads[i].x;
        elem_gy_[k][static_cast<std::size_t>(q) * n_local + i] = grads[i].y;
        basis_int_[k][i] += rule.weights[q] * vals[i];
      }
    }
    elem_pts_[k] = std::move(rule.points);
    elem_w_[k] = std::move(rule.weights);
  });

  const int n_f = mesh.n_faces();
  face_pts_.resize(n_f);
  face_w_.resize(n_f);
  face_vals_[0].resize(n_f);
  face_vals_[1].resize(n_f);

  parallel_for(n_f, [&](int f) {
    const Face &face = mesh.faces[f];
    QuadratureRule rule = face_quadrature(mesh, face, order_);
    const int nq = rule.size();
    std::vector<double> vals;
    for (int side = 0; side < 2; ++side) {
      const int el = side == 0 ? face.element_plus : face.element_minus;
      if (el < 0)
        continue;
      face_vals_[side][f].resize(static_cast<std::size_t>(nq) * n_local);
      for (int q = 0; q < nq; ++q) {
        space.eval_values(el, rule.points[q], vals);
        std::copy(vals.begin(), vals.end(),
                  face_vals_[side][f].begin() + static_cast<std::size_t>(q) * n_local);
      }
    }
    face_pts_[f] = std::move(rule.points);
    face_w_[f] = std::move(rule.weights);
  });
}

const double *AssemblyContext::values(int element, int q) const {
  return elem_vals_[element].data() + static_cast<std::size_t>(q) * space_->n_local();
}
const double *AssemblyContext::grad_x(int element, int q) const {
  return elem_gx_[element].data() + static_cast<std::size_t>(q) * space_->n_local();
}
const double *AssemblyContext::grad_y(int element, int q) const {
  return elem_gy_[element].data() + static_cast<std::size_t>(q) * space_->n_local();
}
const double *AssemblyContext::face_values(int face, int side, int q) const {
  return face_vals_[side][face].data() + static_cast<std::size_t>(q) * space_->n_local();
}

double AssemblyContext::element_mean(int element, const StateVector &C) const {
  const int n_local = space_->n_local();
  const int off = space_->dof_offset(element);
  double integral = 0.0;
  for (int i = 0; i < n_local; ++i)
    integral += basis_int_[element][i] * C[off + i];
  return integral / mesh().element_areas[element];
}

// --- patterns ---------------------------------------------------------------

SparseOperator make_blockdiag_operator(const DgSpace &space) {
  const int n_local = space.n_local();
  std::vector<std::vector<int>> rows(space.n_dofs());
  for (int k = 0; k < space.mesh().n_elements(); ++k) {
    const int off = space.dof_offset(k);
    for (int i = 0; i < n_local; ++i) {
      rows[off + i].resize(n_local);
      for (int j = 0; j < n_local; ++j)
        rows[off + i][j] = off + j;
    }
  }
  return SparseOperator::from_pattern(std::move(rows), true);
}

SparseOperator make_sipg_operator(const DgSpace &space) {
  const PolyMesh &mesh = space.mesh();
  const int n_local = space.n_local();
  std::vector<std::vector<int>> neighbors(mesh.n_elements());
  for (const Face &f : mesh.faces)
    if (!f.is_boundary()) {
      neighbors[f.element_plus].push_back(f.element_minus);
      neighbors[f.element_minus].push_back(f.element_plus);
    }
  std::vector<std::vector<int>> rows(space.n_dofs());
  for (int k = 0; k < mesh.n_elements(); ++k) {
    auto &nb = neighbors[k];
    nb.push_back(k);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (int i = 0; i < n_local; ++i) {
      auto &row = rows[space.dof_offset(k) + i];
      row.reserve(nb.size() * n_local);
      for (int other : nb)
        for (int j = 0; j < n_local; ++j)
          row.push_back(space.dof_offset(other) + j);
    }
  }
  return SparseOperator::from_pattern(std::move(rows), true);
}

// --- volume operators ---------------------------------------------------

namespace {

// Local dense blocks computed in parallel, scattered serially in element
// order so the result is bit-identical to a serial assembly.
template <typename LocalFn>
void assemble_blockdiag(const AssemblyContext &ctx, SparseOperator &op, LocalFn &&local) {
  const DgSpace &space = ctx.space();
  const int n_el = space.mesh().n_elements();
  const int n_local = space.n_local();
  std::vector<std::vector<double>> blocks(n_el);
  parallel_for(n_el, [&](int k) {
    blocks[k].assign(static_cast<std::size_t>(n_local) * n_local, 0.0);
    local(k, blocks[k].data());
  });
  for (int k = 0; k < n_el; ++k) {
    const int off = space.dof_offset(k);
    for (int i = 0; i < n_local; ++i)
      for (int j = 0; j < n_local; ++j)
        op.add(off + i, off + j, blocks[k][static_cast<std::size_t>(i) * n_local + j]);
  }
}

} // namespace

SparseOperator assemble_mass(const AssemblyContext &ctx) {
  SparseOperator M = make_blockdiag_operator(ctx.space());
  const int n_local = ctx.space().n_local();
  assemble_blockdiag(ctx, M, [&](int k, double *block) {
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double *v = ctx.values(k, q);
      kernels::rank1_update(block, n_local, n_local, ctx.weights(k)[q], v, v);
    }
  });
  return M;
}

SparseOperator assemble_linear_reaction(const AssemblyContext &ctx, const ModelParams &params,
                                        double t) {
  SparseOperator M = make_blockdiag_operator(ctx.space());
  const int n_local = ctx.space().n_local();
  assemble_blockdiag(ctx, M, [&](int k, double *block) {
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double a = params.alpha.eval(ctx.points(k)[q], t, k);
      const double *v = ctx.values(k, q);
      kernels::rank1_update(block, n_local, n_local, ctx.weights(k)[q] * a, v, v);
    }
  });
  return M;
}

void assemble_nonlinear_reaction_into(const AssemblyContext &ctx, const ModelParams &params,
                                      const StateVector &C_star, SparseOperator &into,
                                      double t) {
  const DgSpace &space = ctx.space();
  if (static_cast<int>(C_star.size()) != space.n_dofs())
    throw ContractViolation("assemble_nonlinear_reaction: coefficient vector length mismatch");
  into.set_zero();
  const int n_local = space.n_local();
  assemble_blockdiag(ctx, into, [&](int k, double *block) {
    const int off = space.dof_offset(k);
    const std::span<const double> local_c(C_star.data() + off, n_local);
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double *v = ctx.values(k, q);
      const double c_star = kernels::dot(std::span<const double>(v, n_local), local_c);
      const double a = params.alpha.eval(ctx.points(k)[q], t, k);
      kernels::rank1_update(block, n_local, n_local, ctx.weights(k)[q] * a * c_star, v, v);
    }
  });
}

SparseOperator assemble_nonlinear_reaction(const AssemblyContext &ctx, const ModelParams &params,
                                           const StateVector &C_star, double t) {
  SparseOperator M = make_blockdiag_operator(ctx.space());
  assemble_nonlinear_reaction_into(ctx, params, C_star, M, t);
  return M;
}

// --- stiffness ------------------------------------------------------------

namespace {

struct FaceBlocks {
  // pp, pm, mp, mm in that order; boundary faces use pp only.
  std::vector<double> data;
};

// D grad(phi) . n for all local basis functions of `el` at point x.
void flux_traces(const DgSpace &space, const ModelParams &params, int el, const Point2 &x,
                 double t, const Point2 &n, std::vector<double> &values,
                 std::vector<Point2> &grads, std::vector<double> &flux) {
  space.eval_basis(el, x, values, grads);
  const Tensor2 d = diffusion_tensor(params, x, t, el);
  flux.resize(grads.size());
  for (std::size_t i = 0; i < grads.size(); ++i)
    flux[i] = dot(d.apply(grads[i]), n);
}

} // namespace

StiffnessResult assemble_stiffness(const AssemblyContext &ctx, const ModelParams &params,
                                   const PenaltySpec &spec, double t) {
  const DgSpace &space = ctx.space();
  const PolyMesh &mesh = space.mesh();
  const int n_local = space.n_local();
  const int n_el = mesh.n_elements();
  const int n_f = mesh.n_faces();

  StiffnessResult result;
  result.A = make_sipg_operator(space);
  result.dirichlet_load.assign(space.n_dofs(), 0.0);

  // Volume term: grad(w) . D grad(c).
  std::vector<std::vector<double>> vol_blocks(n_el);
  parallel_for(n_el, [&](int k) {
    auto &block = vol_blocks[k];
    block.assign(static_cast<std::size_t>(n_local) * n_local, 0.0);
    std::vector<double> hx(n_local), hy(n_local);
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double w = ctx.weights(k)[q];
      const Tensor2 d = diffusion_tensor(params, ctx.points(k)[q], t, k);
      const double *gx = ctx.grad_x(k, q);
      const double *gy = ctx.grad_y(k, q);
      for (int i = 0; i < n_local; ++i) {
        hx[i] = d.xx * gx[i] + d.xy * gy[i];
        hy[i] = d.xy * gx[i] + d.yy * gy[i];
      }
      kernels::rank1_update(block.data(), n_local, n_local, w, gx, hx.data());
      kernels::rank1_update(block.data(), n_local, n_local, w, gy, hy.data());
    }
  });

  // Face terms of the interior-penalty form.
  std::vector<FaceBlocks> face_blocks(n_f);
  std::vector<std::vector<double>> face_loads(n_f);
  parallel_for(n_f, [&](int f) {
    const Face &face = mesh.faces[f];
    if (face.kind == FaceKind::neumann)
      return;
    const double eta = penalty(mesh, face, space, spec);
    const int nq = ctx.n_face_qp(f);
    const auto &pts = ctx.face_points(f);
    const auto &wts = ctx.face_weights(f);

    std::vector<double> vp, vm, tp, tm;
    std::vector<Point2> gp, gm;

    if (face.is_boundary()) {
      auto &block = face_blocks[f].data;
      block.assign(static_cast<std::size_t>(n_local) * n_local, 0.0);
      auto &load = face_loads[f];
      load.assign(n_local, 0.0);
      for (int q = 0; q < nq; ++q) {
        flux_traces(space, params, face.element_plus, pts[q], t, face.normal, vp, gp, tp);
        const double w = wts[q];
        const double g = params.dirichlet(pts[q], t);
        // eta c w - (D grad c . n) w - c (D grad w . n); data g goes to the RHS.
        kernels::rank1_update(block.data(), n_local, n_local, w * eta, vp.data(), vp.data());
        kernels::rank1_update(block.data(), n_local, n_local, -w, vp.data(), tp.data());
        kernels::rank1_update(block.data(), n_local, n_local, -w, tp.data(), vp.data());
        for (int i = 0; i < n_local; ++i)
          load[i] += w * g * (eta * vp[i] - tp[i]);
      }
      return;
    }

    auto &blocks = face_blocks[f].data;
    blocks.assign(4 * static_cast<std::size_t>(n_local) * n_local, 0.0);
    double *pp = blocks.data();
    double *pm = pp + static_cast<std::size_t>(n_local) * n_local;
    double *mp = pm + static_cast<std::size_t>(n_local) * n_local;
    double *mm = mp + static_cast<std::size_t>(n_local) * n_local;
    for (int q = 0; q < nq; ++q) {
      flux_traces(space, params, face.element_plus, pts[q], t, face.normal, vp, gp, tp);
      flux_traces(space, params, face.element_minus, pts[q], t, face.normal, vm, gm, tm);
      const double w = wts[q];
      // Jumps along the plus normal: [[c]].[[w]] = (c+ - c-)(w+ - w-).
      kernels::rank1_update(pp, n_local, n_local, w * eta, vp.data(), vp.data());
      kernels::rank1_update(pm, n_local, n_local, -w * eta, vp.data(), vm.data());
      kernels::rank1_update(mp, n_local, n_local, -w * eta, vm.data(), vp.data());
      kernels::rank1_update(mm, n_local, n_local, w * eta, vm.data(), vm.data());
      // -{{D grad c}}.[[w]] and the symmetric counterpart.
      kernels::rank1_update(pp, n_local, n_local, -0.5 * w, vp.data(), tp.data());
      kernels::rank1_update(pp, n_local, n_local, -0.5 * w, tp.data(), vp.data());
      kernels::rank1_update(pm, n_local, n_local, -0.5 * w, vp.data(), tm.data());
      kernels::rank1_update(pm, n_local, n_local, 0.5 * w, tp.data(), vm.data());
      kernels::rank1_update(mp, n_local, n_local, 0.5 * w, vm.data(), tp.data());
      kernels::rank1_update(mp, n_local, n_local, -0.5 * w, tm.data(), vp.data());
      kernels::rank1_update(mm, n_local, n_local, 0.5 * w, vm.data(), tm.data());
      kernels::rank1_update(mm, n_local, n_local, 0.5 * w, tm.data(), vm.data());
    }
  });

  // Serial scatter in fixed order.
  for (int k = 0; k < n_el; ++k) {
    const int off = space.dof_offset(k);
    for (int i = 0; i < n_local; ++i)
      for (int j = 0; j < n_local; ++j)
        result.A.add(off + i, off + j, vol_blocks[k][static_cast<std::size_t>(i) * n_local + j]);
  }
  for (int f = 0; f < n_f; ++f) {
    const Face &face = mesh.faces[f];
    if (face_blocks[f].data.empty())
      continue;
    const int offp = space.dof_offset(face.element_plus);
    const double *data = face_blocks[f].data.data();
    const std::size_t bs = static_cast<std::size_t>(n_local) * n_local;
    if (face.is_boundary()) {
      for (int i = 0; i < n_local; ++i)
        for (int j = 0; j < n_local; ++j)
          result.A.add(offp + i, offp + j, data[static_cast<std::size_t>(i) * n_local + j]);
      for (int i = 0; i < n_local; ++i)
        result.dirichlet_load[offp + i] += face_loads[f][i];
      continue;
    }
    const int offm = space.dof_offset(face.element_minus);
    const std::array<std::pair<int, int>, 4> offsets = {
        {{offp, offp}, {offp, offm}, {offm, offp}, {offm, offm}}};
    for (int blk = 0; blk < 4; ++blk)
      for (int i = 0; i < n_local; ++i)
        for (int j = 0; j < n_local; ++j)
          result.A.add(offsets[blk].first + i, offsets[blk].second + j,
                       data[blk * bs + static_cast<std::size_t>(i) * n_local + j]);
  }
  return result;
}

StateVector assemble_dirichlet_load(const AssemblyContext &ctx, const ModelParams &params,
                                    const PenaltySpec &spec, double t) {
  const DgSpace &space = ctx.space();
  const PolyMesh &mesh = space.mesh();
  const int n_local = space.n_local();
  StateVector load(space.n_dofs(), 0.0);

  std::vector<std::vector<double>> face_loads(mesh.n_faces());
  parallel_for(mesh.n_faces(), [&](int f) {
    const Face &face = mesh.faces[f];
    if (face.kind != FaceKind::dirichlet)
      return;
    const double eta = penalty(mesh, face, space, spec);
    std::vector<double> vp, tp;
    std::vector<Point2> gp;
    auto &out = face_loads[f];
    out.assign(n_local, 0.0);
    for (int q = 0; q < ctx.n_face_qp(f); ++q) {
      const Point2 &x = ctx.face_points(f)[q];
      flux_traces(space, params, face.element_plus, x, t, face.normal, vp, gp, tp);
      const double w = ctx.face_weights(f)[q];
      const double g = params.dirichlet(x, t);
      for (int i = 0; i < n_local; ++i)
        out[i] += w * g * (eta * vp[i] - tp[i]);
    }
  });
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (!face_loads[f].empty()) {
      const int off = space.dof_offset(mesh.faces[f].element_plus);
      for (int i = 0; i < n_local; ++i)
        load[off + i] += face_loads[f][i];
    }
  return load;
}

StateVector assemble_load(const AssemblyContext &ctx, const ModelParams &params,
                          const PenaltySpec &spec, double t) {
  const DgSpace &space = ctx.space();
  const PolyMesh &mesh = space.mesh();
  const int n_local = space.n_local();

  StateVector F = assemble_dirichlet_load(ctx, params, spec, t);

  std::vector<std::vector<double>> elem_loads(mesh.n_elements());
  parallel_for(mesh.n_elements(), [&](int k) {
    auto &out = elem_loads[k];
    out.assign(n_local, 0.0);
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double wf = ctx.weights(k)[q] * params.forcing(ctx.points(k)[q], t);
      if (wf != 0.0)
        kernels::axpy(wf, std::span<const double>(ctx.values(k, q), n_local), out);
    }
  });
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const int off = space.dof_offset(k);
    for (int i = 0; i < n_local; ++i)
      F[off + i] += elem_loads[k][i];
  }

  std::vector<double> vals;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face &face = mesh.faces[f];
    if (face.kind != FaceKind::neumann)
      continue;
    const int off = space.dof_offset(face.element_plus);
    for (int q = 0; q < ctx.n_face_qp(f); ++q) {
      const double wphi = ctx.face_weights(f)[q] * params.neumann(ctx.face_points(f)[q], t);
      if (wphi != 0.0) {
        const double *v = ctx.face_values(f, 0, q);
        for (int i = 0; i < n_local; ++i)
          F[off + i] += wphi * v[i];
      }
    }
  }
  return F;
}

StateVector project_l2(const AssemblyContext &ctx, const ScalarField &g, double t) {
  const DgSpace &space = ctx.space();
  const int n_local = space.n_local();
  const int n_el = space.mesh().n_elements();
  StateVector C(space.n_dofs(), 0.0);

  parallel_for(n_el, [&](int k) {
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n_local, n_local);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_local);
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double w = ctx.weights(k)[q];
      const double *v = ctx.values(k, q);
      const double gv = g(ctx.points(k)[q], t);
      for (int i = 0; i < n_local; ++i) {
        rhs[i] += w * gv * v[i];
        for (int j = 0; j < n_local; ++j)
          mass(i, j) += w * v[i] * v[j];
      }
    }
    const Eigen::VectorXd c = mass.ldlt().solve(rhs);
    const int off = space.dof_offset(k);
    for (int i = 0; i < n_local; ++i)
      C[off + i] = c[i];
  });
  return C;
}

} // namespace polyfk
