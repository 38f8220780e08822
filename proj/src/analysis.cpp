#include "polyfk/analysis.hpp"

#include <cmath>
#include <ostream>

#include "polyfk/errors.hpp"
#include "polyfk/kernels.hpp"

namespace polyfk {

double DgNormParts::dg_norm() const { return std::sqrt(grad_sq) + std::sqrt(jump_sq); }
double DgNormParts::dg_norm_sq() const {
  const double n = dg_norm();
  return n * n;
}

namespace {

// Shared core: DG norm pieces of (c_h - r) where r is an optional smooth
// reference field. Interior jumps of r cancel between the two traces, so
// only c_h enters there; Dirichlet jumps subtract r's trace.
DgNormParts dg_parts_impl(const AssemblyContext &ctx, const ModelParams &params,
                          const PenaltySpec &spec, const StateVector &C,
                          const ScalarField *exact, const VectorField *exact_grad, double t) {
  const DgSpace &space = ctx.space();
  const PolyMesh &mesh = space.mesh();
  const int n_local = space.n_local();
  if (static_cast<int>(C.size()) != space.n_dofs())
    throw ContractViolation("dg_norm: coefficient vector length mismatch");

  DgNormParts parts;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const int off = space.dof_offset(k);
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double *gx = ctx.grad_x(k, q);
      const double *gy = ctx.grad_y(k, q);
      Point2 g{0.0, 0.0};
      for (int i = 0; i < n_local; ++i) {
        g.x += C[off + i] * gx[i];
        g.y += C[off + i] * gy[i];
      }
      if (exact_grad)
        g = g - (*exact_grad)(ctx.points(k)[q], t);
      const Tensor2 d = diffusion_tensor(params, ctx.points(k)[q], t, k);
      parts.grad_sq += ctx.weights(k)[q] * dot(g, d.apply(g));
    }
  }

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face &face = mesh.faces[f];
    if (face.kind == FaceKind::neumann)
      continue;
    const double eta = penalty(mesh, face, space, spec);
    const int offp = space.dof_offset(face.element_plus);
    for (int q = 0; q < ctx.n_face_qp(f); ++q) {
      const double *vp = ctx.face_values(f, 0, q);
      double jump = kernels::dot(std::span<const double>(vp, n_local),
                                 std::span<const double>(C.data() + offp, n_local));
      if (face.is_boundary()) {
        if (exact)
          jump -= (*exact)(ctx.face_points(f)[q], t);
      } else {
        const int offm = space.dof_offset(face.element_minus);
        const double *vm = ctx.face_values(f, 1, q);
        jump -= kernels::dot(std::span<const double>(vm, n_local),
                             std::span<const double>(C.data() + offm, n_local));
      }
      parts.jump_sq += ctx.face_weights(f)[q] * eta * jump * jump;
    }
  }
  return parts;
}

} // namespace

DgNormParts dg_norm_parts(const AssemblyContext &ctx, const ModelParams &params,
                          const PenaltySpec &spec, const StateVector &C, double t) {
  return dg_parts_impl(ctx, params, spec, C, nullptr, nullptr, t);
}

double dg_norm(const AssemblyContext &ctx, const ModelParams &params, const PenaltySpec &spec,
               const StateVector &C, double t) {
  return dg_norm_parts(ctx, params, spec, C, t).dg_norm();
}

DgNormParts dg_error_parts(const AssemblyContext &ctx, const ModelParams &params,
                           const PenaltySpec &spec, const StateVector &C,
                           const ScalarField &exact, const VectorField &exact_grad, double t) {
  return dg_parts_impl(ctx, params, spec, C, &exact, &exact_grad, t);
}

double l2_norm(const AssemblyContext &ctx, const StateVector &C) {
  const DgSpace &space = ctx.space();
  const int n_local = space.n_local();
  double sum = 0.0;
  for (int k = 0; k < space.mesh().n_elements(); ++k) {
    const int off = space.dof_offset(k);
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double v = kernels::dot(std::span<const double>(ctx.values(k, q), n_local),
                                    std::span<const double>(C.data() + off, n_local));
      sum += ctx.weights(k)[q] * v * v;
    }
  }
  return std::sqrt(sum);
}

double l2_error(const AssemblyContext &ctx, const StateVector &C, const ScalarField &exact,
                double t) {
  const DgSpace &space = ctx.space();
  const int n_local = space.n_local();
  double sum = 0.0;
  for (int k = 0; k < space.mesh().n_elements(); ++k) {
    const int off = space.dof_offset(k);
    for (int q = 0; q < ctx.n_qp(k); ++q) {
      const double v = kernels::dot(std::span<const double>(ctx.values(k, q), n_local),
                                    std::span<const double>(C.data() + off, n_local)) -
                       exact(ctx.points(k)[q], t);
      sum += ctx.weights(k)[q] * v * v;
    }
  }
  return std::sqrt(sum);
}

double energy_error(const Trajectory &traj) {
  if (traj.dg_error_sq.empty())
    throw ContractViolation("energy_error: trajectory has no error probe data");
  return std::sqrt(traj.final_l2_error * traj.final_l2_error + traj.dg_error_sq_integral);
}

double energy_error(const Trajectory &traj, const AssemblyContext &ctx,
                    const ModelParams &params, const PenaltySpec &spec, const ScalarField &exact,
                    const VectorField &exact_grad) {
  if (traj.states.size() != traj.times.size() || traj.states.size() < 2)
    throw ContractViolation("energy_error: trajectory must store every step");
  double integral = 0.0;
  double prev = 0.0;
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double e_sq = dg_error_parts(ctx, params, spec, traj.states[n], exact, exact_grad,
                                       traj.times[n])
                            .dg_norm_sq();
    if (n > 0)
      integral += 0.5 * (traj.times[n] - traj.times[n - 1]) * (prev + e_sq);
    prev = e_sq;
  }
  const double l2 = l2_error(ctx, traj.states.back(), exact, traj.times.back());
  return std::sqrt(l2 * l2 + integral);
}

void convergence_rates(RateTable &table) {
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto &row = table.rows[i];
    row.rate = std::numeric_limits<double>::quiet_NaN();
    if (i == 0)
      continue;
    const auto &prev = table.rows[i - 1];
    if (prev.error <= 0.0 || row.error <= 0.0)
      continue; // zero-error rows are excluded
    row.rate = std::log(prev.error / row.error) / std::log(prev.refinement / row.refinement);
  }
}

LogFit log_error_fit(const RateTable &table) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (const auto &row : table.rows) {
    if (row.error <= 0.0)
      continue;
    const double x = row.refinement;
    const double y = std::log(row.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  LogFit fit;
  if (n < 2)
    return fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double ss_tot = syy - sy * sy / n;
  const double intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0;
  for (const auto &row : table.rows) {
    if (row.error <= 0.0)
      continue;
    const double r = std::log(row.error) - (intercept + fit.slope * row.refinement);
    ss_res += r * r;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

void write_rate_csv(const RateTable &table, std::ostream &out) {
  out << "h,ndofs,error,rate\n";
  out.precision(12);
  for (const auto &row : table.rows) {
    out << row.refinement << "," << row.n_dofs << "," << row.error << ",";
    if (std::isnan(row.rate))
      out << "-";
    else
      out << row.rate;
    out << "\n";
  }
}

ActivationField activation_time(const Trajectory &traj, double c_crit) {
  if (traj.element_means.empty())
    throw ContractViolation("activation_time: trajectory has no element means");
  const std::size_t n_el = traj.element_means.front().size();
  ActivationField field;
  field.c_crit = c_crit;
  field.t_hat.assign(n_el, std::numeric_limits<double>::infinity());
  for (std::size_t n = 0; n < traj.element_means.size(); ++n)
    for (std::size_t k = 0; k < n_el; ++k)
      if (std::isinf(field.t_hat[k]) && traj.element_means[n][k] > c_crit)
        field.t_hat[k] = traj.times[n];
  return field;
}

void write_activation_csv(const ActivationField &field, std::ostream &out) {
  out << "element_id,t_hat\n";
  out.precision(12);
  for (std::size_t k = 0; k < field.t_hat.size(); ++k) {
    out << k << ",";
    if (std::isinf(field.t_hat[k]))
      out << "inf";
    else
      out << field.t_hat[k];
    out << "\n";
  }
}

std::vector<double> region_mean(const Trajectory &traj, const PolyMesh &mesh,
                                const std::vector<int> &region) {
  if (region.empty())
    throw ContractViolation("region_mean: empty region");
  if (traj.element_means.empty())
    throw ContractViolation("region_mean: trajectory has no element means");
  double area = 0.0;
  for (int k : region)
    area += mesh.element_areas[k];
  std::vector<double> series(traj.element_means.size(), 0.0);
  for (std::size_t n = 0; n < series.size(); ++n) {
    double acc = 0.0;
    for (int k : region)
      acc += traj.element_means[n][k] * mesh.element_areas[k];
    series[n] = acc / area;
  }
  return series;
}

void write_series_csv(const std::vector<double> &times, const std::vector<double> &values,
                      const char *value_name, std::ostream &out) {
  out << "t," << value_name << "\n";
  out.precision(12);
  for (std::size_t i = 0; i < times.size() && i < values.size(); ++i)
    out << times[i] << "," << values[i] << "\n";
}

} // namespace polyfk
