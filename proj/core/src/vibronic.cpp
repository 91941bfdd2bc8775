#include "vibronic/vibronic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vibronic/errors.hpp"

namespace vibronic {

namespace {

constexpr double kSpanTol = 1e-10;

// Appends `v` to `basis` if its component orthogonal to the existing columns
// is larger than kSpanTol (v normalised first). Two classical GS passes.
void gram_schmidt_append(std::vector<Eigen::VectorXd>& basis, Eigen::VectorXd v) {
  const double norm = v.norm();
  if (norm == 0.0) return;
  v /= norm;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) v -= b.dot(v) * b;
  const double residual = v.norm();
  if (residual < kSpanTol) return;
  basis.push_back(v / residual);
}

}  // namespace

Eigen::MatrixXd QuadraticVibronic::quadratic() const {
  Eigen::MatrixXd k = coupling;
  k.diagonal().array() += trap;
  return k;
}

double QuadraticVibronic::energy(const Eigen::VectorXd& q) const {
  return constant + linear.dot(q) + q.dot(coupling * q) + trap * q.squaredNorm();
}

Eigen::VectorXd QuadraticVibronic::gradient(const Eigen::VectorXd& q) const {
  return linear + 2.0 * (coupling * q) + 2.0 * trap * q;
}

bool QuadraticVibronic::trap_only(double tol) const {
  return std::abs(constant) <= tol && linear.lpNorm<Eigen::Infinity>() <= tol &&
         (coupling.size() == 0 || coupling.lpNorm<Eigen::Infinity>() <= tol);
}

ExpansionCoefficients expansion_coeffs(int k, int l, const Geometry& geometry,
                                       const PotentialModel& model, const PhysicalParams& params) {
  if (k == l) throw GeometryError("expansion needs two distinct atoms");
  const Eigen::Vector3d r0 = geometry.position(k) - geometry.position(l);
  const RadialDerivatives v = radial_derivatives(model, params, r0.norm());
  const Eigen::Vector3d rhat = r0 / v.r0;
  const Eigen::Matrix3d outer = rhat * rhat.transpose();

  ExpansionCoefficients c;
  c.G = v.V1 * rhat.transpose();
  c.Ha = v.V2 * outer;
  c.Hb = v.V1_over_r * (Eigen::Matrix3d::Identity() - outer);
  return c;
}

QuadraticVibronic assemble_state_hamiltonian(const ElectronicConfig& state, const Geometry& geometry,
                                             const PotentialModel& model,
                                             const PhysicalParams& params, double detuning,
                                             double reference_energy) {
  const int n = geometry.size();
  if (state.size() != n) throw GeometryError("configuration size does not match atom count");

  QuadraticVibronic form;
  form.label = state.bits();
  form.constant = diagonal_energy(state, geometry, detuning, model, params) - reference_energy;
  form.linear = Eigen::VectorXd::Zero(3 * n);
  form.coupling = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  form.trap = params.trap_stiffness();

  // V(r0) + G dr + 1/2 dr^T (Ha + Hb) dr with dr = dr_k - dr_l.
  for (int k = 0; k < n; ++k) {
    if (!state.excited(k)) continue;
    for (int l = 0; l < k; ++l) {
      if (!state.excited(l)) continue;
      const ExpansionCoefficients c = expansion_coeffs(k, l, geometry, model, params);
      const Eigen::Matrix3d half = 0.5 * (c.Ha + c.Hb);
      form.linear.segment<3>(3 * k) += c.G.transpose();
      form.linear.segment<3>(3 * l) -= c.G.transpose();
      form.coupling.block<3, 3>(3 * k, 3 * k) += half;
      form.coupling.block<3, 3>(3 * l, 3 * l) += half;
      form.coupling.block<3, 3>(3 * k, 3 * l) -= half;
      form.coupling.block<3, 3>(3 * l, 3 * k) -= half;
    }
  }

  if (geometry.motion() != MotionPolicy::Full) {
    const Eigen::MatrixXd p = geometry.motion_projector();
    form.linear = p * form.linear;
    form.coupling = p * form.coupling * p;
  }
  form.coupling = 0.5 * (form.coupling + form.coupling.transpose()).eval();
  return form;
}

std::vector<QuadraticVibronic> assemble_manifold(const ResonantGraph& graph, const Geometry& geometry,
                                                 const PotentialModel& model,
                                                 const PhysicalParams& params, double detuning) {
  std::vector<QuadraticVibronic> forms;
  forms.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) {
    forms.push_back(assemble_state_hamiltonian(node, geometry, model, params, detuning,
                                               graph.manifold_energy));
  }
  return forms;
}

ModeReduction reduce_modes(const std::vector<QuadraticVibronic>& forms) {
  if (forms.empty()) throw std::invalid_argument("mode reduction needs at least one form");
  const int coords = forms.front().dim();
  for (const auto& f : forms) {
    if (f.dim() != coords || f.coupling.rows() != coords || f.coupling.cols() != coords) {
      throw GeometryError("forms disagree on the number of displacement coordinates");
    }
  }

  double scale = forms.front().trap;
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> spectra;
  spectra.reserve(forms.size());
  for (const auto& f : forms) {
    spectra.emplace_back(f.coupling);
    scale = std::max(scale, spectra.back().eigenvalues().cwiseAbs().maxCoeff());
  }

  std::vector<Eigen::VectorXd> columns;
  for (const auto& f : forms) {
    if (f.linear.norm() > kSpanTol * std::max(1.0, scale)) gram_schmidt_append(columns, f.linear);
  }
  for (const auto& eig : spectra) {
    const Eigen::VectorXd& values = eig.eigenvalues();
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(values(a)) > std::abs(values(b)); });
    for (int i : order) {
      if (std::abs(values(i)) <= kSpanTol * scale) break;
      gram_schmidt_append(columns, eig.eigenvectors().col(i));
    }
  }

  ModeReduction out;
  out.basis.vectors = Eigen::MatrixXd::Zero(coords, static_cast<int>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) out.basis.vectors.col(j) = columns[j];
  out.forms = project_forms(forms, out.basis);
  return out;
}

std::vector<QuadraticVibronic> project_forms(const std::vector<QuadraticVibronic>& forms,
                                             const ModeBasis& basis) {
  const Eigen::MatrixXd& b = basis.vectors;
  std::vector<QuadraticVibronic> out;
  out.reserve(forms.size());
  for (const auto& f : forms) {
    QuadraticVibronic r;
    r.label = f.label;
    r.constant = f.constant;
    r.trap = f.trap;
    r.linear = b.transpose() * f.linear;
    r.coupling = b.transpose() * f.coupling * b;
    r.coupling = 0.5 * (r.coupling + r.coupling.transpose()).eval();
    out.push_back(std::move(r));
  }
  return out;
}

double residual_outside_span(const std::vector<QuadraticVibronic>& forms, const ModeBasis& basis) {
  const Eigen::MatrixXd& b = basis.vectors;
  double worst = 0.0;
  for (const auto& f : forms) {
    worst = std::max(worst, (f.linear - b * (b.transpose() * f.linear)).norm());
    const Eigen::MatrixXd outside = f.coupling - b * (b.transpose() * f.coupling);
    if (outside.size() > 0) worst = std::max(worst, outside.colwise().norm().maxCoeff());
  }
  return worst;
}

VibronicModel build_molecular_model(const ResonantGraph& graph, const Geometry& geometry,
                                    const PotentialModel& model, const PhysicalParams& params,
                                    double detuning, ModeSpace space) {
  const auto forms = assemble_manifold(graph, geometry, model, params, detuning);
  VibronicModel out;
  out.hopping = graph.adjacency.cast<double>();
  out.omega = params.omega();
  out.x0 = params.x0();
  if (space == ModeSpace::Reduced) {
    ModeReduction red = reduce_modes(forms);
    out.basis = std::move(red.basis);
    out.forms = std::move(red.forms);
  } else {
    out.basis.vectors = geometry.allowed_displacements();
    out.forms = project_forms(forms, out.basis);
  }
  return out;
}

VibronicModel single_node_model(const VibronicModel& model, int node) {
  if (node < 0 || node >= model.nodes()) throw std::out_of_range("node index out of range");
  ModeReduction red = reduce_modes({model.forms[node]});
  VibronicModel out;
  out.hopping = Eigen::MatrixXd::Zero(1, 1);
  out.forms = std::move(red.forms);
  out.omega = model.omega;
  out.x0 = model.x0;
  out.basis.vectors = model.basis.vectors.size() > 0 ? Eigen::MatrixXd(model.basis.vectors * red.basis.vectors)
                                                     : red.basis.vectors;
  return out;
}

VibronicModel dumbbell_hamiltonian(const PhysicalParams& params, const Couplings& couplings) {
  const double x0 = params.x0();
  VibronicModel out;
  out.omega = params.omega();
  out.x0 = x0;
  out.hopping = Eigen::MatrixXd::Zero(2, 2);
  out.hopping(0, 1) = out.hopping(1, 0) = std::sqrt(2.0);

  QuadraticVibronic plus;
  plus.label = "+";
  plus.linear = Eigen::VectorXd::Zero(1);
  plus.coupling = Eigen::MatrixXd::Zero(1, 1);
  plus.trap = params.trap_stiffness();

  // sqrt2 kappa (b + b^dag) + xi (b + b^dag)^2 with b + b^dag = sqrt2 q / x0.
  QuadraticVibronic both = plus;
  both.label = "11";
  both.linear(0) = 2.0 * couplings.kappa / x0;
  both.coupling(0, 0) = 2.0 * couplings.xi / (x0 * x0);

  out.forms = {plus, both};
  out.basis.vectors = pair_mode_vector(2, 1, 0, Eigen::Vector3d::UnitX());
  return out;
}

Eigen::VectorXd pair_mode_vector(int atoms, int k, int l, const Eigen::Vector3d& direction) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * atoms);
  const Eigen::Vector3d u = direction.normalized();
  v.segment<3>(3 * k) = u / std::sqrt(2.0);
  v.segment<3>(3 * l) = -u / std::sqrt(2.0);
  return v;
}

}  // namespace vibronic
