#include "umcmc/kernels.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace umcmc {

namespace {

bool bitwise_equal(const PointRef& x, const PointRef& y) {
  return x.size() == y.size() && (x.array() == y.array()).all();
}

// Shared-uniform accept/reject of coupled proposals. Chains that propose the
// same point and take the same decision from equal inputs stay equal.
CoupledStepResult accept_reject(const TargetDistribution& target, const PointRef& x,
                                const PointRef& y, CoupledDraw proposals, Stream& stream) {
  const double log_u = std::log(stream.uniform());
  const bool x_accept = log_u < target.potential(x) - target.potential(proposals.x);
  const bool y_accept = log_u < target.potential(y) - target.potential(proposals.y);

  CoupledStepResult out;
  out.next_x = x_accept ? proposals.x : Point(x);
  const bool same_decision = x_accept == y_accept;
  out.met = proposals.identical && same_decision && (x_accept || bitwise_equal(x, y));
  if (out.met) {
    out.next_y = out.next_x;
  } else {
    out.next_y = y_accept ? std::move(proposals.y) : Point(y);
  }
  return out;
}

}  // namespace

ProposalCoupling parse_proposal_coupling(const std::string& name) {
  if (name == "reflection-maximal") return ProposalCoupling::reflection_maximal;
  if (name == "eta") return ProposalCoupling::eta;
  if (name == "mixture") return ProposalCoupling::mixture_maximal;
  if (name == "crn") return ProposalCoupling::crn;
  throw std::invalid_argument("unknown coupling '" + name +
                              "' (expected reflection-maximal, eta, mixture or crn)");
}

std::string to_string(ProposalCoupling coupling) {
  switch (coupling) {
    case ProposalCoupling::reflection_maximal: return "reflection-maximal";
    case ProposalCoupling::eta: return "eta";
    case ProposalCoupling::mixture_maximal: return "mixture";
    case ProposalCoupling::crn: return "crn";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

MrthKernel::MrthKernel(std::shared_ptr<const TargetDistribution> target, Eigen::VectorXd sigma,
                       ProposalCoupling coupling, EtaCouplingOptions eta)
    : target_(std::move(target)), coupling_(coupling), eta_(eta) {
  if (!target_) throw std::invalid_argument("MrthKernel: null target");
  sigma_ = expand_scale(sigma, target_->dimension());
  if (coupling_ == ProposalCoupling::mixture_maximal && target_->dimension() != 1) {
    throw std::invalid_argument("MrthKernel: mixture coupling requires a univariate target");
  }
  if (coupling_ == ProposalCoupling::eta && !(eta_.eta > 0.0 && eta_.eta <= 1.0)) {
    throw std::invalid_argument("MrthKernel: eta must lie in (0, 1]");
  }
}

Point MrthKernel::step(const PointRef& x, Stream& stream) const {
  Point proposal(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) proposal[i] = x[i] + sigma_[i] * stream.standard_normal();
  const double log_u = std::log(stream.uniform());
  if (log_u < target_->potential(x) - target_->potential(proposal)) return proposal;
  return x;
}

CoupledDraw MrthKernel::couple_proposals(const PointRef& x, const PointRef& y,
                                         Stream& stream) const {
  switch (coupling_) {
    case ProposalCoupling::reflection_maximal:
      return reflection_maximal_coupling(x, y, sigma_, stream);
    case ProposalCoupling::eta:
      return eta_coupling(normal_handle(x, sigma_), normal_handle(y, sigma_), stream, eta_);
    case ProposalCoupling::mixture_maximal:
      return mixture_maximal_coupling({x[0], sigma_[0]}, {y[0], sigma_[0]}, stream,
                                      eta_.max_iterations);
    case ProposalCoupling::crn: {
      CoupledDraw draw;
      draw.x.resize(x.size());
      draw.y.resize(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double eps = stream.standard_normal();
        draw.x[i] = x[i] + sigma_[i] * eps;
        draw.y[i] = y[i] + sigma_[i] * eps;
      }
      if (bitwise_equal(draw.x, draw.y)) {
        draw.y = draw.x;
        draw.identical = true;
      }
      return draw;
    }
  }
  throw std::logic_error("unhandled proposal coupling");
}

CoupledStepResult MrthKernel::coupled_step(const PointRef& x, const PointRef& y,
                                           Stream& stream) const {
  return accept_reject(*target_, x, y, couple_proposals(x, y, stream), stream);
}

std::string MrthKernel::describe() const {
  std::ostringstream os;
  os << "mrth(" << target_->label() << ", sigma=" << sigma_.transpose() << ", coupling="
     << to_string(coupling_) << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

IndependenceKernel::IndependenceKernel(std::shared_ptr<const TargetDistribution> target)
    : target_(std::move(target)) {
  if (!target_) throw std::invalid_argument("IndependenceKernel: null target");
  if (!target_->has_direct_sampler()) {
    throw std::invalid_argument("IndependenceKernel: target '" + target_->label() +
                                "' has no direct sampler");
  }
}

Point IndependenceKernel::step(const PointRef&, Stream& stream) const { return target_->sample(stream); }

CoupledStepResult IndependenceKernel::coupled_step(const PointRef&, const PointRef&,
                                                   Stream& stream) const {
  CoupledStepResult out;
  out.next_x = target_->sample(stream);
  out.next_y = out.next_x;
  out.met = true;
  return out;
}

// ---------------------------------------------------------------------------

Ar1Kernel::Ar1Kernel(double rho) : rho_(rho) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("Ar1Kernel: |rho| must be < 1");
  innovation_sd_ = std::sqrt(1.0 - rho * rho);
}

Point Ar1Kernel::step(const PointRef& x, Stream& stream) const {
  return Point::Constant(1, rho_ * x[0] + innovation_sd_ * stream.standard_normal());
}

CoupledStepResult Ar1Kernel::coupled_step(const PointRef& x, const PointRef& y,
                                          Stream& stream) const {
  const Point mx = rho_ * x;
  const Point my = rho_ * y;
  CoupledDraw draw =
      reflection_maximal_coupling(mx, my, Eigen::VectorXd::Constant(1, innovation_sd_), stream);
  return {std::move(draw.x), std::move(draw.y), draw.identical};
}

std::string Ar1Kernel::describe() const { return "ar1(rho=" + std::to_string(rho_) + ")"; }

// ---------------------------------------------------------------------------

FiniteStateKernel::FiniteStateKernel(Eigen::MatrixXd transition) : transition_(std::move(transition)) {
  if (transition_.rows() == 0 || transition_.rows() != transition_.cols()) {
    throw std::invalid_argument("FiniteStateKernel: transition matrix must be square and nonempty");
  }
  if ((transition_.array() < 0.0).any()) {
    throw std::invalid_argument("FiniteStateKernel: negative transition probability");
  }
  for (Eigen::Index i = 0; i < transition_.rows(); ++i) {
    if (std::abs(transition_.row(i).sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("FiniteStateKernel: rows must sum to one");
    }
  }
}

Eigen::Index FiniteStateKernel::state_of(const PointRef& x) const {
  const double label = x[0];
  const auto index = static_cast<Eigen::Index>(label);
  if (static_cast<double>(index) != label || index < 0 || index >= transition_.rows()) {
    throw std::invalid_argument("FiniteStateKernel: invalid state label");
  }
  return index;
}

Eigen::Index FiniteStateKernel::sample_row(const Eigen::Ref<const Eigen::VectorXd>& weights,
                                           double total, Stream& stream) const {
  double u = stream.uniform() * total;
  Eigen::Index last = 0;
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (weights[j] <= 0.0) continue;
    last = j;
    if (u < weights[j]) return j;
    u -= weights[j];
  }
  return last;
}

Point FiniteStateKernel::step(const PointRef& x, Stream& stream) const {
  const Eigen::VectorXd row = transition_.row(state_of(x)).transpose();
  return Point::Constant(1, static_cast<double>(sample_row(row, 1.0, stream)));
}

CoupledStepResult FiniteStateKernel::coupled_step(const PointRef& x, const PointRef& y,
                                                  Stream& stream) const {
  const Eigen::Index i = state_of(x);
  const Eigen::Index j = state_of(y);
  CoupledStepResult out;
  if (i == j) {
    out.next_x = step(x, stream);
    out.next_y = out.next_x;
    out.met = true;
    return out;
  }
  const Eigen::VectorXd px = transition_.row(i).transpose();
  const Eigen::VectorXd py = transition_.row(j).transpose();
  const Eigen::VectorXd common = px.cwiseMin(py);
  const double overlap = common.sum();
  if (stream.uniform() < overlap) {
    out.next_x = Point::Constant(1, static_cast<double>(sample_row(common, overlap, stream)));
    out.next_y = out.next_x;
    out.met = true;
    return out;
  }
  const double residual = 1.0 - overlap;
  out.next_x = Point::Constant(1, static_cast<double>(sample_row(px - common, residual, stream)));
  out.next_y = Point::Constant(1, static_cast<double>(sample_row(py - common, residual, stream)));
  return out;
}

Eigen::VectorXd FiniteStateKernel::stationary() const {
  // Solve pi^T (I - P) = 0 with sum(pi) = 1 as a least-squares system.
  const Eigen::Index n = transition_.rows();
  Eigen::MatrixXd system(n + 1, n);
  system.topRows(n) = (Eigen::MatrixXd::Identity(n, n) - transition_).transpose();
  system.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = 1.0;
  return system.colPivHouseholderQr().solve(rhs);
}

std::string FiniteStateKernel::describe() const {
  return "finite_state(n=" + std::to_string(transition_.rows()) + ")";
}

// ---------------------------------------------------------------------------

MixtureKernel::MixtureKernel(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("MixtureKernel: empty component list");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!c.kernel) throw std::invalid_argument("MixtureKernel: null component");
    if (!(c.weight >= 0.0)) throw std::invalid_argument("MixtureKernel: negative weight");
    if (c.kernel->dimension() != components_.front().kernel->dimension()) {
      throw std::invalid_argument("MixtureKernel: component dimensions differ");
    }
    total += c.weight;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("MixtureKernel: weights must sum to one");
}

std::size_t MixtureKernel::select(Stream& stream) const {
  const double u = stream.uniform() * cumulative_.back();
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    if (u < cumulative_[i]) return i;
  }
  return cumulative_.size() - 1;
}

Point MixtureKernel::step(const PointRef& x, Stream& stream) const {
  return components_[select(stream)].kernel->step(x, stream);
}

CoupledStepResult MixtureKernel::coupled_step(const PointRef& x, const PointRef& y, Stream& stream,
                                              std::size_t* chosen) const {
  const std::size_t index = select(stream);
  if (chosen) *chosen = index;
  return components_[index].kernel->coupled_step(x, y, stream);
}

CoupledStepResult MixtureKernel::coupled_step(const PointRef& x, const PointRef& y,
                                              Stream& stream) const {
  return coupled_step(x, y, stream, nullptr);
}

std::string MixtureKernel::describe() const {
  std::ostringstream os;
  os << "mixture(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) os << ", ";
    os << components_[i].weight << " * " << components_[i].kernel->describe();
  }
  os << ")";
  return os.str();
}

}  // namespace umcmc
