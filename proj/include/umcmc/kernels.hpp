#pragma once

#include <memory>
#include <string>
#include <vector>

#include "umcmc/couplings.hpp"
#include "umcmc/rng.hpp"
#include "umcmc/targets.hpp"
#include "umcmc/types.hpp"

namespace umcmc {

/// Output of one coupled transition. `met` implies next_x and next_y are
/// bitwise equal (next_y is assigned from next_x).
struct CoupledStepResult {
  Point next_x;
  Point next_y;
  bool met = false;
};

/// A pi-invariant transition P together with a coupling P-bar of P with itself.
///
/// Implementations must be faithful: if x and y are equal on input, the
/// coupled step returns equal states and met = true. Kernels are immutable
/// and may be shared across threads; all randomness comes from the stream.
class Kernel {
 public:
  virtual ~Kernel() = default;

  virtual Eigen::Index dimension() const = 0;

  virtual Point step(const PointRef& x, Stream& stream) const = 0;

  virtual CoupledStepResult coupled_step(const PointRef& x, const PointRef& y,
                                         Stream& stream) const = 0;

  virtual std::string describe() const = 0;
};

using KernelPtr = std::shared_ptr<const Kernel>;

/// How the two Normal proposals of a coupled MRTH step are coupled.
enum class ProposalCoupling {
  reflection_maximal,  // maximal, with deterministic cost
  eta,                 // rejection-based, maximal at eta = 1
  mixture_maximal,     // mixture representation; univariate only
  crn,                 // common noise; contractive, meets only by coincidence
};

ProposalCoupling parse_proposal_coupling(const std::string& name);
std::string to_string(ProposalCoupling coupling);

/// Random-walk Metropolis-Rosenbluth-Teller-Hastings with Normal proposals of
/// per-coordinate scale sigma (length 1 or the target dimension). Both chains of
/// a coupled step accept or reject with one shared uniform.
class MrthKernel final : public Kernel {
 public:
  MrthKernel(std::shared_ptr<const TargetDistribution> target, Eigen::VectorXd sigma,
             ProposalCoupling coupling = ProposalCoupling::reflection_maximal,
             EtaCouplingOptions eta = {});

  Eigen::Index dimension() const override { return target_->dimension(); }
  Point step(const PointRef& x, Stream& stream) const override;
  CoupledStepResult coupled_step(const PointRef& x, const PointRef& y,
                                 Stream& stream) const override;
  std::string describe() const override;

  const TargetDistribution& target() const { return *target_; }
  const Eigen::VectorXd& sigma() const { return sigma_; }
  ProposalCoupling coupling() const { return coupling_; }

 private:
  CoupledDraw couple_proposals(const PointRef& x, const PointRef& y, Stream& stream) const;

  std::shared_ptr<const TargetDistribution> target_;
  Eigen::VectorXd sigma_;
  ProposalCoupling coupling_;
  EtaCouplingOptions eta_;
};

/// P(x, .) = pi: every step is an exact draw from the target. The coupled
/// step shares one draw, so chains meet after a single coupled transition.
class IndependenceKernel final : public Kernel {
 public:
  explicit IndependenceKernel(std::shared_ptr<const TargetDistribution> target);

  Eigen::Index dimension() const override { return target_->dimension(); }
  Point step(const PointRef& x, Stream& stream) const override;
  CoupledStepResult coupled_step(const PointRef& x, const PointRef& y,
                                 Stream& stream) const override;
  std::string describe() const override { return "independence(" + target_->label() + ")"; }

 private:
  std::shared_ptr<const TargetDistribution> target_;
};

/// Gaussian AR(1) transition x -> rho x + sqrt(1 - rho^2) eps, coupled with the
/// reflection-maximal coupling of the two Normal transition laws.
class Ar1Kernel final : public Kernel {
 public:
  explicit Ar1Kernel(double rho);

  Eigen::Index dimension() const override { return 1; }
  Point step(const PointRef& x, Stream& stream) const override;
  CoupledStepResult coupled_step(const PointRef& x, const PointRef& y,
                                 Stream& stream) const override;
  std::string describe() const override;

  double rho() const { return rho_; }

 private:
  double rho_;
  double innovation_sd_;
};

/// Markov chain on {0, ..., n-1} with an explicit transition matrix; states are
/// stored as one-dimensional points holding the integer label. Coupled steps
/// use the maximal coupling of the two transition rows.
class FiniteStateKernel final : public Kernel {
 public:
  explicit FiniteStateKernel(Eigen::MatrixXd transition);

  Eigen::Index dimension() const override { return 1; }
  Point step(const PointRef& x, Stream& stream) const override;
  CoupledStepResult coupled_step(const PointRef& x, const PointRef& y,
                                 Stream& stream) const override;
  std::string describe() const override;

  const Eigen::MatrixXd& transition() const { return transition_; }
  /// Stationary distribution (left Perron eigenvector, normalised).
  Eigen::VectorXd stationary() const;

 private:
  Eigen::Index state_of(const PointRef& x) const;
  Eigen::Index sample_row(const Eigen::Ref<const Eigen::VectorXd>& weights, double total,
                          Stream& stream) const;

  Eigen::MatrixXd transition_;
};

/// Mixture sum_i w_i P_i with coupling sum_i w_i Pbar_i. The component index is
/// drawn from one uniform before anything else, shared by both chains and never
/// dependent on (x, y).
class MixtureKernel final : public Kernel {
 public:
  struct Component {
    double weight;
    KernelPtr kernel;
  };

  explicit MixtureKernel(std::vector<Component> components);

  Eigen::Index dimension() const override { return components_.front().kernel->dimension(); }
  Point step(const PointRef& x, Stream& stream) const override;
  CoupledStepResult coupled_step(const PointRef& x, const PointRef& y,
                                 Stream& stream) const override;
  std::string describe() const override;

  /// Coupled step that also reports which component was used.
  CoupledStepResult coupled_step(const PointRef& x, const PointRef& y, Stream& stream,
                                 std::size_t* chosen) const;

  std::size_t select(Stream& stream) const;
  const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
  std::vector<double> cumulative_;
};

}  // namespace umcmc
