#pragma once

// Physical-layer arithmetic: access points, log-normal shadowing, path-loss
// gains, co-channel interference, SINR and necessary transmit power.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace apalloc {

using ApId = int;
using ChannelId = int;

/// Channel marker for an AP that is not transmitting.
inline constexpr ChannelId kOff = -1;

/// Relative slack used when comparing an achieved SINR against its target.
/// Necessary power hits the target exactly, so rounding can land a few ulps
/// below it.
inline constexpr double kSatisfactionRelTol = 1e-9;

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct AccessPoint {
  ApId id = 0;
  Point2<Scalar> position = Point2<Scalar>::Zero();
  Scalar coverage_radius = 1;
  Scalar coordination_radius = 2;
  Scalar sinr_target = 1;  // linear
  Scalar max_power = Scalar(0.1);
  std::vector<ChannelId> channels;  // sorted ascending

  void validate(int num_channels) const {
    if (!(coverage_radius > 0)) throw std::invalid_argument("AP " + std::to_string(id) + ": coverage_radius must be > 0");
    if (!(coordination_radius >= coverage_radius))
      throw std::invalid_argument("AP " + std::to_string(id) + ": coordination_radius must be >= coverage_radius");
    if (!(sinr_target > 0)) throw std::invalid_argument("AP " + std::to_string(id) + ": sinr_target must be > 0");
    if (!(max_power > 0)) throw std::invalid_argument("AP " + std::to_string(id) + ": max_power must be > 0");
    if (channels.empty()) throw std::invalid_argument("AP " + std::to_string(id) + ": empty channel set");
    if (!std::is_sorted(channels.begin(), channels.end()) ||
        std::adjacent_find(channels.begin(), channels.end()) != channels.end())
      throw std::invalid_argument("AP " + std::to_string(id) + ": channel set must be sorted and unique");
    if (channels.front() < 0 || channels.back() >= num_channels)
      throw std::invalid_argument("AP " + std::to_string(id) + ": channel outside global set");
  }

  bool has_channel(ChannelId k) const { return std::binary_search(channels.begin(), channels.end(), k); }
};

/// Mean of 10^(X/10) with X ~ Normal(mean_db, std_db).
template <typename Scalar>
Scalar lognormal_linear_mean(Scalar mean_db, Scalar std_db) {
  const Scalar a = std::numbers::ln10_v<Scalar> / Scalar(10);
  return std::exp(a * mean_db + a * a * std_db * std_db / Scalar(2));
}

/// Symmetric matrix of linear shadowing gains, one draw per unordered pair.
/// The diagonal is 1 and unused.
template <typename Scalar, typename Rng>
MatrixX<Scalar> sample_shadowing(int n, Scalar mean_db, Scalar std_db, Rng& rng) {
  MatrixX<Scalar> z = MatrixX<Scalar>::Ones(n, n);
  if (std_db == 0 && mean_db == 0) return z;
  std::normal_distribution<Scalar> db(mean_db, std_db);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) z(i, j) = z(j, i) = std::pow(Scalar(10), db(rng) / Scalar(10));
  return z;
}

/// Grows a shadowing matrix to n x n, keeping existing pairs and drawing the
/// new ones in row order.
template <typename Scalar, typename Rng>
MatrixX<Scalar> extend_shadowing(const MatrixX<Scalar>& old, int n, Scalar mean_db, Scalar std_db, Rng& rng) {
  const int m = static_cast<int>(old.rows());
  if (n < m) throw std::invalid_argument("extend_shadowing: cannot shrink");
  MatrixX<Scalar> z = MatrixX<Scalar>::Ones(n, n);
  z.topLeftCorner(m, m) = old;
  std::normal_distribution<Scalar> db(mean_db, std_db);
  const bool flat = std_db == 0 && mean_db == 0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i + 1, m); j < n; ++j)
      z(i, j) = z(j, i) = flat ? Scalar(1) : std::pow(Scalar(10), db(rng) / Scalar(10));
  return z;
}

template <typename Scalar>
struct PropagationModel {
  Scalar path_loss_exponent = 3;
  Scalar shadow_mean_db = 0;
  Scalar shadow_std_db = 8;
  Scalar mean_linear_gain = lognormal_linear_mean<Scalar>(0, 8);
  Scalar min_separation = Scalar(0.1);
  Scalar noise_power = Scalar(1e-8);
  MatrixX<Scalar> shadow_samples;  // z_ij, symmetric

  void validate(int n) const {
    if (!(path_loss_exponent >= 2)) throw std::invalid_argument("path_loss_exponent must be >= 2");
    if (!(min_separation > 0)) throw std::invalid_argument("min_separation must be > 0");
    if (!(mean_linear_gain > 0)) throw std::invalid_argument("mean_linear_gain must be > 0");
    if (!(noise_power >= 0)) throw std::invalid_argument("noise_power must be >= 0");
    if (shadow_samples.rows() != n || shadow_samples.cols() != n)
      throw std::invalid_argument("shadow_samples must be " + std::to_string(n) + "x" + std::to_string(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!(shadow_samples(i, j) > 0)) throw std::invalid_argument("shadow samples must be positive");
        if (shadow_samples(i, j) != shadow_samples(j, i)) throw std::invalid_argument("shadow samples must be symmetric");
      }
  }
};

/// Path-loss term max(d - r, eps)^(-alpha).
template <typename Scalar>
Scalar path_loss(Scalar distance, Scalar receiver_radius, const PropagationModel<Scalar>& model) {
  return std::pow(std::max(distance - receiver_radius, model.min_separation), -model.path_loss_exponent);
}

/// An immutable deployment: APs, the propagation model and the gain matrices
/// derived from them. gains(i, j) is the gain from transmitter i to the
/// coverage edge of AP j.
template <typename Scalar>
class Network {
 public:
  Network() = default;

  Network(std::vector<AccessPoint<Scalar>> aps, PropagationModel<Scalar> model, int num_channels)
      : aps_(std::move(aps)), model_(std::move(model)), num_channels_(num_channels) {
    if (num_channels_ < 1) throw std::invalid_argument("num_channels must be >= 1");
    const int n = size();
    if (model_.shadow_samples.size() == 0 && n > 0) model_.shadow_samples = MatrixX<Scalar>::Ones(n, n);
    model_.validate(n);
    for (int i = 0; i < n; ++i) {
      if (aps_[i].id != i) throw std::invalid_argument("AP ids must equal their index");
      aps_[i].validate(num_channels_);
    }
    distances_.resize(n, n);
    true_gains_.resize(n, n);
    estimated_gains_.resize(n, n);
    edge_gains_.resize(n);
    for (int i = 0; i < n; ++i) {
      edge_gains_(i) = std::pow(aps_[i].coverage_radius, -model_.path_loss_exponent) * model_.mean_linear_gain;
      for (int j = 0; j < n; ++j) {
        const Scalar d = (aps_[i].position - aps_[j].position).norm();
        distances_(i, j) = d;
        if (i == j) {
          true_gains_(i, j) = estimated_gains_(i, j) = 0;
          continue;
        }
        const Scalar pl = path_loss(d, aps_[j].coverage_radius, model_);
        true_gains_(i, j) = pl * model_.shadow_samples(i, j);
        estimated_gains_(i, j) = pl * model_.mean_linear_gain;
      }
    }
  }

  int size() const { return static_cast<int>(aps_.size()); }
  int num_channels() const { return num_channels_; }
  const AccessPoint<Scalar>& ap(ApId i) const { return aps_[i]; }
  const std::vector<AccessPoint<Scalar>>& aps() const { return aps_; }
  const PropagationModel<Scalar>& model() const { return model_; }

  Scalar distance(ApId i, ApId j) const { return distances_(i, j); }
  const MatrixX<Scalar>& distances() const { return distances_; }
  /// g_ij with the sampled shadowing; zero on the diagonal.
  const MatrixX<Scalar>& true_gains() const { return true_gains_; }
  /// g-bar_ij with the mean shadowing; zero on the diagonal.
  const MatrixX<Scalar>& estimated_gains() const { return estimated_gains_; }
  /// Own-link gain at the coverage edge, r_i^(-alpha) * mu_z.
  const VectorX<Scalar>& edge_gains() const { return edge_gains_; }

 private:
  std::vector<AccessPoint<Scalar>> aps_;
  PropagationModel<Scalar> model_;
  int num_channels_ = 1;
  MatrixX<Scalar> distances_;
  MatrixX<Scalar> true_gains_;
  MatrixX<Scalar> estimated_gains_;
  VectorX<Scalar> edge_gains_;
};

/// Strategy profile: one channel (or kOff) and one transmit power per AP.
template <typename Scalar>
struct AllocationState {
  std::vector<ChannelId> channel;
  VectorX<Scalar> power;

  AllocationState() = default;
  explicit AllocationState(int n) : channel(n, kOff), power(VectorX<Scalar>::Zero(n)) {}

  int size() const { return static_cast<int>(channel.size()); }
  bool active(ApId i) const { return channel[i] != kOff && power(i) > 0; }

  void set(ApId i, ChannelId k, Scalar p) {
    channel[i] = k;
    power(i) = k == kOff ? Scalar(0) : p;
  }

  void validate(const Network<Scalar>& net) const {
    if (size() != net.size() || power.size() != net.size()) throw std::invalid_argument("allocation size mismatch");
    for (int i = 0; i < size(); ++i) {
      if (power(i) < 0 || power(i) > net.ap(i).max_power)
        throw std::invalid_argument("AP " + std::to_string(i) + ": power outside [0, max_power]");
      if (power(i) > 0 && channel[i] == kOff) throw std::invalid_argument("AP " + std::to_string(i) + ": powered but off");
      if (channel[i] != kOff && !net.ap(i).has_channel(channel[i]))
        throw std::invalid_argument("AP " + std::to_string(i) + ": channel not available");
    }
  }

  friend bool operator==(const AllocationState& a, const AllocationState& b) {
    return a.channel == b.channel && a.power == b.power;
  }
};

template <typename Scalar>
Scalar estimated_gain(const Network<Scalar>& net, ApId i, ApId j) {
  if (i == j) throw std::invalid_argument("estimated_gain: i == j");
  return path_loss(net.distance(i, j), net.ap(j).coverage_radius, net.model()) * net.model().mean_linear_gain;
}

template <typename Scalar>
Scalar true_gain(const Network<Scalar>& net, ApId i, ApId j) {
  if (i == j) throw std::invalid_argument("true_gain: i == j");
  return path_loss(net.distance(i, j), net.ap(j).coverage_radius, net.model()) * net.model().shadow_samples(i, j);
}

/// Interference received at AP j on channel k from every other co-channel
/// transmitter.
template <typename Scalar>
Scalar interference_at(const Network<Scalar>& net, ApId j, ChannelId k, const AllocationState<Scalar>& state) {
  Scalar total = 0;
  for (int i = 0; i < net.size(); ++i)
    if (i != j && state.channel[i] == k) total += net.true_gains()(i, j) * state.power(i);
  return total;
}

/// Interference received at AP j on every global channel in one sweep.
template <typename Scalar>
VectorX<Scalar> interference_profile(const Network<Scalar>& net, ApId j, const AllocationState<Scalar>& state) {
  VectorX<Scalar> out = VectorX<Scalar>::Zero(net.num_channels());
  for (int i = 0; i < net.size(); ++i)
    if (i != j && state.channel[i] != kOff) out(state.channel[i]) += net.true_gains()(i, j) * state.power(i);
  return out;
}

/// SINR of AP i at its coverage edge if it transmits its current power on k.
/// Throws std::domain_error for a silent AP.
template <typename Scalar>
Scalar sinr(const Network<Scalar>& net, ApId i, ChannelId k, const AllocationState<Scalar>& state) {
  if (!(state.power(i) > 0)) throw std::domain_error("sinr: AP " + std::to_string(i) + " is not transmitting");
  return net.edge_gains()(i) * state.power(i) / (net.model().noise_power + interference_at(net, i, k, state));
}

/// Power that meets the SINR target exactly against a known interference
/// level, capped at the AP's power budget.
template <typename Scalar>
Scalar necessary_power_for(const Network<Scalar>& net, ApId i, Scalar interference) {
  const auto& a = net.ap(i);
  return std::min(a.sinr_target * (net.model().noise_power + interference) / net.edge_gains()(i), a.max_power);
}

template <typename Scalar>
Scalar necessary_power(const Network<Scalar>& net, ApId i, ChannelId k, const AllocationState<Scalar>& state) {
  return necessary_power_for(net, i, interference_at(net, i, k, state));
}

template <typename Scalar>
bool is_satisfied(const Network<Scalar>& net, ApId i, const AllocationState<Scalar>& state) {
  if (!state.active(i)) return false;
  return sinr(net, i, state.channel[i], state) >= net.ap(i).sinr_target * (1 - kSatisfactionRelTol);
}

template <typename Scalar>
int count_satisfied(const Network<Scalar>& net, const AllocationState<Scalar>& state) {
  int n = 0;
  for (int i = 0; i < net.size(); ++i) n += is_satisfied(net, i, state) ? 1 : 0;
  return n;
}

/// The rest of the library works in double precision.
using AccessPointd = AccessPoint<double>;
using PropagationModeld = PropagationModel<double>;
using Networkd = Network<double>;
using Allocation = AllocationState<double>;

}  // namespace apalloc
