#pragma once

// Learned dynamics: an ensemble of small tanh MLPs predicting per-entity
// position deltas, trained with momentum SGD on bootstrap resamples.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rair/dynamics.hpp"
#include "rair/rng.hpp"

namespace rair {

struct EnsembleConfig {
  int members = 5;
  std::vector<int> hidden{32, 32};
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 32;
  int epochs = 25;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  nlohmann::json to_json() const;
  static EnsembleConfig from_json(const nlohmann::json& j);
};

// Input length 2N + N + 2: normalized positions, one-hot actuated entity,
// discretized action.
std::size_t model_input_size(int num_entities);
void encode_model_input(std::span<const double> positions, int actuated, GridAction action, int width, int height,
                        std::span<double> out);

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> widths);  // input, hidden..., output

  const std::vector<int>& widths() const { return widths_; }
  std::size_t num_layers() const { return offsets_.size(); }
  std::size_t num_parameters() const { return params_.size(); }
  std::size_t input_size() const { return static_cast<std::size_t>(widths_.front()); }
  std::size_t output_size() const { return static_cast<std::size_t>(widths_.back()); }

  // Layer l weights are out x in, row-major. All parameters live in one flat
  // vector laid out W0, b0, W1, b1, ...
  std::span<double> weights(std::size_t l);
  std::span<const double> weights(std::size_t l) const;
  std::span<double> biases(std::size_t l);
  std::span<const double> biases(std::size_t l) const;
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  void init_xavier(Rng& rng);
  void zero();

  // tanh hidden layers, linear output.
  void forward(std::span<const double> input, std::span<double> output) const;

  // Mean over the batch of the mean squared output error; gradients are
  // accumulated into `grad` (parameter layout).
  double loss_and_gradient(std::span<const double> inputs, std::span<const double> targets, std::size_t batch,
                           std::span<double> grad) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<int> widths_;
  std::vector<std::size_t> offsets_;  // start of W_l; b_l follows
  std::vector<double> params_;
};

class ReplayBuffer {
 public:
  ReplayBuffer() = default;
  ReplayBuffer(std::size_t input_dim, std::size_t target_dim) : input_dim_(input_dim), target_dim_(target_dim) {}

  void add(std::span<const double> input, std::span<const double> target);
  std::size_t size() const { return input_dim_ == 0 ? 0 : inputs_.size() / input_dim_; }
  bool empty() const { return size() == 0; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t target_dim() const { return target_dim_; }
  std::span<const double> input(std::size_t i) const { return {inputs_.data() + i * input_dim_, input_dim_}; }
  std::span<const double> target(std::size_t i) const { return {targets_.data() + i * target_dim_, target_dim_}; }

 private:
  std::size_t input_dim_ = 0;
  std::size_t target_dim_ = 0;
  std::vector<double> inputs_;
  std::vector<double> targets_;
};

class Ensemble final : public DynamicsModel {
 public:
  Ensemble(EnsembleConfig config, int num_entities, int width, int height, int persistency_T);

  int members() const override { return static_cast<int>(nets_.size()); }
  std::string name() const override { return "ensemble"; }

  // Propagates the ensemble-mean state; predictions are not re-discretized.
  void rollout(const Configuration& start, std::span<const double> plan, int horizon,
               std::span<double> out) const override;

  // M predicted next-position vectors (positions + member delta).
  std::vector<double> predict_input(std::span<const double> positions, std::span<const double> input) const;

  // Adds (input, delta) for a real transition.
  void record(ReplayBuffer& buffer, const Configuration& before, GridAction action, const Configuration& after) const;
  ReplayBuffer make_buffer() const;

  // One epoch per member on its own bootstrap resample; returns per-member mean loss.
  std::vector<double> train_epoch(const ReplayBuffer& buffer);

  const EnsembleConfig& config() const { return config_; }
  Mlp& member(int m) { return nets_[m]; }
  const Mlp& member(int m) const { return nets_[m]; }
  int num_entities() const { return num_entities_; }

  // Flat binary: u32 members, u32 width count, u32 widths..., then per member
  // and layer the weights (row-major) and biases as f64 little-endian.
  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);
  nlohmann::json sidecar() const;

 private:
  EnsembleConfig config_;
  int num_entities_;
  int width_;
  int height_;
  int persistency_T_;
  std::vector<Mlp> nets_;
  std::vector<std::vector<double>> velocity_;
  std::uint64_t epochs_done_ = 0;
};

}  // namespace rair
