#include "rair/ensemble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rair/error.hpp"

namespace rair {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

void put_f64(std::ostream& os, double d) {
  const auto u = std::bit_cast<std::uint64_t>(d);
  for (int b = 0; b < 8; ++b) os.put(static_cast<char>((u >> (8 * b)) & 0xFFu));
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw Error("truncated ensemble checkpoint");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}

std::vector<int> member_widths(const EnsembleConfig& config, int num_entities) {
  std::vector<int> widths{static_cast<int>(model_input_size(num_entities))};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(2 * num_entities);
  return widths;
}

}  // namespace

void EnsembleConfig::validate() const {
  if (members < 1) throw ConfigError("ensemble.members must be positive");
  if (hidden.empty()) throw ConfigError("ensemble.hidden needs at least one layer");
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("ensemble.hidden widths must be positive");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("ensemble.learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("ensemble.momentum must be in [0, 1)");
  if (batch_size <= 0) throw ConfigError("ensemble.batch_size must be positive");
  if (epochs <= 0) throw ConfigError("ensemble.epochs must be positive");
}

nlohmann::json EnsembleConfig::to_json() const {
  return {{"members", members},     {"hidden", hidden},         {"learning_rate", learning_rate},
          {"momentum", momentum},   {"batch_size", batch_size}, {"epochs", epochs},
          {"seed", seed}};
}

EnsembleConfig EnsembleConfig::from_json(const nlohmann::json& j) {
  EnsembleConfig c;
  c.members = j.at("members").get<int>();
  c.hidden = j.at("hidden").get<std::vector<int>>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

std::size_t model_input_size(int num_entities) { return static_cast<std::size_t>(3 * num_entities + 2); }

void encode_model_input(std::span<const double> positions, int actuated, GridAction action, int width, int height,
                        std::span<double> out) {
  const std::size_t n = positions.size() / 2;
  if (out.size() != 3 * n + 2) throw Error("model input length mismatch");
  const double sx = width > 1 ? 1.0 / (width - 1) : 1.0;
  const double sy = height > 1 ? 1.0 / (height - 1) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = positions[2 * i] * sx;
    out[2 * i + 1] = positions[2 * i + 1] * sy;
  }
  for (std::size_t i = 0; i < n; ++i) out[2 * n + i] = static_cast<int>(i) == actuated ? 1.0 : 0.0;
  out[3 * n] = discretize_action(action.x);
  out[3 * n + 1] = discretize_action(action.y);
}

// ---- Mlp ----

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw Error("an MLP needs input and output widths");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    if (widths_[l] <= 0 || widths_[l + 1] <= 0) throw Error("layer widths must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(widths_[l + 1]) * (widths_[l] + 1);
  }
  params_.assign(total, 0.0);
}

std::span<double> Mlp::weights(std::size_t l) {
  return {params_.data() + offsets_[l], static_cast<std::size_t>(widths_[l + 1]) * widths_[l]};
}
std::span<const double> Mlp::weights(std::size_t l) const {
  return {params_.data() + offsets_[l], static_cast<std::size_t>(widths_[l + 1]) * widths_[l]};
}
std::span<double> Mlp::biases(std::size_t l) {
  return {params_.data() + offsets_[l] + static_cast<std::size_t>(widths_[l + 1]) * widths_[l],
          static_cast<std::size_t>(widths_[l + 1])};
}
std::span<const double> Mlp::biases(std::size_t l) const {
  return {params_.data() + offsets_[l] + static_cast<std::size_t>(widths_[l + 1]) * widths_[l],
          static_cast<std::size_t>(widths_[l + 1])};
}

void Mlp::init_xavier(Rng& rng) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / (widths_[l] + widths_[l + 1]));
    for (double& w : weights(l)) w = (2.0 * uniform01(rng) - 1.0) * limit;
    for (double& b : biases(l)) b = 0.0;
  }
}

void Mlp::zero() { std::fill(params_.begin(), params_.end(), 0.0); }

void Mlp::forward(std::span<const double> input, std::span<double> output) const {
  if (input.size() != input_size()) throw Error("model input length mismatch");
  if (output.size() != output_size()) throw Error("model output length mismatch");
  thread_local std::vector<double> a;
  thread_local std::vector<double> z;
  a.assign(input.begin(), input.end());
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const auto in = static_cast<std::size_t>(widths_[l]);
    const auto out = static_cast<std::size_t>(widths_[l + 1]);
    const double* W = params_.data() + offsets_[l];
    const double* b = W + out * in;
    z.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      const double* row = W + o * in;
      for (std::size_t i = 0; i < in; ++i) s += row[i] * a[i];
      z[o] = l + 1 < num_layers() ? std::tanh(s) : s;
    }
    a.swap(z);
  }
  std::copy(a.begin(), a.end(), output.begin());
}

double Mlp::loss_and_gradient(std::span<const double> inputs, std::span<const double> targets, std::size_t batch,
                              std::span<double> grad) const {
  const std::size_t L = num_layers();
  const std::size_t din = input_size();
  const std::size_t dout = output_size();
  if (batch == 0) throw Error("empty batch");
  if (inputs.size() != batch * din || targets.size() != batch * dout) throw Error("batch buffer size mismatch");
  if (grad.size() != params_.size()) throw Error("gradient buffer size mismatch");

  thread_local std::vector<std::vector<double>> acts;  // acts[l] = input of layer l
  thread_local std::vector<double> delta;
  thread_local std::vector<double> prev;
  acts.resize(L + 1);
  double loss = 0.0;
  const double scale = 2.0 / (static_cast<double>(batch) * dout);

  for (std::size_t s = 0; s < batch; ++s) {
    acts[0].assign(inputs.begin() + s * din, inputs.begin() + (s + 1) * din);
    for (std::size_t l = 0; l < L; ++l) {
      const auto in = static_cast<std::size_t>(widths_[l]);
      const auto out = static_cast<std::size_t>(widths_[l + 1]);
      const double* W = params_.data() + offsets_[l];
      const double* b = W + out * in;
      acts[l + 1].resize(out);
      for (std::size_t o = 0; o < out; ++o) {
        double v = b[o];
        const double* row = W + o * in;
        for (std::size_t i = 0; i < in; ++i) v += row[i] * acts[l][i];
        acts[l + 1][o] = l + 1 < L ? std::tanh(v) : v;
      }
    }
    delta.resize(dout);
    for (std::size_t o = 0; o < dout; ++o) {
      const double e = acts[L][o] - targets[s * dout + o];
      loss += e * e;
      delta[o] = scale * e;
    }
    for (std::size_t l = L; l-- > 0;) {
      const auto in = static_cast<std::size_t>(widths_[l]);
      const auto out = static_cast<std::size_t>(widths_[l + 1]);
      const double* W = params_.data() + offsets_[l];
      double* gW = grad.data() + offsets_[l];
      double* gb = gW + out * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[o];
        gb[o] += d;
        double* grow = gW + o * in;
        for (std::size_t i = 0; i < in; ++i) grow[i] += d * acts[l][i];
      }
      if (l == 0) break;
      prev.assign(in, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[o];
        const double* row = W + o * in;
        for (std::size_t i = 0; i < in; ++i) prev[i] += row[i] * d;
      }
      // acts[l] = tanh(z) for hidden layers
      for (std::size_t i = 0; i < in; ++i) prev[i] *= 1.0 - acts[l][i] * acts[l][i];
      delta.swap(prev);
    }
  }
  return loss / (static_cast<double>(batch) * dout);
}

// ---- ReplayBuffer ----

void ReplayBuffer::add(std::span<const double> input, std::span<const double> target) {
  if (input_dim_ == 0 && target_dim_ == 0) {
    input_dim_ = input.size();
    target_dim_ = target.size();
  }
  if (input.size() != input_dim_ || target.size() != target_dim_ || input_dim_ == 0) {
    throw Error("transition shape differs from the replay buffer");
  }
  inputs_.insert(inputs_.end(), input.begin(), input.end());
  targets_.insert(targets_.end(), target.begin(), target.end());
}

// ---- Ensemble ----

Ensemble::Ensemble(EnsembleConfig config, int num_entities, int width, int height, int persistency_T)
    : config_(std::move(config)),
      num_entities_(num_entities),
      width_(width),
      height_(height),
      persistency_T_(persistency_T) {
  config_.validate();
  if (num_entities <= 0 || width <= 0 || height <= 0 || persistency_T <= 0) throw Error("invalid ensemble geometry");
  const auto widths = member_widths(config_, num_entities);
  for (int m = 0; m < config_.members; ++m) {
    Mlp net(widths);
    Rng rng(derive_seed(config_.seed, "init", {static_cast<std::uint64_t>(m)}));
    net.init_xavier(rng);
    velocity_.emplace_back(net.num_parameters(), 0.0);
    nets_.push_back(std::move(net));
  }
}

std::vector<double> Ensemble::predict_input(std::span<const double> positions, std::span<const double> input) const {
  const std::size_t dim = positions.size();
  if (dim != 2 * static_cast<std::size_t>(num_entities_)) throw Error("position vector length mismatch");
  std::vector<double> out(static_cast<std::size_t>(members()) * dim);
  for (int m = 0; m < members(); ++m) {
    std::span<double> dst(out.data() + m * dim, dim);
    nets_[m].forward(input, dst);
    for (std::size_t d = 0; d < dim; ++d) dst[d] += positions[d];
  }
  return out;
}

void Ensemble::rollout(const Configuration& start, std::span<const double> plan, int horizon,
                       std::span<double> out) const {
  const std::size_t dim = 2 * static_cast<std::size_t>(num_entities_);
  const auto M = static_cast<std::size_t>(members());
  if (start.size() != static_cast<std::size_t>(num_entities_)) throw Error("state entity count differs from the ensemble");
  if (plan.size() < static_cast<std::size_t>(horizon) * 2 || out.size() < static_cast<std::size_t>(horizon) * M * dim) {
    throw Error("rollout buffers too small");
  }
  thread_local std::vector<double> state;
  thread_local std::vector<double> input;
  state.resize(dim);
  for (std::size_t i = 0; i < start.size(); ++i) {
    state[2 * i] = start.positions[i].col;
    state[2 * i + 1] = start.positions[i].row;
  }
  input.resize(model_input_size(num_entities_));
  Cursor cursor = start.cursor;
  for (int h = 0; h < horizon; ++h) {
    encode_model_input(state, cursor.entity, {plan[2 * h], plan[2 * h + 1]}, width_, height_, input);
    double* base = out.data() + static_cast<std::size_t>(h) * M * dim;
    for (std::size_t m = 0; m < M; ++m) {
      std::span<double> dst(base + m * dim, dim);
      nets_[m].forward(input, dst);
      for (std::size_t d = 0; d < dim; ++d) dst[d] += state[d];
    }
    for (std::size_t d = 0; d < dim; ++d) {
      double s = 0.0;
      for (std::size_t m = 0; m < M; ++m) s += base[m * dim + d];
      state[d] = s / static_cast<double>(M);
    }
    cursor = advance_cursor(cursor, start.frozen, persistency_T_);
  }
}

ReplayBuffer Ensemble::make_buffer() const {
  return ReplayBuffer(model_input_size(num_entities_), 2 * static_cast<std::size_t>(num_entities_));
}

void Ensemble::record(ReplayBuffer& buffer, const Configuration& before, GridAction action,
                      const Configuration& after) const {
  const auto pos = flatten_positions(before);
  const auto next = flatten_positions(after);
  std::vector<double> input(model_input_size(num_entities_));
  encode_model_input(pos, before.cursor.entity, action, width_, height_, input);
  std::vector<double> delta(pos.size());
  for (std::size_t d = 0; d < pos.size(); ++d) delta[d] = next[d] - pos[d];
  buffer.add(input, delta);
}

std::vector<double> Ensemble::train_epoch(const ReplayBuffer& buffer) {
  if (buffer.empty()) throw Error("nothing to train on");
  const std::size_t n = buffer.size();
  const std::size_t din = buffer.input_dim();
  const std::size_t dout = buffer.target_dim();
  if (din != model_input_size(num_entities_) || dout != 2 * static_cast<std::size_t>(num_entities_)) {
    throw Error("replay buffer shape differs from the ensemble");
  }
  const auto B = static_cast<std::size_t>(config_.batch_size);
  std::vector<double> losses(nets_.size(), 0.0);
  std::vector<double> xb;
  std::vector<double> yb;
  std::vector<std::size_t> idx(n);
  for (std::size_t m = 0; m < nets_.size(); ++m) {
    Rng rng(derive_seed(config_.seed, "bootstrap", {m, epochs_done_}));
    for (auto& i : idx) i = static_cast<std::size_t>(uniform_index(rng, n));
    std::vector<double> grad(nets_[m].num_parameters());
    auto params = nets_[m].parameters();
    auto& vel = velocity_[m];
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += B) {
      const std::size_t count = std::min(B, n - start);
      xb.resize(count * din);
      yb.resize(count * dout);
      for (std::size_t k = 0; k < count; ++k) {
        const auto x = buffer.input(idx[start + k]);
        const auto y = buffer.target(idx[start + k]);
        std::copy(x.begin(), x.end(), xb.begin() + k * din);
        std::copy(y.begin(), y.end(), yb.begin() + k * dout);
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      total += nets_[m].loss_and_gradient(xb, yb, count, grad) * static_cast<double>(count);
      for (std::size_t p = 0; p < params.size(); ++p) {
        vel[p] = config_.momentum * vel[p] - config_.learning_rate * grad[p];
        params[p] += vel[p];
      }
    }
    losses[m] = total / static_cast<double>(n);
  }
  ++epochs_done_;
  return losses;
}

void Ensemble::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write checkpoint " + path.string());
  const auto& widths = nets_.front().widths();
  put_u32(os, static_cast<std::uint32_t>(nets_.size()));
  put_u32(os, static_cast<std::uint32_t>(widths.size()));
  for (int w : widths) put_u32(os, static_cast<std::uint32_t>(w));
  for (const auto& net : nets_) {
    for (double p : net.parameters()) put_f64(os, p);
  }
  if (!os) throw Error("failed writing checkpoint " + path.string());
}

void Ensemble::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read checkpoint " + path.string());
  const auto members = static_cast<std::size_t>(get_le(is, 4));
  const auto count = static_cast<std::size_t>(get_le(is, 4));
  std::vector<int> widths(count);
  for (auto& w : widths) w = static_cast<int>(get_le(is, 4));
  if (members != nets_.size() || widths != nets_.front().widths()) {
    throw Error("checkpoint shape differs from the configured ensemble");
  }
  for (auto& net : nets_) {
    for (double& p : net.parameters()) p = std::bit_cast<double>(get_le(is, 8));
  }
  for (auto& v : velocity_) std::fill(v.begin(), v.end(), 0.0);
}

nlohmann::json Ensemble::sidecar() const {
  return {{"config", config_.to_json()},
          {"num_entities", num_entities_},
          {"width", width_},
          {"height", height_},
          {"persistency_T", persistency_T_},
          {"layer_widths", nets_.front().widths()},
          {"epochs_done", epochs_done_}};
}

}  // namespace rair
