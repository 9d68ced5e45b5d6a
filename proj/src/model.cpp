#include "vwss/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vwss/errors.hpp"
#include "vwss/io.hpp"
#include "vwss/kernels.hpp"
#include "vwss/rng.hpp"

namespace vwss {

namespace {

constexpr double kProbEps = 1e-7;

void check_config(const MlpConfig& cfg) {
  if (cfg.layer_sizes.size() < 2) {
    throw DomainError("network needs at least an input and an output layer");
  }
  for (const std::size_t w : cfg.layer_sizes) {
    if (w == 0) throw DomainError("layer widths must be positive");
  }
  if (cfg.layer_sizes.back() != 1) {
    throw DomainError("output layer width must be 1 for binary "
                      "classification, got " +
                      std::to_string(cfg.layer_sizes.back()));
  }
  const std::size_t layers = cfg.layer_sizes.size() - 1;
  if (!cfg.l2_per_layer.empty() && cfg.l2_per_layer.size() != layers) {
    throw DomainError("l2_per_layer needs one value per weight layer (" +
                      std::to_string(layers) + "), got " +
                      std::to_string(cfg.l2_per_layer.size()));
  }
  for (const double l : cfg.l2_per_layer) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw DomainError("l2 coefficients must be nonnegative");
    }
  }
}

void check_train_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw DomainError("epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0)) {
    // Zero is allowed for the "no update" contract checks; negative is not.
    if (cfg.learning_rate != 0.0) {
      throw DomainError("learning rate must be nonnegative");
    }
  }
  if (cfg.batch_size < 1) throw DomainError("batch size must be >= 1");
  if (!(cfg.adam_beta1 > 0.0 && cfg.adam_beta1 < 1.0) ||
      !(cfg.adam_beta2 > 0.0 && cfg.adam_beta2 < 1.0)) {
    throw DomainError("Adam decay rates must lie in (0, 1)");
  }
  if (!(cfg.adam_epsilon > 0.0)) {
    throw DomainError("Adam epsilon must be positive");
  }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

MlpConfig validated(MlpConfig cfg) {
  check_config(cfg);
  return cfg;
}

}  // namespace

Mlp::Mlp(MlpConfig cfg, std::vector<std::vector<double>> weights,
         std::vector<std::vector<double>> biases)
    : cfg_(std::move(cfg)),
      weights_(std::move(weights)),
      biases_(std::move(biases)) {
  if (cfg_.l2_per_layer.empty()) {
    cfg_.l2_per_layer.assign(cfg_.layer_sizes.size() - 1, 0.0);
  }
}

Mlp::Mlp(MlpConfig cfg) : Mlp(validated(std::move(cfg)), {}, {}) {
  // Uniform init scaled by fan-in, biases zero, all drawn from the seed in
  // layer order so a fixed seed always yields the same network.
  Rng rng(cfg_.seed);
  const std::size_t layers = weight_layers();
  weights_.resize(layers);
  biases_.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t fan_in = cfg_.layer_sizes[l];
    const std::size_t fan_out = cfg_.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    weights_[l].resize(fan_out * fan_in);
    for (double& w : weights_[l]) {
      w = (2.0 * rng.next_unit() - 1.0) * bound;
    }
    biases_[l].assign(fan_out, 0.0);
  }
}

Mlp Mlp::from_parameters(MlpConfig cfg,
                         std::vector<std::vector<double>> weights,
                         std::vector<std::vector<double>> biases) {
  check_config(cfg);
  const std::size_t layers = cfg.layer_sizes.size() - 1;
  if (weights.size() != layers || biases.size() != layers) {
    throw DomainError("parameter layer count does not match layer_sizes");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (weights[l].size() != cfg.layer_sizes[l + 1] * cfg.layer_sizes[l] ||
        biases[l].size() != cfg.layer_sizes[l + 1]) {
      throw DomainError("parameter shapes do not match layer " +
                        std::to_string(l));
    }
    for (const double v : weights[l]) {
      if (!std::isfinite(v)) throw DomainError("weights must be finite");
    }
    for (const double v : biases[l]) {
      if (!std::isfinite(v)) throw DomainError("biases must be finite");
    }
  }
  return Mlp(std::move(cfg), std::move(weights), std::move(biases));
}

namespace {

// One sample's forward pass keeping every layer's activations (index 0 is
// the input itself). preacts[l] are the affine outputs of weight layer l.
struct ForwardTrace {
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> preacts;
  double prob_raw = 0.0;  // sigmoid before clamping
  double prob = 0.0;      // clamped
};

void forward_into(const MlpConfig& cfg,
                  const std::vector<std::vector<double>>& weights,
                  const std::vector<std::vector<double>>& biases,
                  const double* x, ForwardTrace& trace) {
  const kernels::KernelTable& k = kernels::active_table();
  const std::size_t layers = cfg.layer_sizes.size() - 1;
  trace.activations.resize(layers + 1);
  trace.preacts.resize(layers);
  trace.activations[0].assign(x, x + cfg.layer_sizes[0]);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = cfg.layer_sizes[l];
    const std::size_t out = cfg.layer_sizes[l + 1];
    const std::vector<double>& a = trace.activations[l];
    std::vector<double>& z = trace.preacts[l];
    z.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      z[o] = k.dot(weights[l].data() + o * in, a.data(), in) + biases[l][o];
    }
    std::vector<double>& next = trace.activations[l + 1];
    next.resize(out);
    if (l + 1 < layers) {  // hidden: ReLU
      for (std::size_t o = 0; o < out; ++o) {
        next[o] = z[o] > 0.0 ? z[o] : 0.0;
      }
    } else {  // output: sigmoid, then clamp
      trace.prob_raw = sigmoid(z[0]);
      trace.prob = std::clamp(trace.prob_raw, kProbEps, 1.0 - kProbEps);
      next[0] = trace.prob;
    }
  }
}

}  // namespace

double Mlp::forward(const double* x, std::size_t width) const {
  if (width != input_width()) {
    throw DomainError("input has width " + std::to_string(width) +
                      ", network expects " + std::to_string(input_width()));
  }
  ForwardTrace trace;
  forward_into(cfg_, weights_, biases_, x, trace);
  return trace.prob;
}

ProbabilitySeries Mlp::forward_matrix(const FeatureMatrix& x) const {
  if (x.cols() != input_width()) {
    throw DomainError("input has width " + std::to_string(x.cols()) +
                      ", network expects " + std::to_string(input_width()));
  }
  std::vector<double> probs(x.rows());
  ForwardTrace trace;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    forward_into(cfg_, weights_, biases_, x.row(r), trace);
    probs[r] = trace.prob;
  }
  return ProbabilitySeries(std::move(probs));
}

std::pair<double, Mlp::Gradients> Mlp::loss_and_gradient(
    const FeatureMatrix& x, const LabelSeries& y) const {
  if (x.rows() != y.size()) {
    throw AlignmentError("batch has " + std::to_string(x.rows()) +
                         " rows but " + std::to_string(y.size()) + " labels");
  }
  if (x.rows() == 0) {
    throw DomainError("batch must not be empty");
  }
  if (x.cols() != input_width()) {
    throw DomainError("batch width " + std::to_string(x.cols()) +
                      " does not match network input " +
                      std::to_string(input_width()));
  }

  const kernels::KernelTable& k = kernels::active_table();
  const std::size_t layers = weight_layers();
  const double batch = static_cast<double>(x.rows());

  Gradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    grads.weights[l].assign(weights_[l].size(), 0.0);
    grads.biases[l].assign(biases_[l].size(), 0.0);
  }

  double loss = 0.0;
  ForwardTrace trace;
  std::vector<double> delta, delta_prev;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    forward_into(cfg_, weights_, biases_, x.row(r), trace);
    const double yr = static_cast<double>(y.values()[r]);
    const double p = trace.prob;
    loss += -(yr * std::log(p) + (1.0 - yr) * std::log(1.0 - p));

    // Output delta: dL/dp * dp/dz, where the clamp zeroes dp/dz whenever it
    // was active (the computed loss is locally flat in the parameters then).
    double dp = (-(yr / p) + (1.0 - yr) / (1.0 - p)) / batch;
    double dz;
    if (trace.prob_raw < kProbEps || trace.prob_raw > 1.0 - kProbEps) {
      dz = 0.0;
    } else {
      dz = dp * trace.prob_raw * (1.0 - trace.prob_raw);
    }
    delta.assign(1, dz);

    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = cfg_.layer_sizes[l];
      const std::size_t out = cfg_.layer_sizes[l + 1];
      const std::vector<double>& a = trace.activations[l];
      for (std::size_t o = 0; o < out; ++o) {
        if (delta[o] == 0.0) continue;
        k.axpy(delta[o], a.data(), grads.weights[l].data() + o * in, in);
        grads.biases[l][o] += delta[o];
      }
      if (l == 0) break;
      delta_prev.assign(in, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        if (delta[o] == 0.0) continue;
        k.axpy(delta[o], weights_[l].data() + o * in, delta_prev.data(), in);
      }
      // Pass through the ReLU: zero where the preactivation was <= 0.
      const std::vector<double>& z = trace.preacts[l - 1];
      for (std::size_t i = 0; i < in; ++i) {
        if (z[i] <= 0.0) delta_prev[i] = 0.0;
      }
      delta.swap(delta_prev);
    }
  }
  loss /= batch;

  // Ridge penalty: added once per weight layer, deliberately not averaged
  // over the batch.
  for (std::size_t l = 0; l < layers; ++l) {
    const double lambda = cfg_.l2_per_layer[l];
    if (lambda == 0.0) continue;
    loss += lambda * k.dot(weights_[l].data(), weights_[l].data(),
                           weights_[l].size());
    k.axpy(2.0 * lambda, weights_[l].data(), grads.weights[l].data(),
           weights_[l].size());
  }
  return {loss, std::move(grads)};
}

namespace {

struct AdamState {
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
  std::size_t step = 0;

  explicit AdamState(const Mlp& mlp) {
    for (const auto& w : mlp.weights()) {
      m_w.emplace_back(w.size(), 0.0);
      v_w.emplace_back(w.size(), 0.0);
    }
    for (const auto& b : mlp.biases()) {
      m_b.emplace_back(b.size(), 0.0);
      v_b.emplace_back(b.size(), 0.0);
    }
  }

  void update(Mlp& mlp, const Mlp::Gradients& g, const TrainConfig& cfg) {
    ++step;
    const double b1 = cfg.adam_beta1;
    const double b2 = cfg.adam_beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step));
    const auto apply = [&](std::vector<double>& p, const std::vector<double>& grad,
                           std::vector<double>& m, std::vector<double>& v) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
        v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double mhat = m[i] / corr1;
        const double vhat = v[i] / corr2;
        p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
      }
    };
    for (std::size_t l = 0; l < mlp.weights().size(); ++l) {
      apply(mlp.mutable_weights()[l], g.weights[l], m_w[l], v_w[l]);
      apply(mlp.mutable_biases()[l], g.biases[l], m_b[l], v_b[l]);
    }
  }
};

FeatureMatrix gather_rows(const FeatureMatrix& x,
                          const std::vector<std::size_t>& order,
                          std::size_t begin, std::size_t end) {
  std::vector<double> values;
  values.reserve((end - begin) * x.cols());
  for (std::size_t i = begin; i < end; ++i) {
    const double* row = x.row(order[i]);
    values.insert(values.end(), row, row + x.cols());
  }
  return FeatureMatrix(end - begin, x.cols(), std::move(values));
}

LabelSeries gather_labels(const LabelSeries& y,
                          const std::vector<std::size_t>& order,
                          std::size_t begin, std::size_t end) {
  std::vector<std::uint8_t> values;
  values.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    values.push_back(y.values()[order[i]]);
  }
  return LabelSeries(std::move(values));
}

}  // namespace

TrainRun train_run(const FeatureMatrix& x_train, const LabelSeries& y_train,
                   const FeatureMatrix& x_valid, const FeatureMatrix* x_test,
                   const MlpConfig& mlp_cfg, const TrainConfig& train_cfg) {
  check_config(mlp_cfg);
  check_train_config(train_cfg);
  if (x_train.rows() != y_train.size()) {
    throw AlignmentError("training features have " +
                         std::to_string(x_train.rows()) + " rows but " +
                         std::to_string(y_train.size()) + " labels");
  }
  const auto& yv = y_train.values();
  const bool has_pos = std::find(yv.begin(), yv.end(), std::uint8_t{1}) != yv.end();
  const bool has_neg = std::find(yv.begin(), yv.end(), std::uint8_t{0}) != yv.end();
  if (!has_pos || !has_neg) {
    throw DegenerateDataError(
        "training labels contain a single class; nothing to separate");
  }

  Mlp mlp(mlp_cfg);
  AdamState adam(mlp);
  Rng shuffle_rng(train_cfg.shuffle_seed);
  const std::size_t n = x_train.rows();

  TrainRun run{{}, {}, mlp};
  run.snapshots.reserve(train_cfg.epochs);

  for (std::size_t epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    const std::vector<std::size_t> order = shuffle_rng.permutation(n);
    for (std::size_t begin = 0; begin < n; begin += train_cfg.batch_size) {
      const std::size_t end = std::min(n, begin + train_cfg.batch_size);
      const FeatureMatrix xb = gather_rows(x_train, order, begin, end);
      const LabelSeries yb = gather_labels(y_train, order, begin, end);
      const auto [loss, grads] = mlp.loss_and_gradient(xb, yb);
      if (!std::isfinite(loss)) {
        throw DivergenceError("mini-batch loss became non-finite", epoch);
      }
      adam.update(mlp, grads, train_cfg);
    }

    EpochSnapshot snap(epoch, mlp.forward_matrix(x_train),
                       mlp.forward_matrix(x_valid));
    run.snapshots.push_back(std::move(snap));
    if (x_test != nullptr) {
      run.test_rows.push_back({epoch, mlp.forward_matrix(*x_test)});
    }
  }

  run.model = mlp;
  return run;
}

std::vector<EpochSnapshot> train_with_snapshots(const FeatureMatrix& x_train,
                                                const LabelSeries& y_train,
                                                const FeatureMatrix& x_valid,
                                                const MlpConfig& mlp_cfg,
                                                const TrainConfig& train_cfg) {
  return train_run(x_train, y_train, x_valid, nullptr, mlp_cfg, train_cfg)
      .snapshots;
}

void save_model_json(const std::filesystem::path& path, const Mlp& mlp,
                     const std::optional<Standardizer>& standardizer) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["layer_sizes"] = mlp.config().layer_sizes;
  j["l2_per_layer"] = mlp.config().l2_per_layer;
  j["seed"] = mlp.config().seed;
  j["weights"] = mlp.weights();
  j["biases"] = mlp.biases();
  if (standardizer) {
    j["standardization"] = {{"means", standardizer->means()},
                            {"stdevs", standardizer->stdevs()}};
  } else {
    j["standardization"] = nullptr;
  }
  io::atomic_write_text(path, j.dump(2) + "\n");
}

LoadedModel load_model_json(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("model file " + path.string() +
                     " is not valid JSON: " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1) {
      throw InputError("model file " + path.string() +
                       " has unsupported format_version");
    }
    MlpConfig cfg;
    cfg.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    cfg.l2_per_layer = j.at("l2_per_layer").get<std::vector<double>>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    Mlp mlp = Mlp::from_parameters(
        std::move(cfg),
        j.at("weights").get<std::vector<std::vector<double>>>(),
        j.at("biases").get<std::vector<std::vector<double>>>());
    std::optional<Standardizer> standardizer;
    if (!j.at("standardization").is_null()) {
      standardizer.emplace(
          j["standardization"].at("means").get<std::vector<double>>(),
          j["standardization"].at("stdevs").get<std::vector<double>>());
    }
    return {std::move(mlp), std::move(standardizer)};
  } catch (const nlohmann::json::exception& e) {
    throw InputError("model file " + path.string() +
                     " is malformed: " + e.what());
  }
}

}  // namespace vwss
