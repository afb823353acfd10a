#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "avloc/binio.hpp"
#include "avloc/fusion.hpp"
#include "avloc/grid.hpp"
#include "avloc/nn.hpp"

namespace avloc {

/// Architecture of the trainable fusion stack: the dynamic-stream-weight
/// estimator heads plus the convolutional refinement stage.
struct ModelConfig {
  GridGeometry geometry{};
  int hidden_units = 256;
  int refiner_depth = 4;
  int refiner_filters = 16;
  double prob_floor = kDefaultProbFloor;
};

inline void ensure_valid(const ModelConfig& cfg) {
  ensure_valid(cfg.geometry);
  if (cfg.hidden_units < 1) throw UsageError("model config: hidden_units must be >= 1");
  if (cfg.refiner_depth < 1) throw UsageError("model config: refiner_depth must be >= 1");
  if (cfg.refiner_filters < 1) throw UsageError("model config: refiner_filters must be >= 1");
  if (!(cfg.prob_floor > 0.0 && cfg.prob_floor < 1.0)) {
    throw UsageError("model config: prob_floor must lie in (0, 1)");
  }
}

/// Estimates stream weights from the concatenated audio and video observation
/// grids. One shared hidden layer feeds a per-cell sigmoid head per modality
/// plus a scalar sigmoid head for the spatially invariant strategy.
class DswEstimator {
 public:
  struct Cache {
    std::vector<double> input;       // [flatten(z_a); flatten(z_v)], 2*R*C
    std::vector<double> hidden_out;  // hidden activations
    std::vector<double> audio_out;   // per-cell audio weights, R*C
    std::vector<double> video_out;   // per-cell video weights, R*C
    std::vector<double> scalar_out;  // one element, lambda_t
  };

  DswEstimator(ParamStore& ps, const ModelConfig& cfg)
      : geom_(cfg.geometry),
        hidden_(ps, "dsw.hidden", 2 * cfg.geometry.cell_count(), cfg.hidden_units,
                Activation::Relu),
        head_audio_(ps, "dsw.head_audio", cfg.hidden_units, cfg.geometry.cell_count(),
                    Activation::Sigmoid),
        head_video_(ps, "dsw.head_video", cfg.hidden_units, cfg.geometry.cell_count(),
                    Activation::Sigmoid),
        head_scalar_(ps, "dsw.head_scalar", cfg.hidden_units, 1, Activation::Sigmoid) {}

  void init(ParamStore& ps, Rng& rng) const {
    hidden_.init(ps, rng);
    head_audio_.init(ps, rng);
    head_video_.init(ps, rng);
    head_scalar_.init(ps, rng);
  }

  /// Runs the shared trunk and all heads; the cache is sufficient for an
  /// exact backward pass.
  void forward(const ParamStore& ps, const ProbGrid& z_a, const ProbGrid& z_v,
               Cache& cache) const {
    if (!(z_a.geometry() == geom_) || !(z_v.geometry() == geom_)) {
      throw UsageError("observation grids do not match the model geometry");
    }
    const auto a = z_a.values();
    const auto v = z_v.values();
    cache.input.resize(a.size() + v.size());
    std::copy(a.begin(), a.end(), cache.input.begin());
    std::copy(v.begin(), v.end(), cache.input.begin() + static_cast<std::ptrdiff_t>(a.size()));
    hidden_.forward(ps, cache.input, cache.hidden_out);
    head_audio_.forward(ps, cache.hidden_out, cache.audio_out);
    head_video_.forward(ps, cache.hidden_out, cache.video_out);
    head_scalar_.forward(ps, cache.hidden_out, cache.scalar_out);
  }

  WeightGrid audio_weights(const Cache& cache) const {
    return WeightGrid(geom_, cache.audio_out);
  }
  WeightGrid video_weights(const Cache& cache) const {
    return WeightGrid(geom_, cache.video_out);
  }
  double scalar_weight(const Cache& cache) const { return cache.scalar_out[0]; }

  /// Backprop through the per-cell weight heads and the shared trunk.
  void backward_spatial(const ParamStore& ps, const Cache& cache,
                        std::span<const double> d_audio, std::span<const double> d_video,
                        std::span<double> grad_buf) const {
    std::vector<double> dh_a, dh_v, dx;
    head_audio_.backward(ps, cache.hidden_out, cache.audio_out, d_audio, grad_buf, dh_a);
    head_video_.backward(ps, cache.hidden_out, cache.video_out, d_video, grad_buf, dh_v);
    for (std::size_t i = 0; i < dh_a.size(); ++i) dh_a[i] += dh_v[i];
    hidden_.backward(ps, cache.input, cache.hidden_out, dh_a, grad_buf, dx);
  }

  /// Backprop through the scalar head and the shared trunk.
  void backward_scalar(const ParamStore& ps, const Cache& cache, double d_lambda,
                       std::span<double> grad_buf) const {
    const double d[1] = {d_lambda};
    std::vector<double> dh, dx;
    head_scalar_.backward(ps, cache.hidden_out, cache.scalar_out, d, grad_buf, dh);
    hidden_.backward(ps, cache.input, cache.hidden_out, dh, grad_buf, dx);
  }

  const GridGeometry& geometry() const { return geom_; }

 private:
  GridGeometry geom_;
  Dense hidden_;
  Dense head_audio_;
  Dense head_video_;
  Dense head_scalar_;
};

/// Convolutional refinement stage: a stack of same-padded 3x3 layers that
/// denoises the fused presence-probability grid. Hidden layers are ReLU, the
/// final single-channel layer is sigmoid, so outputs stay in (0, 1) and the
/// spatial size is preserved.
class RefinementNet {
 public:
  struct Cache {
    // outs[0] is the input plane; outs[l] is the output of layer l-1.
    std::vector<std::vector<double>> outs;
  };

  RefinementNet(ParamStore& ps, const ModelConfig& cfg) : geom_(cfg.geometry) {
    const int depth = cfg.refiner_depth;
    const int filters = cfg.refiner_filters;
    layers_.reserve(static_cast<std::size_t>(depth));
    for (int l = 0; l < depth; ++l) {
      const int in_ch = (l == 0) ? 1 : filters;
      const int out_ch = (l == depth - 1) ? 1 : filters;
      const Activation act = (l == depth - 1) ? Activation::Sigmoid : Activation::Relu;
      layers_.emplace_back(ps, "refiner.conv" + std::to_string(l), geom_.rows, geom_.cols, in_ch,
                           out_ch, act);
    }
  }

  void init(ParamStore& ps, Rng& rng) const {
    for (const auto& l : layers_) l.init(ps, rng);
  }

  /// Input is a flattened R*C probability plane; the refined plane lands in
  /// cache.outs.back().
  void forward(const ParamStore& ps, std::span<const double> p, Cache& cache) const {
    if (p.size() != static_cast<std::size_t>(geom_.cell_count())) {
      throw UsageError("refiner input does not match the model geometry");
    }
    cache.outs.resize(layers_.size() + 1);
    cache.outs[0].assign(p.begin(), p.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].forward(ps, cache.outs[l], cache.outs[l + 1]);
    }
  }

  const std::vector<double>& output(const Cache& cache) const { return cache.outs.back(); }

  /// Returns the gradient with respect to the input plane in d_input.
  void backward(const ParamStore& ps, const Cache& cache, std::span<const double> d_out,
                std::span<double> grad_buf, std::vector<double>& d_input) const {
    std::vector<double> grad(d_out.begin(), d_out.end());
    std::vector<double> next;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      layers_[l].backward(ps, cache.outs[l], cache.outs[l + 1], grad, grad_buf, next);
      grad.swap(next);
    }
    d_input = std::move(grad);
  }

  const GridGeometry& geometry() const { return geom_; }
  int depth() const { return static_cast<int>(layers_.size()); }

 private:
  GridGeometry geom_;
  std::vector<Conv3x3> layers_;
};

/// The full trainable stack with its flat parameter store. Parameter layout
/// (and therefore the checkpoint layout) follows declaration order:
/// estimator trunk, audio head, video head, scalar head, then refiner layers.
class FusionModel {
 public:
  explicit FusionModel(const ModelConfig& cfg)
      : cfg_((ensure_valid(cfg), cfg)), estimator_(params_, cfg_), refiner_(params_, cfg_) {}

  FusionModel(const ModelConfig& cfg, std::uint64_t init_seed) : FusionModel(cfg) {
    Rng rng(init_seed);
    estimator_.init(params_, rng);
    refiner_.init(params_, rng);
  }

  const ModelConfig& config() const { return cfg_; }
  const GridGeometry& geometry() const { return cfg_.geometry; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const DswEstimator& estimator() const { return estimator_; }
  const RefinementNet& refiner() const { return refiner_; }

  // --- checkpoint format "DSWM1" -------------------------------------------
  // magic "DSWM1" | u32 rows | u32 cols | u32 frame_width | u32 frame_height
  // | u32 hidden_units | u32 refiner_depth | u32 refiner_filters
  // | u64 param_count | param_count little-endian f64 values.
  // Frame dimensions are stored as rounded pixel counts.

  void save(const std::filesystem::path& path) const {
    std::string out;
    out.append(kMagic);
    put_u32(out, static_cast<std::uint32_t>(cfg_.geometry.rows));
    put_u32(out, static_cast<std::uint32_t>(cfg_.geometry.cols));
    put_u32(out, static_cast<std::uint32_t>(std::llround(cfg_.geometry.frame_width)));
    put_u32(out, static_cast<std::uint32_t>(std::llround(cfg_.geometry.frame_height)));
    put_u32(out, static_cast<std::uint32_t>(cfg_.hidden_units));
    put_u32(out, static_cast<std::uint32_t>(cfg_.refiner_depth));
    put_u32(out, static_cast<std::uint32_t>(cfg_.refiner_filters));
    put_u64(out, params_.size());
    for (double v : params_.values()) put_f64(out, v);
    atomic_write_file(path, out);
  }

  static FusionModel load(const std::filesystem::path& path) {
    const std::string data = read_file_bytes(path);
    ByteReader r(data, path.string());
    r.read_magic(kMagic, 5);
    ModelConfig cfg;
    cfg.geometry.rows = static_cast<int>(r.read_u32("rows"));
    cfg.geometry.cols = static_cast<int>(r.read_u32("cols"));
    cfg.geometry.frame_width = static_cast<double>(r.read_u32("frame_width"));
    cfg.geometry.frame_height = static_cast<double>(r.read_u32("frame_height"));
    cfg.hidden_units = static_cast<int>(r.read_u32("hidden_units"));
    cfg.refiner_depth = static_cast<int>(r.read_u32("refiner_depth"));
    cfg.refiner_filters = static_cast<int>(r.read_u32("refiner_filters"));
    try {
      ensure_valid(cfg);
    } catch (const UsageError& e) {
      throw FormatError(path.string() + ": invalid checkpoint header: " + e.what());
    }
    FusionModel model(cfg);
    const std::uint64_t n = r.read_u64("param_count");
    if (n != model.params_.size()) {
      throw FormatError(path.string() + ": checkpoint holds " + std::to_string(n) +
                        " parameters, model expects " + std::to_string(model.params_.size()));
    }
    auto dst = model.params_.values();
    for (std::uint64_t i = 0; i < n; ++i) dst[i] = r.read_f64("parameter");
    r.expect_end();
    return model;
  }

 private:
  static constexpr const char* kMagic = "DSWM1";

  ModelConfig cfg_;
  ParamStore params_;
  DswEstimator estimator_;
  RefinementNet refiner_;
};

/// Convenience wrapper: weight grids for one frame of observations.
inline std::pair<WeightGrid, WeightGrid> dsw_forward(const FusionModel& model,
                                                     const ProbGrid& z_a, const ProbGrid& z_v) {
  DswEstimator::Cache cache;
  model.estimator().forward(model.params(), z_a, z_v, cache);
  return {model.estimator().audio_weights(cache), model.estimator().video_weights(cache)};
}

/// Convenience wrapper: refined probability grid.
inline ProbGrid refine_forward(const FusionModel& model, const ProbGrid& p) {
  if (!(p.geometry() == model.geometry())) {
    throw UsageError("refiner input does not match the model geometry");
  }
  RefinementNet::Cache cache;
  model.refiner().forward(model.params(), p.values(), cache);
  return ProbGrid(p.geometry(), model.refiner().output(cache));
}

}  // namespace avloc
