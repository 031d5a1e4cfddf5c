#pragma once

// A minimal spectral-convolution operator network with hand-derived
// gradients and a desk-scale SGD training loop.
//
// One layer computes
//   y = act( x W + 1 b^T + Re( V^H (R (.) (V x)) ) )
// where V is the dense forward transform for the layer's point cloud, R
// holds one complex C_in x C_out mixing matrix per retained mode, and the
// pointwise path x W + b runs in parallel with the spectral path.  A model
// is lift -> L layers (last one without activation) -> project, with one V
// shared by all layers of a given cloud.
//
// Gradients are reverse-mode, derived directly from the real/imaginary
// decomposition of the complex algebra.  Complex parameter gradients are
// stored as complex numbers whose real/imaginary parts are the partial
// derivatives with respect to the parameter's real/imaginary parts, so a
// gradient step  R -= lr * grad  is plain componentwise SGD.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dse/common.hpp"
#include "dse/core.hpp"
#include "dse/distributions.hpp"
#include "dse/nudft.hpp"

namespace dse {

enum class Activation { gelu, relu };
enum class LossKind { l1, l2 };
enum class TaskKind { identity, derivative };

inline double activate(Activation act, double x) {
  switch (act) {
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::gelu:
      return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
  }
  throw ConfigError("unknown activation");
}

inline double activate_derivative(Activation act, double x) {
  switch (act) {
    case Activation::relu:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::gelu: {
      const double cdf = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
      const double pdf =
          std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
      return cdf + x * pdf;
    }
  }
  throw ConfigError("unknown activation");
}

// ---------------------------------------------------------------------------
// Parameters.
// ---------------------------------------------------------------------------

struct AffineParams {
  RMat W;                  // C_in x C_out
  std::vector<double> b;   // C_out
};

struct SpectralLayerParams {
  CMat R;   // m_total x (C_in * C_out); row j holds the mode-j mixing matrix
            // row-major, entry (ci, co) at column ci * C_out + co
  RMat W;   // C_in x C_out pointwise path
  std::vector<double> b;  // C_out
  std::size_t c_in = 0;
  std::size_t c_out = 0;
};

struct ParamSet {
  AffineParams lift;
  std::vector<SpectralLayerParams> layers;
  AffineParams project;
};

struct ModelConfig {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t width = 32;
  std::size_t n_layers = 2;
  ModeSpec modes =
      ModeSpec::fourier(17, 1, FrequencyRange::symmetric);
  Normalization normalization = Normalization::unitary;
  Activation activation = Activation::gelu;
  LossKind loss = LossKind::l1;
  bool with_coords = false;  // append point coordinates as input channels
  double lr = 0.01;
  double momentum = 0.9;
  bool cosine_decay = true;
  std::size_t epochs = 200;
  std::size_t batch = 8;
  std::uint64_t seed = 1;

  std::size_t lift_in_channels(std::size_t dim) const {
    return in_channels + (with_coords ? dim : 0);
  }
};

struct Model {
  ModelConfig cfg;
  ParamSet params;
};

// Flat view of every real scalar slot in a parameter set, in a fixed
// deterministic order (lift W, lift b, per layer R re/im interleaved, W, b,
// project W, project b).  The optimizer, the finite-difference probe, and
// the checkpoint writer all iterate parameters through this view so they
// can never disagree on ordering.  The grouped view keeps one entry per
// named tensor, in the same order, so callers that need per-group coverage
// (e.g. the gradient check) see the same addresses.
inline std::vector<std::vector<double*>> param_group_slots(ParamSet& p) {
  std::vector<std::vector<double*>> groups;
  const auto add_mat = [&](RMat& m) {
    std::vector<double*> g;
    for (auto& v : m.a) g.push_back(&v);
    groups.push_back(std::move(g));
  };
  const auto add_vec = [&](std::vector<double>& v) {
    std::vector<double*> g;
    for (auto& x : v) g.push_back(&x);
    groups.push_back(std::move(g));
  };
  add_mat(p.lift.W);
  add_vec(p.lift.b);
  for (auto& layer : p.layers) {
    // std::complex<double> is layout-compatible with double[2]
    std::vector<double*> g;
    auto* as_doubles = reinterpret_cast<double*>(layer.R.a.data());
    for (std::size_t i = 0; i < 2 * layer.R.a.size(); ++i)
      g.push_back(as_doubles + i);
    groups.push_back(std::move(g));
    add_mat(layer.W);
    add_vec(layer.b);
  }
  add_mat(p.project.W);
  add_vec(p.project.b);
  return groups;
}

inline std::vector<double*> param_slots(ParamSet& p) {
  std::vector<double*> slots;
  for (auto& group : param_group_slots(p))
    slots.insert(slots.end(), group.begin(), group.end());
  return slots;
}

// A zeroed parameter set with the same shapes.
inline ParamSet zeros_like(const ParamSet& p) {
  ParamSet z;
  z.lift.W = RMat(p.lift.W.rows, p.lift.W.cols);
  z.lift.b.assign(p.lift.b.size(), 0.0);
  z.layers.resize(p.layers.size());
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    z.layers[i].R = CMat(p.layers[i].R.rows, p.layers[i].R.cols);
    z.layers[i].W = RMat(p.layers[i].W.rows, p.layers[i].W.cols);
    z.layers[i].b.assign(p.layers[i].b.size(), 0.0);
    z.layers[i].c_in = p.layers[i].c_in;
    z.layers[i].c_out = p.layers[i].c_out;
  }
  z.project.W = RMat(p.project.W.rows, p.project.W.cols);
  z.project.b.assign(p.project.b.size(), 0.0);
  return z;
}

namespace detail {
inline void fill_gaussian(SplitMix64& rng, double scale, double* dst,
                          std::size_t count) {
  std::size_t i = 0;
  while (i + 1 < count) {
    double g0, g1;
    rng.next_gaussian_pair(g0, g1);
    dst[i] = scale * g0;
    dst[i + 1] = scale * g1;
    i += 2;
  }
  if (i < count) {
    double g0, g1;
    rng.next_gaussian_pair(g0, g1);
    dst[i] = scale * g0;
  }
}
}  // namespace detail

// Deterministic initialization: one SplitMix64 stream in parameter-slot
// order.  Weight scales follow the usual fan-based heuristics; biases start
// at zero; R starts small so the spectral path grows from near-silence.
inline Model init_model(const ModelConfig& cfg, std::size_t point_dim) {
  if (cfg.width < 1 || cfg.n_layers < 1)
    throw ConfigError("model width and layer count must be >= 1");
  const std::size_t c_lift = cfg.lift_in_channels(point_dim);
  const std::size_t m_total = cfg.modes.m_total();

  Model m;
  m.cfg = cfg;
  SplitMix64 rng(cfg.seed);

  m.params.lift.W = RMat(c_lift, cfg.width);
  detail::fill_gaussian(
      rng, std::sqrt(2.0 / static_cast<double>(c_lift + cfg.width)),
      m.params.lift.W.data(), m.params.lift.W.size());
  m.params.lift.b.assign(cfg.width, 0.0);

  m.params.layers.resize(cfg.n_layers);
  for (auto& layer : m.params.layers) {
    layer.c_in = cfg.width;
    layer.c_out = cfg.width;
    layer.R = CMat(m_total, cfg.width * cfg.width);
    detail::fill_gaussian(rng,
                          0.02 / std::sqrt(static_cast<double>(cfg.width)),
                          reinterpret_cast<double*>(layer.R.a.data()),
                          2 * layer.R.a.size());
    layer.W = RMat(cfg.width, cfg.width);
    detail::fill_gaussian(rng,
                          std::sqrt(1.0 / static_cast<double>(cfg.width)),
                          layer.W.data(), layer.W.size());
    layer.b.assign(cfg.width, 0.0);
  }

  m.params.project.W = RMat(cfg.width, cfg.out_channels);
  detail::fill_gaussian(
      rng, std::sqrt(2.0 / static_cast<double>(cfg.width + cfg.out_channels)),
      m.params.project.W.data(), m.params.project.W.size());
  m.params.project.b.assign(cfg.out_channels, 0.0);
  return m;
}

// ---------------------------------------------------------------------------
// Forward pass (with an optional tape retaining every intermediate needed by
// the backward pass).
// ---------------------------------------------------------------------------

struct LayerTape {
  RMat x;    // layer input, N x C_in
  CMat xc;   // V x, m x C_in
  RMat pre;  // pre-activation output, N x C_out
  bool activated = false;
};

struct ModelTape {
  RMat input;   // assembled model input (data + optional coords), N x C_lift
  RMat lifted;  // N x width
  std::vector<LayerTape> layers;
};

inline RMat affine_forward(const AffineParams& p, const RMat& x) {
  if (x.cols != p.W.rows)
    throw ShapeError("affine_forward: channel mismatch");
  RMat y = matmul(x, p.W);
  for (std::size_t i = 0; i < y.rows; ++i)
    for (std::size_t j = 0; j < y.cols; ++j) y(i, j) += p.b[j];
  return y;
}

// Per-mode channel mixing H[j] = R[j]^T . Xc[j] (for each mode j the C_in
// vector of coefficients is mapped through that mode's C_in x C_out matrix).
inline CMat mode_mix(const SpectralLayerParams& p, const CMat& xc) {
  CMat h(xc.rows, p.c_out);
  for (std::size_t j = 0; j < xc.rows; ++j) {
    const Complex* rj = p.R.data() + j * p.R.cols;
    const Complex* xj = xc.data() + j * xc.cols;
    Complex* hj = h.data() + j * h.cols;
    for (std::size_t ci = 0; ci < p.c_in; ++ci) {
      const Complex xv = xj[ci];
      const Complex* rrow = rj + ci * p.c_out;
      for (std::size_t co = 0; co < p.c_out; ++co) hj[co] += rrow[co] * xv;
    }
  }
  return h;
}

inline RMat spectral_layer_forward(const SpectralLayerParams& p, const RMat& x,
                                   const CMat& v, Activation act,
                                   bool apply_activation,
                                   LayerTape* tape = nullptr) {
  if (x.cols != p.c_in)
    throw ShapeError("spectral_layer_forward: input has " +
                     std::to_string(x.cols) + " channels, layer expects " +
                     std::to_string(p.c_in));
  if (v.cols != x.rows)
    throw ShapeError("spectral_layer_forward: transform is for " +
                     std::to_string(v.cols) + " points, field has " +
                     std::to_string(x.rows));
  if (v.rows != p.R.rows)
    throw ShapeError("spectral_layer_forward: R covers " +
                     std::to_string(p.R.rows) + " modes, transform has " +
                     std::to_string(v.rows));

  CMat xc = matmul(v, x);          // m x C_in
  CMat h = mode_mix(p, xc);        // m x C_out
  RMat pre = real_adjoint_matmul(v, h);  // N x C_out, Re(V^H h)
  for (std::size_t i = 0; i < pre.rows; ++i) {
    const double* xi = x.data() + i * x.cols;
    double* yi = pre.data() + i * pre.cols;
    for (std::size_t ci = 0; ci < p.c_in; ++ci) {
      const double xv = xi[ci];
      const double* wrow = p.W.data() + ci * p.W.cols;
      for (std::size_t co = 0; co < p.c_out; ++co) yi[co] += xv * wrow[co];
    }
    for (std::size_t co = 0; co < p.c_out; ++co) yi[co] += p.b[co];
  }

  RMat out = pre;
  if (apply_activation)
    for (auto& val : out.a) val = activate(act, val);

  if (tape) {
    tape->x = x;
    tape->xc = std::move(xc);
    tape->pre = std::move(pre);
    tape->activated = apply_activation;
  }
  return out;
}

// Assemble the model input: the data channels, plus the point coordinates as
// extra channels when configured.
inline RMat assemble_input(const ModelConfig& cfg, const RMat& data,
                           const PointSet& points) {
  if (data.rows != points.n_points())
    throw ShapeError("model input rows != point count");
  if (data.cols != cfg.in_channels)
    throw ShapeError("model input has " + std::to_string(data.cols) +
                     " channels, config expects " +
                     std::to_string(cfg.in_channels));
  if (!cfg.with_coords) return data;
  RMat full(data.rows, data.cols + points.dim());
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t c = 0; c < data.cols; ++c) full(i, c) = data(i, c);
    for (std::size_t d = 0; d < points.dim(); ++d)
      full(i, data.cols + d) = points.coords(i, d);
  }
  return full;
}

inline RMat model_forward(const Model& m, const RMat& data,
                          const PointSet& points, const CMat& v,
                          ModelTape* tape = nullptr) {
  RMat input = assemble_input(m.cfg, data, points);
  RMat hidden = affine_forward(m.params.lift, input);
  if (tape) {
    tape->input = input;
    tape->lifted = hidden;
    tape->layers.assign(m.params.layers.size(), LayerTape{});
  }
  for (std::size_t li = 0; li < m.params.layers.size(); ++li) {
    const bool last = li + 1 == m.params.layers.size();
    hidden = spectral_layer_forward(m.params.layers[li], hidden, v,
                                    m.cfg.activation, !last,
                                    tape ? &tape->layers[li] : nullptr);
  }
  return affine_forward(m.params.project, hidden);
}

// ---------------------------------------------------------------------------
// Backward pass.
// ---------------------------------------------------------------------------

namespace detail {
inline void accumulate_affine_backward(const AffineParams& p, const RMat& x,
                                       const RMat& g, AffineParams& grad,
                                       RMat* dx) {
  RMat gw = transpose_matmul(x, g);
  for (std::size_t i = 0; i < gw.size(); ++i) grad.W.a[i] += gw.a[i];
  for (std::size_t i = 0; i < g.rows; ++i)
    for (std::size_t j = 0; j < g.cols; ++j) grad.b[j] += g(i, j);
  if (dx) *dx = matmul_transpose(g, p.W);
}
}  // namespace detail

// Accumulates gradients for one layer given the gradient at its output;
// returns the gradient at its input.
inline RMat spectral_layer_backward(const SpectralLayerParams& p,
                                    const LayerTape& tape, const CMat& v,
                                    Activation act, const RMat& g_out,
                                    SpectralLayerParams& grad) {
  RMat g = g_out;
  if (tape.activated) {
    for (std::size_t i = 0; i < g.size(); ++i)
      g.a[i] *= activate_derivative(act, tape.pre.a[i]);
  }

  // Pointwise path.
  for (std::size_t i = 0; i < tape.x.rows; ++i) {
    const double* xi = tape.x.data() + i * tape.x.cols;
    const double* gi = g.data() + i * g.cols;
    for (std::size_t ci = 0; ci < p.c_in; ++ci) {
      double* grow = grad.W.data() + ci * grad.W.cols;
      const double xv = xi[ci];
      for (std::size_t co = 0; co < p.c_out; ++co) grow[co] += xv * gi[co];
    }
    for (std::size_t co = 0; co < p.c_out; ++co) grad.b[co] += gi[co];
  }
  RMat dx = matmul_transpose(g, p.W);  // N x C_in

  // Spectral path.  With S = Re(V^H H) and upstream gradient g at S, the
  // gradient arriving at H (as d/dRe + i d/dIm) is A = V g; then
  //   dL/dR[j][ci][co] = A[j][co] * conj(Xc[j][ci])
  //   G_X[j][ci]       = sum_co A[j][co] * conj(R[j][ci][co])
  //   dL/dx           += Re(V^H G_X).
  CMat a = matmul(v, g);  // m x C_out
  CMat gx(a.rows, p.c_in);
  for (std::size_t j = 0; j < a.rows; ++j) {
    const Complex* aj = a.data() + j * a.cols;
    const Complex* xj = tape.xc.data() + j * tape.xc.cols;
    const Complex* rj = p.R.data() + j * p.R.cols;
    Complex* grj = grad.R.data() + j * grad.R.cols;
    Complex* gxj = gx.data() + j * gx.cols;
    for (std::size_t ci = 0; ci < p.c_in; ++ci) {
      const Complex xconj = std::conj(xj[ci]);
      const Complex* rrow = rj + ci * p.c_out;
      Complex* grow = grj + ci * p.c_out;
      Complex acc{};
      for (std::size_t co = 0; co < p.c_out; ++co) {
        grow[co] += aj[co] * xconj;
        acc += aj[co] * std::conj(rrow[co]);
      }
      gxj[ci] = acc;
    }
  }
  RMat dx_spectral = real_adjoint_matmul(v, gx);  // N x C_in
  for (std::size_t i = 0; i < dx.size(); ++i) dx.a[i] += dx_spectral.a[i];
  return dx;
}

// Full reverse pass; accumulates into `grads` (zeroed or partially filled for
// batch accumulation) and returns nothing further.
inline void model_backward(const Model& m, const ModelTape& tape,
                           const CMat& v, const RMat& loss_grad,
                           ParamSet& grads) {
  // Projection input is the last layer's output.
  const std::size_t n_layers = m.params.layers.size();
  RMat last_hidden;
  {
    const LayerTape& lt = tape.layers[n_layers - 1];
    last_hidden = lt.pre;
    if (lt.activated)
      for (auto& val : last_hidden.a) val = activate(m.cfg.activation, val);
  }
  RMat g;
  detail::accumulate_affine_backward(m.params.project, last_hidden, loss_grad,
                                     grads.project, &g);
  for (std::size_t li = n_layers; li-- > 0;) {
    g = spectral_layer_backward(m.params.layers[li], tape.layers[li], v,
                                m.cfg.activation, g, grads.layers[li]);
  }
  detail::accumulate_affine_backward(m.params.lift, tape.input, g, grads.lift,
                                     nullptr);
}

// ---------------------------------------------------------------------------
// Losses.
// ---------------------------------------------------------------------------

inline double loss_eval(const RMat& pred, const RMat& target, LossKind kind) {
  if (!pred.same_shape(target)) throw ShapeError("loss_eval: shape mismatch");
  const double count = static_cast<double>(pred.size());
  double acc = 0.0;
  if (kind == LossKind::l1) {
    for (std::size_t i = 0; i < pred.size(); ++i)
      acc += std::abs(pred.a[i] - target.a[i]);
  } else {
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = pred.a[i] - target.a[i];
      acc += d * d;
    }
  }
  return acc / count;
}

inline RMat loss_grad(const RMat& pred, const RMat& target, LossKind kind) {
  if (!pred.same_shape(target)) throw ShapeError("loss_grad: shape mismatch");
  const double count = static_cast<double>(pred.size());
  RMat g(pred.rows, pred.cols);
  if (kind == LossKind::l1) {
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = pred.a[i] - target.a[i];
      g.a[i] = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / count;
    }
  } else {
    for (std::size_t i = 0; i < pred.size(); ++i)
      g.a[i] = 2.0 * (pred.a[i] - target.a[i]) / count;
  }
  return g;
}

// sum |pred - target| / sum |target|; undefined for a zero-norm target.
inline double relative_l1(const RMat& pred, const RMat& target) {
  if (!pred.same_shape(target)) throw ShapeError("relative_l1: shape mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    num += std::abs(pred.a[i] - target.a[i]);
    den += std::abs(target.a[i]);
  }
  if (den == 0.0) {
    emit_diagnostic("relative_l1: zero-norm target, metric undefined");
    throw NumericError("relative_l1 is undefined for a zero-norm target");
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Datasets and training.
// ---------------------------------------------------------------------------

struct Sample {
  RMat input;   // N x in_channels
  RMat target;  // N x out_channels
};

struct Dataset {
  PointSet points;
  std::vector<Sample> train;
  std::vector<Sample> test;
};

namespace detail {
inline RMat real_part(const Field& f) {
  RMat out(f.values.rows, f.values.cols);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    out.a[i] = f.values.a[i].real();
  return out;
}
}  // namespace detail

// Synthetic operator-learning tasks on a shared cloud.  Per-sample seeds are
// drawn up front from one stream so sample i is reproducible regardless of
// how many samples are requested after it.
inline Dataset make_task_dataset(TaskKind task, const PointSet& points,
                                 std::size_t max_freq, std::size_t n_train,
                                 std::size_t n_test, std::uint64_t seed) {
  if (points.dim() != 1)
    throw ConfigError("task datasets are defined on 1D point sets");
  Dataset ds;
  ds.points = points;
  SplitMix64 seeder(seed);
  const std::size_t total = n_train + n_test;
  std::vector<std::uint64_t> sample_seeds(total);
  for (auto& s : sample_seeds) s = seeder.next_u64();

  for (std::size_t i = 0; i < total; ++i) {
    BandLimitedField blf =
        gen_random_band_limited_field(points, max_freq, 1, sample_seeds[i]);
    Sample s;
    s.input = detail::real_part(blf.field);
    if (task == TaskKind::identity) {
      s.target = s.input;
    } else {
      s.target = detail::real_part(
          eval_band_limited_derivative_1d(blf.coeffs, max_freq, points));
    }
    (i < n_train ? ds.train : ds.test).push_back(std::move(s));
  }
  return ds;
}

// Mean over samples of the per-sample relative L1 error.
inline double evaluate_relative_l1(const Model& m, const PointSet& points,
                                   const CMat& v,
                                   const std::vector<Sample>& samples) {
  if (samples.empty()) throw ConfigError("evaluate_relative_l1: no samples");
  double acc = 0.0;
  for (const auto& s : samples) {
    const RMat pred = model_forward(m, s.input, points, v, nullptr);
    acc += relative_l1(pred, s.target);
  }
  return acc / static_cast<double>(samples.size());
}

struct HistoryRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double test_rel_l1 = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<HistoryRow> history;
};

// Plain SGD with optional momentum and cosine learning-rate decay.
// Single-threaded and fully seeded: identical configs and datasets produce
// bit-identical histories and parameters.
inline TrainResult train(const ModelConfig& cfg, const Dataset& data) {
  if (data.train.empty()) throw ConfigError("train: empty training set");
  if (cfg.batch < 1) throw ConfigError("train: batch size must be >= 1");

  TrainResult result;
  result.model = init_model(cfg, data.points.dim());
  Model& model = result.model;

  const CMat v =
      build_fourier_matrix(data.points, cfg.modes, cfg.normalization).entries;

  ParamSet grads = zeros_like(model.params);
  ParamSet velocity = zeros_like(model.params);
  std::vector<double*> p_slots = param_slots(model.params);
  std::vector<double*> g_slots = param_slots(grads);
  std::vector<double*> v_slots = param_slots(velocity);

  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 shuffle_rng(cfg.seed ^ 0x5b7e0d5c2a6f913bull);

  ModelTape tape;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr_now =
        cfg.cosine_decay
            ? cfg.lr * 0.5 *
                  (1.0 + std::cos(kPi * static_cast<double>(epoch) /
                                  static_cast<double>(cfg.epochs)))
            : cfg.lr;

    // Fisher-Yates with the documented generator.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j =
          static_cast<std::size_t>(shuffle_rng.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    std::size_t cursor = 0;
    while (cursor < order.size()) {
      const std::size_t batch_n =
          std::min(cfg.batch, order.size() - cursor);
      for (auto* g : g_slots) *g = 0.0;
      for (std::size_t bi = 0; bi < batch_n; ++bi) {
        const Sample& s = data.train[order[cursor + bi]];
        const RMat pred = model_forward(model, s.input, data.points, v, &tape);
        epoch_loss += loss_eval(pred, s.target, cfg.loss);
        const RMat lg = loss_grad(pred, s.target, cfg.loss);
        model_backward(model, tape, v, lg, grads);
      }
      const double inv_batch = 1.0 / static_cast<double>(batch_n);
      for (std::size_t i = 0; i < p_slots.size(); ++i) {
        const double g = *g_slots[i] * inv_batch;
        *v_slots[i] = cfg.momentum * *v_slots[i] + g;
        *p_slots[i] -= lr_now * *v_slots[i];
      }
      cursor += batch_n;
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      emit_diagnostic("train: loss became non-finite at epoch " +
                      std::to_string(epoch));
      throw NumericError("training diverged: non-finite loss at epoch " +
                         std::to_string(epoch));
    }

    HistoryRow row;
    row.epoch = epoch;
    row.train_loss = epoch_loss;
    row.test_rel_l1 = data.test.empty()
                          ? 0.0
                          : evaluate_relative_l1(model, data.points, v,
                                                 data.test);
    result.history.push_back(row);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Finite-difference verification of the analytic gradients.  The probe uses
// the squared-error loss (smooth everywhere, so central differences converge
// at the stated epsilon) and reports the worst relative discrepancy
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-6)
// over the `per_group` largest-magnitude gradient entries of every parameter
// tensor (all entries when a tensor is smaller than that).
//
// Probing by magnitude is what makes the comparison meaningful: a central
// difference carries absolute rounding noise of roughly |loss| * u / eps
// from the two forward passes (u = 2^-52), so a component whose true
// gradient sits below that floor compares noise against noise and says
// nothing about the formulas.  Every tensor still contributes probes, so a
// systematic error in any gradient path would surface.
// ---------------------------------------------------------------------------

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t n_probed = 0;
};

inline GradCheckResult gradient_check(Model& model, const PointSet& points,
                                      const Sample& sample,
                                      std::size_t per_group, double eps) {
  const CMat v = build_fourier_matrix(points, model.cfg.modes,
                                      model.cfg.normalization)
                     .entries;
  ParamSet grads = zeros_like(model.params);
  ModelTape tape;
  {
    const RMat pred = model_forward(model, sample.input, points, v, &tape);
    const RMat lg = loss_grad(pred, sample.target, LossKind::l2);
    model_backward(model, tape, v, lg, grads);
  }
  const auto p_groups = param_group_slots(model.params);
  const auto g_groups = param_group_slots(grads);

  GradCheckResult out;
  for (std::size_t gi = 0; gi < p_groups.size(); ++gi) {
    // Indices of this tensor's entries, largest |gradient| first.
    std::vector<std::size_t> order(p_groups[gi].size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(*g_groups[gi][a]) > std::abs(*g_groups[gi][b]);
    });
    const std::size_t take = std::min(per_group, order.size());

    for (std::size_t t = 0; t < take; ++t) {
      double* slot = p_groups[gi][order[t]];
      const double saved = *slot;

      *slot = saved + eps;
      const RMat plus = model_forward(model, sample.input, points, v, nullptr);
      *slot = saved - eps;
      const RMat minus =
          model_forward(model, sample.input, points, v, nullptr);
      *slot = saved;

      const double numeric = (loss_eval(plus, sample.target, LossKind::l2) -
                              loss_eval(minus, sample.target, LossKind::l2)) /
                             (2.0 * eps);
      const double analytic = *g_groups[gi][order[t]];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      out.max_rel_error =
          std::max(out.max_rel_error, std::abs(analytic - numeric) / denom);
      ++out.n_probed;
    }
  }
  return out;
}

}  // namespace dse
