#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dse/dse.hpp"
#include "support/oracles.hpp"

using namespace dse;

namespace {
ModelConfig small_config() {
  ModelConfig cfg;
  cfg.width = 4;
  cfg.n_layers = 2;
  cfg.modes = ModeSpec::fourier(5, 1, FrequencyRange::symmetric);
  cfg.epochs = 6;
  cfg.batch = 4;
  cfg.lr = 0.05;
  cfg.seed = 3;
  return cfg;
}

void randomize(ParamSet& p, std::uint64_t seed, double scale) {
  SplitMix64 rng(seed);
  for (auto* slot : param_slots(p))
    *slot = scale * (2.0 * rng.next_double() - 1.0);
}
}  // namespace

TEST_CASE("activation values and derivatives") {
  CHECK(activate(Activation::relu, -1.0) == 0.0);
  CHECK(activate(Activation::relu, 2.5) == 2.5);
  CHECK(activate(Activation::gelu, 0.0) == 0.0);
  // gelu(x) -> x for large x, -> 0 for very negative x
  CHECK(activate(Activation::gelu, 10.0) == Catch::Approx(10.0).epsilon(1e-12));
  CHECK(std::abs(activate(Activation::gelu, -10.0)) < 1e-12);
  // gelu(1) = 0.5 * (1 + erf(1/sqrt(2))) = Phi(1)
  CHECK(activate(Activation::gelu, 1.0) ==
        Catch::Approx(0.8413447460685429).epsilon(1e-12));

  for (const double x : {-1.7, -0.3, 0.2, 0.9, 2.4}) {
    const double h = 1e-6;
    for (const auto act : {Activation::gelu, Activation::relu}) {
      const double fd =
          (activate(act, x + h) - activate(act, x - h)) / (2.0 * h);
      CHECK(activate_derivative(act, x) == Catch::Approx(fd).margin(1e-8));
    }
  }
}

TEST_CASE("layer forward equals the nested-loop oracle") {
  const PointSet points = gen_contracting_expanding_1d(14, 0.4, 1.2);
  const auto spec = ModeSpec::fourier(5, 1, FrequencyRange::symmetric);
  const CMat v =
      build_fourier_matrix(points, spec, Normalization::unitary).entries;

  SpectralLayerParams p;
  p.c_in = 3;
  p.c_out = 2;
  p.R = CMat(5, 6);
  p.W = RMat(3, 2);
  p.b.assign(2, 0.0);
  SplitMix64 rng(8);
  for (auto& z : p.R.a) {
    double g0, g1;
    rng.next_gaussian_pair(g0, g1);
    z = {g0, g1};
  }
  for (auto& x : p.W.a) x = rng.next_double() - 0.5;
  for (auto& x : p.b) x = rng.next_double() - 0.5;

  RMat x(14, 3);
  for (auto& val : x.a) val = rng.next_double() - 0.5;

  for (const bool act : {true, false}) {
    const RMat got = spectral_layer_forward(p, x, v, Activation::gelu, act);
    const RMat want =
        oracle::naive_layer_forward(p, x, v, Activation::gelu, act);
    CHECK(max_abs_diff(got, want) < 1e-12);
  }
}

TEST_CASE("layer shape validation") {
  const PointSet points = gen_equispaced_1d(10);
  const CMat v = build_fourier_matrix(points, ModeSpec::fourier(4),
                                      Normalization::unitary)
                     .entries;
  SpectralLayerParams p;
  p.c_in = 2;
  p.c_out = 2;
  p.R = CMat(4, 4);
  p.W = RMat(2, 2);
  p.b.assign(2, 0.0);
  RMat wrong_channels(10, 3);
  CHECK_THROWS_AS(
      spectral_layer_forward(p, wrong_channels, v, Activation::gelu, true),
      ShapeError);
  RMat wrong_rows(9, 2);
  CHECK_THROWS_AS(
      spectral_layer_forward(p, wrong_rows, v, Activation::gelu, true),
      ShapeError);
  SpectralLayerParams bad_r = p;
  bad_r.R = CMat(3, 4);
  RMat x(10, 2);
  CHECK_THROWS_AS(spectral_layer_forward(bad_r, x, v, Activation::gelu, true),
                  ShapeError);
}

TEST_CASE("parameter slot count matches the architecture") {
  ModelConfig cfg = small_config();
  Model m = init_model(cfg, 1);
  const std::size_t w = cfg.width, mt = cfg.modes.m_total();
  const std::size_t expect = 1 * w + w                      // lift
                             + 2 * (2 * mt * w * w + w * w + w)  // layers
                             + w * 1 + 1;                   // projection
  CHECK(param_slots(m.params).size() == expect);

  // grouped view flattens to the same addresses in the same order
  auto groups = param_group_slots(m.params);
  std::vector<double*> flat;
  for (auto& g : groups) flat.insert(flat.end(), g.begin(), g.end());
  CHECK(flat == param_slots(m.params));
  CHECK(groups.size() == 2 + 3 * cfg.n_layers + 2);
}

TEST_CASE("with_coords appends coordinate channels to the lift") {
  ModelConfig cfg = small_config();
  cfg.with_coords = true;
  CHECK(cfg.lift_in_channels(1) == 2);
  CHECK(cfg.lift_in_channels(3) == 4);
  Model m = init_model(cfg, 1);
  CHECK(m.params.lift.W.rows == 2);

  const PointSet points = gen_equispaced_1d(12);
  const CMat v = build_fourier_matrix(points, cfg.modes,
                                      cfg.normalization)
                     .entries;
  RMat data(12, 1);
  for (auto& x : data.a) x = 0.5;
  const RMat out = model_forward(m, data, points, v);
  CHECK(out.rows == 12);
  CHECK(out.cols == 1);
}

TEST_CASE("initialization is deterministic in the seed") {
  ModelConfig cfg = small_config();
  Model a = init_model(cfg, 1);
  Model b = init_model(cfg, 1);
  auto sa = param_slots(a.params), sb = param_slots(b.params);
  for (std::size_t i = 0; i < sa.size(); ++i) CHECK(*sa[i] == *sb[i]);
  cfg.seed = 4;
  Model c = init_model(cfg, 1);
  auto sc = param_slots(c.params);
  bool any_diff = false;
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (*sa[i] != *sc[i]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("zero loss gradient gives zero parameter gradients") {
  ModelConfig cfg = small_config();
  const PointSet points = gen_contracting_expanding_1d(12, 0.5, 1.15);
  Model m = init_model(cfg, 1);
  randomize(m.params, 11, 0.4);
  const CMat v =
      build_fourier_matrix(points, cfg.modes, cfg.normalization).entries;
  RMat data(12, 1);
  SplitMix64 rng(12);
  for (auto& x : data.a) x = rng.next_double() - 0.5;

  ModelTape tape;
  model_forward(m, data, points, v, &tape);
  RMat zero_grad(12, 1);
  ParamSet grads = zeros_like(m.params);
  model_backward(m, tape, v, zero_grad, grads);
  for (auto* g : param_slots(grads)) CHECK(*g == 0.0);
}

TEST_CASE("gradients are linear in the loss scaling") {
  ModelConfig cfg = small_config();
  const PointSet points = gen_contracting_expanding_1d(12, 0.5, 1.15);
  Model m = init_model(cfg, 1);
  randomize(m.params, 21, 0.4);
  const CMat v =
      build_fourier_matrix(points, cfg.modes, cfg.normalization).entries;
  RMat data(12, 1);
  SplitMix64 rng(22);
  for (auto& x : data.a) x = rng.next_double() - 0.5;

  ModelTape tape;
  model_forward(m, data, points, v, &tape);
  RMat g1(12, 1);
  for (auto& x : g1.a) x = rng.next_double() - 0.5;
  RMat g2 = g1;
  for (auto& x : g2.a) x *= -2.5;

  ParamSet grads1 = zeros_like(m.params);
  ParamSet grads2 = zeros_like(m.params);
  model_backward(m, tape, v, g1, grads1);
  model_backward(m, tape, v, g2, grads2);
  auto s1 = param_slots(grads1), s2 = param_slots(grads2);
  for (std::size_t i = 0; i < s1.size(); ++i)
    CHECK(*s2[i] == Catch::Approx(-2.5 * *s1[i]).margin(1e-12));
}

TEST_CASE("analytic gradients agree with central differences") {
  ModelConfig cfg = small_config();
  const PointSet points = gen_contracting_expanding_1d(16, 0.5, 1.1);
  Model m = init_model(cfg, 1);
  randomize(m.params, 17, 0.5);
  const Dataset ds =
      make_task_dataset(TaskKind::derivative, points, 2, 1, 0, 5);
  const GradCheckResult r = gradient_check(m, points, ds.train[0], 8, 1e-6);
  CHECK(r.n_probed >= 50);
  CHECK(r.max_rel_error < 1e-5);

  // relu path too (kinks are measure-zero; random params avoid them)
  ModelConfig rcfg = small_config();
  rcfg.activation = Activation::relu;
  Model mr = init_model(rcfg, 1);
  randomize(mr.params, 18, 0.5);
  const GradCheckResult rr = gradient_check(mr, points, ds.train[0], 6, 1e-6);
  CHECK(rr.max_rel_error < 1e-4);
}

TEST_CASE("loss values and gradients are consistent") {
  RMat p(3, 2), t(3, 2);
  SplitMix64 rng(31);
  for (auto& x : p.a) x = rng.next_double();
  for (auto& x : t.a) x = rng.next_double();

  // frozen hand values on a tiny case
  RMat hp(1, 2), ht(1, 2);
  hp(0, 0) = 1.0;
  hp(0, 1) = -2.0;
  ht(0, 0) = 0.5;
  ht(0, 1) = 0.0;
  CHECK(loss_eval(hp, ht, LossKind::l1) ==
        Catch::Approx((0.5 + 2.0) / 2.0).epsilon(1e-15));
  CHECK(loss_eval(hp, ht, LossKind::l2) ==
        Catch::Approx((0.25 + 4.0) / 2.0).epsilon(1e-15));

  // gradient consistency by finite differences
  for (const auto kind : {LossKind::l1, LossKind::l2}) {
    const RMat g = loss_grad(p, t, kind);
    for (std::size_t i = 0; i < p.size(); ++i) {
      RMat pp = p, pm = p;
      pp.a[i] += 1e-7;
      pm.a[i] -= 1e-7;
      const double fd =
          (loss_eval(pp, t, kind) - loss_eval(pm, t, kind)) / 2e-7;
      CHECK(g.a[i] == Catch::Approx(fd).margin(1e-7));
    }
  }
}

TEST_CASE("relative error helper") {
  RMat p(2, 1), t(2, 1);
  p(0, 0) = 1.0;
  p(1, 0) = 3.0;
  t(0, 0) = 1.0;
  t(1, 0) = 2.0;
  CHECK(relative_l1(p, t) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(relative_l1(t, t) == 0.0);

  RMat z(2, 1);
  static bool warned;
  warned = false;
  set_diagnostic_handler([](std::string_view) { warned = true; });
  CHECK_THROWS_AS(relative_l1(p, z), NumericError);
  set_diagnostic_handler(nullptr);
  CHECK(warned);
}

TEST_CASE("training is deterministic and reduces the loss") {
  ModelConfig cfg = small_config();
  const PointSet points = gen_contracting_expanding_1d(20, 0.5, 1.1);
  const Dataset data =
      make_task_dataset(TaskKind::identity, points, 2, 12, 4, 44);

  TrainResult r1 = train(cfg, data);
  TrainResult r2 = train(cfg, data);
  REQUIRE(r1.history.size() == cfg.epochs);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    CHECK(r1.history[e].train_loss == r2.history[e].train_loss);
    CHECK(r1.history[e].test_rel_l1 == r2.history[e].test_rel_l1);
  }
  auto s1 = param_slots(r1.model.params), s2 = param_slots(r2.model.params);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(*s1[i] == *s2[i]);

  CHECK(r1.history.back().train_loss < r1.history.front().train_loss);
}

TEST_CASE("training rejects exploding configurations with a diagnostic") {
  ModelConfig cfg = small_config();
  cfg.lr = 1e9;
  cfg.epochs = 30;
  const PointSet points = gen_contracting_expanding_1d(16, 0.5, 1.1);
  const Dataset data =
      make_task_dataset(TaskKind::derivative, points, 3, 8, 2, 45);
  static bool warned;
  warned = false;
  set_diagnostic_handler([](std::string_view) { warned = true; });
  CHECK_THROWS_AS(train(cfg, data), NumericError);
  set_diagnostic_handler(nullptr);
  CHECK(warned);
}

TEST_CASE("evaluation averages per-sample relative errors") {
  ModelConfig cfg = small_config();
  const PointSet points = gen_contracting_expanding_1d(14, 0.5, 1.1);
  const Dataset data =
      make_task_dataset(TaskKind::identity, points, 2, 2, 3, 46);
  Model m = init_model(cfg, 1);
  const CMat v =
      build_fourier_matrix(points, cfg.modes, cfg.normalization).entries;
  const double got = evaluate_relative_l1(m, points, v, data.test);
  double want = 0.0;
  for (const auto& s : data.test) {
    const RMat pred = model_forward(m, s.input, points, v);
    want += relative_l1(pred, s.target);
  }
  want /= static_cast<double>(data.test.size());
  CHECK(got == Catch::Approx(want).epsilon(1e-14));
}

TEST_CASE("checkpoints round trip bit for bit") {
  ModelConfig cfg = small_config();
  cfg.with_coords = true;
  cfg.loss = LossKind::l2;
  cfg.activation = Activation::relu;
  Model m = init_model(cfg, 1);
  randomize(m.params, 70, 0.3);

  const auto dir = std::filesystem::temp_directory_path() / "dse_op_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model.ckpt").string();
  write_checkpoint(path, m);
  Model back = read_checkpoint(path);

  CHECK(back.cfg.width == cfg.width);
  CHECK(back.cfg.n_layers == cfg.n_layers);
  CHECK(back.cfg.modes == cfg.modes);
  CHECK(back.cfg.with_coords == cfg.with_coords);
  CHECK(back.cfg.loss == LossKind::l2);
  CHECK(back.cfg.activation == Activation::relu);

  auto sa = param_slots(m.params), sb = param_slots(back.params);
  REQUIRE(sa.size() == sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) CHECK(*sa[i] == *sb[i]);

  // corrupted magic
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    REQUIRE(f != nullptr);
    std::fputc('X', f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_checkpoint(path), IoError);

  // truncation
  write_checkpoint(path, m);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
  CHECK_THROWS_AS(read_checkpoint(path), IoError);

  CHECK_THROWS_AS(read_checkpoint((dir / "missing.ckpt").string()), IoError);
}
