// Demo: train a small spectral-convolution network to apply d/dx to
// band-limited fields sampled on a nonuniform cloud, then print the
// loss trajectory and a few predicted values.

#include <cstdio>

#include "dse/dse.hpp"

int main() {
  using namespace dse;

  const PointSet points = gen_contracting_expanding_1d(96, 0.5, 1.04);

  ModelConfig cfg;
  cfg.width = 16;
  cfg.n_layers = 2;
  cfg.modes = ModeSpec::fourier(13, 1, FrequencyRange::symmetric);
  cfg.epochs = 40;
  cfg.lr = 0.05;
  cfg.batch = 8;
  cfg.seed = 3;

  const Dataset data =
      make_task_dataset(TaskKind::derivative, points, 6, 64, 16, 11);

  std::printf("training: %zu samples, testing: %zu samples, %zu epochs\n",
              data.train.size(), data.test.size(), cfg.epochs);
  const TrainResult result = train(cfg, data);
  for (std::size_t e = 0; e < result.history.size(); e += 8) {
    const auto& row = result.history[e];
    std::printf("epoch %3zu  train_loss %.5f  test_rel_l1 %.5f\n", row.epoch,
                row.train_loss, row.test_rel_l1);
  }
  std::printf("final test relative L1: %.5f\n",
              result.history.back().test_rel_l1);

  // Show a few point-wise predictions against the analytic derivative.
  const SpectralMatrix v = build_fourier_matrix(
      points, cfg.modes, cfg.normalization);
  const Sample& s = data.test.front();
  const RMat pred = model_forward(result.model, s.input, points, v.entries);
  std::printf("\n%-10s %-14s %-14s\n", "x", "predicted", "target");
  for (std::size_t i = 0; i < points.n_points(); i += 12)
    std::printf("%-10.5f %-14.6f %-14.6f\n", points.coords(i, 0), pred(i, 0),
                s.target(i, 0));
  return 0;
}
