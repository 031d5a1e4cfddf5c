// Command-line surface: point/field generation, forward/adjoint transforms,
// the validation suite, benchmarks, and toy operator training.
//
// Exit codes: 0 success, 1 validation/runtime failure, 2 usage or
// configuration error, 3 shape/binding mismatch, 4 domain error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dse/dse.hpp"

namespace {

int g_exit_code = 0;

void print_and_store_echo(const std::string& echo,
                          const std::string& sidecar_path) {
  std::cout << echo;
  if (!sidecar_path.empty()) dse::write_text_file(sidecar_path, echo);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Expands `--config FILE` in place: reads a flat key=value file (UTF-8,
// `#` comments) and appends `--key=value` tokens for every key not already
// given on the command line, so explicit flags always win.  Unknown keys
// then surface as ordinary unexpected-argument errors during parsing.
void expand_config_args(std::vector<std::string>& tokens) {
  std::string path;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t == "--config") {
      if (i + 1 >= tokens.size())
        throw dse::ConfigError("--config requires a file path");
      path = tokens[i + 1];
      tokens.erase(tokens.begin() + i, tokens.begin() + i + 2);
    } else if (t.rfind("--config=", 0) == 0) {
      path = t.substr(9);
      tokens.erase(tokens.begin() + i);
    } else {
      continue;
    }
    for (const auto& rest : tokens)
      if (rest == "--config" || rest.rfind("--config=", 0) == 0)
        throw dse::ConfigError("--config may be given only once");
    break;
  }
  if (path.empty()) return;

  std::ifstream in(path);
  if (!in) throw dse::ConfigError("cannot open config file: " + path);

  std::set<std::string> cli_keys;
  for (const auto& t : tokens) {
    if (t.rfind("--", 0) != 0) continue;
    const auto eq = t.find('=');
    cli_keys.insert(eq == std::string::npos ? t.substr(2)
                                            : t.substr(2, eq - 2));
  }

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw dse::ConfigError(path + ":" + std::to_string(line_no) +
                             ": expected key=value");
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty())
      throw dse::ConfigError(path + ":" + std::to_string(line_no) +
                             ": empty key");
    if (key == "config")
      throw dse::ConfigError(path + ":" + std::to_string(line_no) +
                             ": config files cannot include other configs");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (!cli_keys.count(key)) tokens.push_back("--" + key + "=" + value);
  }
}

std::vector<std::size_t> parse_mode_list(const std::string& text) {
  std::vector<std::size_t> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto colon2 = text.find(':', colon + 1);
    const unsigned long lo = std::stoul(text.substr(0, colon));
    const unsigned long hi = std::stoul(
        text.substr(colon + 1, colon2 == std::string::npos
                                   ? std::string::npos
                                   : colon2 - colon - 1));
    const unsigned long step =
        colon2 == std::string::npos ? 1 : std::stoul(text.substr(colon2 + 1));
    if (step == 0 || hi < lo)
      throw dse::ConfigError("bad mode range '" + text + "'");
    for (unsigned long m = lo; m <= hi; m += step) out.push_back(m);
    return out;
  }
  std::string cur;
  for (const char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stoul(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (out.empty()) throw dse::ConfigError("empty mode list");
  return out;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::size_t n = 256;
  std::size_t n0 = 32, n1 = 32;
  std::size_t dim = 1;
  std::uint64_t seed = 1;
  double center = 0.5;
  double ratio = 1.3;
  double focus = 0.5;
  double sharpness = 2.0;
  std::string out;
  std::size_t field_max_freq = 8;
  std::size_t field_channels = 1;
  std::uint64_t field_seed = 2;
  std::string field_out;
};

void run_gen(const GenArgs& a) {
  std::string echo;
  echo += "# command: gen\n";
  echo += "kind=" + a.kind + "\n";
  echo += "n=" + std::to_string(a.n) + "\n";
  echo += "n0=" + std::to_string(a.n0) + "\n";
  echo += "n1=" + std::to_string(a.n1) + "\n";
  echo += "dim=" + std::to_string(a.dim) + "\n";
  echo += "seed=" + std::to_string(a.seed) + "\n";
  echo += "center=" + dse::format_g17(a.center) + "\n";
  echo += "ratio=" + dse::format_g17(a.ratio) + "\n";
  echo += "focus=" + dse::format_g17(a.focus) + "\n";
  echo += "sharpness=" + dse::format_g17(a.sharpness) + "\n";
  echo += "out=" + a.out + "\n";
  if (!a.field_out.empty()) {
    echo += "field-max-freq=" + std::to_string(a.field_max_freq) + "\n";
    echo += "field-channels=" + std::to_string(a.field_channels) + "\n";
    echo += "field-seed=" + std::to_string(a.field_seed) + "\n";
    echo += "field-out=" + a.field_out + "\n";
  }
  print_and_store_echo(echo, a.out + ".config.txt");

  dse::PointSet points;
  if (a.kind == "equispaced") {
    points = dse::gen_equispaced_1d(a.n);
  } else if (a.kind == "contracting_expanding") {
    points = dse::gen_contracting_expanding_1d(a.n, a.center, a.ratio);
  } else if (a.kind == "random_uniform") {
    points = dse::gen_random_cloud(a.n, a.dim, a.seed);
  } else if (a.kind == "lattice_tanh") {
    const dse::LatticeAxes axes =
        dse::gen_lattice_tanh_2d(a.n0, a.n1, a.focus, a.sharpness);
    points = dse::lattice_product_points(axes.axis0, axes.axis1);
  } else if (a.kind == "sphere_uniform") {
    points = dse::gen_sphere_uniform(a.n, a.seed);
  } else {
    throw dse::ConfigError("unknown distribution kind '" + a.kind + "'");
  }
  dse::write_points_csv(a.out, points);
  std::cout << "gen: wrote " << points.n_points() << " points (D="
            << points.dim() << ") to " << a.out << "\n";

  if (!a.field_out.empty()) {
    if (points.geometry != dse::Geometry::cartesian)
      throw dse::ConfigError(
          "field generation requires a cartesian distribution kind");
    const dse::BandLimitedField blf = dse::gen_random_band_limited_field(
        points, a.field_max_freq, a.field_channels, a.field_seed);
    dse::write_field_csv(a.field_out, blf.field.values);
    std::cout << "gen: wrote band-limited field (max_freq="
              << a.field_max_freq << ", channels=" << a.field_channels
              << ") to " << a.field_out << "\n";
  }
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

struct TransformArgs {
  std::string points_path;
  std::string field_path;
  std::string coeffs_path;
  std::string out;
  std::string direction = "forward";
  std::string basis = "fourier";
  std::size_t modes = 16;
  std::size_t l_max = 4;
  std::string freq_range = "nonneg";
  std::string normalization = "unitary";
};

void run_transform(const TransformArgs& a) {
  std::string echo;
  echo += "# command: transform\n";
  echo += "points=" + a.points_path + "\n";
  if (!a.field_path.empty()) echo += "field=" + a.field_path + "\n";
  if (!a.coeffs_path.empty()) echo += "coeffs=" + a.coeffs_path + "\n";
  echo += "out=" + a.out + "\n";
  echo += "direction=" + a.direction + "\n";
  echo += "basis=" + a.basis + "\n";
  echo += "modes=" + std::to_string(a.modes) + "\n";
  echo += "lmax=" + std::to_string(a.l_max) + "\n";
  echo += "freq-range=" + a.freq_range + "\n";
  echo += "normalization=" + a.normalization + "\n";
  print_and_store_echo(echo, a.out + ".config.txt");

  const dse::PointSet points = dse::read_points_csv(a.points_path);
  const dse::Normalization norm = dse::parse_normalization(a.normalization);
  const bool forward = a.direction == "forward";
  if (!forward && a.direction != "adjoint")
    throw dse::ConfigError("direction must be forward or adjoint");

  if (a.basis == "fourier") {
    const dse::ModeSpec spec = dse::ModeSpec::fourier(
        a.modes, points.dim(), dse::parse_freq_range(a.freq_range));
    if (forward) {
      if (a.field_path.empty())
        throw dse::ConfigError("forward transform requires --field");
      const dse::Field field =
          dse::bind_field(dse::read_field_csv(a.field_path), points);
      const dse::CoeffVector coeffs =
          dse::nudft_forward(points, spec, field, norm, false);
      dse::write_coeffs_csv(a.out, coeffs);
      std::cout << "transform: wrote " << coeffs.values.rows
                << " coefficient rows to " << a.out << "\n";
    } else {
      if (a.coeffs_path.empty())
        throw dse::ConfigError("adjoint transform requires --coeffs");
      const dse::CoeffVector coeffs =
          dse::read_coeffs_csv(a.coeffs_path, spec);
      const dse::SpectralMatrix v =
          dse::build_fourier_matrix(points, spec, norm);
      const dse::Field field = dse::nudft_adjoint(v, coeffs);
      dse::write_field_csv(a.out, field.values);
      std::cout << "transform: wrote " << field.values.rows
                << " field rows to " << a.out << "\n";
    }
  } else if (a.basis == "spherical") {
    if (forward) {
      if (a.field_path.empty())
        throw dse::ConfigError("forward transform requires --field");
      const dse::Field field =
          dse::bind_field(dse::read_field_csv(a.field_path), points);
      const dse::CoeffVector coeffs =
          dse::sh_forward(points, a.l_max, field);
      dse::write_coeffs_csv(a.out, coeffs);
      std::cout << "transform: wrote " << coeffs.values.rows
                << " coefficient rows to " << a.out << "\n";
    } else {
      if (a.coeffs_path.empty())
        throw dse::ConfigError("adjoint transform requires --coeffs");
      const dse::CoeffVector coeffs =
          dse::read_coeffs_csv(a.coeffs_path, dse::ModeSpec::spherical(a.l_max));
      const dse::SpectralMatrix v = dse::build_sh_matrix(points, a.l_max);
      const dse::Field field = dse::sh_adjoint(v, coeffs);
      dse::write_field_csv(a.out, field.values);
      std::cout << "transform: wrote " << field.values.rows
                << " field rows to " << a.out << "\n";
    }
  } else {
    throw dse::ConfigError("basis must be fourier or spherical");
  }
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

void run_validate(bool inject_error) {
  std::cout << "# command: validate\n";
  if (inject_error) std::cout << "# inject-error: on\n";

  const std::vector<dse::CheckResult> results =
      dse::run_validation(inject_error);
  std::size_t failures = 0;
  std::printf("%-24s %-6s %-12s %-10s\n", "check", "state", "max_err",
              "tolerance");
  for (const auto& r : results) {
    if (!r.pass) ++failures;
    std::printf("%-24s %-6s %-12.3e %-10.0e %s\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.max_err, r.tolerance,
                r.detail.c_str());
  }
  std::printf("%zu/%zu checks passed\n", results.size() - failures,
              results.size());
  if (failures > 0) g_exit_code = 1;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::size_t n = 4096;
  std::string modes = "8:32:8";
  std::string methods = "dse,fft";
  std::size_t reps = 9;
  unsigned threads = 1;
  bool fp32 = false;
  std::uint64_t seed = 42;
  std::string out;
  std::size_t lattice_n0 = 0;  // nonzero: additionally time the lattice path
  std::size_t lattice_n1 = 0;
  double focus = 0.5;
  double sharpness = 2.0;
};

void run_bench(const BenchArgs& a) {
  std::string echo;
  echo += "# command: bench\n";
  echo += "n=" + std::to_string(a.n) + "\n";
  echo += "modes=" + a.modes + "\n";
  echo += "methods=" + a.methods + "\n";
  echo += "reps=" + std::to_string(a.reps) + "\n";
  echo += "threads=" + std::to_string(a.threads) + "\n";
  echo += "fp32=" + std::to_string(a.fp32 ? 1 : 0) + "\n";
  echo += "seed=" + std::to_string(a.seed) + "\n";
  echo += "out=" + a.out + "\n";
  if (a.lattice_n0 != 0) {
    echo += "lattice-n0=" + std::to_string(a.lattice_n0) + "\n";
    echo += "lattice-n1=" + std::to_string(a.lattice_n1) + "\n";
    echo += "focus=" + dse::format_g17(a.focus) + "\n";
    echo += "sharpness=" + dse::format_g17(a.sharpness) + "\n";
  }
  print_and_store_echo(echo, a.out + ".config.txt");

  const std::vector<std::size_t> m_list = parse_mode_list(a.modes);
  std::vector<dse::BenchMethod> methods;
  {
    std::string cur;
    for (const char c : a.methods + ",") {
      if (c == ',') {
        if (!cur.empty()) methods.push_back(dse::parse_bench_method(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
  }

  dse::BenchOptions opts;
  opts.reps = a.reps;
  opts.threads = a.threads;
  opts.fp32 = a.fp32;
  opts.seed = a.seed;

  std::vector<dse::BenchMethod> plain;
  bool want_lattice = false;
  for (const auto m : methods) {
    if (m == dse::BenchMethod::lattice_dse)
      want_lattice = true;
    else
      plain.push_back(m);
  }

  std::vector<dse::BenchRecord> records;
  if (!plain.empty())
    records = dse::run_mode_sweep(a.n, m_list, plain, "", opts);
  if (want_lattice) {
    if (a.lattice_n0 == 0 || a.lattice_n1 == 0)
      throw dse::ConfigError(
          "lattice_dse timing requires --lattice-n0 and --lattice-n1");
    const dse::LatticeAxes axes = dse::gen_lattice_tanh_2d(
        a.lattice_n0, a.lattice_n1, a.focus, a.sharpness);
    for (const auto m : m_list)
      records.push_back(dse::time_lattice(axes.axis0, axes.axis1, m, opts));
  }
  dse::append_bench_csv(a.out, records);

  std::cout << dse::kBenchCsvHeader << "\n";
  for (const auto& r : records)
    std::cout << r.method << ',' << r.n_points << ',' << r.m_total << ','
              << r.dim << ',' << dse::format_g17(r.apply_ns_median) << ','
              << dse::format_g17(r.build_ns_median) << ','
              << dse::format_g17(r.flops_model) << "  [" << r.machine_tag
              << "]\n";
  std::cout << "bench: appended " << records.size() << " rows to " << a.out
            << "\n";
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string task;
  std::size_t n = 128;
  std::string cloud = "contracting_expanding";
  double center = 0.5;
  double ratio = 1.03;
  std::size_t modes = 17;
  std::string freq_range = "symmetric";
  std::string normalization = "unitary";
  std::size_t max_freq = 8;
  std::size_t width = 32;
  std::size_t layers = 2;
  std::size_t epochs = 200;
  double lr = 0.02;
  double momentum = 0.9;
  bool no_cosine = false;
  bool with_coords = false;
  std::size_t batch = 8;
  std::size_t train_samples = 160;
  std::size_t test_samples = 40;
  std::string activation = "gelu";
  std::string loss = "l1";
  std::uint64_t seed = 1;
  std::string out;
};

void run_train(const TrainArgs& a) {
  std::filesystem::create_directories(a.out);
  std::string echo;
  echo += "# command: train\n";
  echo += "task=" + a.task + "\n";
  echo += "n=" + std::to_string(a.n) + "\n";
  echo += "cloud=" + a.cloud + "\n";
  echo += "center=" + dse::format_g17(a.center) + "\n";
  echo += "ratio=" + dse::format_g17(a.ratio) + "\n";
  echo += "modes=" + std::to_string(a.modes) + "\n";
  echo += "freq-range=" + a.freq_range + "\n";
  echo += "normalization=" + a.normalization + "\n";
  echo += "max-freq=" + std::to_string(a.max_freq) + "\n";
  echo += "width=" + std::to_string(a.width) + "\n";
  echo += "layers=" + std::to_string(a.layers) + "\n";
  echo += "epochs=" + std::to_string(a.epochs) + "\n";
  echo += "lr=" + dse::format_g17(a.lr) + "\n";
  echo += "momentum=" + dse::format_g17(a.momentum) + "\n";
  echo += "no-cosine=" + std::to_string(a.no_cosine ? 1 : 0) + "\n";
  echo += "with-coords=" + std::to_string(a.with_coords ? 1 : 0) + "\n";
  echo += "batch=" + std::to_string(a.batch) + "\n";
  echo += "train-samples=" + std::to_string(a.train_samples) + "\n";
  echo += "test-samples=" + std::to_string(a.test_samples) + "\n";
  echo += "activation=" + a.activation + "\n";
  echo += "loss=" + a.loss + "\n";
  echo += "seed=" + std::to_string(a.seed) + "\n";
  echo += "out=" + a.out + "\n";
  print_and_store_echo(echo, a.out + "/config.txt");

  dse::PointSet points;
  if (a.cloud == "contracting_expanding")
    points = dse::gen_contracting_expanding_1d(a.n, a.center, a.ratio);
  else if (a.cloud == "equispaced")
    points = dse::gen_equispaced_1d(a.n);
  else if (a.cloud == "random_uniform")
    points = dse::gen_random_cloud(a.n, 1, a.seed + 17);
  else
    throw dse::ConfigError("unsupported training cloud '" + a.cloud + "'");

  dse::ModelConfig cfg;
  cfg.width = a.width;
  cfg.n_layers = a.layers;
  cfg.modes = dse::ModeSpec::fourier(a.modes, 1,
                                     dse::parse_freq_range(a.freq_range));
  cfg.normalization = dse::parse_normalization(a.normalization);
  cfg.activation = dse::parse_activation(a.activation);
  cfg.loss = dse::parse_loss(a.loss);
  cfg.with_coords = a.with_coords;
  cfg.lr = a.lr;
  cfg.momentum = a.momentum;
  cfg.cosine_decay = !a.no_cosine;
  cfg.epochs = a.epochs;
  cfg.batch = a.batch;
  cfg.seed = a.seed;

  const dse::Dataset dataset =
      dse::make_task_dataset(dse::parse_task(a.task), points, a.max_freq,
                             a.train_samples, a.test_samples, a.seed + 1000);

  const dse::TrainResult result = dse::train(cfg, dataset);
  dse::write_checkpoint(a.out + "/model.ckpt", result.model);
  dse::write_history_csv(a.out + "/history.csv", result.history);
  dse::write_points_csv(a.out + "/points.csv", points);

  for (std::size_t e = 0; e < result.history.size();
       e += std::max<std::size_t>(1, result.history.size() / 10)) {
    const auto& row = result.history[e];
    std::printf("epoch %4zu  train_loss %.6f  test_rel_l1 %.6f\n", row.epoch,
                row.train_loss, row.test_rel_l1);
  }
  const double final_err = result.history.back().test_rel_l1;
  std::printf("final_test_rel_l1=%.6f\n", final_err);
  std::cout << "train: wrote checkpoint and history to " << a.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dense truncated spectral transforms on arbitrary point sets"};
  app.require_subcommand(1);
  std::string config_sink;  // --config is consumed before parsing; this
                            // binding exists so it appears in --help

  // gen
  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate point sets and fields");
  gen->add_option("--kind", gen_args.kind,
                  "equispaced|contracting_expanding|random_uniform|"
                  "lattice_tanh|sphere_uniform")
      ->required();
  gen->add_option("--n", gen_args.n, "number of points");
  gen->add_option("--n0", gen_args.n0, "lattice axis-0 size");
  gen->add_option("--n1", gen_args.n1, "lattice axis-1 size");
  gen->add_option("--dim", gen_args.dim, "dimension (random_uniform)");
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--center", gen_args.center, "contraction center in [0,1]");
  gen->add_option("--ratio", gen_args.ratio, "geometric gap growth ratio > 1");
  gen->add_option("--focus", gen_args.focus, "lattice density focus in [0,1]");
  gen->add_option("--sharpness", gen_args.sharpness,
                  "lattice density sharpness >= 0");
  gen->add_option("--out", gen_args.out, "points CSV path")->required();
  gen->add_option("--field-max-freq", gen_args.field_max_freq,
                  "band limit of the generated field");
  gen->add_option("--field-channels", gen_args.field_channels,
                  "channels of the generated field");
  gen->add_option("--field-seed", gen_args.field_seed, "field seed");
  gen->add_option("--field-out", gen_args.field_out,
                  "also write a band-limited field CSV here");
  gen->add_option("--config", config_sink,
                  "flat key=value config file (# comments); explicit flags win");
  gen->callback([&]() { run_gen(gen_args); });

  // transform
  TransformArgs tr_args;
  CLI::App* tr =
      app.add_subcommand("transform", "forward or adjoint transform of a field");
  tr->add_option("--points", tr_args.points_path, "points CSV")->required();
  tr->add_option("--field", tr_args.field_path, "field CSV (forward input)");
  tr->add_option("--coeffs", tr_args.coeffs_path,
                 "coefficients CSV (adjoint input)");
  tr->add_option("--out", tr_args.out, "output CSV path")->required();
  tr->add_option("--direction", tr_args.direction, "forward|adjoint");
  tr->add_option("--basis", tr_args.basis, "fourier|spherical");
  tr->add_option("--modes", tr_args.modes, "modes per dimension (fourier)");
  tr->add_option("--lmax", tr_args.l_max, "band limit (spherical)");
  tr->add_option("--freq-range", tr_args.freq_range, "nonneg|symmetric");
  tr->add_option("--normalization", tr_args.normalization,
                 "paper|unitary|none");
  tr->add_option("--config", config_sink,
                  "flat key=value config file (# comments); explicit flags win");
  tr->callback([&]() { run_transform(tr_args); });

  // validate
  bool inject_error = false;
  CLI::App* val =
      app.add_subcommand("validate", "run the end-to-end self-check suite");
  val->add_flag("--inject-error", inject_error)->group("");
  val->callback([&]() { run_validate(inject_error); });

  // bench
  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "transform timing sweeps");
  bench->add_option("--n", bench_args.n, "number of points");
  bench->add_option("--modes", bench_args.modes,
                    "mode list: lo:hi:step or comma list");
  bench->add_option("--methods", bench_args.methods,
                    "comma list of dse,fft,dft,lattice");
  bench->add_option("--reps", bench_args.reps, "repetitions (>= 5)");
  bench->add_option("--threads", bench_args.threads,
                    "worker threads for the dense apply");
  bench->add_flag("--fp32", bench_args.fp32, "time the 32-bit kernel");
  bench->add_option("--seed", bench_args.seed, "signal seed");
  bench->add_option("--out", bench_args.out, "CSV output path (appended)")
      ->required();
  bench->add_option("--lattice-n0", bench_args.lattice_n0,
                    "lattice axis-0 size (lattice method)");
  bench->add_option("--lattice-n1", bench_args.lattice_n1,
                    "lattice axis-1 size (lattice method)");
  bench->add_option("--focus", bench_args.focus, "lattice density focus");
  bench->add_option("--sharpness", bench_args.sharpness,
                    "lattice density sharpness");
  bench->add_option("--config", config_sink,
                  "flat key=value config file (# comments); explicit flags win");
  bench->callback([&]() { run_bench(bench_args); });

  // train
  TrainArgs train_args;
  CLI::App* train =
      app.add_subcommand("train", "train the toy spectral operator");
  train->add_option("--task", train_args.task, "identity|derivative")
      ->required();
  train->add_option("--n", train_args.n, "training cloud size");
  train->add_option("--cloud", train_args.cloud,
                    "contracting_expanding|equispaced|random_uniform");
  train->add_option("--center", train_args.center, "cloud contraction center");
  train->add_option("--ratio", train_args.ratio, "cloud gap growth ratio");
  train->add_option("--modes", train_args.modes, "retained modes");
  train->add_option("--freq-range", train_args.freq_range,
                    "nonneg|symmetric");
  train->add_option("--normalization", train_args.normalization,
                    "paper|unitary|none");
  train->add_option("--max-freq", train_args.max_freq,
                    "band limit of the data");
  train->add_option("--width", train_args.width, "hidden channels");
  train->add_option("--layers", train_args.layers, "spectral layers");
  train->add_option("--epochs", train_args.epochs, "training epochs");
  train->add_option("--lr", train_args.lr, "learning rate");
  train->add_option("--momentum", train_args.momentum, "momentum coefficient");
  train->add_flag("--no-cosine", train_args.no_cosine,
                  "disable cosine learning-rate decay");
  train->add_flag("--with-coords", train_args.with_coords,
                  "append point coordinates as input channels");
  train->add_option("--batch", train_args.batch, "batch size");
  train->add_option("--train-samples", train_args.train_samples,
                    "training sample count");
  train->add_option("--test-samples", train_args.test_samples,
                    "test sample count");
  train->add_option("--activation", train_args.activation, "gelu|relu");
  train->add_option("--loss", train_args.loss, "l1|l2");
  train->add_option("--seed", train_args.seed, "training seed");
  train->add_option("--out", train_args.out, "output directory")->required();
  train->add_option("--config", config_sink,
                  "flat key=value config file (# comments); explicit flags win");
  train->callback([&]() { run_train(train_args); });

  try {
    std::vector<std::string> tokens(argv + 1, argv + argc);
    expand_config_args(tokens);
    std::vector<char*> cargs;
    cargs.push_back(argv[0]);
    for (auto& t : tokens) cargs.push_back(t.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
    return g_exit_code;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const dse::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dse::BindingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dse::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dse::IndexError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dse::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const dse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
