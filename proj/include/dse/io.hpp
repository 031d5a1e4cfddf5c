#pragma once

// File formats: CSV for points, fields, coefficients, and training history
// (header row mandatory, 17-significant-digit floats, UTF-8, LF), plus the
// single binary artifact, the model checkpoint.

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dse/common.hpp"
#include "dse/core.hpp"
#include "dse/operator.hpp"
#include "dse/spherical.hpp"

namespace dse {

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Enum names used across CSV/config/CLI surfaces.
// ---------------------------------------------------------------------------

inline const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::paper: return "paper";
    case Normalization::unitary: return "unitary";
    case Normalization::none: return "none";
  }
  throw ConfigError("unknown normalization");
}

inline Normalization parse_normalization(const std::string& s) {
  if (s == "paper") return Normalization::paper;
  if (s == "unitary") return Normalization::unitary;
  if (s == "none") return Normalization::none;
  throw ConfigError("unknown normalization '" + s + "'");
}

inline const char* to_string(FrequencyRange r) {
  return r == FrequencyRange::nonnegative ? "nonneg" : "symmetric";
}

inline FrequencyRange parse_freq_range(const std::string& s) {
  if (s == "nonneg" || s == "nonnegative") return FrequencyRange::nonnegative;
  if (s == "symmetric") return FrequencyRange::symmetric;
  throw ConfigError("unknown frequency range '" + s + "'");
}

inline const char* to_string(Activation a) {
  return a == Activation::gelu ? "gelu" : "relu";
}

inline Activation parse_activation(const std::string& s) {
  if (s == "gelu") return Activation::gelu;
  if (s == "relu") return Activation::relu;
  throw ConfigError("unknown activation '" + s + "'");
}

inline const char* to_string(LossKind k) {
  return k == LossKind::l1 ? "l1" : "l2";
}

inline LossKind parse_loss(const std::string& s) {
  if (s == "l1") return LossKind::l1;
  if (s == "l2") return LossKind::l2;
  throw ConfigError("unknown loss '" + s + "'");
}

inline const char* to_string(TaskKind t) {
  return t == TaskKind::identity ? "identity" : "derivative";
}

inline TaskKind parse_task(const std::string& s) {
  if (s == "identity") return TaskKind::identity;
  if (s == "derivative") return TaskKind::derivative;
  throw ConfigError("unknown task '" + s + "'");
}

// ---------------------------------------------------------------------------
// CSV primitives.
// ---------------------------------------------------------------------------

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& token, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size())
      throw IoError("malformed number '" + token + "' in " + path);
    return v;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception&) {
    throw IoError("malformed number '" + token + "' in " + path);
  }
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (lines.empty()) throw IoError("empty file: " + path);
  return lines;
}
}  // namespace detail

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw IoError("failed writing file: " + path);
}

// points.csv: header `x0[,x1,...]` (cartesian) or `theta,phi` (spherical).
inline void write_points_csv(const std::string& path, const PointSet& points) {
  std::ostringstream out;
  if (points.geometry == Geometry::spherical) {
    out << "theta,phi\n";
  } else {
    for (std::size_t d = 0; d < points.dim(); ++d)
      out << (d ? ",x" : "x") << d;
    out << "\n";
  }
  for (std::size_t i = 0; i < points.n_points(); ++i) {
    for (std::size_t d = 0; d < points.dim(); ++d) {
      if (d) out << ',';
      out << format_g17(points.coords(i, d));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

inline PointSet read_points_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  const auto header = detail::split_csv_line(lines[0]);
  PointSet ps;
  if (header.size() == 2 && header[0] == "theta" && header[1] == "phi") {
    ps.geometry = Geometry::spherical;
  } else {
    for (std::size_t d = 0; d < header.size(); ++d) {
      if (header[d] != "x" + std::to_string(d))
        throw IoError("unexpected points header column '" + header[d] +
                      "' in " + path);
    }
  }
  const std::size_t dim = header.size();
  const std::size_t n = lines.size() - 1;
  if (n == 0) throw IoError("points file has no data rows: " + path);
  ps.coords = RMat(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto tokens = detail::split_csv_line(lines[i + 1]);
    if (tokens.size() != dim)
      throw IoError("row " + std::to_string(i + 2) + " of " + path + " has " +
                    std::to_string(tokens.size()) + " columns, expected " +
                    std::to_string(dim));
    for (std::size_t d = 0; d < dim; ++d)
      ps.coords(i, d) = detail::parse_double(tokens[d], path);
  }
  return ps;
}

// field.csv: header `re0,im0[,re1,im1,...]`, one row per point.
inline void write_field_csv(const std::string& path, const CMat& values) {
  std::ostringstream out;
  for (std::size_t c = 0; c < values.cols; ++c)
    out << (c ? ",re" : "re") << c << ",im" << c;
  out << '\n';
  for (std::size_t i = 0; i < values.rows; ++i) {
    for (std::size_t c = 0; c < values.cols; ++c) {
      if (c) out << ',';
      out << format_g17(values(i, c).real()) << ','
          << format_g17(values(i, c).imag());
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

inline CMat read_field_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  const auto header = detail::split_csv_line(lines[0]);
  if (header.size() % 2 != 0 || header.empty())
    throw IoError("field header must list re/im column pairs: " + path);
  const std::size_t channels = header.size() / 2;
  for (std::size_t c = 0; c < channels; ++c) {
    if (header[2 * c] != "re" + std::to_string(c) ||
        header[2 * c + 1] != "im" + std::to_string(c))
      throw IoError("unexpected field header in " + path);
  }
  const std::size_t n = lines.size() - 1;
  if (n == 0) throw IoError("field file has no data rows: " + path);
  CMat values(n, channels);
  for (std::size_t i = 0; i < n; ++i) {
    const auto tokens = detail::split_csv_line(lines[i + 1]);
    if (tokens.size() != header.size())
      throw IoError("row " + std::to_string(i + 2) + " of " + path +
                    " has wrong column count");
    for (std::size_t c = 0; c < channels; ++c)
      values(i, c) = Complex(detail::parse_double(tokens[2 * c], path),
                             detail::parse_double(tokens[2 * c + 1], path));
  }
  return values;
}

inline Field bind_field(CMat values, const PointSet& points) {
  if (values.rows != points.n_points())
    throw ShapeError("field has " + std::to_string(values.rows) +
                     " rows but point set has " +
                     std::to_string(points.n_points()) + " points");
  Field f;
  f.values = std::move(values);
  f.point_fingerprint = points.fingerprint();
  return f;
}

// coeffs.csv: `flat_index,f0[,f1,...]` (fourier frequencies per dimension) or
// `flat_index,l,m` (spherical), then re/im pairs per channel.
inline void write_coeffs_csv(const std::string& path, const CoeffVector& coeffs) {
  std::ostringstream out;
  const ModeSpec& spec = coeffs.mode_spec;
  out << "flat_index";
  if (spec.kind == BasisKind::fourier) {
    for (std::size_t d = 0; d < spec.dim; ++d) out << ",f" << d;
  } else {
    out << ",l,m";
  }
  for (std::size_t c = 0; c < coeffs.values.cols; ++c)
    out << ",re" << c << ",im" << c;
  out << '\n';
  for (std::size_t j = 0; j < coeffs.values.rows; ++j) {
    out << j;
    if (spec.kind == BasisKind::fourier) {
      const auto multi = unflatten_mode_index(j, spec.modes_per_dim, spec.dim);
      for (std::size_t d = 0; d < spec.dim; ++d)
        out << ','
            << frequency_for_index(multi[d], spec.modes_per_dim,
                                   spec.freq_range);
    } else {
      const ShIndex idx = sh_index_from_flat(j);
      out << ',' << idx.l << ',' << idx.m_order;
    }
    for (std::size_t c = 0; c < coeffs.values.cols; ++c)
      out << ',' << format_g17(coeffs.values(j, c).real()) << ','
          << format_g17(coeffs.values(j, c).imag());
    out << '\n';
  }
  write_text_file(path, out.str());
}

inline CoeffVector read_coeffs_csv(const std::string& path,
                                   const ModeSpec& spec) {
  const auto lines = detail::read_lines(path);
  const auto header = detail::split_csv_line(lines[0]);
  const std::size_t index_cols =
      1 + (spec.kind == BasisKind::fourier ? spec.dim : 2);
  if (header.size() <= index_cols || (header.size() - index_cols) % 2 != 0)
    throw IoError("unexpected coefficient header in " + path);
  const std::size_t channels = (header.size() - index_cols) / 2;
  const std::size_t rows = lines.size() - 1;
  if (rows != spec.m_total())
    throw ShapeError("coefficient file has " + std::to_string(rows) +
                     " rows but the mode spec expects " +
                     std::to_string(spec.m_total()));
  CoeffVector out;
  out.mode_spec = spec;
  out.values = CMat(rows, channels);
  for (std::size_t j = 0; j < rows; ++j) {
    const auto tokens = detail::split_csv_line(lines[j + 1]);
    if (tokens.size() != header.size())
      throw IoError("row " + std::to_string(j + 2) + " of " + path +
                    " has wrong column count");
    for (std::size_t c = 0; c < channels; ++c)
      out.values(j, c) = Complex(
          detail::parse_double(tokens[index_cols + 2 * c], path),
          detail::parse_double(tokens[index_cols + 2 * c + 1], path));
  }
  return out;
}

inline void write_history_csv(const std::string& path,
                              const std::vector<HistoryRow>& history) {
  std::ostringstream out;
  out << "epoch,train_loss,test_rel_l1\n";
  for (const auto& row : history)
    out << row.epoch << ',' << format_g17(row.train_loss) << ','
        << format_g17(row.test_rel_l1) << '\n';
  write_text_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Model config echo (key=value lines) and its parser.
// ---------------------------------------------------------------------------

inline std::string serialize_model_config(const ModelConfig& cfg) {
  std::ostringstream out;
  out << "in_channels=" << cfg.in_channels << '\n'
      << "out_channels=" << cfg.out_channels << '\n'
      << "width=" << cfg.width << '\n'
      << "layers=" << cfg.n_layers << '\n'
      << "modes=" << cfg.modes.modes_per_dim << '\n'
      << "dim=" << cfg.modes.dim << '\n'
      << "freq_range=" << to_string(cfg.modes.freq_range) << '\n'
      << "normalization=" << to_string(cfg.normalization) << '\n'
      << "activation=" << to_string(cfg.activation) << '\n'
      << "loss=" << to_string(cfg.loss) << '\n'
      << "with_coords=" << (cfg.with_coords ? 1 : 0) << '\n'
      << "lr=" << format_g17(cfg.lr) << '\n'
      << "momentum=" << format_g17(cfg.momentum) << '\n'
      << "cosine_decay=" << (cfg.cosine_decay ? 1 : 0) << '\n'
      << "epochs=" << cfg.epochs << '\n'
      << "batch=" << cfg.batch << '\n'
      << "seed=" << cfg.seed << '\n';
  return out.str();
}

inline ModelConfig parse_model_config(const std::string& text) {
  ModelConfig cfg;
  std::size_t modes = cfg.modes.modes_per_dim;
  std::size_t dim = cfg.modes.dim;
  FrequencyRange range = cfg.modes.freq_range;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("malformed config line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "in_channels") cfg.in_channels = std::stoul(value);
    else if (key == "out_channels") cfg.out_channels = std::stoul(value);
    else if (key == "width") cfg.width = std::stoul(value);
    else if (key == "layers") cfg.n_layers = std::stoul(value);
    else if (key == "modes") modes = std::stoul(value);
    else if (key == "dim") dim = std::stoul(value);
    else if (key == "freq_range") range = parse_freq_range(value);
    else if (key == "normalization") cfg.normalization = parse_normalization(value);
    else if (key == "activation") cfg.activation = parse_activation(value);
    else if (key == "loss") cfg.loss = parse_loss(value);
    else if (key == "with_coords") cfg.with_coords = value != "0";
    else if (key == "lr") cfg.lr = std::stod(value);
    else if (key == "momentum") cfg.momentum = std::stod(value);
    else if (key == "cosine_decay") cfg.cosine_decay = value != "0";
    else if (key == "epochs") cfg.epochs = std::stoul(value);
    else if (key == "batch") cfg.batch = std::stoul(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else throw IoError("unknown config key: " + key);
  }
  cfg.modes = ModeSpec::fourier(modes, dim, range);
  return cfg;
}

// ---------------------------------------------------------------------------
// Checkpoint: the one binary artifact.
//
//   bytes 0-7   magic "DSECKPT1"
//   u32         format version (1)
//   u64         config echo length, then that many bytes (key=value lines)
//   u32         tensor count
//   per tensor: u32 name length, name bytes,
//               u8 dtype (0 = float64, 1 = complex128 interleaved re,im),
//               u32 rank, u64 dims[rank],
//               payload (little-endian doubles)
// ---------------------------------------------------------------------------

namespace detail {
inline void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline std::uint32_t get_u32(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw IoError("truncated checkpoint: " + path);
  return v;
}
inline std::uint64_t get_u64(std::istream& in, const std::string& path) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw IoError("truncated checkpoint: " + path);
  return v;
}

inline void put_tensor(std::ostream& out, const std::string& name,
                       std::uint8_t dtype,
                       const std::vector<std::uint64_t>& dims,
                       const double* payload, std::size_t n_doubles) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  out.put(static_cast<char>(dtype));
  put_u32(out, static_cast<std::uint32_t>(dims.size()));
  for (const auto d : dims) put_u64(out, d);
  out.write(reinterpret_cast<const char*>(payload),
            static_cast<std::streamsize>(n_doubles * sizeof(double)));
}

struct TensorBlob {
  std::string name;
  std::uint8_t dtype = 0;
  std::vector<std::uint64_t> dims;
  std::vector<double> payload;
};

inline TensorBlob get_tensor(std::istream& in, const std::string& path) {
  TensorBlob t;
  const std::uint32_t name_len = get_u32(in, path);
  t.name.resize(name_len);
  if (!in.read(t.name.data(), name_len))
    throw IoError("truncated checkpoint: " + path);
  int dtype = in.get();
  if (dtype < 0) throw IoError("truncated checkpoint: " + path);
  t.dtype = static_cast<std::uint8_t>(dtype);
  const std::uint32_t rank = get_u32(in, path);
  t.dims.resize(rank);
  std::uint64_t total = 1;
  for (auto& d : t.dims) {
    d = get_u64(in, path);
    total *= d;
  }
  if (t.dtype == 1) total *= 2;
  t.payload.resize(total);
  if (!in.read(reinterpret_cast<char*>(t.payload.data()),
               static_cast<std::streamsize>(total * sizeof(double))))
    throw IoError("truncated checkpoint: " + path);
  return t;
}
}  // namespace detail

inline constexpr char kCheckpointMagic[9] = "DSECKPT1";

inline void write_checkpoint(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out.write(kCheckpointMagic, 8);
  detail::put_u32(out, 1);
  const std::string cfg = serialize_model_config(model.cfg);
  detail::put_u64(out, cfg.size());
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

  const ParamSet& p = model.params;
  const std::uint32_t tensor_count =
      static_cast<std::uint32_t>(4 + 3 * p.layers.size());
  detail::put_u32(out, tensor_count);

  const auto put_rmat = [&](const std::string& name, const RMat& m) {
    detail::put_tensor(out, name, 0, {m.rows, m.cols}, m.data(), m.size());
  };
  const auto put_rvec = [&](const std::string& name,
                            const std::vector<double>& v) {
    detail::put_tensor(out, name, 0, {v.size()}, v.data(), v.size());
  };
  put_rmat("lift.W", p.lift.W);
  put_rvec("lift.b", p.lift.b);
  for (std::size_t li = 0; li < p.layers.size(); ++li) {
    const auto& layer = p.layers[li];
    const std::string prefix = "layer" + std::to_string(li);
    detail::put_tensor(
        out, prefix + ".R", 1, {layer.R.rows, layer.c_in, layer.c_out},
        reinterpret_cast<const double*>(layer.R.data()), 2 * layer.R.size());
    put_rmat(prefix + ".W", layer.W);
    put_rvec(prefix + ".b", layer.b);
  }
  put_rmat("project.W", p.project.W);
  put_rvec("project.b", p.project.b);
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

inline Model read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw IoError("not a checkpoint file (bad magic): " + path);
  const std::uint32_t version = detail::get_u32(in, path);
  if (version != 1)
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  const std::uint64_t cfg_len = detail::get_u64(in, path);
  std::string cfg_text(cfg_len, '\0');
  if (!in.read(cfg_text.data(), static_cast<std::streamsize>(cfg_len)))
    throw IoError("truncated checkpoint: " + path);

  Model model;
  model.cfg = parse_model_config(cfg_text);
  const std::uint32_t tensor_count = detail::get_u32(in, path);

  const auto expect_dims = [&](const detail::TensorBlob& t, std::size_t rank) {
    if (t.dims.size() != rank)
      throw IoError("tensor " + t.name + " has unexpected rank in " + path);
  };

  model.params.layers.clear();
  for (std::uint32_t i = 0; i < tensor_count; ++i) {
    detail::TensorBlob t = detail::get_tensor(in, path);
    const auto as_rmat = [&]() {
      expect_dims(t, 2);
      RMat m(t.dims[0], t.dims[1]);
      std::memcpy(m.data(), t.payload.data(),
                  t.payload.size() * sizeof(double));
      return m;
    };
    const auto as_rvec = [&]() {
      expect_dims(t, 1);
      return std::vector<double>(t.payload.begin(), t.payload.end());
    };
    if (t.name == "lift.W") model.params.lift.W = as_rmat();
    else if (t.name == "lift.b") model.params.lift.b = as_rvec();
    else if (t.name == "project.W") model.params.project.W = as_rmat();
    else if (t.name == "project.b") model.params.project.b = as_rvec();
    else if (t.name.rfind("layer", 0) == 0) {
      const auto dot = t.name.find('.');
      if (dot == std::string::npos)
        throw IoError("unexpected tensor name " + t.name + " in " + path);
      const std::size_t li = std::stoul(t.name.substr(5, dot - 5));
      if (model.params.layers.size() <= li)
        model.params.layers.resize(li + 1);
      auto& layer = model.params.layers[li];
      const std::string part = t.name.substr(dot + 1);
      if (part == "R") {
        expect_dims(t, 3);
        layer.R = CMat(t.dims[0], t.dims[1] * t.dims[2]);
        layer.c_in = t.dims[1];
        layer.c_out = t.dims[2];
        std::memcpy(layer.R.data(), t.payload.data(),
                    t.payload.size() * sizeof(double));
      } else if (part == "W") {
        layer.W = as_rmat();
      } else if (part == "b") {
        layer.b = as_rvec();
      } else {
        throw IoError("unexpected tensor name " + t.name + " in " + path);
      }
    } else {
      throw IoError("unexpected tensor name " + t.name + " in " + path);
    }
  }
  return model;
}

}  // namespace dse
