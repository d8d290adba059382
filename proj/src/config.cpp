#include "jflow/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "jflow/diagnostics.hpp"
#include "jflow/error.hpp"

namespace jflow {

namespace {

[[noreturn]] void fail(const std::string& key, const YAML::Node& node, const std::string& why) {
  std::ostringstream os;
  os << key;
  if (node.IsDefined() && node.Mark().line >= 0) os << " (line " << node.Mark().line + 1 << ")";
  os << ": " << why;
  throw ValidationError(os.str());
}

template <class T>
T scalar_as(const std::string& key, const YAML::Node& node) {
  if (!node.IsScalar()) fail(key, node, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(key, node, "cannot convert '" + node.Scalar() + "'");
  }
}

double real_as(const std::string& key, const YAML::Node& node) {
  const double v = scalar_as<double>(key, node);
  if (!std::isfinite(v)) fail(key, node, "must be finite");
  return v;
}

HermitianMatrix2 matrix_as(const std::string& key, const YAML::Node& node) {
  if (!node.IsSequence() || (node.size() != 4 && node.size() != 6)) {
    fail(key, node, "expected [a11, a22, Re a12, Im a12] (optionally two reserved slots)");
  }
  double v[4];
  for (std::size_t i = 0; i < 4; ++i) {
    v[i] = real_as(key + "[" + std::to_string(i) + "]", node[i]);
  }
  return {v[0], v[1], Complex(v[2], v[3])};
}

FourierMode mode_as(const std::string& key, const YAML::Node& node) {
  if (!node.IsMap()) fail(key, node, "expected a mapping {k, amplitude, phase}");
  FourierMode m;
  for (const auto& kv : node) {
    const auto name = kv.first.as<std::string>();
    const std::string path = key + "." + name;
    if (name == "k") {
      if (!kv.second.IsSequence() || kv.second.size() != 4) {
        fail(path, kv.second, "expected four integer frequencies");
      }
      for (std::size_t i = 0; i < 4; ++i) {
        m.k[i] = scalar_as<int>(path + "[" + std::to_string(i) + "]", kv.second[i]);
      }
    } else if (name == "amplitude") {
      m.amplitude = real_as(path, kv.second);
    } else if (name == "phase") {
      m.phase = real_as(path, kv.second);
    } else {
      fail(path, kv.first, "unknown key");
    }
  }
  if (!node["k"]) fail(key + ".k", node, "missing");
  if (!node["amplitude"]) fail(key + ".amplitude", node, "missing");
  return m;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ValidationError("parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ValidationError("config: expected a key-value mapping");

  RunConfig cfg;
  std::set<std::string> seen;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const auto& v = kv.second;
    seen.insert(key);
    if (key == "grid") {
      if (!v.IsSequence() || v.size() != 4) fail(key, v, "expected four integers");
      for (std::size_t i = 0; i < 4; ++i) {
        cfg.grid.n[i] = scalar_as<int>(key + "[" + std::to_string(i) + "]", v[i]);
        if (cfg.grid.n[i] < 4 || cfg.grid.n[i] % 2 != 0) {
          fail(key, v, "grid dims must be even and >= 4");
        }
      }
    } else if (key == "G") {
      cfg.G = matrix_as(key, v);
    } else if (key == "H") {
      cfg.H = matrix_as(key, v);
    } else if (key == "psi0") {
      if (v.IsNull()) continue;
      if (!v.IsSequence()) fail(key, v, "expected a list of modes");
      for (std::size_t i = 0; i < v.size(); ++i) {
        cfg.psi0.push_back(mode_as(key + "[" + std::to_string(i) + "]", v[i]));
      }
    } else if (key == "sigma") {
      cfg.sigma = real_as(key, v);
      if (!(cfg.sigma > 0.0 && cfg.sigma <= 1.0)) fail(key, v, "must lie in (0, 1]");
    } else if (key == "tol_stop") {
      cfg.tol_stop = real_as(key, v);
      if (!(cfg.tol_stop > 0.0)) fail(key, v, "must be positive");
    } else if (key == "t_max") {
      cfg.t_max = real_as(key, v);
      if (!(cfg.t_max >= 0.0)) fail(key, v, "must be non-negative");
    } else if (key == "sample_interval") {
      cfg.sample_interval = scalar_as<int>(key, v);
      if (cfg.sample_interval < 1) fail(key, v, "must be at least 1");
    } else if (key == "snapshot_interval") {
      cfg.snapshot_interval = scalar_as<int>(key, v);
      if (cfg.snapshot_interval < 0) fail(key, v, "must be non-negative");
    } else if (key == "A_override") {
      if (!v.IsNull()) cfg.A_override = real_as(key, v);
    } else if (key == "seed") {
      cfg.seed = scalar_as<std::uint64_t>(key, v);
    } else if (key == "output_dir") {
      cfg.output_dir = scalar_as<std::string>(key, v);
    } else if (key == "newton_tol") {
      cfg.newton_tol = real_as(key, v);
      if (!(cfg.newton_tol > 0.0)) fail(key, v, "must be positive");
    } else if (key == "newton_max_iter") {
      cfg.newton_max_iter = scalar_as<int>(key, v);
      if (cfg.newton_max_iter < 0) fail(key, v, "must be non-negative");
    } else if (key == "compare_threshold") {
      cfg.compare_threshold = real_as(key, v);
      if (!(cfg.compare_threshold >= 0.0)) fail(key, v, "must be non-negative");
    } else {
      fail(key, kv.first, "unknown key");
    }
  }
  for (const char* required : {"grid", "G", "H"}) {
    if (!seen.count(required)) throw ValidationError(std::string(required) + ": missing required key");
  }
  for (std::size_t i = 0; i < cfg.psi0.size(); ++i) {
    for (int a = 0; a < 4; ++a) {
      if (2 * std::abs(cfg.psi0[i].k[a]) >= cfg.grid.n[a]) {
        throw ValidationError("psi0[" + std::to_string(i) +
                              "].k: frequency must be below the Nyquist limit of the grid");
      }
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  const auto mat = [](const HermitianMatrix2& m) {
    return "[" + format_real(m.a11) + ", " + format_real(m.a22) + ", " +
           format_real(m.a12.real()) + ", " + format_real(m.a12.imag()) + "]";
  };
  os << "grid: [" << c.grid.n[0] << ", " << c.grid.n[1] << ", " << c.grid.n[2] << ", "
     << c.grid.n[3] << "]\n";
  os << "G: " << mat(c.G) << "\n";
  os << "H: " << mat(c.H) << "\n";
  os << "psi0:";
  if (c.psi0.empty()) os << " []";
  os << "\n";
  for (const auto& m : c.psi0) {
    os << "  - {k: [" << m.k[0] << ", " << m.k[1] << ", " << m.k[2] << ", " << m.k[3]
       << "], amplitude: " << format_real(m.amplitude) << ", phase: " << format_real(m.phase)
       << "}\n";
  }
  os << "sigma: " << format_real(c.sigma) << "\n";
  os << "tol_stop: " << format_real(c.tol_stop) << "\n";
  os << "t_max: " << format_real(c.t_max) << "\n";
  os << "sample_interval: " << c.sample_interval << "\n";
  os << "snapshot_interval: " << c.snapshot_interval << "\n";
  if (c.A_override) os << "A_override: " << format_real(*c.A_override) << "\n";
  os << "seed: " << c.seed << "\n";
  YAML::Emitter dir;
  dir << YAML::DoubleQuoted << c.output_dir;
  os << "output_dir: " << dir.c_str() << "\n";
  os << "newton_tol: " << format_real(c.newton_tol) << "\n";
  os << "newton_max_iter: " << c.newton_max_iter << "\n";
  os << "compare_threshold: " << format_real(c.compare_threshold) << "\n";
  return os.str();
}

SurfaceModel build_model(const RunConfig& c) {
  return SurfaceModel::build(c.grid, c.G, c.H, synthesize(c.grid, c.psi0));
}

FlowOptions flow_options(const RunConfig& c) {
  FlowOptions o;
  o.sigma = c.sigma;
  o.tol_stop = c.tol_stop;
  o.t_max = c.t_max;
  o.sample_interval = c.sample_interval;
  o.snapshot_interval = c.snapshot_interval;
  return o;
}

}  // namespace jflow
