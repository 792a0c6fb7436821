#include "vslam/harness.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vslam {

namespace {

std::string fmt_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string fmt_vec3(const Vec3& v, int digits) {
  return fmt_double(v.x(), digits) + "," + fmt_double(v.y(), digits) + "," +
         fmt_double(v.z(), digits);
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(current);
  return out;
}

struct KeyContext {
  const std::string& origin;
  int line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(origin, line, "key '" + key + "': " + what);
  }
};

double parse_double(const KeyContext& ctx, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) ctx.fail("empty numeric value");
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size()) ctx.fail("cannot parse '" + v + "' as a number");
  return d;
}

std::uint64_t parse_u64(const KeyContext& ctx, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) ctx.fail("empty integer value");
  char* end = nullptr;
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size()) ctx.fail("cannot parse '" + v + "' as an unsigned integer");
  return u;
}

bool parse_bool(const KeyContext& ctx, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true") return true;
  if (v == "false") return false;
  ctx.fail("expected 'true' or 'false', got '" + v + "'");
}

Vec3 parse_vec3(const KeyContext& ctx, const std::string& value) {
  const auto parts = split(value, ',');
  if (parts.size() != 3) ctx.fail("expected 3 comma-separated numbers");
  return Vec3(parse_double(ctx, parts[0]), parse_double(ctx, parts[1]),
              parse_double(ctx, parts[2]));
}

std::vector<Vec3> parse_vec3_list(const KeyContext& ctx, const std::string& value) {
  std::vector<Vec3> out;
  if (trim(value).empty()) return out;  // explicit empty list clears the default
  for (const auto& item : split(value, ';')) {
    out.push_back(parse_vec3(ctx, item));
  }
  return out;
}

Mat3 parse_mat3(const KeyContext& ctx, const std::string& value) {
  const auto parts = split(value, ',');
  if (parts.size() != 9) ctx.fail("expected 9 comma-separated numbers (row major)");
  Mat3 m;
  for (int i = 0; i < 9; ++i) {
    m(i / 3, i % 3) = parse_double(ctx, parts[static_cast<std::size_t>(i)]);
  }
  return m;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    // '#' starts a comment anywhere in the line; ';' only when it begins the
    // line so that semicolon-separated lists keep working.
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty() || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(origin, line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scenario" && section != "gains" && section != "integration" &&
          section != "output") {
        throw ParseError(origin, line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(origin, line_no, "expected key = value");
    if (section.empty()) throw ParseError(origin, line_no, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = line.substr(eq + 1);
    const KeyContext ctx{origin, line_no, key};

    if (section == "scenario") {
      if (key == "points") cfg.points = parse_vec3_list(ctx, value);
      else if (key == "bearings") cfg.bearings = parse_vec3_list(ctx, value);
      else if (key == "initial_position") cfg.initial_position = parse_vec3(ctx, value);
      else if (key == "initial_rpy") cfg.initial_rpy = parse_vec3(ctx, value);
      else if (key == "angular_velocity") cfg.angular_velocity = parse_vec3(ctx, value);
      else if (key == "linear_velocity") cfg.linear_velocity = parse_vec3(ctx, value);
      else if (key == "epsilon_bound") cfg.epsilon_bound = parse_double(ctx, value);
      else if (key == "seed") cfg.seed = parse_u64(ctx, value);
      else if (key == "camera_matrix") cfg.camera_matrix = parse_mat3(ctx, value);
      else if (key == "literal_reference") cfg.literal_reference = parse_bool(ctx, value);
      else ctx.fail("unknown key in [scenario]");
    } else if (section == "gains") {
      if (key == "k") cfg.gains.k = parse_double(ctx, value);
      else if (key == "k_G") cfg.gains.k_g = parse_double(ctx, value);
      else if (key == "k_H") cfg.gains.k_h = parse_double(ctx, value);
      else if (key == "sigma0_scale") cfg.gains.sigma0_scale = parse_double(ctx, value);
      else ctx.fail("unknown key in [gains]");
    } else if (section == "integration") {
      if (key == "dt") cfg.dt = parse_double(ctx, value);
      else if (key == "duration") cfg.duration = parse_double(ctx, value);
      else ctx.fail("unknown key in [integration]");
    } else {  // output
      if (key == "pe_window") cfg.pe_window = parse_double(ctx, value);
      else if (key == "csv") cfg.csv_path = trim(value);
      else ctx.fail("unknown key in [output]");
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path, 0, "cannot open config file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

std::string config_to_string(const ScenarioConfig& cfg) {
  std::ostringstream out;
  auto vec3_list = [](const std::vector<Vec3>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) s += "; ";
      s += fmt_vec3(items[i], 17);
    }
    return s;
  };
  out << "[scenario]\n";
  out << "points = " << vec3_list(cfg.points) << "\n";
  out << "bearings = " << vec3_list(cfg.bearings) << "\n";
  out << "initial_position = " << fmt_vec3(cfg.initial_position, 17) << "\n";
  out << "initial_rpy = " << fmt_vec3(cfg.initial_rpy, 17) << "\n";
  out << "angular_velocity = " << fmt_vec3(cfg.angular_velocity, 17) << "\n";
  out << "linear_velocity = " << fmt_vec3(cfg.linear_velocity, 17) << "\n";
  out << "epsilon_bound = " << fmt_double(cfg.epsilon_bound, 17) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "camera_matrix = ";
  for (int i = 0; i < 9; ++i) {
    if (i > 0) out << ",";
    out << fmt_double(cfg.camera_matrix(i / 3, i % 3), 17);
  }
  out << "\n";
  out << "literal_reference = " << (cfg.literal_reference ? "true" : "false") << "\n";
  out << "\n[gains]\n";
  out << "k = " << fmt_double(cfg.gains.k, 17) << "\n";
  out << "k_G = " << fmt_double(cfg.gains.k_g, 17) << "\n";
  out << "k_H = " << fmt_double(cfg.gains.k_h, 17) << "\n";
  out << "sigma0_scale = " << fmt_double(cfg.gains.sigma0_scale, 17) << "\n";
  out << "\n[integration]\n";
  out << "dt = " << fmt_double(cfg.dt, 17) << "\n";
  out << "duration = " << fmt_double(cfg.duration, 17) << "\n";
  out << "\n[output]\n";
  out << "pe_window = " << fmt_double(cfg.pe_window, 17) << "\n";
  out << "csv = " << cfg.csv_path << "\n";
  return out.str();
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  fit.samples = std::min(x.size(), y.size());
  if (fit.samples < 2) return fit;
  const auto n = static_cast<double>(fit.samples);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < fit.samples; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < fit.samples; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < fit.samples; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

RunSummary summarize(const SimulationRun& run) {
  RunSummary summary;
  summary.wall_seconds = run.wall_seconds;
  if (run.frames.empty()) return summary;

  const FrameRecord& last = run.frames.back();
  summary.final_lyapunov = last.lyapunov;
  summary.final_storage = last.storage;
  summary.final_mu = last.mu;

  std::vector<double> t;
  std::vector<double> logv;
  for (const auto& frame : run.frames) {
    if (frame.lyapunov > 1e-10) {
      t.push_back(frame.t);
      logv.push_back(std::log10(frame.lyapunov));
    }
  }
  if (t.size() >= 10) {
    const LineFit fit = fit_line(t, logv);
    summary.log10_slope = fit.slope;
    summary.log10_r2 = fit.r2;
    summary.slope_valid = true;
  }

  const TotalState& truth = run.final_truth;
  const TotalState& estimate = run.final_estimate_aligned;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth.layout_kind(i) == Kind::Point) {
      summary.point_position_errors.push_back(
          (unembed_point(estimate.landmarks()[i]) - unembed_point(truth.landmarks()[i])).norm());
    } else {
      const Bearing est_dir(estimate.landmarks()[i].rep().head<3>());
      const Bearing true_dir(truth.landmarks()[i].rep().head<3>());
      summary.bearing_angle_errors.push_back(est_dir.angle_to(true_dir));
    }
  }
  return summary;
}

std::string summary_to_string(const RunSummary& summary) {
  auto list = [](const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) s += ", ";
      s += fmt_double(values[i], 12);
    }
    return s;
  };
  std::ostringstream out;
  out << "final_V = " << fmt_double(summary.final_lyapunov, 12) << "\n";
  out << "log10V_slope = " << fmt_double(summary.log10_slope, 12) << "\n";
  out << "log10V_r2 = " << fmt_double(summary.log10_r2, 12) << "\n";
  out << "slope_valid = " << (summary.slope_valid ? "true" : "false") << "\n";
  out << "wall_seconds = " << fmt_double(summary.wall_seconds, 12) << "\n";
  out << "l_final = " << list(summary.final_storage) << "\n";
  out << "point_position_errors_m = " << list(summary.point_position_errors) << "\n";
  out << "bearing_angle_errors_rad = " << list(summary.bearing_angle_errors) << "\n";
  out << "pe_mu = " << list(summary.final_mu) << "\n";
  return out.str();
}

std::string csv_to_string(const std::vector<FrameRecord>& frames) {
  const std::size_t n = frames.empty() ? 0 : frames.front().storage.size();
  std::ostringstream out;
  out << "t,V,log10V";
  for (std::size_t i = 1; i <= n; ++i) out << ",l_" << i;
  out << ",px,py,pz,ex,ey,ez";
  for (std::size_t i = 1; i <= n; ++i) out << ",mu_" << i;
  out << ",sigma_min,sigma_max\n";
  for (const auto& frame : frames) {
    out << fmt_double(frame.t, 12);
    out << "," << fmt_double(frame.lyapunov, 12);
    out << "," << fmt_double(std::log10(std::max(frame.lyapunov, 1e-300)), 12);
    for (double l : frame.storage) out << "," << fmt_double(l, 12);
    for (int axis = 0; axis < 3; ++axis) {
      out << "," << fmt_double(frame.truth.translation(axis), 12);
    }
    for (int axis = 0; axis < 3; ++axis) {
      out << "," << fmt_double(frame.estimate_aligned.translation(axis), 12);
    }
    for (double mu : frame.mu) out << "," << fmt_double(mu, 12);
    out << "," << fmt_double(frame.sigma_min, 12) << "," << fmt_double(frame.sigma_max, 12);
    out << "\n";
  }
  return out.str();
}

void emit_csv(const std::vector<FrameRecord>& frames, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("emit_csv: cannot open '" + path + "' for writing");
  }
  out << csv_to_string(frames);
  out.flush();
  if (!out) {
    throw IoError("emit_csv: write to '" + path + "' failed");
  }
}

}  // namespace vslam
