#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace posdyn::cli {
namespace {

void dump_into(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(k).dump() + ": ";
        dump_into(v, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += inner;
        dump_into(v, out, indent + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep floats recognizable as floats in JSON.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json vector(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

json matrix(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector(m.row(i).transpose()));
  return a;
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

std::string series_csv(const SeparationEstimate& est) {
  if (est.times.empty()) throw PreconditionError("series: empty history");
  const auto n = est.w_history.front().size();
  std::ostringstream os;
  os << "t,ln_rho";
  for (Eigen::Index i = 0; i < n; ++i) os << ",w_" << (i + 1);
  os << ",ln_proj_norm\n";
  // projection_norm_history[0] is t = 0; step k ends at index k + 1.
  for (std::size_t k = 0; k < est.times.size(); ++k) {
    os << format_double(est.times[k]) << ',' << format_double(est.ln_rho[k]);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(est.w_history[k][i]);
    os << ',' << format_double(est.projection_norm_history[k + 1].ln_norm) << '\n';
  }
  return os.str();
}

std::string plot_csv(const SeparationEstimate& est, const FloquetTrack& from_u0) {
  if (est.times.empty() || from_u0.history.empty()) throw PreconditionError("plot data: missing history");
  std::ostringstream os;
  os << "series,t,value\n";
  double acc = 0.0;
  for (std::size_t k = 0; k < est.times.size(); ++k) {
    acc += est.ln_rho[k];
    os << "lambda1_running," << format_double(est.times[k]) << ',' << format_double(acc / est.times[k]) << '\n';
  }
  const std::size_t m = std::min(est.times.size(), from_u0.history.size());
  for (std::size_t k = 0; k < m; ++k) {
    const double d = (from_u0.history[k].w - est.w_history[k]).norm();
    os << "ln_direction_distance," << format_double(from_u0.history[k].t) << ',' << format_double(std::log(d))
       << '\n';
  }
  return os.str();
}

}  // namespace posdyn::cli
