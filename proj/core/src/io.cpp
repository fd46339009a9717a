#include "aiid/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aiid/errors.hpp"

namespace aiid {

using json = nlohmann::ordered_json;

double round_for_output(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("parse error in " + path + ": " + e.what());
  }
  return j;
}

void dump_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

json matrix_part(const Mat& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(round_for_output(imag ? m(i, j).imag() : m(i, j).real()));
    rows.push_back(std::move(row));
  }
  return rows;
}

json operator_json(const SiteOperator& op) {
  json j;
  j["site_dim"] = op.site_dim;
  j["n_sites"] = op.n_sites;
  j["re"] = matrix_part(op.mat, false);
  j["im"] = matrix_part(op.mat, true);
  return j;
}

}  // namespace

SiteOperator read_operator(const std::string& path) {
  const json j = load_json(path);
  for (const char* key : {"site_dim", "n_sites", "re", "im"})
    if (!j.contains(key))
      throw std::invalid_argument(path + ": missing field " + key);
  const int d = j["site_dim"].get<int>();
  const int n = j["n_sites"].get<int>();
  const int side = checked_power(d, n, 4096);
  const auto& re = j["re"];
  const auto& im = j["im"];
  if (static_cast<int>(re.size()) != side || static_cast<int>(im.size()) != side)
    throw std::invalid_argument(path + ": matrix side mismatch");
  Mat m(side, side);
  for (int i = 0; i < side; ++i) {
    if (static_cast<int>(re[i].size()) != side ||
        static_cast<int>(im[i].size()) != side)
      throw std::invalid_argument(path + ": ragged matrix rows");
    for (int c = 0; c < side; ++c)
      m(i, c) = Cd(re[i][c].get<double>(), im[i][c].get<double>());
  }
  return SiteOperator{d, n, std::move(m)};
}

DensityOperator read_density(const std::string& path) {
  const SiteOperator op = read_operator(path);
  return DensityOperator::make(op.site_dim, op.n_sites, op.mat);
}

void write_operator(const std::string& path, const SiteOperator& op) {
  dump_json(path, operator_json(op));
}

void write_projector(const std::string& path, const SpanProjector& proj) {
  json j = operator_json(SiteOperator{proj.site_dim, proj.n, proj.projector});
  j["rank"] = proj.rank;
  j["r"] = proj.r;
  dump_json(path, j);
}

ClassicalDistribution read_distribution(const std::string& path) {
  const json j = load_json(path);
  for (const char* key : {"d", "n", "probs"})
    if (!j.contains(key))
      throw std::invalid_argument(path + ": missing field " + key);
  std::map<std::string, double> probs;
  for (const auto& [key, value] : j["probs"].items())
    probs[key] = value.get<double>();
  return ClassicalDistribution::make(j["d"].get<int>(), j["n"].get<int>(),
                                     std::move(probs));
}

void write_distribution(const std::string& path,
                        const ClassicalDistribution& dist) {
  json j;
  j["d"] = dist.d;
  j["n"] = dist.n;
  json probs = json::object();
  for (const auto& [key, v] : dist.probs) probs[key] = round_for_output(v);
  j["probs"] = std::move(probs);
  dump_json(path, j);
}

}  // namespace aiid
