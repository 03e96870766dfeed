#include "haarlab/io.hpp"

#include "haarlab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace haarlab {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() && s.find_first_not_of(" \t\r", pos) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::io_error, path + ": not a number: '" + s + "'");
  }
}

// data rows, with a header line skipped when its first field is not numeric
std::vector<std::vector<std::string>> csv_rows(const std::string& path, std::size_t fields) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split(line, ',');
    if (first) {
      first = false;
      const auto c = f.empty() ? std::string() : f[0];
      if (c.find_first_of("0123456789") == std::string::npos || std::isalpha(static_cast<unsigned char>(c[0]))) continue;
    }
    if (f.size() != fields) throw Error(ErrorCode::io_error, path + ": expected " + std::to_string(fields) + " fields in '" + line + "'");
    rows.push_back(std::move(f));
  }
  return rows;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << std::setprecision(17);
  return out;
}

}  // namespace

std::string format_rational(const Rat& r) { return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator()); }

Rat parse_rational(const json& j) {
  if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    try {
      const auto slash = s.find('/');
      if (slash == std::string::npos) return Rat(std::stoll(s));
      const auto den = std::stoll(s.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator");
      return Rat(std::stoll(s.substr(0, slash)), den);
    } catch (const std::exception&) {
      throw Error(ErrorCode::config_invalid, "bad rational '" + s + "'");
    }
  }
  throw Error(ErrorCode::config_invalid, "rational must be an integer or a \"p/q\" string");
}

json grid_to_json(const GridSpec& g) {
  json j;
  j["n"] = g.n;
  j["d"] = g.d;
  j["L"] = g.L;
  j["side"] = format_rational(g.side);
  j["origin"] = json::array();
  for (const auto& r : g.origin) j["origin"].push_back(format_rational(r));
  j["sigma"] = json::array();
  for (const auto& r : g.sigma) j["sigma"].push_back(format_rational(r));
  return j;
}

GridSpec grid_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::config_invalid, "grid descriptor must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "n" && k != "d" && k != "L" && k != "side" && k != "origin" && k != "sigma")
      throw Error(ErrorCode::config_invalid, "unknown grid field '" + k + "'");
  GridSpec g;
  try {
    g.n = j.value("n", 1);
    g.d = j.value("d", 2);
    g.L = j.at("L").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_invalid, std::string("grid: ") + e.what());
  }
  if (j.contains("side")) g.side = parse_rational(j["side"]);
  if (j.contains("origin"))
    for (const auto& v : j["origin"]) g.origin.push_back(parse_rational(v));
  if (j.contains("sigma"))
    for (const auto& v : j["sigma"]) g.sigma.push_back(parse_rational(v));
  return g;
}

void write_function_csv(const std::string& path, const SampledFunction& f) {
  auto out = open_out(path);
  out << "leaf,re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i) out << i << ',' << f.values[i].real() << ',' << f.values[i].imag() << '\n';
}

SampledFunction read_function_csv(const std::string& path, const GridPtr& g) {
  SampledFunction f = zeros(g);
  std::vector<bool> seen(f.size(), false);
  for (const auto& r : csv_rows(path, 3)) {
    const auto i = static_cast<std::size_t>(to_double(r[0], path));
    if (i >= f.size()) throw Error(ErrorCode::dimension_mismatch, path + ": leaf index beyond the grid");
    f.values[i] = {to_double(r[1], path), to_double(r[2], path)};
    seen[i] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorCode::dimension_mismatch, path + ": value count differs from the leaf count");
  return f;
}

void write_coefficients_csv(const std::string& path, const HaarCoefficients& c) {
  auto out = open_out(path);
  out << "level,cube,branch,re,im\n";
  for (std::size_t q = 0; q < c.avg.size(); ++q) out << -1 << ',' << q << ',' << 0 << ',' << c.avg[q].real() << ',' << c.avg[q].imag() << '\n';
  const int nb = c.grid->branches();
  for (int k = 0; k < c.grid->L(); ++k)
    for (std::size_t i = 0; i < c.coef[k].size(); ++i)
      out << k << ',' << i / nb << ',' << i % nb + 1 << ',' << c.coef[k][i].real() << ',' << c.coef[k][i].imag() << '\n';
}

HaarCoefficients read_coefficients_csv(const std::string& path, const GridPtr& g) {
  HaarCoefficients c = zero_coefficients(g);
  for (const auto& r : csv_rows(path, 5)) {
    const int k = static_cast<int>(to_double(r[0], path));
    const auto q = static_cast<std::size_t>(to_double(r[1], path));
    const int b = static_cast<int>(to_double(r[2], path));
    const cd v{to_double(r[3], path), to_double(r[4], path)};
    if (k == -1) {
      if (q >= c.avg.size()) throw Error(ErrorCode::dimension_mismatch, path + ": average index out of range");
      c.avg[q] = v;
      continue;
    }
    if (k < 0 || k >= g->L() || q >= g->cube_count(k) || b < 1 || b > g->branches())
      throw Error(ErrorCode::dimension_mismatch, path + ": coefficient index out of range");
    c.at({k, q, b}) = v;
  }
  return c;
}

void write_operator(const std::string& path, const DenseOperator& op) {
  json h;
  h["grid"] = op.grid ? grid_to_json(op.grid->spec()) : json();
  h["rows"] = op.m.rows();
  h["cols"] = op.m.cols();
  h["tag"] = op.tag;
  h["dtype"] = "complex128";
  h["basis"] = "leaf";
  const std::string hs = h.dump();
  auto out = open_out(path, true);
  out.write("HLOP", 4);
  const auto len = static_cast<std::uint32_t>(hs.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (Eigen::Index i = 0; i < op.m.rows(); ++i)
    for (Eigen::Index j = 0; j < op.m.cols(); ++j) {
      const double v[2] = {op.m(i, j).real(), op.m(i, j).imag()};
      out.write(reinterpret_cast<const char*>(v), sizeof v);
    }
}

DenseOperator read_operator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  char magic[4];
  std::uint32_t len = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, "HLOP", 4) != 0) throw Error(ErrorCode::io_error, path + ": not an operator container");
  if (!in.read(reinterpret_cast<char*>(&len), sizeof len) || len > (1u << 24)) throw Error(ErrorCode::io_error, path + ": bad header");
  std::string hs(len, '\0');
  if (!in.read(hs.data(), len)) throw Error(ErrorCode::io_error, path + ": truncated header");
  json h;
  try {
    h = json::parse(hs);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_error, path + ": " + e.what());
  }
  DenseOperator op;
  if (h.value("dtype", "complex128") != "complex128" || h.value("basis", "leaf") != "leaf")
    throw Error(ErrorCode::io_error, path + ": unsupported dtype or basis");
  if (!h["grid"].is_null()) op.grid = make_grid(grid_from_json(h["grid"]));
  op.tag = h.value("tag", "");
  const auto rows = h.at("rows").get<Eigen::Index>(), cols = h.at("cols").get<Eigen::Index>();
  op.m.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double v[2];
      if (!in.read(reinterpret_cast<char*>(v), sizeof v)) throw Error(ErrorCode::io_error, path + ": truncated data");
      op.m(i, j) = {v[0], v[1]};
    }
  return op;
}

void write_operator_csv(const std::string& path, const DenseOperator& op) {
  auto out = open_out(path);
  out << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < op.m.rows(); ++i)
    for (Eigen::Index j = 0; j < op.m.cols(); ++j) out << i << ',' << j << ',' << op.m(i, j).real() << ',' << op.m(i, j).imag() << '\n';
}

WeightedPointSet read_points_csv(const std::string& path) {
  WeightedPointSet P;
  for (const auto& r : csv_rows(path, 3)) P.atoms.push_back({{to_double(r[0], path), to_double(r[1], path)}, to_double(r[2], path)});
  return P;
}

void write_points_csv(const std::string& path, const WeightedPointSet& P) {
  auto out = open_out(path);
  out << "re,im,w\n";
  for (const auto& a : P.atoms) out << a.z.real() << ',' << a.z.imag() << ',' << a.w << '\n';
}

json median_to_json(const MedianResult& r) {
  json j;
  j["center"] = {r.pair.center.real(), r.pair.center.imag()};
  j["theta"] = r.pair.theta;
  j["masses"] = {r.masses[0], r.masses[1], r.masses[2], r.masses[3]};
  j["total"] = r.total;
  j["certified"] = r.certified;
  if (!r.route.empty()) j["route"] = r.route;
  j["exact"] = r.exact;
  if (!r.exact) j["slack"] = r.slack;
  return j;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace haarlab
