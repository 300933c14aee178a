#include "qpm/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qpm/errors.hpp"

namespace qpm {

namespace {

nlohmann::json cx_to_json(const cxd& z) { return nlohmann::json::array({z.real(), z.imag()}); }

cxd cx_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw invalid_input("json: complex entries must be [re, im]");
  return cxd(j[0].get<double>(), j[1].get<double>());
}

nlohmann::json cvector_to_json(const CVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(cx_to_json(v[k]));
  return out;
}

CVector cvector_from_json(const nlohmann::json& j, int dim) {
  if (!j.is_array() || int(j.size()) != dim)
    throw invalid_input("json: vector has the wrong dimension");
  CVector v(dim);
  for (int k = 0; k < dim; ++k) v[k] = cx_from_json(j[std::size_t(k)]);
  return v;
}

nlohmann::json cmatrix_to_json(const CMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(cx_to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

CMatrix cmatrix_from_json(const nlohmann::json& j, int dim) {
  if (!j.is_array() || int(j.size()) != dim) throw invalid_input("json: matrix shape mismatch");
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = j[std::size_t(r)];
    if (!row.is_array() || int(row.size()) != dim)
      throw invalid_input("json: matrix shape mismatch");
    for (int c = 0; c < dim; ++c) m(r, c) = cx_from_json(row[std::size_t(c)]);
  }
  return m;
}

int require_dim(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw invalid_input(std::string("json: missing integer field ") + key);
  const int n = j[key].get<int>();
  if (n < 1) throw invalid_input(std::string("json: field must be positive: ") + key);
  return n;
}

double number_or_nan(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw invalid_input("json: expected number or null");
  return j.get<double>();
}

}  // namespace

nlohmann::json grid_to_json(const VectorGrid& g) {
  check_grid_shape(g);
  nlohmann::json j;
  j["N"] = g.N;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : g.cells) cells.push_back(cvector_to_json(c));
  j["cells"] = cells;
  return j;
}

VectorGrid grid_from_json(const nlohmann::json& j) {
  VectorGrid g;
  g.N = require_dim(j, "N");
  if (!j.contains("cells") || !j["cells"].is_array() ||
      int(j["cells"].size()) != g.N * g.N)
    throw invalid_input("json: grid needs N*N cells");
  g.cells.reserve(std::size_t(g.N) * g.N);
  for (const auto& c : j["cells"]) g.cells.push_back(cvector_from_json(c, g.N));
  check_grid_shape(g);
  return g;
}

nlohmann::json magic_to_json(const MagicUnitary& u) {
  if (u.N < 1 || int(u.cells.size()) != u.N * u.N)
    throw invalid_input("json: malformed magic unitary");
  nlohmann::json j;
  j["N"] = u.N;
  j["dim"] = int(u.cells[0].mat.rows());
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : u.cells) cells.push_back(cmatrix_to_json(c.mat));
  j["cells"] = cells;
  return j;
}

MagicUnitary magic_from_json(const nlohmann::json& j) {
  MagicUnitary u;
  u.N = require_dim(j, "N");
  const int dim = require_dim(j, "dim");
  if (!j.contains("cells") || !j["cells"].is_array() ||
      int(j["cells"].size()) != u.N * u.N)
    throw invalid_input("json: magic unitary needs N*N cells");
  u.cells.reserve(std::size_t(u.N) * u.N);
  for (const auto& c : j["cells"]) u.cells.push_back(Projection{cmatrix_from_json(c, dim)});
  return u;
}

nlohmann::json latin_to_json(const LatinSquare& l) {
  validate_latin(l);
  nlohmann::json j;
  j["N"] = l.N;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < l.N; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < l.N; ++k) row.push_back(l.at(i, k));
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

LatinSquare latin_from_json(const nlohmann::json& j) {
  LatinSquare l;
  l.N = require_dim(j, "N");
  if (!j.contains("rows") || !j["rows"].is_array() || int(j["rows"].size()) != l.N)
    throw invalid_input("json: latin square needs N rows");
  l.cells.reserve(std::size_t(l.N) * l.N);
  for (const auto& row : j["rows"]) {
    if (!row.is_array() || int(row.size()) != l.N)
      throw invalid_input("json: latin square rows must have N entries");
    for (const auto& e : row) {
      if (!e.is_number_integer()) throw invalid_input("json: latin entries must be integers");
      l.cells.push_back(e.get<int>());
    }
  }
  validate_latin(l);
  return l;
}

nlohmann::json series_to_json(const MomentSeries& s) {
  nlohmann::json j;
  j["label"] = s.label;
  j["N"] = s.N;
  j["seed"] = s.seed;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : s.entries) {
    nlohmann::json je;
    je["p"] = e.p;
    je["r"] = e.r;
    je["estimate"] = e.estimate;
    je["stderr"] = std::isnan(e.stderr_) ? nlohmann::json() : nlohmann::json(e.stderr_);
    je["samples"] = e.samples;
    je["reference"] = std::isnan(e.reference) ? nlohmann::json() : nlohmann::json(e.reference);
    entries.push_back(je);
  }
  j["entries"] = entries;
  return j;
}

MomentSeries series_from_json(const nlohmann::json& j) {
  MomentSeries s;
  if (!j.contains("label") || !j["label"].is_string())
    throw invalid_input("json: series needs a label");
  s.label = j["label"].get<std::string>();
  s.N = require_dim(j, "N");
  if (!j.contains("seed") || !j["seed"].is_number_unsigned())
    throw invalid_input("json: series needs an unsigned seed");
  s.seed = j["seed"].get<std::uint64_t>();
  if (!j.contains("entries") || !j["entries"].is_array())
    throw invalid_input("json: series needs entries");
  for (const auto& je : j["entries"]) {
    MomentEntry e;
    e.p = require_dim(je, "p");
    if (!je.contains("r") || !je["r"].is_number_integer())
      throw invalid_input("json: entry needs integer r");
    e.r = je["r"].get<int>();
    if (!je.contains("estimate") || !je["estimate"].is_number())
      throw invalid_input("json: entry needs a numeric estimate");
    e.estimate = je["estimate"].get<double>();
    e.stderr_ = number_or_nan(je.value("stderr", nlohmann::json()));
    if (!je.contains("samples") || !je["samples"].is_number_integer())
      throw invalid_input("json: entry needs integer samples");
    e.samples = je["samples"].get<long>();
    e.reference = number_or_nan(je.value("reference", nlohmann::json()));
    s.entries.push_back(e);
  }
  return s;
}

nlohmann::json report_to_json(const TrialReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["mode"] = r.mode;
  j["params"] = r.params;
  j["trials"] = r.trials;
  j["evaluated"] = r.evaluated;
  j["violations"] = r.violations;
  j["rejected"] = r.rejected;
  j["reeval_count"] = r.reeval_count;
  j["worst_margin"] = std::isnan(r.worst_margin) ? nlohmann::json() : nlohmann::json(r.worst_margin);
  j["seed"] = r.seed;
  return j;
}

nlohmann::json trace_summary_json(const FlatteningTrace& t) {
  nlohmann::json j;
  j["converged"] = t.converged;
  j["iterations"] = t.iterations;
  j["stop_reason"] = t.stop_reason;
  if (!t.rows.empty()) {
    const FlattenRow& last = t.rows.back();
    j["final_residual"] = last.residual;
    j["final_vol"] = last.vol_;
    j["final_f2"] = last.f2;
    if (!std::isnan(last.f3)) j["final_f3"] = last.f3;
  }
  return j;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string series_csv(const MomentSeries& s) {
  std::ostringstream out;
  out << "pipeline,p,r,estimate,stderr,samples,reference\n";
  for (const auto& e : s.entries)
    out << s.label << ',' << e.p << ',' << e.r << ',' << format_double(e.estimate) << ','
        << format_double(e.stderr_) << ',' << e.samples << ',' << format_double(e.reference)
        << '\n';
  return out.str();
}

std::string traces_csv(const std::vector<FlatteningTrace>& runs, bool with_f3) {
  std::ostringstream out;
  out << "run,iteration,residual,vol,f2";
  if (with_f3) out << ",f3";
  out << '\n';
  for (std::size_t run = 0; run < runs.size(); ++run)
    for (const auto& row : runs[run].rows) {
      out << run << ',' << row.iteration << ',' << format_double(row.residual) << ','
          << format_double(row.vol_) << ',' << format_double(row.f2);
      if (with_f3) out << ',' << format_double(row.f3);
      out << '\n';
    }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw invalid_input("cannot open file for writing: " + path);
  f << content;
  if (!f) throw invalid_input("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw invalid_input("cannot open file for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace qpm
