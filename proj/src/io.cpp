// SPDX-License-Identifier: Apache-2.0
#include "trendvar/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "trendvar/errors.hpp"

namespace trendvar {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string where(const std::string& source, std::size_t row, std::size_t col) {
  return source + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

TimeSeriesFrame parse_series_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  // Skip leading blank lines.
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorKind::EmptyData, source + ": file is empty");
  std::vector<std::string> header = split_fields(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 2 || header[0] != "t") {
    throw Error(ErrorKind::ParseError,
                source + ": header must be t followed by at least one series column");
  }
  const std::size_t m = header.size() - 1;

  TimeSeriesFrame frame;
  frame.names.assign(header.begin() + 1, header.end());
  std::vector<double> values;
  bool saw_blank = false;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) {
      saw_blank = true;
      continue;
    }
    if (saw_blank) throw Error(ErrorKind::ParseError, source + ": blank line before row " + std::to_string(row));
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != m + 1) {
      throw Error(ErrorKind::ParseError,
                  where(source, row, std::min(fields.size(), m + 1) + 1) + ": expected " +
                      std::to_string(m + 1) + " fields, found " + std::to_string(fields.size()));
    }
    const std::string t_text = trim(fields[0]);
    std::int64_t t = 0;
    const auto tr = std::from_chars(t_text.data(), t_text.data() + t_text.size(), t);
    if (tr.ec != std::errc() || tr.ptr != t_text.data() + t_text.size()) {
      throw Error(ErrorKind::ParseError, where(source, row, 1) + ": time index '" + t_text +
                                             "' is not an integer");
    }
    if (!frame.index.empty()) {
      const std::int64_t prev = frame.index.back();
      if (t > prev + 1) {
        throw Error(ErrorKind::GapError, source + ": missing time index " + std::to_string(prev + 1) +
                                             " (row " + std::to_string(row) + " has t = " +
                                             std::to_string(t) + ")");
      }
      if (t <= prev) {
        throw Error(ErrorKind::ParseError, where(source, row, 1) + ": time index " + std::to_string(t) +
                                               " does not increase");
      }
    }
    frame.index.push_back(t);
    for (std::size_t c = 1; c <= m; ++c) {
      const std::string f = trim(fields[c]);
      double v = 0.0;
      const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || r.ec != std::errc() || r.ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::NonNumeric, where(source, row, c + 1) + ": value '" + f +
                                               "' is not a finite number");
      }
      values.push_back(v);
    }
  }
  if (frame.index.empty()) throw Error(ErrorKind::EmptyData, source + ": no data rows");
  const Index t_len = static_cast<Index>(frame.index.size());
  frame.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), t_len, static_cast<Index>(m));
  return frame;
}

TimeSeriesFrame read_series_csv(const std::string& path) {
  return parse_series_csv(read_text_file(path), path);
}

Matrix read_trend_csv(const std::string& path) { return read_series_csv(path).panel(); }

void write_panel_csv(const std::string& path, const Matrix& panel, const std::string& prefix,
                     std::int64_t first_t) {
  std::ostringstream out;
  out << 't';
  for (Index k = 0; k < panel.rows(); ++k) out << ',' << prefix << '_' << (k + 1);
  out << '\n';
  for (Index t = 0; t < panel.cols(); ++t) {
    out << (first_t + t);
    for (Index k = 0; k < panel.rows(); ++k) out << ',' << format_double(panel(k, t));
    out << '\n';
  }
  write_text_file(path, out.str());
}

// ---- model archive -------------------------------------------------------

namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorKind::ParseError, "archive: matrix size does not match its data");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[k++].get<double>();
  }
  return m;
}

const char* kind_name(RegressorKind kind) {
  return kind == RegressorKind::Polynomial ? "polynomial" : "polynomial_reciprocal";
}

RegressorKind kind_from(const std::string& s) {
  if (s == "polynomial") return RegressorKind::Polynomial;
  if (s == "polynomial_reciprocal") return RegressorKind::PolynomialWithReciprocals;
  throw Error(ErrorKind::InvalidArgument, "unknown regressor kind '" + s + "'");
}

json config_json(const TrainConfig& c) {
  return {{"p", c.p},
          {"units", c.units},
          {"regressors", kind_name(c.regressor_kind)},
          {"regressor_degree", c.regressor_degree},
          {"eta1", c.eta1},
          {"eta2", c.eta2},
          {"max_iters", c.max_iters},
          {"prec", c.prec},
          {"phase1_iters", c.phase1_iters},
          {"phase1_eta", c.phase1_eta},
          {"adagrad_eps", c.adagrad_eps},
          {"seed", c.seed}};
}

TrainConfig config_from(const json& j) {
  TrainConfig c;
  c.p = j.at("p").get<int>();
  c.units = j.at("units").get<int>();
  c.regressor_kind = kind_from(j.at("regressors").get<std::string>());
  c.regressor_degree = j.at("regressor_degree").get<int>();
  c.eta1 = j.at("eta1").get<double>();
  c.eta2 = j.at("eta2").get<double>();
  c.max_iters = j.at("max_iters").get<int>();
  c.prec = j.at("prec").get<double>();
  c.phase1_iters = j.at("phase1_iters").get<int>();
  c.phase1_eta = j.at("phase1_eta").get<double>();
  c.adagrad_eps = j.at("adagrad_eps").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string archive_to_json(const ModelArchive& archive) {
  const FittedModel& m = archive.model;
  json trend = json::array();
  for (const Matrix& part : m.trend.pack()) trend.push_back(matrix_json(part));
  json a_raw = json::array();
  for (const Matrix& a : m.raw_var.a_raw) a_raw.push_back(matrix_json(a));
  json causal_a = json::array();
  for (const Matrix& a : m.causal.a) causal_a.push_back(matrix_json(a));
  json doc = {
      {"format_version", ModelArchive::kFormatVersion},
      {"seed", m.seed},
      {"first_t", archive.first_t},
      {"config", config_json(archive.config)},
      {"regressors",
       {{"kind", kind_name(m.regressors.kind)},
        {"degree", m.regressors.degree},
        {"series_length", m.regressors.series_length}}},
      {"trend_params", trend},
      {"var_params", {{"a_raw", a_raw}, {"l_raw", matrix_json(Matrix(m.raw_var.l_raw))}}},
      // Derived from var_params; informational only, recomputed on load.
      {"causal", {{"a", causal_a}, {"sigma", matrix_json(m.causal.sigma)}}},
      {"final_loglik", m.final_loglik},
      {"iterations_used", m.iterations_used},
      {"converged", m.converged},
  };
  return doc.dump(2) + "\n";
}

ModelArchive archive_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const int version = doc.at("format_version").get<int>();
    if (version != ModelArchive::kFormatVersion) {
      throw Error(ErrorKind::ParseError, "archive: unsupported format version " + std::to_string(version));
    }
    ModelArchive archive;
    archive.config = config_from(doc.at("config"));
    archive.first_t = doc.value("first_t", std::int64_t{1});
    FittedModel& m = archive.model;
    m.seed = doc.at("seed").get<std::uint64_t>();
    const json& reg = doc.at("regressors");
    m.regressors.kind = kind_from(reg.at("kind").get<std::string>());
    m.regressors.degree = reg.at("degree").get<int>();
    m.regressors.series_length = reg.at("series_length").get<Index>();
    std::vector<Matrix> parts;
    for (const json& part : doc.at("trend_params")) parts.push_back(matrix_from(part));
    m.trend = TrendNetParams::unpack(parts);
    const json& var = doc.at("var_params");
    for (const json& a : var.at("a_raw")) m.raw_var.a_raw.push_back(matrix_from(a));
    m.raw_var.l_raw = matrix_from(var.at("l_raw")).col(0);
    m.causal = enforce_causality(m.raw_var);
    m.final_loglik = doc.at("final_loglik").get<double>();
    m.iterations_used = doc.at("iterations_used").get<int>();
    m.converged = doc.at("converged").get<bool>();
    return archive;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("archive: ") + e.what());
  }
}

void save_archive(const std::string& path, const ModelArchive& archive) {
  write_text_file(path, archive_to_json(archive));
}

ModelArchive load_archive(const std::string& path) { return archive_from_json(read_text_file(path)); }

// ---- run configuration ---------------------------------------------------

namespace {

namespace pt = boost::property_tree;

std::vector<double> number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == ";") continue;
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
      throw Error(ErrorKind::InvalidArgument, "config: " + key + " has non-numeric entry '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

Matrix square_from(const std::vector<double>& v, const std::string& key) {
  const auto m = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (m < 1 || static_cast<std::size_t>(m * m) != v.size()) {
    throw Error(ErrorKind::InvalidArgument, "config: " + key + " needs m*m entries (row-major)");
  }
  Matrix out(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) out(i, j) = v[static_cast<std::size_t>(i * m + j)];
  }
  return out;
}

template <typename T>
T get_value(const pt::ptree& node, const std::string& section, const std::string& key) {
  try {
    return node.get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw Error(ErrorKind::InvalidArgument,
                "config: [" + section + "] " + key + " = '" + node.data() + "' has the wrong type");
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("config: ") + e.what());
  }
  RunConfig cfg;
  bool custom_a = false;
  std::vector<std::pair<int, Matrix>> lags;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw Error(ErrorKind::InvalidArgument, "config: key '" + section + "' outside a section");
    }
    for (const auto& [key, node] : body) {
      auto unknown = [&] {
        throw Error(ErrorKind::InvalidArgument, "config: unknown key [" + section + "] " + key);
      };
      if (section == "run") {
        if (key == "seed") cfg.seed = get_value<std::uint64_t>(node, section, key);
        else unknown();
      } else if (section == "train") {
        TrainConfig& t = cfg.train;
        if (key == "p") t.p = get_value<int>(node, section, key);
        else if (key == "units") t.units = get_value<int>(node, section, key);
        else if (key == "regressors") t.regressor_kind = kind_from(node.data());
        else if (key == "regressor_degree") t.regressor_degree = get_value<int>(node, section, key);
        else if (key == "eta1") t.eta1 = get_value<double>(node, section, key);
        else if (key == "eta2") t.eta2 = get_value<double>(node, section, key);
        else if (key == "max_iters") t.max_iters = get_value<int>(node, section, key);
        else if (key == "prec") t.prec = get_value<double>(node, section, key);
        else if (key == "phase1_iters") t.phase1_iters = get_value<int>(node, section, key);
        else if (key == "phase1_eta") t.phase1_eta = get_value<double>(node, section, key);
        else if (key == "adagrad_eps") t.adagrad_eps = get_value<double>(node, section, key);
        else unknown();
      } else if (section == "simulate") {
        SimSettings& s = cfg.sim;
        if (key == "length") s.length = get_value<Index>(node, section, key);
        else if (key == "replications") s.replications = get_value<int>(node, section, key);
        else if (key == "burn_in") s.burn_in = get_value<Index>(node, section, key);
        else if (key == "trend") s.trend = node.data();
        else if (key == "init") {
          if (node.data() == "stationary") s.init = InitMode::Stationary;
          else if (node.data() == "burn_in") s.init = InitMode::BurnIn;
          else throw Error(ErrorKind::InvalidArgument, "config: init must be stationary or burn_in");
        } else if (key == "sigma") {
          s.causal.sigma = square_from(number_list(node.data(), key), key);
        } else if (key.size() > 1 && key[0] == 'a' &&
                   key.find_first_not_of("0123456789", 1) == std::string::npos) {
          custom_a = true;
          lags.emplace_back(std::stoi(key.substr(1)), square_from(number_list(node.data(), key), key));
        } else {
          unknown();
        }
      } else if (section == "forecast") {
        if (key == "horizon") cfg.horizon = get_value<Index>(node, section, key);
        else if (key == "level") cfg.forecast.level = get_value<double>(node, section, key);
        else if (key == "rounded_z") cfg.forecast.rounded_z = get_value<bool>(node, section, key);
        else unknown();
      } else if (section == "evaluate") {
        EvalConfig& e = cfg.eval;
        if (key == "alpha") e.alpha = get_value<double>(node, section, key);
        else if (key == "seasonality") e.seasonality = get_value<int>(node, section, key);
        else if (key == "origins") e.origins = get_value<int>(node, section, key);
        else if (key == "window") e.window = get_value<Index>(node, section, key);
        else if (key == "horizons") {
          e.horizons.clear();
          for (double h : number_list(node.data(), key)) {
            if (h != std::floor(h)) throw Error(ErrorKind::InvalidArgument, "config: horizons must be integers");
            e.horizons.push_back(static_cast<int>(h));
          }
        } else {
          unknown();
        }
      } else {
        throw Error(ErrorKind::InvalidArgument, "config: unknown section [" + section + "]");
      }
    }
  }
  if (custom_a) {
    std::sort(lags.begin(), lags.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    cfg.sim.causal.a.clear();
    for (std::size_t i = 0; i < lags.size(); ++i) {
      if (lags[i].first != static_cast<int>(i) + 1) {
        throw Error(ErrorKind::InvalidArgument, "config: coefficient keys must be a1..ap without gaps");
      }
      cfg.sim.causal.a.push_back(lags[i].second);
    }
  }
  for (const Matrix& a : cfg.sim.causal.a) {
    if (a.rows() != cfg.sim.causal.sigma.rows()) {
      throw Error(ErrorKind::InvalidArgument, "config: coefficient and sigma sizes differ");
    }
  }
  cfg.train.seed = cfg.seed;
  return cfg;
}

RunConfig read_run_config(const std::string& path) { return parse_run_config(read_text_file(path)); }

}  // namespace trendvar
