#include "enso/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace enso {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stoi(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

const std::vector<std::string> kValueColumns = {"nino3", "nino4", "hW", "u", "tau"};

bool is_value_column(const std::string& name) {
  return std::find(kValueColumns.begin(), kValueColumns.end(), name) !=
         kValueColumns.end();
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
IndexDataset load_index_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path);
  const auto header = split_csv_line(line);

  int date_col = -1, year_col = -1, month_col = -1;
  std::map<int, std::string> value_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& h = header[j];
    if (h == "date") date_col = static_cast<int>(j);
    else if (h == "year") year_col = static_cast<int>(j);
    else if (h == "month") month_col = static_cast<int>(j);
    else if (is_value_column(h)) value_cols[static_cast<int>(j)] = h;
    else if (h == "time_nondim" || h.empty()) {
      // ignore
    } else {
      throw ParseError("unrecognized column '" + h + "' in " + path, 1);
    }
  }
  if (date_col < 0 && (year_col < 0 || month_col < 0))
    throw ParseError("missing date columns (need `date` or `year`+`month`)", 1);

  IndexDataset ds;
  for (const auto& [j, name] : value_cols) ds.columns[name] = {};

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    int year = 0, month = 0;
    if (date_col >= 0) {
      if (date_col >= static_cast<int>(fields.size()))
        throw ParseError("missing date field", line_no);
      const std::string& d = fields[date_col];
      // ISO yyyy-mm or yyyy-mm-dd
      if (d.size() < 7 || d[4] != '-' || !parse_int(d.substr(0, 4), year) ||
          !parse_int(d.substr(5, 2), month))
        throw ParseError("unparseable date '" + d + "'", line_no);
    } else {
      if (year_col >= static_cast<int>(fields.size()) ||
          month_col >= static_cast<int>(fields.size()) ||
          !parse_int(fields[year_col], year) || !parse_int(fields[month_col], month))
        throw ParseError("unparseable year/month", line_no);
    }
    if (month < 1 || month > 12) throw ParseError("month out of range", line_no);
    if (!ds.years.empty()) {
      const long prev = static_cast<long>(ds.years.back()) * 12 + ds.months.back();
      const long cur = static_cast<long>(year) * 12 + month;
      if (cur == prev) throw ParseError("duplicate month", line_no);
      if (cur < prev) throw ParseError("non-increasing dates", line_no);
    }
    ds.years.push_back(year);
    ds.months.push_back(month);
    for (const auto& [j, name] : value_cols) {
      double v = std::nan("");
      if (j < static_cast<int>(fields.size()) && !fields[j].empty()) {
        if (!parse_double(fields[j], v))
          throw ParseError("unparseable value in column " + name, line_no);
      } else {
        throw ParseError("missing value in column " + name, line_no);
      }
      ds.columns[name].push_back(v);
    }
  }
  if (ds.n_rows() == 0) throw ParseError("no data rows in " + path);
  return ds;
}

void write_index_csv(const IndexDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "year,month";
  std::vector<std::string> names;
  for (const auto& [name, col] : dataset.columns) names.push_back(name);
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (int k = 0; k < dataset.n_rows(); ++k) {
    out << dataset.years[k] << "," << dataset.months[k];
    for (const auto& n : names) out << "," << format_full(dataset.columns.at(n)[k]);
    out << "\n";
  }
}

IndexDataset compute_anomalies(const IndexDataset& dataset, const YearRange& span) {
  if (dataset.n_rows() == 0) throw DataLengthError("empty dataset");
  if (span.last - span.first + 1 < 10)
    throw ConfigError("climatology span must cover >= 10 years");
  if (span.first < dataset.years.front() || span.last > dataset.years.back())
    throw ConfigError("climatology span outside data range");

  IndexDataset out = dataset;
  for (auto& [name, col] : out.columns) {
    double sums[12] = {0};
    double counts[12] = {0};
    for (int k = 0; k < dataset.n_rows(); ++k) {
      if (dataset.years[k] < span.first || dataset.years[k] > span.last) continue;
      sums[dataset.months[k] - 1] += col[k];
      counts[dataset.months[k] - 1] += 1.0;
    }
    for (int k = 0; k < dataset.n_rows(); ++k) {
      const int m = dataset.months[k] - 1;
      if (counts[m] > 0.0) col[k] -= sums[m] / counts[m];
    }
  }
  return out;
}

namespace {
struct ColumnMapping {
  const char* model_var;
  const char* csv_column;
  Quantity quantity;
};
const ColumnMapping kMappings[] = {
    {"u", "u", Quantity::u},     {"hW", "hW", Quantity::h},
    {"TC", "nino4", Quantity::T}, {"TE", "nino3", Quantity::T},
    {"tau", "tau", Quantity::tau},
};
}  // namespace

Trajectory to_model_units(const IndexDataset& dataset,
                          const std::vector<std::string>& vars) {
  for (int k = 1; k < dataset.n_rows(); ++k) {
    const long prev = static_cast<long>(dataset.years[k - 1]) * 12 + dataset.months[k - 1];
    const long cur = static_cast<long>(dataset.years[k]) * 12 + dataset.months[k];
    if (cur != prev + 1)
      throw ConfigError("dataset has missing months; cannot form a trajectory");
  }

  Trajectory traj;
  traj.vars = StateVarSet(vars);
  traj.calendar_offset_months = dataset.months.front() - 1;
  traj.times.resize(dataset.n_rows());
  for (int k = 0; k < dataset.n_rows(); ++k) traj.times[k] = kMonthNondim * k;
  traj.values.resize(dataset.n_rows(), traj.vars.size());

  for (int j = 0; j < traj.vars.size(); ++j) {
    const std::string& var = traj.vars.name(j);
    const ColumnMapping* mapping = nullptr;
    for (const auto& m : kMappings)
      if (var == m.model_var) mapping = &m;
    if (!mapping) throw CatalogError("unknown model variable " + var);
    if (!dataset.has(mapping->csv_column))
      throw CatalogError("dataset lacks column " + std::string(mapping->csv_column) +
                         " required for " + var);
    const auto& col = dataset.columns.at(mapping->csv_column);
    for (int k = 0; k < dataset.n_rows(); ++k)
      traj.values(k, j) = convert_units(col[k], mapping->quantity, UnitDirection::ToNonDim);
  }
  return traj;
}

MonthlySeries monthly_series_from_dataset(const IndexDataset& dataset,
                                          const std::string& column) {
  if (!dataset.has(column)) throw CatalogError("dataset lacks column " + column);
  for (int k = 1; k < dataset.n_rows(); ++k) {
    const long prev = static_cast<long>(dataset.years[k - 1]) * 12 + dataset.months[k - 1];
    if (static_cast<long>(dataset.years[k]) * 12 + dataset.months[k] != prev + 1)
      throw ConfigError("dataset has missing months");
  }
  MonthlySeries s;
  s.values = dataset.columns.at(column);
  s.start_month = dataset.months.front() - 1;
  s.start_year = dataset.years.front();
  s.name = column;
  s.celsius = column == "nino3" || column == "nino4";
  return s;
}

// ---------------------------------------------------------------------------
void write_trajectory_csv(const Trajectory& traj, const std::string& csv_path,
                          const std::string& sidecar_path,
                          Variant variant, double dt, std::uint64_t seed) {
  std::ofstream out(csv_path);
  if (!out) throw ParseError("cannot write " + csv_path);
  out << "time_nondim";
  for (const auto& n : traj.vars.names()) out << "," << n;
  out << "\n";
  for (int k = 0; k < traj.n_samples(); ++k) {
    out << format_full(traj.times[k]);
    for (int j = 0; j < traj.vars.size(); ++j)
      out << "," << format_full(traj.values(k, j));
    out << "\n";
  }
  if (!sidecar_path.empty()) {
    json meta;
    meta["variant_id"] = variant_name(variant);
    meta["dt"] = dt;
    meta["seed"] = seed;
    meta["calendar_offset_months"] = traj.calendar_offset_months;
    write_text_file(sidecar_path, meta.dump(2) + "\n");
  }
}

Trajectory load_trajectory_csv(const std::string& csv_path,
                               const std::string& sidecar_path) {
  std::ifstream in(csv_path);
  if (!in) throw ParseError("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + csv_path);
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "time_nondim")
    throw ParseError("trajectory CSV must start with time_nondim", 1);

  Trajectory traj;
  traj.vars = StateVarSet(std::vector<std::string>(header.begin() + 1, header.end()));
  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("wrong field count", line_no);
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j)
      if (!parse_double(fields[j], row[j]))
        throw ParseError("unparseable number '" + fields[j] + "'", line_no);
    rows.push_back(std::move(row));
  }
  traj.times.resize(rows.size());
  traj.values.resize(rows.size(), traj.vars.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    traj.times[k] = rows[k][0];
    for (int j = 0; j < traj.vars.size(); ++j) traj.values(k, j) = rows[k][j + 1];
  }
  if (!sidecar_path.empty()) {
    const json meta = json::parse(read_text_file(sidecar_path));
    traj.calendar_offset_months = meta.value("calendar_offset_months",
                                             kDefaultCalendarOffsetMonths);
  }
  return traj;
}

// ---------------------------------------------------------------------------
namespace {

json term_to_json(const Term& term, const StateVarSet& vars) {
  json j;
  j["coefficient"] = term.coefficient;
  json exps = json::object();
  for (const auto& [v, p] : term.monomial.exponents()) exps[vars.name(v)] = p;
  j["exponents"] = exps;
  j["seasonal"] = seasonal_name(term.seasonal);
  return j;
}

Term term_from_json(const json& j, const StateVarSet& vars) {
  Term term;
  term.coefficient = j.at("coefficient").get<double>();
  std::vector<std::pair<int, int>> exps;
  for (const auto& [name, pow] : j.at("exponents").items()) {
    const int v = vars.index_of(name);
    if (v < 0) throw ParseError("term references unknown variable " + name);
    exps.emplace_back(v, pow.get<int>());
  }
  term.monomial = Monomial(std::move(exps));
  term.seasonal = seasonal_from_name(j.value("seasonal", "const"));
  return term;
}

json noise_to_json(const NoiseSpec& spec, const StateVarSet& vars) {
  json j;
  if (const auto* a = std::get_if<AdditiveNoise>(&spec)) {
    j["type"] = "additive";
    j["sigma"] = a->sigma;
  } else if (const auto* w = std::get_if<WindMultiplicativeNoise>(&spec)) {
    j["type"] = "wind_multiplicative";
    j["a"] = w->a;
    j["b"] = w->b;
    j["c"] = w->c;
    j["driver"] = vars.name(w->driver_var);
  } else {
    const auto& d = std::get<DecadalMultiplicativeNoise>(spec);
    j["type"] = "decadal_multiplicative";
    j["lambda"] = d.lambda;
    j["lower"] = d.lower;
    j["upper"] = d.upper;
    j["driver"] = vars.name(d.driver_var);
  }
  return j;
}

NoiseSpec noise_from_json(const json& j, const StateVarSet& vars) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "additive") return AdditiveNoise{j.at("sigma").get<double>()};
  const int driver = vars.index_of(j.at("driver").get<std::string>());
  if (driver < 0) throw ParseError("noise driver unknown");
  if (type == "wind_multiplicative")
    return WindMultiplicativeNoise{j.at("a").get<double>(), j.at("b").get<double>(),
                                   j.at("c").get<double>(), driver};
  if (type == "decadal_multiplicative")
    return DecadalMultiplicativeNoise{j.at("lambda").get<double>(),
                                      j.at("lower").get<double>(),
                                      j.at("upper").get<double>(), driver};
  throw ParseError("unknown noise type " + type);
}

}  // namespace

std::string model_to_json(const ModelSpec& model) {
  json j;
  j["variant_id"] = variant_name(model.variant_id);
  j["vars"] = model.vars.names();
  json eqs = json::array();
  for (int i = 0; i < model.vars.size(); ++i) {
    json terms = json::array();
    for (const auto& term : model.equations[i]) terms.push_back(term_to_json(term, model.vars));
    eqs.push_back({{"variable", model.vars.name(i)}, {"terms", terms},
                   {"noise", noise_to_json(model.noise[i], model.vars)}});
  }
  j["equations"] = eqs;
  return j.dump(2) + "\n";
}

ModelSpec model_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid model JSON: ") + e.what());
  }
  ModelSpec model;
  model.variant_id = variant_from_name(j.value("variant_id", "Custom"));
  model.vars = StateVarSet(j.at("vars").get<std::vector<std::string>>());
  const auto& eqs = j.at("equations");
  if (static_cast<int>(eqs.size()) != model.vars.size())
    throw ParseError("equation count does not match variable count");
  model.equations.resize(model.vars.size());
  model.noise.resize(model.vars.size(), AdditiveNoise{0.0});
  for (const auto& eq : eqs) {
    const int i = model.vars.index_of(eq.at("variable").get<std::string>());
    if (i < 0) throw ParseError("equation for unknown variable");
    for (const auto& tj : eq.at("terms")) model.equations[i].push_back(term_from_json(tj, model.vars));
    model.noise[i] = noise_from_json(eq.at("noise"), model.vars);
  }
  model.validate();
  return model;
}

void save_model(const ModelSpec& model, const std::string& path) {
  write_text_file(path, model_to_json(model));
}

ModelSpec load_model(const std::string& path) {
  return model_from_json(read_text_file(path));
}

std::string library_manifest_json(const FunctionLibrary& library) {
  json j;
  j["vars"] = library.vars.names();
  json entries = json::array();
  for (int m = 0; m < library.size(); ++m) {
    const auto& e = library.entries[m];
    json exps = json::object();
    for (const auto& [v, p] : e.monomial.exponents()) exps[library.vars.name(v)] = p;
    entries.push_back({{"id", m},
                       {"label", library.label(m)},
                       {"exponents", exps},
                       {"seasonal", seasonal_name(e.seasonal)}});
  }
  j["entries"] = entries;
  return j.dump(2) + "\n";
}

std::string fit_to_json(const FitResult& fit) {
  json j;
  json eqs = json::array();
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
    json terms = json::array();
    for (const auto& [entry, coeff] : fit.coefficients[i])
      terms.push_back({{"candidate", fit.library.label(entry)},
                       {"candidate_id", entry},
                       {"coefficient", coeff}});
    eqs.push_back({{"variable", fit.equation_vars.name(static_cast<int>(i))},
                   {"terms", terms},
                   {"sigma", fit.noise_sigmas[static_cast<long>(i)]},
                   {"residual_rms", fit.residual_rms[static_cast<long>(i)]},
                   {"residual_lag1_autocorr", fit.residual_lag1[static_cast<long>(i)]}});
  }
  j["equations"] = eqs;
  j["sample_dt"] = fit.sample_dt;
  return j.dump(2) + "\n";
}

void write_cem_csv(const CausationEntropyMatrix& cem, const StructurePattern* pattern,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "equation";
  for (int m = 0; m < cem.library.size(); ++m) out << "," << cem.library.label(m);
  out << "\n";
  for (int i = 0; i < cem.values.rows(); ++i) {
    out << cem.equation_names[i];
    for (int m = 0; m < cem.values.cols(); ++m) out << "," << format_full(cem.values(i, m));
    out << "\n";
  }
  if (pattern) {
    for (int i = 0; i < pattern->mask.rows(); ++i) {
      out << "mask:" << cem.equation_names[i];
      for (int m = 0; m < pattern->mask.cols(); ++m)
        out << "," << (pattern->mask(i, m) ? 1 : 0);
      out << "\n";
    }
  }
}

void write_posterior_csv(const PosteriorSeries& post, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << "time,var,mean,std\n";
  for (std::size_t k = 0; k < post.times.size(); ++k)
    for (int j = 0; j < post.hidden_vars.size(); ++j)
      out << format_full(post.times[k]) << "," << post.hidden_vars.name(j) << ","
          << format_full(post.mean(k, j)) << "," << format_full(post.std(k, j)) << "\n";
}

}  // namespace enso
