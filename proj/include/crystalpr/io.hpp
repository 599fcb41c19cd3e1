#pragma once

// JSON (nlohmann) encodings of the public types and a small CSV writer
// whose first line is "# " followed by compact JSON metadata.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crystalpr/datagen.hpp"
#include "crystalpr/diffsets.hpp"
#include "crystalpr/solvers.hpp"
#include "crystalpr/symmetry.hpp"
#include "crystalpr/verify.hpp"

namespace crystalpr {

using json = nlohmann::json;

inline json group_json(const AbelianGroup& g) { return g.moduli(); }

inline AbelianGroup group_from_json(const json& j) { return AbelianGroup(j.get<std::vector<int>>()); }

inline json complex_array_json(std::span<const Complex> v, Field field)
{
  json re = json::array(), im = json::array();
  for (const auto& c : v) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  json out{{"re", re}};
  if (field == Field::Complex) out["im"] = im;
  return out;
}

inline std::vector<Complex> complex_array_from_json(const json& j)
{
  const auto re = j.at("re").get<std::vector<double>>();
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
  if (im.size() != re.size()) throw std::invalid_argument("complex array: re/im length mismatch");
  std::vector<Complex> out(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) out[i] = Complex{re[i], im[i]};
  return out;
}

inline json to_json_value(const Signal& x)
{
  json j = complex_array_json(x.values(), x.field());
  j["group"] = group_json(x.group());
  j["field"] = to_string(x.field());
  return j;
}

inline Signal signal_from_json(const json& j)
{
  return Signal(group_from_json(j.at("group")), field_from_string(j.at("field").get<std::string>()),
                complex_array_from_json(j));
}

inline json to_json_value(const SupportSet& s) { return json{{"group", group_json(s.group())}, {"indices", s.indices()}}; }

inline SupportSet support_from_json(const json& j)
{
  return SupportSet(group_from_json(j.at("group")), j.at("indices").get<std::vector<std::size_t>>());
}

inline json to_json_value(const FourierMagnitude& y) { return json{{"group", group_json(y.group)}, {"values", y.values}}; }

inline FourierMagnitude magnitude_from_json(const json& j)
{
  return FourierMagnitude{group_from_json(j.at("group")), j.at("values").get<std::vector<double>>()};
}

inline json to_json_value(const Autocorrelation& a)
{
  json j = complex_array_json(a.values, a.field);
  j["group"] = group_json(a.group);
  j["field"] = to_string(a.field);
  return j;
}

inline json to_json_value(const SymmetryElement& g)
{
  return json{{"phase", {g.phase.real(), g.phase.imag()}}, {"shift", g.shift}, {"reflect", g.reflect}};
}

inline json to_json_value(const PlantedInstance& p)
{
  json j{{"x_true", to_json_value(p.x_true)},
         {"y0", to_json_value(p.y0)},
         {"support", p.support.indices()},
         {"seed", p.seed},
         {"noise", nullptr}};
  if (p.photon_scale) j["noise"] = json{{"photon_scale", *p.photon_scale}};
  return j;
}

inline PlantedInstance planted_from_json(const json& j)
{
  PlantedInstance p{signal_from_json(j.at("x_true")), magnitude_from_json(j.at("y0")), {}, j.at("seed").get<std::uint64_t>(),
                    std::nullopt};
  p.support = SupportSet(p.x_true.group(), j.at("support").get<std::vector<std::size_t>>());
  if (!j.at("noise").is_null()) p.photon_scale = j.at("noise").at("photon_scale").get<double>();
  return p;
}

inline json to_json_value(const Stabilizer& st)
{
  json elems = json::array();
  for (const auto& g : st.elements) elems.push_back(to_json_value(g));
  return json{{"support", st.support.indices()},
              {"field", to_string(st.field)},
              {"order", st.order()},
              {"circle_factor", st.has_circle_factor()},
              {"elements", elems}};
}

inline json to_json_value(const SolverConfig& c)
{
  return json{{"variant", to_string(c.variant)}, {"beta", c.beta},           {"max_iter", c.max_iter},
              {"success_tol", c.success_tol},    {"eta_tol", c.eta_tol},     {"seed", c.seed},
              {"record_trajectory", c.record_trajectory}, {"trajectory_stride", c.trajectory_stride}};
}

/// Overrides the fields present in `j`; unknown keys are rejected.
inline void apply_json(SolverConfig& c, const json& j)
{
  for (const auto& [key, v] : j.items()) {
    if (key == "variant")
      c.variant = variant_from_string(v.get<std::string>());
    else if (key == "beta")
      c.beta = v.get<double>();
    else if (key == "max_iter")
      c.max_iter = v.get<std::uint64_t>();
    else if (key == "success_tol")
      c.success_tol = v.get<double>();
    else if (key == "eta_tol")
      c.eta_tol = v.get<double>();
    else if (key == "seed")
      c.seed = v.get<std::uint64_t>();
    else if (key == "record_trajectory")
      c.record_trajectory = v.get<bool>();
    else if (key == "trajectory_stride")
      c.trajectory_stride = v.get<std::uint64_t>();
    else
      throw std::invalid_argument("unknown solver config key '" + key + "'");
  }
  c.validate();
}

inline json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json_value(const SolveResult& r)
{
  return json{{"estimate", to_json_value(r.estimate)}, {"iterations", r.iterations},
              {"converged", r.converged},              {"stagnated", r.stagnated},
              {"final_error", nan_to_null(r.final_error)}, {"final_eta", r.final_eta}};
}

inline json to_json_value(const TransversalityReport& r)
{
  json comps = json::array();
  for (const auto& c : r.components) {
    json rows = json::array();
    for (const auto& p : c.per_sprime)
      rows.push_back(json{{"Sprime", p.sprime.indices()}, {"rank", p.rank}, {"full", p.full}, {"draw", p.draw}});
    comps.push_back(json{{"component", c.component}, {"witness_phases", c.witness_phases}, {"per_Sprime", rows}});
  }
  return json{{"S", r.support.indices()},
              {"group", group_json(r.support.group())},
              {"field", to_string(r.field)},
              {"draws_per_component", r.draws_per_component},
              {"components", comps},
              {"verdict", r.verdict}};
}

inline json to_json_value(const FiberSearchReport& r)
{
  json sols = json::array();
  for (const auto& s : r.solutions)
    sols.push_back(json{{"xprime", to_json_value(s.xprime)},
                        {"residual", s.residual},
                        {"class", s.intrinsic ? "intrinsic" : "extra"},
                        {"witness", to_json_value(s.witness)},
                        {"distance", s.distance},
                        {"hits", s.hits}});
  return json{{"S", r.support.indices()},          {"Sprime", r.sprime.indices()},
              {"x", to_json_value(r.x)},           {"starts", r.starts},
              {"converged_starts", r.converged_starts}, {"solution_starts", r.solution_starts},
              {"solutions", sols},                 {"verdict", to_string(r.verdict)}};
}

inline json to_json_value(const KempermanReport& r)
{
  json ce = json::array();
  for (const auto& s : r.counterexamples) ce.push_back(s.indices());
  return json{{"N", r.n},
              {"max_K", r.max_k},
              {"subsets_checked", r.subsets_checked},
              {"counterexample_count", r.counterexample_count},
              {"counterexamples", ce},
              {"holds", r.holds()}};
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest text that reads back to the same double.
inline std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

class CsvWriter {
public:
  CsvWriter(std::ostream& out, const json& meta, const std::vector<std::string>& columns) : out_(out), ncol_(columns.size())
  {
    out_ << "# " << meta.dump() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  CsvWriter& cell(const std::string& s)
  {
    out_ << (col_++ ? "," : "") << s;
    return *this;
  }
  CsvWriter& cell(double v) { return cell(format_double(v)); }
  CsvWriter& cell(std::uint64_t v) { return cell(std::to_string(v)); }
  CsvWriter& cell(int v) { return cell(std::to_string(v)); }

  void end_row()
  {
    if (col_ != ncol_) throw std::logic_error("CsvWriter: row has " + std::to_string(col_) + " cells, expected " + std::to_string(ncol_));
    out_ << '\n';
    col_ = 0;
  }

private:
  std::ostream& out_;
  std::size_t ncol_;
  std::size_t col_ = 0;
};

struct CsvTable {
  json meta;  // null when there is no metadata line
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::ptrdiff_t column(const std::string& name) const
  {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvTable read_csv(std::istream& in)
{
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (t.meta.is_null()) t.meta = json::parse(line.substr(1), nullptr, false);
      continue;
    }
    auto cells = split_csv_line(line);
    if (!header) {
      t.columns = std::move(cells);
      header = true;
    } else {
      if (cells.size() != t.columns.size()) throw std::invalid_argument("CSV row width does not match header");
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

}  // namespace crystalpr
