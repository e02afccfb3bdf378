#include "stmon/harness/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stmon/error.hpp"

namespace stmon::harness {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, end);
}

double parse_double(const std::string &text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error("not a number: '" + text + "'");
  return v;
}

std::string slurp_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("write failed on " + path);
}

namespace {

std::vector<std::string> split(const std::string &line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_trace_csv(const std::string &path, const stl::Trace &tr) {
  std::ostringstream out;
  const std::size_t dim = tr.states.empty() ? 0 : tr.states.front().size();
  out << "t";
  for (std::size_t i = 1; i <= dim; ++i) out << ",x" << i;
  out << "\n";
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    out << tr.start + static_cast<int>(k);
    for (double v : tr.states[k]) out << "," << format_double(v);
    out << "\n";
  }
  spit_file(path, out.str());
}

stl::Trace read_trace_csv(const std::string &path) {
  std::istringstream in(slurp_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty trace file");
  const std::size_t columns = split(line, ',').size();
  if (columns < 2) throw Error(path + ": trace header needs t and at least one coordinate");
  stl::Trace tr;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != columns) throw Error(path + ": ragged trace row '" + line + "'");
    int t = static_cast<int>(parse_double(cells[0]));
    if (first) {
      tr.start = t;
      first = false;
    } else if (t != tr.end() + 1) {
      throw Error(path + ": trace instants must be consecutive");
    }
    geom::Vec x;
    for (std::size_t i = 1; i < cells.size(); ++i) x.push_back(parse_double(cells[i]));
    tr.states.push_back(std::move(x));
  }
  if (tr.states.empty()) throw Error(path + ": trace has no rows");
  return tr;
}

namespace {

json region_to_json(const geom::Region &r) {
  json parts = json::array();
  for (const geom::ConvexPolytope &p : r.parts) {
    json a = json::array();
    json b = json::array();
    for (const geom::Halfspace &h : p.facets) {
      a.push_back(h.normal);
      b.push_back(h.offset);
    }
    parts.push_back({{"A", std::move(a)}, {"b", std::move(b)}});
  }
  return {{"dim", r.dim}, {"parts", std::move(parts)}};
}

geom::Region region_from_json(const json &j) {
  if (j.contains("box")) {
    std::vector<std::pair<double, double>> bounds;
    for (const auto &iv : j.at("box")) {
      if (!iv.is_array() || iv.size() != 2) throw Error("box intervals must be [lo, hi] pairs");
      bounds.emplace_back(iv[0].get<double>(), iv[1].get<double>());
    }
    return geom::Region::box(bounds);
  }
  const int dim = j.at("dim").get<int>();
  std::vector<geom::ConvexPolytope> parts;
  for (const auto &jp : j.at("parts")) {
    geom::ConvexPolytope p;
    p.dim = dim;
    const auto &a = jp.at("A");
    const auto &b = jp.at("b");
    if (a.size() != b.size()) throw Error("region part has mismatched A and b lengths");
    for (std::size_t i = 0; i < a.size(); ++i) {
      geom::Halfspace h;
      h.normal = a[i].get<geom::Vec>();
      if (static_cast<int>(h.normal.size()) != dim)
        throw Error("region facet dimension mismatch");
      h.offset = b[i].get<double>();
      p.facets.push_back(std::move(h));
    }
    parts.push_back(std::move(p));
  }
  return geom::Region::from_parts(dim, std::move(parts));
}

json mat_to_json(const geom::Mat &m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

geom::Mat mat_from_json(const json &j) {
  const int rows = static_cast<int>(j.size());
  if (rows == 0) throw Error("matrix needs at least one row");
  const int cols = static_cast<int>(j.at(0).size());
  geom::Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(i).size()) != cols) throw Error("ragged matrix rows");
    for (int k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

}  // namespace

std::string region_to_json_text(const geom::Region &r) { return region_to_json(r).dump(2); }

geom::Region region_from_json_text(const std::string &text) {
  return region_from_json(json::parse(text));
}

int Scenario::state_dim() const {
  if (affine) return affine->state_dim();
  if (grid) return grid->dim();
  throw Error("scenario has no system");
}

stl::SymbolTable Scenario::symbols() const {
  stl::SymbolTable sym = stl::default_symbols(state_dim());
  for (const auto &[name, region] : regions) sym.regions[name] = region;
  return sym;
}

stl::StlSpec Scenario::parse() const { return stl::parse_spec(formula, state_dim(), symbols()); }

Scenario scenario_of_model(const Model &m, const geom::Vec &initial,
                           const std::vector<geom::Vec> &inputs) {
  Scenario s;
  s.name = m.name;
  s.affine = m.sys;
  // Only the named regions travel; the coordinate aliases are rebuilt from the
  // dimension on load.
  s.regions = m.symbols.regions;
  s.formula = m.formula;
  s.t_max = m.t_max;
  s.initial = initial;
  s.inputs = inputs;
  return s;
}

std::string scenario_to_json_text(const Scenario &s) {
  json j;
  j["name"] = s.name;
  if (s.affine) {
    j["system"] = {{"type", "affine"},
                   {"A", mat_to_json(s.affine->A)},
                   {"B", mat_to_json(s.affine->B)},
                   {"c", s.affine->c},
                   {"domain", region_to_json(s.affine->domain)},
                   {"input", region_to_json(s.affine->input)}};
  } else if (s.grid) {
    json cells = json::array();
    for (const geom::Vec &p : s.grid->cells) cells.push_back(p);
    j["system"] = {{"type", "grid"},
                   {"cells", std::move(cells)},
                   {"succ", s.grid->succ},
                   {"initial_cell", s.grid->initial},
                   {"domain", region_to_json(s.grid->domain)}};
  } else {
    throw Error("scenario has no system");
  }
  json regions = json::object();
  for (const auto &[name, region] : s.regions) regions[name] = region_to_json(region);
  j["regions"] = std::move(regions);
  j["formula"] = s.formula;
  j["t_max"] = s.t_max;
  j["initial"] = s.initial;
  json inputs = json::array();
  for (const geom::Vec &u : s.inputs) inputs.push_back(u);
  j["inputs"] = std::move(inputs);
  j["part_budget"] = s.part_budget;
  return j.dump(2) + "\n";
}

Scenario scenario_from_json_text(const std::string &text) {
  json j = json::parse(text);
  Scenario s;
  s.name = j.at("name").get<std::string>();
  const json &sys = j.at("system");
  const std::string type = sys.at("type").get<std::string>();
  if (type == "affine") {
    geom::AffineSystem a;
    a.A = mat_from_json(sys.at("A"));
    a.B = mat_from_json(sys.at("B"));
    a.c = sys.at("c").get<geom::Vec>();
    a.domain = region_from_json(sys.at("domain"));
    a.input = region_from_json(sys.at("input"));
    if (a.A.rows != a.A.cols || a.A.rows != a.B.rows ||
        a.A.rows != static_cast<int>(a.c.size()) || a.domain.dim != a.A.rows ||
        a.input.dim != a.B.cols)
      throw Error("scenario system dimensions are inconsistent");
    s.affine = std::move(a);
  } else if (type == "grid") {
    backend::GridSystem g;
    for (const auto &p : sys.at("cells")) g.cells.push_back(p.get<geom::Vec>());
    g.succ = sys.at("succ").get<std::vector<std::vector<int>>>();
    g.initial = sys.at("initial_cell").get<int>();
    g.domain = region_from_json(sys.at("domain"));
    if (g.succ.size() != g.cells.size() || g.initial < 0 || g.initial >= g.size())
      throw Error("scenario grid is inconsistent");
    s.grid = std::move(g);
  } else {
    throw Error("unknown system type '" + type + "'");
  }
  for (const auto &[name, region] : j.at("regions").items())
    s.regions[name] = region_from_json(region);
  s.formula = j.at("formula").get<std::string>();
  s.t_max = j.at("t_max").get<int>();
  s.initial = j.at("initial").get<geom::Vec>();
  if (j.contains("inputs"))
    for (const auto &u : j.at("inputs")) s.inputs.push_back(u.get<geom::Vec>());
  if (j.contains("part_budget")) s.part_budget = j.at("part_budget").get<std::size_t>();
  for (const auto &[name, region] : s.regions)
    if (region.dim != s.state_dim()) throw Error("region '" + name + "' dimension mismatch");
  if (static_cast<int>(s.initial.size()) != s.state_dim())
    throw Error("initial state dimension mismatch");
  return s;
}

Scenario load_scenario(const std::string &path) {
  try {
    return scenario_from_json_text(slurp_file(path));
  } catch (const json::exception &e) {
    throw Error(path + ": " + e.what());
  }
}

void save_scenario(const std::string &path, const Scenario &s) {
  spit_file(path, scenario_to_json_text(s));
}

namespace {

std::string layer_key(int t, stl::IndexSet I) {
  std::string key = std::to_string(t) + ":";
  bool first = true;
  for (int i : I.members()) {
    if (!first) key += ",";
    key += std::to_string(i);
    first = false;
  }
  return key;
}

std::pair<int, stl::IndexSet> parse_layer_key(const std::string &key) {
  const std::size_t colon = key.find(':');
  if (colon == std::string::npos) throw Error("bad table key '" + key + "'");
  int t = static_cast<int>(parse_double(key.substr(0, colon)));
  stl::IndexSet I;
  std::string rest = key.substr(colon + 1);
  for (const std::string &tok : split(rest, ','))
    if (!tok.empty()) I.insert(static_cast<int>(parse_double(tok)));
  return {t, I};
}

json cellset_to_json(const backend::CellSet &s) { return {{"cells", s.cells}}; }

template <class B, class SetToJson>
std::string table_to_json_impl(const feasible::FeasibleTable<B> &tab, SetToJson &&set_to_json) {
  json entries = json::object();
  for (std::size_t t = 0; t < tab.layers.size(); ++t)
    for (const auto &[I, set] : tab.layers[t])
      entries[layer_key(static_cast<int>(t), I)] = set_to_json(set);
  json j = {{"spec_hash", std::to_string(tab.spec_hash)},
            {"horizon", tab.horizon},
            {"mode", tab.mode == feasible::PendingCellMode::Relaxed ? "relaxed" : "literal"},
            {"entries", std::move(entries)}};
  return j.dump() + "\n";
}

template <class B, class SetFromJson>
std::optional<feasible::FeasibleTable<B>> table_from_json_impl(const std::string &text,
                                                               const stl::StlSpec &spec,
                                                               SetFromJson &&set_from_json) {
  json j = json::parse(text);
  if (j.at("spec_hash").get<std::string>() != std::to_string(stl::spec_content_hash(spec)))
    return std::nullopt;
  feasible::FeasibleTable<B> tab;
  tab.spec = spec;
  tab.spec_hash = stl::spec_content_hash(spec);
  tab.horizon = j.at("horizon").get<int>();
  tab.mode = j.at("mode").get<std::string>() == "literal" ? feasible::PendingCellMode::Literal
                                                          : feasible::PendingCellMode::Relaxed;
  if (tab.horizon != spec.horizon) return std::nullopt;
  tab.layers.resize(static_cast<std::size_t>(tab.horizon) + 1);
  for (const auto &[key, value] : j.at("entries").items()) {
    auto [t, I] = parse_layer_key(key);
    if (t < 0 || t > tab.horizon) throw Error("table key out of range: '" + key + "'");
    tab.layers[static_cast<std::size_t>(t)].emplace(I, set_from_json(value));
  }
  return tab;
}

}  // namespace

std::string table_to_json_text(const feasible::FeasibleTable<backend::ContinuousBackend> &tab) {
  return table_to_json_impl(tab, [](const geom::Region &r) { return region_to_json(r); });
}

std::string table_to_json_text(const feasible::FeasibleTable<backend::GridBackend> &tab) {
  return table_to_json_impl(tab, [](const backend::CellSet &s) { return cellset_to_json(s); });
}

std::optional<feasible::FeasibleTable<backend::ContinuousBackend>> table_from_json_text(
    const std::string &text, const backend::ContinuousBackend &bk, const stl::StlSpec &spec) {
  const int dim = bk.state_dim();
  return table_from_json_impl<backend::ContinuousBackend>(
      text, spec, [dim](const json &v) {
        geom::Region r = region_from_json(v);
        if (r.dim != dim && !(r.dim == 0 && r.parts.empty()))
          throw Error("table entry dimension mismatch");
        r.dim = dim;
        return r;
      });
}

std::optional<feasible::FeasibleTable<backend::GridBackend>> table_from_json_text(
    const std::string &text, const backend::GridBackend &bk, const stl::StlSpec &spec) {
  const int size = bk.g->size();
  return table_from_json_impl<backend::GridBackend>(text, spec, [size](const json &v) {
    backend::CellSet s;
    s.cells = v.at("cells").get<std::vector<int>>();
    for (int c : s.cells)
      if (c < 0 || c >= size) throw Error("table entry references a cell out of range");
    return s;
  });
}

namespace {

json vec_pairs_to_json(const std::vector<std::pair<double, double>> &box) {
  json out = json::array();
  for (const auto &[lo, hi] : box) out.push_back({lo, hi});
  return out;
}

std::vector<std::pair<double, double>> vec_pairs_from_json(const json &j) {
  std::vector<std::pair<double, double>> out;
  for (const auto &iv : j) out.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
  return out;
}

json log_to_json(const monitor::MonitorLog &log) {
  json records = json::array();
  for (const auto &r : log.records)
    records.push_back({{"t", r.t},
                       {"x", r.x},
                       {"decision", r.decision},
                       {"tau", r.tau},
                       {"belief_pairs", r.belief_pairs},
                       {"fallback_used", r.fallback_used},
                       {"forced_by_unsafe", r.forced_by_unsafe},
                       {"wall_us", r.wall_us}});
  return {{"records", std::move(records)},
          {"status", monitor::status_name(log.status)},
          {"alarm_instant", log.alarm_instant},
          {"fault_instant", log.fault_instant}};
}

monitor::MonitorLog log_from_json(const json &j) {
  monitor::MonitorLog log;
  for (const auto &jr : j.at("records")) {
    monitor::ObservationRecord r;
    r.t = jr.at("t").get<int>();
    r.x = jr.at("x").get<geom::Vec>();
    r.decision = jr.at("decision").get<int>();
    r.tau = jr.at("tau").get<int>();
    r.belief_pairs = jr.at("belief_pairs").get<std::size_t>();
    r.fallback_used = jr.at("fallback_used").get<bool>();
    r.forced_by_unsafe = jr.at("forced_by_unsafe").get<bool>();
    r.wall_us = jr.at("wall_us").get<long long>();
    log.records.push_back(std::move(r));
  }
  const std::string status = j.at("status").get<std::string>();
  if (status == "completed") log.status = monitor::MonitorStatus::Completed;
  else if (status == "violated-alarm") log.status = monitor::MonitorStatus::ViolatedAlarm;
  else if (status == "fault") log.status = monitor::MonitorStatus::Fault;
  else if (status == "exhausted") log.status = monitor::MonitorStatus::Exhausted;
  else throw Error("unknown monitor status '" + status + "'");
  log.alarm_instant = j.at("alarm_instant").get<int>();
  log.fault_instant = j.at("fault_instant").get<int>();
  return log;
}

}  // namespace

std::string report_to_json_text(const RunReport &r) {
  json j;
  j["scenario"] = r.scenario;
  j["horizon"] = r.horizon;
  j["t_max"] = r.t_max;
  json states = json::array();
  for (const geom::Vec &x : r.trace.states) states.push_back(x);
  j["trace"] = {{"start", r.trace.start}, {"states", std::move(states)}};
  j["self"] = log_to_json(r.self_log);
  j["periodic"] = log_to_json(r.periodic_log);
  j["observations"] = {{"self", r.self_observations()},
                       {"periodic", r.periodic_observations()},
                       {"ratio", r.observation_ratio()}};
  json beliefs = json::array();
  for (const auto &b : r.belief_boxes)
    beliefs.push_back({{"t", b.t}, {"pending", b.pending}, {"box", vec_pairs_to_json(b.box)}});
  j["belief_boxes"] = std::move(beliefs);
  j["obstacle"] = r.obstacle_name;
  json flags = json::array();
  for (const auto &f : r.obstacle_flags)
    flags.push_back({{"t", f.t}, {"overlap", f.overlap}, {"forced", f.forced}});
  j["obstacle_flags"] = std::move(flags);
  json feas = json::array();
  for (const auto &f : r.feasible_boxes)
    feas.push_back({{"t", f.t},
                    {"pending", f.pending},
                    {"parts", f.parts},
                    {"box", vec_pairs_to_json(f.box)}});
  j["feasible_boxes"] = std::move(feas);
  j["table"] = {{"entries", r.table.entries},
                {"max_parts", r.table.max_parts},
                {"build_ms", r.table.build_ms}};
  return j.dump(2) + "\n";
}

RunReport report_from_json_text(const std::string &text) {
  json j = json::parse(text);
  RunReport r;
  r.scenario = j.at("scenario").get<std::string>();
  r.horizon = j.at("horizon").get<int>();
  r.t_max = j.at("t_max").get<int>();
  r.trace.start = j.at("trace").at("start").get<int>();
  for (const auto &x : j.at("trace").at("states")) r.trace.states.push_back(x.get<geom::Vec>());
  r.self_log = log_from_json(j.at("self"));
  r.periodic_log = log_from_json(j.at("periodic"));
  for (const auto &b : j.at("belief_boxes"))
    r.belief_boxes.push_back({b.at("t").get<int>(), b.at("pending").get<std::string>(),
                              vec_pairs_from_json(b.at("box"))});
  r.obstacle_name = j.at("obstacle").get<std::string>();
  for (const auto &f : j.at("obstacle_flags"))
    r.obstacle_flags.push_back(
        {f.at("t").get<int>(), f.at("overlap").get<bool>(), f.at("forced").get<bool>()});
  for (const auto &f : j.at("feasible_boxes"))
    r.feasible_boxes.push_back({f.at("t").get<int>(), f.at("pending").get<std::string>(),
                                f.at("parts").get<std::size_t>(),
                                vec_pairs_from_json(f.at("box"))});
  r.table.entries = j.at("table").at("entries").get<std::size_t>();
  r.table.max_parts = j.at("table").at("max_parts").get<std::size_t>();
  r.table.build_ms = j.at("table").at("build_ms").get<long long>();
  return r;
}

void export_report(const RunReport &r, const std::string &json_path) {
  spit_file(json_path, report_to_json_text(r));
  write_plot_csvs(r, std::filesystem::path(json_path).parent_path().string());
}

namespace {

std::string box_header(std::size_t dim) {
  std::string h;
  for (std::size_t i = 1; i <= dim; ++i)
    h += ",x" + std::to_string(i) + "_lo,x" + std::to_string(i) + "_hi";
  return h;
}

std::string box_row(const std::vector<std::pair<double, double>> &box, std::size_t dim) {
  std::string row;
  for (std::size_t i = 0; i < dim; ++i) {
    if (i < box.size())
      row += "," + format_double(box[i].first) + "," + format_double(box[i].second);
    else
      row += ",,";  // empty set: no bounds
  }
  return row;
}

}  // namespace

void write_plot_csvs(const RunReport &r, const std::string &dir) {
  namespace fs = std::filesystem;
  const fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(base);
  const std::size_t dim = r.trace.states.empty() ? 0 : r.trace.states.front().size();

  {
    std::ostringstream out;
    out << "t";
    for (std::size_t i = 1; i <= dim; ++i) out << ",x" << i;
    out << ",observed,tau,decision\n";
    std::map<int, const monitor::ObservationRecord *> by_t;
    for (const auto &rec : r.self_log.records) by_t[rec.t] = &rec;
    for (std::size_t k = 0; k < r.trace.states.size(); ++k) {
      const int t = r.trace.start + static_cast<int>(k);
      out << t;
      for (double v : r.trace.states[k]) out << "," << format_double(v);
      auto it = by_t.find(t);
      if (it != by_t.end())
        out << ",1," << it->second->tau << "," << it->second->decision;
      else
        out << ",0,,";
      out << "\n";
    }
    spit_file((base / "trajectory.csv").string(), out.str());
  }
  {
    std::ostringstream out;
    out << "t,pending" << box_header(dim) << "\n";
    for (const auto &b : r.belief_boxes)
      out << b.t << ",\"" << b.pending << "\"" << box_row(b.box, dim) << "\n";
    spit_file((base / "beliefs.csv").string(), out.str());
  }
  {
    std::ostringstream out;
    out << "t,pending,parts" << box_header(dim) << "\n";
    for (const auto &f : r.feasible_boxes)
      out << f.t << ",\"" << f.pending << "\"," << f.parts << box_row(f.box, dim) << "\n";
    spit_file((base / "feasible.csv").string(), out.str());
  }
  if (!r.obstacle_name.empty()) {
    std::ostringstream out;
    out << "t,overlap,forced\n";
    for (const auto &f : r.obstacle_flags)
      out << f.t << "," << (f.overlap ? 1 : 0) << "," << (f.forced ? 1 : 0) << "\n";
    spit_file((base / "obstacle.csv").string(), out.str());
  }
}

}  // namespace stmon::harness
