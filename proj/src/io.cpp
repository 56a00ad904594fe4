#include "ultragen/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ultragen/errors.hpp"

namespace ultragen {

using nlohmann::json;

namespace {

// Canonical code used to order children deterministically.
std::string canonical_code(const MergeTree& t, int i) {
  const auto& n = t.node(i);
  std::ostringstream os;
  os.precision(17);
  if (n.children.empty()) {
    os << "L[" << n.mass << "," << n.label << "]";
    return os.str();
  }
  std::vector<std::string> codes;
  for (int c : n.children) codes.push_back(canonical_code(t, c));
  std::sort(codes.begin(), codes.end());
  os << "N[" << n.height << "," << n.mass;
  for (const auto& c : codes) os << "," << c;
  os << "]";
  return os.str();
}

}  // namespace

std::string tree_to_json(const MergeTree& t) {
  // Children sorted by canonical code; leaves and merges emitted in canonical
  // DFS order (children before parents for merges).
  std::vector<std::string> codes(t.nodes().size());
  for (std::size_t i = 0; i < codes.size(); ++i)
    codes[i] = canonical_code(t, static_cast<int>(i));

  json leaves = json::array();
  json merges = json::array();
  std::vector<int> ref(t.nodes().size(), -1);
  int next_merge = t.num_leaves();

  auto emit = [&](auto&& self, int i) -> void {
    const auto& n = t.node(i);
    if (n.children.empty()) {
      ref[i] = static_cast<int>(leaves.size());
      leaves.push_back(json{{"label", n.label}, {"mass", n.mass}});
      return;
    }
    std::vector<int> order(n.children.begin(), n.children.end());
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return codes[a] < codes[b]; });
    json children = json::array();
    for (int c : order) {
      self(self, c);
      children.push_back(ref[c]);
    }
    ref[i] = next_merge++;
    merges.push_back(json{{"height", n.height}, {"children", children}});
  };
  emit(emit, t.root());

  json out{{"schema", kSchemaTag}, {"leaves", leaves}, {"merges", merges}};
  return out.dump(2);
}

MergeTree tree_from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("leaves")) throw ValidationError("tree JSON: missing leaves");
  TreeBuilder b;
  std::vector<int> refs;
  for (const auto& leaf : j.at("leaves"))
    refs.push_back(b.add_leaf(leaf.at("label").get<std::string>(), leaf.at("mass").get<double>()));
  for (const auto& m : j.value("merges", json::array())) {
    std::vector<int> children;
    for (const auto& c : m.at("children")) {
      const int r = c.get<int>();
      if (r < 0 || r >= static_cast<int>(refs.size()))
        throw ValidationError("tree JSON: child reference out of range (forward reference?)");
      children.push_back(refs[r]);
    }
    refs.push_back(b.add_internal(m.at("height").get<double>(), std::move(children)));
  }
  if (refs.empty()) throw ValidationError("tree JSON: empty tree");
  return b.build(refs.back());
}

namespace {

json profile_to_json(const RankedProfile& p) { return json(p.entries()); }

RankedProfile profile_from_json(const json& j) {
  return RankedProfile::from_sorted(j.get<std::vector<double>>());
}

}  // namespace

std::string path_to_json(const ProfilePath& p) {
  json values = json::array();
  for (const auto& v : p.values) values.push_back(profile_to_json(v));
  json out{{"schema", kSchemaTag}, {"jumps", p.jumps}, {"values", values}};
  if (p.zero_value) out["zero_value"] = profile_to_json(*p.zero_value);
  return out.dump(2);
}

ProfilePath path_from_json(const std::string& text) {
  json j = json::parse(text);
  ProfilePath p;
  p.jumps = j.at("jumps").get<std::vector<double>>();
  for (const auto& v : j.at("values")) p.values.push_back(profile_from_json(v));
  if (j.contains("zero_value")) p.zero_value = profile_from_json(j.at("zero_value"));
  p.validate();
  return p;
}

std::string measure_to_json(const AtomicMeasure1D& m) {
  json atoms = json::array();
  for (std::size_t i = 0; i < m.size(); ++i)
    atoms.push_back(json::array({m.locations()[i], m.masses()[i]}));
  json out{{"schema", kSchemaTag}, {"atoms", atoms}};
  return out.dump(2);
}

AtomicMeasure1D measure_from_json(const std::string& text) {
  json j = json::parse(text);
  std::vector<std::pair<double, double>> atoms;
  for (const auto& a : j.at("atoms"))
    atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  return AtomicMeasure1D::from_atoms(std::move(atoms));
}

std::string partition_to_json(const PartitionPath& p) {
  json events = json::array();
  for (const auto& e : p.events())
    events.push_back(json{{"time", e.time}, {"a", e.rep_a}, {"b", e.rep_b}});
  json out{{"schema", kSchemaTag}, {"n", p.n()}, {"events", events}};
  return out.dump(2);
}

PartitionPath partition_from_json(const std::string& text) {
  json j = json::parse(text);
  std::vector<PartitionEvent> events;
  for (const auto& e : j.at("events"))
    events.push_back(
        {e.at("time").get<double>(), e.at("a").get<int>(), e.at("b").get<int>()});
  return PartitionPath(j.at("n").get<int>(), std::move(events));
}

namespace {

std::string format_double(double x) {
  json j = x;
  return j.dump();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  return out;
}

}  // namespace

std::string matrix_to_csv(const UltrametricMatrixSpace& m) {
  std::ostringstream os;
  for (int i = 0; i < m.size(); ++i) os << (i ? "," : "") << m.labels[i];
  os << "\n";
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) os << (j ? "," : "") << format_double(m.dist[i][j]);
    os << "\n";
  }
  for (int i = 0; i < m.size(); ++i) os << (i ? "," : "") << format_double(m.mass[i]);
  os << "\n";
  return os.str();
}

UltrametricMatrixSpace matrix_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.size() < 3) throw ValidationError("matrix CSV: need labels, distances, masses");
  const std::vector<std::string>& labels = rows.front();
  const std::size_t n = labels.size();
  if (rows.size() != n + 2)
    throw ValidationError("matrix CSV: expected " + std::to_string(n) + " distance rows");
  std::vector<std::vector<double>> dist(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i + 1].size() != n) throw ValidationError("matrix CSV: ragged distance row");
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = std::stod(rows[i + 1][j]);
  }
  if (rows.back().size() != n) throw ValidationError("matrix CSV: bad mass row");
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = std::stod(rows.back()[i]);
  return UltrametricMatrixSpace(labels, dist, mass);
}

std::string path_plateaus_csv(const ProfilePath& p) {
  std::size_t width = 0;
  for (const auto& v : p.values) width = std::max(width, v.size());
  std::ostringstream os;
  os << "h_lo,h_hi";
  for (std::size_t k = 0; k < width; ++k) os << ",a" << (k + 1);
  os << "\n";
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double lo = i == 0 ? 0.0 : p.jumps[i - 1];
    os << format_double(lo) << ",";
    if (i < p.jumps.size())
      os << format_double(p.jumps[i]);
    else
      os << "inf";
    for (std::size_t k = 0; k < width; ++k) os << "," << format_double(p.values[i][k]);
    os << "\n";
  }
  return os.str();
}

std::string experiment_rows_csv(const ConvergenceExperimentReport& r) {
  std::ostringstream os;
  os << "n,rep,h,rank,mass\n";
  for (const auto& row : r.rows)
    os << row.n << "," << row.rep << "," << format_double(row.h) << "," << row.rank << ","
       << format_double(row.mass) << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

}  // namespace ultragen
