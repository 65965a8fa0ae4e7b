#include "relhydro/cli_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace relhydro {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

namespace {

// ---- value formatting / parsing ----

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(x))
    throw ConfigError("invalid value for '" + key + "': '" + raw + "' is not a finite number");
  return x;
}

long long parse_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long x = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("invalid value for '" + key + "': '" + raw + "' is not an integer");
  return x;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("invalid value for '" + key + "': '" + raw + "' is not a boolean");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& item : split(raw, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
  return s;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("invalid value for '" + key + "': " + what);
}

BoundaryKind parse_boundary(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "periodic") return BoundaryKind::Periodic;
  if (s == "outflow") return BoundaryKind::Outflow;
  throw ConfigError("invalid value for '" + key + "': '" + raw + "' (expected periodic or outflow)");
}

const char* boundary_name(BoundaryKind k) { return k == BoundaryKind::Periodic ? "periodic" : "outflow"; }

// Section that owns each key; top-level lines may use any key not marked
// section-only.
const std::map<std::string, std::string>& key_sections() {
  static const std::map<std::string, std::string> m = {
      {"problem", ""}, {"dim", ""}, {"scale", ""}, {"t_end", ""}, {"zero_tangential", ""},
      {"nx", "grid"}, {"ny", "grid"}, {"nz", "grid"}, {"x_min", "grid"}, {"x_max", "grid"},
      {"y_min", "grid"}, {"y_max", "grid"}, {"z_min", "grid"}, {"z_max", "grid"},
      {"boundary_x", "grid"}, {"boundary_y", "grid"}, {"boundary_z", "grid"},
      {"cfl", "scheme"}, {"rk", "scheme"}, {"flux", "scheme"}, {"reconstruct", "scheme"},
      {"threads", "scheme"}, {"uniform_tolerance", "scheme"},
      {"perturbed", "perturbation"}, {"seed", "perturbation"}, {"count", "perturbation"},
      {"amplitude_min", "perturbation"}, {"amplitude_max", "perturbation"},
      {"radius_min", "perturbation"}, {"radius_max", "perturbation"}, {"bumps", "perturbation"},
      {"dir", "output"}, {"snapshot_times", "output"}, {"norm_every", "output"}, {"reference", "output"},
      {"slice_k", "output"}, {"write_snapshots", "output"}, {"wall_clock_limit", "output"},
  };
  return m;
}

const std::set<std::string> kStateKeys = {"rho", "n", "eps", "vx", "vy", "vz"};
const std::set<std::string> kEosKeys = {"system", "cs2", "gamma"};

} // namespace

RiemannProblem RunConfig::resolved_problem() const {
  RiemannProblem p = custom_problem ? custom : table1_problem(problem);
  return zero_tangential ? without_tangential_velocity(p) : p;
}

RunConfig default_config(char problem, int dim, int scale) {
  RunConfig c;
  const auto times = figure_times(problem); // validates the label
  c.problem = problem;
  c.dim = dim;
  c.scale = scale;
  c.geometry = full_geometry(scale, dim);
  c.cfl = dim == 3 ? 0.25 : 0.5;
  c.t_end = times.back();
  c.snapshot_times = times;
  c.perturbed = dim == 3;
  return c;
}

RunConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("syntax error at line " + std::to_string(e.line()) + ": " + e.message());
  }

  // Flatten into key -> value, checking placement.
  std::map<std::string, std::string> kv;
  std::map<std::string, std::map<std::string, std::string>> states; // left/right/eos
  const auto& sections = key_sections();
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      const auto it = sections.find(name);
      if (it == sections.end()) throw ConfigError("unknown key '" + name + "'");
      if (kv.count(name)) throw ConfigError("duplicate key '" + name + "'");
      kv[name] = node.data();
      continue;
    }
    const bool state_section = name == "left" || name == "right";
    const bool eos_section = name == "eos";
    for (const auto& [key, child] : node) {
      if (state_section || eos_section) {
        if (!(state_section ? kStateKeys : kEosKeys).count(key))
          throw ConfigError("unknown key '" + key + "' in section [" + name + "]");
        states[name][key] = child.data();
        continue;
      }
      const auto it = sections.find(key);
      if (it == sections.end() || it->second != name)
        throw ConfigError("unknown key '" + key + "' in section [" + name + "]");
      if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
      kv[key] = child.data();
    }
  }

  for (const auto& [key, value] : overrides) {
    const auto it = sections.find(key);
    if (it == sections.end()) throw ConfigError("unknown override key '" + key + "'");
    kv[key] = value;
  }

  auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  const auto problem = get("problem");
  if (!problem) throw ConfigError("missing required key 'problem'");
  const std::string label = trim(*problem);
  const bool custom = label == "custom";
  if (!custom && (label.size() != 1 || label[0] < 'a' || label[0] > 'f'))
    throw ConfigError("invalid value for 'problem': unknown label '" + label + "' (expected a-f or custom)");

  int dim = 3, scale = 6;
  if (auto v = get("dim")) {
    dim = int(parse_int("dim", *v));
    require(dim == 1 || dim == 3, "dim", "must be 1 or 3");
  }
  if (auto v = get("scale")) {
    scale = int(parse_int("scale", *v));
    require(scale >= 1 && 1800 % scale == 0 && 600 % scale == 0 && 300 % scale == 0, "scale",
            "must be >= 1 and divide 1800, 600 and 300");
  }
  RunConfig c = default_config(custom ? 'a' : label[0], dim, scale);

  if (custom) {
    c.custom_problem = true;
    const auto& eos_kv = states["eos"];
    const auto sys = eos_kv.count("system") ? trim(eos_kv.at("system")) : std::string();
    if (sys == "ultra") {
      const double cs2 = eos_kv.count("cs2") ? parse_double("cs2", eos_kv.at("cs2")) : 1.0 / 3.0;
      require(cs2 > 0.0 && cs2 < 1.0, "cs2", "must lie in (0, 1)");
      c.custom.eos = Eos::ultra_relativistic(cs2);
    } else if (sys == "gas") {
      const double g = eos_kv.count("gamma") ? parse_double("gamma", eos_kv.at("gamma")) : 4.0 / 3.0;
      require(g > 1.0 && g <= 2.0, "gamma", "must lie in (1, 2]");
      c.custom.eos = Eos::perfect_gas(g);
    } else {
      throw ConfigError("problem = custom requires [eos] system = ultra or gas");
    }
    for (const char* side : {"left", "right"}) {
      auto& s = states[side];
      auto num = [&](const char* k, double def) {
        return s.count(k) ? parse_double(std::string(side) + "." + k, s.at(k)) : def;
      };
      const Vec3 v{num("vx", 0.0), num("vy", 0.0), num("vz", 0.0)};
      require(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] < 1.0, std::string(side) + ".v", "must be subluminal");
      Primitive prim;
      if (c.custom.eos.system == System::UltraRelativistic) {
        if (!s.count("rho")) throw ConfigError(std::string("missing required key 'rho' in [") + side + "]");
        const double rho = num("rho", 0.0);
        require(rho > 0.0, std::string(side) + ".rho", "must be > 0");
        prim = make_ultra(rho, v, c.custom.eos);
      } else {
        if (!s.count("n") || !s.count("eps"))
          throw ConfigError(std::string("missing required keys 'n' and 'eps' in [") + side + "]");
        const double n = num("n", 0.0), eps = num("eps", 0.0);
        require(n > 0.0, std::string(side) + ".n", "must be > 0");
        require(eps > 0.0, std::string(side) + ".eps", "must be > 0");
        prim = make_gas(n, eps, v, c.custom.eos);
      }
      (std::string(side) == "left" ? c.custom.left : c.custom.right) = prim;
    }
    if (!get("t_end")) throw ConfigError("missing required key 't_end' (needed for problem = custom)");
    c.snapshot_times.clear();
  } else if (!states.empty()) {
    throw ConfigError("[left], [right] and [eos] sections require problem = custom");
  }

  if (auto v = get("zero_tangential")) c.zero_tangential = parse_bool("zero_tangential", *v);

  // Grid.
  const char* nkeys[3] = {"nx", "ny", "nz"};
  const char* lokeys[3] = {"x_min", "y_min", "z_min"};
  const char* hikeys[3] = {"x_max", "y_max", "z_max"};
  const char* bkeys[3] = {"boundary_x", "boundary_y", "boundary_z"};
  for (int d = 0; d < 3; ++d) {
    if (auto v = get(nkeys[d])) {
      const long long n = parse_int(nkeys[d], *v);
      require(n >= 1, nkeys[d], "must be >= 1");
      require(d == 0 || dim == 3 || n == 1, nkeys[d], "must be 1 when dim = 1");
      c.geometry.n[d] = int(n);
    }
    if (auto v = get(lokeys[d])) c.geometry.lo[d] = parse_double(lokeys[d], *v);
    if (auto v = get(hikeys[d])) c.geometry.hi[d] = parse_double(hikeys[d], *v);
    require(c.geometry.hi[d] > c.geometry.lo[d], hikeys[d], std::string("must exceed ") + lokeys[d]);
    if (auto v = get(bkeys[d])) {
      const BoundaryKind k = parse_boundary(bkeys[d], *v);
      c.boundaries.face[d] = {k, k};
    }
  }
  for (int d = 0; d < 3; ++d)
    if (c.geometry.active(d) && c.geometry.n[d] < 2 * kGhost)
      throw ConfigError(std::string("invalid value for '") + nkeys[d] + "': active axes need at least " +
                        std::to_string(2 * kGhost) + " cells");

  // Scheme.
  if (auto v = get("cfl")) {
    c.cfl = parse_double("cfl", *v);
    require(c.cfl > 0.0 && c.cfl < 1.0, "cfl", "must be in (0,1)");
  }
  if (auto v = get("rk")) {
    c.scheme.rk_order = int(parse_int("rk", *v));
    require(c.scheme.rk_order == 2 || c.scheme.rk_order == 4, "rk", "must be 2 or 4");
  }
  if (auto v = get("flux")) {
    try {
      c.scheme.flux = parse_flux_kind(trim(*v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid value for 'flux': ") + e.what());
    }
  }
  if (auto v = get("reconstruct")) c.scheme.reconstruct = parse_bool("reconstruct", *v);
  if (auto v = get("threads")) {
    c.scheme.threads = int(parse_int("threads", *v));
    require(c.scheme.threads >= 1, "threads", "must be >= 1");
  }
  if (auto v = get("uniform_tolerance")) {
    c.scheme.uniform_tolerance = parse_double("uniform_tolerance", *v);
    require(c.scheme.uniform_tolerance >= 0.0 && c.scheme.uniform_tolerance < 1e-6, "uniform_tolerance",
            "must lie in [0, 1e-6)");
  }

  // Time.
  if (auto v = get("t_end")) {
    c.t_end = parse_double("t_end", *v);
    require(c.t_end >= 0.0, "t_end", "must be >= 0");
    if (!get("snapshot_times")) {
      // Keep the preset cadence up to the new end time.
      std::vector<double> kept;
      for (double t : c.snapshot_times)
        if (t <= c.t_end) kept.push_back(t);
      if (kept.empty() || kept.back() != c.t_end) kept.push_back(c.t_end);
      c.snapshot_times = kept;
    }
  }
  if (auto v = get("snapshot_times")) c.snapshot_times = parse_list("snapshot_times", *v);
  std::sort(c.snapshot_times.begin(), c.snapshot_times.end());
  for (double t : c.snapshot_times)
    require(t >= 0.0 && t <= c.t_end, "snapshot_times", "every time must lie in [0, t_end]");

  // Perturbation.
  if (auto v = get("perturbed")) c.perturbed = parse_bool("perturbed", *v);
  if (auto v = get("seed")) {
    const long long s = parse_int("seed", *v);
    require(s >= 0, "seed", "must be >= 0");
    c.seed = std::uint64_t(s);
  }
  if (auto v = get("count")) {
    c.ranges.count = int(parse_int("count", *v));
    require(c.ranges.count >= 0, "count", "must be >= 0");
  }
  if (auto v = get("amplitude_min")) c.ranges.amplitude_min = parse_double("amplitude_min", *v);
  if (auto v = get("amplitude_max")) c.ranges.amplitude_max = parse_double("amplitude_max", *v);
  if (auto v = get("radius_min")) c.ranges.radius_min = parse_double("radius_min", *v);
  if (auto v = get("radius_max")) c.ranges.radius_max = parse_double("radius_max", *v);
  require(c.ranges.amplitude_min > 0.0 && c.ranges.amplitude_min <= c.ranges.amplitude_max, "amplitude_min",
          "need 0 < amplitude_min <= amplitude_max");
  require(c.ranges.radius_min > 0.0 && c.ranges.radius_min <= c.ranges.radius_max, "radius_min",
          "need 0 < radius_min <= radius_max");
  if (auto v = get("bumps")) {
    for (const auto& item : split(*v, ';')) {
      std::istringstream in(item);
      std::vector<double> f;
      std::string tok;
      while (in >> tok) f.push_back(parse_double("bumps", tok));
      require(f.size() == 4, "bumps", "each bump is 'amplitude radius y z', separated by ';'");
      c.bumps.push_back({f[0], f[1], f[2], f[3]});
    }
  }
  if (c.perturbed && c.dim == 3) {
    PerturbationSpec probe;
    probe.bumps = c.bumps;
    try {
      probe.validate(c.geometry);
      if (c.bumps.empty()) {
        const double rmax = 0.5 * std::min(c.geometry.hi[1] - c.geometry.lo[1], c.geometry.hi[2] - c.geometry.lo[2]);
        require(c.ranges.radius_max < rmax, "radius_max", "must stay below half the shorter periodic length");
        require(c.ranges.count * c.ranges.amplitude_max < 0.5 * (c.geometry.hi[0] - c.geometry.lo[0]),
                "amplitude_max", "count * amplitude_max must stay below the x half-length");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid value for 'bumps': ") + e.what());
    }
  }

  // Output.
  if (auto v = get("dir")) {
    c.output_dir = trim(*v);
    require(!c.output_dir.empty(), "dir", "must not be empty");
  }
  if (auto v = get("norm_every")) {
    c.norm_every = int(parse_int("norm_every", *v));
    require(c.norm_every >= 1, "norm_every", "must be >= 1");
  }
  if (auto v = get("reference")) {
    try {
      c.reference = parse_reference_method(trim(*v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid value for 'reference': ") + e.what());
    }
  }
  if (auto v = get("slice_k")) {
    c.slice_k = int(parse_int("slice_k", *v));
    require(c.slice_k >= -1 && c.slice_k < c.geometry.n[2], "slice_k", "must be -1 or a valid z index");
  }
  if (auto v = get("write_snapshots")) c.write_snapshots = parse_bool("write_snapshots", *v);
  if (auto v = get("wall_clock_limit")) {
    c.wall_clock_limit = parse_double("wall_clock_limit", *v);
    require(c.wall_clock_limit >= 0.0, "wall_clock_limit", "must be >= 0");
  }
  return c;
}

RunConfig load_config(const fs::path& path, const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

std::string format_config(const RunConfig& c) {
  pt::ptree t;
  t.put("problem", c.custom_problem ? std::string("custom") : std::string(1, c.problem));
  t.put("dim", c.dim);
  t.put("scale", c.scale);
  t.put("t_end", fmt(c.t_end));
  t.put("zero_tangential", c.zero_tangential ? "true" : "false");

  pt::ptree g;
  const char* axes = "xyz";
  for (int d = 0; d < 3; ++d) {
    g.put(std::string("n") + axes[d], c.geometry.n[d]);
    g.put(std::string(1, axes[d]) + "_min", fmt(c.geometry.lo[d]));
    g.put(std::string(1, axes[d]) + "_max", fmt(c.geometry.hi[d]));
    g.put(std::string("boundary_") + axes[d], boundary_name(c.boundaries.face[d][0]));
  }
  t.add_child("grid", g);

  pt::ptree s;
  s.put("cfl", fmt(c.cfl));
  s.put("rk", c.scheme.rk_order);
  s.put("flux", to_string(c.scheme.flux));
  s.put("reconstruct", c.scheme.reconstruct ? "true" : "false");
  s.put("threads", c.scheme.threads);
  s.put("uniform_tolerance", fmt(c.scheme.uniform_tolerance));
  t.add_child("scheme", s);

  pt::ptree p;
  p.put("perturbed", c.perturbed ? "true" : "false");
  p.put("seed", c.seed);
  p.put("count", c.ranges.count);
  p.put("amplitude_min", fmt(c.ranges.amplitude_min));
  p.put("amplitude_max", fmt(c.ranges.amplitude_max));
  p.put("radius_min", fmt(c.ranges.radius_min));
  p.put("radius_max", fmt(c.ranges.radius_max));
  if (!c.bumps.empty()) {
    std::string b;
    for (std::size_t i = 0; i < c.bumps.size(); ++i)
      b += (i ? "; " : "") + fmt(c.bumps[i].amplitude) + " " + fmt(c.bumps[i].radius) + " " + fmt(c.bumps[i].yc) +
           " " + fmt(c.bumps[i].zc);
    p.put("bumps", b);
  }
  t.add_child("perturbation", p);

  pt::ptree o;
  o.put("dir", c.output_dir);
  o.put("snapshot_times", join(c.snapshot_times));
  o.put("norm_every", c.norm_every);
  o.put("reference", to_string(c.reference));
  o.put("slice_k", c.slice_k);
  o.put("write_snapshots", c.write_snapshots ? "true" : "false");
  o.put("wall_clock_limit", fmt(c.wall_clock_limit));
  t.add_child("output", o);

  if (c.custom_problem) {
    pt::ptree e;
    if (c.custom.eos.system == System::UltraRelativistic) {
      e.put("system", "ultra");
      e.put("cs2", fmt(c.custom.eos.cs2));
    } else {
      e.put("system", "gas");
      e.put("gamma", fmt(c.custom.eos.gamma));
    }
    t.add_child("eos", e);
    for (const char* side : {"left", "right"}) {
      const Primitive& q = std::string(side) == "left" ? c.custom.left : c.custom.right;
      pt::ptree st;
      if (c.custom.eos.system == System::UltraRelativistic) {
        st.put("rho", fmt(q.rho));
      } else {
        st.put("n", fmt(q.n));
        st.put("eps", fmt(q.eps));
      }
      st.put("vx", fmt(q.v[0]));
      st.put("vy", fmt(q.v[1]));
      st.put("vz", fmt(q.v[2]));
      t.add_child(side, st);
    }
  }
  std::ostringstream out;
  pt::write_ini(out, t);
  return out.str();
}

// ---- snapshots ----

namespace {

constexpr char kMagic[8] = {'R', 'H', 'S', 'N', 'A', 'P', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof x);
}

template <class T>
void get(std::istream& in, T& x, const fs::path& path) {
  in.read(reinterpret_cast<char*>(&x), sizeof x);
  if (!in) throw SnapshotError("corrupt snapshot " + path.string() + ": truncated header");
}

} // namespace

void write_snapshot(const GridField& grid, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
  const GridGeometry& g = grid.geometry();
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, std::uint32_t(grid.eos().system == System::UltraRelativistic ? 0 : 1));
  put(out, grid.eos().cs2);
  put(out, grid.eos().gamma);
  for (int d = 0; d < 3; ++d) put(out, std::int32_t(g.n[d]));
  for (int d = 0; d < 3; ++d) put(out, g.lo[d]);
  for (int d = 0; d < 3; ++d) put(out, g.hi[d]);
  put(out, grid.time);
  put(out, std::int64_t(grid.step));
  const int nv = grid.nvar();
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) out.write(reinterpret_cast<const char*>(grid.at(i, j, k)), nv * sizeof(double));
  if (!out) throw SnapshotError("write failed for " + path.string());
}

GridField read_snapshot(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw SnapshotError("not a snapshot file (bad magic): " + path.string());
  std::uint32_t version = 0, system = 0;
  get(in, version, path);
  if (version != kVersion)
    throw SnapshotError("unsupported snapshot version " + std::to_string(version) + " in " + path.string());
  get(in, system, path);
  if (system > 1) throw SnapshotError("corrupt snapshot " + path.string() + ": bad system tag");
  double cs2 = 0.0, gamma = 0.0;
  get(in, cs2, path);
  get(in, gamma, path);
  GridGeometry g;
  for (int d = 0; d < 3; ++d) {
    std::int32_t n = 0;
    get(in, n, path);
    g.n[d] = n;
  }
  for (int d = 0; d < 3; ++d) get(in, g.lo[d], path);
  for (int d = 0; d < 3; ++d) get(in, g.hi[d], path);
  double time = 0.0;
  std::int64_t step = 0;
  get(in, time, path);
  get(in, step, path);
  Eos eos = system == 0 ? Eos::ultra_relativistic(0.5) : Eos::perfect_gas(1.5);
  eos.cs2 = cs2;
  eos.gamma = gamma;
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw SnapshotError("corrupt snapshot " + path.string() + ": " + e.what());
  }
  GridField grid(g, eos);
  grid.time = time;
  grid.step = step;
  const int nv = grid.nvar();
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        in.read(reinterpret_cast<char*>(grid.at(i, j, k)), nv * sizeof(double));
        if (!in) throw SnapshotError("corrupt snapshot " + path.string() + ": truncated cell data");
      }
  if (in.peek() != std::char_traits<char>::eof())
    throw SnapshotError("corrupt snapshot " + path.string() + ": trailing bytes");
  return grid;
}

GridField read_snapshot(const fs::path& path, const GridGeometry& expected) {
  GridField g = read_snapshot(path);
  if (!(g.geometry() == expected)) throw SnapshotError("geometry mismatch reading " + path.string());
  return g;
}

// ---- CSV ----

namespace {

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
  return out;
}

} // namespace

void write_slice_csv(const GridField& grid, int k, const fs::path& path) {
  const GridGeometry& g = grid.geometry();
  if (k < 0 || k >= g.n[2]) throw std::invalid_argument("slice index out of range");
  const bool gas = grid.eos().system == System::PerfectGas;
  auto out = open_csv(path);
  out << "x,y,e," << (gas ? "n" : "rho") << ",vy\n";
  for (int j = 0; j < g.n[1]; ++j)
    for (int i = 0; i < g.n[0]; ++i) {
      const StateVector u = grid.get(i, j, k);
      const Primitive p = recover_primitive(u, grid.eos());
      out << fmt(g.center(0, i)) << ',' << fmt(g.center(1, j)) << ',' << fmt(u[kEnergy]) << ','
          << fmt(gas ? p.n : p.rho) << ',' << fmt(p.v[1]) << '\n';
    }
}

void write_norms_csv(const std::vector<NormTriple>& norms, const fs::path& path) {
  auto out = open_csv(path);
  out << "t,L1,L2,Linf\n";
  for (const auto& n : norms) out << fmt(n.t) << ',' << fmt(n.l1) << ',' << fmt(n.l2) << ',' << fmt(n.linf) << '\n';
}

std::vector<NormTriple> read_norms_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SnapshotError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (trim(line) != "t,L1,L2,Linf") throw SnapshotError("unexpected header in " + path.string());
  std::vector<NormTriple> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw SnapshotError("malformed row in " + path.string() + ": " + line);
    out.push_back({parse_double("t", f[0]), parse_double("L1", f[1]), parse_double("L2", f[2]),
                   parse_double("Linf", f[3])});
  }
  return out;
}

void write_front_csv(const FrontProfile& front, const fs::path& path) {
  auto out = open_csv(path);
  out << "y,z,x_front\n";
  for (std::size_t i = 0; i < front.x_front.size(); ++i)
    out << fmt(front.y[i]) << ',' << fmt(front.z[i]) << ',' << fmt(front.x_front[i]) << '\n';
}

void write_bumps_csv(const PerturbationSpec& pert, const fs::path& path) {
  auto out = open_csv(path);
  if (pert.seed) out << "# seed " << *pert.seed << '\n';
  out << "amplitude,radius,y,z\n";
  for (const Bump& b : pert.bumps)
    out << fmt(b.amplitude) << ',' << fmt(b.radius) << ',' << fmt(b.yc) << ',' << fmt(b.zc) << '\n';
}

std::string exact_csv(const RiemannProblem& problem, double t, int points, double x_min, double x_max) {
  if (points < 2) throw std::invalid_argument("exact_csv: need at least 2 points");
  if (!(t >= 0.0)) throw std::invalid_argument("exact_csv: t must be >= 0");
  const ExactSolution sol = solve_star_state(problem.left, problem.right, problem.eos);
  const bool gas = problem.eos.system == System::PerfectGas;
  std::ostringstream out;
  out << "x,e,p,vx,vy" << (gas ? ",n" : "") << '\n';
  for (int i = 0; i < points; ++i) {
    const double x = x_min + (x_max - x_min) * i / (points - 1);
    const Primitive p = t > 0.0 ? sample(sol, x / t) : (x < 0.0 ? problem.left : problem.right);
    const double e = primitive_to_conserved(p, problem.eos)[kEnergy];
    out << fmt(x) << ',' << fmt(e) << ',' << fmt(p.p) << ',' << fmt(p.v[0]) << ',' << fmt(p.v[1]);
    if (gas) out << ',' << fmt(p.n);
    out << '\n';
  }
  return out.str();
}

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t%08.4f", t);
  return buf;
}

// ---- driver ----

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
  out << text;
}

} // namespace

RunResult run(const RunConfig& cfg, std::ostream& log) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  RunResult res;
  res.output_dir = cfg.output_dir;
  fs::create_directories(res.output_dir);
  auto file = [&](const std::string& name) {
    res.files.push_back(res.output_dir / name);
    return res.files.back();
  };

  write_text(file("config.ini"), format_config(cfg));
  const RiemannProblem problem = cfg.resolved_problem();
  const GridGeometry& geom = cfg.geometry;

  if (cfg.perturbed && cfg.dim == 3) {
    if (!cfg.bumps.empty()) {
      res.perturbation.bumps = cfg.bumps;
      res.perturbation.validate(geom);
    } else {
      res.perturbation = sample_perturbations(cfg.seed, cfg.ranges, geom);
    }
  }
  write_bumps_csv(res.perturbation, file("bumps.csv"));

  GridField grid = initialize_grid(problem, res.perturbation, geom);
  Integrator integrator(geom, problem.eos, cfg.boundaries, cfg.scheme);
  apply_boundaries(grid, cfg.boundaries);
  log << "problem " << (cfg.custom_problem ? std::string("custom") : std::string(1, cfg.problem)) << ", grid "
      << geom.n[0] << "x" << geom.n[1] << "x" << geom.n[2] << ", " << res.perturbation.bumps.size() << " bumps\n";

  const bool norms = cfg.wants_norms();
  std::optional<ReferenceTracker> tracker;
  if (norms && cfg.reference == ReferenceMethod::Numerical1D) tracker.emplace(problem, geom, cfg.scheme);
  auto reference_energy = [&](double t) {
    if (tracker) return tracker->energy();
    ReferenceResult r = unperturbed_reference(problem, t, geom, cfg.reference, cfg.scheme, 0.5);
    if (!r.warning.empty()) log << "warning: " << r.warning << '\n';
    return r.energy;
  };

  std::optional<ExactSolution> exact;
  try {
    exact = solve_star_state(problem.left, problem.right, problem.eos);
  } catch (const PhysicsError& e) {
    log << "warning: exact solution unavailable (" << e.what() << "); front profiles skipped\n";
  }

  const int slice_k = cfg.slice_k >= 0 ? cfg.slice_k : geom.n[2] / 2;
  auto snapshot = [&](const GridField& g) {
    const std::string base = snapshot_name(g.time);
    write_snapshot(g, file("snap_" + base + ".bin"));
    write_slice_csv(g, slice_k, file("slice_" + base + ".csv"));
    if (cfg.dim == 3 && exact && g.time > 0.0) {
      for (WaveFront w : {WaveFront::Left, WaveFront::Right}) {
        try {
          const FrontProfile fp = front_profile(g, *exact, w);
          write_front_csv(fp, file(std::string("front_") + (w == WaveFront::Left ? "left_" : "right_") + base + ".csv"));
        } catch (const std::invalid_argument& e) {
          log << "note: front profile skipped (" << e.what() << ")\n";
        }
      }
    }
    log << "snapshot t = " << fmt(g.time) << " (step " << g.step << ")\n";
  };

  if (norms) res.norms.push_back(perturbation_norms(grid, reference_energy(0.0), 0.0));
  if (cfg.write_snapshots && !cfg.snapshot_times.empty() && cfg.snapshot_times.front() == 0.0) snapshot(grid);

  EvolveSettings settings;
  settings.t_end = cfg.t_end;
  settings.cfl = cfg.cfl;
  for (double t : cfg.snapshot_times)
    if (t > 0.0) settings.stop_times.push_back(t);
  settings.wall_clock_limit = cfg.wall_clock_limit;
  if (tracker) settings.dt_limit = [&] { return tracker->timestep(cfg.cfl); };

  auto observer = [&](const GridField& g, double dt, bool stop) {
    if (tracker) {
      tracker->step(dt);
      tracker->set_time(g.time);
    }
    if (norms && (g.step % cfg.norm_every == 0 || stop))
      res.norms.push_back(perturbation_norms(g, reference_energy(g.time), g.time));
    if (stop && cfg.write_snapshots) snapshot(g);
  };
  res.evolve = evolve(grid, integrator, settings, observer);

  if (res.evolve.status == EvolveStatus::WallClockExceeded) {
    write_snapshot(grid, file("checkpoint.bin"));
    log << "wall-clock limit reached at t = " << fmt(grid.time) << "; checkpoint written\n";
  }
  if (norms) write_norms_csv(res.norms, file("norms.csv"));

  res.wall_seconds = std::chrono::duration<double>(clock::now() - started).count();
  nlohmann::json summary = {
      {"status", res.evolve.status == EvolveStatus::Completed ? "completed" : "wall_clock_exceeded"},
      {"t_final", grid.time},
      {"steps", res.evolve.steps},
      {"fallback_faces", res.evolve.stats.fallback_faces},
      {"hlle_faces", res.evolve.stats.hlle_faces},
      {"floored_cells", res.evolve.stats.floored_cells},
      {"bumps", res.perturbation.bumps.size()},
      {"wall_seconds", res.wall_seconds},
  };
  res.files.push_back(res.output_dir / "summary.json");
  write_text(res.files.back(), summary.dump(2) + "\n");
  res.final_grid = std::move(grid);
  return res;
}

std::vector<NormTriple> norms_from_snapshots(const fs::path& perturbed, const fs::path& reference) {
  std::vector<fs::path> snaps;
  for (const auto& entry : fs::directory_iterator(perturbed))
    if (entry.path().extension() == ".bin" && entry.path().filename().string().rfind("snap_", 0) == 0)
      snaps.push_back(entry.path());
  std::sort(snaps.begin(), snaps.end());
  if (snaps.empty()) throw SnapshotError("no snap_*.bin files in " + perturbed.string());
  std::vector<NormTriple> out;
  for (const auto& p : snaps) {
    const fs::path r = reference / p.filename();
    if (!fs::exists(r)) throw SnapshotError("reference snapshot missing: " + r.string());
    const GridField a = read_snapshot(p);
    const GridField b = read_snapshot(r, a.geometry());
    out.push_back(perturbation_norms(a, conserved_energy_field(b), a.time));
  }
  return out;
}

void write_error_report(const fs::path& dir, const std::string& kind, const std::string& message) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const nlohmann::json j = {{"error", kind}, {"message", message}};
  std::ofstream out(dir / "error.json", std::ios::trunc);
  out << j.dump(2) << '\n';
}

} // namespace relhydro
