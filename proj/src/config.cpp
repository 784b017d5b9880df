#include "hybridwave/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "hybridwave/error.hpp"

namespace hybridwave {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

// section -> key -> entries (a key may repeat only where allowed)
using Document = std::map<std::string, std::map<std::string, std::vector<Entry>>>;

const std::map<std::string, std::set<std::string>> kAllowed = {
    {"run", {"scenario", "mode", "dt", "steps", "energy_stride", "snapshot_stride"}},
    {"geometry", {"nx", "dx", "fem_ny", "fdm_ny", "amplitude_fraction", "jitter", "seed", "mesh_file"}},
    {"medium",
     {"type", "rho", "cp", "cs", "rho_file", "cp_file", "cs_file", "grid_nx", "grid_ny", "grid_dx", "grid_origin"}},
    {"fem", {"quadrature"}},
    {"source", {"x", "y", "depth", "frequency", "delay", "amplitude"}},
    {"receivers", {"point"}},
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorKind::parse, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Document tokenize(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!kAllowed.count(section)) fail(line, "unknown section [" + section + "]");
      doc[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    if (section.empty()) fail(line, "key outside of any section");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (!kAllowed.at(section).count(key)) fail(line, "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) fail(line, "empty value for '" + key + "'");
    auto& entries = doc[section][key];
    if (!entries.empty() && key != "point") fail(line, "duplicate key '" + key + "'");
    entries.push_back({value, line});
  }
  return doc;
}

class Reader {
 public:
  explicit Reader(const Document& d) : doc_(d) {}

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto s = doc_.find(sec);
    if (s == doc_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second.front();
  }
  const Entry& need(const std::string& sec, const std::string& key) const {
    const Entry* e = find(sec, key);
    if (!e) fail(0, "missing required key '" + key + "' in [" + sec + "]");
    return *e;
  }
  bool has_section(const std::string& sec) const { return doc_.count(sec) > 0; }
  const std::vector<Entry>* all(const std::string& sec, const std::string& key) const {
    auto s = doc_.find(sec);
    if (s == doc_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

 private:
  const Document& doc_;
};

double to_double(const Entry& e, const std::string& key) {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) fail(e.line, "'" + key + "' is not a finite number");
  return v;
}

std::int64_t to_int(const Entry& e, const std::string& key) {
  std::int64_t v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end) fail(e.line, "'" + key + "' is not an integer");
  return v;
}

Point2 to_point(const Entry& e, const std::string& key) {
  const auto comma = e.value.find(',');
  if (comma == std::string::npos) fail(e.line, "'" + key + "' needs two comma-separated numbers");
  return {to_double({trim(e.value.substr(0, comma)), e.line}, key),
          to_double({trim(e.value.substr(comma + 1)), e.line}, key)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::flat: return "flat";
    case Scenario::sinusoidal: return "sinusoidal";
    case Scenario::custom: return "custom";
  }
  return "?";
}

const char* to_string(Quadrature q) { return q == Quadrature::gauss3 ? "gauss3" : "gll3"; }

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  const Document doc = tokenize(text);
  const Reader r(doc);
  RunConfig c;
  auto range = [](bool ok, const Entry* e, const std::string& msg) {
    if (!ok) fail(e ? e->line : 0, msg);
  };
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };

  // [run]
  if (const Entry* e = r.find("run", "scenario")) {
    if (e->value == "flat") c.scenario = Scenario::flat;
    else if (e->value == "sinusoidal") c.scenario = Scenario::sinusoidal;
    else if (e->value == "custom") c.scenario = Scenario::custom;
    else fail(e->line, "scenario must be flat, sinusoidal or custom");
  }
  if (const Entry* e = r.find("run", "mode")) {
    if (e->value == "hybrid") c.mode = RunMode::hybrid;
    else if (e->value == "fem") c.mode = RunMode::fem;
    else if (e->value == "fdm") c.mode = RunMode::fdm;
    else fail(e->line, "mode must be hybrid, fem or fdm");
  }
  {
    const Entry& e = r.need("run", "dt");
    c.dt = to_double(e, "dt");
    range(c.dt > 0.0, &e, "dt must be positive");
  }
  {
    const Entry& e = r.need("run", "steps");
    c.steps = to_int(e, "steps");
    range(c.steps >= 0, &e, "steps must be non-negative");
  }
  if (const Entry* e = r.find("run", "energy_stride")) {
    c.energy_stride = static_cast<int>(to_int(*e, "energy_stride"));
    range(c.energy_stride >= 1, e, "energy_stride must be at least 1");
  }
  if (const Entry* e = r.find("run", "snapshot_stride")) {
    c.snapshot_stride = static_cast<int>(to_int(*e, "snapshot_stride"));
    range(c.snapshot_stride >= 0, e, "snapshot_stride must be non-negative");
  }

  // [geometry]
  {
    const Entry& e = r.need("geometry", "nx");
    c.nx = static_cast<int>(to_int(e, "nx"));
    range(c.nx >= 4, &e, "nx must be at least 4");
  }
  {
    const Entry& e = r.need("geometry", "dx");
    c.dx = to_double(e, "dx");
    range(c.dx > 0.0, &e, "dx must be positive");
  }
  {
    const Entry& e = r.need("geometry", "fem_ny");
    c.fem_ny = static_cast<int>(to_int(e, "fem_ny"));
    range(c.fem_ny >= 1, &e, "fem_ny must be at least 1");
  }
  {
    const Entry& e = r.need("geometry", "fdm_ny");
    c.fdm_ny = static_cast<int>(to_int(e, "fdm_ny"));
    range(c.fdm_ny >= 8, &e, "fdm_ny must be at least 8 (boundary closures)");
  }
  if (const Entry* e = r.find("geometry", "amplitude_fraction")) {
    c.amplitude_fraction = to_double(*e, "amplitude_fraction");
    range(c.amplitude_fraction >= 0.0 && c.amplitude_fraction < 0.5, e, "amplitude_fraction must lie in [0, 0.5)");
  }
  if (const Entry* e = r.find("geometry", "jitter")) {
    c.jitter = to_double(*e, "jitter");
    range(c.jitter >= 0.0 && c.jitter <= 0.25, e, "jitter must lie in [0, 0.25]");
  }
  if (const Entry* e = r.find("geometry", "seed")) {
    const std::int64_t s = to_int(*e, "seed");
    range(s >= 0 && s <= 0xffffffffLL, e, "seed must fit in 32 bits");
    c.seed = static_cast<std::uint32_t>(s);
  }
  if (const Entry* e = r.find("geometry", "mesh_file")) c.mesh_file = resolve(e->value);
  if (c.scenario == Scenario::custom && c.mesh_file.empty()) fail(0, "scenario custom needs [geometry] mesh_file");
  if (c.scenario != Scenario::flat && c.mode == RunMode::fdm) {
    fail(0, "fdm mode is only available for the flat scenario");
  }

  // [medium]
  {
    const Entry* t = r.find("medium", "type");
    c.medium.gridded = t && t->value == "gridded";
    if (t && t->value != "gridded" && t->value != "constant") fail(t->line, "medium type must be constant or gridded");
    if (!c.medium.gridded) {
      const Entry& rho = r.need("medium", "rho");
      const Entry& cp = r.need("medium", "cp");
      const Entry& cs = r.need("medium", "cs");
      c.medium.rho = to_double(rho, "rho");
      c.medium.cp = to_double(cp, "cp");
      c.medium.cs = to_double(cs, "cs");
      range(c.medium.rho > 0.0, &rho, "rho must be positive");
      range(c.medium.cs > 0.0, &cs, "cs must be positive");
      range(c.medium.cp > c.medium.cs, &cp, "cp must exceed cs");
    } else {
      c.medium.rho_file = resolve(r.need("medium", "rho_file").value);
      c.medium.cp_file = resolve(r.need("medium", "cp_file").value);
      c.medium.cs_file = resolve(r.need("medium", "cs_file").value);
      const Entry& gnx = r.need("medium", "grid_nx");
      const Entry& gny = r.need("medium", "grid_ny");
      const Entry& gdx = r.need("medium", "grid_dx");
      c.medium.grid.nx = static_cast<int>(to_int(gnx, "grid_nx"));
      c.medium.grid.ny = static_cast<int>(to_int(gny, "grid_ny"));
      c.medium.grid.dx = to_double(gdx, "grid_dx");
      range(c.medium.grid.nx >= 2, &gnx, "grid_nx must be at least 2");
      range(c.medium.grid.ny >= 2, &gny, "grid_ny must be at least 2");
      range(c.medium.grid.dx > 0.0, &gdx, "grid_dx must be positive");
      if (const Entry* o = r.find("medium", "grid_origin")) c.medium.grid.origin = to_point(*o, "grid_origin");
    }
  }

  // [fem]
  if (const Entry* e = r.find("fem", "quadrature")) {
    if (e->value == "gauss3") c.quadrature = Quadrature::gauss3;
    else if (e->value == "gll3") c.quadrature = Quadrature::gll3;
    else fail(e->line, "quadrature must be gauss3 or gll3");
  }

  // [source]
  if (r.has_section("source")) {
    SourceConfig s;
    s.x = to_double(r.need("source", "x"), "x");
    const Entry* y = r.find("source", "y");
    const Entry* d = r.find("source", "depth");
    if ((y != nullptr) == (d != nullptr)) fail(0, "[source] needs exactly one of y or depth");
    if (y) s.y = to_double(*y, "y");
    if (d) {
      s.depth = to_double(*d, "depth");
      range(*s.depth >= 0.0, d, "depth must be non-negative");
      if (c.scenario == Scenario::custom) fail(d->line, "depth needs a flat or sinusoidal surface");
    }
    const Entry& f = r.need("source", "frequency");
    const Entry& t0 = r.need("source", "delay");
    s.frequency = to_double(f, "frequency");
    s.delay = to_double(t0, "delay");
    range(s.frequency > 0.0, &f, "frequency must be positive");
    range(s.delay > 0.0, &t0, "delay must be positive");
    if (const Entry* a = r.find("source", "amplitude")) s.amplitude = to_double(*a, "amplitude");
    c.source = s;
  }

  // [receivers]
  if (const auto* pts = r.all("receivers", "point")) {
    for (const Entry& e : *pts) c.receivers.push_back(to_point(e, "point"));
  }
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str(), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "[run]\nscenario = " << hybridwave::to_string(scenario) << "\nmode = " << hybridwave::to_string(mode)
     << "\ndt = " << fmt(dt) << "\nsteps = " << steps << "\nenergy_stride = " << energy_stride
     << "\nsnapshot_stride = " << snapshot_stride << "\n\n[geometry]\nnx = " << nx << "\ndx = " << fmt(dx)
     << "\nfem_ny = " << fem_ny << "\nfdm_ny = " << fdm_ny << "\namplitude_fraction = " << fmt(amplitude_fraction)
     << "\njitter = " << fmt(jitter) << "\nseed = " << seed << "\n";
  if (!mesh_file.empty()) os << "mesh_file = " << mesh_file.string() << "\n";
  os << "\n[medium]\n";
  if (medium.gridded) {
    os << "type = gridded\nrho_file = " << medium.rho_file.string() << "\ncp_file = " << medium.cp_file.string()
       << "\ncs_file = " << medium.cs_file.string() << "\ngrid_nx = " << medium.grid.nx
       << "\ngrid_ny = " << medium.grid.ny << "\ngrid_dx = " << fmt(medium.grid.dx)
       << "\ngrid_origin = " << fmt(medium.grid.origin.x) << ", " << fmt(medium.grid.origin.y) << "\n";
  } else {
    os << "type = constant\nrho = " << fmt(medium.rho) << "\ncp = " << fmt(medium.cp) << "\ncs = " << fmt(medium.cs)
       << "\n";
  }
  os << "\n[fem]\nquadrature = " << hybridwave::to_string(quadrature) << "\n";
  if (source) {
    os << "\n[source]\nx = " << fmt(source->x) << "\n";
    if (source->y) os << "y = " << fmt(*source->y) << "\n";
    if (source->depth) os << "depth = " << fmt(*source->depth) << "\n";
    os << "frequency = " << fmt(source->frequency) << "\ndelay = " << fmt(source->delay)
       << "\namplitude = " << fmt(source->amplitude) << "\n";
  }
  if (!receivers.empty()) {
    os << "\n[receivers]\n";
    for (const Point2& p : receivers) os << "point = " << fmt(p.x) << ", " << fmt(p.y) << "\n";
  }
  return os.str();
}

double top_surface(const RunConfig& cfg, double x) {
  const double h = (cfg.fem_ny + cfg.fdm_ny) * cfg.dx;
  switch (cfg.scenario) {
    case Scenario::flat: return h;
    case Scenario::sinusoidal: {
      const double width = cfg.nx * cfg.dx;
      const double a = cfg.amplitude_fraction * cfg.fem_ny * cfg.dx;
      return h - a * (1.0 - std::cos(2.0 * std::numbers::pi * x / width));
    }
    case Scenario::custom: break;
  }
  throw Error(ErrorKind::geometry, "custom meshes have no analytic top surface");
}

ScenarioBuild build_scenario(const RunConfig& cfg) {
  IsotropicMedium medium = [&] {
    if (!cfg.medium.gridded) return constant_medium(cfg.medium.rho, cfg.medium.cp, cfg.medium.cs);
    return medium_from_velocities(load_gridded_model(cfg.medium.rho_file, cfg.medium.grid),
                                  load_gridded_model(cfg.medium.cp_file, cfg.medium.grid),
                                  load_gridded_model(cfg.medium.cs_file, cfg.medium.grid));
  }();

  SimulationSetup s;
  s.mode = cfg.mode;
  s.dt = cfg.dt;
  s.quadrature = cfg.quadrature;
  const double y_if = cfg.fdm_ny * cfg.dx;
  const double width = cfg.nx * cfg.dx;

  auto upper_mesh = [&]() -> QuadMesh {
    switch (cfg.scenario) {
      case Scenario::flat: return structured_mesh(cfg.nx, cfg.fem_ny, cfg.dx, {0.0, y_if});
      case Scenario::sinusoidal:
        return sinusoidal_mesh(cfg.nx, cfg.fem_ny, width, cfg.fem_ny * cfg.dx, cfg.amplitude_fraction, {0.0, y_if},
                               {cfg.jitter, cfg.seed});
      case Scenario::custom: return read_mesh(cfg.mesh_file);
    }
    throw Error(ErrorKind::construction, "unknown scenario");
  };

  switch (cfg.mode) {
    case RunMode::hybrid:
      s.fdm_layout = StaggeredLayout2D::make(cfg.nx, cfg.fdm_ny, cfg.dx, {0.0, 0.0});
      s.fem_mesh = upper_mesh();
      break;
    case RunMode::fem:
      s.fem_mesh = cfg.scenario == Scenario::flat
                       ? structured_mesh(cfg.nx, cfg.fem_ny + cfg.fdm_ny, cfg.dx, {0.0, 0.0})
                       : extend_below(upper_mesh(), cfg.fdm_ny, cfg.dx);
      break;
    case RunMode::fdm:
      if (cfg.scenario != Scenario::flat) throw Error(ErrorKind::construction, "fdm mode needs the flat scenario");
      s.fdm_layout = StaggeredLayout2D::make(cfg.nx, cfg.fem_ny + cfg.fdm_ny, cfg.dx, {0.0, 0.0});
      break;
  }

  if (cfg.source) {
    RickerSource src;
    src.frequency = cfg.source->frequency;
    src.delay = cfg.source->delay;
    src.amplitude = cfg.source->amplitude;
    src.location = {cfg.source->x,
                    cfg.source->y ? *cfg.source->y : top_surface(cfg, cfg.source->x) - *cfg.source->depth};
    s.sources.push_back(src);
  }
  for (const Point2& p : cfg.receivers) s.receivers.push_back({p});
  return {std::move(s), std::move(medium)};
}

}  // namespace hybridwave
