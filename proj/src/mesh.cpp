#include "hybridwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "hybridwave/error.hpp"

namespace hybridwave {

std::pair<int, int> QuadMesh::edge_vertices(const Edge& e) const {
  const auto& el = elements[e.element];
  return {el[e.local_edge], el[(e.local_edge + 1) % 4]};
}

namespace {

// Vertex (i, j) of an (nx+1) x (ny+1) lattice.
int lattice(int i, int j, int ny) { return i * (ny + 1) + j; }

QuadMesh lattice_mesh(int nx, int ny, bool periodic, auto&& coord) {
  if (nx < 1 || ny < 1) throw Error(ErrorKind::mesh, "mesh needs nx, ny >= 1");
  if (periodic && nx < 2) throw Error(ErrorKind::mesh, "periodic mesh needs nx >= 2");
  QuadMesh m;
  m.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) m.vertices.push_back(coord(i, j));
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      m.elements.push_back({lattice(i, j, ny), lattice(i + 1, j, ny), lattice(i + 1, j + 1, ny),
                            lattice(i, j + 1, ny)});
    }
  }
  for (int i = 0; i < nx; ++i) m.interface_edges.push_back({i * ny, 0});
  if (periodic) {
    for (int j = 0; j <= ny; ++j) m.periodic_pairs.emplace_back(lattice(0, j, ny), lattice(nx, j, ny));
  }
  return m;
}

double min_jacobian(const QuadMesh& m, int e) {
  static constexpr double pts[] = {-1.0, -0.7745966692414834, 0.0, 0.7745966692414834, 1.0};
  double lo = INFINITY;
  for (double a : pts)
    for (double b : pts) lo = std::min(lo, jacobian_det(m, e, a, b));
  return lo;
}

}  // namespace

QuadMesh structured_mesh(int nx, int ny, double dx, Point2 origin, bool periodic) {
  if (!(dx > 0.0)) throw Error(ErrorKind::mesh, "dx must be positive");
  return lattice_mesh(nx, ny, periodic, [&](int i, int j) {
    return Point2{origin.x + i * dx, origin.y + j * dx};
  });
}

QuadMesh sinusoidal_mesh(int nx, int ny, double width, double base_height, double amplitude_fraction,
                         Point2 origin, const SinusoidalMeshOptions& options) {
  if (!(amplitude_fraction >= 0.0 && amplitude_fraction < 1.0)) {
    throw Error(ErrorKind::mesh, "amplitude fraction must lie in [0, 1)");
  }
  if (!(width > 0.0) || !(base_height > 0.0)) throw Error(ErrorKind::mesh, "width and height must be positive");
  const double dx = width / nx;
  const double amp = amplitude_fraction * base_height;
  auto top = [&](double x) {
    return base_height - amp * (1.0 - std::cos(2.0 * std::numbers::pi * (x - origin.x) / width));
  };

  double jitter = options.jitter;
  for (int attempt = 0; attempt <= 3; ++attempt, jitter *= 0.5) {
    // One draw per lattice vertex, in a fixed order, so the mesh depends only
    // on the seed and the jitter amplitude.
    std::mt19937 rng(options.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::array<double, 2>> noise(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (auto& n : noise) n = {u(rng), u(rng)};

    QuadMesh m = lattice_mesh(nx, ny, true, [&](int i, int j) {
      const double x = origin.x + i * dx;
      const double h = top(x);
      Point2 p{x, origin.y + h * j / ny};
      if (j == 0 || j == ny || jitter == 0.0) return p;
      // Periodic columns share one perturbation and move only vertically.
      const int col = i == nx ? 0 : i;
      const auto& n = noise[lattice(col, j, ny)];
      const double dy = top(origin.x + col * dx) / ny;
      p.y += jitter * dy * n[1];
      if (i != 0 && i != nx) p.x += jitter * dx * n[0];
      return p;
    });

    bool ok = true;
    for (std::size_t e = 0; e < m.elements.size() && ok; ++e) ok = min_jacobian(m, static_cast<int>(e)) > 0.0;
    if (ok) return m;
  }
  throw Error(ErrorKind::construction, "jittered mesh has a non-positive Jacobian after 3 halvings");
}

QuadMesh extend_below(const QuadMesh& mesh, int rows, double dx) {
  if (rows < 1) return mesh;
  if (mesh.interface_edges.empty()) throw Error(ErrorKind::mesh, "mesh has no interface edges to extend from");
  QuadMesh m = mesh;

  // Bottom vertex chain, left to right.
  std::vector<int> chain;
  for (const auto& e : mesh.interface_edges) {
    auto [a, b] = mesh.edge_vertices(e);
    if (mesh.vertices[a].x > mesh.vertices[b].x) std::swap(a, b);
    if (chain.empty()) chain.push_back(a);
    chain.push_back(b);
  }
  const int ncol = static_cast<int>(chain.size());
  const bool periodic = !mesh.periodic_pairs.empty();

  std::vector<int> upper = chain;
  m.interface_edges.clear();
  for (int k = 1; k <= rows; ++k) {
    std::vector<int> lower(ncol);
    for (int i = 0; i < ncol; ++i) {
      lower[i] = static_cast<int>(m.vertices.size());
      m.vertices.push_back({mesh.vertices[chain[i]].x, mesh.vertices[chain[0]].y - k * dx});
    }
    for (int i = 0; i + 1 < ncol; ++i) {
      m.elements.push_back({lower[i], lower[i + 1], upper[i + 1], upper[i]});
      if (k == rows) m.interface_edges.push_back({static_cast<int>(m.elements.size()) - 1, 0});
    }
    if (periodic) m.periodic_pairs.emplace_back(lower.front(), lower.back());
    upper = std::move(lower);
  }
  return m;
}

Point2 map_to_physical(const QuadMesh& mesh, int e, double xi, double eta) {
  const auto& el = mesh.elements[e];
  const double n[4] = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta), 0.25 * (1 + xi) * (1 + eta),
                       0.25 * (1 - xi) * (1 + eta)};
  Point2 p{0.0, 0.0};
  for (int k = 0; k < 4; ++k) {
    p.x += n[k] * mesh.vertices[el[k]].x;
    p.y += n[k] * mesh.vertices[el[k]].y;
  }
  return p;
}

double jacobian_det(const QuadMesh& mesh, int e, double xi, double eta) {
  const auto& el = mesh.elements[e];
  const double dxi[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta)};
  const double deta[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi)};
  double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
  for (int k = 0; k < 4; ++k) {
    const Point2 v = mesh.vertices[el[k]];
    j00 += dxi[k] * v.x;
    j01 += deta[k] * v.x;
    j10 += dxi[k] * v.y;
    j11 += deta[k] * v.y;
  }
  return j00 * j11 - j01 * j10;
}

void validate_mesh(const QuadMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    for (int v : mesh.elements[e]) {
      if (v < 0 || v >= nv) throw Error(ErrorKind::mesh, "element " + std::to_string(e) + " has a bad vertex id");
    }
    if (!(min_jacobian(mesh, static_cast<int>(e)) > 0.0)) {
      throw Error(ErrorKind::mesh, "element " + std::to_string(e) + " has a non-positive Jacobian");
    }
  }
  for (const auto& [l, r] : mesh.periodic_pairs) {
    if (l < 0 || l >= nv || r < 0 || r >= nv) throw Error(ErrorKind::mesh, "bad periodic pair");
    const double scale = std::max(1.0, std::abs(mesh.vertices[l].y));
    if (std::abs(mesh.vertices[l].y - mesh.vertices[r].y) > 1e-12 * scale) {
      throw Error(ErrorKind::mesh, "periodic pair at different heights");
    }
  }
  for (const auto& ed : mesh.interface_edges) {
    if (ed.element < 0 || ed.element >= static_cast<int>(mesh.elements.size()) || ed.local_edge < 0 ||
        ed.local_edge > 3) {
      throw Error(ErrorKind::mesh, "bad interface edge");
    }
  }
}

void validate_interface(const QuadMesh& mesh, double x0, double dx, int nx) {
  if (static_cast<int>(mesh.interface_edges.size()) != nx) {
    throw Error(ErrorKind::mesh, "interface has " + std::to_string(mesh.interface_edges.size()) +
                                     " edges, FDM region has " + std::to_string(nx) + " cells");
  }
  const double tol = 1e-9 * dx;
  double y0 = 0.0;
  for (int i = 0; i < nx; ++i) {
    auto [a, b] = mesh.edge_vertices(mesh.interface_edges[i]);
    Point2 pa = mesh.vertices[a], pb = mesh.vertices[b];
    if (pa.x > pb.x) std::swap(pa, pb);
    if (i == 0) y0 = pa.y;
    if (std::abs(pa.y - y0) > tol || std::abs(pb.y - y0) > tol) {
      throw Error(ErrorKind::mesh, "interface edge " + std::to_string(i) + " is not on a horizontal line");
    }
    if (std::abs(pa.x - (x0 + i * dx)) > tol || std::abs(pb.x - (x0 + (i + 1) * dx)) > tol) {
      throw Error(ErrorKind::mesh, "interface edge " + std::to_string(i) + " does not match the FDM grid");
    }
  }
}

void write_mesh(const QuadMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << std::setprecision(17);
  out << "hybridwave-mesh 1\nvertices " << mesh.vertices.size() << '\n';
  for (const auto& v : mesh.vertices) out << v.x << ' ' << v.y << '\n';
  out << "elements " << mesh.elements.size() << '\n';
  for (const auto& e : mesh.elements) out << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << '\n';
  out << "interface " << mesh.interface_edges.size() << '\n';
  for (const auto& e : mesh.interface_edges) out << e.element << ' ' << e.local_edge << '\n';
  out << "periodic " << mesh.periodic_pairs.size() << '\n';
  for (const auto& [l, r] : mesh.periodic_pairs) out << l << ' ' << r << '\n';
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

QuadMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::format, path.string() + ": " + what);
  };
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "hybridwave-mesh" || version != 1) fail("not a hybridwave mesh file");
  auto section = [&](const char* name) {
    std::string t;
    long n = -1;
    if (!(in >> t >> n) || t != name || n < 0) fail(std::string("expected section '") + name + "'");
    return static_cast<std::size_t>(n);
  };
  QuadMesh m;
  m.vertices.resize(section("vertices"));
  for (auto& v : m.vertices)
    if (!(in >> v.x >> v.y)) fail("truncated vertex list");
  m.elements.resize(section("elements"));
  for (auto& e : m.elements)
    if (!(in >> e[0] >> e[1] >> e[2] >> e[3])) fail("truncated element list");
  m.interface_edges.resize(section("interface"));
  for (auto& e : m.interface_edges)
    if (!(in >> e.element >> e.local_edge)) fail("truncated interface list");
  m.periodic_pairs.resize(section("periodic"));
  for (auto& p : m.periodic_pairs)
    if (!(in >> p.first >> p.second)) fail("truncated periodic list");
  validate_mesh(m);
  return m;
}

}  // namespace hybridwave
