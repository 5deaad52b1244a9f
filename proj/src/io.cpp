#include "wnet/io.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "wnet/error.hpp"

namespace wnet::io {

namespace {

[[noreturn]] void fail(const std::string& at, const std::string& msg) {
  throw Error(ErrorKind::Schema, (at.empty() ? std::string("/") : at) + ": " + msg);
}

const json& field(const json& j, const char* key, const std::string& at) {
  if (!j.is_object()) fail(at, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(at + "/" + key, "missing");
  return *it;
}

double number(const json& j, const std::string& at) {
  if (!j.is_number()) fail(at, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(at, "expected a finite number");
  return v;
}

std::size_t count(const json& j, const std::string& at) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(at, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

const json& array(const json& j, const std::string& at) {
  if (!j.is_array()) fail(at, "expected an array");
  return j;
}

std::vector<double> numbers(const json& j, const std::string& at) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, at).size(); ++i) out.push_back(number(j[i], at + "/" + std::to_string(i)));
  return out;
}

std::vector<std::size_t> counts(const json& j, const std::string& at) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < array(j, at).size(); ++i) out.push_back(count(j[i], at + "/" + std::to_string(i)));
  return out;
}

// Non-finite doubles become strings; JSON has no inf.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json rows(const std::vector<double>& flat, std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; cols > 0 && r < flat.size() / cols; ++r) {
    out.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                      flat.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)));
  }
  return out;
}

json matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

}  // namespace

AnyMeasure parse_measure(const json& j, const std::string& at) {
  const json& type = field(j, "type", at);
  if (!type.is_string()) fail(at + "/type", "expected a string");
  const std::size_t dim = count(field(j, "dim", at), at + "/dim");
  if (dim == 0) fail(at + "/dim", "must be positive");

  if (type == "points") {
    const json& pts = array(field(j, "points", at), at + "/points");
    std::vector<double> coords;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string here = at + "/points/" + std::to_string(i);
      const auto p = numbers(pts[i], here);
      if (p.size() != dim) fail(here, "expected " + std::to_string(dim) + " coordinates");
      coords.insert(coords.end(), p.begin(), p.end());
    }
    auto weights = numbers(field(j, "weights", at), at + "/weights");
    if (weights.size() != pts.size()) fail(at + "/weights", "length differs from points");
    try {
      return DiscreteMeasure(dim, std::move(coords), std::move(weights));
    } catch (const Error& e) {
      fail(at + "/weights", e.what());
    }
  }
  if (type == "grid") {
    GridGeometry g;
    g.dim = dim;
    const json& box = array(field(j, "box", at), at + "/box");
    if (box.size() != dim) fail(at + "/box", "expected " + std::to_string(dim) + " intervals");
    for (std::size_t a = 0; a < dim; ++a) {
      const auto lohi = numbers(box[a], at + "/box/" + std::to_string(a));
      if (lohi.size() != 2) fail(at + "/box/" + std::to_string(a), "expected [low, high]");
      g.box.emplace_back(lohi[0], lohi[1]);
    }
    g.resolution = counts(field(j, "resolution", at), at + "/resolution");
    if (g.resolution.size() != dim) fail(at + "/resolution", "expected " + std::to_string(dim) + " entries");
    try {
      g.validate();
    } catch (const Error& e) {
      fail(at + "/box", e.what());
    }
    auto mass = numbers(field(j, "cell_mass", at), at + "/cell_mass");
    if (mass.size() != g.cell_count()) fail(at + "/cell_mass", "expected " + std::to_string(g.cell_count()) + " cells");
    try {
      return GridMeasure(std::move(g), std::move(mass));
    } catch (const Error& e) {
      fail(at + "/cell_mass", e.what());
    }
  }
  fail(at + "/type", "must be \"points\" or \"grid\"");
}

DiscreteMeasure as_discrete(const AnyMeasure& m) {
  if (const auto* d = std::get_if<DiscreteMeasure>(&m)) return *d;
  return grid_to_discrete(std::get<GridMeasure>(m));
}

json to_json(const DiscreteMeasure& mu) {
  return {{"type", "points"}, {"dim", mu.dim()}, {"points", rows(mu.coords(), mu.dim())}, {"weights", mu.weights()}};
}

json to_json(const GridMeasure& mu) {
  json box = json::array();
  for (const auto& [lo, hi] : mu.geometry().box) box.push_back({lo, hi});
  return {{"type", "grid"},
          {"dim", mu.dim()},
          {"box", box},
          {"resolution", mu.geometry().resolution},
          {"cell_mass", mu.cell_mass()}};
}

json to_json(const AnyMeasure& mu) {
  return std::visit([](const auto& m) { return to_json(m); }, mu);
}

json to_json(const TransportPlan& plan) {
  return {{"mass", rows(plan.mass, plan.cols())},
          {"dual_u", plan.dual_u},
          {"dual_v", plan.dual_v},
          {"cost", plan.cost_value},
          {"duality_gap", plan.duality_gap()}};
}

json to_json(const MultiPlan& plan) {
  json atoms = json::array();
  for (const auto& a : plan.atoms) atoms.push_back({{"idx", a.idx}, {"mass", a.mass}});
  return {{"atoms", atoms}, {"cost", plan.cost_value}, {"duality_gap", plan.duality_gap}};
}

json to_json(const Topology& t) {
  json edges = json::array();
  for (const auto& [u, v] : t.edges) edges.push_back({u, v});
  return {{"vertices", t.vertex_count}, {"edges", edges}, {"terminals", t.terminals}};
}

json to_json(const NetworkSolution& s) {
  json vertices = json::array();
  for (const auto& mu : s.assignment) vertices.push_back(to_json(mu));
  return {{"topology", to_json(s.topology)},
          {"total_length", s.total_length},
          {"edge_lengths", s.edge_lengths},
          {"converged", s.converged},
          {"iterations", s.iterations},
          {"contractions", s.contractions},
          {"length_history", s.length_history},
          {"vertices", vertices}};
}

json to_json(const MaxPrincipleReport& r) {
  return {{"functional", r.functional},      {"boundary_max", num(r.boundary_max)},
          {"network_max", num(r.network_max)}, {"samples_per_edge", r.samples_per_edge},
          {"margin", num(r.margin)},          {"tolerance", r.tolerance},
          {"infinite_boundary", r.infinite_boundary}, {"pass", r.pass}};
}

json to_json(const AngleReport& r) {
  json pairs = json::array();
  for (const auto& [a, b] : r.pairs) pairs.push_back({a, b});
  return {{"vertex", r.vertex},       {"neighbors", r.neighbors},         {"pairs", pairs},
          {"angles", r.angles},       {"max_deviation", r.max_deviation}, {"angle_sum", r.angle_sum},
          {"coplanar", r.coplanar},   {"spread", r.spread}};
}

json to_json(const LinftyReport& r) {
  return {{"variant", r.variant}, {"norm", r.norm}, {"bound", num(r.bound)}, {"pass", r.pass}};
}

json to_json(const CounterexampleCertificate& c) {
  return {{"mu1", to_json(c.mu1)},
          {"mu2", to_json(c.mu2)},
          {"nu_a", to_json(c.nu_a)},
          {"nu_b", to_json(c.nu_b)},
          {"matching_costs", {c.cost_a, c.cost_b}},
          {"w2_mu1", {c.d1a, c.d1b}},
          {"w2_mu2", {c.d2a, c.d2b}},
          {"w2_nu_a_nu_b", c.mutual},
          {"reflection_swaps", c.reflection_swaps},
          {"pass", c.pass}};
}

json to_json(const TTensorReport& r) {
  json blocks = json::array();
  for (const auto& row : r.hessian_blocks) {
    json out = json::array();
    for (const auto& b : row) out.push_back(matrix(b));
    blocks.push_back(out);
  }
  std::vector<double> eig(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
  return {{"l", r.l},
          {"n", r.n},
          {"sigma", r.sigma},
          {"hessian_blocks", blocks},
          {"S", matrix(r.S)},
          {"H", matrix(r.H)},
          {"T", matrix(r.T)},
          {"eigenvalues", eig},
          {"max_eigenvalue", r.max_eigenvalue},
          {"closed_form_error", num(r.closed_form_error)},
          {"twisted", r.twisted},
          {"nondegenerate", r.nondegenerate},
          {"T_negative", r.T_negative}};
}

bool Instance::all_grid() const {
  for (const auto& m : boundary) {
    if (!std::holds_alternative<GridMeasure>(m)) return false;
  }
  return true;
}

std::vector<DiscreteMeasure> Instance::discrete_boundary() const {
  std::vector<DiscreteMeasure> out;
  for (const auto& m : boundary) out.push_back(as_discrete(m));
  return out;
}

std::vector<GridMeasure> Instance::grid_boundary() const {
  std::vector<GridMeasure> out;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const auto* g = std::get_if<GridMeasure>(&boundary[i]);
    if (!g) fail("/boundary/" + std::to_string(i), "expected a grid measure");
    out.push_back(*g);
  }
  return out;
}

Instance parse_instance(const json& j) {
  Instance inst;
  inst.dim = count(field(j, "dim", ""), "/dim");
  const json& boundary = array(field(j, "boundary", ""), "/boundary");
  if (boundary.size() < 2) fail("/boundary", "need at least two boundary measures");
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const std::string at = "/boundary/" + std::to_string(i);
    inst.boundary.push_back(parse_measure(boundary[i], at));
    const std::size_t d = std::visit([](const auto& m) { return m.dim(); }, inst.boundary.back());
    if (d != inst.dim) fail(at + "/dim", "differs from instance dim");
  }
  const auto it = j.find("topology");
  if (it == j.end() || (it->is_string() && *it == "auto")) return inst;

  const json& t = *it;
  const std::size_t v = count(field(t, "vertices", "/topology"), "/topology/vertices");
  const auto terminals = counts(field(t, "terminals", "/topology"), "/topology/terminals");
  if (terminals.size() != inst.boundary.size()) fail("/topology/terminals", "one terminal per boundary measure");
  // Relabel so terminal i becomes vertex i and free vertices follow in order.
  std::map<std::size_t, std::size_t> relabel;
  for (std::size_t i = 0; i < terminals.size(); ++i) {
    if (terminals[i] >= v || !relabel.emplace(terminals[i], i).second) {
      fail("/topology/terminals/" + std::to_string(i), "out of range or repeated");
    }
  }
  for (std::size_t x = 0, next = terminals.size(); x < v; ++x) {
    if (!relabel.count(x)) relabel[x] = next++;
  }
  std::vector<Edge> edges;
  const json& ej = array(field(t, "edges", "/topology"), "/topology/edges");
  for (std::size_t e = 0; e < ej.size(); ++e) {
    const std::string at = "/topology/edges/" + std::to_string(e);
    const auto uv = counts(ej[e], at);
    if (uv.size() != 2 || uv[0] >= v || uv[1] >= v) fail(at, "expected [i, j] with vertices in range");
    edges.emplace_back(relabel[uv[0]], relabel[uv[1]]);
  }
  try {
    inst.topology = Topology::make(terminals.size(), v, std::move(edges));
  } catch (const Error& e) {
    fail("/topology", e.what());
  }
  return inst;
}

MarginalsInput parse_marginals(const json& j) {
  MarginalsInput in;
  const json& ms = array(field(j, "marginals", ""), "/marginals");
  for (std::size_t i = 0; i < ms.size(); ++i) in.marginals.push_back(parse_measure(ms[i], "/marginals/" + std::to_string(i)));
  in.sigmas = numbers(field(j, "sigmas", ""), "/sigmas");
  if (in.sigmas.size() != in.marginals.size()) fail("/sigmas", "one sigma per marginal");
  for (std::size_t i = 0; i < in.sigmas.size(); ++i) {
    if (!(in.sigmas[i] > 0.0)) fail("/sigmas/" + std::to_string(i), "must be positive");
  }
  return in;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, path + ": " + e.what());
  }
}

}  // namespace wnet::io
