#include "sslab/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

namespace sslab {

using nlohmann::json;

namespace {

std::string escape_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

// A position in the document: the value plus its JSON pointer.
struct Node {
  const json& value;
  std::string pointer;

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(pointer, message); }

  Node at(std::string_view key) const { return {value.at(std::string(key)), pointer + "/" + escape_token(key)}; }
  Node at(std::size_t index) const { return {value.at(index), pointer + "/" + std::to_string(index)}; }
  bool has(std::string_view key) const { return value.contains(std::string(key)); }

  void object(std::initializer_list<std::string_view> allowed, std::initializer_list<std::string_view> required = {}) const {
    if (!value.is_object()) fail("expected an object");
    for (const auto& [key, _] : value.items()) {
      bool known = false;
      for (std::string_view a : allowed) known = known || key == a;
      if (!known) throw ConfigError(pointer + "/" + escape_token(key), "unknown key '" + key + "'");
    }
    for (std::string_view r : required)
      if (!has(r)) throw ConfigError(pointer + "/" + escape_token(r), "missing required key '" + std::string(r) + "'");
  }

  const json& array() const {
    if (!value.is_array()) fail("expected an array");
    return value;
  }

  double number() const {
    if (!value.is_number()) fail("expected a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }

  long long integer(long long lo = std::numeric_limits<int>::min(), long long hi = std::numeric_limits<int>::max()) const {
    if (!value.is_number_integer()) fail("expected an integer");
    const long long v = value.get<long long>();
    if (v < lo) fail("must be >= " + std::to_string(lo));
    if (v > hi) fail("must be <= " + std::to_string(hi));
    return v;
  }

  bool boolean() const {
    if (!value.is_boolean()) fail("expected a boolean");
    return value.get<bool>();
  }

  std::string string() const {
    if (!value.is_string()) fail("expected a string");
    return value.get<std::string>();
  }

  cplx complex() const {
    if (value.is_number()) return {number(), 0.0};
    if (value.is_array() && value.size() == 2) return {at(std::size_t{0}).number(), at(std::size_t{1}).number()};
    fail("expected a number or a [re, im] pair");
  }

  Matrix matrix() const {
    const json& rows = array();
    const std::size_t n = rows.size();
    if (n == 0) fail("matrix must not be empty");
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      Node row = at(i);
      if (row.array().size() != n) row.fail("matrix must be square");
      for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.at(j).complex();
    }
    return m;
  }

  std::vector<int> int_list(long long lo, long long hi) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < array().size(); ++i) out.push_back(static_cast<int>(at(i).integer(lo, hi)));
    return out;
  }
};

std::vector<Harmonic> parse_harmonics(const Node& node) {
  std::vector<Harmonic> out;
  for (std::size_t i = 0; i < node.array().size(); ++i) {
    Node h = node.at(i);
    h.object({"j", "re", "im"}, {"j"});
    Harmonic harm;
    harm.j = static_cast<int>(h.at("j").integer());
    if (harm.j == 0) h.at("j").fail("harmonic index must be nonzero");
    const double re = h.has("re") ? h.at("re").number() : 0.0;
    const double im = h.has("im") ? h.at("im").number() : 0.0;
    harm.coefficient = {re, im};
    out.push_back(harm);
  }
  return out;
}

ObservableSpec parse_observable(const Node& node) {
  node.object({"terms", "symmetrize"}, {"terms"});
  ObservableSpec spec;
  if (node.has("symmetrize")) spec.symmetrize = node.at("symmetrize").boolean();
  Node terms = node.at("terms");
  if (terms.array().empty()) terms.fail("observable needs at least one term");
  for (std::size_t i = 0; i < terms.array().size(); ++i) {
    Node t = terms.at(i);
    t.object({"f", "p_poly"});
    ObservableTerm term;
    if (t.has("f")) term.f = parse_harmonics(t.at("f"));
    if (t.has("p_poly")) {
      Node p = t.at("p_poly");
      std::vector<double> coeffs;
      for (std::size_t k = 0; k < p.array().size(); ++k) coeffs.push_back(p.at(k).number());
      if (coeffs.empty()) p.fail("p_poly must not be empty");
      if (static_cast<int>(coeffs.size()) - 1 > kMaxMomentumDegree) p.fail("momentum polynomial degree exceeds 6");
      term.p_poly = std::move(coeffs);
    }
    if (!term.f && !term.p_poly) t.fail("term needs 'f' or 'p_poly'");
    if (term.f && term.p_poly && !spec.symmetrize) t.fail("a term with both 'f' and 'p_poly' requires symmetrize = true");
    spec.terms.push_back(std::move(term));
  }
  return spec;
}

std::vector<DriveTerm> parse_drive_terms(const Node& node, int dimension) {
  std::vector<DriveTerm> out;
  for (std::size_t i = 0; i < node.array().size(); ++i) {
    Node d = node.at(i);
    d.object({"harmonic", "kind", "matrix"}, {"kind", "matrix"});
    DriveTerm term;
    if (d.has("harmonic")) term.harmonic = static_cast<int>(d.at("harmonic").integer(1, 64));
    const std::string kind = d.at("kind").string();
    if (kind == "cos")
      term.kind = DriveKind::cos;
    else if (kind == "sin")
      term.kind = DriveKind::sin;
    else
      d.at("kind").fail("kind must be 'cos' or 'sin'");
    term.matrix = d.at("matrix").matrix();
    if (term.matrix.rows() != dimension) d.at("matrix").fail("matrix dimension differs from h0");
    if (hermiticity_defect(term.matrix) > 1e-12 * std::max(1.0, max_abs(term.matrix))) d.at("matrix").fail("matrix is not Hermitian");
    out.push_back(std::move(term));
  }
  return out;
}

StateLabel parse_label(const Node& node) {
  if (node.array().size() != 2) node.fail("expected [band, class]");
  return {static_cast<int>(node.at(std::size_t{0}).integer(0)), static_cast<int>(node.at(std::size_t{1}).integer(0))};
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::bands: return "bands";
    case ScenarioKind::superselect: return "superselect";
    case ScenarioKind::wannier: return "wannier";
    case ScenarioKind::floquet: return "floquet";
  }
  return "unknown";
}

#define SSLAB_TOLERANCE_FIELDS(X) \
  X(structural)                   \
  X(solver)                       \
  X(residual)                     \
  X(periodicity)                  \
  X(coherence)                    \
  X(breaking)                     \
  X(fringe_match)                 \
  X(quasienergy)                  \
  X(unitarity)                    \
  X(floquet_residual)             \
  X(mode_periodicity)             \
  X(phase_relation)               \
  X(bound_slack)                  \
  X(commuting)

bool Tolerances::set(const std::string& name, double value) {
#define X(field)         \
  if (name == #field) {  \
    field = value;       \
    return true;         \
  }
  SSLAB_TOLERANCE_FIELDS(X)
#undef X
  return false;
}

json Tolerances::to_json() const {
  json out = json::object();
#define X(field) out[#field] = field;
  SSLAB_TOLERANCE_FIELDS(X)
#undef X
  return out;
}

ScenarioConfig parse_config_json(const json& doc) {
  const Node root{doc, ""};
  root.object({"kind", "lattice", "potential", "battery", "superselect", "wannier", "drive", "floquet", "tolerances",
               "output"},
              {"kind"});

  ScenarioConfig cfg;
  cfg.source = doc;
  const std::string kind = root.at("kind").string();
  if (kind == "bands")
    cfg.kind = ScenarioKind::bands;
  else if (kind == "superselect")
    cfg.kind = ScenarioKind::superselect;
  else if (kind == "wannier")
    cfg.kind = ScenarioKind::wannier;
  else if (kind == "floquet")
    cfg.kind = ScenarioKind::floquet;
  else
    root.at("kind").fail("kind must be one of bands, superselect, wannier, floquet");

  const bool lattice_kind = cfg.kind != ScenarioKind::floquet;
  if (lattice_kind && !root.has("lattice")) throw ConfigError("/lattice", "missing required key 'lattice'");
  if (!lattice_kind && !root.has("drive")) throw ConfigError("/drive", "missing required key 'drive'");

  if (root.has("lattice")) {
    Node l = root.at("lattice");
    l.object({"a", "cells", "cutoff", "mass", "hbar", "pad_basis"}, {"cells", "cutoff"});
    if (l.has("a")) cfg.lattice.lattice_constant = l.at("a").positive();
    cfg.lattice.cells = static_cast<int>(l.at("cells").integer());
    if (cfg.lattice.cells < 2) l.at("cells").fail("cells must be >= 2");
    cfg.lattice.cutoff = static_cast<int>(l.at("cutoff").integer());
    if (cfg.lattice.cutoff < 1) l.at("cutoff").fail("cutoff must be >= 1");
    if (l.has("mass")) cfg.lattice.mass = l.at("mass").positive();
    if (l.has("hbar")) cfg.lattice.hbar = l.at("hbar").positive();
    if (l.has("pad_basis")) cfg.lattice.pad_basis = l.at("pad_basis").boolean();
    try {
      const PlaneWaveBasis basis(cfg.lattice);
      if (basis.dimension() > 512) l.fail("basis dimension exceeds the cap of 512");
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput& e) {
      l.at("cutoff").fail(e.what());
    }
  }

  if (root.has("potential")) {
    Node p = root.at("potential");
    p.object({"v0", "harmonics"});
    const double v0 = p.has("v0") ? p.at("v0").number() : 0.0;
    std::vector<Harmonic> harmonics;
    if (p.has("harmonics")) harmonics = parse_harmonics(p.at("harmonics"));
    cfg.potential = PotentialSpec(v0, harmonics);
  }

  if (root.has("battery")) {
    Node b = root.at("battery");
    b.object({"seeds", "first_seed", "max_harmonic", "degree", "named", "observables", "breaking"});
    if (b.has("seeds")) cfg.battery.seeds = static_cast<int>(b.at("seeds").integer(0, 10000));
    if (b.has("first_seed")) cfg.battery.first_seed = static_cast<std::uint64_t>(b.at("first_seed").integer(0, std::numeric_limits<long long>::max()));
    if (b.has("max_harmonic")) cfg.battery.max_harmonic = static_cast<int>(b.at("max_harmonic").integer(0, 256));
    if (b.has("degree")) cfg.battery.degree = static_cast<int>(b.at("degree").integer(0, kMaxMomentumDegree));
    if (b.has("named")) {
      Node n = b.at("named");
      cfg.battery.named.clear();
      for (std::size_t i = 0; i < n.array().size(); ++i) {
        std::string name = n.at(i).string();
        bool known = false;
        for (std::string_view k : kNamedObservables) known = known || name == k;
        if (!known) n.at(i).fail("unknown named observable '" + name + "'");
        cfg.battery.named.push_back(std::move(name));
      }
    }
    if (b.has("observables")) {
      Node o = b.at("observables");
      for (std::size_t i = 0; i < o.array().size(); ++i) {
        Node entry = o.at(i);
        entry.object({"id", "spec"}, {"id", "spec"});
        cfg.custom_observables.emplace_back(entry.at("id").string(), parse_observable(entry.at("spec")));
      }
    }
    if (b.has("breaking")) cfg.breaking_shifts = b.at("breaking").int_list(1, 1024);
    if (lattice_kind) {
      const PlaneWaveBasis basis(cfg.lattice);
      if (cfg.battery.max_harmonic * cfg.lattice.cells > basis.dimension() - 1)
        b.at("max_harmonic").fail("harmonic not reachable in the basis");
      for (std::size_t i = 0; i < cfg.breaking_shifts.size(); ++i) {
        const int s = cfg.breaking_shifts[i];
        if (s % cfg.lattice.cells == 0 || s > basis.dimension() - 1)
          b.at("breaking").at(i).fail("shift must be in [1, D-1] and not a multiple of cells");
      }
    }
  }
  if (lattice_kind) {
    const PlaneWaveBasis basis(cfg.lattice);
    if (cfg.battery.max_harmonic * cfg.lattice.cells > basis.dimension() - 1)
      cfg.battery.max_harmonic = (basis.dimension() - 1) / cfg.lattice.cells;
  }

  if (root.has("superselect")) {
    Node s = root.at("superselect");
    s.object({"fringe_points", "fringes"});
    if (s.has("fringe_points")) cfg.fringe_points = static_cast<int>(s.at("fringe_points").integer(8, 1 << 20));
    if (s.has("fringes")) {
      Node f = s.at("fringes");
      for (std::size_t i = 0; i < f.array().size(); ++i) {
        Node e = f.at(i);
        e.object({"a", "b", "observable"}, {"a", "b", "observable"});
        FringeRequest req{parse_label(e.at("a")), parse_label(e.at("b")), e.at("observable").string()};
        const PlaneWaveBasis basis(cfg.lattice);
        for (const auto& [label, key] : {std::pair{req.a, "a"}, std::pair{req.b, "b"}}) {
          if (label.band >= basis.states_per_class() || label.wavevector_class >= cfg.lattice.cells)
            e.at(key).fail("state label out of range");
        }
        cfg.fringes.push_back(std::move(req));
      }
    }
  }

  if (root.has("wannier")) {
    Node w = root.at("wannier");
    w.object({"bands", "home_cell"});
    if (w.has("bands")) {
      const PlaneWaveBasis basis(cfg.lattice);
      cfg.wannier_bands = w.at("bands").int_list(0, basis.states_per_class() - 1);
    }
    if (w.has("home_cell")) cfg.home_cell = static_cast<int>(w.at("home_cell").integer(0, cfg.lattice.cells - 1));
  }

  if (root.has("drive")) {
    Node d = root.at("drive");
    d.object({"omega", "hbar", "h0", "drives"}, {"h0"});
    if (d.has("omega")) cfg.drive.omega = d.at("omega").positive();
    if (d.has("hbar")) cfg.drive.hbar = d.at("hbar").positive();
    cfg.drive.h0 = d.at("h0").matrix();
    const int dim = cfg.drive.dimension();
    if (dim < 2 || dim > 16) d.at("h0").fail("dimension must be in [2, 16]");
    if (hermiticity_defect(cfg.drive.h0) > 1e-12 * std::max(1.0, max_abs(cfg.drive.h0))) d.at("h0").fail("h0 is not Hermitian");
    if (d.has("drives")) cfg.drive.drives = parse_drive_terms(d.at("drives"), dim);
  }

  if (root.has("floquet")) {
    Node f = root.at("floquet");
    f.object({"steps", "method", "sambe_max_harmonic", "samples_per_period", "probe"});
    if (f.has("steps")) cfg.steps = static_cast<int>(f.at("steps").integer(64, 1 << 24));
    if (f.has("method")) {
      const std::string m = f.at("method").string();
      if (m == "midpoint-exponential")
        cfg.method = Integrator::midpoint_exponential;
      else if (m == "fourth-order")
        cfg.method = Integrator::fourth_order;
      else
        f.at("method").fail("method must be 'midpoint-exponential' or 'fourth-order'");
    }
    if (f.has("sambe_max_harmonic")) cfg.sambe_max_harmonic = static_cast<int>(f.at("sambe_max_harmonic").integer(4, 200));
    if (f.has("samples_per_period")) cfg.samples_per_period = static_cast<int>(f.at("samples_per_period").integer(1, 1 << 20));
    if (cfg.steps % cfg.samples_per_period != 0) f.fail("steps must be a multiple of samples_per_period");
    if (f.has("probe")) {
      Node p = f.at("probe");
      p.object({"modes", "periods", "observable"}, {"observable"});
      ProbeConfig probe;
      const int dim = cfg.drive.dimension();
      if (p.has("modes")) {
        const std::vector<int> modes = p.at("modes").int_list(0, dim - 1);
        if (modes.size() != 2 || modes[0] == modes[1]) p.at("modes").fail("expected two distinct mode indices");
        probe.mode_a = modes[0];
        probe.mode_b = modes[1];
      }
      if (p.has("periods")) {
        probe.periods = p.at("periods").int_list(1, 4096);
        if (probe.periods.empty()) p.at("periods").fail("need at least one window");
      }
      Node o = p.at("observable");
      o.object({"static", "harmonics"}, {"static"});
      probe.observable.static_part = o.at("static").matrix();
      if (probe.observable.static_part.rows() != dim) o.at("static").fail("dimension differs from h0");
      if (hermiticity_defect(probe.observable.static_part) > 1e-12) o.at("static").fail("static part is not Hermitian");
      if (o.has("harmonics")) probe.observable.harmonics = parse_drive_terms(o.at("harmonics"), dim);
      cfg.probe = std::move(probe);
    }
  }

  if (root.has("tolerances")) {
    Node t = root.at("tolerances");
    if (!t.value.is_object()) t.fail("expected an object");
    for (const auto& [key, _] : t.value.items()) {
      Node v = t.at(key);
      if (!cfg.tolerances.set(key, v.positive())) v.fail("unknown tolerance '" + key + "'");
    }
  }

  if (root.has("output")) {
    Node o = root.at("output");
    o.object({"csv", "report", "fringe_prefix"});
    if (o.has("csv")) cfg.csv_path = o.at("csv").string();
    if (o.has("report")) cfg.report_path = o.at("report").string();
    if (o.has("fringe_prefix")) cfg.fringe_prefix = o.at("fringe_prefix").string();
  }
  return cfg;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

ScenarioConfig parse_config(const std::filesystem::path& path) { return parse_config_json(load_json_file(path)); }

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json observable_spec_to_json(const ObservableSpec& spec) {
  json terms = json::array();
  for (const ObservableTerm& t : spec.terms) {
    json term = json::object();
    if (t.f) {
      json f = json::array();
      for (const Harmonic& h : *t.f) f.push_back({{"j", h.j}, {"re", h.coefficient.real()}, {"im", h.coefficient.imag()}});
      term["f"] = std::move(f);
    }
    if (t.p_poly) term["p_poly"] = *t.p_poly;
    terms.push_back(std::move(term));
  }
  return {{"terms", std::move(terms)}, {"symmetrize", spec.symmetrize}};
}

}  // namespace sslab
