#include "vmproj/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace vmproj {

namespace {

using nlohmann::json;

class Parser {
 public:
  Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    std::ostringstream out;
    out << source_ << ':' << lineOf(field) << ": " << field << ": " << message;
    throw ConfigError(out.str());
  }

  /// Line of the first occurrence of the key, 1 when absent.
  int lineOf(const std::string& field) const {
    const std::string key = "\"" + field.substr(field.find_last_of('.') + 1) + "\"";
    const auto pos = text_.find(key);
    if (pos == std::string::npos) return 1;
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  }

  double number(const json& j, const std::string& field) const {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
  }

  int integer(const json& j, const std::string& field) const {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    return j.get<int>();
  }

  Eigen::Vector2d vec2(const json& j, const std::string& field) const {
    if (!j.is_array() || j.size() != 2) fail(field, "expected an array of two numbers");
    return {number(j[0], field), number(j[1], field)};
  }

  SymMatd tensor(const json& j, const std::string& field) const {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
        j[1].size() != 2)
      fail(field, "expected a 2x2 nested array");
    const double xy = number(j[0][1], field);
    if (xy != number(j[1][0], field)) fail(field, "tensor must be symmetric");
    return SymMatd::make2(number(j[0][0], field), xy, number(j[1][1], field));
  }

  std::string type(const json& j, const std::string& field) const {
    if (!j.is_object()) fail(field, "expected an object with a \"type\" entry");
    if (!j.contains("type") || !j["type"].is_string()) fail(field, "missing \"type\"");
    return j["type"].get<std::string>();
  }

  const json& member(const json& j, const char* key, const std::string& field) const {
    if (!j.contains(key)) fail(field + "." + key, "required field is missing");
    return j[key];
  }

  ScalarFn scalarFn(const json& j, const std::string& field, double finalTime) const {
    const std::string t = type(j, field);
    const auto nonNegative = [&](double v, const char* what) {
      if (!(v >= 0.0)) fail(field, std::string("yield parameterisation is negative (") + what + ")");
    };
    if (t == "zero") return catalog::constantScalar(0.0);
    if (t == "constant") {
      const double v = number(member(j, "value", field), field + ".value");
      nonNegative(v, "value");
      return catalog::constantScalar(v);
    }
    if (t == "linear_in_t") {
      const double v = number(member(j, "value", field), field + ".value");
      const double r = number(member(j, "rate", field), field + ".rate");
      nonNegative(v, "value at t = 0");
      nonNegative(v + r * finalTime, "value at t = T");
      return catalog::linearScalar(v, r);
    }
    if (t == "gaussian_bump_in_x") {
      const double base = number(member(j, "base", field), field + ".base");
      const double amp = number(member(j, "amplitude", field), field + ".amplitude");
      nonNegative(base, "base");
      nonNegative(base + amp, "base + amplitude");
      return catalog::gaussianBumpScalar(base, amp, vec2(member(j, "center", field), field + ".center"),
                                         positive(member(j, "width", field), field + ".width"));
    }
    fail(field, "unknown function type \"" + t + "\"");
  }

  VectorFn vectorFn(const json& j, const std::string& field) const {
    const std::string t = type(j, field);
    if (t == "zero") return catalog::constantVector(Eigen::Vector2d::Zero());
    if (t == "constant") return catalog::constantVector(vec2(member(j, "value", field), field + ".value"));
    if (t == "linear_in_t")
      return catalog::linearVector(vec2(member(j, "value", field), field + ".value"),
                                   vec2(member(j, "rate", field), field + ".rate"));
    if (t == "gaussian_bump_in_x")
      return catalog::gaussianBumpVector(vec2(member(j, "amplitude", field), field + ".amplitude"),
                                         vec2(member(j, "center", field), field + ".center"),
                                         positive(member(j, "width", field), field + ".width"));
    fail(field, "unknown function type \"" + t + "\"");
  }

  TensorFn tensorFn(const json& j, const std::string& field) const {
    const std::string t = type(j, field);
    if (t == "zero") return catalog::constantTensor(SymMatd::zero(2));
    if (t == "constant") return catalog::constantTensor(tensor(member(j, "value", field), field + ".value"));
    if (t == "linear_in_t")
      return catalog::linearTensor(tensor(member(j, "value", field), field + ".value"),
                                   tensor(member(j, "rate", field), field + ".rate"));
    if (t == "radial_deviatoric") {
      const SymMatd dir = tensor(member(j, "direction", field), field + ".direction");
      if (frobNorm(deviator(dir)) == 0.0) fail(field + ".direction", "direction has no deviatoric part");
      return catalog::radialDeviatoric(number(member(j, "amplitude", field), field + ".amplitude"), dir);
    }
    if (t == "gaussian_bump_in_x")
      return catalog::gaussianBumpTensor(tensor(member(j, "amplitude", field), field + ".amplitude"),
                                         vec2(member(j, "center", field), field + ".center"),
                                         positive(member(j, "width", field), field + ".width"));
    fail(field, "unknown function type \"" + t + "\"");
  }

  double positive(const json& j, const std::string& field) const {
    const double v = number(j, field);
    if (!(v > 0.0)) fail(field, "must be > 0");
    return v;
  }

 private:
  const std::string& text_;
  std::string source_;
};

Scheme parseScheme(const Parser& p, const json& j) {
  if (!j.is_string()) p.fail("scheme", "expected a string");
  const auto s = j.get<std::string>();
  if (s == "projection") return Scheme::Projection;
  if (s == "implicit") return Scheme::Implicit;
  if (s == "explicit") return Scheme::Explicit;
  p.fail("scheme", "unknown scheme \"" + s + "\" (projection | implicit | explicit)");
}

ProblemSpec scenarioBase(const Parser& p, const json& j) {
  if (!j.is_string()) p.fail("scenario", "expected a string");
  const auto s = j.get<std::string>();
  if (s == "cantilever") return scenarios::cantilever(200);
  if (s == "radial_pointwise") return scenarios::radialPointwise(2000);
  if (s == "growing_yield_pointwise") return scenarios::growingYieldPointwise(2000);
  if (s == "explicit_blowup") return scenarios::explicitBlowup(20);
  p.fail("scenario", "unknown scenario \"" + s + "\"");
}

}  // namespace

void validateStudy(const StudyConfig& study, bool needReference) {
  for (std::size_t i = 0; i < study.stepsList.size(); ++i) {
    if (study.stepsList[i] < 1) throw ConfigError("study.N_list: step counts must be >= 1");
    if (i > 0 && study.stepsList[i] <= study.stepsList[i - 1])
      throw ConfigError("study.N_list: step counts must be strictly increasing (dt strictly decreasing)");
  }
  if (needReference) {
    if (study.stepsList.empty()) throw ConfigError("study.N_list: at least one step count is required");
    if (study.referenceSteps <= study.stepsList.back())
      throw ConfigError("study.N_ref: reference must be strictly finer than every study step count");
  }
}

RunConfig parseConfigText(const std::string& text, const std::string& sourceName) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(sourceName + ": " + e.what());
  }
  const Parser p(text, sourceName);
  if (!root.is_object()) p.fail("<root>", "expected a JSON object");

  RunConfig cfg;
  const bool hasScenario = root.contains("scenario");
  if (hasScenario) cfg.problem = scenarioBase(p, root["scenario"]);
  ProblemSpec& prob = cfg.problem;

  const auto required = [&](const char* key) -> bool {
    if (root.contains(key)) return true;
    if (!hasScenario) p.fail(key, "required field is missing");
    return false;
  };

  if (required("mode")) {
    const auto& m = root["mode"];
    if (!m.is_string()) p.fail("mode", "expected a string");
    const auto s = m.get<std::string>();
    if (s == "fem") prob.mode = Mode::Fem;
    else if (s == "pointwise") prob.mode = Mode::Pointwise;
    else p.fail("mode", "unknown mode \"" + s + "\" (fem | pointwise)");
  }
  if (required("nu")) prob.viscosity = p.positive(root["nu"], "nu");
  if (required("T")) prob.finalTime = p.positive(root["T"], "T");
  if (required("N")) {
    prob.steps = p.integer(root["N"], "N");
    if (prob.steps < 1) p.fail("N", "must be >= 1");
  }
  if (root.contains("quad_points")) {
    prob.quadPoints = p.integer(root["quad_points"], "quad_points");
    if (prob.quadPoints < 1) p.fail("quad_points", "must be >= 1");
  }
  if (root.contains("scheme")) cfg.scheme = parseScheme(p, root["scheme"]);
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) p.fail("seed", "expected a non-negative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  if (root.contains("mesh")) {
    const auto& m = root["mesh"];
    if (!m.is_object()) p.fail("mesh", "expected an object");
    if (m.contains("nx")) prob.mesh.nx = p.integer(m["nx"], "mesh.nx");
    if (m.contains("ny")) prob.mesh.ny = p.integer(m["ny"], "mesh.ny");
    if (m.contains("Lx")) prob.mesh.lx = p.positive(m["Lx"], "mesh.Lx");
    if (m.contains("Ly")) prob.mesh.ly = p.positive(m["Ly"], "mesh.Ly");
    if (prob.mesh.nx < 1 || prob.mesh.ny < 1) p.fail("mesh", "nx and ny must be >= 1");
    if (m.contains("gamma1")) {
      const auto& g = m["gamma1"];
      if (!g.is_array()) p.fail("mesh.gamma1", "expected an array of side names");
      BoundarySelector sel;
      for (const auto& side : g) {
        const auto s = side.is_string() ? side.get<std::string>() : std::string();
        if (s == "left") sel.left = true;
        else if (s == "right") sel.right = true;
        else if (s == "bottom") sel.bottom = true;
        else if (s == "top") sel.top = true;
        else if (s == "all") sel = BoundarySelector::all();
        else p.fail("mesh.gamma1", "unknown side \"" + s + "\" (left | right | bottom | top | all)");
      }
      if (!sel.any()) p.fail("mesh.gamma1", "Gamma1 must select at least one side");
      prob.mesh.gamma1 = sel;
    }
  } else if (prob.mode == Mode::Fem && !hasScenario) {
    p.fail("mesh", "required field is missing in fem mode");
  }

  if (root.contains("f")) prob.force = p.vectorFn(root["f"], "f");
  if (root.contains("h")) prob.source = p.tensorFn(root["h"], "h");
  if (root.contains("p")) prob.shift = p.tensorFn(root["p"], "p");
  if (root.contains("g")) prob.yield = p.scalarFn(root["g"], "g", prob.finalTime);
  else if (!hasScenario) p.fail("g", "required field is missing");
  if (root.contains("strain_rate")) {
    if (prob.mode != Mode::Pointwise) p.fail("strain_rate", "only meaningful in pointwise mode");
    prob.strainRate = p.tensorFn(root["strain_rate"], "strain_rate");
  }
  if (root.contains("v0")) {
    const VectorFn v0 = p.vectorFn(root["v0"], "v0");
    prob.initialVelocity = [v0](const Point& x) { return v0(0.0, x); };
  }
  if (root.contains("sigma0")) {
    const TensorFn s0 = p.tensorFn(root["sigma0"], "sigma0");
    prob.initialStress = [s0](const Point& x) { return s0(0.0, x); };
  }

  if (root.contains("solver")) {
    const auto& s = root["solver"];
    if (s.contains("cg_tol")) cfg.stepper.cg.tolerance = p.positive(s["cg_tol"], "solver.cg_tol");
    if (s.contains("cg_max_iter")) cfg.stepper.cg.maxIterations = p.integer(s["cg_max_iter"], "solver.cg_max_iter");
    if (s.contains("fp_tol")) cfg.stepper.fixedPointTolerance = p.positive(s["fp_tol"], "solver.fp_tol");
    if (s.contains("fp_max_iter"))
      cfg.stepper.fixedPointMaxIterations = p.integer(s["fp_max_iter"], "solver.fp_max_iter");
  }
  if (root.contains("output")) {
    const auto& o = root["output"];
    if (o.contains("vtk_stride")) {
      cfg.vtkStride = p.integer(o["vtk_stride"], "output.vtk_stride");
      if (cfg.vtkStride < 0) p.fail("output.vtk_stride", "must be >= 0");
    }
  }
  if (root.contains("study")) {
    const auto& s = root["study"];
    if (s.contains("N_list")) {
      if (!s["N_list"].is_array()) p.fail("study.N_list", "expected an array of integers");
      for (const auto& n : s["N_list"]) cfg.study.stepsList.push_back(p.integer(n, "study.N_list"));
    }
    if (s.contains("N_ref")) cfg.study.referenceSteps = p.integer(s["N_ref"], "study.N_ref");
    try {
      validateStudy(cfg.study, false);
    } catch (const ConfigError& e) {
      p.fail("study.N_list", e.what());
    }
  }
  if (root.contains("verify")) {
    const auto& v = root["verify"];
    auto& vc = cfg.verify;
    const auto count = [&](const char* key, int& out) {
      if (!v.contains(key)) return;
      out = p.integer(v[key], std::string("verify.") + key);
      if (out < 1) p.fail(std::string("verify.") + key, "must be >= 1");
    };
    count("property_samples", vc.propertySamples);
    count("oracle_cases", vc.oracleCases);
    count("oracle_samples", vc.oracleSamples);
    count("vi_setups", vc.viSetups);
    count("vi_witnesses", vc.viWitnesses);
    // negative tolerances are accepted; they make every inequality suite fail
    if (v.contains("tolerance")) vc.tolerance = p.number(v["tolerance"], "verify.tolerance");
    if (v.contains("identity_tolerance"))
      vc.identityTolerance = p.number(v["identity_tolerance"], "verify.identity_tolerance");
    if (v.contains("explicit_demo")) {
      if (!v["explicit_demo"].is_boolean()) p.fail("verify.explicit_demo", "expected true or false");
      vc.explicitDemo = v["explicit_demo"].get<bool>();
    }
  }

  try {
    prob.validate();
    // builds the mesh, samples g(0) and checks sigma0 in K(0)
    Stepper(prob, cfg.scheme, cfg.stepper).initialState();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const std::string field = what.find("initial stress") != std::string::npos ? "sigma0"
                              : what.find("yield") != std::string::npos        ? "g"
                                                                               : "<root>";
    p.fail(field, what);
  }
  return cfg;
}

RunConfig parseConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseConfigText(buf.str(), path.string());
}

}  // namespace vmproj
