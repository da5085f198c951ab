#include <CLI11.hpp>
#include <json.hpp>

#include <functional>
#include <ostream>

#include "jetcalc/cli.hpp"
#include "jetcalc/detsolve.hpp"
#include "jetcalc/expr.hpp"

namespace jetcalc::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::string file;
  std::string format = "text";
  unsigned jobs = 1;
  unsigned order = 1, deg = 1, xtDeg = 0;
  bool params = false;
  std::string op, density, h1, h2, current, expr, phi, shadow, covering;
  std::size_t pick = 1;
  unsigned times = 1;
  bool currents = false;
};

// Accumulates one report in both renderings.
class Report {
 public:
  Report(const std::string& command, const EquationFile& file) {
    json_["command"] = command;
    json_["input-hash"] = file.hash;
  }
  Json& json() { return json_; }
  void line(const std::string& s) { text_ += s + "\n"; }
  void emit(std::ostream& out, const std::string& format) const {
    if (format == "json")
      out << json_.dump(2) << "\n";
    else
      out << text_;
  }

 private:
  Json json_;
  std::string text_;
};

std::string text(const JetContext& ctx, std::span<const DiffPoly> v) {
  if (v.size() == 1) return v[0].str(ctx);
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + v[k].str(ctx);
  return s + ")";
}

Json json(const JetContext& ctx, std::span<const DiffPoly> v) {
  if (v.size() == 1) return v[0].str(ctx);
  Json a = Json::array();
  for (const auto& p : v) a.push_back(p.str(ctx));
  return a;
}

std::string text(const JetContext& ctx, std::span<const CartanShadow> v) {
  if (v.size() == 1) return v[0].str(ctx);
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + v[k].str(ctx);
  return s + ")";
}

Json json(const JetContext& ctx, std::span<const CartanShadow> v) {
  if (v.size() == 1) return v[0].str(ctx);
  Json a = Json::array();
  for (const auto& p : v) a.push_back(p.str(ctx));
  return a;
}

std::string yesNo(bool b) { return b ? "yes" : "no"; }

const EvolutionPtr& requireSystem(const EquationFile& f) {
  if (!f.system) throw UsageError(f.path + ": no evolution equations declared");
  return f.system;
}

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing ") + flag);
  return value;
}

CDiffOp resolveOperator(const EquationFile& f, const std::string& source) {
  if (auto it = f.operators.find(source); it != f.operators.end()) return it->second;
  return parseOperator(source, FreeJets::make(f.context()));
}

Density resolveDensity(const EquationFile& f, const std::string& source) {
  if (auto it = f.densities.find(source); it != f.densities.end()) return it->second;
  return Density{parsePoly(source, f.context())};
}

std::string unwrap(std::string s) {
  while (!s.empty() && s.front() == ' ') s.erase(0, 1);
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    bool outer = true;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      depth += s[k] == '(' ? 1 : s[k] == ')' ? -1 : 0;
      if (depth == 0) outer = false;
    }
    if (outer) return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<DiffPoly> parseVector(const std::string& source, const JetContext& ctx) {
  std::vector<DiffPoly> out;
  for (const auto& part : splitTopLevel(unwrap(source), ',')) out.push_back(parsePoly(part, ctx));
  return out;
}

ConservedCurrent resolveCurrent(const EquationFile& f, const std::string& source) {
  if (auto it = f.currents.find(source); it != f.currents.end()) return it->second;
  return ConservedCurrent{parseVector(source, f.context())};
}

CoveringPtr resolveCovering(const EquationFile& f, const std::string& name) {
  if (name.empty() || name == "none") return nullptr;
  for (const auto& [n, c] : f.coverings)
    if (n == name) return c;
  throw UsageError("no covering named '" + name + "'");
}

Ansatz ansatz(const Options& o) { return Ansatz{o.order, o.deg, o.xtDeg, o.params}; }

Json ansatzJson(const Options& o) {
  return Json{{"order", o.order}, {"deg", o.deg}, {"xt-deg", o.xtDeg}};
}

std::string ansatzText(const Options& o) {
  return "ansatz: order " + std::to_string(o.order) + ", degree " + std::to_string(o.deg) + ", xt-degree " +
         std::to_string(o.xtDeg);
}

template <class T>
void basisReport(Report& r, const JetContext& ctx, const Options& o, const Solutions<T>& sol) {
  r.json()["ansatz"] = ansatzJson(o);
  r.json()["basis"] = Json::array();
  r.json()["verified"] = Json::array();
  r.line(ansatzText(o) + " (" + std::to_string(sol.unknownCount) + " unknowns, " +
         std::to_string(sol.equationCount) + " equations)");
  if (sol.basis.empty()) {
    r.line("no solutions in ansatz");
    return;
  }
  r.line("basis (" + std::to_string(sol.basis.size()) + ", each verified by substitution):");
  for (std::size_t k = 0; k < sol.basis.size(); ++k) {
    r.json()["basis"].push_back(json(ctx, sol.basis[k]));
    r.json()["verified"].push_back(true);
    r.line("  [" + std::to_string(k + 1) + "] " + text(ctx, sol.basis[k]));
  }
}

int symmetriesCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto& sys = requireSystem(f);
  basisReport(r, f.context(), o, symmetries(sys, ansatz(o), {o.jobs}));
  return 0;
}

int conslawsCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto& sys = requireSystem(f);
  const auto sol = generatingFunctions(sys, ansatz(o), {o.jobs});
  basisReport(r, f.context(), o, sol);
  if (!o.currents) return 0;
  int code = 0;
  r.json()["currents"] = Json::array();
  r.line("currents:");
  for (std::size_t k = 0; k < sol.basis.size(); ++k) {
    try {
      const auto j = currentFromGF(sys, sol.basis[k]);
      const bool ok = verifyConservedCurrent(*sys, j);
      if (!ok) code = 1;
      r.json()["currents"].push_back(Json{{"current", json(f.context(), j.components)}, {"verified", ok}});
      r.line("  [" + std::to_string(k + 1) + "] " + text(f.context(), j.components) + "  conserved: " + yesNo(ok));
    } catch (const NotExactDerivative& e) {
      code = 1;
      r.json()["currents"].push_back(Json{{"error", e.what()}, {"remainder", e.remainder().str(f.context())}});
      r.line("  [" + std::to_string(k + 1) + "] not reconstructed: " + e.what());
    }
  }
  return code;
}

int eulerCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto& ctx = f.context();
  const auto e = euler(ctx, resolveDensity(f, require(o.density, "--density")).value);
  r.json()["result"] = Json::array();
  r.json()["verified"] = Json::array();
  for (std::size_t j = 0; j < e.size(); ++j) {
    r.json()["result"].push_back(e[j].str(ctx));
    r.json()["verified"].push_back(true);
    r.line(e.size() == 1 ? e[j].str(ctx) : ctx.dependents()[j] + ": " + e[j].str(ctx));
  }
  return 0;
}

int adjointCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto a = adjoint(resolveOperator(f, require(o.op, "--op")));
  r.json()["result"] = a.str();
  r.json()["verified"] = true;
  r.line(a.str());
  return 0;
}

int linearizeCmd(const EquationFile& f, const Options& o, Report& r) {
  CDiffOp l = o.expr.empty() ? linearization(requireSystem(f))
                             : linearizationOf(FreeJets::make(f.context()), parseVector(o.expr, f.context()));
  r.json()["result"] = l.str();
  r.json()["verified"] = true;
  r.line(l.str());
  return 0;
}

int inverseCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto& ctx = f.context();
  const auto psi = parseVector(require(o.expr, "--expr"), ctx);
  const bool sa = selfAdjointTest(ctx, psi);
  r.json()["result"] = Json{{"self-adjoint", sa}};
  r.line("self-adjoint: " + yesNo(sa));
  if (!sa) {
    r.json()["verified"] = false;
    return 1;
  }
  const auto l = homotopyLagrangian(ctx, psi);
  auto e = euler(ctx, l.value);
  e.resize(psi.size());
  const bool ok = e == psi;
  r.json()["result"]["lagrangian"] = l.value.str(ctx);
  r.json()["verified"] = ok;
  r.line("Lagrangian: " + l.value.str(ctx));
  r.line(std::string("Euler image matches: ") + yesNo(ok));
  return ok ? 0 : 1;
}

int verifyCurrentCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto& sys = requireSystem(f);
  const auto& ctx = f.context();
  const auto j = resolveCurrent(f, require(o.current, "--current"));
  const DiffPoly residual = conservationResidual(*sys, j);
  const bool ok = residual.isZero();
  r.json()["result"] = Json{{"conserved", ok}};
  r.json()["verified"] = ok;
  r.line("conserved: " + yesNo(ok));
  if (!ok) {
    r.json()["result"]["residual"] = residual.str(ctx);
    r.line("residual: " + residual.str(ctx));
    return 1;
  }
  const auto psi = generatingFunction(sys, j);
  r.json()["result"]["generating-function"] = json(ctx, psi);
  r.line("generating function: " + text(ctx, psi));
  return 0;
}

int checkHamiltonianCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto a = resolveOperator(f, require(o.op, "--op"));
  const bool skew = isSkewAdjoint(a);
  const bool jacobi = skew && jacobiCheck(a);
  r.json()["result"] = Json{{"skew-adjoint", skew}, {"jacobi", skew ? Json(jacobi) : Json(nullptr)}};
  r.json()["verified"] = skew && jacobi;
  r.line("skew-adjoint: " + yesNo(skew) + "; Jacobi: " + (skew ? yesNo(jacobi) : std::string("not applicable")));
  return skew && jacobi ? 0 : 1;
}

int flowCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto a = resolveOperator(f, require(o.op, "--op"));
  const auto flow = hamiltonianFlow(a, resolveDensity(f, require(o.density, "--density")));
  const auto& ctx = flow->context();
  r.json()["result"] = Json::array();
  r.json()["verified"] = Json::array();
  for (std::size_t j = 0; j < flow->rhs().size(); ++j) {
    const std::string lhs = ctx.name(VarId::jet(j, MultiIndex::unit(flow->timeIndex())));
    r.json()["result"].push_back(flow->rhs()[j].str(ctx));
    r.json()["verified"].push_back(true);
    r.line(lhs + " = " + flow->rhs()[j].str(ctx));
  }
  return 0;
}

int bracketCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto& ctx = f.context();
  const auto a = resolveOperator(f, require(o.op, "--op"));
  const auto b = poissonBracket(a, resolveDensity(f, require(o.h1, "--h1")), resolveDensity(f, require(o.h2, "--h2")));
  r.json()["result"] = Json{{"density", b.density.str(ctx)}, {"euler", json(ctx, b.eulerImage)}, {"vanishes", b.vanishes()}};
  r.json()["verified"] = true;
  r.line("density: " + b.density.str(ctx));
  r.line("Euler image: " + text(ctx, b.eulerImage));
  r.line("bracket vanishes: " + yesNo(b.vanishes()));
  return 0;
}

int recursionCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto& sys = requireSystem(f);
  const auto cov = resolveCovering(f, o.covering);
  r.json()["covering"] = cov ? Json(o.covering) : Json(nullptr);
  r.line(cov ? "covering: " + o.covering : "covering: none");
  basisReport(r, cov ? cov->context() : f.context(), o, shadows(sys, cov, ansatz(o), {o.jobs}));
  return 0;
}

int applyRecursionCmd(const EquationFile& f, const Options& o, Report& r) {
  const auto& sys = requireSystem(f);
  const auto cov = resolveCovering(f, o.covering);
  const RegimePtr regime = cov ? RegimePtr(cov) : RegimePtr(sys);
  const JetContext& ctx = regime->context();
  ShadowVector shadow;
  if (!o.shadow.empty()) {
    for (const auto& part : splitTopLevel(unwrap(o.shadow), ',')) shadow.push_back(parseShadow(part, ctx));
  } else {
    const auto sol = shadows(sys, cov, ansatz(o), {o.jobs});
    if (o.pick < 1 || o.pick > sol.basis.size())
      throw UsageError("--pick " + std::to_string(o.pick) + " is outside the shadow basis of size " +
                       std::to_string(sol.basis.size()));
    shadow = sol.basis[o.pick - 1];
    r.json()["ansatz"] = ansatzJson(o);
  }
  auto phi = parseVector(require(o.phi, "--phi"), ctx);
  r.json()["shadow"] = json(ctx, shadow);
  r.line("shadow: " + text(ctx, shadow));
  r.json()["result"] = Json::array();
  r.json()["verified"] = Json::array();
  for (unsigned k = 1; k <= o.times; ++k) {
    phi = applyShadow(regime, shadow, phi);
    r.json()["result"].push_back(json(ctx, phi));
    r.json()["verified"].push_back(true);
    r.line("R^" + std::to_string(k) + "(phi) = " + text(ctx, phi));
  }
  return 0;
}

bool verificationFailure(const Error& e) {
  return dynamic_cast<const VerificationFailed*>(&e) || dynamic_cast<const NonlocalObstruction*>(&e) ||
         dynamic_cast<const NotExactDerivative*>(&e) || dynamic_cast<const NotVariational*>(&e) ||
         dynamic_cast<const NotConserved*>(&e) || dynamic_cast<const NotGeneratingFunction*>(&e);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbolic calculus on jet spaces: symmetries, conservation laws, Hamiltonian structures and "
               "recursion operators of evolution equations."};
  app.require_subcommand(1);
  Options o;
  using Command = std::function<int(const EquationFile&, const Options&, Report&)>;
  Command selected;
  std::string selectedName;

  auto add = [&](const std::string& name, const std::string& description, Command fn) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("file", o.file, "equation file")->required();
    sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"text", "json"}));
    sub->callback([&, name, fn] {
      selected = fn;
      selectedName = name;
    });
    return sub;
  };
  auto ansatzFlags = [&](CLI::App* sub) {
    sub->add_option("--order", o.order, "maximal jet order of the ansatz");
    sub->add_option("--deg", o.deg, "maximal degree in jet variables");
    sub->add_option("--xt-deg", o.xtDeg, "maximal degree in the independent variables");
    sub->add_flag("--params", o.params, "let parameters enter the ansatz like independent variables");
    sub->add_option("--jobs", o.jobs, "worker threads for equation generation")->check(CLI::PositiveNumber);
  };

  ansatzFlags(add("symmetries", "symmetries inside a polynomial ansatz", symmetriesCmd));
  {
    auto* sub = add("conslaws", "generating functions of conservation laws", conslawsCmd);
    ansatzFlags(sub);
    sub->add_flag("--currents", o.currents, "also reconstruct and verify currents");
  }
  add("euler", "Euler operator of a density", eulerCmd)->add_option("--density", o.density, "density name or expression");
  add("adjoint", "formal adjoint of an operator", adjointCmd)->add_option("--op", o.op, "operator name or expression");
  add("linearize", "linearization of the system or of an expression", linearizeCmd)
      ->add_option("--expr", o.expr, "expression (comma-separated for several components)");
  add("inverse-problem", "self-adjointness test and homotopy Lagrangian", inverseCmd)
      ->add_option("--expr", o.expr, "expression (comma-separated for several components)");
  add("verify-current", "check a conserved current", verifyCurrentCmd)
      ->add_option("--current", o.current, "current name or (J_t, J_x, ...)");
  add("check-hamiltonian", "skew-adjointness and Jacobi identity", checkHamiltonianCmd)
      ->add_option("--op", o.op, "operator name or expression");
  {
    auto* sub = add("flow", "Hamiltonian flow u_t = A(E(H))", flowCmd);
    sub->add_option("--op", o.op, "operator name or expression");
    sub->add_option("--density", o.density, "Hamiltonian name or expression");
  }
  {
    auto* sub = add("bracket", "Poisson bracket of two densities", bracketCmd);
    sub->add_option("--op", o.op, "operator name or expression");
    sub->add_option("--h1", o.h1, "first density");
    sub->add_option("--h2", o.h2, "second density");
  }
  {
    auto* sub = add("recursion", "recursion operators as shadows", recursionCmd);
    ansatzFlags(sub);
    sub->add_option("--covering", o.covering, "covering name (default: none)");
  }
  {
    auto* sub = add("apply-recursion", "apply a shadow to a symmetry", applyRecursionCmd);
    ansatzFlags(sub);
    sub->add_option("--covering", o.covering, "covering name (default: none)");
    sub->add_option("--phi", o.phi, "symmetry (comma-separated for several components)");
    sub->add_option("--shadow", o.shadow, "Cartan form, e.g. omega[u_x] + (u/2)*omega[u]");
    sub->add_option("--pick", o.pick, "1-based index into the computed shadow basis");
    sub->add_option("--times", o.times, "number of applications")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const EquationFile file = loadEquationFile(o.file);
    Report report(selectedName, file);
    const int code = selected(file, o, report);
    report.emit(out, o.format);
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return verificationFailure(e) ? 1 : 2;
  }
}

}  // namespace jetcalc::cli
