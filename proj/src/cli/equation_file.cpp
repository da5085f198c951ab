#include <cstdint>
#include <fstream>
#include <regex>
#include <sstream>

#include "jetcalc/cli.hpp"
#include "jetcalc/expr.hpp"

namespace jetcalc::cli {

std::string inputHash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << h;
  return s.str();
}

namespace {

std::string trim(const std::string& s, std::size_t& offset) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  offset += b;
  return s.substr(b, e - b);
}

std::string trim(const std::string& s) {
  std::size_t ignored = 0;
  return trim(s, ignored);
}

// A piece of a line together with its 1-based column.
struct Span {
  std::string text;
  std::size_t column;
};

struct Line {
  std::size_t number;
  std::string keyword;
  Span rest;
};

class Loader {
 public:
  Loader(std::string path) : path_(std::move(path)) {}

  [[noreturn]] void fail(const Line& l, std::size_t column, const std::string& what) const {
    throw InputError(path_, l.number, column, what);
  }

  // Runs fn, relocating expression errors to file positions.
  template <class F>
  auto located(const Line& l, const Span& s, F fn) const {
    try {
      return fn();
    } catch (const SyntaxError& e) {
      fail(l, s.column + e.position(), e.what());
    } catch (const UnknownIdentifier& e) {
      fail(l, s.column + e.position(), e.what());
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      fail(l, s.column, e.what());
    }
  }

  DiffPoly poly(const Line& l, const Span& s, const JetContext& ctx) const {
    return located(l, s, [&] { return parsePoly(s.text, ctx); });
  }

  // "name = value" -> (name, value span)
  std::pair<std::string, Span> definition(const Line& l) const {
    const auto eq = l.rest.text.find('=');
    if (eq == std::string::npos) fail(l, l.rest.column, "expected 'name = expression'");
    std::string name = trim(l.rest.text.substr(0, eq));
    if (!isIdentifier(name)) fail(l, l.rest.column, "invalid name '" + name + "'");
    std::size_t col = l.rest.column + eq + 1;
    std::string value = trim(l.rest.text.substr(eq + 1), col);
    return {name, Span{value, col}};
  }

  std::vector<Span> list(const Span& s, char sep) const {
    std::vector<Span> out;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t k = 0; k <= s.text.size(); ++k) {
      const char c = k < s.text.size() ? s.text[k] : sep;
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') --depth;
      if (c == sep && depth == 0) {
        std::size_t col = s.column + start;
        out.push_back(Span{trim(s.text.substr(start, k - start), col), col});
        start = k + 1;
      }
    }
    return out;
  }

  EquationFile load(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    for (std::size_t number = 1; std::getline(in, raw); ++number) {
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::size_t col = 1;
      std::string body = trim(raw, col);
      if (body.empty()) continue;
      std::size_t split = body.find_first_of(": ");
      if (split == std::string::npos) throw InputError(path_, number, col, "unrecognized line");
      std::string keyword = body.substr(0, split);
      std::size_t restCol = col + split + (body[split] == ':' ? 1 : 0);
      std::string rest = body.substr(split + (body[split] == ':' ? 1 : 0));
      rest = trim(rest, restCol);
      lines.push_back(Line{number, keyword, Span{rest, restCol}});
    }

    EquationFile file;
    file.path = path_;
    file.hash = inputHash(text);

    std::vector<std::string> independents, dependents, parameters;
    std::optional<std::size_t> time;
    const Line* declLine = nullptr;
    for (const auto& l : lines) {
      if (l.keyword == "independent") {
        declLine = &l;
        for (const auto& item : list(l.rest, ',')) {
          std::string name = item.text;
          static const std::regex timed(R"(^([A-Za-z][A-Za-z0-9]*)\s*\(\s*time\s*\)$)");
          std::smatch m;
          if (std::regex_match(name, m, timed)) {
            if (time) fail(l, item.column, "only one time variable may be declared");
            name = m[1];
            time = independents.size();
          }
          independents.push_back(name);
        }
      } else if (l.keyword == "dependent") {
        for (const auto& item : list(l.rest, ',')) dependents.push_back(item.text);
      } else if (l.keyword == "param") {
        for (const auto& item : list(l.rest, ',')) parameters.push_back(item.text);
      }
    }
    try {
      file.ctx = std::make_unique<JetContext>(independents, dependents, time, parameters);
    } catch (const Error& e) {
      throw InputError(path_, declLine ? declLine->number : 1, 1, e.what());
    }
    const JetContext& ctx = *file.ctx;

    std::map<std::size_t, DiffPoly> rhs;
    const Line* evoLine = nullptr;
    for (const auto& l : lines) {
      if (l.keyword == "independent" || l.keyword == "dependent" || l.keyword == "param") continue;
      if (l.keyword == "evolution") {
        evoLine = &l;
        const auto eq = l.rest.text.find('=');
        if (eq == std::string::npos) fail(l, l.rest.column, "expected 'u_t = expression'");
        const Span lhs{trim(l.rest.text.substr(0, eq)), l.rest.column};
        const auto head = located(l, lhs, [&] { return parsePoly(lhs.text, ctx); });
        if (!time) fail(l, lhs.column, "evolution equations need a time variable");
        std::optional<std::size_t> j;
        if (head.size() == 1 && head.terms().begin()->second.isOne() && head.terms().begin()->first.degree() == 1) {
          const VarId v = head.terms().begin()->first.factors()[0].first;
          if (v.kind == VarKind::Jet && v.sigma == MultiIndex::unit(*time)) j = v.index;
        }
        if (!j) fail(l, lhs.column, "left-hand side must be a first time derivative such as u_t");
        if (rhs.count(*j)) fail(l, lhs.column, "duplicate evolution equation for " + ctx.dependents()[*j]);
        std::size_t col = l.rest.column + eq + 1;
        const Span value{trim(l.rest.text.substr(eq + 1), col), col};
        rhs.emplace(*j, poly(l, value, ctx));
      } else if (l.keyword == "operator") {
        auto [name, value] = definition(l);
        const RegimePtr regime = FreeJets::make(ctx);
        file.operators.insert_or_assign(name, located(l, value, [&] { return parseOperator(value.text, regime); }));
      } else if (l.keyword == "density") {
        auto [name, value] = definition(l);
        file.densities.insert_or_assign(name, Density{poly(l, value, ctx)});
      } else if (l.keyword == "current") {
        auto [name, value] = definition(l);
        Span inner = value;
        if (inner.text.size() < 2 || inner.text.front() != '(' || inner.text.back() != ')')
          fail(l, value.column, "current must be written as (J_t, J_x, ...)");
        inner.text = inner.text.substr(1, inner.text.size() - 2);
        inner.column += 1;
        ConservedCurrent j;
        for (const auto& part : list(inner, ',')) j.components.push_back(poly(l, part, ctx));
        if (j.components.size() != ctx.independentCount())
          fail(l, value.column, "current needs one component per independent variable");
        file.currents.insert_or_assign(name, std::move(j));
      } else if (l.keyword != "covering") {
        fail(l, 1, "unknown declaration '" + l.keyword + "'");
      }
    }
    if (!rhs.empty()) {
      if (rhs.size() != ctx.dependentCount()) fail(*evoLine, 1, "every dependent variable needs an evolution equation");
      std::vector<DiffPoly> f;
      for (auto& [j, p] : rhs) f.push_back(p);
      file.system = located(*evoLine, evoLine->rest, [&] { return EvolutionSystem::make(ctx, f); });
    }

    for (const auto& l : lines) {
      if (l.keyword != "covering") continue;
      if (!file.system) fail(l, 1, "a covering needs evolution equations");
      loadCovering(l, file);
    }
    return file;
  }

  void loadCovering(const Line& l, EquationFile& file) const {
    const JetContext& ctx = file.context();
    const auto colon = l.rest.text.find(':');
    if (colon == std::string::npos) fail(l, l.rest.column, "expected 'covering name: w_x = ... ; w_t = ...'");
    const std::string name = trim(l.rest.text.substr(0, colon));
    if (!isIdentifier(name)) fail(l, l.rest.column, "invalid covering name");
    std::size_t col = l.rest.column + colon + 1;
    const Span body{trim(l.rest.text.substr(colon + 1), col), col};

    std::vector<std::string> names;
    std::vector<std::tuple<std::string, std::size_t, Span>> parts;
    for (const auto& part : list(body, ';')) {
      const auto eq = part.text.find('=');
      if (eq == std::string::npos) fail(l, part.column, "expected 'w_x = expression'");
      const std::string lhs = trim(part.text.substr(0, eq));
      const auto under = lhs.find('_');
      if (under == std::string::npos) fail(l, part.column, "expected a derivative such as w_x");
      const std::string w = lhs.substr(0, under);
      std::string dir = lhs.substr(under + 1);
      if (dir.size() > 2 && dir.front() == '{' && dir.back() == '}') dir = dir.substr(1, dir.size() - 2);
      const auto i = ctx.independentIndex(dir);
      if (!isIdentifier(w) || !i) fail(l, part.column, "expected a derivative such as w_x");
      if (ctx.resolve(w)) fail(l, part.column, "nonlocal name '" + w + "' is already declared");
      if (std::find(names.begin(), names.end(), w) == names.end()) names.push_back(w);
      std::size_t vcol = part.column + eq + 1;
      parts.emplace_back(w, *i, Span{trim(part.text.substr(eq + 1), vcol), vcol});
    }
    const JetContext cctx = coveringContext(ctx, names);
    std::vector<CoveringLayer> layers;
    for (const auto& w : names) layers.push_back({w, std::vector<DiffPoly>(ctx.independentCount())});
    std::vector<std::vector<bool>> seen(names.size(), std::vector<bool>(ctx.independentCount(), false));
    for (const auto& [w, i, value] : parts) {
      const std::size_t a = std::find(names.begin(), names.end(), w) - names.begin();
      if (seen[a][i]) fail(l, value.column, "duplicate derivative of " + w);
      seen[a][i] = true;
      layers[a].derivatives[i] = poly(l, value, cctx);
    }
    for (std::size_t a = 0; a < names.size(); ++a)
      for (std::size_t i = 0; i < ctx.independentCount(); ++i)
        if (!seen[a][i]) fail(l, body.column, names[a] + "_" + ctx.independents()[i] + " is not given");
    file.coverings.emplace_back(name, located(l, body, [&] { return Covering::make(file.system, layers); }));
  }

 private:
  std::string path_;
};

}  // namespace

EquationFile parseEquationFile(const std::string& text, const std::string& path) { return Loader(path).load(text); }

EquationFile loadEquationFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseEquationFile(buf.str(), path);
}

CartanShadow parseShadow(const std::string& text, const JetContext& ctx) {
  static const std::regex token(R"((omega|theta)\[([^\]]*)\])");
  std::map<std::string, VarId> generators;
  std::string rewritten;
  std::size_t next = 0;
  auto begin = std::sregex_iterator(text.begin(), text.end(), token);
  std::size_t last = 0;
  std::map<VarId, VarId> placeholderOf;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string inner = trim(m[2].str());
    const DiffPoly g = parsePoly(inner, ctx);
    if (g.size() != 1 || !g.terms().begin()->second.isOne() || g.terms().begin()->first.degree() != 1)
      throw SyntaxError("generator must be a single variable", static_cast<std::size_t>(m.position(2)));
    const VarId v = g.terms().begin()->first.factors()[0].first;
    const bool omega = m[1].str() == "omega";
    if ((omega && v.kind != VarKind::Jet) || (!omega && v.kind != VarKind::Nonlocal))
      throw SyntaxError(omega ? "omega[...] takes a jet variable" : "theta[...] takes a nonlocal variable",
                        static_cast<std::size_t>(m.position(2)));
    rewritten += text.substr(last, m.position(0) - last);
    // Placeholders reuse the reserved spelling of unknown coefficients.
    const std::string key = std::string(m[1]) + ":" + ctx.name(v);
    auto found = generators.find(key);
    if (found == generators.end()) {
      found = generators.emplace(key, VarId::unknown(1000000 + next++)).first;
      placeholderOf.emplace(found->second, v);
    }
    rewritten += "(" + ctx.name(found->second) + ")";
    last = m.position(0) + m.length(0);
  }
  rewritten += text.substr(last);
  const DiffPoly p = parsePoly(rewritten, ctx);
  CartanShadow out;
  const auto isPlaceholder = [](const VarId& v) { return v.kind == VarKind::Unknown; };
  for (const auto& [mono, coeff] : p.collect(isPlaceholder)) {
    if (mono.degree() != 1) throw SyntaxError("Cartan form must be linear in omega[...] and theta[...]", 0);
    out.add(placeholderOf.at(mono.factors()[0].first), coeff);
  }
  return out;
}

}  // namespace jetcalc::cli
