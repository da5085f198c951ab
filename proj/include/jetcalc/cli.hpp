#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "jetcalc/cdiff.hpp"
#include "jetcalc/errors.hpp"
#include "jetcalc/hamrec.hpp"
#include "jetcalc/variational.hpp"

namespace jetcalc::cli {

/// Malformed input, located as file:line:column.
class InputError : public Error {
 public:
  InputError(const std::string& file, std::size_t line, std::size_t column, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what) {}
};

struct EquationFile {
  std::string path;
  std::string hash;
  std::unique_ptr<JetContext> ctx;
  EvolutionPtr system;
  std::vector<std::pair<std::string, CoveringPtr>> coverings;
  std::map<std::string, CDiffOp> operators;
  std::map<std::string, Density> densities;
  std::map<std::string, ConservedCurrent> currents;

  const JetContext& context() const { return *ctx; }
};

/// Parses equation-file text; `path` only labels diagnostics.
EquationFile parseEquationFile(const std::string& text, const std::string& path);
EquationFile loadEquationFile(const std::string& path);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string inputHash(const std::string& bytes);

/// Parses a Cartan form written as in reports, e.g.
/// "omega[u_x] + (u/2)*omega[u] + (u_x/2)*theta[w]".
CartanShadow parseShadow(const std::string& text, const JetContext& ctx);

/// Runs the command line; returns 0 on success, 1 on a failed verification,
/// 2 on malformed input.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jetcalc::cli
