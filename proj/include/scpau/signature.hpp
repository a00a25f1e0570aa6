#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "scpau/term.hpp"

namespace scpau {

/// A finite set of symbols with unique names.
class Signature {
 public:
  Signature() = default;

  /// Adds s. Re-declaring an identical symbol is a no-op; a different symbol with the same
  /// name is rejected.
  void declare(Symbol s) {
    auto [it, inserted] = symbols_.emplace(s.name(), s);
    if (!inserted && it->second != s) {
      throw Error(ErrorKind::invalid_signature,
                  "symbol '" + s.name() + "' redeclared with arity " + std::to_string(s.arity()));
    }
  }

  std::optional<Symbol> find(std::string_view name) const {
    auto it = symbols_.find(std::string(name));
    if (it == symbols_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(Symbol s) const {
    auto found = find(s.name());
    return found && *found == s;
  }

  std::size_t size() const { return symbols_.size(); }
  auto begin() const { return symbols_.begin(); }
  auto end() const { return symbols_.end(); }

  /// Declares every symbol of t.
  void absorb(const Term& t) {
    for (Symbol s : symbols_of(t)) declare(s);
  }

 private:
  std::map<std::string, Symbol, std::less<>> symbols_;
};

namespace isym {

inline Symbol seq() { return Symbol::function("seq", 2); }
inline Symbol alt() { return Symbol::function("alt", 2); }
inline Symbol par() { return Symbol::function("par", 2); }
inline Symbol loop() { return Symbol::function("loop", 1); }
inline Symbol empty() { return Symbol::constant("0"); }

}  // namespace isym

}  // namespace scpau
