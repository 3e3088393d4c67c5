#include "chmr/jet/space.hpp"

#include <algorithm>
#include <sstream>

#include "chmr/errors.hpp"

namespace chmr::jet {

bool FieldSignature::depends(VarId v) const {
  return std::find(depends_on.begin(), depends_on.end(), v) != depends_on.end();
}

VarId Space::add_variable(std::string name) {
  if (find_variable(name)) throw DomainError("duplicate variable '" + name + "'");
  if (variables_.size() >= JetVar::kMaxVars) throw DomainError("too many independent variables");
  variables_.push_back(std::move(name));
  return static_cast<VarId>(variables_.size() - 1);
}

FieldId Space::add_field(std::string name, const std::vector<std::string>& depends_on) {
  if (find_field(name) || find_variable(name)) throw DomainError("duplicate symbol '" + name + "'");
  if (fields_.size() >= 255) throw DomainError("too many fields");
  FieldSignature sig;
  sig.name = std::move(name);
  for (const auto& d : depends_on) sig.depends_on.push_back(variable(d));
  std::sort(sig.depends_on.begin(), sig.depends_on.end());
  fields_.push_back(std::move(sig));
  return static_cast<FieldId>(fields_.size() - 1);
}

FieldId Space::add_constant(std::string name) {
  const FieldId f = add_field(std::move(name), {});
  fields_[f].kind = FieldKind::kConstant;
  return f;
}

FieldId Space::add_extension(std::string name, Polynomial square) {
  const FieldId f = add_field(std::move(name), {});
  fields_[f].kind = FieldKind::kExtension;
  fields_[f].square = std::move(square);
  fields_[f].invertible = true;
  return f;
}

void Space::mark_invertible(std::string_view name) { fields_.at(field_id(name)).invertible = true; }

void Space::mark_invertible(JetVar v) { invertible_jets_.push_back(v); }

std::optional<VarId> Space::find_variable(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == name) return static_cast<VarId>(i);
  return std::nullopt;
}

std::optional<FieldId> Space::find_field(std::string_view name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i)
    if (fields_[i].name == name) return static_cast<FieldId>(i);
  return std::nullopt;
}

VarId Space::variable(std::string_view name) const {
  if (auto v = find_variable(name)) return *v;
  throw DomainError("undeclared variable '" + std::string(name) + "'");
}

FieldId Space::field_id(std::string_view name) const {
  if (auto f = find_field(name)) return *f;
  throw DomainError("undeclared symbol '" + std::string(name) + "'");
}

std::vector<VarId> Space::split_suffix(FieldId f, std::string_view suffix, std::size_t offset) const {
  const auto& sig = fields_.at(f);
  std::vector<VarId> out;
  std::size_t pos = 0;
  while (pos < suffix.size()) {
    std::optional<VarId> best;
    std::size_t best_len = 0;
    for (VarId v = 0; v < variables_.size(); ++v) {
      const auto& name = variables_[v];
      if (name.size() > best_len && suffix.substr(pos, name.size()) == name) {
        best = v;
        best_len = name.size();
      }
    }
    if (!best) throw ParseError(offset + pos, "unknown variable in derivative suffix '" + std::string(suffix) + "'");
    if (!sig.depends(*best))
      throw DomainError("'" + sig.name + "' does not depend on '" + variables_[*best] + "'");
    out.push_back(*best);
    pos += best_len;
  }
  return out;
}

JetVar Space::jet(std::string_view field_name, std::string_view suffix) const {
  const FieldId f = field_id(field_name);
  JetVar j(f);
  for (VarId v : split_suffix(f, suffix, 0)) j = j.differentiated(v);
  return j;
}

JetVar Space::jet(FieldId f, const std::vector<std::pair<VarId, unsigned>>& orders) const {
  const auto& sig = fields_.at(f);
  JetVar j(f);
  for (const auto& [v, k] : orders) {
    if (k == 0) continue;
    if (!sig.depends(v)) throw DomainError("'" + sig.name + "' does not depend on '" + variables_.at(v) + "'");
    j = j.differentiated(v, k);
  }
  return j;
}

std::string Space::jet_name(JetVar j) const {
  std::string s = fields_.at(j.field()).name;
  if (j.is_base()) return s;
  s += '_';
  for (VarId v = 0; v < variables_.size(); ++v)
    for (unsigned k = 0; k < j.order(v); ++k) s += variables_[v];
  return s;
}

bool Space::is_invertible(JetVar v) const {
  if (v.is_base() && fields_.at(v.field()).invertible) return true;
  return std::find(invertible_jets_.begin(), invertible_jets_.end(), v) != invertible_jets_.end();
}

std::string Space::to_catalog_text() const {
  std::ostringstream os;
  if (!variables_.empty()) {
    os << "var ";
    for (std::size_t i = 0; i < variables_.size(); ++i) os << (i ? ", " : "") << variables_[i];
    os << '\n';
  }
  for (const auto& f : fields_) {
    switch (f.kind) {
      case FieldKind::kConstant:
        os << "const " << f.name << '\n';
        break;
      case FieldKind::kExtension: {
        os << "ext " << f.name << " : " << f.name << "^2 = ";
        // squares are a single symbol or an integer in every catalog we build
        if (f.square.is_constant()) {
          os << f.square.constant_value().get_str();
        } else {
          const auto& t = f.square.lead();
          os << jet_name(t.monomial.factors().front().first);
        }
        os << '\n';
        break;
      }
      case FieldKind::kField:
        os << "field " << f.name << '(';
        for (std::size_t i = 0; i < f.depends_on.size(); ++i)
          os << (i ? "," : "") << variables_[f.depends_on[i]];
        os << ")\n";
        break;
    }
  }
  for (const auto& f : fields_)
    if (f.invertible && f.kind != FieldKind::kExtension) os << "nonzero " << f.name << '\n';
  for (JetVar j : invertible_jets_) os << "nonzero " << jet_name(j) << '\n';
  return os.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    auto item = trim(s.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace

SpacePtr parse_catalog(std::string_view text) {
  auto space = std::make_shared<Space>();
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    auto nl = text.find('\n', line_start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(line_start, nl - line_start));
    const std::size_t offset = line_start;
    line_start = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    auto sp = line.find(' ');
    if (sp == std::string_view::npos) throw ParseError(offset, "incomplete declaration");
    const auto keyword = line.substr(0, sp);
    const auto rest = trim(line.substr(sp + 1));
    if (keyword == "var") {
      for (auto& v : split_list(rest)) space->add_variable(v);
    } else if (keyword == "field") {
      auto open = rest.find('('), close = rest.rfind(')');
      if (open == std::string_view::npos || close == std::string_view::npos || close < open)
        throw ParseError(offset, "expected field NAME(VARS)");
      auto deps = split_list(rest.substr(open + 1, close - open - 1));
      for (auto& d : deps)
        if (!space->find_variable(d)) space->add_variable(d);
      space->add_field(std::string(trim(rest.substr(0, open))), deps);
    } else if (keyword == "const") {
      space->add_constant(std::string(rest));
    } else if (keyword == "nonzero") {
      for (auto& name : split_list(rest)) {
        auto us = name.find('_');
        if (us == std::string::npos)
          space->mark_invertible(name);
        else
          space->mark_invertible(space->jet(name.substr(0, us), name.substr(us + 1)));
      }
    } else if (keyword == "ext") {
      auto colon = rest.find(':');
      auto eq = rest.find('=');
      if (colon == std::string_view::npos || eq == std::string_view::npos)
        throw ParseError(offset, "expected ext NAME : NAME^2 = VALUE");
      std::string name(trim(rest.substr(0, colon)));
      auto lhs = trim(rest.substr(colon + 1, eq - colon - 1));
      if (lhs != name + "^2") throw ParseError(offset, "extension relation must read " + name + "^2 = ...");
      auto rhs = trim(rest.substr(eq + 1));
      Polynomial square;
      if (auto f = space->find_field(rhs)) {
        square = Polynomial(JetVar(*f));
      } else {
        try {
          square = Polynomial(Rational(std::string(rhs)));
        } catch (const std::invalid_argument&) {
          throw ParseError(offset, "extension square must be a declared symbol or an integer");
        }
      }
      space->add_extension(std::move(name), std::move(square));
    } else {
      throw ParseError(offset, "unknown declaration '" + std::string(keyword) + "'");
    }
  }
  return space;
}

}  // namespace chmr::jet
