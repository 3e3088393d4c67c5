#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chmr/jet/jet_var.hpp"
#include "chmr/jet/polynomial.hpp"

namespace chmr::jet {

enum class FieldKind { kField, kConstant, kExtension };

struct FieldSignature {
  std::string name;
  FieldKind kind = FieldKind::kField;
  std::vector<VarId> depends_on;
  bool invertible = false;
  /// For extensions only: the generator squares to this polynomial.
  Polynomial square;

  bool depends(VarId v) const;
};

/// Catalog of independent variables and symbols. Built once, then shared
/// read-only between every Expression defined over it.
class Space {
 public:
  Space() = default;

  VarId add_variable(std::string name);
  FieldId add_field(std::string name, const std::vector<std::string>& depends_on);
  FieldId add_constant(std::string name);
  /// Generator `name` with name^2 = square, where `square` is given over earlier symbols.
  FieldId add_extension(std::string name, Polynomial square);
  /// Declares the undifferentiated symbol nonvanishing (may be divided by freely).
  void mark_invertible(std::string_view name);
  /// Declares a jet variable such as X_z0 nonvanishing.
  void mark_invertible(JetVar v);

  std::size_t variable_count() const { return variables_.size(); }
  std::size_t field_count() const { return fields_.size(); }
  const std::string& variable_name(VarId v) const { return variables_.at(v); }
  const FieldSignature& field(FieldId f) const { return fields_.at(f); }
  const std::vector<FieldSignature>& fields() const { return fields_; }

  std::optional<VarId> find_variable(std::string_view name) const;
  std::optional<FieldId> find_field(std::string_view name) const;
  VarId variable(std::string_view name) const;  // throws DomainError
  FieldId field_id(std::string_view name) const;  // throws DomainError

  /// Jet variable from a field name and a derivative suffix such as "XXY" or "z0z0z1".
  JetVar jet(std::string_view field_name, std::string_view suffix = {}) const;
  JetVar jet(FieldId f, const std::vector<std::pair<VarId, unsigned>>& orders) const;
  std::string jet_name(JetVar v) const;
  bool is_invertible(JetVar v) const;

  /// Splits a derivative suffix into the field's variables (longest match first).
  std::vector<VarId> split_suffix(FieldId f, std::string_view suffix, std::size_t offset) const;

  /// Plain-text catalog ("var X, Y", "field U(X,Y,T)", "const k1", "ext s : s^2 = lam", "nonzero P").
  std::string to_catalog_text() const;

 private:
  std::vector<std::string> variables_;
  std::vector<FieldSignature> fields_;
  std::vector<JetVar> invertible_jets_;
};

using SpacePtr = std::shared_ptr<const Space>;

/// Parses catalog text; see Space::to_catalog_text for the format.
SpacePtr parse_catalog(std::string_view text);

}  // namespace chmr::jet
