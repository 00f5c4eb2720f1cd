#include "tensorpad/properties.hpp"

#include "tensorpad/notation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

namespace tensorpad {

namespace {

constexpr std::array<std::pair<PropertyKind, std::string_view>, 24> kKindNames{{
    {PropertyKind::Indices, "Indices"},
    {PropertyKind::Integer, "Integer"},
    {PropertyKind::Symmetric, "Symmetric"},
    {PropertyKind::AntiSymmetric, "AntiSymmetric"},
    {PropertyKind::TableauSymmetry, "TableauSymmetry"},
    {PropertyKind::RiemannTensor, "RiemannTensor"},
    {PropertyKind::WeylTensor, "WeylTensor"},
    {PropertyKind::KroneckerDelta, "KroneckerDelta"},
    {PropertyKind::Derivative, "Derivative"},
    {PropertyKind::PartialDerivative, "PartialDerivative"},
    {PropertyKind::Depends, "Depends"},
    {PropertyKind::AntiCommuting, "AntiCommuting"},
    {PropertyKind::SelfAntiCommuting, "SelfAntiCommuting"},
    {PropertyKind::NonCommuting, "NonCommuting"},
    {PropertyKind::CommutingAsProduct, "CommutingAsProduct"},
    {PropertyKind::CommutingAsSum, "CommutingAsSum"},
    {PropertyKind::SortOrder, "SortOrder"},
    {PropertyKind::Spinor, "Spinor"},
    {PropertyKind::GammaMatrix, "GammaMatrix"},
    {PropertyKind::Accent, "Accent"},
    {PropertyKind::DiracBar, "DiracBar"},
    {PropertyKind::PropertyInherit, "PropertyInherit"},
    {PropertyKind::IndexInherit, "IndexInherit"},
    {PropertyKind::NonIndex, "NonIndex"},
}};

bool is_symmetry_kind(PropertyKind k) {
  return k == PropertyKind::Symmetric || k == PropertyKind::AntiSymmetric ||
         k == PropertyKind::TableauSymmetry || k == PropertyKind::RiemannTensor ||
         k == PropertyKind::WeylTensor;
}

// Whether a stored record answers a query for `wanted`.
bool kind_answers(PropertyKind stored, PropertyKind wanted) {
  if (stored == wanted) return true;
  if (wanted == PropertyKind::TableauSymmetry)
    return stored == PropertyKind::RiemannTensor || stored == PropertyKind::WeylTensor;
  if (wanted == PropertyKind::Derivative) return stored == PropertyKind::PartialDerivative;
  return false;
}

bool forwarded_by_derivative(PropertyKind k) {
  switch (k) {
    case PropertyKind::TableauSymmetry:
    case PropertyKind::Symmetric:
    case PropertyKind::AntiSymmetric:
    case PropertyKind::RiemannTensor:
    case PropertyKind::WeylTensor:
    case PropertyKind::AntiCommuting:
    case PropertyKind::SelfAntiCommuting:
    case PropertyKind::NonCommuting:
    case PropertyKind::Spinor:
      return true;
    default:
      return false;
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string cur;
  for (char ch : text) {
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '-') {
      cur += ch;
    } else if (!cur.empty()) {
      out.push_back(std::stoi(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::stoi(cur));
  return out;
}

bool pattern_child_matches(const ExprNode& p, const ExprNode& n);

bool children_match(const ExprNode& p, const ExprNode& n) {
  if (p.children.size() == 1 && p.children.front().name == "#") return true;
  if (p.children.size() != n.children.size()) return false;
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    const ExprNode& pc = p.children[i];
    const ExprNode& nc = n.children[i];
    if (pc.rel != nc.rel) return false;
    if (pc.is_index_slot()) continue;
    if (!pattern_child_matches(pc, nc)) return false;
  }
  return true;
}

bool pattern_child_matches(const ExprNode& p, const ExprNode& n) {
  if (p.name == "#") return true;
  if (p.name != n.name) return false;
  return children_match(p, n);
}

bool name_in_family(std::string_view stem, std::string_view name) {
  if (name.size() <= stem.size() || name.substr(0, stem.size()) != stem) return false;
  const auto rest = name.substr(stem.size());
  if (rest.front() == '0') return false;
  return std::all_of(rest.begin(), rest.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

} // namespace

std::optional<PropertyKind> property_kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

std::string_view property_kind_name(PropertyKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  return "?";
}

bool is_list_property(PropertyKind kind) {
  return kind == PropertyKind::AntiCommuting || kind == PropertyKind::SortOrder ||
         kind == PropertyKind::NonCommuting;
}

Pattern::Pattern(ExprNode node) : node_(std::move(node)) {
  node_.multiplier = Rational(1);
  node_.rel = ParentRel::NoRelation;
  stem_ = node_.name;
  if (stem_.size() > 1 && stem_.back() == '#') {
    stem_.pop_back();
    family_ = true;
  }
}

bool Pattern::matches_name(std::string_view name) const {
  if (name == stem_) return true;
  return family_ && name_in_family(stem_, name);
}

bool Pattern::matches(const ExprNode& n) const {
  if (family_) {
    if (!matches_name(n.name)) return false;
  } else if (node_.name != n.name) {
    return false;
  }
  return children_match(node_, n);
}

std::string Pattern::text() const { return print_tex(node_); }

bool operator==(const Pattern& a, const Pattern& b) {
  return structure_key(a.node_, false) == structure_key(b.node_, false);
}

std::optional<std::string> PropertyRecord::arg(std::string_view key, std::size_t position) const {
  for (const auto& a : args)
    if (!a.key.empty() && a.key == key) return a.value;
  std::size_t k = 0;
  for (const auto& a : args) {
    if (!a.key.empty()) continue;
    if (k == position) return a.value;
    ++k;
  }
  return std::nullopt;
}

PropertyRecord make_record(PropertyKind kind, std::vector<PropertyArg> args) {
  PropertyRecord r;
  r.kind = kind;
  r.args = std::move(args);
  switch (kind) {
    case PropertyKind::RiemannTensor:
      r.tableau = YoungTableau::riemann();
      break;
    case PropertyKind::WeylTensor:
      r.tableau = YoungTableau::riemann();
      r.traceless = true;
      break;
    case PropertyKind::TableauSymmetry: {
      const auto shape = r.arg("shape");
      const auto filling = r.arg("indices");
      if (!shape || !filling) throw Error("TableauSymmetry needs shape={...} and indices={...}");
      r.tableau = YoungTableau::from_shape(parse_int_list(*shape), parse_int_list(*filling));
      break;
    }
    case PropertyKind::PropertyInherit:
      for (const auto& a : r.args) {
        if (!a.key.empty()) continue;
        const auto k = property_kind_from_name(a.value);
        if (!k) throw Error("PropertyInherit: unknown property '" + a.value + "'");
        r.inherit_only.push_back(*k);
      }
      break;
    default:
      break;
  }
  return r;
}

bool IndexSet::contains(std::string_view index_name) const {
  if (std::find(members.begin(), members.end(), index_name) != members.end()) return true;
  if (generator.empty()) return false;
  return index_name == generator || name_in_family(generator, index_name);
}

std::size_t IndexSet::position_of(std::string_view index_name) const {
  const auto it = std::find(members.begin(), members.end(), index_name);
  if (it != members.end()) return static_cast<std::size_t>(it - members.begin());
  if (index_name == generator) return members.size();
  return members.size() + std::stoul(std::string(index_name.substr(generator.size())));
}

void PropertyRegistry::declare(const std::vector<Pattern>& patterns, PropertyRecord record) {
  if (patterns.empty()) throw Error("declaration without patterns");
  warnings_.clear();

  if (is_symmetry_kind(record.kind)) {
    for (const auto& p : patterns) {
      for (const auto& e : entries_) {
        if (!is_symmetry_kind(e.record.kind) || e.record.kind == record.kind) continue;
        if (!(e.pattern == p)) continue;
        throw PropertyConflict(p.text() + "::" + std::string(property_kind_name(record.kind)) +
                               " contradicts earlier declaration " + e.pattern.text() + "::" +
                               std::string(property_kind_name(e.record.kind)));
      }
    }
  }

  if (record.kind == PropertyKind::SortOrder) {
    for (const auto& p : patterns)
      for (const auto& e : entries_)
        if (e.record.kind == PropertyKind::SortOrder && e.pattern == p)
          warnings_.push_back(p.text() + " already appears in another SortOrder list");
  }

  if (is_list_property(record.kind)) record.list_members = patterns;
  if (record.kind == PropertyKind::Indices) register_indices(patterns, record);
  if (record.kind == PropertyKind::Integer) register_integer_range(patterns, record);

  const std::size_t id = ++declarations_;
  for (const auto& p : patterns) {
    std::erase_if(entries_, [&](const Entry& e) {
      return e.record.kind == record.kind && e.pattern == p && !is_list_property(record.kind);
    });
    entries_.push_back(Entry{p, record, id});
  }
}

void PropertyRegistry::register_indices(const std::vector<Pattern>& patterns, const PropertyRecord& record) {
  const std::string set_name = record.arg("name", 0).value_or("default");
  auto it = std::find_if(sets_.begin(), sets_.end(), [&](const IndexSet& s) { return s.name == set_name; });
  if (it == sets_.end()) {
    IndexSet s;
    s.name = set_name;
    s.order = sets_.size();
    sets_.push_back(s);
    it = sets_.end() - 1;
  }
  for (const auto& p : patterns) {
    if (p.is_family()) {
      it->generator = p.stem();
    } else if (std::find(it->members.begin(), it->members.end(), p.stem()) == it->members.end()) {
      it->members.push_back(p.stem());
    }
  }
}

void PropertyRegistry::register_integer_range(const std::vector<Pattern>& patterns,
                                              const PropertyRecord& record) {
  const auto range = record.arg("range", 0);
  if (!range) return;
  const auto dots = range->find("..");
  if (dots == std::string::npos) return;
  const int lo = std::stoi(range->substr(0, dots));
  const int hi = std::stoi(range->substr(dots + 2));
  for (auto& s : sets_) {
    for (const auto& p : patterns) {
      if (s.contains(p.stem())) {
        s.dimension = hi - lo + 1;
        break;
      }
    }
  }
}

const PropertyRecord* PropertyRegistry::query_direct(const ExprNode& node, PropertyKind kind) const {
  for (const auto& e : entries_)
    if (kind_answers(e.record.kind, kind) && e.pattern.matches(node)) return &e.record;
  return nullptr;
}

bool PropertyRegistry::is_inheriting(const ExprNode& node) const {
  for (const auto& e : entries_) {
    const auto k = e.record.kind;
    if ((k == PropertyKind::Accent || k == PropertyKind::DiracBar || k == PropertyKind::PropertyInherit) &&
        e.pattern.matches(node))
      return true;
  }
  return false;
}

bool PropertyRegistry::is_derivative(const ExprNode& node) const {
  return query_direct(node, PropertyKind::Derivative) != nullptr;
}

const PropertyRecord* PropertyRegistry::query(const ExprNode& node, PropertyKind kind) const {
  if (const auto* r = query_direct(node, kind)) return r;
  if (node.is_number() || node.is_sum() || node.is_prod() || node.is_list()) return nullptr;
  if (is_inheriting(node)) {
    const auto* inherit = query_direct(node, PropertyKind::PropertyInherit);
    const bool allowed = inherit == nullptr || inherit->inherit_only.empty() ||
                         std::find(inherit->inherit_only.begin(), inherit->inherit_only.end(), kind) !=
                             inherit->inherit_only.end();
    if (allowed) {
      for (const auto& c : node.children)
        if (c.rel == ParentRel::Argument)
          if (const auto* r = query(c, kind)) return r;
    }
  }
  if (forwarded_by_derivative(kind) && is_derivative(node)) {
    for (const auto& c : node.children)
      if (c.rel == ParentRel::Argument)
        if (const auto* r = query(c, kind)) return r;
  }
  return nullptr;
}

std::vector<const PropertyRegistry::Entry*> PropertyRegistry::properties_of(const ExprNode& node) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries_)
    if (e.pattern.matches(node)) out.push_back(&e);
  return out;
}

const IndexSet* PropertyRegistry::index_set_of(std::string_view index_name) const {
  for (const auto& s : sets_)
    if (s.contains(index_name)) return &s;
  return nullptr;
}

bool PropertyRegistry::is_constant_under(const ExprNode& node, std::string_view derivative) const {
  const PropertyRecord* dep = query(node, PropertyKind::Depends);
  if (dep == nullptr) {
    if (is_inheriting(node) || is_derivative(node)) {
      for (const auto& c : node.children)
        if (c.rel == ParentRel::Argument && !is_constant_under(c, derivative)) return false;
      return std::any_of(node.children.begin(), node.children.end(),
                         [](const ExprNode& c) { return c.rel == ParentRel::Argument; });
    }
    return node.is_number();
  }
  for (const auto& a : dep->args) {
    std::string v = a.value;
    if (const auto brace = v.find('{'); brace != std::string::npos) v = v.substr(0, brace);
    if (v == derivative) return false;
  }
  return true;
}

namespace {

void constituents(const PropertyRegistry& reg, const ExprNode& n, std::vector<const ExprNode*>& out) {
  if (n.is_number()) return;
  if (n.is_prod()) {
    for (const auto& c : n.children) constituents(reg, c, out);
    return;
  }
  if (n.is_sum()) {
    if (!n.children.empty()) constituents(reg, n.children.front(), out);
    return;
  }
  const bool passes = n.is_integral() || reg.is_inheriting(n) || reg.is_derivative(n);
  if (passes) {
    bool any = false;
    for (const auto& c : n.children) {
      if (c.rel != ParentRel::Argument) continue;
      constituents(reg, c, out);
      any = true;
    }
    if (any) return;
  }
  out.push_back(&n);
}

int member_position(const PropertyRecord& r, const ExprNode& n) {
  for (std::size_t i = 0; i < r.list_members.size(); ++i)
    if (r.list_members[i].matches(n)) return static_cast<int>(i);
  return -1;
}

std::optional<int> atom_sign(const PropertyRegistry& reg, const ExprNode& x, const ExprNode& y) {
  for (const auto& e : reg.entries()) {
    if (e.record.kind != PropertyKind::NonCommuting) continue;
    if (!(e.pattern == e.record.list_members.front())) continue;
    const int i = member_position(e.record, x);
    const int j = member_position(e.record, y);
    if (i >= 0 && j >= 0 && i != j) return std::nullopt;
  }
  const bool gx = reg.has_direct(x, PropertyKind::GammaMatrix);
  const bool gy = reg.has_direct(y, PropertyKind::GammaMatrix);
  if (gx && gy) return std::nullopt;
  // A gamma matrix acts on the spinor next to it.
  if ((gx && reg.has_direct(y, PropertyKind::Spinor)) || (gy && reg.has_direct(x, PropertyKind::Spinor)))
    return std::nullopt;
  for (const auto& e : reg.entries()) {
    if (e.record.kind != PropertyKind::AntiCommuting) continue;
    if (!(e.pattern == e.record.list_members.front())) continue;
    const int i = member_position(e.record, x);
    const int j = member_position(e.record, y);
    if (i >= 0 && j >= 0 && i != j) return -1;
  }
  if (x.name == y.name && reg.has_direct(x, PropertyKind::SelfAntiCommuting)) return -1;
  return 1;
}

} // namespace

std::optional<int> commutation_sign(const PropertyRegistry& reg, const ExprNode& a, const ExprNode& b) {
  std::vector<const ExprNode*> ca;
  std::vector<const ExprNode*> cb;
  constituents(reg, a, ca);
  constituents(reg, b, cb);
  int sign = 1;
  for (const auto* x : ca) {
    for (const auto* y : cb) {
      const auto s = atom_sign(reg, *x, *y);
      if (!s) return std::nullopt;
      sign *= *s;
    }
  }
  return sign;
}

std::optional<YoungTableau> tableau_of(const PropertyRegistry& reg, const ExprNode& node,
                                       std::size_t slot_count) {
  if (const auto* r = reg.query_direct(node, PropertyKind::TableauSymmetry); r && r->tableau) {
    if (r->tableau->slot_span() > static_cast<int>(slot_count))
      throw Error("tableau of " + print_tex(node) + " covers more slots than the tensor has");
    return r->tableau;
  }
  std::size_t own = 0;
  for (const auto& c : node.children)
    if (is_index(c, reg)) ++own;
  if (own > 0 && reg.has_direct(node, PropertyKind::Symmetric)) return YoungTableau::row(static_cast<int>(own));
  if (own > 0 && reg.has_direct(node, PropertyKind::AntiSymmetric))
    return YoungTableau::column(static_cast<int>(own));
  if (reg.is_derivative(node) || reg.is_inheriting(node)) {
    const ExprNode* arg = nullptr;
    for (const auto& c : node.children) {
      if (c.rel != ParentRel::Argument) continue;
      if (arg != nullptr) return std::nullopt;
      arg = &c;
    }
    if (arg == nullptr || arg->is_prod() || arg->is_sum()) return std::nullopt;
    return tableau_of(reg, *arg, index_iterator(*arg, reg).size());
  }
  return std::nullopt;
}

} // namespace tensorpad
