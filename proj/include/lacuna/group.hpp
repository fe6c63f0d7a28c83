#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lacuna {

enum class GroupKind { Free, Integer, Natural };

struct GroupSpec {
  GroupKind kind = GroupKind::Integer;
  int rank = 0;  // number of free generators

  static GroupSpec free(int n);
  static GroupSpec integers() { return {GroupKind::Integer, 0}; }
  static GroupSpec naturals() { return {GroupKind::Natural, 0}; }
  static GroupSpec parse(const std::string& name);  // "F3", "Z", "N"

  bool is_free() const { return kind == GroupKind::Free; }
  bool is_numeric() const { return kind != GroupKind::Free; }
  std::string name() const;
  bool operator==(const GroupSpec&) const = default;
};

// Elements of ℤ and ℕ may be mixed: ℕ is treated as a subsemigroup of ℤ.
bool compatible(const GroupSpec& a, const GroupSpec& b);

// A letter is +i for generator g_i and -i for its inverse, 1 <= i <= n.
using Letter = int;

struct Element {
  std::vector<Letter> word;
  std::int64_t value = 0;

  static Element integer(std::int64_t v) { return {{}, v}; }
  bool operator==(const Element&) const = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

struct Limits {
  std::size_t max_elements = 1'000'000;
  std::uint64_t max_tuples = 10'000'000;
};

Element identity(const GroupSpec& g);
Element generator(const GroupSpec& g, int index);
Element reduce(const GroupSpec& g, std::span<const Letter> letters);
Element mul(const GroupSpec& g, const Element& a, const Element& b);
Element inv(const GroupSpec& g, const Element& a);
std::size_t length(const GroupSpec& g, const Element& a);
bool is_identity(const GroupSpec& g, const Element& a);
bool is_valid(const GroupSpec& g, const Element& a);

// Canonical order: length, then letters compared as g1 < g1^-1 < g2 < ...;
// integers by value.
std::strong_ordering canonical_compare(const GroupSpec& g, const Element& a, const Element& b);

std::string format_element(const GroupSpec& g, const Element& a);
Element parse_element(const GroupSpec& g, const std::string& text);

class FiniteSet {
 public:
  FiniteSet() = default;
  FiniteSet(GroupSpec group, std::vector<Element> elements);

  const GroupSpec& group() const { return group_; }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const Element& operator[](std::size_t i) const { return elements_[i]; }

  // Index of an element or -1.
  std::ptrdiff_t find(const Element& e) const;
  bool contains(const Element& e) const { return find(e) >= 0; }

  FiniteSet sorted() const;
  FiniteSet with_group(GroupSpec g) const;

 private:
  GroupSpec group_;
  std::vector<Element> elements_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
};

FiniteSet ball(const GroupSpec& g, int radius, const Limits& limits = {});
FiniteSet sphere(const GroupSpec& g, int k, const Limits& limits = {});
FiniteSet interval(const GroupSpec& g, std::int64_t lo, std::int64_t hi, const Limits& limits = {});
FiniteSet generators(const GroupSpec& g);

// A factor of a formal product: element index in S and exponent ±1.
struct Factor {
  std::size_t index;
  int exponent;
  bool operator==(const Factor&) const = default;
};

struct FreenessResult {
  bool holds = true;
  int depth = 0;
  std::uint64_t examined = 0;
  std::vector<Factor> witness;  // product equal to the identity when !holds
};

// Searches formal products s_{i1}^{±1}...s_{ik}^{±1}, 1 <= k <= depth, with no
// factor cancelling its predecessor symbolically.
FreenessResult is_free_set(const FiniteSet& s, int depth, const Limits& limits = {});

struct LeinertResult {
  bool holds = true;
  int depth = 0;
  std::uint64_t examined = 0;
  std::vector<std::size_t> witness;  // x_1..x_{2k} as indices into S
};

// Alternating products x1^-1 x2 x3^-1 x4 ... of 2k factors, 2 <= k <= depth,
// with adjacent factors distinct.
LeinertResult leinert_check(const FiniteSet& s, int depth, const Limits& limits = {});

}  // namespace lacuna
