#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bergman/halfplane.hpp"

namespace bergman {

// Deduplication of enumerated elements: two canonicalized matrices are the
// same group element when all entries agree within
//   max(kDedupTol, kDedupRelTol * (1 + largest entry)).
// The absolute part separates distinct elements near the identity; the
// relative part keeps duplicates mergeable for balls centered far from i,
// where entries reach 1e5..1e6 and the float spread of equal elements grows
// with the scale. Candidates are bucketed by their entries rounded to
// kDedupBucketWidth; a lookup probes every bucket reachable within the
// effective tolerance.
inline constexpr double kDedupTol = 1e-9;
inline constexpr double kDedupRelTol = 1e-13;
inline constexpr double kDedupBucketWidth = 1e-6;
inline constexpr std::size_t kDefaultElementCap = 5'000'000;
inline constexpr int kMaxWordLength = 24;

/// A torsion-free cocompact Fuchsian group given by 2g side-pairing
/// generators. Words are built from the 4g letters {g_j, g_j^-1}; letter
/// 2j is generator j, letter 2j+1 its inverse.
struct GroupSpec {
  std::string label;
  int genus = 0;
  std::vector<MobiusElement> generators;

  GroupSpec(std::string label, int genus, std::vector<MobiusElement> gens);

  int letter_count() const { return 2 * static_cast<int>(generators.size()); }
  MobiusElement letter(int l) const;
  static std::string letter_name(int l);
};

/// The genus-2 surface group of the regular hyperbolic octagon with vertex
/// angles pi/4. In the unit-disk model the four side-pairing translations are
/// the SU(1,1) matrices with diagonal 1+sqrt(2) and off-diagonal entries of
/// modulus sqrt(2+2*sqrt(2)) rotated by k*pi/4, k = 0..3; conjugating by the
/// Cayley transform gives the real matrices below. Each generator translates
/// by 2*arccosh(1+sqrt(2)) along an axis through i, and together with the
/// inverses these are the eight octagon side pairings, subject to the relator
/// g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3.
GroupSpec bolza_group();

/// Loads a group from a JSON document {label, genus, generators: [[a,b,c,d]]}.
GroupSpec group_from_json(const nlohmann::json& j);
GroupSpec load_group_file(const std::string& path);

/// Built-in labels ("bolza") or a path to a JSON group file.
GroupSpec resolve_group(const std::string& label_or_path);

struct PruneSpec {
  HPoint basepoint;
  double displacement_cutoff = 0.0;
};

/// A finite deduplicated set of group elements, sorted by word length and
/// then lexicographically by word. Entry 0 of any enumerated set is the
/// identity; a default-constructed set is empty.
class ElementSet {
 public:
  ElementSet() = default;

  struct Entry {
    MobiusElement g = MobiusElement::identity();
    std::array<std::uint8_t, kMaxWordLength> word{};  // letters, see GroupSpec
    std::uint8_t word_length = 0;
    double displacement = 0.0;  // at the pruning basepoint; 0 if unpruned
  };

  std::size_t size() const { return entries_.size(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Entry>& entries() const { return entries_; }

  int max_word_length_budget() const { return budget_; }
  /// Longest word length actually present.
  int max_word_length() const;
  const std::optional<PruneSpec>& prune() const { return prune_; }
  double prune_margin() const { return prune_margin_; }

  bool has_identity() const;
  /// Index of the entry equal to g within the dedup tolerance, if present.
  std::optional<std::size_t> find(const MobiusElement& g) const;

  /// Subset of elements with word length <= max_len (a prefix of the sorted
  /// entries, so truncation preserves canonical order and inverse closure).
  ElementSet truncated(int max_len) const;

  /// Subset of elements with displacement <= cutoff; only meaningful for
  /// pruned sets. The result is re-closed under inverses so that series over
  /// it stay real.
  ElementSet filtered_by_displacement(double cutoff) const;

  std::vector<std::uint8_t> word_of(std::size_t i) const;
  std::string word_string(std::size_t i) const;

 private:
  friend ElementSet enumerate_elements(const GroupSpec&, int,
                                       std::optional<PruneSpec>, std::size_t,
                                       double);

  std::optional<std::size_t> lookup(const MobiusElement& g) const;
  void index_insert(std::size_t entry_idx);
  void rebuild_index();
  void close_under_inverses(std::size_t element_cap);
  void sort_canonically();

  std::vector<Entry> entries_;
  // Open-addressing dedup index over hashed bucket keys; see group.cpp.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> index_slots_;
  std::size_t index_count_ = 0;

  int budget_ = 0;
  std::optional<PruneSpec> prune_;
  double prune_margin_ = 0.0;
  double dedup_tol_ = kDedupTol;
};

/// All distinct group elements with a word of length <= max_word_length in
/// the generators and their inverses (free reduction plus numeric
/// deduplication). With a PruneSpec, elements whose displacement of the
/// basepoint exceeds cutoff + max generator displacement are discarded and
/// their words are not extended; this errs on the side of inclusion for the
/// small-displacement shells the kernel series needs.
///
/// The basepoint should lie within O(1) of the orbit of i: the extension
/// margin is the maximal generator displacement at the basepoint, which
/// grows like e^{d(i, basepoint)}, so balls around far points are
/// exponentially large and will hit the element cap. Reduce far points with
/// reduce_toward_center first.
ElementSet enumerate_elements(const GroupSpec& group, int max_word_length,
                              std::optional<PruneSpec> prune = std::nullopt,
                              std::size_t element_cap = kDefaultElementCap,
                              double dedup_tol = kDedupTol);

/// Greedy displacement descent: repeatedly applies the letter that most
/// decreases d(i, z) until no letter helps. The result is a point of the
/// same orbit with d(i, z') <= d(i, letter z') for every letter; since
/// kernel values are invariant under the group this is the natural
/// evaluation representative. (Not a fundamental-domain reduction.)
HPoint reduce_toward_center(const GroupSpec& group, const HPoint& z);

/// Upper bound for the injectivity radius found by displacement minimization
/// over a word ball; r_X itself is an infimum over the whole group and plane,
/// so enumeration can only ever certify an upper bound.
struct InjectivityEstimate {
  double r_upper = 0.0;
  std::vector<std::uint8_t> argmin_word;
  std::string argmin_word_text;
  int word_length_budget = 0;
};

InjectivityEstimate injectivity_radius(const GroupSpec& group,
                                       const std::vector<HPoint>& grid,
                                       int max_word_length,
                                       std::size_t element_cap = kDefaultElementCap);

/// One estimate per word length 1..max_word_length (from one enumeration),
/// for convergence-in-L reporting.
std::vector<InjectivityEstimate> injectivity_convergence(
    const GroupSpec& group, const std::vector<HPoint>& grid,
    int max_word_length, std::size_t element_cap = kDefaultElementCap);

}  // namespace bergman
