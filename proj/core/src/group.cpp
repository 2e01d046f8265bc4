#include "bergman/group.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

// splitmix64-style mixing of one bucket coordinate into a running hash.
inline std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 31;
  return h;
}

inline std::int64_t bucket_coord(double e) {
  return static_cast<std::int64_t>(std::floor(e / kDedupBucketWidth));
}

inline std::uint64_t bucket_hash(std::int64_t k0, std::int64_t k1,
                                 std::int64_t k2, std::int64_t k3) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  h = mix64(h, static_cast<std::uint64_t>(k0));
  h = mix64(h, static_cast<std::uint64_t>(k1));
  h = mix64(h, static_cast<std::uint64_t>(k2));
  h = mix64(h, static_cast<std::uint64_t>(k3));
  return h | 1ULL;  // 0 marks an empty slot
}

inline std::uint64_t element_bucket_hash(const MobiusElement& g) {
  return bucket_hash(bucket_coord(g.a()), bucket_coord(g.b()),
                     bucket_coord(g.c()), bucket_coord(g.d()));
}

bool word_less(const ElementSet::Entry& lhs, const ElementSet::Entry& rhs) {
  if (lhs.word_length != rhs.word_length)
    return lhs.word_length < rhs.word_length;
  return std::lexicographical_compare(lhs.word.begin(),
                                      lhs.word.begin() + lhs.word_length,
                                      rhs.word.begin(),
                                      rhs.word.begin() + rhs.word_length);
}

}  // namespace

GroupSpec::GroupSpec(std::string label_, int genus_,
                     std::vector<MobiusElement> gens)
    : label(std::move(label_)), genus(genus_), generators(std::move(gens)) {
  if (genus < 2) throw ValidationError("GroupSpec: genus must be >= 2");
  if (generators.size() != static_cast<std::size_t>(2 * genus))
    throw ValidationError("GroupSpec: expected " + std::to_string(2 * genus) +
                          " generators, got " +
                          std::to_string(generators.size()));
  // MobiusElement construction already enforces unit determinant.
}

MobiusElement GroupSpec::letter(int l) const {
  const MobiusElement& g = generators.at(static_cast<std::size_t>(l >> 1));
  return (l & 1) ? g.inverse() : g;
}

std::string GroupSpec::letter_name(int l) {
  std::string name = "g" + std::to_string(l >> 1);
  if (l & 1) name += "^-1";
  return name;
}

GroupSpec bolza_group() {
  const double alpha = 1.0 + std::sqrt(2.0);
  const double s = std::sqrt(2.0 + 2.0 * std::sqrt(2.0));
  std::vector<MobiusElement> gens;
  gens.reserve(4);
  for (int k = 0; k < 4; ++k) {
    const double c = std::cos(k * M_PI / 4.0);
    const double sn = std::sin(k * M_PI / 4.0);
    gens.emplace_back(alpha + s * c, -s * sn, -s * sn, alpha - s * c);
  }
  return GroupSpec("bolza", 2, std::move(gens));
}

GroupSpec group_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("genus") || !j.contains("generators"))
    throw ValidationError("group file: expected {label, genus, generators}");
  const std::string label = j.value("label", std::string("unnamed"));
  const int genus = j.at("genus").get<int>();
  const auto& gens = j.at("generators");
  if (!gens.is_array())
    throw ValidationError("group file: generators must be an array");
  std::vector<MobiusElement> out;
  out.reserve(gens.size());
  std::size_t idx = 0;
  for (const auto& row : gens) {
    if (!row.is_array() || row.size() != 4)
      throw ValidationError("group file: generator " + std::to_string(idx) +
                            " must be a row-major 4-tuple [a,b,c,d]");
    try {
      out.emplace_back(row[0].get<double>(), row[1].get<double>(),
                       row[2].get<double>(), row[3].get<double>());
    } catch (const ValidationError& e) {
      throw ValidationError("group file: generator " + std::to_string(idx) +
                            ": " + e.what());
    }
    ++idx;
  }
  return GroupSpec(label, genus, std::move(out));
}

GroupSpec load_group_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open group file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("group file " + path + ": " + e.what());
  }
  return group_from_json(j);
}

GroupSpec resolve_group(const std::string& label_or_path) {
  if (label_or_path == "bolza") return bolza_group();
  return load_group_file(label_or_path);
}

// ---------------------------------------------------------------------------
// ElementSet dedup index: open addressing with linear probing over the mixed
// hash of the four rounded entries. A lookup probes every bucket key
// reachable by moving each entry by +-dedup_tol (at most 2 candidates per
// coordinate since the tolerance is far below the bucket width).

namespace {
constexpr std::size_t kMinIndexCapacity = 64;

std::size_t probe_capacity(std::size_t n) {
  std::size_t cap = kMinIndexCapacity;
  while (cap < 2 * n + 1) cap <<= 1;
  return cap;
}
}  // namespace

void ElementSet::index_insert(std::size_t entry_idx) {
  if (index_slots_.empty() ||
      index_count_ * 10 >= index_slots_.size() * 7) {
    rebuild_index();  // re-indexes every current entry, including this one
    return;
  }
  const std::uint64_t h = element_bucket_hash(entries_[entry_idx].g);
  const std::size_t mask = index_slots_.size() - 1;
  std::size_t pos = static_cast<std::size_t>(h) & mask;
  while (index_slots_[pos].first != 0) pos = (pos + 1) & mask;
  index_slots_[pos] = {h, static_cast<std::uint32_t>(entry_idx)};
  ++index_count_;
}

void ElementSet::rebuild_index() {
  const std::size_t cap = probe_capacity(entries_.size() + 1);
  index_slots_.assign(cap, {0, 0});
  index_count_ = 0;
  const std::size_t mask = cap - 1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const std::uint64_t h = element_bucket_hash(entries_[i].g);
    std::size_t pos = static_cast<std::size_t>(h) & mask;
    while (index_slots_[pos].first != 0) pos = (pos + 1) & mask;
    index_slots_[pos] = {h, static_cast<std::uint32_t>(i)};
    ++index_count_;
  }
}

std::optional<std::size_t> ElementSet::lookup(const MobiusElement& g) const {
  if (index_slots_.empty()) return std::nullopt;
  const double e[4] = {g.a(), g.b(), g.c(), g.d()};
  const double scale =
      std::max(std::max(std::abs(e[0]), std::abs(e[1])),
               std::max(std::abs(e[2]), std::abs(e[3])));
  const double tol = std::max(dedup_tol_, kDedupRelTol * (1.0 + scale));
  std::int64_t lo[4], hi[4];
  for (int i = 0; i < 4; ++i) {
    lo[i] = static_cast<std::int64_t>(std::floor((e[i] - tol) / kDedupBucketWidth));
    hi[i] = static_cast<std::int64_t>(std::floor((e[i] + tol) / kDedupBucketWidth));
  }
  const std::size_t mask = index_slots_.size() - 1;
  for (std::int64_t k0 = lo[0]; k0 <= hi[0]; ++k0)
    for (std::int64_t k1 = lo[1]; k1 <= hi[1]; ++k1)
      for (std::int64_t k2 = lo[2]; k2 <= hi[2]; ++k2)
        for (std::int64_t k3 = lo[3]; k3 <= hi[3]; ++k3) {
          const std::uint64_t h = bucket_hash(k0, k1, k2, k3);
          std::size_t pos = static_cast<std::size_t>(h) & mask;
          while (index_slots_[pos].first != 0) {
            if (index_slots_[pos].first == h) {
              const std::size_t idx = index_slots_[pos].second;
              if (entries_[idx].g.entry_distance(g) <= tol) return idx;
            }
            pos = (pos + 1) & mask;
          }
        }
  return std::nullopt;
}

std::optional<std::size_t> ElementSet::find(const MobiusElement& g) const {
  return lookup(g);
}

bool ElementSet::has_identity() const {
  return !entries_.empty() && entries_.front().g.is_identity(dedup_tol_);
}

int ElementSet::max_word_length() const {
  return entries_.empty() ? 0 : static_cast<int>(entries_.back().word_length);
}

std::vector<std::uint8_t> ElementSet::word_of(std::size_t i) const {
  const Entry& e = entries_.at(i);
  return std::vector<std::uint8_t>(e.word.begin(),
                                   e.word.begin() + e.word_length);
}

std::string ElementSet::word_string(std::size_t i) const {
  const Entry& e = entries_.at(i);
  if (e.word_length == 0) return "e";
  std::string out;
  for (int l = 0; l < e.word_length; ++l) {
    if (l) out += "*";
    out += GroupSpec::letter_name(e.word[l]);
  }
  return out;
}

void ElementSet::sort_canonically() {
  std::stable_sort(entries_.begin(), entries_.end(), word_less);
  rebuild_index();
}

void ElementSet::close_under_inverses(std::size_t element_cap) {
  // Inverses have the same displacement and word length, so a set defined by
  // displacement and word-length cuts is closed under inverses in exact
  // arithmetic; this pass repairs any asymmetry the pruned search introduced.
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    const MobiusElement inv = e.g.inverse();
    if (lookup(inv)) continue;
    if (entries_.size() >= element_cap)
      throw BudgetExceededError("element cap exceeded while closing set under inverses");
    Entry ne;
    ne.g = inv;
    ne.word_length = e.word_length;
    for (int l = 0; l < e.word_length; ++l)
      ne.word[l] = static_cast<std::uint8_t>(e.word[e.word_length - 1 - l] ^ 1);
    ne.displacement = e.displacement;
    entries_.push_back(ne);
    index_insert(entries_.size() - 1);
  }
}

ElementSet ElementSet::truncated(int max_len) const {
  ElementSet out;
  out.budget_ = std::min(budget_, max_len);
  out.prune_ = prune_;
  out.prune_margin_ = prune_margin_;
  out.dedup_tol_ = dedup_tol_;
  for (const Entry& e : entries_) {
    if (e.word_length > max_len) break;  // entries are sorted by length
    out.entries_.push_back(e);
  }
  out.rebuild_index();
  return out;
}

ElementSet ElementSet::filtered_by_displacement(double cutoff) const {
  ElementSet out;
  out.budget_ = budget_;
  out.prune_ = prune_;
  if (out.prune_) out.prune_->displacement_cutoff = cutoff;
  out.prune_margin_ = prune_margin_;
  out.dedup_tol_ = dedup_tol_;
  for (const Entry& e : entries_)
    if (e.displacement <= cutoff) out.entries_.push_back(e);
  out.rebuild_index();
  out.close_under_inverses(std::numeric_limits<std::size_t>::max());
  out.sort_canonically();
  return out;
}

namespace {

ElementSet::Entry make_identity_entry() {
  ElementSet::Entry e;
  e.g = MobiusElement::identity();
  e.word_length = 0;
  e.displacement = 0.0;
  return e;
}

}  // namespace

ElementSet enumerate_elements(const GroupSpec& group, int max_word_length,
                              std::optional<PruneSpec> prune,
                              std::size_t element_cap, double dedup_tol) {
  if (max_word_length < 0)
    throw ValidationError("enumerate_elements: max_word_length must be >= 0");
  if (max_word_length > kMaxWordLength)
    throw ValidationError("enumerate_elements: max_word_length exceeds " +
                          std::to_string(kMaxWordLength));
  if (element_cap == 0)
    throw ValidationError("enumerate_elements: element cap must be positive");

  const int letters = group.letter_count();
  std::vector<MobiusElement> letter_mats;
  letter_mats.reserve(static_cast<std::size_t>(letters));
  for (int l = 0; l < letters; ++l) letter_mats.push_back(group.letter(l));

  ElementSet set;
  set.budget_ = max_word_length;
  set.prune_ = prune;
  set.dedup_tol_ = dedup_tol;

  double threshold = std::numeric_limits<double>::infinity();
  if (prune) {
    double max_gen_disp = 0.0;
    for (const auto& m : letter_mats)
      max_gen_disp = std::max(max_gen_disp, displacement(m, prune->basepoint));
    set.prune_margin_ = max_gen_disp;
    threshold = prune->displacement_cutoff + max_gen_disp;
  }

  set.entries_.push_back(make_identity_entry());
  set.rebuild_index();

  std::size_t shell_begin = 0;
  for (int len = 1; len <= max_word_length; ++len) {
    const std::size_t shell_end = set.entries_.size();
    if (shell_begin == shell_end) break;  // previous shell empty: ball closed
    for (std::size_t pi = shell_begin; pi < shell_end; ++pi) {
      for (int l = 0; l < letters; ++l) {
        const ElementSet::Entry& parent = set.entries_[pi];
        if (parent.word_length > 0 &&
            (parent.word[parent.word_length - 1] ^ 1) == l)
          continue;  // free reduction
        const MobiusElement cand = parent.g * letter_mats[l];
        double disp = 0.0;
        if (prune) {
          disp = displacement(cand, prune->basepoint);
          if (disp > threshold) continue;
        }
        if (set.lookup(cand)) continue;
        if (set.entries_.size() >= element_cap)
          throw BudgetExceededError(
              "element cap (" + std::to_string(element_cap) +
              ") exceeded at word length " + std::to_string(len));
        ElementSet::Entry e;
        e.g = cand;
        e.word = parent.word;
        e.word[parent.word_length] = static_cast<std::uint8_t>(l);
        e.word_length = static_cast<std::uint8_t>(len);
        e.displacement = disp;
        set.entries_.push_back(e);
        set.index_insert(set.entries_.size() - 1);
      }
    }
    shell_begin = shell_end;
  }

  set.close_under_inverses(element_cap);
  set.sort_canonically();
  return set;
}

HPoint reduce_toward_center(const GroupSpec& group, const HPoint& z) {
  const HPoint center(0.0, 1.0);
  HPoint cur = z;
  double best = hyp_distance(center, cur);
  // The orbit is discrete, so strict descent terminates; the iteration cap
  // is a guard against degenerate inputs.
  for (int iter = 0; iter < 4096; ++iter) {
    HPoint next = cur;
    double next_dist = best;
    for (int l = 0; l < group.letter_count(); ++l) {
      const HPoint cand = mobius_apply(group.letter(l), cur);
      const double d = hyp_distance(center, cand);
      if (d < next_dist - 1e-12) {
        next = cand;
        next_dist = d;
      }
    }
    if (next_dist >= best - 1e-12) break;
    cur = next;
    best = next_dist;
  }
  return cur;
}

std::vector<InjectivityEstimate> injectivity_convergence(
    const GroupSpec& group, const std::vector<HPoint>& grid,
    int max_word_length, std::size_t element_cap) {
  if (grid.empty())
    throw ValidationError("injectivity_radius: basepoint grid is empty");
  if (max_word_length < 1)
    throw ValidationError("injectivity_radius: max_word_length must be >= 1");

  // Adaptive pruning: the minimum displacement over the full ball is at most
  // the best generator displacement m over the grid, and an element beating m
  // at some grid point z has displacement <= m + 2*d(z0, z) at the basepoint.
  const HPoint& base = grid.front();
  double min_gen = std::numeric_limits<double>::infinity();
  for (int l = 0; l < group.letter_count(); ++l)
    for (const HPoint& z : grid)
      min_gen = std::min(min_gen, displacement(group.letter(l), z));
  double radius = 0.0;
  for (const HPoint& z : grid) radius = std::max(radius, hyp_distance(base, z));
  const double cutoff = min_gen + 2.0 * radius + 0.125;

  const ElementSet set = enumerate_elements(
      group, max_word_length, PruneSpec{base, cutoff}, element_cap);

  const double kFixedPointTol = 1e-6;
  std::vector<double> best(static_cast<std::size_t>(max_word_length) + 1,
                           std::numeric_limits<double>::infinity());
  std::vector<std::size_t> best_idx(
      static_cast<std::size_t>(max_word_length) + 1, 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& e = set[i];
    if (e.word_length == 0) continue;
    for (const HPoint& z : grid) {
      const double d = displacement(e.g, z);
      if (d <= kFixedPointTol)
        throw ValidationError(
            "injectivity_radius: non-identity element fixes a grid point "
            "(group has torsion or duplicate generators)");
      if (d < best[e.word_length]) {
        best[e.word_length] = d;
        best_idx[e.word_length] = i;
      }
    }
  }

  std::vector<InjectivityEstimate> out;
  double running = std::numeric_limits<double>::infinity();
  std::size_t running_idx = 0;
  for (int len = 1; len <= max_word_length; ++len) {
    if (best[len] < running) {
      running = best[len];
      running_idx = best_idx[len];
    }
    InjectivityEstimate est;
    est.r_upper = running;
    est.word_length_budget = len;
    est.argmin_word = set.word_of(running_idx);
    est.argmin_word_text = set.word_string(running_idx);
    out.push_back(std::move(est));
  }
  return out;
}

InjectivityEstimate injectivity_radius(const GroupSpec& group,
                                       const std::vector<HPoint>& grid,
                                       int max_word_length,
                                       std::size_t element_cap) {
  return injectivity_convergence(group, grid, max_word_length, element_cap)
      .back();
}

}  // namespace bergman
