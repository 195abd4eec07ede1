#pragma once

// Finite chamber systems over a type set. Chambers are ids 0..N-1; for each
// type i the relation ~i is stored as a class index per chamber.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace twinflip::chambersys {

using ChamberId = std::uint32_t;
using TypeSet = std::uint32_t;

class ChamberSystem;

struct Residue {
  const ChamberSystem* owner = nullptr;
  TypeSet types = 0;
  std::vector<ChamberId> members;  // sorted

  bool contains(ChamberId c) const;
};

struct ResidualReport {
  bool ok = true;
  std::size_t families_checked = 0;
  std::string witness;
};

class ChamberSystem {
 public:
  ChamberSystem() = default;
  /// classes[i][c] is the ~i class of chamber c. Indices are renumbered densely.
  ChamberSystem(std::vector<std::string> labels, std::vector<std::vector<std::uint32_t>> classes);

  std::size_t size() const { return size_; }
  int rank() const { return static_cast<int>(labels_.size()); }
  TypeSet all_types() const { return rank() == 32 ? ~TypeSet{0} : (TypeSet{1} << rank()) - 1; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::uint32_t class_of(int i, ChamberId c) const { return classes_[static_cast<std::size_t>(i)][c]; }
  const std::vector<std::uint32_t>& partition(int i) const { return classes_[static_cast<std::size_t>(i)]; }
  const std::vector<ChamberId>& class_members(int i, std::uint32_t cls) const;
  bool adjacent(int i, ChamberId c, ChamberId d) const { return class_of(i, c) == class_of(i, d); }

  /// The J-connected component of c. Throws BadChamber / BadType.
  Residue residue(ChamberId c, TypeSet J) const;
  /// J-residue index per chamber, numbered by first occurrence.
  std::vector<std::uint32_t> residue_ids(TypeSet J) const;
  std::size_t residue_count(TypeSet J) const;
  bool is_connected() const { return residue_count(all_types()) == 1; }

  /// Shortest J-gallery from c to d inside allowed (empty = all chambers);
  /// empty result if none. Ties are broken toward lower ids.
  std::vector<ChamberId> gallery(ChamberId c, ChamberId d, TypeSet J,
                                 const std::vector<char>& allowed = {}) const;

  /// Chamber system on a subset with the restricted relations.
  ChamberSystem induced(const std::vector<ChamberId>& subset) const;

  void write(std::ostream& out) const;
  static ChamberSystem read(std::istream& in);

  bool operator==(const ChamberSystem& o) const {
    return size_ == o.size_ && labels_ == o.labels_ && classes_ == o.classes_;
  }

 private:
  void check_types(TypeSet J) const;

  std::size_t size_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint32_t>> classes_;
  std::vector<std::vector<std::vector<ChamberId>>> members_;
};

/// Chamber system of K-residues over I \ K, plus the residue index per chamber.
struct ResidueSystem {
  ChamberSystem system;
  std::vector<std::uint32_t> residue_of;
  std::vector<int> type_map;  // new type index -> old type index
};

ResidueSystem residue_chamber_system(const ChamberSystem& C, TypeSet K);

ResidualReport residual_connectedness(const ChamberSystem& C);
bool is_residually_connected(const ChamberSystem& C);

/// For c, d in X and every J: J-gallery inside sub exists iff one exists in C.
bool inherits_connectedness(const std::vector<ChamberId>& sub, const ChamberSystem& C,
                            const std::vector<ChamberId>& X, std::string* witness = nullptr);

}  // namespace twinflip::chambersys
