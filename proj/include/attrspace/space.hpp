#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "attrspace/common.hpp"

namespace attrspace {

struct AttributeSchema {
  std::vector<std::string> aspects;
  // attributes[a] = ordered attribute names of aspect a
  std::vector<std::vector<std::string>> attributes;

  void validate() const;
  std::size_t aspect_count() const { return aspects.size(); }
  // -1 if absent
  int aspect_ordinal(const std::string& name) const;
  int attribute_ordinal(std::size_t aspect, const std::string& name) const;
  bool operator==(const AttributeSchema&) const = default;
};

// One record as it appears on disk / at ingestion time.
struct RawPoint {
  std::string id;
  std::string aspect;
  std::string attribute;
  std::vector<double> vec;
};

// Immutable labeled point set. Vectors live in one flat row-major block;
// labels are (aspect ordinal, within-aspect attribute ordinal). String ids
// are provenance only — every algorithm downstream indexes by ordinal.
class AttributeSpace {
 public:
  static AttributeSpace build(AttributeSchema schema, std::vector<RawPoint> records);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const AttributeSchema& schema() const { return schema_; }

  const double* data() const { return coords_.data(); }
  std::span<const double> point(std::size_t ordinal) const {
    return {coords_.data() + ordinal * dim_, dim_};
  }
  const std::string& id(std::size_t ordinal) const { return ids_[ordinal]; }
  std::uint16_t aspect_of(std::size_t ordinal) const { return aspect_[ordinal]; }
  std::uint16_t attribute_of(std::size_t ordinal) const { return attr_[ordinal]; }

  // I^t_tau, ascending ordinals
  const std::vector<std::uint32_t>& ordinals(std::size_t aspect, std::size_t attribute) const;
  // I^t, ascending ordinals
  const std::vector<std::uint32_t>& aspect_ordinals(std::size_t aspect) const;

 private:
  AttributeSchema schema_;
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<std::uint16_t> aspect_;
  std::vector<std::uint16_t> attr_;
  std::vector<double> coords_;
  std::vector<std::vector<std::vector<std::uint32_t>>> by_attr_;
  std::vector<std::vector<std::uint32_t>> by_aspect_;
};

enum class SpaceFormat { jsonl, binary };

// schema block of the binary formats (space and model files share it)
void write_schema_block(std::ostream& out, const AttributeSchema& schema);
AttributeSchema read_schema_block(std::istream& in, const std::string& path);

SpaceFormat format_from_name(const std::string& name);
// picks by extension: .bin/.atsp -> binary, else jsonl
SpaceFormat format_from_path(const std::string& path);

AttributeSpace load_space(const std::string& path, SpaceFormat format);
void save_space(const AttributeSpace& space, const std::string& path, SpaceFormat format);

std::vector<std::uint32_t> subset_ordinals(const AttributeSpace& space,
                                           const std::string& aspect,
                                           const std::string& attribute);

std::vector<double> attribute_center(const AttributeSpace& space,
                                     const std::vector<std::uint32_t>& ordinals);

}  // namespace attrspace
