#include "attrspace/space.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "attrspace/vecmath.hpp"
#include "attrspace/wire.hpp"

namespace attrspace {

using ojson = nlohmann::ordered_json;

void AttributeSchema::validate() const {
  require(!aspects.empty(), "schema has no aspects");
  require(attributes.size() == aspects.size(), "schema aspect/attribute list size mismatch");
  std::unordered_set<std::string> seen;
  for (std::size_t a = 0; a < aspects.size(); ++a) {
    require(!aspects[a].empty(), "empty aspect name");
    require(seen.insert(aspects[a]).second, "duplicate aspect name: " + aspects[a]);
    require(!attributes[a].empty(), "aspect '" + aspects[a] + "' has no attributes");
    std::unordered_set<std::string> attrs;
    for (const auto& t : attributes[a]) {
      require(!t.empty(), "empty attribute name in aspect '" + aspects[a] + "'");
      require(attrs.insert(t).second,
              "duplicate attribute '" + t + "' in aspect '" + aspects[a] + "'");
    }
  }
}

int AttributeSchema::aspect_ordinal(const std::string& name) const {
  for (std::size_t a = 0; a < aspects.size(); ++a)
    if (aspects[a] == name) return static_cast<int>(a);
  return -1;
}

int AttributeSchema::attribute_ordinal(std::size_t aspect, const std::string& name) const {
  if (aspect >= attributes.size()) return -1;
  const auto& list = attributes[aspect];
  for (std::size_t t = 0; t < list.size(); ++t)
    if (list[t] == name) return static_cast<int>(t);
  return -1;
}

AttributeSpace AttributeSpace::build(AttributeSchema schema, std::vector<RawPoint> records) {
  schema.validate();
  AttributeSpace sp;
  sp.schema_ = std::move(schema);
  const std::size_t n = records.size();
  sp.ids_.reserve(n);
  sp.aspect_.reserve(n);
  sp.attr_.reserve(n);

  sp.by_attr_.resize(sp.schema_.aspects.size());
  for (std::size_t a = 0; a < sp.by_attr_.size(); ++a)
    sp.by_attr_[a].resize(sp.schema_.attributes[a].size());
  sp.by_aspect_.resize(sp.schema_.aspects.size());

  std::unordered_map<std::string, std::size_t> id_seen;
  id_seen.reserve(n * 2);

  for (std::size_t i = 0; i < n; ++i) {
    auto& r = records[i];
    const std::string where = "record " + std::to_string(i);
    if (i == 0) {
      require(!r.vec.empty(), where + ": empty vector");
      sp.dim_ = r.vec.size();
      sp.coords_.reserve(n * sp.dim_);
    } else {
      require(r.vec.size() == sp.dim_,
              where + ": dimension mismatch (got " + std::to_string(r.vec.size()) +
                  ", expected " + std::to_string(sp.dim_) + ")");
    }
    require(all_finite(r.vec), where + ": non-finite value in vector (id '" + r.id + "')");
    const int a = sp.schema_.aspect_ordinal(r.aspect);
    require(a >= 0, where + ": unknown aspect '" + r.aspect + "'");
    const int t = sp.schema_.attribute_ordinal(static_cast<std::size_t>(a), r.attribute);
    require(t >= 0, where + ": unknown attribute '" + r.attribute + "' in aspect '" + r.aspect + "'");
    auto [it, fresh] = id_seen.emplace(r.id, i);
    if (!fresh)
      throw ValidationError(where + ": duplicate id '" + r.id + "' (first at record " +
                            std::to_string(it->second) + ")");

    sp.ids_.push_back(std::move(r.id));
    sp.aspect_.push_back(static_cast<std::uint16_t>(a));
    sp.attr_.push_back(static_cast<std::uint16_t>(t));
    sp.coords_.insert(sp.coords_.end(), r.vec.begin(), r.vec.end());
    sp.by_attr_[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)].push_back(
        static_cast<std::uint32_t>(i));
    sp.by_aspect_[static_cast<std::size_t>(a)].push_back(static_cast<std::uint32_t>(i));
  }
  if (n == 0) sp.dim_ = 0;
  return sp;
}

const std::vector<std::uint32_t>& AttributeSpace::ordinals(std::size_t aspect,
                                                           std::size_t attribute) const {
  require(aspect < by_attr_.size(), "aspect ordinal out of range");
  require(attribute < by_attr_[aspect].size(), "attribute ordinal out of range");
  return by_attr_[aspect][attribute];
}

const std::vector<std::uint32_t>& AttributeSpace::aspect_ordinals(std::size_t aspect) const {
  require(aspect < by_aspect_.size(), "aspect ordinal out of range");
  return by_aspect_[aspect];
}

std::vector<std::uint32_t> subset_ordinals(const AttributeSpace& space, const std::string& aspect,
                                           const std::string& attribute) {
  const int a = space.schema().aspect_ordinal(aspect);
  require(a >= 0, "unknown aspect '" + aspect + "'");
  const int t = space.schema().attribute_ordinal(static_cast<std::size_t>(a), attribute);
  require(t >= 0, "unknown attribute '" + attribute + "' in aspect '" + aspect + "'");
  return space.ordinals(static_cast<std::size_t>(a), static_cast<std::size_t>(t));
}

std::vector<double> attribute_center(const AttributeSpace& space,
                                     const std::vector<std::uint32_t>& ordinals) {
  require(!ordinals.empty(), "attribute_center: empty ordinal set");
  return mean_rows(space.data(), space.dim(), ordinals);
}

// ---- formats ------------------------------------------------------------

SpaceFormat format_from_name(const std::string& name) {
  if (name == "jsonl") return SpaceFormat::jsonl;
  if (name == "binary") return SpaceFormat::binary;
  throw ValidationError("unknown space format '" + name + "' (expected jsonl|binary)");
}

SpaceFormat format_from_path(const std::string& path) {
  auto ends_with = [&](const char* suf) {
    const std::size_t m = std::strlen(suf);
    return path.size() >= m && path.compare(path.size() - m, m, suf) == 0;
  };
  if (ends_with(".bin") || ends_with(".atsp")) return SpaceFormat::binary;
  return SpaceFormat::jsonl;
}

namespace {

AttributeSpace load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  AttributeSchema schema;
  bool have_schema = false;
  std::vector<RawPoint> records;
  std::string line;
  std::size_t lineno = 0;
  std::size_t rec = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const std::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
    }
    if (lineno == 1 && j.contains("schema")) {
      const auto& s = j["schema"];
      require(s.is_object(), "schema line must map aspect -> attribute list");
      for (auto it = s.begin(); it != s.end(); ++it) {
        schema.aspects.push_back(it.key());
        std::vector<std::string> attrs;
        for (const auto& a : it.value()) attrs.push_back(a.get<std::string>());
        schema.attributes.push_back(std::move(attrs));
      }
      have_schema = true;
      continue;
    }
    const std::string where = "record " + std::to_string(rec);
    try {
      RawPoint p;
      p.id = j.at("id").get<std::string>();
      p.aspect = j.at("aspect").get<std::string>();
      p.attribute = j.at("attribute").get<std::string>();
      p.vec = j.at("vector").get<std::vector<double>>();
      records.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw IoError(path + ": " + where + ": " + e.what());
    }
    ++rec;
  }

  if (!have_schema) {
    // infer: aspects/attributes in order of first appearance
    for (const auto& r : records) {
      int a = schema.aspect_ordinal(r.aspect);
      if (a < 0) {
        schema.aspects.push_back(r.aspect);
        schema.attributes.emplace_back();
        a = static_cast<int>(schema.aspects.size()) - 1;
      }
      if (schema.attribute_ordinal(static_cast<std::size_t>(a), r.attribute) < 0)
        schema.attributes[static_cast<std::size_t>(a)].push_back(r.attribute);
    }
  }
  return AttributeSpace::build(std::move(schema), std::move(records));
}

void save_jsonl(const AttributeSpace& space, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  ojson schema_line;
  ojson s = ojson::object();
  for (std::size_t a = 0; a < space.schema().aspects.size(); ++a)
    s[space.schema().aspects[a]] = space.schema().attributes[a];
  schema_line["schema"] = s;
  out << schema_line.dump() << '\n';

  for (std::size_t i = 0; i < space.size(); ++i) {
    ojson j;
    j["id"] = space.id(i);
    const auto a = space.aspect_of(i);
    j["aspect"] = space.schema().aspects[a];
    j["attribute"] = space.schema().attributes[a][space.attribute_of(i)];
    const auto v = space.point(i);
    j["vector"] = std::vector<double>(v.begin(), v.end());
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failure on '" + path + "'");
}

using wire::get_le;
using wire::get_str;
using wire::put_le;
using wire::put_str;

// Layout: "ATSP" | version u32 | dim u32 | count u64 | schema block
// (aspect count u16, then per aspect: name, attr count u16, attr names) |
// records (id, aspect ordinal u16, attribute ordinal u16, dim f64 LE).
void save_binary(const AttributeSpace& space, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write("ATSP", 4);
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(space.dim()));
  put_le<std::uint64_t>(out, space.size());
  write_schema_block(out, space.schema());

  for (std::size_t i = 0; i < space.size(); ++i) {
    put_str(out, space.id(i));
    put_le<std::uint16_t>(out, space.aspect_of(i));
    put_le<std::uint16_t>(out, space.attribute_of(i));
    for (const double x : space.point(i)) put_le<double>(out, x);
  }
  if (!out) throw IoError("write failure on '" + path + "'");
}

AttributeSpace load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "ATSP", 4) != 0)
    throw IoError(path + ": bad magic (not an attribute-space binary)");
  const auto version = get_le<std::uint32_t>(in, path);
  if (version != 1) throw IoError(path + ": unsupported version " + std::to_string(version));
  const auto dim = get_le<std::uint32_t>(in, path);
  const auto count = get_le<std::uint64_t>(in, path);

  AttributeSchema schema = read_schema_block(in, path);
  schema.validate();

  std::vector<RawPoint> records;
  records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    RawPoint p;
    p.id = get_str(in, path);
    const auto a = get_le<std::uint16_t>(in, path);
    const auto t = get_le<std::uint16_t>(in, path);
    if (a >= schema.aspects.size() || t >= schema.attributes[a].size())
      throw IoError(path + ": record " + std::to_string(i) + ": label ordinal out of range");
    p.aspect = schema.aspects[a];
    p.attribute = schema.attributes[a][t];
    p.vec.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j) p.vec[j] = get_le<double>(in, path);
    records.push_back(std::move(p));
  }
  return AttributeSpace::build(std::move(schema), std::move(records));
}

}  // namespace

void write_schema_block(std::ostream& out, const AttributeSchema& schema) {
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(schema.aspects.size()));
  for (std::size_t a = 0; a < schema.aspects.size(); ++a) {
    put_str(out, schema.aspects[a]);
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(schema.attributes[a].size()));
    for (const auto& t : schema.attributes[a]) put_str(out, t);
  }
}

AttributeSchema read_schema_block(std::istream& in, const std::string& path) {
  AttributeSchema schema;
  const auto na = get_le<std::uint16_t>(in, path);
  for (std::size_t a = 0; a < na; ++a) {
    schema.aspects.push_back(get_str(in, path));
    const auto nt = get_le<std::uint16_t>(in, path);
    std::vector<std::string> attrs;
    for (std::size_t t = 0; t < nt; ++t) attrs.push_back(get_str(in, path));
    schema.attributes.push_back(std::move(attrs));
  }
  return schema;
}

AttributeSpace load_space(const std::string& path, SpaceFormat format) {
  return format == SpaceFormat::jsonl ? load_jsonl(path) : load_binary(path);
}

void save_space(const AttributeSpace& space, const std::string& path, SpaceFormat format) {
  space.schema().validate();
  if (format == SpaceFormat::jsonl)
    save_jsonl(space, path);
  else
    save_binary(space, path);
}

}  // namespace attrspace
