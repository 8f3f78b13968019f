#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbml/dataset.hpp"

namespace rbml {

static_assert(std::endian::native == std::endian::little,
              "binary dataset format assumes a little-endian host");

enum class DataFormat { csv, binary };

// .rbml extension selects the binary container, anything else is CSV.
inline DataFormat format_for_path(const std::filesystem::path& p) {
  return p.extension() == ".rbml" ? DataFormat::binary : DataFormat::csv;
}

// One class name per line; fixes the label index order for a corpus.
inline std::vector<std::string> load_label_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open label map: " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  if (names.empty()) throw data_error("label map is empty: " + path.string());
  return names;
}

namespace detail {

inline double parse_feature(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw data_error("non-numeric feature field '" + std::string(tok) +
                     "' on line " + std::to_string(line_no));
  return v;
}

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw data_error("truncated file while reading " + what);
  return v;
}

}  // namespace detail

// CSV layout: header `label,f0,...,f{D-1}`, then one row per sample. The label
// column may hold class names or bare integers. When label_map is given it
// fixes the index order and unknown names are an error; otherwise classes are
// indexed in first-appearance order.
inline FeatureDataset load_csv(const std::filesystem::path& path,
                               const std::optional<std::vector<std::string>>& label_map = {}) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw data_error("empty file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::size_t dim = 0;
  for (char ch : line)
    if (ch == ',') ++dim;
  if (dim == 0) throw data_error("header has no feature columns: " + path.string());

  std::vector<std::string> names;
  if (label_map) names = *label_map;
  std::vector<double> features;
  std::vector<std::uint32_t> labels;
  std::vector<std::string> row_names;  // label text per row, resolved at the end

  std::size_t line_no = 1;
  std::vector<double> row(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::size_t pos = 0, field = 0;
    std::string_view sv(line);
    std::string label_text;
    while (true) {
      std::size_t comma = sv.find(',', pos);
      std::string_view tok = sv.substr(pos, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - pos);
      if (field == 0) {
        label_text = std::string(tok);
      } else {
        if (field > dim)
          throw data_error("ragged row (too many fields) on line " +
                           std::to_string(line_no));
        row[field - 1] = detail::parse_feature(tok, line_no);
      }
      ++field;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (field != dim + 1)
      throw data_error("ragged row (expected " + std::to_string(dim + 1) +
                       " fields, got " + std::to_string(field) + ") on line " +
                       std::to_string(line_no));
    row_names.push_back(label_text);
    features.insert(features.end(), row.begin(), row.end());
  }
  if (row_names.empty()) throw data_error("file has no data rows: " + path.string());

  labels.reserve(row_names.size());
  for (const auto& text : row_names) {
    std::size_t idx = names.size();
    for (std::size_t c = 0; c < names.size(); ++c)
      if (names[c] == text) { idx = c; break; }
    if (idx == names.size()) {
      if (label_map)
        throw data_error("unknown label '" + text + "' not in the label map");
      names.push_back(text);
    }
    labels.push_back(static_cast<std::uint32_t>(idx));
  }
  return FeatureDataset(dim, std::move(names), std::move(features), std::move(labels));
}

inline void save_csv(const FeatureDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw data_error("cannot write file: " + path.string());
  out << "label";
  for (std::size_t d = 0; d < ds.dim(); ++d) out << ",f" << d;
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.class_names()[ds.label(i)];
    for (double v : ds.row(i)) out << ',' << detail::format_double(v);
    out << '\n';
  }
  if (!out) throw data_error("write failed: " + path.string());
}

inline constexpr char kBinaryMagic[5] = {'R', 'B', 'M', 'L', '1'};

// When label_map is given, stored class names are remapped onto the map's
// index order; names outside the map are an error.
inline FeatureDataset load_binary(const std::filesystem::path& path,
                                  const std::optional<std::vector<std::string>>& label_map = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open file: " + path.string());
  char magic[5];
  in.read(magic, 5);
  if (!in || std::string_view(magic, 5) != std::string_view(kBinaryMagic, 5))
    throw data_error("bad magic, not a dataset file: " + path.string());

  auto n = detail::read_le<std::uint64_t>(in, "row count");
  auto d = detail::read_le<std::uint64_t>(in, "dimension");
  auto k = detail::read_le<std::uint64_t>(in, "class count");
  std::vector<std::string> names(k);
  for (auto& name : names) {
    auto len = detail::read_le<std::uint64_t>(in, "name length");
    name.resize(len);
    in.read(name.data(), static_cast<std::streamsize>(len));
    if (!in) throw data_error("truncated file while reading class names");
  }
  std::vector<std::uint32_t> labels(n);
  in.read(reinterpret_cast<char*>(labels.data()),
          static_cast<std::streamsize>(n * sizeof(std::uint32_t)));
  if (!in) throw data_error("truncated file while reading labels");
  std::vector<double> features(n * d);
  in.read(reinterpret_cast<char*>(features.data()),
          static_cast<std::streamsize>(n * d * sizeof(double)));
  if (!in) throw data_error("truncated file while reading features");

  if (label_map) {
    std::vector<std::uint32_t> remap(k);
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t idx = label_map->size();
      for (std::size_t m = 0; m < label_map->size(); ++m)
        if ((*label_map)[m] == names[c]) { idx = m; break; }
      if (idx == label_map->size())
        throw data_error("unknown label '" + names[c] + "' not in the label map");
      remap[c] = static_cast<std::uint32_t>(idx);
    }
    for (auto& l : labels) l = remap[l];
    return FeatureDataset(d, *label_map, std::move(features), std::move(labels));
  }
  return FeatureDataset(d, std::move(names), std::move(features), std::move(labels));
}

inline void save_binary(const FeatureDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("cannot write file: " + path.string());
  out.write(kBinaryMagic, 5);
  detail::write_le<std::uint64_t>(out, ds.size());
  detail::write_le<std::uint64_t>(out, ds.dim());
  detail::write_le<std::uint64_t>(out, ds.n_classes());
  for (const auto& name : ds.class_names()) {
    detail::write_le<std::uint64_t>(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  out.write(reinterpret_cast<const char*>(ds.labels().data()),
            static_cast<std::streamsize>(ds.size() * sizeof(std::uint32_t)));
  out.write(reinterpret_cast<const char*>(ds.features().data()),
            static_cast<std::streamsize>(ds.features().size() * sizeof(double)));
  if (!out) throw data_error("write failed: " + path.string());
}

inline FeatureDataset load_features(const std::filesystem::path& path,
                                    const std::optional<std::vector<std::string>>& label_map = {}) {
  if (format_for_path(path) == DataFormat::binary) return load_binary(path, label_map);
  return load_csv(path, label_map);
}

inline void save_features(const FeatureDataset& ds, const std::filesystem::path& path) {
  if (format_for_path(path) == DataFormat::binary)
    save_binary(ds, path);
  else
    save_csv(ds, path);
}

}  // namespace rbml
