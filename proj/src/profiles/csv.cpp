#include "recourse/profiles/csv.hpp"

#include <charconv>
#include <vector>

#include "recourse/error.hpp"
#include "recourse/util/files.hpp"

namespace recourse {

using nlohmann::json;

std::string dataset_to_csv(const Dataset& data) {
  std::string out;
  const auto& features = data.schema->features();
  for (const auto& f : features) {
    out += f.name;
    out += ',';
  }
  out += "label\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (double v : data.raw.row(r)) {
      out += format_double(v);
      out += ',';
    }
    out += std::to_string(data.labels[r]);
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_csv(data));
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || cell.empty()) {
    throw ParseError("csv: malformed number '" + std::string(cell) + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(col),
                     row, col);
  }
  return v;
}

}  // namespace

Dataset dataset_from_csv(std::string_view text, const ProfileSchema& schema) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw SchemaError("csv: missing header row");

  const auto header = split_line(lines[0]);
  if (header.size() != schema.size() + 1) {
    throw SchemaError("csv: header has " + std::to_string(header.size()) + " columns, expected " +
                      std::to_string(schema.size() + 1));
  }
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (header[j] != schema.feature(j).name) {
      throw SchemaError("csv: column " + std::to_string(j) + " is '" + std::string(header[j]) + "', expected '" +
                            schema.feature(j).name + "'",
                        std::string(header[j]));
    }
  }
  if (header.back() != "label") throw SchemaError("csv: last column must be 'label'", std::string(header.back()));

  Matrix raw(lines.size() - 1, schema.size());
  std::vector<int> labels;
  labels.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    if (cells.size() != header.size()) {
      throw ParseError("csv: row " + std::to_string(r) + " has " + std::to_string(cells.size()) + " cells", r, 0);
    }
    for (std::size_t j = 0; j < schema.size(); ++j) raw(r - 1, j) = parse_cell(cells[j], r, j);
    const double label = parse_cell(cells.back(), r, schema.size());
    if (label != 0.0 && label != 1.0) {
      throw ParseError("csv: label must be 0 or 1 at row " + std::to_string(r), r, schema.size());
    }
    labels.push_back(static_cast<int>(label));
  }
  return make_dataset(schema, std::move(raw), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, const ProfileSchema& schema) {
  return dataset_from_csv(read_file(path), schema);
}

RawProfile profile_from_json(const json& obj, const ProfileSchema& schema) {
  if (!obj.is_object()) throw ParseError("profile: expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (key != "label" && !schema.contains(key)) throw SchemaError("profile: unknown feature '" + key + "'", key);
  }
  RawProfile raw{Vector(schema.size())};
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& name = schema.feature(j).name;
    const auto it = obj.find(name);
    if (it == obj.end()) throw SchemaError("profile: missing feature '" + name + "'", name);
    if (!it->is_number()) throw ParseError("profile: feature '" + name + "' is not a number", 0, j);
    raw.values[j] = it->get<double>();
  }
  return raw;
}

RawProfile parse_profile_json(std::string_view text, const ProfileSchema& schema) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("profile: invalid JSON: ") + e.what());
  }
  return profile_from_json(obj, schema);
}

json profile_to_json(const RawProfile& raw, const ProfileSchema& schema) {
  if (raw.values.size() != schema.size()) throw SpecError("profile_to_json: width mismatch");
  json obj = json::object();
  for (std::size_t j = 0; j < schema.size(); ++j) obj[schema.feature(j).name] = raw.values[j];
  return obj;
}

}  // namespace recourse
