#include "auxlearn/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "auxlearn/errors.hpp"

namespace auxlearn {

namespace {

constexpr const char* kHeader = "example_id,class_name,source_synset,split";

void check_field(const std::string& value, const char* what) {
  if (value.find(',') != std::string::npos ||
      value.find('\n') != std::string::npos) {
    throw std::invalid_argument(std::string("manifest ") + what +
                                " must not contain commas or newlines: '" +
                                value + "'");
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

std::string to_string(Split split) {
  return split == Split::Train ? "train" : "test";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  throw ParseError("unknown split '" + name + "' (expected train or test)");
}

std::vector<long> DatasetManifest::class_counts(std::optional<Split> split) const {
  std::vector<long> counts(class_names.size(), 0);
  for (const ManifestRecord& r : records) {
    if (split.has_value() && r.split != *split) continue;
    counts.at(static_cast<std::size_t>(r.class_label)) += 1;
  }
  return counts;
}

std::string write_manifest_text(const DatasetManifest& manifest) {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const ManifestRecord& r : manifest.records) {
    if (r.class_label < 0 || r.class_label >= manifest.num_classes()) {
      throw std::invalid_argument("manifest record '" + r.example_id +
                                  "' has out-of-range class label");
    }
    const std::string& class_name =
        manifest.class_names[static_cast<std::size_t>(r.class_label)];
    const std::string synset = r.source_synset.value_or("");
    check_field(r.example_id, "example_id");
    check_field(class_name, "class_name");
    check_field(synset, "source_synset");
    out << r.example_id << ',' << class_name << ',' << synset << ','
        << to_string(r.split) << '\n';
  }
  return out.str();
}

DatasetManifest read_manifest_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) {
    throw ParseError("manifest: empty file, expected header row");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw ParseError("manifest line 1: expected header '" +
                     std::string(kHeader) + "'");
  }

  DatasetManifest manifest;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    }
    ManifestRecord record;
    record.example_id = fields[0];
    const std::string& class_name = fields[1];
    if (class_name.empty()) {
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": empty class name");
    }
    auto it = std::find(manifest.class_names.begin(), manifest.class_names.end(),
                        class_name);
    if (it == manifest.class_names.end()) {
      manifest.class_names.push_back(class_name);
      record.class_label = manifest.num_classes() - 1;
    } else {
      record.class_label =
          static_cast<int>(std::distance(manifest.class_names.begin(), it));
    }
    if (!fields[2].empty()) {
      record.source_synset = fields[2];
    }
    try {
      record.split = split_from_string(fields[3]);
    } catch (const ParseError&) {
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": unknown split '" + fields[3] + "'");
    }
    manifest.records.push_back(std::move(record));
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open manifest for writing: " + path.string());
  }
  out << write_manifest_text(manifest);
  if (!out) {
    throw std::runtime_error("failed writing manifest: " + path.string());
  }
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open manifest: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_manifest_text(buf.str());
}

}  // namespace auxlearn
