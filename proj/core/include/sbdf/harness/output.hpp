#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sbdf::harness {

/// Git blob id: SHA-1 of "blob <size>\0" followed by the content.
std::string git_blob_sha1(std::string_view content);
std::string git_blob_sha1_file(const std::filesystem::path& path);

/// Plain comma-separated writer; doubles go through format_double.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& s);
  CsvWriter& empty();
  void end_row();
  void close();
  const std::filesystem::path& path() const { return path_; }

 private:
  void sep();

  std::filesystem::path path_;
  std::ofstream out_;
  bool first_ = true;
};

/// Collects `key = value` lines and output files; write() appends the git
/// blob id of every listed output.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void set(const std::string& key, double value);
  void set_config(const std::vector<std::pair<std::string, std::string>>& echo);
  void add_output(const std::filesystem::path& path) { outputs_.push_back(path); }
  const std::vector<std::filesystem::path>& outputs() const { return outputs_; }

  /// Writes `dir/manifest.txt` and returns its path.
  std::filesystem::path write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::filesystem::path> outputs_;
};

/// "snapshot_t<t>.sbdfgrid" with t in shortest round-trip form.
std::string snapshot_name(double t, const std::string& field = "");

}  // namespace sbdf::harness
