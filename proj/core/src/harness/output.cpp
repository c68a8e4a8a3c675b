#include "sbdf/harness/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <sstream>
#include <stdexcept>

#include "sbdf/field_io.hpp"

namespace sbdf::harness {

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) && EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    const unsigned char b = md[i];
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::string git_blob_sha1_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return git_blob_sha1(ss.str());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path) {
  out_.open(path, std::ios::binary);
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (!first_) out_ << ',';
  first_ = false;
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  sep();
  out_ << s;
  return *this;
}

CsvWriter& CsvWriter::empty() {
  sep();
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("error writing " + path_.string());
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::set_config(const std::vector<std::pair<std::string, std::string>>& echo) { config_ = echo; }

std::filesystem::path Manifest::write(const std::filesystem::path& dir) const {
  const auto path = dir / "manifest.txt";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# sbdf run manifest\n";
  out << "command = " << command_ << "\n\n[config]\n";
  for (const auto& [k, v] : config_) out << k << " = " << v << '\n';
  out << "\n[run]\n";
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  out << "\n[outputs]\n";
  for (const auto& p : outputs_) out << p.filename().string() << " = " << git_blob_sha1_file(p) << '\n';
  if (!out) throw std::runtime_error("error writing " + path.string());
  return path;
}

std::string snapshot_name(double t, const std::string& field) {
  return "snapshot_" + (field.empty() ? std::string() : field + "_") + "t" + format_double(t) + ".sbdfgrid";
}

}  // namespace sbdf::harness
