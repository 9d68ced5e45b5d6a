#include "vwss/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <system_error>

#include "vwss/errors.hpp"

namespace vwss::io {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

std::string digest_hex(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest.data(), &len) != 1) {
    throw InputError("sha256 finalization failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0f]);
  }
  return out;
}

MdCtx new_sha256_ctx() {
  MdCtx ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw InputError("sha256 initialization failed");
  }
  return ctx;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  MdCtx ctx = new_sha256_ctx();
  if (EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1) {
    throw InputError("sha256 update failed");
  }
  return digest_hex(ctx.get());
}

std::string sha256_hex_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open file for hashing: " + path.string());
  }
  MdCtx ctx = new_sha256_ctx();
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const std::streamsize got = in.gcount();
    if (got > 0 &&
        EVP_DigestUpdate(ctx.get(), buf.data(),
                         static_cast<std::size_t>(got)) != 1) {
      throw InputError("sha256 update failed on " + path.string());
    }
  }
  if (in.bad()) {
    throw InputError("read error while hashing " + path.string());
  }
  return digest_hex(ctx.get());
}

std::string read_file_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open file: " + path.string());
  }
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw InputError("read error on " + path.string());
  }
  return content;
}

void atomic_write_text(const std::filesystem::path& path,
                       std::string_view content) {
  const std::filesystem::path dir =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::filesystem::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw InputError("cannot open temporary file for writing: " +
                       tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw InputError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot rename " + tmp.string() + " to " + path.string() +
                     ": " + ec.message());
  }
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::vector<std::string> split_lines(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xef\xbb\xbf") {
    text.remove_prefix(3);
  }
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(std::string_view field, const std::string& where) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw InputError("expected a number at " + where + ", got '" +
                     std::string(field) + "'");
  }
  return value;
}

std::size_t parse_index(std::string_view field, const std::string& where) {
  std::size_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw InputError("expected a nonnegative integer at " + where + ", got '" +
                     std::string(field) + "'");
  }
  return value;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.emplace_back(path.string(), sha256_hex_file(path));
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["command"] = command;
  j["parameters"] = parameters;
  j["inputs"] = nlohmann::json::array();
  for (const auto& [path, digest] : inputs) {
    j["inputs"].push_back({{"path", path}, {"sha256", digest}});
  }
  j["outputs"] = outputs;
  return j;
}

void RunManifest::write(const std::filesystem::path& path) const {
  atomic_write_text(path, to_json().dump(2) + "\n");
}

}  // namespace vwss::io
