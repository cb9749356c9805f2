#include "fetch.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include "din/error.hpp"

namespace din::fetch {

namespace {

std::size_t append(char* ptr, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(ptr, size * n);
  return size * n;
}

std::uint32_t le32(const std::string& s, std::size_t at) {
  if (at + 4 > s.size()) throw Error("zip: truncated archive");
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(s[at + k]);
  return v;
}

std::uint16_t le16(const std::string& s, std::size_t at) {
  if (at + 2 > s.size()) throw Error("zip: truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) | (static_cast<unsigned char>(s[at + 1]) << 8));
}

bool ends_with_ci(const std::string& s, const std::string& suffix) {
  if (suffix.size() > s.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
  });
}

std::string inflate_raw(const char* data, std::size_t size, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error("zip: inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
  zs.avail_in = static_cast<uInt>(size);
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) throw Error("zip: corrupt deflate stream");
  return out;
}

}  // namespace

std::string download(const std::string& url) {
  CURL* curl = curl_easy_init();
  if (!curl) throw Error("curl_easy_init failed");
  std::string body;
  char err[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, append);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, err);
  curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, 30L);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK)
    throw Error("download of '" + url + "' failed: " + (err[0] ? std::string(err) : curl_easy_strerror(rc)));
  return body;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

std::vector<ZipEntry> unzip(const std::string& a, const std::string& suffix) {
  // End of central directory: signature 0x06054b50, searched backwards past
  // an optional comment.
  if (a.size() < 22) throw Error("zip: not an archive");
  std::size_t eocd = std::string::npos;
  for (std::size_t p = a.size() - 22 + 1; p-- > 0;) {
    if (le32(a, p) == 0x06054b50) {
      eocd = p;
      break;
    }
    if (a.size() - p > 22 + 65535) break;
  }
  if (eocd == std::string::npos) throw Error("zip: no central directory");
  const std::size_t count = le16(a, eocd + 10);
  std::size_t p = le32(a, eocd + 16);

  std::vector<ZipEntry> out;
  for (std::size_t k = 0; k < count; ++k) {
    if (le32(a, p) != 0x02014b50) throw Error("zip: bad central directory entry");
    const std::uint16_t method = le16(a, p + 10);
    const std::uint32_t csize = le32(a, p + 20);
    const std::uint32_t usize = le32(a, p + 24);
    const std::uint16_t nlen = le16(a, p + 28), xlen = le16(a, p + 30), clen = le16(a, p + 32);
    const std::uint32_t local = le32(a, p + 42);
    if (p + 46 + nlen > a.size()) throw Error("zip: truncated archive");
    std::string name = a.substr(p + 46, nlen);
    p += 46 + nlen + xlen + clen;
    if (!ends_with_ci(name, suffix)) continue;

    if (le32(a, local) != 0x04034b50) throw Error("zip: bad local header for '" + name + "'");
    const std::size_t data_at = local + 30 + le16(a, local + 26) + le16(a, local + 28);
    if (data_at + csize > a.size()) throw Error("zip: truncated member '" + name + "'");
    ZipEntry e;
    e.name = name;
    if (method == 0) e.data = a.substr(data_at, csize);
    else if (method == 8) e.data = inflate_raw(a.data() + data_at, csize, usize);
    else throw Error("zip: member '" + name + "' uses unsupported method " + std::to_string(method));
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace din::fetch
