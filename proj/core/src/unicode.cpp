#include "morphalign/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "morphalign/error.hpp"

namespace morphalign::unicode {
namespace {

// Length of the UTF-8 sequence starting at `bytes[pos]`, or 0 if malformed.
std::size_t sequence_length(std::string_view bytes, std::size_t pos) noexcept {
  const auto lead = static_cast<unsigned char>(bytes[pos]);
  std::size_t len = 0;
  char32_t cp = 0;
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return 0;
  }
  if (pos + len > bytes.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const auto cont = static_cast<unsigned char>(bytes[pos + i]);
    if ((cont & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (cont & 0x3F);
  }
  // Overlong forms, surrogates and values past U+10FFFF.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return 0;
  if (cp >= 0xD800 && cp <= 0xDFFF) return 0;
  if (cp > 0x10FFFF) return 0;
  return len;
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) noexcept {
  for (std::size_t pos = 0; pos < bytes.size();) {
    const std::size_t len = sequence_length(bytes, pos);
    if (len == 0) return false;
    pos += len;
  }
  return true;
}

std::vector<std::string> code_points(std::string_view utf8) {
  std::vector<std::string> out;
  out.reserve(utf8.size());
  for (std::size_t pos = 0; pos < utf8.size();) {
    const std::size_t len = sequence_length(utf8, pos);
    if (len == 0) throw DataError("invalid UTF-8 in \"" + std::string(utf8) + "\"");
    out.emplace_back(utf8.substr(pos, len));
    pos += len;
  }
  return out;
}

std::size_t length(std::string_view utf8) {
  std::size_t n = 0;
  for (const char c : utf8) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string nfc(std::string_view utf8) {
  if (!is_valid_utf8(utf8)) throw DataError("invalid UTF-8 in \"" + std::string(utf8) + "\"");
  bool ascii = true;
  for (const char c : utf8) {
    if (static_cast<unsigned char>(c) >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) return std::string(utf8);

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw DataError("ICU NFC normalizer unavailable");
  const icu::UnicodeString source =
      icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  const icu::UnicodeString normalized = normalizer->normalize(source, status);
  if (U_FAILURE(status)) throw DataError("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

}  // namespace morphalign::unicode
