#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace morphalign::unicode {

/// Canonical composed form (NFC) of a UTF-8 string. Throws DataError on invalid UTF-8.
std::string nfc(std::string_view utf8);

/// Splits a UTF-8 string into one string per Unicode scalar value.
/// Throws DataError on invalid UTF-8.
std::vector<std::string> code_points(std::string_view utf8);

/// Number of Unicode scalar values in a valid UTF-8 string.
std::size_t length(std::string_view utf8);

bool is_valid_utf8(std::string_view bytes) noexcept;

}  // namespace morphalign::unicode
