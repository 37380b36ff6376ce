#pragma once

#include <string>
#include <string_view>

namespace dupliq::utf8 {

/// Decodes UTF-8 into unicode scalars. Invalid sequences decode to U+FFFD,
/// one replacement per offending byte.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);

/// Number of unicode scalars, counted the same way decode() does.
std::size_t length(std::string_view text);

char32_t to_lower(char32_t c);
bool is_space(char32_t c);
/// Letters and digits. Non-ASCII scalars count as alphanumeric unless they
/// fall in a known punctuation, symbol or space block.
bool is_alnum(char32_t c);

std::string to_lower(std::string_view text);

}  // namespace dupliq::utf8
