#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace dupliq::fuzzy {

/// Weighted-ratio cascade constants.
inline constexpr double kUnbaseScale = 0.95;
inline constexpr double kPartialScale = 0.9;
inline constexpr double kLongPartialScale = 0.6;
inline constexpr double kTokenBranchLengthRatio = 1.5;
inline constexpr double kLongPartialLengthRatio = 8.0;

/// Longest common subsequence length over unicode scalars (bit-parallel).
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

/// round(100 * 2 * lcs / total), half away from zero; total == 0 gives 100.
int ratio_from_lcs(std::size_t lcs, std::size_t total);

/// 100 * 2 * LCS / (|s1| + |s2|) on raw text, rounded. Both empty -> 100.
int indel_ratio(std::string_view s1, std::string_view s2);

/// Best indel_ratio of the shorter string against every same-length window
/// of the longer one. Exactly one side empty -> 0.
int partial_ratio(std::string_view s1, std::string_view s2);

/// Normalize, tokenize, sort, rejoin; then indel_ratio (partial_ratio when
/// `partial`).
int token_sort_ratio(std::string_view s1, std::string_view s2, bool partial = false);

/// Three-string set decomposition (sorted intersection plus each sorted
/// remainder); best pairwise score. Exactly one normalized side empty -> 0,
/// both empty -> 100.
int token_set_ratio(std::string_view s1, std::string_view s2, bool partial = false);

/// indel_ratio of the normalized strings.
int qratio(std::string_view s1, std::string_view s2);

/// Weighted cascade over the ratios above, on normalized strings.
int wratio(std::string_view s1, std::string_view s2);

struct FuzzyFeatures {
  double qratio = 0;
  double wratio = 0;
  double partial_ratio = 0;
  double token_set_ratio = 0;
  double token_sort_ratio = 0;
  double partial_token_set_ratio = 0;
  double partial_token_sort_ratio = 0;
};

/// All seven ratios for one pair. qratio and the token ratios normalize
/// their input; partial_ratio compares the raw text.
FuzzyFeatures fuzzy_features(std::string_view q1, std::string_view q2);

}  // namespace dupliq::fuzzy
