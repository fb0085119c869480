#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dxtrust {

/// Canonical surface form used for alias matching and local embeddings:
/// Unicode NFC, lowercase, punctuation replaced by spaces, whitespace
/// collapsed and trimmed. Idempotent.
std::string normalize(std::string_view text);

/// Splits already-normalized text on single spaces.
std::vector<std::string> tokenize_normalized(std::string_view normalized);

/// normalize() followed by tokenize_normalized().
std::vector<std::string> tokens(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

std::string trim(std::string_view text);

std::vector<std::string> split_lines(std::string_view text);

std::string to_lower_ascii(std::string_view text);

bool starts_with_ci(std::string_view text, std::string_view prefix);

/// Fixed-precision decimal rendering used wherever output must be byte-stable.
std::string format_fixed(double value, int digits = 6);

}  // namespace dxtrust
