#include "dxtrust/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace dxtrust {

std::string normalize(std::string_view text)
{
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status))
        throw std::runtime_error("ICU NFC normalizer unavailable");

    icu::UnicodeString source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString composed = nfc->normalize(source, status);
    if (U_FAILURE(status))
        composed = source;
    composed.toLower(icu::Locale::getRoot());

    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (int32_t i = 0; i < composed.length();) {
        UChar32 c = composed.char32At(i);
        i += U16_LENGTH(c);
        if (u_ispunct(c) || u_isUWhiteSpace(c) || u_iscntrl(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && collapsed.length() > 0)
            collapsed.append(static_cast<UChar>(' '));
        pending_space = false;
        collapsed.append(c);
    }

    // Lowercasing can decompose; recompose so the result is a fixed point.
    icu::UnicodeString result = nfc->normalize(collapsed, status);
    if (U_FAILURE(status))
        result = collapsed;
    std::string out;
    result.toUTF8String(out);
    return out;
}

std::vector<std::string> tokenize_normalized(std::string_view normalized)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < normalized.size()) {
        std::size_t end = normalized.find(' ', start);
        if (end == std::string_view::npos)
            end = normalized.size();
        if (end > start)
            out.emplace_back(normalized.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::vector<std::string> tokens(std::string_view text)
{
    return tokenize_normalized(normalize(text));
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string trim(std::string_view text)
{
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1])))
        --e;
    return std::string(text.substr(b, e - b));
}

std::vector<std::string> split_lines(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size())
                out.emplace_back(text.substr(start));
            break;
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        out.emplace_back(line);
        start = end + 1;
    }
    return out;
}

std::string to_lower_ascii(std::string_view text)
{
    std::string out(text);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool starts_with_ci(std::string_view text, std::string_view prefix)
{
    if (text.size() < prefix.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

std::string format_fixed(double value, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    std::string out = buf;
    if (out == "-0" || out.rfind("-0.", 0) == 0) {
        bool all_zero = out.find_first_not_of("-0.") == std::string::npos;
        if (all_zero)
            out.erase(0, 1);
    }
    return out;
}

}  // namespace dxtrust
