#include "dxtrust/sections.hpp"

#include "dxtrust/criteria.hpp"
#include "dxtrust/errors.hpp"
#include "dxtrust/retrieval.hpp"
#include "dxtrust/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace dxtrust {

const std::vector<std::string>& known_section_labels()
{
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> v{section::kStepwise,        section::kFinalDiagnosis, section::kCriteriaCheck,
                                   section::kExclusionCheck,  section::kCandidates,     section::kReasoning,
                                   section::kSymptoms,        section::kDuration};
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
        return v;
    }();
    return labels;
}

namespace {

std::string strip_decoration(std::string_view line)
{
    std::string t = trim(line);
    std::size_t i = 0;
    while (i < t.size() && (t[i] == '#' || t[i] == '*' || t[i] == ' '))
        ++i;
    return t.substr(i);
}

/// Returns (label, inline body) when `line` is a section header.
std::optional<std::pair<std::string, std::string>> match_header(std::string_view line)
{
    std::string t = strip_decoration(line);
    for (const auto& label : known_section_labels()) {
        if (!starts_with_ci(t, label))
            continue;
        std::string rest = t.substr(label.size());
        std::size_t i = 0;
        while (i < rest.size() && rest[i] == '*')
            ++i;
        rest = rest.substr(i);
        if (trim(rest).empty())
            return std::make_pair(label, std::string());
        if (rest[0] != ':')
            continue;
        rest = rest.substr(1);
        i = 0;
        while (i < rest.size() && (rest[i] == '*' || rest[i] == ' '))
            ++i;
        return std::make_pair(label, trim(rest.substr(i)));
    }
    return std::nullopt;
}

bool is_bullet(std::string_view line)
{
    std::string t = trim(line);
    if (t.empty())
        return false;
    if (t[0] == '-' || t[0] == '*' || t[0] == '\xE2')  // '-', '*', or a UTF-8 bullet
        return true;
    std::size_t j = 0;
    while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j])))
        ++j;
    return j > 0 && j < t.size() && (t[j] == '.' || t[j] == ')');
}

std::string strip_bullet_marker(std::string_view line)
{
    std::string t = trim(line);
    if (starts_with_ci(t, "\xE2\x80\xA2"))
        return trim(t.substr(3));
    std::size_t i = 0;
    while (i < t.size() && (t[i] == '-' || t[i] == '*'))
        ++i;
    if (i == 0) {
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])))
            ++i;
        if (i < t.size() && (t[i] == '.' || t[i] == ')'))
            ++i;
    }
    return trim(t.substr(i));
}

/// Splits "name (details)" into ("name", "details").
std::pair<std::string, std::string> split_parenthetical(const std::string& text)
{
    std::string t = trim(text);
    if (!t.empty() && t.back() == ')') {
        auto open = t.rfind('(');
        if (open != std::string::npos)
            return {trim(t.substr(0, open)), t.substr(open + 1, t.size() - open - 2)};
    }
    return {t, ""};
}

std::vector<EntityId> resolve_kind(const KnowledgeGraph& kg, const std::string& surface, EntityKind kind)
{
    std::vector<EntityId> out;
    for (const auto& id : kg.lookup(surface))
        if (kg.at(id).kind == kind)
            out.push_back(id);
    if (!out.empty())
        return out;
    for (const auto& id : extract_entities(surface, kg))
        if (kg.at(id).kind == kind)
            out.push_back(id);
    return out;
}

std::optional<bool> parse_bool(std::string_view value)
{
    std::string n = normalize(value);
    auto first = n.substr(0, n.find(' '));
    if (n.rfind("not met", 0) == 0 || first == "no" || first == "false" || first == "unmet")
        return false;
    if (first == "yes" || first == "true" || first == "met" || first == "clear")
        return true;
    return std::nullopt;
}

int number_word(const std::string& w)
{
    static const char* words[] = {"zero", "one", "two",   "three", "four",   "five",  "six",
                                  "seven", "eight", "nine", "ten", "eleven", "twelve"};
    for (int i = 0; i < 13; ++i)
        if (w == words[i])
            return i;
    return -1;
}

}  // namespace

SectionMap scan_sections(std::string_view text)
{
    SectionMap out;
    std::optional<std::string> current;
    std::string body;
    auto flush = [&] {
        if (current)
            out[*current] = trim(body);
        body.clear();
    };
    for (const auto& line : split_lines(text)) {
        if (auto h = match_header(line)) {
            flush();
            current = h->first;
            body = h->second;
            if (!body.empty())
                body += '\n';
            continue;
        }
        if (current) {
            body += line;
            body += '\n';
        }
    }
    flush();
    return out;
}

SectionMap parse_structured_output(std::string_view text, const std::vector<std::string>& expected_sections)
{
    SectionMap found = scan_sections(text);
    std::vector<std::string> missing;
    for (const auto& label : expected_sections)
        if (!found.count(label))
            missing.push_back(label);
    if (!missing.empty())
        throw MissingSection(std::move(missing));
    return found;
}

void merge_assertions(StepAssertions& into, const StepAssertions& other)
{
    if (other.count_met)
        into.count_met = other.count_met;
    if (other.core_met)
        into.core_met = other.core_met;
    if (other.duration_met)
        into.duration_met = other.duration_met;
    if (other.exclusions_clear)
        into.exclusions_clear = other.exclusions_clear;
}

std::vector<SymptomLine> parse_symptom_lines(std::string_view body, const KnowledgeGraph& kg,
                                             std::vector<std::string>* unresolved)
{
    std::vector<SymptomLine> out;
    for (const auto& line : split_lines(body)) {
        if (!is_bullet(line))
            continue;
        auto [surface, details] = split_parenthetical(strip_bullet_marker(line));
        if (surface.empty() || normalize(surface) == "none")
            continue;
        std::vector<int> turns;
        for (const auto& tok : tokens(details)) {
            if (!tok.empty() && std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
                turns.push_back(std::stoi(tok));
        }
        auto ids = resolve_kind(kg, surface, EntityKind::Symptom);
        if (ids.empty()) {
            if (unresolved)
                unresolved->push_back(surface);
            continue;
        }
        for (const auto& id : ids) {
            auto it = std::find_if(out.begin(), out.end(), [&](const SymptomLine& s) { return s.id == id; });
            if (it == out.end()) {
                out.push_back({id, turns});
                it = out.end() - 1;
            } else {
                it->turns.insert(it->turns.end(), turns.begin(), turns.end());
            }
            std::sort(it->turns.begin(), it->turns.end());
            it->turns.erase(std::unique(it->turns.begin(), it->turns.end()), it->turns.end());
        }
    }
    return out;
}

std::optional<int> parse_duration_days(std::string_view body)
{
    auto toks = tokens(body);
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        int n = -1;
        if (!toks[i].empty() &&
            std::all_of(toks[i].begin(), toks[i].end(), [](unsigned char c) { return std::isdigit(c); }))
            n = std::stoi(toks[i]);
        else
            n = number_word(toks[i]);
        if (n < 0)
            continue;
        const std::string& unit = toks[i + 1];
        if (unit == "day" || unit == "days")
            return n;
        if (unit == "week" || unit == "weeks")
            return n * 7;
        if (unit == "month" || unit == "months")
            return n * 30;
        if (unit == "year" || unit == "years")
            return n * 365;
    }
    return std::nullopt;
}

std::vector<EntityId> parse_disorder_list(std::string_view body, const KnowledgeGraph& kg,
                                          std::vector<std::string>* unresolved)
{
    std::vector<EntityId> out;
    for (const auto& line : split_lines(body)) {
        if (!is_bullet(line))
            continue;
        auto [surface, details] = split_parenthetical(strip_bullet_marker(line));
        if (surface.empty() || normalize(surface) == "none")
            continue;
        auto ids = resolve_kind(kg, surface, EntityKind::Disorder);
        if (ids.empty() && unresolved)
            unresolved->push_back(surface);
        for (const auto& id : ids)
            if (std::find(out.begin(), out.end(), id) == out.end())
                out.push_back(id);
    }
    return out;
}

namespace {

template <typename OnLine>
void walk_blocks(std::string_view body, const KnowledgeGraph& kg, std::vector<std::string>* unresolved,
                 OnLine on_line)
{
    std::optional<EntityId> current;
    for (const auto& raw : split_lines(body)) {
        std::string line = trim(raw);
        if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
            std::string name = trim(line.substr(1, line.size() - 2));
            auto ids = resolve_kind(kg, name, EntityKind::Disorder);
            if (ids.size() == 1) {
                current = ids.front();
                on_line(*current, std::string(), true);
            } else {
                current.reset();
                if (unresolved)
                    unresolved->push_back(name);
            }
            continue;
        }
        if (current)
            on_line(*current, raw, false);
    }
}

}  // namespace

std::map<EntityId, StepAssertions> parse_assertion_blocks(std::string_view body, const KnowledgeGraph& kg,
                                                          std::vector<std::string>* unresolved)
{
    std::map<EntityId, StepAssertions> out;
    walk_blocks(body, kg, unresolved, [&](const EntityId& d, const std::string& raw, bool header) {
        StepAssertions& a = out[d];
        if (header)
            return;
        std::string line = strip_bullet_marker(raw);
        auto colon = line.find(':');
        if (colon == std::string::npos)
            return;
        std::string key = normalize(line.substr(0, colon));
        auto value = parse_bool(line.substr(colon + 1));
        if (!value)
            return;
        if (key == "symptom count met" || key == "symptom count" || key == "count met")
            a.count_met = value;
        else if (key == "core symptom present" || key == "core symptoms present" || key == "core symptom met" ||
                 key == "core met")
            a.core_met = value;
        else if (key == "duration met" || key == "duration")
            a.duration_met = value;
        else if (key == "exclusions clear" || key == "exclusion clear" || key == "exclusions")
            a.exclusions_clear = value;
    });
    return out;
}

std::map<EntityId, std::string> assertion_block_texts(std::string_view body, const KnowledgeGraph& kg)
{
    std::map<EntityId, std::string> out;
    walk_blocks(body, kg, nullptr, [&](const EntityId& d, const std::string& raw, bool header) {
        std::string& text = out[d];
        if (header)
            return;
        text += raw;
        text += '\n';
    });
    for (auto& [d, text] : out)
        text = trim(text);
    return out;
}

std::optional<std::vector<EntityId>> parse_active_exclusions(std::string_view body, const KnowledgeGraph& kg,
                                                             std::vector<std::string>* unresolved)
{
    for (const auto& raw : split_lines(body)) {
        std::string line = strip_bullet_marker(raw);
        if (!starts_with_ci(line, "active exclusions"))
            continue;
        auto colon = line.find(':');
        std::string list = colon == std::string::npos ? "" : line.substr(colon + 1);
        std::vector<EntityId> out;
        std::string item;
        auto flush = [&] {
            std::string t = trim(item);
            item.clear();
            if (t.empty() || normalize(t) == "none")
                return;
            auto ids = resolve_kind(kg, t, EntityKind::Exclusion);
            if (ids.empty() && unresolved)
                unresolved->push_back(t);
            for (const auto& id : ids)
                if (std::find(out.begin(), out.end(), id) == out.end())
                    out.push_back(id);
        };
        for (char c : list) {
            if (c == ',' || c == ';') {
                flush();
                continue;
            }
            item += c;
        }
        flush();
        return out;
    }
    return std::nullopt;
}

std::optional<std::string> parse_final_diagnosis(std::string_view body, const KnowledgeGraph& kg)
{
    for (const auto& raw : split_lines(body)) {
        std::string line = strip_bullet_marker(raw);
        if (line.empty())
            continue;
        while (!line.empty() && (line.back() == '.' || line.back() == '*'))
            line.pop_back();
        std::string surface = split_parenthetical(line).first;
        std::string n = normalize(surface);
        if (n == "no diagnosis" || n == "nodiagnosis" || n == "none" || n == "no disorder")
            return std::string(kNoDiagnosis);
        auto ids = resolve_kind(kg, surface, EntityKind::Disorder);
        if (ids.size() == 1)
            return ids.front();
        return std::nullopt;
    }
    return std::nullopt;
}

std::string render_symptom_line(const KnowledgeGraph& kg, const SymptomLine& s)
{
    std::string out = "- " + kg.at(s.id).canonical_name;
    if (!s.turns.empty()) {
        out += " (turns ";
        for (std::size_t i = 0; i < s.turns.size(); ++i) {
            if (i)
                out += ", ";
            out += std::to_string(s.turns[i]);
        }
        out += ")";
    }
    return out;
}

std::string render_duration(std::optional<int> days)
{
    return days ? std::to_string(*days) + " days" : "unknown";
}

std::string render_yes_no(bool value)
{
    return value ? "yes" : "no";
}

std::string render_diagnosis(const KnowledgeGraph& kg, const std::string& label)
{
    if (label == kNoDiagnosis)
        return "No diagnosis";
    return kg.at(label).canonical_name;
}

}  // namespace dxtrust
