#include "dxtrust/datasets.hpp"

#include "dxtrust/errors.hpp"
#include "dxtrust/jsonl.hpp"
#include "dxtrust/text.hpp"

#include <fstream>
#include <set>

namespace dxtrust {

std::string_view to_string(Role role)
{
    return role == Role::Patient ? "Patient" : "Clinician";
}

std::string_view to_string(AgeBucket bucket)
{
    switch (bucket) {
    case AgeBucket::UpTo17: return "\xE2\x89\xA4" "17";
    case AgeBucket::Age18To25: return "18\xE2\x80\x93" "25";
    case AgeBucket::Age26To35: return "26\xE2\x80\x93" "35";
    case AgeBucket::Age36To45: return "36\xE2\x80\x93" "45";
    case AgeBucket::Age46To60: return "46\xE2\x80\x93" "60";
    case AgeBucket::Over60: return "60+";
    case AgeBucket::Unknown: return "unknown";
    }
    return "unknown";
}

AgeBucket bucket_age(std::optional<int> age)
{
    if (!age)
        return AgeBucket::Unknown;
    if (*age < 0)
        throw DomainError("age must be non-negative");
    if (*age <= 17)
        return AgeBucket::UpTo17;
    if (*age <= 25)
        return AgeBucket::Age18To25;
    if (*age <= 35)
        return AgeBucket::Age26To35;
    if (*age <= 45)
        return AgeBucket::Age36To45;
    if (*age <= 60)
        return AgeBucket::Age46To60;
    return AgeBucket::Over60;
}

namespace {

std::optional<int> optional_int(const json& obj, const char* field, std::size_t line, int lo, int hi)
{
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    if (!it->is_number_integer())
        throw SchemaError(line, field, "must be an integer");
    long long v = it->get<long long>();
    if (v < lo || v > hi)
        throw SchemaError(line, field, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

std::vector<std::string> string_list(const json& obj, const char* field, std::size_t line)
{
    std::vector<std::string> out;
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        return out;
    if (!it->is_array())
        throw SchemaError(line, field, "must be an array of strings");
    for (const auto& v : *it) {
        if (!v.is_string())
            throw SchemaError(line, field, "must be an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

Dialogue parse_dialogue(const json& rec, std::size_t line)
{
    Dialogue d;
    auto id = rec.find("id");
    if (id == rec.end() || !id->is_string() || id->get<std::string>().empty())
        throw SchemaError(line, "id", "missing or not a non-empty string");
    d.id = id->get<std::string>();

    auto turns = rec.find("turns");
    if (turns == rec.end() || !turns->is_array() || turns->empty())
        throw SchemaError(line, "turns", "missing or empty");
    int index = 0;
    for (const auto& t : *turns) {
        std::string prefix = "turns[" + std::to_string(index) + "].";
        if (!t.is_object())
            throw SchemaError(line, "turns[" + std::to_string(index) + "]", "must be an object");
        auto role = t.find("role");
        if (role == t.end() || !role->is_string())
            throw SchemaError(line, prefix + "role", "missing");
        std::string r = to_lower_ascii(role->get<std::string>());
        Utterance u;
        if (r == "patient")
            u.role = Role::Patient;
        else if (r == "clinician" || r == "doctor")
            u.role = Role::Clinician;
        else
            throw SchemaError(line, prefix + "role", "must be patient or clinician");
        auto text = t.find("text");
        if (text == t.end() || !text->is_string() || trim(text->get<std::string>()).empty())
            throw SchemaError(line, prefix + "text", "missing or empty");
        u.text = text->get<std::string>();
        u.turn_index = index++;
        d.turns.push_back(std::move(u));
    }

    d.age_years = optional_int(rec, "age", line, 0, 150);
    if (auto g = rec.find("gender"); g != rec.end() && !g->is_null()) {
        if (!g->is_string())
            throw SchemaError(line, "gender", "must be a string");
        d.gender = g->get<std::string>();
    }
    if (auto g = rec.find("gold"); g != rec.end() && !g->is_null()) {
        if (!g->is_object())
            throw SchemaError(line, "gold", "must be an object");
        GoldAnnotation gold;
        gold.depression_risk = optional_int(*g, "depression_risk", line, 0, 3);
        gold.suicide_risk = optional_int(*g, "suicide_risk", line, 0, 3);
        gold.symptoms = string_list(*g, "symptoms", line);
        gold.exclusions = string_list(*g, "exclusions", line);
        gold.duration_days = optional_int(*g, "duration_days", line, 0, 1000000);
        d.gold = std::move(gold);
    }
    if (auto s = rec.find("silver_label"); s != rec.end() && !s->is_null()) {
        if (!s->is_string())
            throw SchemaError(line, "silver_label", "must be a string");
        d.silver_label = s->get<std::string>();
    }
    return d;
}

}  // namespace

std::vector<Dialogue> load_dialogues(std::istream& in)
{
    auto records = read_jsonl(in, [](std::size_t line, const std::string& msg) {
        throw SchemaError(line, "<record>", msg);
    });
    std::vector<Dialogue> out;
    std::set<std::string> ids;
    for (const auto& [line, rec] : records) {
        Dialogue d = parse_dialogue(rec, line);
        if (!ids.insert(d.id).second)
            throw SchemaError(line, "id", "duplicate id " + d.id);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Dialogue> load_dialogues(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    return load_dialogues(in);
}

json to_json(const Dialogue& d)
{
    json turns = json::array();
    for (const auto& u : d.turns) {
        std::string role = u.role == Role::Patient ? "patient" : "clinician";
        turns.push_back(json{{"role", role}, {"text", u.text}});
    }
    json rec{{"id", d.id}, {"turns", turns}};
    if (d.age_years)
        rec["age"] = *d.age_years;
    if (d.gender)
        rec["gender"] = *d.gender;
    if (d.gold) {
        json g = json::object();
        if (d.gold->depression_risk)
            g["depression_risk"] = *d.gold->depression_risk;
        if (d.gold->suicide_risk)
            g["suicide_risk"] = *d.gold->suicide_risk;
        g["symptoms"] = d.gold->symptoms;
        g["exclusions"] = d.gold->exclusions;
        if (d.gold->duration_days)
            g["duration_days"] = *d.gold->duration_days;
        rec["gold"] = g;
    }
    if (d.silver_label)
        rec["silver_label"] = *d.silver_label;
    return rec;
}

std::string serialize_dialogues(const std::vector<Dialogue>& dialogues)
{
    std::vector<json> records;
    records.reserve(dialogues.size());
    for (const auto& d : dialogues)
        records.push_back(to_json(d));
    return to_jsonl(records);
}

std::string render_dialogue(const Dialogue& d)
{
    std::string out;
    for (const auto& u : d.turns) {
        out += "[" + std::to_string(u.turn_index) + "] ";
        out += to_string(u.role);
        out += ": ";
        out += u.text;
        out += '\n';
    }
    return out;
}

}  // namespace dxtrust
