#include "emoconv/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Length in bytes of the UTF-8 sequence starting with lead byte `c`.
std::size_t utf8_len(unsigned char c) {
    if (c < 0x80) return 1;
    if ((c >> 5) == 0x6) return 2;
    if ((c >> 4) == 0xE) return 3;
    if ((c >> 3) == 0x1E) return 4;
    return 1;
}

char32_t decode_at(std::string_view s, std::size_t pos, std::size_t len) {
    const auto b = [&](std::size_t i) { return static_cast<unsigned char>(s[pos + i]); };
    switch (len) {
        case 1: return b(0);
        case 2: return ((b(0) & 0x1F) << 6) | (b(1) & 0x3F);
        case 3: return ((b(0) & 0x0F) << 12) | ((b(1) & 0x3F) << 6) | (b(2) & 0x3F);
        default: return ((b(0) & 0x07) << 18) | ((b(1) & 0x3F) << 12) | ((b(2) & 0x3F) << 6) | (b(3) & 0x3F);
    }
}

bool is_punct_cp(char32_t cp) {
    if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
    switch (cp) {
        case 0x00A1: case 0x00AB: case 0x00BB: case 0x00BF:
        case 0x2013: case 0x2014: case 0x2018: case 0x2019: case 0x201A:
        case 0x201C: case 0x201D: case 0x201E: case 0x2026:
            return true;
        default:
            return false;
    }
}

// Byte offsets of the code point boundaries in `word`.
std::vector<std::size_t> boundaries(std::string_view word) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos < word.size()) {
        out.push_back(pos);
        pos += std::min(utf8_len(static_cast<unsigned char>(word[pos])), word.size() - pos);
    }
    out.push_back(word.size());
    return out;
}

void split_word(std::string_view word, std::vector<std::string>& out) {
    const auto b = boundaries(word);
    const std::size_t n = b.size() - 1;  // code points
    const auto punct = [&](std::size_t i) { return is_punct_cp(decode_at(word, b[i], b[i + 1] - b[i])); };

    std::size_t lo = 0;
    while (lo < n && punct(lo)) ++lo;
    std::size_t hi = n;
    while (hi > lo && punct(hi - 1)) --hi;

    for (std::size_t i = 0; i < lo; ++i) out.emplace_back(word.substr(b[i], b[i + 1] - b[i]));
    if (hi > lo) out.emplace_back(word.substr(b[lo], b[hi] - b[lo]));
    for (std::size_t i = std::max(hi, lo); i < n; ++i) out.emplace_back(word.substr(b[i], b[i + 1] - b[i]));
}

const std::map<std::string, Role, std::less<>>& role_names() {
    static const std::map<std::string, Role, std::less<>> m = {
        {"E", Role::E}, {"N", Role::N}, {"Gminus", Role::Gminus}, {"Gplus", Role::Gplus}};
    return m;
}

const std::map<std::string, PairKind, std::less<>>& kind_names() {
    static const std::map<std::string, PairKind, std::less<>> m = {{"Anchor", PairKind::Anchor},
                                                                   {"ReducedLeft", PairKind::ReducedLeft},
                                                                   {"IncreasedRight", PairKind::IncreasedRight},
                                                                   {"BothShifted", PairKind::BothShifted}};
    return m;
}

std::string get_string(const json& j, const char* key, std::size_t line, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(where + ": missing field '" + key + "'", line);
    if (!it->is_string()) throw ValidationError(where + ": field '" + std::string(key) + "' must be a string", line);
    return it->get<std::string>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Enum names

std::string to_string(Language l) { return l == Language::en ? "en" : "de"; }

std::string to_string(Role r) {
    switch (r) {
        case Role::E: return "E";
        case Role::N: return "N";
        case Role::Gminus: return "Gminus";
        case Role::Gplus: return "Gplus";
    }
    return "?";
}

std::string to_string(Origin o) { return o == Origin::source ? "source" : "generated"; }

std::string to_string(PairKind k) {
    switch (k) {
        case PairKind::Anchor: return "Anchor";
        case PairKind::ReducedLeft: return "ReducedLeft";
        case PairKind::IncreasedRight: return "IncreasedRight";
        case PairKind::BothShifted: return "BothShifted";
    }
    return "?";
}

Language parse_language(std::string_view s) {
    if (s == "en") return Language::en;
    if (s == "de") return Language::de;
    throw ValidationError("unknown language '" + std::string(s) + "'");
}

Role parse_role(std::string_view s) {
    auto it = role_names().find(s);
    if (it == role_names().end()) throw ValidationError("unknown role '" + std::string(s) + "'");
    return it->second;
}

Origin parse_origin(std::string_view s) {
    if (s == "source") return Origin::source;
    if (s == "generated") return Origin::generated;
    throw ValidationError("unknown origin '" + std::string(s) + "'");
}

PairKind parse_pair_kind(std::string_view s) {
    auto it = kind_names().find(s);
    if (it == kind_names().end()) throw ValidationError("unknown pair kind '" + std::string(s) + "'");
    return it->second;
}

std::pair<Role, Role> roles_of(PairKind kind) {
    switch (kind) {
        case PairKind::Anchor: return {Role::E, Role::N};
        case PairKind::ReducedLeft: return {Role::Gminus, Role::N};
        case PairKind::IncreasedRight: return {Role::E, Role::Gplus};
        case PairKind::BothShifted: return {Role::Gminus, Role::Gplus};
    }
    return {Role::E, Role::N};
}

std::string pair_suffix(PairKind kind) {
    switch (kind) {
        case PairKind::Anchor: return "anchor";
        case PairKind::ReducedLeft: return "reduced_left";
        case PairKind::IncreasedRight: return "increased_right";
        case PairKind::BothShifted: return "both_shifted";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// TestInstance

const Argument& TestInstance::argument(Role role) const {
    auto it = arguments.find(role);
    if (it == arguments.end()) throw ValidationError("instance " + id + ": missing role " + to_string(role));
    return it->second;
}

const ArgumentPair& TestInstance::pair(PairKind kind) const {
    for (const auto& p : pairs)
        if (p.kind == kind) return p;
    throw ValidationError("instance " + id + ": missing pair kind " + to_string(kind));
}

const Argument& TestInstance::left_of(const ArgumentPair& p) const { return argument(roles_of(p.kind).first); }
const Argument& TestInstance::right_of(const ArgumentPair& p) const { return argument(roles_of(p.kind).second); }

void validate(const Argument& arg) {
    if (arg.id.empty()) throw ValidationError("argument with empty id");
    if (trim(arg.text).empty()) throw ValidationError("argument " + arg.id + ": empty text");
    const bool source_role = arg.role == Role::E || arg.role == Role::N;
    if (source_role && arg.origin != Origin::source)
        throw ValidationError("argument " + arg.id + ": role " + to_string(arg.role) + " requires origin source");
    if (!source_role && arg.origin != Origin::generated)
        throw ValidationError("argument " + arg.id + ": role " + to_string(arg.role) + " requires origin generated");
}

void validate(const TestInstance& inst) {
    if (inst.id.empty()) throw ValidationError("instance with empty id");
    if (trim(inst.topic.description).empty()) throw ValidationError("instance " + inst.id + ": empty topic description");
    for (Role role : kAllRoles) {
        auto it = inst.arguments.find(role);
        if (it == inst.arguments.end()) throw ValidationError("instance " + inst.id + ": missing role " + to_string(role));
        const Argument& arg = it->second;
        if (arg.role != role)
            throw ValidationError("instance " + inst.id + ": argument " + arg.id + " stored under role " +
                                  to_string(role) + " but has role " + to_string(arg.role));
        if (arg.language != inst.language)
            throw ValidationError("instance " + inst.id + ": argument " + arg.id + " language mismatch");
        validate(arg);
    }
    std::set<std::string> arg_ids;
    for (const auto& [role, arg] : inst.arguments) arg_ids.insert(arg.id);
    if (arg_ids.size() != 4) throw ValidationError("instance " + inst.id + ": argument ids are not distinct");

    if (inst.pairs.size() != 4)
        throw ValidationError("instance " + inst.id + ": expected 4 pairs, found " + std::to_string(inst.pairs.size()));
    std::set<PairKind> kinds;
    std::set<std::string> pair_ids;
    for (const auto& p : inst.pairs) {
        if (p.id.empty()) throw ValidationError("instance " + inst.id + ": pair with empty id");
        if (!pair_ids.insert(p.id).second) throw ValidationError("instance " + inst.id + ": duplicate pair id " + p.id);
        if (!kinds.insert(p.kind).second)
            throw ValidationError("instance " + inst.id + ": duplicate pair kind " + to_string(p.kind));
        const auto [lr, rr] = roles_of(p.kind);
        if (p.left_id != inst.arguments.at(lr).id || p.right_id != inst.arguments.at(rr).id)
            throw ValidationError("instance " + inst.id + ": pair " + p.id + " of kind " + to_string(p.kind) +
                                  " must hold (" + to_string(lr) + ", " + to_string(rr) + ")");
    }
}

std::vector<ArgumentPair> canonical_pairs(const std::string& instance_id, const std::map<Role, Argument>& arguments) {
    std::vector<ArgumentPair> pairs;
    for (PairKind kind : kAllPairKinds) {
        const auto [lr, rr] = roles_of(kind);
        pairs.push_back({instance_id + "/" + pair_suffix(kind), arguments.at(lr).id, arguments.at(rr).id, kind});
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Text processing

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_space(text[j])) ++j;
        if (j > i) split_word(text.substr(i, j - i), tokens);
        i = j;
    }
    return tokens;
}

std::vector<std::string> split_paragraphs(std::string_view raw) {
    std::vector<std::string> paragraphs;
    std::string current;
    std::istringstream in{std::string(raw)};
    std::string line;
    const auto flush = [&] {
        std::string t = trim(current);
        if (!t.empty()) paragraphs.push_back(std::move(t));
        current.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) {
            flush();
        } else {
            if (!current.empty()) current += '\n';
            current += line;
        }
    }
    flush();
    return paragraphs;
}

std::vector<Paragraph> segment_speech(std::string_view raw, const SegmentConfig& config) {
    const auto parts = split_paragraphs(raw);
    std::vector<Paragraph> out;
    if (parts.empty()) return out;

    Paragraph acc{parts[0], tokenize(parts[0]).size(), 0};
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::size_t next_tokens = tokenize(parts[i]).size();
        const bool bracket = config.open_brackets.find(parts[i].front()) != std::string::npos;
        if (acc.token_count < config.min_tokens || next_tokens < config.short_next_tokens || bracket) {
            acc.text += '\n';
            acc.text += parts[i];
            acc.token_count += next_tokens;
        } else {
            out.push_back(std::move(acc));
            acc = Paragraph{parts[i], next_tokens, i};
        }
    }
    out.push_back(std::move(acc));
    return out;
}

std::string utf8_lower(std::string_view s) {
    std::string out(s);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto c = static_cast<unsigned char>(out[i]);
        if (c < 0x80) {
            out[i] = static_cast<char>(std::tolower(c));
        } else if (c == 0xC3 && i + 1 < out.size()) {
            auto d = static_cast<unsigned char>(out[i + 1]);
            // U+00C0..U+00DE map to +0x20, except U+00D7 (multiplication sign).
            if (d >= 0x80 && d <= 0x9E && d != 0x97) out[i + 1] = static_cast<char>(d + 0x20);
            ++i;
        }
    }
    return out;
}

std::vector<Document> filter_by_keywords(const std::vector<Document>& documents,
                                         const std::vector<std::string>& keywords, KeywordField field) {
    std::vector<std::string> lowered;
    for (const auto& k : keywords) {
        std::string t = utf8_lower(trim(k));
        if (!t.empty()) lowered.push_back(std::move(t));
    }
    if (lowered.empty()) throw ConfigError("keyword list is empty");

    std::vector<Document> kept;
    for (const auto& doc : documents) {
        const std::string hay = utf8_lower(field == KeywordField::title ? doc.title : doc.intro);
        if (std::any_of(lowered.begin(), lowered.end(), [&](const std::string& k) { return hay.find(k) != std::string::npos; }))
            kept.push_back(doc);
    }
    return kept;
}

std::vector<std::string> parse_keywords(std::string_view content) {
    std::vector<std::string> out;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::vector<std::string> load_keywords(const std::filesystem::path& path) {
    auto kws = parse_keywords(read_file(path));
    if (kws.empty()) throw ConfigError("keyword file " + path.string() + " contains no keywords");
    return kws;
}

const std::vector<std::string>& default_keywords(Language language) {
    static const std::vector<std::string> en = {
        "iran", "integrat", "ukraine", "russia", "asylum", "deportation", "israel", "gaza", "expulsion",
        "displacement", "migration", "migrant", "immigrant", "refugee", "palestine", "invasion",
        "repatriation", "hamas", "hisbollah"};
    static const std::vector<std::string> de = {
        "ukraine", "russland", "migrant", "immigrant", "flüchtling", "asyl", "gaza", "iran", "palästina",
        "israel", "krieg", "invasion", "sanktionen", "waffenlieferungen", "friedensverhandlungen",
        "kriegsverbrechen", "flüchtlingskrise", "nato", "energieversorgung", "vertreibung", "migrationspolitik",
        "asylverfahren", "grenzsicherung", "integration", "abschiebung", "aufenthaltsgenehmigung",
        "menschenhandel", "seenotrettung", "rückführung", "schutzstatus", "waffenstillstand", "raketenangriffe",
        "besatzung", "zwei-staaten-lösung", "friedensprozess", "intifada", "hamas", "hisbollah",
        "menschenrechte", "un-resolution"};
    return language == Language::en ? en : de;
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const Argument& arg) {
    json j = {{"id", arg.id}, {"text", arg.text}, {"origin", to_string(arg.origin)}, {"language", to_string(arg.language)}};
    j["meta"] = json::object();
    for (const auto& [k, v] : arg.meta) j["meta"][k] = v;
    return j;
}

json to_json(const TestInstance& inst) {
    json j;
    j["id"] = inst.id;
    j["topic"] = {{"id", inst.topic.id}, {"description", inst.topic.description}};
    j["dataset"] = inst.dataset;
    j["language"] = to_string(inst.language);
    j["arguments"] = json::object();
    for (const auto& [role, arg] : inst.arguments) j["arguments"][to_string(role)] = to_json(arg);
    j["pairs"] = json::array();
    for (const auto& p : inst.pairs)
        j["pairs"].push_back({{"id", p.id}, {"kind", to_string(p.kind)}, {"left", p.left_id}, {"right", p.right_id}});
    return j;
}

TestInstance instance_from_json(const json& j, std::size_t line) {
    if (!j.is_object()) throw ValidationError("instance record must be a JSON object", line);
    TestInstance inst;
    inst.id = get_string(j, "id", line, "instance");
    const std::string where = "instance " + inst.id;
    try {
        auto topic = j.find("topic");
        if (topic == j.end() || !topic->is_object()) throw ValidationError(where + ": missing topic object", line);
        inst.topic.id = get_string(*topic, "id", line, where + " topic");
        inst.topic.description = get_string(*topic, "description", line, where + " topic");
        inst.dataset = get_string(j, "dataset", line, where);
        inst.language = parse_language(get_string(j, "language", line, where));

        auto args = j.find("arguments");
        if (args == j.end() || !args->is_object()) throw ValidationError(where + ": missing arguments object", line);
        for (auto it = args->begin(); it != args->end(); ++it) {
            Argument arg;
            arg.role = parse_role(it.key());
            const json& a = it.value();
            if (!a.is_object()) throw ValidationError(where + ": argument " + it.key() + " must be an object", line);
            arg.id = get_string(a, "id", line, where + " argument " + it.key());
            arg.text = get_string(a, "text", line, where + " argument " + arg.id);
            arg.origin = a.contains("origin") ? parse_origin(a.at("origin").get<std::string>())
                                              : (arg.role == Role::E || arg.role == Role::N ? Origin::source
                                                                                            : Origin::generated);
            arg.language = a.contains("language") ? parse_language(a.at("language").get<std::string>()) : inst.language;
            if (a.contains("meta")) {
                for (auto m = a.at("meta").begin(); m != a.at("meta").end(); ++m)
                    arg.meta[m.key()] = m.value().is_string() ? m.value().get<std::string>() : m.value().dump();
            }
            inst.arguments[arg.role] = std::move(arg);
        }

        auto pairs = j.find("pairs");
        if (pairs == j.end() || !pairs->is_array()) throw ValidationError(where + ": missing pairs array", line);
        for (const auto& p : *pairs) {
            ArgumentPair pair;
            pair.id = get_string(p, "id", line, where + " pair");
            pair.kind = parse_pair_kind(get_string(p, "kind", line, where + " pair " + pair.id));
            pair.left_id = get_string(p, "left", line, where + " pair " + pair.id);
            pair.right_id = get_string(p, "right", line, where + " pair " + pair.id);
            inst.pairs.push_back(std::move(pair));
        }
        validate(inst);
    } catch (const ValidationError& e) {
        if (e.line != 0 || line == 0) throw;
        throw ValidationError(e.what(), line);
    } catch (const json::exception& e) {
        throw ValidationError(where + ": " + e.what(), line);
    }
    return inst;
}

std::vector<TestInstance> parse_dataset(std::string_view jsonl) {
    std::vector<TestInstance> out;
    std::set<std::string> instance_ids, pair_ids, argument_ids;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("malformed JSON: ") + e.what(), lineno);
        }
        TestInstance inst = instance_from_json(j, lineno);
        if (!instance_ids.insert(inst.id).second) throw ValidationError("duplicate instance id " + inst.id, lineno);
        for (const auto& p : inst.pairs)
            if (!pair_ids.insert(p.id).second) throw ValidationError("duplicate pair id " + p.id, lineno);
        for (const auto& [role, arg] : inst.arguments)
            if (!argument_ids.insert(arg.id).second) throw ValidationError("duplicate argument id " + arg.id, lineno);
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<TestInstance> load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

std::string serialize_dataset(const std::vector<TestInstance>& instances) {
    std::string out;
    for (const auto& inst : instances) {
        out += to_json(inst).dump();
        out += '\n';
    }
    return out;
}

void save_dataset(const std::filesystem::path& path, const std::vector<TestInstance>& instances) {
    write_file(path, serialize_dataset(instances));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

}  // namespace emoconv
