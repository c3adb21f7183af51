#pragma once

// Argument data model, transcript segmentation, keyword filtering and the
// JSON-lines instance format.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace emoconv {

enum class Language { en, de };
// E: emotion-evoking source, N: non-emotional source,
// Gminus: E rewritten with less emotion, Gplus: N rewritten with more.
enum class Role { E, N, Gminus, Gplus };
enum class Origin { source, generated };
enum class PairKind { Anchor, ReducedLeft, IncreasedRight, BothShifted };

inline constexpr std::array<Role, 4> kAllRoles = {Role::E, Role::N, Role::Gminus, Role::Gplus};
inline constexpr std::array<PairKind, 4> kAllPairKinds = {PairKind::Anchor, PairKind::ReducedLeft,
                                                          PairKind::IncreasedRight, PairKind::BothShifted};
// The three counterpart pairs, in reporting order.
inline constexpr std::array<PairKind, 3> kCounterpartKinds = {PairKind::ReducedLeft, PairKind::IncreasedRight,
                                                              PairKind::BothShifted};

std::string to_string(Language l);
std::string to_string(Role r);
std::string to_string(Origin o);
std::string to_string(PairKind k);
Language parse_language(std::string_view s);
Role parse_role(std::string_view s);
Origin parse_origin(std::string_view s);
PairKind parse_pair_kind(std::string_view s);

// The (left, right) roles a pair of the given kind must hold.
std::pair<Role, Role> roles_of(PairKind kind);
// Short stable suffix used when deriving pair ids ("anchor", "reduced_left", ...).
std::string pair_suffix(PairKind kind);

struct Argument {
    std::string id;
    std::string text;
    Language language = Language::en;
    Role role = Role::E;
    Origin origin = Origin::source;
    std::map<std::string, std::string> meta;

    bool operator==(const Argument&) const = default;
};

struct Topic {
    std::string id;
    std::string description;

    bool operator==(const Topic&) const = default;
};

struct ArgumentPair {
    std::string id;
    std::string left_id;
    std::string right_id;
    PairKind kind = PairKind::Anchor;

    bool operator==(const ArgumentPair&) const = default;
};

struct TestInstance {
    std::string id;
    Topic topic;
    std::string dataset;
    Language language = Language::en;
    std::map<Role, Argument> arguments;
    std::vector<ArgumentPair> pairs;

    const Argument& argument(Role role) const;
    const ArgumentPair& pair(PairKind kind) const;
    const Argument& left_of(const ArgumentPair& p) const;
    const Argument& right_of(const ArgumentPair& p) const;

    bool operator==(const TestInstance&) const = default;
};

// Throws ValidationError naming the first violated invariant.
void validate(const Argument& arg);
void validate(const TestInstance& inst);

// Canonical pairs for an instance whose four arguments are already set:
// Anchor, ReducedLeft, IncreasedRight, BothShifted, ids "<instance>/<suffix>".
std::vector<ArgumentPair> canonical_pairs(const std::string& instance_id,
                                          const std::map<Role, Argument>& arguments);

// ---------------------------------------------------------------------------
// Text processing

// Whitespace split; leading and trailing punctuation characters become their
// own tokens. Inner punctuation ("don't", "zwei-staaten") stays attached.
std::vector<std::string> tokenize(std::string_view text);

struct Paragraph {
    std::string text;
    std::size_t token_count = 0;
    std::size_t source_position = 0;  // index of the first input paragraph merged into it

    bool operator==(const Paragraph&) const = default;
};

struct SegmentConfig {
    std::size_t min_tokens = 60;        // accumulator shorter than this keeps absorbing
    std::size_t short_next_tokens = 20; // next paragraph shorter than this is absorbed
    std::string open_brackets = "(";    // next paragraph starting with one of these is absorbed
};

// Paragraphs separated by blank lines, trimmed, empty ones dropped.
std::vector<std::string> split_paragraphs(std::string_view raw);

std::vector<Paragraph> segment_speech(std::string_view raw, const SegmentConfig& config = {});

struct Document {
    std::string id;
    std::string title;
    std::string intro;
    std::string body;
};

enum class KeywordField { title, intro };

// Case-insensitive substring match on the selected field. Lowercasing covers
// ASCII and the Latin-1 block of UTF-8 (so "Ü" matches "ü").
std::vector<Document> filter_by_keywords(const std::vector<Document>& documents,
                                         const std::vector<std::string>& keywords, KeywordField field);

std::string utf8_lower(std::string_view s);

// One keyword per line, '#' starts a comment, blank lines ignored.
std::vector<std::string> parse_keywords(std::string_view content);
std::vector<std::string> load_keywords(const std::filesystem::path& path);
const std::vector<std::string>& default_keywords(Language language);

// ---------------------------------------------------------------------------
// Instance file (JSON-lines)

nlohmann::json to_json(const Argument& arg);
nlohmann::json to_json(const TestInstance& inst);
// Parses and validates one instance object. `line` is used in error messages.
TestInstance instance_from_json(const nlohmann::json& j, std::size_t line = 0);

std::vector<TestInstance> parse_dataset(std::string_view jsonl);
std::vector<TestInstance> load_dataset(const std::filesystem::path& path);
std::string serialize_dataset(const std::vector<TestInstance>& instances);
void save_dataset(const std::filesystem::path& path, const std::vector<TestInstance>& instances);

// Small shared helpers.
std::string trim(std::string_view s);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace emoconv
