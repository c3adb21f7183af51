#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emoconv/corpus.hpp"

namespace emoconv {

struct RenderedPrompt {
    std::string system;
    std::string user;
};

// A system/user prompt pair with named `{placeholder}` fields. Braces whose
// content is not a supplied field are left untouched.
struct PromptTemplate {
    std::string system;
    std::string user;

    RenderedPrompt render(const std::map<std::string, std::string>& fields) const;

    // File format: a "### system" line followed by the system text, then a
    // "### user" line followed by the user text.
    static PromptTemplate parse(std::string_view content);
    std::string serialize() const;
};

std::string fill_placeholders(std::string_view text, const std::map<std::string, std::string>& fields);

// Template names used across the pipeline.
namespace prompt_names {
inline constexpr const char* kArgumentative = "argumentative";
inline constexpr const char* kStance = "stance";
inline constexpr const char* kEmotional = "emotional";
inline constexpr const char* kRemoveEmotion = "remove_emotion";
inline constexpr const char* kAddEmotion = "add_emotion";
}  // namespace prompt_names

// Per-language template collection. Starts with the built-in templates;
// `override_from` replaces any template that exists as <dir>/<lang>/<name>.txt.
class PromptSet {
public:
    PromptSet();
    static PromptSet with_overrides(const std::filesystem::path& dir);

    void override_from(const std::filesystem::path& dir);
    const PromptTemplate& get(Language language, const std::string& name) const;
    void set(Language language, const std::string& name, PromptTemplate t);

    // Writes every template to <dir>/<lang>/<name>.txt.
    void export_to(const std::filesystem::path& dir) const;
    std::vector<std::pair<Language, std::string>> keys() const;

private:
    std::map<std::pair<Language, std::string>, PromptTemplate> templates_;
};

}  // namespace emoconv
