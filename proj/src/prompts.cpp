#include "emoconv/prompts.hpp"

#include <sstream>

#include "emoconv/error.hpp"

namespace emoconv {

namespace {

struct Builtin {
    Language language;
    const char* name;
    const char* system;
    const char* user;
};

// The remove/add templates reproduce the rewriting prompts verbatim; the
// classifier prompts ask for the answer shapes the parsers in classify.cpp expect.
const Builtin kBuiltins[] = {
    {Language::en, prompt_names::kRemoveEmotion,
     R"(I will give you an argumentative text that **can** appeal to emotion.

Your task is to generate an argument with the same stance for the same topic **without emotional language**, by rephrasing the text but maintaining a similar style and length.

Briefly explain why the rewritten argument no longer evokes emotions.

Answer in the following way:
Generated argument:
Explanation:)",
     "Text: {original argument}"},
    {Language::en, prompt_names::kAddEmotion,
     R"(I will give you an argumentative text that **cannot** appeal to emotion.

Your task is to generate an argument with the same stance on the same topic **with emotions**, by rephrasing the text but maintaining a similar style and length.

Briefly explain why the rewritten argument can evoke emotions now.

Answer in the following way:
Generated argument:
Explanation:)",
     "Text: {original argument}"},
    {Language::en, prompt_names::kArgumentative,
     R"(You will be given a text from a debate. Identify whether it presents an argument. If it does, provide the major claim, the evidence, and the reasoning that connects the evidence to the major claim. Write "None" for any part the text does not contain.

Answer in the following way:
Major claim:
Evidence:
Reasoning:)",
     "Text: {text}"},
    {Language::en, prompt_names::kStance,
     R"(You will be given two argumentative texts. Rate the likelihood that the two texts address the same topic and share the same stance on a scale from 0 to 100, where 0 means they certainly do not and 100 means they certainly do.

Answer with a single integer between 0 and 100.)",
     "Text 1: {text_a}\n\nText 2: {text_b}"},
    {Language::en, prompt_names::kEmotional,
     R"(You will be given an argumentative text. Rate how likely it is that you can feel emotions in the text on a scale from 0 to 100, where 0 means you feel no emotions at all and 100 means you certainly feel emotions.

Answer with a single integer between 0 and 100.)",
     "Text: {text}"},

    {Language::de, prompt_names::kRemoveEmotion,
     R"(Ich gebe dir einen argumentativen Text, der an Emotionen appellieren **kann**.

Deine Aufgabe ist es, ein Argument mit demselben Standpunkt zum selben Thema **ohne emotionale Sprache** zu erstellen, indem du den Text umformulierst und dabei einen ähnlichen Stil und eine ähnliche Länge beibehältst.

Erkläre kurz, warum das umgeschriebene Argument keine Emotionen mehr hervorruft.

Antworte in folgender Form:
Generiertes Argument:
Erklärung:)",
     "Text: {original argument}"},
    {Language::de, prompt_names::kAddEmotion,
     R"(Ich gebe dir einen argumentativen Text, der **nicht** an Emotionen appellieren kann.

Deine Aufgabe ist es, ein Argument mit demselben Standpunkt zum selben Thema **mit Emotionen** zu erstellen, indem du den Text umformulierst und dabei einen ähnlichen Stil und eine ähnliche Länge beibehältst.

Erkläre kurz, warum das umgeschriebene Argument jetzt Emotionen hervorrufen kann.

Antworte in folgender Form:
Generiertes Argument:
Erklärung:)",
     "Text: {original argument}"},
    {Language::de, prompt_names::kArgumentative,
     R"(Du erhältst einen Text aus einer Debatte. Stelle fest, ob er ein Argument enthält. Falls ja, gib die Hauptaussage, die Belege und die Begründung an, die die Belege mit der Hauptaussage verbindet. Schreibe "Keine" für jeden Teil, den der Text nicht enthält.

Antworte in folgender Form:
Hauptaussage:
Belege:
Begründung:)",
     "Text: {text}"},
    {Language::de, prompt_names::kStance,
     R"(Du erhältst zwei argumentative Texte. Bewerte auf einer Skala von 0 bis 100, wie wahrscheinlich es ist, dass beide Texte dasselbe Thema behandeln und denselben Standpunkt vertreten. 0 bedeutet sicher nicht, 100 bedeutet sicher ja.

Antworte mit einer einzigen ganzen Zahl zwischen 0 und 100.)",
     "Text 1: {text_a}\n\nText 2: {text_b}"},
    {Language::de, prompt_names::kEmotional,
     R"(Du erhältst einen argumentativen Text. Bewerte auf einer Skala von 0 bis 100, wie wahrscheinlich es ist, dass du beim Lesen Emotionen empfindest. 0 bedeutet, dass du keinerlei Emotionen empfindest, 100 bedeutet, dass du sicher Emotionen empfindest.

Antworte mit einer einzigen ganzen Zahl zwischen 0 und 100.)",
     "Text: {text}"},
};

constexpr std::string_view kSystemMarker = "### system";
constexpr std::string_view kUserMarker = "### user";

}  // namespace

std::string fill_placeholders(std::string_view text, const std::map<std::string, std::string>& fields) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            const auto close = text.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = fields.find(std::string(text.substr(i + 1, close - i - 1)));
                if (it != fields.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += text[i++];
    }
    return out;
}

RenderedPrompt PromptTemplate::render(const std::map<std::string, std::string>& fields) const {
    return {fill_placeholders(system, fields), fill_placeholders(user, fields)};
}

PromptTemplate PromptTemplate::parse(std::string_view content) {
    PromptTemplate t;
    std::string* target = nullptr;
    bool saw_user = false;
    std::istringstream in{std::string(content)};
    std::string line;
    std::string system, user;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line) == kSystemMarker) {
            target = &system;
            continue;
        }
        if (trim(line) == kUserMarker) {
            target = &user;
            saw_user = true;
            continue;
        }
        if (target) {
            *target += line;
            *target += '\n';
        }
    }
    if (!saw_user) throw ConfigError("prompt template without a '### user' section");
    t.system = trim(system);
    t.user = trim(user);
    return t;
}

std::string PromptTemplate::serialize() const {
    return std::string(kSystemMarker) + "\n" + system + "\n" + std::string(kUserMarker) + "\n" + user + "\n";
}

PromptSet::PromptSet() {
    for (const auto& b : kBuiltins) templates_[{b.language, b.name}] = PromptTemplate{b.system, b.user};
}

PromptSet PromptSet::with_overrides(const std::filesystem::path& dir) {
    PromptSet set;
    set.override_from(dir);
    return set;
}

void PromptSet::override_from(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("prompt directory " + dir.string() + " not found");
    for (auto& [key, tmpl] : templates_) {
        const auto file = dir / to_string(key.first) / (key.second + ".txt");
        if (std::filesystem::exists(file)) tmpl = PromptTemplate::parse(read_file(file));
    }
}

const PromptTemplate& PromptSet::get(Language language, const std::string& name) const {
    auto it = templates_.find({language, name});
    if (it == templates_.end()) throw ConfigError("no prompt template '" + name + "' for " + to_string(language));
    return it->second;
}

void PromptSet::set(Language language, const std::string& name, PromptTemplate t) {
    templates_[{language, name}] = std::move(t);
}

void PromptSet::export_to(const std::filesystem::path& dir) const {
    for (const auto& [key, tmpl] : templates_) {
        const auto sub = dir / to_string(key.first);
        std::filesystem::create_directories(sub);
        write_file(sub / (key.second + ".txt"), tmpl.serialize());
    }
}

std::vector<std::pair<Language, std::string>> PromptSet::keys() const {
    std::vector<std::pair<Language, std::string>> out;
    for (const auto& [key, t] : templates_) out.push_back(key);
    return out;
}

}  // namespace emoconv
