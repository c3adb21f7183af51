#pragma once

// Rewrites source arguments into reduced-emotion (Gminus) and increased-emotion
// (Gplus) counterparts, verifying each candidate with the emotion classifier.

#include <optional>
#include <string>
#include <vector>

#include "emoconv/classify.hpp"
#include "emoconv/corpus.hpp"
#include "emoconv/llm_gateway.hpp"
#include "emoconv/prompts.hpp"
#include "json.hpp"

namespace emoconv {

enum class Direction { remove, add };
std::string to_string(Direction d);

struct Candidate {
    std::string text;
    std::string explanation;
    std::optional<ClassifierVerdict> verdict;  // absent when the response could not be parsed
    std::optional<std::string> parse_error;
};

struct GenerationRecord {
    std::string source_argument;
    Direction direction = Direction::remove;
    int rounds_used = 0;
    bool accepted = false;
    std::vector<Candidate> candidates;
};

nlohmann::json to_json(const GenerationRecord& r);

struct GeneratedSections {
    std::string argument;
    std::string explanation;
};

// Reads the "Generated argument:" and "Explanation:" sections (German markers
// "Generiertes Argument:" / "Erklärung:" accepted). Throws ParseError when the
// argument section is missing or empty.
GeneratedSections parse_generation(std::string_view response);

struct GenerationOptions {
    std::string model;
    SamplingConfig sampling;  // temperature 0.6, top_p 0.9, max_rounds 5
    std::optional<int> emotion_threshold;  // default per language
};

struct GeneratedArgument {
    Argument argument;
    GenerationRecord record;
};

class CounterpartGenerator {
public:
    CounterpartGenerator(const Gateway& gateway, const PromptSet& prompts, const Classifier& verifier,
                         GenerationOptions options);

    // remove requires role E and yields Gminus; add requires role N and yields Gplus.
    GeneratedArgument generate(const Argument& source, Direction direction) const;

    // Generates Gminus then Gplus and assembles the four canonical pairs.
    // Rejected generations keep their last candidate and are flagged in meta
    // ("accepted" = "false"). The record log receives both records in order.
    TestInstance build_instance(const Argument& e, const Argument& n, const Topic& topic, const std::string& dataset,
                                const std::string& instance_id, std::vector<GenerationRecord>* records = nullptr) const;

private:
    const Gateway& gateway_;
    const PromptSet& prompts_;
    const Classifier& verifier_;
    GenerationOptions options_;
};

}  // namespace emoconv
