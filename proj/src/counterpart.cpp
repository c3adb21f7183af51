#include "emoconv/counterpart.hpp"

#include <iostream>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

namespace {

std::size_t find_marker(const std::string& lowered, std::initializer_list<std::string_view> markers,
                        std::size_t& marker_len) {
    std::size_t best = std::string::npos;
    for (auto m : markers) {
        const auto pos = lowered.find(m);
        if (pos < best) {
            best = pos;
            marker_len = m.size();
        }
    }
    return best;
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::remove ? "remove" : "add"; }

json to_json(const GenerationRecord& r) {
    json cands = json::array();
    for (const auto& c : r.candidates) {
        json jc = {{"text", c.text}, {"explanation", c.explanation}};
        jc["verdict"] = c.verdict ? to_json(*c.verdict) : json(nullptr);
        if (c.parse_error) jc["parse_error"] = *c.parse_error;
        cands.push_back(std::move(jc));
    }
    return {{"source_argument", r.source_argument},
            {"direction", to_string(r.direction)},
            {"rounds_used", r.rounds_used},
            {"accepted", r.accepted},
            {"candidates", cands}};
}

GeneratedSections parse_generation(std::string_view response) {
    const std::string lowered = utf8_lower(response);
    std::size_t arg_len = 0, exp_len = 0;
    const auto arg_pos = find_marker(lowered, {"generated argument:", "generiertes argument:"}, arg_len);
    if (arg_pos == std::string::npos) throw ParseError("response has no 'Generated argument:' section");
    const auto exp_pos = find_marker(lowered, {"explanation:", "erklärung:"}, exp_len);

    GeneratedSections out;
    const std::size_t arg_begin = arg_pos + arg_len;
    if (exp_pos != std::string::npos && exp_pos > arg_pos) {
        out.argument = trim(response.substr(arg_begin, exp_pos - arg_begin));
        out.explanation = trim(response.substr(exp_pos + exp_len));
    } else {
        out.argument = trim(response.substr(arg_begin));
    }
    if (out.argument.empty()) throw ParseError("'Generated argument:' section is empty");
    return out;
}

CounterpartGenerator::CounterpartGenerator(const Gateway& gateway, const PromptSet& prompts,
                                           const Classifier& verifier, GenerationOptions options)
    : gateway_(gateway), prompts_(prompts), verifier_(verifier), options_(std::move(options)) {
    options_.sampling.validate();
}

GeneratedArgument CounterpartGenerator::generate(const Argument& source, Direction direction) const {
    if (direction == Direction::remove && source.role != Role::E)
        throw PreconditionError("removing emotion requires an E-role argument, got " + to_string(source.role));
    if (direction == Direction::add && source.role != Role::N)
        throw PreconditionError("adding emotion requires an N-role argument, got " + to_string(source.role));

    const auto& tmpl = prompts_.get(source.language, direction == Direction::remove ? prompt_names::kRemoveEmotion
                                                                                    : prompt_names::kAddEmotion);
    const RenderedPrompt prompt = tmpl.render({{"original argument", source.text}});
    const bool want_emotional = direction == Direction::add;
    const int threshold = options_.emotion_threshold.value_or(default_emotion_threshold(source.language));

    GenerationRecord record;
    record.source_argument = source.id;
    record.direction = direction;

    for (int round = 1; round <= options_.sampling.max_rounds; ++round) {
        LlmRequest req;
        req.model = options_.model;
        req.system_prompt = prompt.system;
        req.user_prompt = prompt.user;
        req.sampling = options_.sampling;
        req.tag = "generate/" + to_string(direction) + "/" + std::to_string(round);

        Candidate cand;
        const std::string raw = gateway_.complete(req).text;
        try {
            auto sections = parse_generation(raw);
            cand.text = std::move(sections.argument);
            cand.explanation = std::move(sections.explanation);
        } catch (const ParseError& e) {
            cand.parse_error = e.what();
        }
        if (!cand.parse_error) {
            ClassifierVerdict v = verifier_.rate_emotionality(cand.text, source.language, threshold);
            const bool ok = !v.error && v.label == want_emotional;
            cand.verdict = std::move(v);
            record.candidates.push_back(std::move(cand));
            if (ok) {
                record.accepted = true;
                break;
            }
        } else {
            record.candidates.push_back(std::move(cand));
        }
    }
    record.rounds_used = static_cast<int>(record.candidates.size());

    // The returned argument is the last candidate that produced any text.
    const Candidate* last_text = nullptr;
    for (const auto& c : record.candidates)
        if (!c.text.empty()) last_text = &c;
    if (last_text == nullptr)
        throw ParseError("no parseable counterpart for " + source.id + " after " + std::to_string(record.rounds_used) +
                         " rounds");

    if (!record.accepted)
        std::cerr << "warning: counterpart of " << source.id << " (" << to_string(direction)
                  << ") not verified after " << record.rounds_used << " rounds; keeping last candidate\n";

    Argument out;
    out.role = direction == Direction::remove ? Role::Gminus : Role::Gplus;
    out.id = source.id + (direction == Direction::remove ? "-gminus" : "-gplus");
    out.text = last_text->text;
    out.language = source.language;
    out.origin = Origin::generated;
    out.meta = {{"source_argument", source.id},
                {"accepted", record.accepted ? "true" : "false"},
                {"rounds_used", std::to_string(record.rounds_used)}};
    return {std::move(out), std::move(record)};
}

TestInstance CounterpartGenerator::build_instance(const Argument& e, const Argument& n, const Topic& topic,
                                                  const std::string& dataset, const std::string& instance_id,
                                                  std::vector<GenerationRecord>* records) const {
    if (e.role != Role::E) throw PreconditionError("build_instance: first argument must have role E");
    if (n.role != Role::N) throw PreconditionError("build_instance: second argument must have role N");
    if (e.language != n.language) throw PreconditionError("build_instance: E and N differ in language");

    auto gminus = generate(e, Direction::remove);
    auto gplus = generate(n, Direction::add);

    TestInstance inst;
    inst.id = instance_id;
    inst.topic = topic;
    inst.dataset = dataset;
    inst.language = e.language;
    inst.arguments[Role::E] = e;
    inst.arguments[Role::N] = n;
    inst.arguments[Role::Gminus] = gminus.argument;
    inst.arguments[Role::Gplus] = gplus.argument;
    inst.pairs = canonical_pairs(instance_id, inst.arguments);
    validate(inst);

    if (records) {
        records->push_back(std::move(gminus.record));
        records->push_back(std::move(gplus.record));
    }
    return inst;
}

}  // namespace emoconv
