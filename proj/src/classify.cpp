#include "emoconv/classify.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

namespace {

constexpr const char* kRatingReminder = "\n\nPlease answer with a single integer between 0 and 100.";
constexpr const char* kExtractionReminder =
    "\n\nPlease answer exactly in the requested format with the lines \"Major claim:\", \"Evidence:\" and \"Reasoning:\".";

bool is_placeholder(std::string value) {
    value = utf8_lower(trim(value));
    while (!value.empty() && (value.back() == '.' || value.back() == '!')) value.pop_back();
    static const std::set<std::string> none = {"", "none", "n/a", "na", "-", "no", "keine", "kein", "nicht vorhanden"};
    return none.count(value) > 0 || value.rfind("no claim", 0) == 0 || value.rfind("none ", 0) == 0;
}

struct Marker {
    const char* text;
    int section;  // 0 claim, 1 evidence, 2 reasoning
};

constexpr Marker kMarkers[] = {{"major claim:", 0}, {"hauptaussage:", 0}, {"evidence:", 1},
                               {"belege:", 1},      {"reasoning:", 2},    {"begründung:", 2}};

}  // namespace

std::string to_string(ClassifierTask t) {
    switch (t) {
        case ClassifierTask::argumentative: return "argumentative";
        case ClassifierTask::stance_same: return "stance_same";
        case ClassifierTask::emotional: return "emotional";
    }
    return "?";
}

json to_json(const ClassifierVerdict& v) {
    json j = {{"task", to_string(v.task)}, {"label", v.label}};
    j["rating"] = v.rating ? json(*v.rating) : json(nullptr);
    j["threshold"] = v.threshold ? json(*v.threshold) : json(nullptr);
    if (v.rationale) j["rationale"] = *v.rationale;
    if (v.error) j["error"] = *v.error;
    return j;
}

int default_emotion_threshold(Language language) { return language == Language::en ? 75 : 85; }

std::optional<int> parse_rating(std::string_view response) {
    std::size_t i = 0;
    while (i < response.size()) {
        if (!std::isdigit(static_cast<unsigned char>(response[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) ++j;
        const auto digits = response.substr(i, j - i);
        if (digits.size() <= 3) {
            const int value = std::stoi(std::string(digits));
            if (value <= 100) return value;
        }
        i = j;
    }
    return std::nullopt;
}

bool ArgumentExtraction::complete() const {
    return !is_placeholder(major_claim) && !is_placeholder(evidence) && !is_placeholder(reasoning);
}

ArgumentExtraction parse_extraction(std::string_view response) {
    const std::string lowered = utf8_lower(response);
    struct Hit {
        std::size_t pos;
        std::size_t len;
        int section;
    };
    std::vector<Hit> hits;
    for (const auto& m : kMarkers) {
        const std::string_view marker = m.text;
        for (auto pos = lowered.find(marker); pos != std::string::npos; pos = lowered.find(marker, pos + 1))
            hits.push_back({pos, marker.size(), m.section});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.pos < b.pos; });

    ArgumentExtraction out;
    out.found_markers = !hits.empty();
    bool filled[3] = {false, false, false};
    for (std::size_t k = 0; k < hits.size(); ++k) {
        const std::size_t begin = hits[k].pos + hits[k].len;
        const std::size_t end = k + 1 < hits.size() ? hits[k + 1].pos : response.size();
        if (filled[hits[k].section]) continue;  // first occurrence wins
        filled[hits[k].section] = true;
        std::string value = trim(response.substr(begin, end - begin));
        switch (hits[k].section) {
            case 0: out.major_claim = std::move(value); break;
            case 1: out.evidence = std::move(value); break;
            default: out.reasoning = std::move(value); break;
        }
    }
    return out;
}

Classifier::Classifier(const Gateway& gateway, const PromptSet& prompts, std::string model, SamplingConfig sampling)
    : gateway_(gateway), prompts_(prompts), model_(std::move(model)), sampling_(sampling) {
    sampling_.validate();
}

std::string Classifier::ask(const RenderedPrompt& prompt, const std::string& tag) const {
    LlmRequest req;
    req.model = model_;
    req.system_prompt = prompt.system;
    req.user_prompt = prompt.user;
    req.sampling = sampling_;
    req.tag = tag;
    return gateway_.complete(req).text;
}

ClassifierVerdict Classifier::classify_argumentative(std::string_view text, Language language) const {
    if (trim(text).empty()) throw PreconditionError("classify_argumentative: empty text");
    const auto prompt =
        prompts_.get(language, prompt_names::kArgumentative).render({{"text", std::string(text)}});

    ClassifierVerdict v;
    v.task = ClassifierTask::argumentative;
    std::string raw = ask(prompt, "argumentative");
    ArgumentExtraction ex = parse_extraction(raw);
    if (!ex.found_markers) {
        raw = ask({prompt.system, prompt.user + kExtractionReminder}, "argumentative/reask");
        ex = parse_extraction(raw);
    }
    v.rationale = raw;
    if (!ex.found_markers) {
        v.error = "response contains no claim/evidence/reasoning sections";
        v.label = false;
        return v;
    }
    v.label = ex.complete();
    return v;
}

ClassifierVerdict Classifier::rate(ClassifierTask task, const RenderedPrompt& prompt, int threshold) const {
    if (threshold < 0 || threshold > 100) throw PreconditionError("threshold must be within 0-100");
    ClassifierVerdict v;
    v.task = task;
    v.threshold = threshold;
    std::string raw = ask(prompt, to_string(task));
    auto rating = parse_rating(raw);
    if (!rating) {
        raw = ask({prompt.system, prompt.user + kRatingReminder}, to_string(task) + "/reask");
        rating = parse_rating(raw);
    }
    v.rationale = raw;
    if (!rating) {
        v.error = "response contains no integer rating in 0-100";
        v.label = false;
        return v;
    }
    v.rating = *rating;
    v.label = rating_label(*rating, threshold);
    return v;
}

ClassifierVerdict Classifier::rate_stance_agreement(const Argument& a, const Argument& b, int threshold) const {
    if (a.language != b.language) throw PreconditionError("rate_stance_agreement: arguments differ in language");
    const auto prompt = prompts_.get(a.language, prompt_names::kStance).render({{"text_a", a.text}, {"text_b", b.text}});
    return rate(ClassifierTask::stance_same, prompt, threshold);
}

ClassifierVerdict Classifier::rate_emotionality(std::string_view text, Language language,
                                                std::optional<int> threshold) const {
    if (trim(text).empty()) throw PreconditionError("rate_emotionality: empty text");
    const auto prompt = prompts_.get(language, prompt_names::kEmotional).render({{"text", std::string(text)}});
    return rate(ClassifierTask::emotional, prompt, threshold.value_or(default_emotion_threshold(language)));
}

// ---------------------------------------------------------------------------
// Calibration

json to_json(const CalibrationResult& r) {
    json sweep = json::array();
    for (const auto& row : r.sweep)
        sweep.push_back({{"threshold", row.threshold}, {"precision", row.precision}, {"macro_f1", row.macro_f1}});
    return {{"threshold", r.threshold},
            {"precision_target_class", r.precision_target_class},
            {"macro_f1", r.macro_f1},
            {"sweep", sweep}};
}

BinaryMetrics binary_metrics(std::span<const int> ratings, const std::vector<bool>& gold, int threshold) {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < ratings.size(); ++i) {
        const bool pred = rating_label(ratings[i], threshold);
        if (pred && gold[i]) ++tp;
        else if (pred) ++fp;
        else if (gold[i]) ++fn;
        else ++tn;
    }
    const auto f1 = [](std::int64_t t, std::int64_t wrong) {
        return 2 * t + wrong == 0 ? Fraction(0, 1) : Fraction(2 * t, 2 * t + wrong);
    };
    BinaryMetrics m;
    m.precision = tp + fp == 0 ? Fraction(0, 1) : Fraction(tp, tp + fp);
    m.macro_f1 = (f1(tp, fp + fn) + f1(tn, fp + fn)) / 2;
    return m;
}

std::vector<int> threshold_grid(int step) {
    if (step < 1 || step > 100) throw PreconditionError("sweep step must be within 1-100");
    std::vector<int> grid;
    for (int t = 0; t <= 100; t += step) grid.push_back(t);
    if (grid.back() != 100) grid.push_back(100);
    return grid;
}

CalibrationResult calibrate_threshold(std::span<const int> ratings, const std::vector<bool>& gold,
                                      CalibrationCriterion criterion, int step) {
    if (ratings.size() != gold.size()) throw PreconditionError("ratings and gold differ in length");
    if (ratings.size() < 2) throw PreconditionError("calibration needs at least two items");
    const auto positives = std::count(gold.begin(), gold.end(), true);
    if (positives == 0 || positives == static_cast<long>(gold.size()))
        throw PreconditionError("gold labels contain a single class; metrics are undefined");

    CalibrationResult result;
    std::optional<std::pair<int, BinaryMetrics>> best;
    for (int t : threshold_grid(step)) {
        const BinaryMetrics m = binary_metrics(ratings, gold, t);
        result.sweep.push_back({t, m.precision.value(), m.macro_f1.value()});
        if (criterion.kind == CalibrationCriterion::Kind::max_macro_f1) {
            if (!best || m.macro_f1 > best->second.macro_f1) best = {t, m};
        } else if (!best && m.precision.value() >= criterion.min_precision) {
            best = {t, m};
        }
    }
    if (!best) throw Error("no threshold reaches precision " + std::to_string(criterion.min_precision));
    result.threshold = best->first;
    result.precision_target_class = best->second.precision.value();
    result.macro_f1 = best->second.macro_f1.value();
    return result;
}

GroupedCalibration calibrate_grouped(std::span<const int> ratings, const std::vector<bool>& gold,
                                     const std::vector<std::string>& groups, std::size_t train_groups,
                                     CalibrationCriterion criterion, int step) {
    if (ratings.size() != gold.size() || groups.size() != gold.size())
        throw PreconditionError("ratings, gold and groups differ in length");
    const std::vector<std::string> names = [&] {
        std::set<std::string> s(groups.begin(), groups.end());
        return std::vector<std::string>(s.begin(), s.end());
    }();
    if (train_groups < 1 || train_groups >= names.size())
        throw PreconditionError("train group count must leave at least one test group");

    const auto has_both = [](const std::vector<bool>& g) {
        const auto p = std::count(g.begin(), g.end(), true);
        return p > 0 && p < static_cast<long>(g.size());
    };

    GroupedCalibration out;
    std::vector<bool> mask(names.size(), false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(train_groups), true);
    do {
        std::set<std::string> train;
        for (std::size_t g = 0; g < names.size(); ++g)
            if (mask[g]) train.insert(names[g]);
        std::vector<int> tr_r, te_r;
        std::vector<bool> tr_g, te_g;
        for (std::size_t i = 0; i < ratings.size(); ++i) {
            if (train.count(groups[i])) {
                tr_r.push_back(ratings[i]);
                tr_g.push_back(gold[i]);
            } else {
                te_r.push_back(ratings[i]);
                te_g.push_back(gold[i]);
            }
        }
        if (!has_both(tr_g) || !has_both(te_g)) continue;
        CalibrationResult cal;
        try {
            cal = calibrate_threshold(tr_r, tr_g, criterion, step);
        } catch (const Error&) {
            continue;
        }
        const BinaryMetrics test = binary_metrics(te_r, te_g, cal.threshold);
        out.splits.push_back({std::vector<std::string>(train.begin(), train.end()), cal.threshold,
                              test.precision.value(), test.macro_f1.value()});
    } while (std::prev_permutation(mask.begin(), mask.end()));

    if (out.splits.empty()) throw Error("no grouped split has both classes on both sides");
    for (const auto& s : out.splits) {
        out.mean_test_precision += s.test_precision;
        out.mean_test_macro_f1 += s.test_macro_f1;
    }
    out.mean_test_precision /= static_cast<double>(out.splits.size());
    out.mean_test_macro_f1 /= static_cast<double>(out.splits.size());
    return out;
}

}  // namespace emoconv
