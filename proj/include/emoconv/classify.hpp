#pragma once

// LLM-backed classifiers used to select candidate arguments, and threshold
// calibration of their 0-100 ratings against gold labels.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emoconv/corpus.hpp"
#include "emoconv/fraction.hpp"
#include "emoconv/llm_gateway.hpp"
#include "emoconv/prompts.hpp"
#include "json.hpp"

namespace emoconv {

enum class ClassifierTask { argumentative, stance_same, emotional };
std::string to_string(ClassifierTask t);

struct ClassifierVerdict {
    ClassifierTask task = ClassifierTask::argumentative;
    std::optional<int> rating;     // 0-100 for rated tasks
    std::optional<int> threshold;  // 0-100 for rated tasks
    bool label = false;
    std::optional<std::string> rationale;
    std::optional<std::string> error;  // set when the response could not be parsed
};

nlohmann::json to_json(const ClassifierVerdict& v);

inline constexpr int kDefaultStanceThreshold = 90;
int default_emotion_threshold(Language language);

// First integer token in [0, 100]; out-of-range numbers are skipped.
std::optional<int> parse_rating(std::string_view response);

// Label rule shared by every rated task.
constexpr bool rating_label(int rating, int threshold) { return rating >= threshold; }

struct ArgumentExtraction {
    std::string major_claim;
    std::string evidence;
    std::string reasoning;
    bool found_markers = false;  // at least one section marker present

    // All three parts present and not a "none"-style placeholder.
    bool complete() const;
};

ArgumentExtraction parse_extraction(std::string_view response);

class Classifier {
public:
    Classifier(const Gateway& gateway, const PromptSet& prompts, std::string model, SamplingConfig sampling = {});

    ClassifierVerdict classify_argumentative(std::string_view text, Language language) const;
    ClassifierVerdict rate_stance_agreement(const Argument& a, const Argument& b,
                                            int threshold = kDefaultStanceThreshold) const;
    ClassifierVerdict rate_emotionality(std::string_view text, Language language, std::optional<int> threshold = {}) const;

    const std::string& model() const { return model_; }

private:
    ClassifierVerdict rate(ClassifierTask task, const RenderedPrompt& prompt, int threshold) const;
    std::string ask(const RenderedPrompt& prompt, const std::string& tag) const;

    const Gateway& gateway_;
    const PromptSet& prompts_;
    std::string model_;
    SamplingConfig sampling_;
};

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationCriterion {
    enum class Kind { max_macro_f1, min_threshold_with_precision };
    Kind kind = Kind::max_macro_f1;
    double min_precision = 0.0;

    static CalibrationCriterion max_macro_f1() { return {}; }
    static CalibrationCriterion precision_at_least(double p) { return {Kind::min_threshold_with_precision, p}; }
};

struct SweepRow {
    int threshold = 0;
    double precision = 0.0;  // positive class; 0 when nothing is predicted positive
    double macro_f1 = 0.0;
};

struct CalibrationResult {
    int threshold = 0;
    double precision_target_class = 0.0;
    double macro_f1 = 0.0;
    std::vector<SweepRow> sweep;
};

nlohmann::json to_json(const CalibrationResult& r);

// Exact binary metrics of the rule "rating >= threshold".
struct BinaryMetrics {
    Fraction precision;
    Fraction macro_f1;
};
BinaryMetrics binary_metrics(std::span<const int> ratings, const std::vector<bool>& gold, int threshold);

// 0, step, 2*step, ... and always 100.
std::vector<int> threshold_grid(int step);

// Ties are broken toward the lower threshold. Throws PreconditionError on
// length mismatch, fewer than two items or single-class gold, and Error when
// no threshold meets a precision criterion.
CalibrationResult calibrate_threshold(std::span<const int> ratings, const std::vector<bool>& gold,
                                      CalibrationCriterion criterion = {}, int step = 5);

// Grouped cross-validation: every combination of `train_groups` groups is used
// for calibration and the remaining groups for testing.
struct GroupedSplit {
    std::vector<std::string> train_groups;
    int threshold = 0;
    double test_precision = 0.0;
    double test_macro_f1 = 0.0;
};

struct GroupedCalibration {
    std::vector<GroupedSplit> splits;  // splits lacking a class on either side are skipped
    double mean_test_precision = 0.0;
    double mean_test_macro_f1 = 0.0;
};

GroupedCalibration calibrate_grouped(std::span<const int> ratings, const std::vector<bool>& gold,
                                     const std::vector<std::string>& groups, std::size_t train_groups,
                                     CalibrationCriterion criterion = {}, int step = 5);

}  // namespace emoconv
