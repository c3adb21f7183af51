#pragma once

// Annotation batches: instances grouped per dataset, their pairs shuffled
// together with injected attention-check items.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "emoconv/corpus.hpp"
#include "emoconv/judgments.hpp"
#include "json.hpp"

namespace emoconv {

struct BatchItem {
    std::string pair_id;      // instance pair id, or "<batch>/check-<k>"
    std::string instance_id;  // empty for attention checks
    bool is_attention = false;
    // Attention checks only: what the annotator sees and the expected CONV answer.
    std::string topic;
    std::string left_text;
    std::string right_text;
    std::optional<Ranking> expected;

    bool operator==(const BatchItem&) const = default;
};

struct Batch {
    std::string id;
    std::string dataset;
    std::vector<std::string> instance_ids;
    std::vector<std::string> attention_ids;
    std::size_t required_submissions = 5;
    std::vector<BatchItem> items;  // presentation order

    bool operator==(const Batch&) const = default;
};

struct BatchOptions {
    std::size_t per_batch = 5;
    std::size_t checks = 3;
    std::size_t required_submissions = 5;
    std::uint64_t seed = 0;
};

// Uniform integer in [0, n) by rejection sampling, so results do not depend
// on the standard library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

template <typename T>
void shuffle_in_place(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

// The instruction sentence embedded in an attention item and the answer it asks for.
struct AttentionVariant {
    std::string instruction;
    Ranking expected;
};
const std::vector<AttentionVariant>& attention_variants();

// Throws PreconditionError when per_batch or checks is zero or there are no instances.
std::vector<Batch> make_batches(const std::vector<TestInstance>& instances, const BatchOptions& options);

// Throws ValidationError on missing fields, duplicate batch ids, or a pair id
// served in more than one batch.
void validate(const std::vector<Batch>& batches);

nlohmann::json to_json(const Batch& b);
Batch batch_from_json(const nlohmann::json& j);
std::string serialize_batches(const std::vector<Batch>& batches);
std::vector<Batch> parse_batches(std::string_view content);
std::vector<Batch> load_batches(const std::filesystem::path& path);

}  // namespace emoconv
