#include "emoconv/batches.hpp"

#include <cstdio>
#include <map>
#include <set>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw PreconditionError("uniform_below(0)");
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    for (;;) {
        const std::uint64_t x = rng();
        if (x < limit) return x % n;
    }
}

const std::vector<AttentionVariant>& attention_variants() {
    static const std::vector<AttentionVariant> variants = {
        {"Attention check: for the convincingness question, select the argument whose number equals three minus two.",
         Ranking::LeftMore},
        {"Attention check: for the convincingness question, select the argument whose number equals one plus one.",
         Ranking::RightMore},
        {"Attention check: for the convincingness question, select the option whose number equals two minus two.",
         Ranking::Equal},
    };
    return variants;
}

std::vector<Batch> make_batches(const std::vector<TestInstance>& instances, const BatchOptions& options) {
    if (instances.empty()) throw PreconditionError("no instances to batch");
    if (options.per_batch == 0) throw PreconditionError("per-batch instance count must be positive");
    if (options.checks == 0) throw PreconditionError("attention check count must be positive");
    if (options.required_submissions == 0) throw PreconditionError("required submissions must be positive");

    std::mt19937_64 rng(options.seed);
    std::map<std::string, std::vector<const TestInstance*>> by_dataset;
    for (const auto& inst : instances) by_dataset[inst.dataset].push_back(&inst);

    std::vector<Batch> out;
    for (auto& [dataset, members] : by_dataset) {
        shuffle_in_place(members, rng);
        for (std::size_t start = 0, n = 1; start < members.size(); start += options.per_batch, ++n) {
            Batch b;
            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "-b%02zu", n);
            b.id = dataset + suffix;
            b.dataset = dataset;
            b.required_submissions = options.required_submissions;
            const std::size_t end = std::min(start + options.per_batch, members.size());
            for (std::size_t i = start; i < end; ++i) {
                const TestInstance& inst = *members[i];
                b.instance_ids.push_back(inst.id);
                for (PairKind kind : kAllPairKinds) b.items.push_back({inst.pair(kind).id, inst.id, false, {}, {}, {}, {}});
            }
            const auto& variants = attention_variants();
            const std::size_t offset = uniform_below(rng, variants.size());
            for (std::size_t k = 0; k < options.checks; ++k) {
                const TestInstance& host = *members[start + uniform_below(rng, end - start)];
                const auto& variant = variants[(offset + k) % variants.size()];
                BatchItem item;
                item.pair_id = b.id + "/check-" + std::to_string(k + 1);
                item.is_attention = true;
                item.topic = host.topic.description;
                item.left_text = host.argument(Role::N).text + " " + variant.instruction;
                item.right_text = host.argument(Role::E).text;
                item.expected = variant.expected;
                b.attention_ids.push_back(item.pair_id);
                b.items.push_back(std::move(item));
            }
            shuffle_in_place(b.items, rng);
            out.push_back(std::move(b));
        }
    }
    return out;
}

void validate(const std::vector<Batch>& batches) {
    std::set<std::string> ids, pairs;
    for (const auto& b : batches) {
        if (b.id.empty() || !valid_batch_id(b.id)) throw ValidationError("invalid batch id '" + b.id + "'");
        if (!ids.insert(b.id).second) throw ValidationError("duplicate batch id " + b.id);
        if (b.instance_ids.empty()) throw ValidationError("batch " + b.id + " has no instances");
        if (b.attention_ids.empty()) throw ValidationError("batch " + b.id + " has no attention checks");
        if (b.required_submissions == 0) throw ValidationError("batch " + b.id + ": required submissions must be positive");
        std::size_t checks = 0;
        for (const auto& item : b.items) {
            if (!pairs.insert(item.pair_id).second)
                throw ValidationError("pair " + item.pair_id + " appears in more than one batch item");
            if (item.is_attention) {
                ++checks;
                if (!item.expected) throw ValidationError("attention item " + item.pair_id + " has no expected answer");
            }
        }
        if (checks != b.attention_ids.size())
            throw ValidationError("batch " + b.id + ": attention ids do not match attention items");
    }
}

json to_json(const Batch& b) {
    json items = json::array();
    for (const auto& item : b.items) {
        json j = {{"pair_id", item.pair_id}, {"is_attention", item.is_attention}};
        if (item.is_attention) {
            j["topic"] = item.topic;
            j["left"] = item.left_text;
            j["right"] = item.right_text;
            j["expected"] = to_string(*item.expected);
        } else {
            j["instance_id"] = item.instance_id;
        }
        items.push_back(std::move(j));
    }
    return {{"id", b.id},
            {"dataset", b.dataset},
            {"instance_ids", b.instance_ids},
            {"attention_ids", b.attention_ids},
            {"required_submissions", b.required_submissions},
            {"items", items}};
}

Batch batch_from_json(const json& j) {
    try {
        Batch b;
        b.id = j.at("id").get<std::string>();
        b.dataset = j.at("dataset").get<std::string>();
        b.instance_ids = j.at("instance_ids").get<std::vector<std::string>>();
        b.attention_ids = j.at("attention_ids").get<std::vector<std::string>>();
        b.required_submissions = j.value("required_submissions", std::size_t{5});
        for (const auto& ji : j.at("items")) {
            BatchItem item;
            item.pair_id = ji.at("pair_id").get<std::string>();
            item.is_attention = ji.value("is_attention", false);
            if (item.is_attention) {
                item.topic = ji.at("topic").get<std::string>();
                item.left_text = ji.at("left").get<std::string>();
                item.right_text = ji.at("right").get<std::string>();
                item.expected = parse_ranking(ji.at("expected").get<std::string>());
            } else {
                item.instance_id = ji.at("instance_id").get<std::string>();
            }
            b.items.push_back(std::move(item));
        }
        return b;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("batch: ") + e.what());
    }
}

std::string serialize_batches(const std::vector<Batch>& batches) {
    json arr = json::array();
    for (const auto& b : batches) arr.push_back(to_json(b));
    return json{{"batches", arr}}.dump(2) + "\n";
}

std::vector<Batch> parse_batches(std::string_view content) {
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("batch file: ") + e.what());
    }
    if (!j.contains("batches") || !j["batches"].is_array()) throw ValidationError("batch file lacks a 'batches' array");
    std::vector<Batch> out;
    for (const auto& jb : j["batches"]) out.push_back(batch_from_json(jb));
    validate(out);
    return out;
}

std::vector<Batch> load_batches(const std::filesystem::path& path) { return parse_batches(read_file(path)); }

}  // namespace emoconv
