#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "q2p/evalkit.hpp"
#include "q2p/prodvec.hpp"
#include "q2p/queryembed.hpp"
#include "q2p/synth.hpp"

namespace q2p {

enum class LexiconMode { real, synthetic, merged };
LexiconMode parse_lexicon_mode(std::string_view name);
std::string_view lexicon_mode_name(LexiconMode mode);

/// Settings shared by every subcommand. Read from a flat JSON object whose
/// keys mirror the member names below (nested configs are flattened).
struct PipelineConfig {
    std::string catalog;
    std::string sessions;
    std::string clicks;
    std::string words;
    std::string product_vectors;  // default: <out>/product_vectors.txt
    std::string lexicon;
    std::vector<std::string> analogies;
    std::string triplets;
    std::string out = ".";

    TrainConfig train;
    RankConfig rank;
    SynthConfig synth;
    AnalogyGenConfig analogy;
    ShopSpec shop;
    std::vector<std::pair<Field, Field>> type_pairs{{Field::brand, Field::activity}};
    std::vector<int> cutoffs{5, 10};
    bool open_vocabulary = false;

    std::uint64_t seed = 42;
    int threads = 1;

    /// Parses the flat JSON document; unknown keys are rejected.
    static PipelineConfig from_json_text(const std::string& text);
    static PipelineConfig load(const std::string& path);

    /// Fans the global seed and thread count out to the module configs.
    void finalize();
    void validate() const;
};

/// Parses "brand:activity".
std::pair<Field, Field> parse_type_pair(std::string_view text);

/// Files written into a directory through temporaries. Nothing becomes
/// visible until commit(); destruction without commit removes every
/// temporary.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);
    ~OutputSet();
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    std::ostream& open(const std::string& name);
    std::vector<std::filesystem::path> commit();

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::filesystem::path, std::unique_ptr<std::ofstream>>> files_;
    bool committed_ = false;
};

struct CommandResult {
    std::vector<std::filesystem::path> written;
    /// Human-readable summary lines.
    std::vector<std::string> notes;
};

CommandResult cmd_simulate_shop(const PipelineConfig& config);
CommandResult cmd_train_products(const PipelineConfig& config);
CommandResult cmd_embed_queries(const PipelineConfig& config, LexiconMode mode);
CommandResult cmd_build_analogies(const PipelineConfig& config);
CommandResult cmd_evaluate(const PipelineConfig& config);

/// Catalog label values used as the default synthetic word list.
std::vector<std::string> taxonomy_words(const Catalog& catalog);

/// Tokenized product descriptions, the corpus of the text baseline.
std::vector<std::vector<std::string>> description_corpus(const Catalog& catalog);

/// Report table with one row per analogy set: HR@cutoffs, CV, ST.
std::string report_table(const std::vector<std::pair<std::string, EvalReport>>& rows);

}  // namespace q2p
