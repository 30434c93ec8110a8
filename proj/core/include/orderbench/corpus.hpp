#pragma once

#include "orderbench/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace orderbench {

/// A text in its gold (coherent) sentence order.
struct Document {
    std::string id;
    std::vector<std::string> sentences;

    std::size_t size() const { return sentences.size(); }

    friend bool operator==(const Document&, const Document&) = default;
};

enum class Provenance { loaded, synthetic };

struct Corpus {
    std::string name;
    std::vector<Document> documents;
    Provenance provenance = Provenance::loaded;

    std::size_t size() const { return documents.size(); }
    bool empty() const { return documents.empty(); }
};

/// Strips leading and trailing whitespace; interior whitespace is kept.
std::string trim(std::string_view text);

/// Reads a JSON-lines corpus. Blank lines are skipped. Throws DataError with
/// the line number for malformed records, empty sentences and duplicate ids.
Corpus load_corpus(const std::filesystem::path& path, std::string name);
Corpus parse_corpus(std::istream& in, std::string name, std::string_view source = "<stream>");

/// One JSON object per line, keys in the order "id", "sentences".
std::string serialize_document(const Document& doc);
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Keeps the first min(size, max_sentences) sentences. max_sentences must be positive.
Document truncate(const Document& doc, std::size_t max_sentences);

struct SplitSpec {
    Rational train_ratio{8, 10};
    Rational dev_ratio{1, 10};
    Rational test_ratio{1, 10};
    std::uint64_t seed = 0;

    /// Parses "80:10:10"-style weights; they are normalised to sum to one.
    static SplitSpec from_weights(std::string_view weights, std::uint64_t seed);
};

struct CorpusSplit {
    Corpus train;
    Corpus dev;
    Corpus test;
};

/// Seeded partition. dev and test sizes are floor(ratio * size); train takes the rest.
/// Documents keep their original relative order within each part.
CorpusSplit split(const Corpus& corpus, const SplitSpec& spec);

/// Templated stories whose sentence k carries a cue word characteristic of
/// position k. Different cue schemes use disjoint vocabularies.
Corpus generate_synthetic(std::size_t n_docs, std::size_t sentences_per_doc, std::uint64_t seed, int cue_scheme = 0);

} // namespace orderbench
