#include "orderbench/corpus.hpp"

#include "orderbench/error.hpp"
#include "orderbench/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace orderbench {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view text)
{
    constexpr std::string_view ws = " \t\n\r\f\v";
    const auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(ws);
    return std::string(text.substr(first, last - first + 1));
}

namespace {

Document parse_record(const std::string& line, std::string_view where)
{
    json record;
    try {
        record = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(std::string(where) + ": malformed JSON record: " + e.what());
    }
    if (!record.is_object()) {
        throw DataError(std::string(where) + ": record is not a JSON object");
    }
    const auto id = record.find("id");
    if (id == record.end() || !id->is_string()) {
        throw DataError(std::string(where) + ": record lacks a string \"id\"");
    }
    Document doc;
    doc.id = id->get<std::string>();
    const auto sentences = record.find("sentences");
    if (sentences == record.end() || !sentences->is_array()) {
        throw DataError(std::string(where) + ": record '" + doc.id + "' lacks a \"sentences\" array");
    }
    if (sentences->empty()) {
        throw DataError(std::string(where) + ": record '" + doc.id + "' has no sentences");
    }
    doc.sentences.reserve(sentences->size());
    for (const auto& s : *sentences) {
        if (!s.is_string()) {
            throw DataError(std::string(where) + ": record '" + doc.id + "' has a non-string sentence");
        }
        auto trimmed = trim(s.get<std::string>());
        if (trimmed.empty()) {
            throw DataError(std::string(where) + ": record '" + doc.id + "' has an empty sentence");
        }
        doc.sentences.push_back(std::move(trimmed));
    }
    return doc;
}

} // namespace

Corpus parse_corpus(std::istream& in, std::string name, std::string_view source)
{
    Corpus corpus;
    corpus.name = std::move(name);
    corpus.provenance = Provenance::loaded;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const std::string where = std::string(source) + ":" + std::to_string(line_no);
        Document doc = parse_record(line, where);
        if (!seen.insert(doc.id).second) {
            throw DataError(where + ": duplicate document id '" + doc.id + "'");
        }
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::string name)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open corpus file '" + path.string() + "'");
    }
    return parse_corpus(in, std::move(name), path.string());
}

std::string serialize_document(const Document& doc)
{
    ordered_json record;
    record["id"] = doc.id;
    record["sentences"] = doc.sentences;
    return record.dump();
}

void write_corpus(const Corpus& corpus, std::ostream& out)
{
    for (const auto& doc : corpus.documents) {
        out << serialize_document(doc) << '\n';
    }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write corpus file '" + path.string() + "'");
    }
    write_corpus(corpus, out);
    if (!out) {
        throw DataError("I/O error while writing '" + path.string() + "'");
    }
}

Document truncate(const Document& doc, std::size_t max_sentences)
{
    if (max_sentences == 0) {
        throw UsageError("max_sentences must be positive");
    }
    Document out;
    out.id = doc.id;
    const auto keep = std::min(doc.sentences.size(), max_sentences);
    out.sentences.assign(doc.sentences.begin(), doc.sentences.begin() + static_cast<std::ptrdiff_t>(keep));
    return out;
}

SplitSpec SplitSpec::from_weights(std::string_view weights, std::uint64_t seed)
{
    std::array<long long, 3> parts{};
    std::size_t index = 0;
    std::size_t start = 0;
    while (true) {
        const auto colon = weights.find(':', start);
        const auto token = weights.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start);
        if (index >= parts.size() || token.empty() || token.find_first_not_of("0123456789") != std::string_view::npos) {
            throw UsageError("split ratios must look like 80:10:10, got '" + std::string(weights) + "'");
        }
        parts[index++] = std::stoll(std::string(token));
        if (colon == std::string_view::npos) {
            break;
        }
        start = colon + 1;
    }
    if (index != parts.size()) {
        throw UsageError("split ratios need three parts, got '" + std::string(weights) + "'");
    }
    const long long total = parts[0] + parts[1] + parts[2];
    if (parts[0] <= 0 || parts[1] <= 0 || parts[2] <= 0) {
        throw UsageError("split ratios must be strictly positive");
    }
    SplitSpec spec;
    spec.train_ratio = Rational(parts[0], total);
    spec.dev_ratio = Rational(parts[1], total);
    spec.test_ratio = Rational(parts[2], total);
    spec.seed = seed;
    return spec;
}

namespace {

std::size_t floor_share(const Rational& ratio, std::size_t n)
{
    const Rational share = ratio * static_cast<long long>(n);
    const auto floored = boost::multiprecision::numerator(share) / boost::multiprecision::denominator(share);
    return floored.convert_to<std::size_t>();
}

} // namespace

CorpusSplit split(const Corpus& corpus, const SplitSpec& spec)
{
    if (corpus.empty()) {
        throw UsageError("cannot split an empty corpus");
    }
    if (spec.train_ratio <= 0 || spec.dev_ratio <= 0 || spec.test_ratio <= 0) {
        throw UsageError("split ratios must be strictly positive");
    }
    if (spec.train_ratio + spec.dev_ratio + spec.test_ratio != 1) {
        throw UsageError("split ratios must sum to exactly 1");
    }
    const std::size_t n = corpus.size();
    const std::size_t dev_size = floor_share(spec.dev_ratio, n);
    const std::size_t test_size = floor_share(spec.test_ratio, n);
    if (dev_size == 0 || test_size == 0 || dev_size + test_size >= n) {
        throw DataError("corpus '" + corpus.name + "' with " + std::to_string(n) +
                        " documents is too small for the requested split (a part would be empty)");
    }
    const std::size_t train_size = n - dev_size - test_size;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.below(i + 1)]);
    }

    auto take = [&](std::size_t begin, std::size_t count, std::string_view suffix) {
        std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                         order.begin() + static_cast<std::ptrdiff_t>(begin + count));
        std::sort(members.begin(), members.end());
        Corpus part;
        part.name = corpus.name + "." + std::string(suffix);
        part.provenance = corpus.provenance;
        part.documents.reserve(count);
        for (auto i : members) {
            part.documents.push_back(corpus.documents[i]);
        }
        return part;
    };

    CorpusSplit out;
    out.train = take(0, train_size, "train");
    out.dev = take(train_size, dev_size, "dev");
    out.test = take(train_size + dev_size, test_size, "test");
    return out;
}

namespace {

struct CueScheme {
    std::vector<std::string_view> ordinals;
    std::string_view overflow_prefix;
    std::vector<std::string_view> verbs;
    std::vector<std::string_view> objects;
};

const CueScheme& builtin_scheme(int index)
{
    static const CueScheme narrative{
        {"First", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth", "Ninth", "Tenth",
         "Eleventh", "Twelfth", "Thirteenth", "Fourteenth", "Fifteenth", "Sixteenth", "Seventeenth",
         "Eighteenth", "Nineteenth", "Twentieth"},
        "Stage",
        {"found", "carried", "opened", "cleaned", "watched", "bought", "fixed", "packed"},
        {"box", "lamp", "door", "garden", "letter", "kettle", "bicycle", "window"},
    };
    static const CueScheme latinate{
        {"Primo", "Secundo", "Tertio", "Quarto", "Quinto", "Sexto", "Septimo", "Octavo", "Nono", "Decimo",
         "Undecimo", "Duodecimo", "Tredecimo", "Quattuordecimo", "Quindecimo", "Sedecimo", "Septendecimo",
         "Duodevicesimo", "Undevicesimo", "Vicesimo"},
        "Gradus",
        {"sculpted", "sailed", "painted", "harvested", "measured", "polished", "tuned", "mapped"},
        {"statue", "vessel", "canvas", "orchard", "meridian", "mirror", "violin", "coastline"},
    };
    return index % 2 == 0 ? narrative : latinate;
}

std::string ordinal_cue(const CueScheme& scheme, int scheme_index, std::size_t position)
{
    // Schemes beyond the two built-in vocabularies get scheme-tagged cue words.
    std::string tag = scheme_index >= 2 ? "v" + std::to_string(scheme_index) : "";
    if (position <= scheme.ordinals.size()) {
        return std::string(scheme.ordinals[position - 1]) + tag;
    }
    return std::string(scheme.overflow_prefix) + tag + std::to_string(position);
}

constexpr std::array<std::string_view, 24> kGivenNames{
    "Ava", "Ben", "Cora", "Dev", "Elena", "Farid", "Greta", "Hugo", "Iris", "Jonah", "Kira", "Liam",
    "Mira", "Nate", "Olga", "Pavel", "Quinn", "Rosa", "Sami", "Tess", "Umar", "Vera", "Wes", "Yara"};
constexpr std::array<std::string_view, 24> kFamilyNames{
    "Abbott", "Brandt", "Castro", "Dalton", "Ekberg", "Foster", "Garza", "Holm", "Ibsen", "Jarvis",
    "Keller", "Lund", "Moreau", "Novak", "Okafor", "Price", "Quade", "Reyes", "Sato", "Tran",
    "Ueda", "Vance", "Weller", "Young"};

} // namespace

Corpus generate_synthetic(std::size_t n_docs, std::size_t sentences_per_doc, std::uint64_t seed, int cue_scheme)
{
    if (n_docs == 0 || sentences_per_doc == 0) {
        throw UsageError("generate_synthetic needs a positive document and sentence count");
    }
    if (cue_scheme < 0) {
        throw UsageError("cue scheme must be non-negative");
    }
    const CueScheme& scheme = builtin_scheme(cue_scheme);
    Rng rng(derive_seed(seed, "synthetic", std::to_string(cue_scheme)));

    // Entity names are drawn without replacement from a reshuffled pool so
    // that small corpora never repeat a name.
    constexpr std::size_t pool_size = kGivenNames.size() * kFamilyNames.size();
    std::vector<std::size_t> pool(pool_size);
    std::size_t pool_pos = pool_size;

    Corpus corpus;
    corpus.name = "synthetic-c" + std::to_string(cue_scheme) + "-s" + std::to_string(seed);
    corpus.provenance = Provenance::synthetic;
    corpus.documents.reserve(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        if (pool_pos == pool_size) {
            std::iota(pool.begin(), pool.end(), std::size_t{0});
            for (std::size_t i = pool_size - 1; i > 0; --i) {
                std::swap(pool[i], pool[rng.below(i + 1)]);
            }
            pool_pos = 0;
        }
        const std::size_t who = pool[pool_pos++];
        const std::string entity = std::string(kGivenNames[who / kFamilyNames.size()]) + " " +
                                   std::string(kFamilyNames[who % kFamilyNames.size()]);

        Document doc;
        char id[32];
        std::snprintf(id, sizeof id, "doc-%06zu", d + 1);
        doc.id = id;
        doc.sentences.reserve(sentences_per_doc);
        for (std::size_t k = 1; k <= sentences_per_doc; ++k) {
            const auto verb = scheme.verbs[rng.below(scheme.verbs.size())];
            const auto object = scheme.objects[rng.below(scheme.objects.size())];
            std::string sentence = ordinal_cue(scheme, cue_scheme, k);
            sentence += ", ";
            sentence += entity;
            sentence += ' ';
            sentence += verb;
            sentence += " the ";
            sentence += object;
            sentence += '.';
            doc.sentences.push_back(std::move(sentence));
        }
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

} // namespace orderbench
