#pragma once

#include "girit/corpus.hpp"
#include "girit/query_bag.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace girit::fixture {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::mt19937_64 salt{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() / ("girit-test-" + std::to_string(salt()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ignored;
        std::filesystem::remove_all(path_, ignored);
    }
    TempDir(TempDir const&) = delete;
    auto operator=(TempDir const&) -> TempDir& = delete;

    [[nodiscard]] auto path() const -> std::filesystem::path const& { return path_; }
    [[nodiscard]] auto operator/(std::string const& name) const -> std::filesystem::path { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Vocabulary of `size` synthetic terms mixing Gujarati syllables and Latin.
inline auto make_vocabulary(std::size_t size) -> std::vector<std::string>
{
    static std::vector<std::string> const syllables = {"ક", "ગુ", "જ", "રા", "ત", "સ", "મા", "ચા", "ર", "ન",
                                                       "દી", "પ", "લ", "વે", "હ", "ભા"};
    std::vector<std::string> vocab;
    vocab.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        std::string term;
        std::size_t n = i;
        if (i % 5 == 0) {
            do {
                term += static_cast<char>('a' + n % 26);
                n /= 26;
            } while (n != 0);
            term += "x";
        } else {
            do {
                term += syllables[n % syllables.size()];
                n /= syllables.size();
            } while (n != 0);
        }
        vocab.push_back(term);
    }
    return vocab;
}

/// Zipf-ish random documents over `vocab`; docids are zero-padded so their
/// lexicographic order is not the ingestion order.
inline auto random_corpus(std::mt19937_64& rng, std::vector<std::string> const& vocab, std::size_t docs,
                          std::size_t min_len, std::size_t max_len) -> std::vector<RawDocument>
{
    std::vector<double> weights;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        weights.push_back(1.0 / static_cast<double>(i + 1));
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::uniform_int_distribution<std::size_t> length(min_len, max_len);
    std::vector<RawDocument> result;
    for (std::size_t d = 0; d < docs; ++d) {
        RawDocument doc;
        doc.docid = "D" + std::to_string((d * 7919) % 100003);
        std::size_t const len = length(rng);
        for (std::size_t t = 0; t < len; ++t) {
            if (t != 0) {
                doc.text += (t % 7 == 0) ? ", " : " ";
            }
            doc.text += vocab[pick(rng)];
        }
        result.push_back(std::move(doc));
    }
    return result;
}

}  // namespace girit::fixture
