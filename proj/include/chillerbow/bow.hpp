#pragma once

#include "chillerbow/error.hpp"
#include "chillerbow/sax.hpp"

#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace chillerbow {

using Word = std::vector<int>;

struct Vocabulary {
    std::vector<Word> words; ///< sorted, distinct
    std::map<Word, std::size_t> index;
    std::size_t word_length = 1;
    std::size_t alphabet_size = 0;

    std::size_t size() const noexcept { return words.size(); }

    bool operator==(const Vocabulary& o) const
    {
        return words == o.words && word_length == o.word_length && alphabet_size == o.alphabet_size;
    }
};

inline std::string word_label(const Word& w, std::size_t alphabet_size)
{
    std::string s;
    if (alphabet_size <= 26) {
        for (int v : w)
            s.push_back(static_cast<char>('a' + v));
        return s;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            s += '-';
        s += std::to_string(w[i]);
    }
    return s;
}

inline Vocabulary make_vocabulary(std::set<Word> words, std::size_t word_length, std::size_t alphabet_size)
{
    Vocabulary v;
    v.word_length = word_length;
    v.alphabet_size = alphabet_size;
    v.words.assign(words.begin(), words.end());
    for (std::size_t i = 0; i < v.words.size(); ++i)
        v.index.emplace(v.words[i], i);
    return v;
}

/// Stride-1 sliding windows of word_length symbols.
template <class Fn>
void for_each_word(std::span<const int> symbols, std::size_t word_length, Fn&& fn)
{
    if (symbols.size() < word_length)
        return;
    for (std::size_t i = 0; i + word_length <= symbols.size(); ++i)
        fn(Word(symbols.begin() + static_cast<std::ptrdiff_t>(i),
                symbols.begin() + static_cast<std::ptrdiff_t>(i + word_length)));
}

/// Union of all words of all sequences, sorted lexicographically.
inline Vocabulary build_vocabulary(std::span<const SymbolSequence> sequences, std::size_t word_length)
{
    if (word_length == 0)
        throw Error(Errc::InvalidArgument, "bowr", "word length must be positive");
    if (sequences.empty())
        throw Error(Errc::EmptyInput, "bowr", "no symbol sequences");
    const std::size_t a = sequences.front().alphabet_size;
    std::set<Word> words;
    bool any = false;
    for (const auto& s : sequences) {
        if (s.alphabet_size != a)
            throw Error(Errc::InvalidArgument, "bowr", "sequences use different alphabet sizes");
        any = any || s.symbols.size() >= word_length;
        for_each_word(s.symbols, word_length, [&](Word w) { words.insert(std::move(w)); });
    }
    if (!any)
        throw Error(Errc::WordLengthExceedsSequence, "bowr",
                    "every sequence is shorter than word length " + std::to_string(word_length));
    return make_vocabulary(std::move(words), word_length, a);
}

/// Word histogram of one cycle; weights are counts divided by the cycle's tick count.
struct BowVector {
    int cycle_id = 0;
    std::vector<std::size_t> counts;
    std::vector<double> weights;
    std::size_t ticks = 0;
};

inline BowVector build_bow(const SymbolSequence& sequence, const Vocabulary& vocab, std::size_t ticks)
{
    if (ticks == 0)
        throw Error(Errc::InvalidArgument, "bowr", "tick count must be positive", sequence.cycle_id);
    BowVector bow;
    bow.cycle_id = sequence.cycle_id;
    bow.ticks = ticks;
    bow.counts.assign(vocab.size(), 0);
    for_each_word(sequence.symbols, vocab.word_length, [&](const Word& w) {
        auto it = vocab.index.find(w);
        if (it == vocab.index.end())
            throw Error(Errc::WordNotInVocabulary, "bowr", word_label(w, vocab.alphabet_size), sequence.cycle_id);
        ++bow.counts[it->second];
    });
    bow.weights.resize(vocab.size());
    for (std::size_t j = 0; j < vocab.size(); ++j)
        bow.weights[j] = static_cast<double>(bow.counts[j]) / static_cast<double>(ticks);
    return bow;
}

enum class BowMetric { euclidean, manhattan, cosine };

constexpr std::string_view to_string(BowMetric m) noexcept
{
    switch (m) {
    case BowMetric::euclidean: return "euclidean";
    case BowMetric::manhattan: return "manhattan";
    case BowMetric::cosine: return "cosine";
    }
    return "euclidean";
}

inline std::optional<BowMetric> parse_bow_metric(std::string_view s)
{
    for (auto m : {BowMetric::euclidean, BowMetric::manhattan, BowMetric::cosine})
        if (to_string(m) == s)
            return m;
    return std::nullopt;
}

/// Cosine distance is 1 - cos(x, y); 0 between two all-zero vectors.
inline double bow_distance(std::span<const double> x, std::span<const double> y, BowMetric metric = BowMetric::euclidean)
{
    if (x.size() != y.size())
        throw Error(Errc::VocabularyMismatch, "bowr",
                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " words");
    switch (metric) {
    case BowMetric::euclidean: {
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(s);
    }
    case BowMetric::manhattan: {
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += std::abs(x[i] - y[i]);
        return s;
    }
    case BowMetric::cosine: {
        double xy = 0, xx = 0, yy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            xy += x[i] * y[i];
            xx += x[i] * x[i];
            yy += y[i] * y[i];
        }
        if (xx == 0 && yy == 0)
            return 0.0;
        if (xx == 0 || yy == 0)
            return 1.0;
        return std::max(0.0, 1.0 - xy / std::sqrt(xx * yy));
    }
    }
    return 0.0;
}

inline double bow_distance(const BowVector& x, const BowVector& y, BowMetric metric = BowMetric::euclidean)
{
    return bow_distance(x.weights, y.weights, metric);
}

} // namespace chillerbow
