#include "rulemine/activation.hpp"

#include <bit>
#include <cassert>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace rulemine {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

// mask of the valid bits in the last word, all-ones when n % 64 == 0
std::uint64_t tail_mask(std::size_t n) {
    const std::size_t rem = n % 64;
    return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

std::size_t popcount_words(const std::vector<std::uint64_t>& words) {
    std::size_t ones = 0;
    for (std::uint64_t w : words) ones += static_cast<std::size_t>(std::popcount(w));
    return ones;
}

}  // namespace

ActivationVector::ActivationVector(std::size_t n) : n_(n), ones_(0), words_(word_count(n), 0) {}

ActivationVector ActivationVector::from_words(std::size_t n, std::vector<std::uint64_t> words) {
    if (words.size() != word_count(n))
        throw std::runtime_error("activation word count does not match length");
    if (n > 0 && (words.back() & ~tail_mask(n)) != 0)
        throw std::runtime_error("stray bits past the activation length");
    ActivationVector a;
    a.n_ = n;
    a.words_ = std::move(words);
    a.ones_ = popcount_words(a.words_);
    return a;
}

bool ActivationVector::test(std::size_t i) const {
    assert(i < n_);
    return (words_[i >> 6] >> (i & 63)) & 1;
}

void ActivationVector::set(std::size_t i) {
    assert(i < n_);
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (!(words_[i >> 6] & bit)) {
        words_[i >> 6] |= bit;
        ++ones_;
    }
}

ActivationVector and_activation(const ActivationVector& a, const ActivationVector& b) {
    if (a.size() != b.size())
        throw std::runtime_error("activation length mismatch: " + std::to_string(a.size()) +
                                 " vs " + std::to_string(b.size()));
    std::vector<std::uint64_t> words(a.words().size());
    for (std::size_t w = 0; w < words.size(); ++w) words[w] = a.words()[w] & b.words()[w];
    return ActivationVector::from_words(a.size(), std::move(words));
}

double coverage(const ActivationVector& a) {
    if (a.size() == 0) throw std::runtime_error("coverage of an empty activation vector");
    return static_cast<double>(a.ones()) / static_cast<double>(a.size());
}

namespace {

constexpr char kMagic[4] = {'A', 'V', 'F', '1'};

void put_u64_le(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, 8);
}

std::uint64_t get_u64_le(std::istream& in) {
    char buf[8];
    in.read(buf, 8);
    if (in.gcount() != 8) throw std::runtime_error("truncated activation file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}

}  // namespace

void write_activation(std::ostream& out, const ActivationVector& a) {
    out.write(kMagic, 4);
    put_u64_le(out, a.size());
    put_u64_le(out, a.ones());
    const std::size_t n_bytes = (a.size() + 7) / 8;
    std::vector<char> payload(n_bytes);
    for (std::size_t j = 0; j < n_bytes; ++j)
        payload[j] = static_cast<char>((a.words()[j / 8] >> (8 * (j % 8))) & 0xFF);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("failed to write activation data");
}

ActivationVector read_activation(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad activation file magic");
    const std::uint64_t n = get_u64_le(in);
    const std::uint64_t ones = get_u64_le(in);
    const std::size_t n_bytes = static_cast<std::size_t>((n + 7) / 8);
    std::vector<char> payload(n_bytes);
    in.read(payload.data(), static_cast<std::streamsize>(n_bytes));
    if (static_cast<std::size_t>(in.gcount()) != n_bytes)
        throw std::runtime_error("truncated activation file");
    if (in.peek() != std::char_traits<char>::eof())
        throw std::runtime_error("trailing data in activation file");

    std::vector<std::uint64_t> words(word_count(n), 0);
    for (std::size_t j = 0; j < n_bytes; ++j)
        words[j / 8] |= static_cast<std::uint64_t>(static_cast<unsigned char>(payload[j]))
                        << (8 * (j % 8));
    if (n > 0 && (words.back() & ~tail_mask(n)) != 0)
        throw std::runtime_error("stray bits past the activation length");
    ActivationVector a = ActivationVector::from_words(n, std::move(words));
    if (a.ones() != ones) throw std::runtime_error("activation ones field does not match payload");
    return a;
}

void write_activation_file(const std::filesystem::path& path, const ActivationVector& a) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write activation file: " + path.string());
    write_activation(out, a);
    out.flush();
    if (!out) throw std::runtime_error("failed to write activation file: " + path.string());
}

ActivationVector read_activation_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open activation file: " + path.string());
    try {
        return read_activation(in);
    } catch (const std::exception& ex) {
        throw std::runtime_error(path.string() + ": " + ex.what());
    }
}

}  // namespace rulemine
