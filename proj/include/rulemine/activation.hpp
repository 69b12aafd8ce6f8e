#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace rulemine {

// Length-n bit sequence marking the rows where a condition holds, with the
// popcount cached. This is the engine's dominant memory object, so it is
// bit-packed and immutable once built.
class ActivationVector {
public:
    ActivationVector() = default;
    explicit ActivationVector(std::size_t n);  // all bits clear

    static ActivationVector from_words(std::size_t n, std::vector<std::uint64_t> words);

    std::size_t size() const { return n_; }
    std::size_t ones() const { return ones_; }
    bool test(std::size_t i) const;
    void set(std::size_t i);

    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const ActivationVector&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t ones_ = 0;
    std::vector<std::uint64_t> words_;
};

// Bitwise conjunction of two equal-length vectors.
ActivationVector and_activation(const ActivationVector& a, const ActivationVector& b);

// Fraction of rows activated: ones / n.
double coverage(const ActivationVector& a);

// On-disk activation vector format (cache files):
//   magic   "AVF1"                        4 bytes
//   n       unsigned 64-bit little-endian
//   ones    unsigned 64-bit little-endian
//   payload ceil(n/8) bytes, bit i stored in byte i/8 at bit position
//           i mod 8, least-significant bit first
// No trailing data. Readers reject bad magic, size mismatches, stray bits
// past n and an ones field that disagrees with the payload popcount.
void write_activation(std::ostream& out, const ActivationVector& a);
ActivationVector read_activation(std::istream& in);

void write_activation_file(const std::filesystem::path& path, const ActivationVector& a);
ActivationVector read_activation_file(const std::filesystem::path& path);

}  // namespace rulemine
