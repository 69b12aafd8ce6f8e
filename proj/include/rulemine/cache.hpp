#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rulemine/activation.hpp"
#include "rulemine/condition.hpp"

namespace rulemine {

// Lowercase hex digest, 64 characters.
std::string sha256_hex(std::string_view data);

// Content-addressed store of activation vectors. One file per condition,
// named by the SHA-256 of the canonical condition string, holding the AVF1
// serialization. Workers pass condition strings around instead of vectors;
// the bits travel through this directory. A manifest.csv maps canonical
// condition strings to file names for anything that wants to walk the cache.
class ActivationCache {
public:
    explicit ActivationCache(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    static std::string file_name_for(const Condition& cond);

    // Returns the file name the vector was stored under.
    std::string store(const Condition& cond, const ActivationVector& a) const;

    bool contains(const Condition& cond) const;

    // Throws "missing cached activation vector ..." when absent.
    ActivationVector load(const Condition& cond) const;

    void write_manifest(const std::vector<std::pair<std::string, std::string>>& entries) const;

    // Removes every file in the cache directory.
    void clear() const;

private:
    std::filesystem::path dir_;
};

}  // namespace rulemine
