#include "rulemine/cache.hpp"

#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "rulemine/csv.hpp"

namespace rulemine {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(static_cast<std::size_t>(len) * 2, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = kHex[digest[i] >> 4];
        out[2 * i + 1] = kHex[digest[i] & 0xF];
    }
    return out;
}

ActivationCache::ActivationCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string ActivationCache::file_name_for(const Condition& cond) {
    return sha256_hex(canonical_string(cond));
}

std::string ActivationCache::store(const Condition& cond, const ActivationVector& a) const {
    std::string name = file_name_for(cond);
    write_activation_file(dir_ / name, a);
    return name;
}

bool ActivationCache::contains(const Condition& cond) const {
    return std::filesystem::exists(dir_ / file_name_for(cond));
}

ActivationVector ActivationCache::load(const Condition& cond) const {
    const std::filesystem::path path = dir_ / file_name_for(cond);
    if (!std::filesystem::exists(path))
        throw std::runtime_error("missing cached activation vector for " +
                                 canonical_string(cond));
    return read_activation_file(path);
}

void ActivationCache::write_manifest(
    const std::vector<std::pair<std::string, std::string>>& entries) const {
    const std::filesystem::path path = dir_ / "manifest.csv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    out << "condition,file\n";
    for (const auto& [condition, file] : entries)
        out << csv_escape(condition) << ',' << csv_escape(file) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("failed to write manifest: " + path.string());
}

void ActivationCache::clear() const {
    if (!std::filesystem::exists(dir_)) return;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.is_regular_file()) std::filesystem::remove(entry.path());
    }
}

}  // namespace rulemine
