#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace snn {

const char* version();

std::uint64_t fnv1a(std::string_view text);

// Line-oriented key=value settings; '#' starts a comment.
class Config {
public:
    // An empty allow-list accepts any key.
    explicit Config(std::vector<std::string> allowed = {});

    static Config load(const std::string& path, std::vector<std::string> allowed = {});
    void parse_text(const std::string& text, const std::string& source = "<text>");
    void set(const std::string& key, const std::string& value);
    // "key=value"
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& def) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    // Sorted key=value lines.
    std::string canonical() const;
    std::uint64_t hash() const { return fnv1a(canonical()); }

private:
    std::vector<std::string> allowed_;
    std::map<std::string, std::string> values_;
};

// Writes DIR/manifest with the command, version, config hash, seed, overrides and settings.
void write_manifest(const std::string& dir, const std::string& command, const Config& cfg, std::uint64_t seed,
                    const std::vector<std::string>& overrides);

}  // namespace snn
