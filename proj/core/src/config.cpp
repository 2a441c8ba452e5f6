#include "snn/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "snn/csv.hpp"
#include "snn/errors.hpp"

namespace snn {

const char* version() { return SNN_VERSION; }

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw DomainError("setting " + key + " is not a number: " + v);
    return out;
}

}  // namespace

Config::Config(std::vector<std::string> allowed) : allowed_(std::move(allowed)) {}

Config Config::load(const std::string& path, std::vector<std::string> allowed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Config c(std::move(allowed));
    c.parse_text(ss.str(), path);
    return c;
}

void Config::parse_text(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError(source + ":" + std::to_string(no) + ": expected key=value");
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void Config::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw DomainError("empty setting name");
    if (!allowed_.empty() && std::find(allowed_.begin(), allowed_.end(), key) == allowed_.end())
        throw DomainError("unknown setting: " + key);
    values_[key] = value;
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw DomainError("override must be key=value: " + assignment);
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    const std::string& v = it->second;
    const auto slash = v.find('/');
    if (slash != std::string::npos)
        return to_double(key, trim(v.substr(0, slash))) / to_double(key, trim(v.substr(slash + 1)));
    return to_double(key, v);
}

int Config::get_int(const std::string& key, int def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    int out = 0;
    const auto& v = it->second;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw DomainError("setting " + key + " is not an integer: " + v);
    return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::uint64_t out = 0;
    const auto& v = it->second;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw DomainError("setting " + key + " is not an unsigned integer: " + v);
    return out;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        Config one;
        one.set(key, item);
        out.push_back(one.get_double(key, 0.0));
    }
    if (out.empty()) throw DomainError("setting " + key + " is an empty list");
    return out;
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

void write_manifest(const std::string& dir, const std::string& command, const Config& cfg, std::uint64_t seed,
                    const std::vector<std::string>& overrides) {
    ensure_dir(dir);
    std::ofstream out(dir + "/manifest");
    if (!out) throw IoError("cannot write manifest in " + dir);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(cfg.hash()));
    out << "command=" << command << "\n";
    out << "version=" << version() << "\n";
    out << "config_hash=" << hex << "\n";
    out << "seed=" << seed << "\n";
    for (const auto& o : overrides) out << "override=" << o << "\n";
    out << "[config]\n" << cfg.canonical();
    if (!out) throw IoError("failed writing manifest in " + dir);
}

}  // namespace snn
