#pragma once

// Flat key-value configuration: one `key = value` per line, `#` starts a
// comment, blank lines are ignored, list values are comma-separated.
// Typed getters consume keys; reject_unknown() flags whatever is left so a
// misspelled key fails loudly instead of silently using a default.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Config {
public:
    static Config parse(const std::string& text)
    {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            if (!cfg.kv_.emplace(key, value).second)
                throw ConfigError("config: duplicate key '" + key + "'");
        }
        return cfg;
    }

    static Config load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    const std::map<std::string, std::string>& items() const { return kv_; }

    std::string get_string(const std::string& key) const
    {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("config: missing required key '" + key + "'");
        used_.insert(key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const
    {
        return has(key) ? get_string(key) : fallback;
    }

    long long get_int(const std::string& key) const { return to_int(key, get_string(key)); }
    long long get_int(const std::string& key, long long fallback) const
    {
        return has(key) ? get_int(key) : fallback;
    }

    double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
    double get_double(const std::string& key, double fallback) const
    {
        return has(key) ? get_double(key) : fallback;
    }

    bool get_bool(const std::string& key) const
    {
        const std::string v = get_string(key);
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        throw ConfigError("config: key '" + key + "' is not a boolean: '" + v + "'");
    }
    bool get_bool(const std::string& key, bool fallback) const
    {
        return has(key) ? get_bool(key) : fallback;
    }

    std::vector<long long> get_int_list(const std::string& key) const
    {
        std::vector<long long> out;
        for (const std::string& item : split_list(get_string(key))) out.push_back(to_int(key, item));
        return out;
    }
    std::vector<long long> get_int_list(const std::string& key,
                                        const std::vector<long long>& fallback) const
    {
        return has(key) ? get_int_list(key) : fallback;
    }

    std::vector<double> get_double_list(const std::string& key) const
    {
        std::vector<double> out;
        for (const std::string& item : split_list(get_string(key)))
            out.push_back(to_double(key, item));
        return out;
    }

    std::vector<std::string> unused_keys() const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }

    void reject_unknown() const
    {
        const std::vector<std::string> extra = unused_keys();
        if (extra.empty()) return;
        std::string msg = "config: unknown key(s):";
        for (const std::string& k : extra) msg += " '" + k + "'";
        throw ConfigError(msg);
    }

private:
    static std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split_list(const std::string& s)
    {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, ',')) out.push_back(trim(item));
        return out;
    }

    static long long to_int(const std::string& key, const std::string& v)
    {
        std::size_t used = 0;
        long long n = 0;
        try {
            n = std::stoll(v, &used);
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' is not an integer: '" + v + "'");
        }
        if (used != v.size())
            throw ConfigError("config: key '" + key + "' is not an integer: '" + v + "'");
        return n;
    }

    static double to_double(const std::string& key, const std::string& v)
    {
        std::size_t used = 0;
        double d = 0;
        try {
            d = std::stod(v, &used);
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' is not a number: '" + v + "'");
        }
        if (used != v.size())
            throw ConfigError("config: key '" + key + "' is not a number: '" + v + "'");
        return d;
    }

    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> used_;
};

}  // namespace fpp
