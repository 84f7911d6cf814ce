#include "ecd/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ecd {

namespace {

std::string_view trim(std::string_view s) {
    const auto notspace = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
    while (!s.empty() && !notspace(s.front())) s.remove_prefix(1);
    while (!s.empty() && !notspace(s.back())) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view text, const std::string& where) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("config: bad numeric value '" + std::string(text) + "' at " + where);
    return value;
}

}  // namespace

IniFile IniFile::parse(std::string_view text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::string section;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++lineno;

        line = trim(line);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at " + origin + ":" +
                                  std::to_string(lineno));
            section = std::string(trim(line.substr(1, line.size() - 2)));
            ini.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config: expected 'key = value' at " + origin + ":" +
                              std::to_string(lineno));
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("config: empty key at " + origin + ":" + std::to_string(lineno));
        ini.sections_[section][key] = value;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    return parse_double(*v, origin_ + " [" + section + "] " + key);
}

std::uint64_t IniFile::get_u64(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
    if (ec != std::errc{} || ptr != v->data() + v->size())
        throw ConfigError("config: bad unsigned value '" + *v + "' for [" + section + "] " + key);
    return value;
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
    if (ec != std::errc{} || ptr != v->data() + v->size())
        throw ConfigError("config: bad integer value '" + *v + "' for [" + section + "] " + key);
    return value;
}

std::vector<double> IniFile::get_doubles(const std::string& section, const std::string& key) const {
    const auto v = get(section, key);
    if (!v) return {};
    std::vector<double> out;
    std::string_view rest = *v;
    while (true) {
        rest = trim(rest);
        if (rest.empty()) break;
        std::size_t cut = rest.find_first_of(", \t");
        const std::string_view tok = cut == std::string_view::npos ? rest : rest.substr(0, cut);
        out.push_back(parse_double(tok, origin_ + " [" + section + "] " + key));
        rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut + 1);
    }
    return out;
}

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.config_hash = fnv1a_hex(canonical_config_text(cfg));
    return cfg;
}

namespace {

const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"arm", {"m1", "m2", "I1", "I2", "l1", "l2", "lc1", "lc2", "H", "g", "F"}},
    {"sampler",
     {"coeff_min", "coeff_max", "t_min", "t_max", "rho", "qa", "qb", "seed", "max_retries"}},
    {"quadrature", {"n_grid", "delta0"}},
    {"classifier", {"lambda", "epsilon", "target_abstention"}},
};

void reject_unknown(const IniFile& ini) {
    for (const auto& [section, entries] : ini.sections()) {
        const auto known = kKnownKeys.find(section);
        if (known == kKnownKeys.end())
            throw ConfigError("config: unknown section [" + section + "] in " + ini.origin());
        for (const auto& [key, _] : entries) {
            if (std::find(known->second.begin(), known->second.end(), key) == known->second.end())
                throw ConfigError("config: unknown key '" + key + "' in [" + section + "] of " +
                                  ini.origin());
        }
    }
}

Eigen::Vector2d get_vec2(const IniFile& ini, const std::string& section, const std::string& key,
                         const Eigen::Vector2d& fallback) {
    const auto v = ini.get_doubles(section, key);
    if (v.empty()) return fallback;
    if (v.size() != 2)
        throw ConfigError("config: [" + section + "] " + key + " needs two values");
    return {v[0], v[1]};
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    if (path.empty()) return default_run_config();

    const IniFile ini = IniFile::parse_file(path);
    reject_unknown(ini);

    RunConfig cfg;
    cfg.arm.m1 = ini.get_double("arm", "m1", cfg.arm.m1);
    cfg.arm.m2 = ini.get_double("arm", "m2", cfg.arm.m2);
    cfg.arm.I1 = ini.get_double("arm", "I1", cfg.arm.I1);
    cfg.arm.I2 = ini.get_double("arm", "I2", cfg.arm.I2);
    cfg.arm.l1 = ini.get_double("arm", "l1", cfg.arm.l1);
    cfg.arm.l2 = ini.get_double("arm", "l2", cfg.arm.l2);
    cfg.arm.lc1 = ini.get_double("arm", "lc1", cfg.arm.lc1);
    cfg.arm.lc2 = ini.get_double("arm", "lc2", cfg.arm.lc2);
    cfg.arm.H = ini.get_double("arm", "H", cfg.arm.H);
    cfg.arm.g = ini.get_double("arm", "g", cfg.arm.g);
    if (ini.has("arm", "F")) {
        const auto f = ini.get_doubles("arm", "F");
        if (f.size() == 1)
            cfg.arm.F = {0.0, -f[0]};  // magnitude means a downward load
        else if (f.size() == 2)
            cfg.arm.F = {f[0], f[1]};
        else
            throw ConfigError("config: [arm] F needs one (downward magnitude) or two values");
    }

    cfg.sampler.coeff_min = ini.get_double("sampler", "coeff_min", cfg.sampler.coeff_min);
    cfg.sampler.coeff_max = ini.get_double("sampler", "coeff_max", cfg.sampler.coeff_max);
    cfg.sampler.T_min = ini.get_double("sampler", "t_min", cfg.sampler.T_min);
    cfg.sampler.T_max = ini.get_double("sampler", "t_max", cfg.sampler.T_max);
    cfg.sampler.rho = ini.get_double("sampler", "rho", cfg.sampler.rho);
    cfg.sampler.qa = get_vec2(ini, "sampler", "qa", cfg.sampler.qa);
    cfg.sampler.qb = get_vec2(ini, "sampler", "qb", cfg.sampler.qb);
    cfg.sampler.max_retries = ini.get_int("sampler", "max_retries", cfg.sampler.max_retries);
    cfg.seed = ini.get_u64("sampler", "seed", cfg.seed);

    cfg.quadrature.n_grid = ini.get_int("quadrature", "n_grid", cfg.quadrature.n_grid);
    cfg.quadrature.delta0 = ini.get_double("quadrature", "delta0", cfg.quadrature.delta0);

    cfg.classifier.lambda = ini.get_double("classifier", "lambda", cfg.classifier.lambda);
    if (ini.has("classifier", "epsilon"))
        cfg.classifier.epsilon = ini.get_double("classifier", "epsilon", 0.0);
    cfg.classifier.target_abstention =
        ini.get_double("classifier", "target_abstention", cfg.classifier.target_abstention);

    try {
        cfg.arm.validate();
        cfg.sampler.validate();
        cfg.quadrature.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: " + std::string(e.what()) + " (from " + path + ")");
    }
    if (!(cfg.classifier.lambda >= 0.0))
        throw ConfigError("config: [classifier] lambda must be >= 0 (from " + path + ")");
    if (!(cfg.classifier.target_abstention >= 0.0 && cfg.classifier.target_abstention < 1.0))
        throw ConfigError("config: [classifier] target_abstention must lie in [0, 1) (from " +
                          path + ")");

    cfg.config_hash = fnv1a_hex(canonical_config_text(cfg));
    return cfg;
}

std::string canonical_config_text(const RunConfig& c) {
    char buf[64];
    std::ostringstream out;
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "[arm]\n"
        << "m1 = " << num(c.arm.m1) << "\nm2 = " << num(c.arm.m2) << "\nI1 = " << num(c.arm.I1)
        << "\nI2 = " << num(c.arm.I2) << "\nl1 = " << num(c.arm.l1) << "\nl2 = " << num(c.arm.l2)
        << "\nlc1 = " << num(c.arm.lc1) << "\nlc2 = " << num(c.arm.lc2)
        << "\nH = " << num(c.arm.H) << "\ng = " << num(c.arm.g) << "\nF = " << num(c.arm.F(0))
        << " " << num(c.arm.F(1)) << "\n"
        << "[sampler]\n"
        << "coeff_min = " << num(c.sampler.coeff_min)
        << "\ncoeff_max = " << num(c.sampler.coeff_max) << "\nt_min = " << num(c.sampler.T_min)
        << "\nt_max = " << num(c.sampler.T_max) << "\nrho = " << num(c.sampler.rho)
        << "\nqa = " << num(c.sampler.qa(0)) << " " << num(c.sampler.qa(1))
        << "\nqb = " << num(c.sampler.qb(0)) << " " << num(c.sampler.qb(1))
        << "\nmax_retries = " << c.sampler.max_retries << "\n"
        << "[quadrature]\n"
        << "n_grid = " << c.quadrature.n_grid << "\ndelta0 = " << num(c.quadrature.delta0) << "\n"
        << "[classifier]\n"
        << "lambda = " << num(c.classifier.lambda) << "\nepsilon = "
        << (c.classifier.epsilon ? num(*c.classifier.epsilon) : std::string("auto"))
        << "\ntarget_abstention = " << num(c.classifier.target_abstention) << "\n";
    return out.str();
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ecd
