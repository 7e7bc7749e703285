#include "ispd/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ispd/errors.hpp"

namespace ispd {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, int row, const std::string& col) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw InputError("row " + std::to_string(row) + ", column " + col +
                         ": cannot parse '" + s + "' as a number");
    }
    return v;
}

int parse_int(const std::string& s, int row, const std::string& col) {
    const std::string t = trim(s);
    int v = 0;
    const auto [ptr, ec] =
        std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw InputError("row " + std::to_string(row) + ", column " + col +
                         ": cannot parse '" + s + "' as an integer");
    }
    return v;
}

}  // namespace

Cohort read_cohort_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError(path.string() + ": empty file");
    }
    const auto header = split_csv_line(line);
    if (header.size() != 3 || trim(header[0]) != "dept_id" ||
        trim(header[1]) != "n_products" ||
        (trim(header[2]) != "scaled_avg" && trim(header[2]) != "ispd")) {
        throw InputError(
            path.string() +
            ": header must be dept_id,n_products,scaled_avg or "
            "dept_id,n_products,ispd");
    }
    const bool scaled = trim(header[2]) == "scaled_avg";

    Cohort cohort;
    std::set<std::string> seen;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw InputError("row " + std::to_string(row) + ": expected 3 "
                             "columns, found " +
                             std::to_string(fields.size()));
        }
        DeptRecord rec;
        rec.id = trim(fields[0]);
        if (rec.id.empty()) {
            throw InputError("row " + std::to_string(row) +
                             ": empty dept_id");
        }
        if (!seen.insert(rec.id).second) {
            throw InputError("row " + std::to_string(row) +
                             ": duplicate dept_id '" + rec.id + "'");
        }
        rec.size = parse_int(fields[1], row, "n_products");
        if (rec.size < 2) {
            throw InputError("row " + std::to_string(row) +
                             ": n_products must be >= 2");
        }
        const double v = parse_double(fields[2], row, trim(header[2]));
        if (scaled) {
            rec.obs = ScaledAvg{v};
        } else {
            try {
                IspdGrid::index_of(v);
            } catch (const InputError& e) {
                throw InputError("row " + std::to_string(row) + ": " +
                                 e.what());
            }
            rec.obs = IspdCell{v};
        }
        cohort.n_max = std::max(cohort.n_max, rec.size);
        cohort.records.push_back(std::move(rec));
    }
    if (cohort.records.empty()) {
        throw InputError(path.string() + ": no data rows");
    }
    return cohort;
}

std::vector<int> read_sizes_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<int> sizes;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const int n = parse_int(t, row, "size");
        if (n < 2) {
            throw InputError("row " + std::to_string(row) +
                             ": department size must be >= 2");
        }
        sizes.push_back(n);
    }
    if (sizes.empty()) {
        throw InputError(path.string() + ": no sizes");
    }
    return sizes;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx",
                  static_cast<unsigned long long>(h));
    return out;
}

void write_manifest(const std::filesystem::path& dir,
                    const std::string& command,
                    const std::vector<std::string>& argv,
                    const nlohmann::json& config,
                    const std::vector<ManifestInput>& inputs) {
    nlohmann::json m;
    m["command"] = command;
    m["argv"] = argv;
    m["config"] = config;
    m["inputs"] = nlohmann::json::array();
    for (const auto& i : inputs) {
        m["inputs"].push_back({{"path", i.path}, {"digest_fnv1a64", i.digest}});
    }
    m["version"] = "0.1.0";
    std::ofstream out(dir / "manifest.json");
    if (!out) {
        throw InputError("cannot write manifest in " + dir.string());
    }
    out << m.dump(2) << '\n';
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace ispd
