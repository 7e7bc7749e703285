#ifndef ISPD_IO_HPP
#define ISPD_IO_HPP

// Flat-file plumbing: cohort CSV ingestion with strict validation, size
// lists, and the run manifest written next to every output.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ispd/likelihoods.hpp"

namespace ispd {

// Reads a cohort CSV with header dept_id,n_products and exactly one of
// scaled_avg or ispd. Grid values are validated, never snapped; duplicate
// ids and malformed rows are rejected with row diagnostics. n_max defaults
// to the largest n_products.
Cohort read_cohort_csv(const std::filesystem::path& path);

// One integer per line; blank lines and '#' comments are skipped.
std::vector<int> read_sizes_file(const std::filesystem::path& path);

// FNV-1a 64-bit digest of a file, as hex; cheap change detector for the
// manifest.
std::string file_digest(const std::filesystem::path& path);

struct ManifestInput {
    std::string path;
    std::string digest;
};

// Writes manifest.json into dir: command, argv, config, inputs, version.
// Deliberately timestamp-free so reruns are byte-identical.
void write_manifest(const std::filesystem::path& dir,
                    const std::string& command,
                    const std::vector<std::string>& argv,
                    const nlohmann::json& config,
                    const std::vector<ManifestInput>& inputs);

// %.17g rendering used for all numeric CSV output.
std::string format_full(double v);

}  // namespace ispd

#endif
