#pragma once

#include "dqc/csr.hpp"
#include "dqc/liouville.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace dqc::io {

// Shortest round-trip decimal form; keeps artifacts byte-stable across runs.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

// `re,im` rows, one eigenvalue per line.
void write_spectrum_csv(const std::filesystem::path& path,
                        const Spectrum& spectrum);
Spectrum read_spectrum_csv(const std::filesystem::path& path);

// `bin_left,bin_right,density`.
void write_marginal_csv(const std::filesystem::path& path, const Marginal& m);

// `re_left,re_right,im_left,im_right,density`.
void write_histogram_csv(const std::filesystem::path& path,
                         const CsrHistogram& hist);

}  // namespace dqc::io
