#include "dqc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dqc::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  // Write-then-rename so partially written artifacts never shadow good ones.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot open " + tmp.string() + " for writing");
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  return nlohmann::json::parse(read_text_file(path));
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const Spectrum& spectrum) {
  std::string out = "re,im\n";
  for (const Complex& v : spectrum.eigenvalues) {
    out += format_double(v.real());
    out += ',';
    out += format_double(v.imag());
    out += '\n';
  }
  write_text_file(path, out);
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("re,im", 0) != 0) {
    throw Error("spectrum CSV must start with a re,im header: " +
                path.string());
  }
  Spectrum out;
  out.source_label = path.filename().string();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error("malformed spectrum row at line " + std::to_string(line_no));
    }
    try {
      const double re = std::stod(line.substr(0, comma));
      const double im = std::stod(line.substr(comma + 1));
      out.eigenvalues.emplace_back(re, im);
    } catch (const std::exception&) {
      throw Error("malformed spectrum row at line " + std::to_string(line_no));
    }
  }
  return out;
}

void write_marginal_csv(const std::filesystem::path& path, const Marginal& m) {
  std::string out = "bin_left,bin_right,density\n";
  for (std::size_t b = 0; b + 1 < m.edges.size(); ++b) {
    out += format_double(m.edges[b]);
    out += ',';
    out += format_double(m.edges[b + 1]);
    out += ',';
    out += format_double(m.density[b]);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_histogram_csv(const std::filesystem::path& path,
                         const CsrHistogram& hist) {
  std::string out = "re_left,re_right,im_left,im_right,density\n";
  const int bins = hist.bins;
  const double width = 2.0 / bins;
  for (int iy = 0; iy < bins; ++iy) {
    for (int ix = 0; ix < bins; ++ix) {
      out += format_double(-1.0 + ix * width);
      out += ',';
      out += format_double(-1.0 + (ix + 1) * width);
      out += ',';
      out += format_double(-1.0 + iy * width);
      out += ',';
      out += format_double(-1.0 + (iy + 1) * width);
      out += ',';
      out += format_double(hist.density[static_cast<std::size_t>(iy) * bins + ix]);
      out += '\n';
    }
  }
  write_text_file(path, out);
}

}  // namespace dqc::io
