#include "causalflow/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "causalflow/errors.hpp"

namespace causalflow {

namespace {

constexpr char kMagic[4] = {'C', 'F', 'L', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  Reader(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint8_t byte() {
    if (pos_ >= data_.size()) {
      throw Error(ErrorKind::Io, "cli-pipeline", "read_trial_binary", "path",
                  "unexpected end of file: " + path_);
    }
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  const std::string& data_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cli-pipeline", "read_file", "path",
                "cannot open " + path);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cli-pipeline", "write_file", "path",
                "cannot open " + path + " for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw Error(ErrorKind::Io, "cli-pipeline", "write_file", "path",
                "write failed: " + path);
  }
}

void write_trial_binary(const std::string& path, const TrialRecording& trial) {
  trial.validate();
  std::string out;
  const std::size_t n_ch = static_cast<std::size_t>(trial.n_channels());
  const std::size_t n_s = static_cast<std::size_t>(trial.n_samples());
  out.reserve(16 + 8 * n_ch * n_s + n_s);
  out.append(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(n_ch));
  put_u64(out, static_cast<std::uint64_t>(n_s));
  put_f64(out, trial.sample_rate);
  for (std::size_t ch = 0; ch < n_ch; ++ch) {
    for (std::size_t s = 0; s < n_s; ++s) {
      put_f64(out, trial.channels(static_cast<Eigen::Index>(ch),
                                  static_cast<Eigen::Index>(s)));
    }
  }
  for (std::uint8_t tag : trial.tags) out.push_back(static_cast<char>(tag));
  write_text_file(path, out);
}

TrialRecording read_trial_binary(const std::string& path) {
  const std::string data = read_text_file(path);
  if (data.size() < 24 || std::memcmp(data.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::Io, "cli-pipeline", "read_trial_binary", "path",
                "not a CFL1 trial file: " + path);
  }
  Reader r(data, path);
  r.u32();  // magic, already checked
  const std::uint32_t n_ch = r.u32();
  const std::uint64_t n_s = r.u64();
  const double fs = r.f64();
  if (r.remaining() != n_ch * n_s * 8 + n_s) {
    throw Error(ErrorKind::Io, "cli-pipeline", "read_trial_binary", "path",
                "truncated trial file: " + path);
  }
  TrialRecording trial;
  trial.sample_rate = fs;
  trial.channels.resize(static_cast<Eigen::Index>(n_ch),
                        static_cast<Eigen::Index>(n_s));
  for (std::uint32_t ch = 0; ch < n_ch; ++ch) {
    for (std::uint64_t s = 0; s < n_s; ++s) {
      trial.channels(static_cast<Eigen::Index>(ch),
                     static_cast<Eigen::Index>(s)) = r.f64();
    }
  }
  trial.tags.resize(static_cast<std::size_t>(n_s));
  for (std::uint64_t s = 0; s < n_s; ++s) {
    trial.tags[static_cast<std::size_t>(s)] = r.byte();
  }
  for (std::uint32_t ch = 0; ch < n_ch; ++ch) {
    trial.channel_names.push_back("ch" + std::to_string(ch + 1));
  }
  return trial;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, const std::string& context) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Io, "cli-pipeline", "read_csv", "field",
                "cannot parse '" + field + "' in " + context);
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace

void write_trial_csv(const std::string& path, const TrialRecording& trial) {
  trial.validate();
  std::string out;
  for (int ch = 0; ch < trial.n_channels(); ++ch) {
    if (ch) out.push_back(',');
    out += trial.channel_names[static_cast<std::size_t>(ch)];
  }
  out += ",tag\n";
  for (long s = 0; s < trial.n_samples(); ++s) {
    for (int ch = 0; ch < trial.n_channels(); ++ch) {
      if (ch) out.push_back(',');
      out += format_double(trial.channels(ch, s));
    }
    out.push_back(',');
    out += std::to_string(static_cast<int>(trial.tags[static_cast<std::size_t>(s)]));
    out.push_back('\n');
  }
  write_text_file(path, out);
}

TrialRecording read_trial_csv(const std::string& path, double sample_rate) {
  const std::string data = read_text_file(path);
  std::istringstream in(data);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::Io, "cli-pipeline", "read_trial_csv", "path",
                "empty CSV: " + path);
  }
  std::vector<std::string> header = split_csv_line(line);
  bool has_tag = !header.empty() && header.back() == "tag";
  const std::size_t n_ch = header.size() - (has_tag ? 1 : 0);
  if (n_ch == 0) {
    throw Error(ErrorKind::Io, "cli-pipeline", "read_trial_csv", "path",
                "CSV has no channels: " + path);
  }

  std::vector<std::vector<double>> columns(n_ch);
  std::vector<std::uint8_t> tags;
  long row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::Io, "cli-pipeline", "read_trial_csv", "row",
                  "row " + std::to_string(row + 2) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < n_ch; ++c) {
      columns[c].push_back(parse_double(fields[c], path));
    }
    tags.push_back(has_tag ? static_cast<std::uint8_t>(
                                 parse_double(fields.back(), path))
                           : 0);
    ++row;
  }

  TrialRecording trial;
  trial.sample_rate = sample_rate;
  trial.channels.resize(static_cast<Eigen::Index>(n_ch), row);
  for (std::size_t c = 0; c < n_ch; ++c) {
    for (long s = 0; s < row; ++s) {
      trial.channels(static_cast<Eigen::Index>(c), s) =
          columns[c][static_cast<std::size_t>(s)];
    }
    trial.channel_names.push_back(header[c]);
  }
  trial.tags = std::move(tags);
  trial.validate();
  return trial;
}

TrialRecording read_trial(const std::string& path, double csv_sample_rate) {
  const std::string head = read_text_file(path).substr(0, 4);
  if (head.size() == 4 && std::memcmp(head.data(), kMagic, 4) == 0) {
    return read_trial_binary(path);
  }
  if (csv_sample_rate <= 0.0) {
    throw Error(ErrorKind::Config, "cli-pipeline", "read_trial", "sample_rate",
                "CSV input needs an explicit sample rate");
  }
  return read_trial_csv(path, csv_sample_rate);
}

void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows,
                    bool bits) {
  std::string out = "pair,measure,tag,window_index,window_time_ms,";
  out += bits ? "rate_bits" : "rate_nats";
  out.push_back('\n');
  const double unit = bits ? 1.4426950408889634074 : 1.0;  // 1/ln 2
  for (const RateRow& row : rows) {
    out += std::to_string(row.x_roi);
    out.push_back(':');
    out += std::to_string(row.y_roi);
    out.push_back(',');
    out += to_string(row.measure);
    out.push_back(',');
    out += std::to_string(static_cast<int>(row.tag));
    out.push_back(',');
    out += std::to_string(row.window_index);
    out.push_back(',');
    out += format_double(row.window_time_ms);
    out.push_back(',');
    out += format_double(row.rate_nats * unit);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

std::vector<RateRow> read_rate_csv(const std::string& path) {
  const std::string data = read_text_file(path);
  std::istringstream in(data);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::Io, "cli-pipeline", "read_rate_csv", "path",
                "empty rate CSV: " + path);
  }
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != 6 || header[0] != "pair") {
    throw Error(ErrorKind::Io, "cli-pipeline", "read_rate_csv", "header",
                "unexpected rate CSV header in " + path);
  }
  const bool bits = header[5] == "rate_bits";
  const double unit = bits ? 0.69314718055994530942 : 1.0;  // ln 2

  std::vector<RateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw Error(ErrorKind::Io, "cli-pipeline", "read_rate_csv", "row",
                  "malformed rate CSV row in " + path);
    }
    RateRow row;
    const std::size_t colon = fields[0].find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::Io, "cli-pipeline", "read_rate_csv", "pair",
                  "malformed pair '" + fields[0] + "'");
    }
    row.x_roi = static_cast<int>(parse_double(fields[0].substr(0, colon), path));
    row.y_roi = static_cast<int>(parse_double(fields[0].substr(colon + 1), path));
    row.measure = measure_from_string(fields[1]);
    row.tag = static_cast<std::uint8_t>(parse_double(fields[2], path));
    row.window_index = static_cast<long>(parse_double(fields[3], path));
    row.window_time_ms = parse_double(fields[4], path);
    row.rate_nats = parse_double(fields[5], path) * unit;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace causalflow
