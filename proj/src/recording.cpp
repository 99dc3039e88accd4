#include "shdc/recording.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "shdc/binary_io.hpp"
#include "shdc/errors.hpp"

#include "json.hpp"

namespace shdc {

namespace {

constexpr char kMagic[4] = {'S', 'H', 'R', 'C'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint32_t kSampleFormatInt16 = 1;

std::int16_t parse_sample(std::string_view field, std::uint64_t row) {
  int value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw data_error("csv row " + std::to_string(row) + ": field '" + std::string(field) +
                     "' is not an integer");
  }
  if (value < -32768 || value > 32767) {
    throw data_error("csv row " + std::to_string(row) + ": sample " + std::to_string(value) +
                     " does not fit int16");
  }
  return static_cast<std::int16_t>(value);
}

std::vector<std::string_view> split_fields(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

Recording::Recording(std::uint32_t num_channels, std::uint32_t sampling_rate,
                     std::uint64_t num_samples)
    : num_channels_(num_channels),
      sampling_rate_(sampling_rate),
      num_samples_(num_samples),
      samples_(static_cast<std::size_t>(num_channels) * num_samples, 0) {}

std::span<const std::int16_t> Recording::channel(std::uint32_t c) const {
  if (c >= num_channels_) {
    throw std::invalid_argument("Recording::channel: index out of range");
  }
  return {samples_.data() + static_cast<std::size_t>(c) * num_samples_,
          static_cast<std::size_t>(num_samples_)};
}

std::vector<Annotation> Recording::seizures() const {
  std::vector<Annotation> out;
  for (const Annotation& a : annotations_) {
    if (a.label == kSeizureLabel) out.push_back(a);
  }
  return out;
}

void Recording::validate() const {
  if (num_channels_ == 0) throw data_error("recording: no channels");
  if (sampling_rate_ == 0) throw data_error("recording: sampling rate is zero");
  if (samples_.size() != static_cast<std::size_t>(num_channels_) * num_samples_) {
    throw data_error("recording: payload size does not match geometry");
  }
  std::map<std::uint32_t, std::uint64_t> last_offset_by_label;
  std::uint64_t last_onset = 0;
  bool first = true;
  for (const Annotation& a : annotations_) {
    if (a.offset_sample <= a.onset_sample) {
      throw data_error("recording: annotation with empty or inverted interval");
    }
    if (a.offset_sample > num_samples_) {
      throw data_error("recording: annotation extends past end of data");
    }
    if (!first && a.onset_sample < last_onset) {
      throw data_error("recording: annotations not sorted by onset");
    }
    auto it = last_offset_by_label.find(a.label);
    if (it != last_offset_by_label.end() && a.onset_sample < it->second) {
      throw data_error("recording: overlapping annotations for label " + std::to_string(a.label));
    }
    last_offset_by_label[a.label] = a.offset_sample;
    last_onset = a.onset_sample;
    first = false;
  }
}

void Recording::save(const std::filesystem::path& path) const {
  validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("cannot open " + path.string() + " for writing");
  io::write_bytes(os, kMagic, 4);
  io::write_u32(os, kFormatVersion);
  io::write_u32(os, num_channels_);
  io::write_u32(os, sampling_rate_);
  io::write_u32(os, kSampleFormatInt16);
  io::write_u64(os, num_samples_);
  io::write_u32(os, static_cast<std::uint32_t>(annotations_.size()));
  for (std::int16_t s : samples_) io::write_i16(os, s);
  for (const Annotation& a : annotations_) {
    io::write_u64(os, a.onset_sample);
    io::write_u64(os, a.offset_sample);
    io::write_u32(os, a.label);
  }
  if (!os) throw data_error("write failed for " + path.string());
}

Recording Recording::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("cannot open " + path.string());
  char magic[4];
  io::read_bytes(is, magic, 4);
  if (!std::equal(magic, magic + 4, kMagic)) {
    throw data_error(path.string() + ": not a recording file");
  }
  const std::uint32_t version = io::read_u32(is);
  if (version != kFormatVersion) {
    throw data_error(path.string() + ": unsupported format version " + std::to_string(version));
  }
  const std::uint32_t num_channels = io::read_u32(is);
  const std::uint32_t sampling_rate = io::read_u32(is);
  const std::uint32_t sample_format = io::read_u32(is);
  if (sample_format != kSampleFormatInt16) {
    throw data_error(path.string() + ": unsupported sample format " +
                     std::to_string(sample_format));
  }
  const std::uint64_t num_samples = io::read_u64(is);
  const std::uint32_t annotation_count = io::read_u32(is);
  if (num_channels == 0 || sampling_rate == 0) {
    throw data_error(path.string() + ": bad geometry");
  }

  Recording rec(num_channels, sampling_rate, num_samples);
  for (std::uint32_t c = 0; c < num_channels; ++c) {
    for (std::uint64_t t = 0; t < num_samples; ++t) {
      rec.set_sample(c, t, io::read_i16(is));
    }
  }
  rec.annotations_.reserve(annotation_count);
  for (std::uint32_t i = 0; i < annotation_count; ++i) {
    Annotation a;
    a.onset_sample = io::read_u64(is);
    a.offset_sample = io::read_u64(is);
    a.label = io::read_u32(is);
    rec.annotations_.push_back(a);
  }
  try {
    rec.validate();
  } catch (const data_error& e) {
    throw data_error(path.string() + ": " + e.what());
  }
  return rec;
}

void Recording::save_csv(const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path) const {
  validate();
  std::ofstream os(csv_path);
  if (!os) throw data_error("cannot open " + csv_path.string() + " for writing");
  for (std::uint32_t c = 0; c < num_channels_; ++c) {
    os << (c == 0 ? "" : ",") << "ch" << c;
  }
  os << '\n';
  for (std::uint64_t t = 0; t < num_samples_; ++t) {
    for (std::uint32_t c = 0; c < num_channels_; ++c) {
      os << (c == 0 ? "" : ",") << sample(c, t);
    }
    os << '\n';
  }
  if (!os) throw data_error("write failed for " + csv_path.string());

  nlohmann::json j;
  j["sampling_rate"] = sampling_rate_;
  nlohmann::json anns = nlohmann::json::array();
  for (const Annotation& a : annotations_) {
    anns.push_back({{"onset_sample", a.onset_sample},
                    {"offset_sample", a.offset_sample},
                    {"label", a.label}});
  }
  j["annotations"] = std::move(anns);
  std::ofstream js(sidecar_path);
  if (!js) throw data_error("cannot open " + sidecar_path.string() + " for writing");
  js << j.dump(2) << '\n';
  if (!js) throw data_error("write failed for " + sidecar_path.string());
}

Recording Recording::load_csv(const std::filesystem::path& csv_path,
                              const std::filesystem::path& sidecar_path,
                              std::uint32_t default_rate) {
  std::ifstream is(csv_path);
  if (!is) throw data_error("cannot open " + csv_path.string());

  // First pass over the lines collects samples time-major; the header row is
  // detected by a non-numeric first field.
  std::vector<std::vector<std::int16_t>> rows;
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t expected_columns = 0;
  std::uint64_t row_index = 0;
  bool first_line = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    split_fields(line, fields);
    if (first_line) {
      first_line = false;
      int probe = 0;
      auto sv = fields[0];
      auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), probe);
      if (ec != std::errc() || ptr != sv.data() + sv.size()) {
        expected_columns = fields.size();
        continue;  // header row
      }
      expected_columns = fields.size();
    }
    if (fields.size() != expected_columns) {
      throw data_error("csv row " + std::to_string(row_index) + ": expected " +
                       std::to_string(expected_columns) + " columns, got " +
                       std::to_string(fields.size()));
    }
    std::vector<std::int16_t> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_sample(f, row_index));
    rows.push_back(std::move(row));
    ++row_index;
  }
  if (rows.empty()) throw data_error(csv_path.string() + ": no sample rows");

  std::uint32_t sampling_rate = default_rate;
  std::vector<Annotation> annotations;
  if (!sidecar_path.empty() && std::filesystem::exists(sidecar_path)) {
    std::ifstream js(sidecar_path);
    nlohmann::json j;
    try {
      js >> j;
    } catch (const nlohmann::json::exception& e) {
      throw data_error(sidecar_path.string() + ": " + e.what());
    }
    if (j.contains("sampling_rate")) sampling_rate = j["sampling_rate"].get<std::uint32_t>();
    for (const auto& entry : j.value("annotations", nlohmann::json::array())) {
      Annotation a;
      a.onset_sample = entry.at("onset_sample").get<std::uint64_t>();
      a.offset_sample = entry.at("offset_sample").get<std::uint64_t>();
      a.label = entry.value("label", kSeizureLabel);
      annotations.push_back(a);
    }
  }

  Recording rec(static_cast<std::uint32_t>(rows.front().size()), sampling_rate,
                static_cast<std::uint64_t>(rows.size()));
  for (std::uint64_t t = 0; t < rec.num_samples(); ++t) {
    for (std::uint32_t c = 0; c < rec.num_channels(); ++c) {
      rec.set_sample(c, t, rows[t][c]);
    }
  }
  rec.annotations_ = std::move(annotations);
  try {
    rec.validate();
  } catch (const data_error& e) {
    throw data_error(csv_path.string() + ": " + e.what());
  }
  return rec;
}

}  // namespace shdc
