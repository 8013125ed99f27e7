#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include <json.hpp>

#include "fatigue/error.hpp"
#include "fatigue/signal.hpp"
#include "text_util.hpp"

namespace fatigue {

namespace {

using nlohmann::json;

constexpr std::string_view kTimeColumn = "t";

struct Line {
  std::string_view text;
  std::size_t number;  // 1-based line number in the input
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, number});
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view cell, std::size_t row, std::string_view column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw DecodeError("row " + std::to_string(row) + ": column '" + std::string(column) +
                      "' is not a number: '" + std::string(cell) + "'");
  }
  return v;
}

void check_order(const std::vector<SignalFrame>& frames, const SignalFrame& next, std::size_t row) {
  if (!frames.empty() && !(next.t() > frames.back().t())) throw MonotonicityError(row);
}

std::vector<SignalFrame> parse_csv(std::string_view text) {
  std::vector<SignalFrame> frames;
  auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && blank(lines[i].text)) ++i;
  if (i == lines.size()) return frames;

  // Column index -> channel; nullopt marks the time column.
  std::vector<std::optional<Channel>> columns;
  bool has_time = false;
  std::vector<std::string> seen;
  for (auto name : text_util::split(lines[i].text, ',')) {
    name = trim(name);
    for (const auto& s : seen) {
      if (s == name) throw DecodeError("duplicate column '" + std::string(name) + "'");
    }
    seen.emplace_back(name);
    if (name == kTimeColumn) {
      has_time = true;
      columns.emplace_back(std::nullopt);
    } else if (auto c = channel_from_name(name)) {
      columns.emplace_back(c);
    } else {
      throw DecodeError("unknown column '" + std::string(name) + "'");
    }
  }
  if (!has_time) throw DecodeError("missing time column 't'");

  std::size_t row = 0;
  for (++i; i < lines.size(); ++i) {
    if (blank(lines[i].text)) continue;
    ++row;
    auto cells = text_util::split(lines[i].text, ',');
    if (cells.size() != columns.size()) {
      throw DecodeError("row " + std::to_string(row) + ": expected " + std::to_string(columns.size()) +
                        " cells, found " + std::to_string(cells.size()));
    }
    SignalFrame f;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto cell = trim(cells[c]);
      if (!columns[c]) {
        if (cell.empty()) throw RangeError("t", row, "time cell is empty");
        f.set_t(parse_number(cell, row, kTimeColumn));
      } else if (!cell.empty()) {
        f.set(*columns[c], parse_number(cell, row, channel_name(*columns[c])));
      }
    }
    validate_frame(f, row);
    check_order(frames, f, row);
    frames.push_back(f);
  }
  return frames;
}

std::vector<SignalFrame> parse_jsonl(std::string_view text) {
  std::vector<SignalFrame> frames;
  std::size_t row = 0;
  for (const auto& line : split_lines(text)) {
    if (blank(line.text)) continue;
    ++row;
    json obj;
    try {
      obj = json::parse(line.text);
    } catch (const json::parse_error& e) {
      throw DecodeError("line " + std::to_string(line.number) + ": " + e.what());
    }
    if (!obj.is_object()) throw DecodeError("line " + std::to_string(line.number) + ": not a JSON object");
    SignalFrame f;
    bool has_time = false;
    for (const auto& [key, value] : obj.items()) {
      if (value.is_null()) {
        if (key == kTimeColumn) throw RangeError("t", row, "time is null");
        continue;
      }
      if (!value.is_number()) {
        throw DecodeError("line " + std::to_string(line.number) + ": key '" + key + "' is not a number");
      }
      const double v = value.get<double>();
      if (key == kTimeColumn) {
        has_time = true;
        f.set_t(v);
      } else if (auto c = channel_from_name(key)) {
        f.set(*c, v);
      } else {
        throw DecodeError("line " + std::to_string(line.number) + ": unknown key '" + key + "'");
      }
    }
    if (!has_time) throw DecodeError("line " + std::to_string(line.number) + ": missing 't'");
    validate_frame(f, row);
    check_order(frames, f, row);
    frames.push_back(f);
  }
  return frames;
}

}  // namespace

std::vector<SignalFrame> parse_trace(std::string_view bytes, TraceFormat format) {
  if (!text_util::valid_utf8(bytes)) throw DecodeError("input is not valid UTF-8");
  if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
  return format == TraceFormat::csv ? parse_csv(bytes) : parse_jsonl(bytes);
}

std::string serialize_trace(std::span<const SignalFrame> frames, TraceFormat format) {
  std::array<bool, kChannelCount> used{};
  for (const auto& f : frames) {
    for (Channel c : kAllChannels) used[static_cast<std::size_t>(c)] |= f.has(c);
  }

  std::string out;
  if (format == TraceFormat::csv) {
    out += kTimeColumn;
    for (Channel c : kAllChannels) {
      if (used[static_cast<std::size_t>(c)]) {
        out += ',';
        out += channel_name(c);
      }
    }
    out += '\n';
    for (const auto& f : frames) {
      out += text_util::format_double(f.t());
      for (Channel c : kAllChannels) {
        if (!used[static_cast<std::size_t>(c)]) continue;
        out += ',';
        if (auto v = f.get(c)) out += text_util::format_double(*v);
      }
      out += '\n';
    }
    return out;
  }

  for (const auto& f : frames) {
    out += "{\"t\":";
    out += text_util::format_double(f.t());
    for (Channel c : kAllChannels) {
      if (auto v = f.get(c)) {
        out += ",\"";
        out += channel_name(c);
        out += "\":";
        out += text_util::format_double(*v);
      }
    }
    out += "}\n";
  }
  return out;
}

}  // namespace fatigue
