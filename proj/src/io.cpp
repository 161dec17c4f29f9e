#include "topostat/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "topostat/common.hpp"

namespace topostat {
namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
  fail(ErrorCode::Parse, "ParseError: line " + std::to_string(line_no) + ": " + what);
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

double parse_value(const std::string& token, int line_no) {
  const std::string t = trim(token);
  double value = 0.0;
  const auto result = std::from_chars(t.data(), t.data() + t.size(), value);
  if (result.ec != std::errc{} || result.ptr != t.data() + t.size())
    parse_fail(line_no, "invalid number '" + token + "'");
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::ifstream open_for_reading(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "IoError: cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "IoError: cannot open '" + path + "' for writing");
  return out;
}

std::string operator_tag(const SignalEnsemble& signals) {
  if (signals.operator_kind == OperatorKind::Dirac) return "dirac";
  return "hodge:" + std::to_string(signals.hodge_k);
}

}  // namespace

std::string format_value(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_signals_csv(std::ostream& out, const SignalEnsemble& signals) {
  out << "# operator " << operator_tag(signals) << "\n";
  out << "# offsets ";
  for (size_t i = 0; i < signals.offsets.size(); ++i) {
    if (i) out << ',';
    out << signals.offsets[i];
  }
  out << "\n";
  for (int j = 0; j < signals.cols(); ++j) {
    if (j) out << ',';
    out << 'm' << (j + 1);
  }
  out << "\n";
  for (int i = 0; i < signals.rows(); ++i) {
    for (int j = 0; j < signals.cols(); ++j) {
      if (j) out << ',';
      out << format_value(signals.data(i, j));
    }
    out << "\n";
  }
}

void write_signals_csv(const std::string& path, const SignalEnsemble& signals) {
  auto out = open_for_writing(path);
  write_signals_csv(out, signals);
  if (!out) fail(ErrorCode::Io, "IoError: failed writing '" + path + "'");
}

SignalEnsemble read_signals_csv(std::istream& in) {
  SignalEnsemble signals;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  int cols = 0;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text[0] == '#') {
      std::istringstream ls(text.substr(1));
      std::string key;
      ls >> key;
      if (key == "operator") {
        std::string tag;
        ls >> tag;
        if (tag == "dirac") {
          signals.operator_kind = OperatorKind::Dirac;
        } else if (tag.rfind("hodge:", 0) == 0) {
          signals.operator_kind = OperatorKind::Hodge;
          signals.hodge_k = parse_value(tag.substr(6), line_no);
        } else {
          parse_fail(line_no, "unknown operator tag '" + tag + "'");
        }
      } else if (key == "offsets") {
        std::string rest;
        std::getline(ls, rest);
        signals.offsets.clear();
        for (const auto& token : split(trim(rest), ','))
          signals.offsets.push_back(static_cast<int>(parse_value(token, line_no)));
      }
      continue;
    }
    if (!have_header) {
      const auto names = split(text, ',');
      for (size_t j = 0; j < names.size(); ++j)
        if (trim(names[j]) != "m" + std::to_string(j + 1))
          parse_fail(line_no, "expected header m1,...,mM, got '" + text + "'");
      cols = static_cast<int>(names.size());
      have_header = true;
      continue;
    }
    const auto tokens = split(text, ',');
    if (static_cast<int>(tokens.size()) != cols)
      parse_fail(line_no, "expected " + std::to_string(cols) + " values, got " +
                              std::to_string(tokens.size()));
    std::vector<double> row(cols);
    for (int j = 0; j < cols; ++j) row[j] = parse_value(tokens[j], line_no);
    rows.push_back(std::move(row));
  }
  if (!have_header) parse_fail(line_no, "missing m1,...,mM header");
  if (rows.empty()) parse_fail(line_no, "no signal rows");

  signals.data.resize(static_cast<int>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < cols; ++j) signals.data(static_cast<int>(i), j) = rows[i][j];
  return signals;
}

SignalEnsemble read_signals_csv(const std::string& path) {
  auto in = open_for_reading(path);
  return read_signals_csv(in);
}

void write_indexed_csv(std::ostream& out, const Eigen::VectorXd& values) {
  out << "index,value\n";
  for (int i = 0; i < values.size(); ++i)
    out << i << ',' << format_value(values[i]) << "\n";
}

void write_indexed_csv(const std::string& path, const Eigen::VectorXd& values) {
  auto out = open_for_writing(path);
  write_indexed_csv(out, values);
  if (!out) fail(ErrorCode::Io, "IoError: failed writing '" + path + "'");
}

Eigen::VectorXd read_indexed_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (!have_header) {
      if (text != "index,value") parse_fail(line_no, "expected header 'index,value'");
      have_header = true;
      continue;
    }
    const auto tokens = split(text, ',');
    if (tokens.size() != 2) parse_fail(line_no, "expected 'index,value' pair");
    const int index = static_cast<int>(parse_value(tokens[0], line_no));
    if (index != static_cast<int>(values.size()))
      parse_fail(line_no, "indices must run 0,1,... in order, got " + std::to_string(index));
    values.push_back(parse_value(tokens[1], line_no));
  }
  if (!have_header) parse_fail(line_no, "expected header 'index,value'");
  Eigen::VectorXd out(static_cast<int>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) out[static_cast<int>(i)] = values[i];
  return out;
}

Eigen::VectorXd read_indexed_csv(const std::string& path) {
  auto in = open_for_reading(path);
  return read_indexed_csv(in);
}

std::vector<int> read_mask_indices(std::istream& in) {
  std::vector<int> indices;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const double value = parse_value(text, line_no);
    const int index = static_cast<int>(value);
    if (index != value) parse_fail(line_no, "mask indices must be integers");
    indices.push_back(index);
  }
  return indices;
}

std::vector<int> read_mask_indices(const std::string& path) {
  auto in = open_for_reading(path);
  return read_mask_indices(in);
}

void write_mask_indices(const std::string& path, const std::vector<int>& indices) {
  auto out = open_for_writing(path);
  for (int idx : indices) out << idx << "\n";
  if (!out) fail(ErrorCode::Io, "IoError: failed writing '" + path + "'");
}

std::map<std::string, std::string> read_config(std::istream& in) {
  std::map<std::string, std::string> config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto pos = text.find('=');
    if (pos == std::string::npos) parse_fail(line_no, "expected 'key = value', got '" + text + "'");
    const std::string key = trim(text.substr(0, pos));
    const std::string value = trim(text.substr(pos + 1));
    if (key.empty()) parse_fail(line_no, "empty key");
    config[key] = value;
  }
  return config;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  auto in = open_for_reading(path);
  return read_config(in);
}

}  // namespace topostat
