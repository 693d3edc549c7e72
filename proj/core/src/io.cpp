#include "gridrecover/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace gridrecover::io {

namespace {

using json = nlohmann::json;

std::string position_message(const std::string& source, std::size_t line, std::size_t column,
                             const std::string& what) {
  std::string out = source;
  if (line > 0) {
    out += ":" + std::to_string(line);
    if (column > 0) out += ":" + std::to_string(column);
  }
  return out + ": " + what;
}

std::string json_number(double x) { return std::isfinite(x) ? format_double(x) : "null"; }

// Line and column of a byte offset (nlohmann reports the offset one past the
// offending character).
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& err) {
    const auto [line, column] = locate(text, err.byte);
    throw ParseError(source, line, column, "invalid JSON");
  }
}

[[noreturn]] void schema_error(const std::string& source, const std::string& path,
                               const std::string& what) {
  throw ParseError(source, 0, 0, (path.empty() ? std::string("/") : path) + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& source,
                   const std::string& path) {
  if (!obj.is_object()) schema_error(source, path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(source, path, std::string("missing key \"") + key + "\"");
  return *it;
}

double number(const json& v, const std::string& source, const std::string& path) {
  if (!v.is_number()) schema_error(source, path, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& source, const std::string& path) {
  if (!v.is_number_integer()) schema_error(source, path, "expected an integer");
  return v.get<int>();
}

Kind parse_kind(const json& v, const std::string& source, const std::string& path) {
  if (v == "dc") return Kind::DC;
  if (v == "ac") return Kind::AC;
  schema_error(source, path, "kind must be \"dc\" or \"ac\"");
}

Eigen::VectorXd vector_of(const json& v, int n, const std::string& source,
                          const std::string& path) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(n)) {
    schema_error(source, path, "expected an array of " + std::to_string(n) + " numbers");
  }
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out(i) = number(v[static_cast<std::size_t>(i)], source, path + "/" + std::to_string(i));
  return out;
}

void append_vector(std::string& out, const Eigen::VectorXd& v) {
  out += "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v(i));
  }
  out += "]";
}

struct CsvField {
  std::string_view text;
  std::size_t column;
};

std::vector<CsvField> split_csv(std::string_view line) {
  std::vector<CsvField> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t stop = comma == std::string_view::npos ? line.size() : comma;
    std::string_view field = line.substr(start, stop - start);
    std::size_t col = start + 1;
    while (!field.empty() && field.front() == ' ') {
      field.remove_prefix(1);
      ++col;
    }
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    out.push_back({field, col});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct CsvLine {
  std::size_t number;
  std::string_view text;
};

std::vector<CsvLine> csv_lines(std::string_view text) {
  std::vector<CsvLine> out;
  std::size_t start = 0, number = 1;
  while (start <= text.size()) {
    std::size_t stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    std::string_view line = text.substr(start, stop - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back({number, line});
    ++number;
    start = stop + 1;
  }
  return out;
}

double parse_double(const CsvField& f, std::size_t line, const std::string& source) {
  double value = 0.0;
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (f.text.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(source, line, f.column, "not a number: \"" + std::string(f.text) + "\"");
  }
  return value;
}

template <typename Int>
Int parse_int(const CsvField& f, std::size_t line, const std::string& source) {
  Int value = 0;
  const char* last = f.text.data() + f.text.size();
  const auto [ptr, ec] = std::from_chars(f.text.data(), last, value);
  if (f.text.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(source, line, f.column, "not an integer: \"" + std::string(f.text) + "\"");
  }
  return value;
}

std::vector<std::string> state_header(Kind kind, int n) {
  std::vector<std::string> out;
  for (int j = 1; j <= n; ++j) {
    const std::string id = std::to_string(j);
    out.push_back("e_" + id);
    if (kind == Kind::AC) out.push_back("f_" + id);
    out.push_back("P_" + id);
    if (kind == Kind::AC) out.push_back("Q_" + id);
  }
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column,
                       const std::string& what)
    : std::runtime_error(position_message(source, line, column, what)), line_(line), column_(column) {}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string network_to_json(const Network& net) {
  std::string out = "{\"kind\":\"" + std::string(to_string(net.kind())) +
                    "\",\"n\":" + std::to_string(net.n()) + ",\"edges\":[";
  bool first = true;
  for (const auto& e : net.edges()) {
    if (!first) out += ",";
    first = false;
    out += "\n  {\"j\":" + std::to_string(e.j) + ",\"k\":" + std::to_string(e.k) +
           ",\"c\":" + format_double(e.c) + ",\"s\":" + format_double(e.s) + "}";
  }
  out += net.edges().empty() ? "]}\n" : "\n]}\n";
  return out;
}

Network network_from_json(std::string_view text, const std::string& source) {
  const json doc = parse_json(text, source);
  const Kind kind = parse_kind(member(doc, "kind", source, ""), source, "/kind");
  const int n = integer(member(doc, "n", source, ""), source, "/n");
  const json& edges = member(doc, "edges", source, "");
  if (!edges.is_array()) schema_error(source, "/edges", "expected an array");
  std::vector<Edge> out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "/edges/" + std::to_string(i);
    const json& e = edges[i];
    Edge edge;
    edge.j = integer(member(e, "j", source, path), source, path + "/j");
    edge.k = integer(member(e, "k", source, path), source, path + "/k");
    edge.c = number(member(e, "c", source, path), source, path + "/c");
    if (e.contains("s")) edge.s = number(e["s"], source, path + "/s");
    out.push_back(edge);
  }
  try {
    return Network(kind, n, std::move(out));
  } catch (const std::invalid_argument& err) {
    schema_error(source, "", err.what());
  }
}

std::string states_to_csv(const StateSet& set) {
  std::string out;
  const auto header = state_header(set.kind(), set.n());
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& x : set.states()) {
    for (int j = 0; j < set.n(); ++j) {
      if (j) out += ",";
      out += format_double(x.e(j));
      if (set.kind() == Kind::AC) out += "," + format_double(x.f(j));
      out += "," + format_double(x.P(j));
      if (set.kind() == Kind::AC) out += "," + format_double(x.Q(j));
    }
    out += "\n";
  }
  return out;
}

StateSet states_from_csv(std::string_view text, const std::string& source) {
  const auto lines = csv_lines(text);
  if (lines.empty()) throw ParseError(source, 1, 1, "empty state file");
  const auto head = split_csv(lines[0].text);
  const Kind kind = head.size() >= 2 && head[1].text == "f_1" ? Kind::AC : Kind::DC;
  const std::size_t per_node = kind == Kind::AC ? 4 : 2;
  if (head.size() % per_node != 0) {
    throw ParseError(source, lines[0].number, 1, "header has " + std::to_string(head.size()) + " columns");
  }
  const int n = static_cast<int>(head.size() / per_node);
  const auto expected = state_header(kind, n);
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (head[i].text != expected[i]) {
      throw ParseError(source, lines[0].number, head[i].column,
                       "expected column \"" + expected[i] + "\", got \"" + std::string(head[i].text) + "\"");
    }
  }
  std::vector<State> states;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv(lines[r].text);
    if (fields.size() != head.size()) {
      throw ParseError(source, lines[r].number, 1,
                       "expected " + std::to_string(head.size()) + " fields, got " + std::to_string(fields.size()));
    }
    State x = State::zeros(n);
    std::size_t c = 0;
    for (int j = 0; j < n; ++j) {
      x.e(j) = parse_double(fields[c++], lines[r].number, source);
      if (kind == Kind::AC) x.f(j) = parse_double(fields[c++], lines[r].number, source);
      x.P(j) = parse_double(fields[c++], lines[r].number, source);
      if (kind == Kind::AC) x.Q(j) = parse_double(fields[c++], lines[r].number, source);
    }
    states.push_back(std::move(x));
  }
  if (states.empty()) throw ParseError(source, lines[0].number + 1, 1, "no state rows");
  return StateSet(kind, n, std::move(states));
}

std::string states_to_json(const StateSet& set) {
  std::string out = "{\"kind\":\"" + std::string(to_string(set.kind())) +
                    "\",\"n\":" + std::to_string(set.n()) + ",\"states\":[";
  for (std::size_t k = 0; k < set.m(); ++k) {
    const State& x = set[k];
    out += k ? ",\n  " : "\n  ";
    out += "{\"e\":";
    append_vector(out, x.e);
    out += ",\"P\":";
    append_vector(out, x.P);
    if (set.kind() == Kind::AC) {
      out += ",\"f\":";
      append_vector(out, x.f);
      out += ",\"Q\":";
      append_vector(out, x.Q);
    }
    out += "}";
  }
  out += "\n]}\n";
  return out;
}

StateSet states_from_json(std::string_view text, const std::string& source) {
  const json doc = parse_json(text, source);
  const Kind kind = parse_kind(member(doc, "kind", source, ""), source, "/kind");
  const int n = integer(member(doc, "n", source, ""), source, "/n");
  if (n < 1) schema_error(source, "/n", "must be positive");
  const json& states = member(doc, "states", source, "");
  if (!states.is_array()) schema_error(source, "/states", "expected an array");
  std::vector<State> out;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::string path = "/states/" + std::to_string(k);
    const json& s = states[k];
    State x = State::zeros(n);
    x.e = vector_of(member(s, "e", source, path), n, source, path + "/e");
    x.P = vector_of(member(s, "P", source, path), n, source, path + "/P");
    if (kind == Kind::AC) {
      x.f = vector_of(member(s, "f", source, path), n, source, path + "/f");
      x.Q = vector_of(member(s, "Q", source, path), n, source, path + "/Q");
    }
    out.push_back(std::move(x));
  }
  try {
    return StateSet(kind, n, std::move(out));
  } catch (const std::invalid_argument& err) {
    schema_error(source, "", err.what());
  }
}

std::string trace_to_csv(const RecoveryTrace& trace) {
  std::string out = "iteration,edges,rms,kappa,epsilon,event\n";
  for (const auto& r : trace) {
    out += std::to_string(r.iteration) + "," + std::to_string(r.edges) + "," + format_double(r.rms) +
           "," + format_double(r.kappa) + "," + format_double(r.epsilon) + "," +
           std::string(to_string(r.event)) + "\n";
  }
  return out;
}

std::string trace_to_json(const RecoveryTrace& trace) {
  std::string out = "[";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    out += i ? ",\n  " : "\n  ";
    out += "{\"iteration\":" + std::to_string(r.iteration) + ",\"edges\":" + std::to_string(r.edges) +
           ",\"rms\":" + json_number(r.rms) + ",\"kappa\":" + json_number(r.kappa) +
           ",\"epsilon\":" + json_number(r.epsilon) + ",\"event\":\"" +
           std::string(to_string(r.event)) + "\"}";
  }
  out += trace.empty() ? "]\n" : "\n]\n";
  return out;
}

RecoveryTrace trace_from_csv(std::string_view text, const std::string& source) {
  const auto lines = csv_lines(text);
  if (lines.empty() || lines[0].text != "iteration,edges,rms,kappa,epsilon,event") {
    throw ParseError(source, 1, 1, "expected header iteration,edges,rms,kappa,epsilon,event");
  }
  RecoveryTrace out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv(lines[i].text);
    const std::size_t ln = lines[i].number;
    if (f.size() != 6) throw ParseError(source, ln, 1, "expected 6 fields");
    TraceRow row;
    row.iteration = parse_int<int>(f[0], ln, source);
    row.edges = parse_int<std::size_t>(f[1], ln, source);
    row.rms = parse_double(f[2], ln, source);
    row.kappa = parse_double(f[3], ln, source);
    row.epsilon = parse_double(f[4], ln, source);
    bool known = false;
    for (Event e : {Event::Initial, Event::Accepted, Event::RejectedRms, Event::NoEdgeReduction}) {
      if (f[5].text == to_string(e)) {
        row.event = e;
        known = true;
      }
    }
    if (!known) throw ParseError(source, ln, f[5].column, "unknown event \"" + std::string(f[5].text) + "\"");
    out.push_back(row);
  }
  return out;
}

std::string render_trace_table(const RecoveryTrace& trace, bool all_rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%9s | %5s | %-11s | %-11s | %-11s\n", "Iteration", "|E|", "rms",
                "kappa", "epsilon");
  out += buf;
  out += std::string(59, '-') + "\n";
  for (const auto& r : trace) {
    if (!all_rows && r.event != Event::Initial && r.event != Event::Accepted) continue;
    std::snprintf(buf, sizeof buf, "%9d | %5zu | %-11.3e | %-11.3e | %-11.3e", r.iteration, r.edges,
                  r.rms, r.kappa, r.epsilon);
    out += buf;
    if (all_rows) out += "  " + std::string(to_string(r.event));
    out += "\n";
  }
  return out;
}

std::string edge_statistics_to_csv(const EdgeStatistics& stats) {
  std::string out = "j,k,weight,r_eff,leverage,p\n";
  for (const auto& e : stats.edges) {
    out += std::to_string(e.edge.j) + "," + std::to_string(e.edge.k) + "," + format_double(e.weight) +
           "," + format_double(e.r_eff) + "," + format_double(e.leverage) + "," + format_double(e.p) + "\n";
  }
  return out;
}

std::string bound_report_to_json(const BoundReport& r) {
  return "{\"variant\":\"" + std::string(to_string(r.variant)) + "\",\"rms_base\":" + json_number(r.rms_base) +
         ",\"epsilon\":" + json_number(r.epsilon) + ",\"bound_term\":" + json_number(r.bound_term) +
         ",\"bound_total\":" + json_number(r.bound_total) + "}\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

StateSet load_states(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") return states_from_json(text, path.string());
  return states_from_csv(text, path.string());
}

Network load_network(const std::filesystem::path& path) {
  return network_from_json(read_file(path), path.string());
}

}  // namespace gridrecover::io
