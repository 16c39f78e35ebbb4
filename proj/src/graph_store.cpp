#include "cmcs/graph_store.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace cmcs {

namespace {

constexpr std::array<double, kNumLevels> kTrustValues = {0.5, 1.0, 2.0, 3.0};
constexpr std::array<std::string_view, kNumLevels> kLevelNames = {"observer", "apprentice",
                                                                  "journeyer", "master"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Calls fn(line_number, line) for every line, stripping '\r'.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    fn(line_no, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = line.find(sep);
    out.push_back(line.substr(0, p));
    if (p == std::string_view::npos) break;
    line.remove_prefix(p + 1);
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  // std::from_chars for double is available in libstdc++ 11.
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<Neighbor>::iterator find_neighbor(std::vector<Neighbor>& v, NodeIndex n) {
  return std::lower_bound(v.begin(), v.end(), n,
                          [](const Neighbor& a, NodeIndex b) { return a.node < b; });
}

void upsert(std::vector<Neighbor>& v, NodeIndex n, TrustLevel level) {
  auto it = find_neighbor(v, n);
  if (it != v.end() && it->node == n) {
    it->level = level;
  } else {
    v.insert(it, Neighbor{n, level});
  }
}

}  // namespace

std::array<double, kNumLevels> one_hot(TrustLevel level) {
  std::array<double, kNumLevels> v{};
  v[level_index(level)] = 1.0;
  return v;
}

double trust_value(TrustLevel level) { return kTrustValues[level_index(level)]; }

std::string_view level_name(TrustLevel level) { return kLevelNames[level_index(level)]; }

std::optional<TrustLevel> parse_level(std::string_view token) {
  token = trim(token);
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t i = 0; i < kNumLevels; ++i) {
    if (lower == kLevelNames[i]) return level_from_index(i);
  }
  return std::nullopt;
}

NodeIndex TrustGraph::add_node(std::string_view id) {
  std::string key(id);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto idx = static_cast<NodeIndex>(ids_.size());
  ids_.push_back(key);
  index_.emplace(std::move(key), idx);
  out_.emplace_back();
  in_.emplace_back();
  return idx;
}

bool TrustGraph::set_edge(NodeIndex src, NodeIndex dst, TrustLevel level) {
  if (src >= num_nodes() || dst >= num_nodes()) throw std::out_of_range("set_edge: unknown node");
  if (src == dst) return false;
  if (!has_edge(src, dst)) ++edge_count_;
  upsert(out_[src], dst, level);
  upsert(in_[dst], src, level);
  return true;
}

std::optional<NodeIndex> TrustGraph::find(std::string_view id) const {
  if (auto it = index_.find(std::string(id)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::optional<TrustLevel> TrustGraph::level(NodeIndex src, NodeIndex dst) const {
  if (src >= num_nodes() || dst >= num_nodes()) return std::nullopt;
  const auto& v = out_[src];
  auto it = std::lower_bound(v.begin(), v.end(), dst,
                             [](const Neighbor& a, NodeIndex b) { return a.node < b; });
  if (it != v.end() && it->node == dst) return it->level;
  return std::nullopt;
}

std::vector<TrustEdge> TrustGraph::edges() const {
  std::vector<TrustEdge> out;
  out.reserve(edge_count_);
  for (NodeIndex u = 0; u < num_nodes(); ++u) {
    for (const auto& n : out_[u]) out.push_back({u, n.node, n.level});
  }
  return out;
}

TrustGraph TrustGraph::with_edges(std::span<const TrustEdge> edges) const {
  TrustGraph g;
  g.ids_ = ids_;
  g.index_ = index_;
  g.out_.assign(ids_.size(), {});
  g.in_.assign(ids_.size(), {});
  for (const auto& e : edges) g.set_edge(e.src, e.dst, e.level);
  return g;
}

void TrustGraph::validate() const {
  std::size_t out_total = 0, in_total = 0;
  for (NodeIndex u = 0; u < num_nodes(); ++u) {
    out_total += out_[u].size();
    in_total += in_[u].size();
    for (const auto& n : out_[u]) {
      if (n.node == u) throw std::logic_error("self-loop at " + ids_[u]);
      const auto& back = in_[n.node];
      auto it = std::lower_bound(back.begin(), back.end(), u,
                                 [](const Neighbor& a, NodeIndex b) { return a.node < b; });
      if (it == back.end() || it->node != u || it->level != n.level) {
        throw std::logic_error("in/out index mismatch at " + ids_[u]);
      }
    }
  }
  if (out_total != edge_count_ || in_total != edge_count_) {
    throw std::logic_error("edge count mismatch");
  }
}

bool operator==(const TrustGraph& a, const TrustGraph& b) {
  if (a.ids_ != b.ids_ || a.edge_count_ != b.edge_count_) return false;
  return a.edges() == b.edges();
}

LoadedGraph parse_trust_graph(std::string_view text) {
  LoadedGraph out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    ++out.report.lines;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == '%') return;
    auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError("expected src<TAB>dst<TAB>level", line_no);
    const auto src = trim(fields[0]);
    const auto dst = trim(fields[1]);
    if (src.empty() || dst.empty()) throw ParseError("empty node id", line_no);
    const auto level = parse_level(fields[2]);
    if (!level) throw ParseError("unknown trust level '" + std::string(trim(fields[2])) + "'", line_no);
    if (src == dst) {
      ++out.report.self_loops_dropped;
      return;
    }
    const auto s = out.graph.add_node(src);
    const auto d = out.graph.add_node(dst);
    if (out.graph.has_edge(s, d)) ++out.report.duplicates_replaced;
    out.graph.set_edge(s, d, *level);
  });
  return out;
}

LoadedGraph load_trust_graph(const std::filesystem::path& path) {
  return parse_trust_graph(read_file(path));
}

void save_trust_graph(const TrustGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& e : g.edges()) {
    out << g.node_id(e.src) << '\t' << g.node_id(e.dst) << '\t' << level_name(e.level) << '\n';
  }
}

GraphStats graph_stats(const TrustGraph& g) {
  GraphStats s;
  s.nodes = g.num_nodes();
  s.edges = g.num_edges();
  if (s.nodes > 1) {
    s.density = static_cast<double>(s.edges) /
                (static_cast<double>(s.nodes) * static_cast<double>(s.nodes - 1));
  }
  if (s.nodes > 0) s.average_degree = static_cast<double>(s.edges) / static_cast<double>(s.nodes);
  return s;
}

EdgeSplit split_edges(const TrustGraph& g, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  auto all = g.edges();
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(all.size())));
  EdgeSplit split;
  split.seed = seed;
  split.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end());
  return split;
}

std::optional<TimePoint> parse_iso8601(std::string_view s) {
  s = trim(s);
  if (s.size() < 19) return std::nullopt;
  int y, mo, d, h, mi, se;
  auto num = [&](std::size_t pos, std::size_t len, int& out) {
    return parse_int(s.substr(pos, len), out);
  };
  if (!num(0, 4, y) || s[4] != '-' || !num(5, 2, mo) || s[7] != '-' || !num(8, 2, d) ||
      (s[10] != 'T' && s[10] != ' ') || !num(11, 2, h) || s[13] != ':' || !num(14, 2, mi) ||
      s[16] != ':' || !num(17, 2, se)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(mo)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const auto start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) return std::nullopt;
  }
  int offset_min = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      ++pos;
    } else if ((s[pos] == '+' || s[pos] == '-') && s.size() - pos == 6 && s[pos + 3] == ':') {
      int oh, om;
      if (!num(pos + 1, 2, oh) || !num(pos + 4, 2, om)) return std::nullopt;
      offset_min = (s[pos] == '+' ? 1 : -1) * (oh * 60 + om);
      pos = s.size();
    } else {
      return std::nullopt;
    }
  }
  using namespace std::chrono;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se} - minutes{offset_min};
}

std::string format_iso8601(TimePoint t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), long(hms.hours().count()),
                long(hms.minutes().count()), long(hms.seconds().count()));
  return buf;
}

CheckInLoad parse_checkins(std::string_view text) {
  CheckInLoad out;
  bool header_seen = false;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty()) return;
    auto f = split(line, ',');
    if (!header_seen) {
      if (f.size() != 4 || trim(f[0]) != "user_id" || trim(f[1]) != "timestamp" ||
          trim(f[2]) != "lat" || trim(f[3]) != "lon") {
        throw ParseError("expected header user_id,timestamp,lat,lon", line_no);
      }
      header_seen = true;
      return;
    }
    if (f.size() != 4) throw ParseError("expected 4 columns", line_no);
    const auto t = parse_iso8601(f[1]);
    if (!t) throw ParseError("malformed timestamp '" + std::string(trim(f[1])) + "'", line_no);
    CheckIn c;
    c.user = std::string(trim(f[0]));
    c.time = *t;
    if (!parse_double(f[2], c.lat) || !parse_double(f[3], c.lon) ||
        !valid_coordinates(c.loc())) {
      ++out.dropped_invalid_coordinates;
      return;
    }
    out.rows.push_back(std::move(c));
  });
  if (!header_seen) throw ParseError("missing header", 1);
  return out;
}

CheckInLoad load_checkins(const std::filesystem::path& path) { return parse_checkins(read_file(path)); }

std::map<std::string, WorkerHistory> worker_history(std::span<const CheckIn> checkins) {
  std::vector<const CheckIn*> order;
  order.reserve(checkins.size());
  for (const auto& c : checkins) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const CheckIn* a, const CheckIn* b) {
    if (a->user != b->user) return a->user < b->user;
    return a->time < b->time;
  });
  std::map<std::string, WorkerHistory> out;
  const CheckIn* prev = nullptr;
  for (const CheckIn* c : order) {
    auto& h = out[c->user];
    if (prev && prev->user == c->user) h.len_km += haversine_km(prev->loc(), c->loc());
    ++h.num;
    prev = c;
  }
  return out;
}

}  // namespace cmcs
