#include "tacf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

namespace tacf {

std::vector<Column> LogFormat::parse_columns(const std::string& text) {
  std::vector<Column> columns;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view name = rest.substr(0, comma);
    if (name == "user") {
      columns.push_back(Column::User);
    } else if (name == "item") {
      columns.push_back(Column::Item);
    } else if (name == "timestamp") {
      columns.push_back(Column::Timestamp);
    } else {
      throw std::invalid_argument("unknown column '" + std::string(name) + "'");
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  auto sorted = columns;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != std::vector<Column>{Column::User, Column::Item, Column::Timestamp}) {
    throw std::invalid_argument("columns must name user, item and timestamp exactly once");
  }
  return columns;
}

namespace {

bool parse_line(std::string_view line, const LogFormat& format, RatingEvent& out) {
  std::string_view fields[3];
  std::size_t n = 0;
  while (true) {
    const auto pos = line.find(format.delimiter);
    if (n == 3) return false;
    fields[n++] = line.substr(0, pos);
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  if (n != 3) return false;

  for (std::size_t k = 0; k < 3; ++k) {
    const auto field = fields[k];
    switch (format.columns[k]) {
      case Column::User:
        out.user.assign(field);
        break;
      case Column::Item:
        out.item.assign(field);
        break;
      case Column::Timestamp: {
        Seconds value = 0;
        const auto* end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, value);
        if (field.empty() || ec != std::errc{} || ptr != end || value < 0) return false;
        out.timestamp = value;
        break;
      }
    }
  }
  return !out.user.empty() && !out.item.empty();
}

}  // namespace

ParseResult parse_events(std::istream& in, const LogFormat& format) {
  if (format.columns.size() != 3) throw std::invalid_argument("log format needs exactly three columns");
  ParseResult result;
  std::string line;
  RatingEvent event;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (parse_line(line, format, event)) {
      result.events.push_back(event);
    } else {
      ++result.skipped;
    }
  }
  if (in.bad()) throw std::ios_base::failure("error while reading event log");
  return result;
}

ParseResult parse_events_file(const std::string& path, const LogFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open event log '" + path + "'");
  return parse_events(in, format);
}

void write_events(std::ostream& out, std::span<const RatingEvent> events, char delimiter) {
  for (const auto& e : events) {
    out << e.user << delimiter << e.item << delimiter << e.timestamp << '\n';
  }
}

std::size_t Dataset::rating_count() const {
  std::size_t n = 0;
  for (const auto& p : profiles) n += p.size();
  return n;
}

DatasetStats Dataset::stats() const {
  DatasetStats s;
  s.users = user_count();
  s.items = item_count();
  s.ratings = rating_count();
  if (s.users > 0 && s.items > 0) {
    s.sparsity = 1.0 - static_cast<double>(s.ratings) / (static_cast<double>(s.users) * static_cast<double>(s.items));
  }
  return s;
}

namespace {

std::ptrdiff_t find_sorted(const std::vector<std::string>& ids, const std::string& id) {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return -1;
  return it - ids.begin();
}

}  // namespace

std::ptrdiff_t Dataset::find_user(const std::string& id) const { return find_sorted(user_ids, id); }
std::ptrdiff_t Dataset::find_item(const std::string& id) const { return find_sorted(item_ids, id); }

Dataset preprocess(std::span<const RatingEvent> log) {
  // Intern ids in order of first appearance; final indices are assigned later.
  std::unordered_map<std::string_view, std::uint32_t> user_lookup;
  std::unordered_map<std::string_view, std::uint32_t> item_lookup;
  std::vector<std::string_view> user_names;
  std::vector<std::string_view> item_names;
  auto intern = [](auto& lookup, auto& names, std::string_view name) {
    const auto [it, inserted] = lookup.try_emplace(name, static_cast<std::uint32_t>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  };

  // (user, item) -> earliest timestamp
  std::unordered_map<std::uint64_t, Seconds> earliest;
  earliest.reserve(log.size());
  for (const auto& e : log) {
    const std::uint64_t u = intern(user_lookup, user_names, e.user);
    const std::uint64_t i = intern(item_lookup, item_names, e.item);
    const auto key = (u << 32) | i;
    const auto [it, inserted] = earliest.try_emplace(key, e.timestamp);
    if (!inserted) it->second = std::min(it->second, e.timestamp);
  }

  struct Pair {
    std::uint32_t user;
    std::uint32_t item;
    Seconds time;
  };
  std::vector<Pair> pairs;
  pairs.reserve(earliest.size());
  for (const auto& [key, time] : earliest) {
    pairs.push_back({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key & 0xffffffffu), time});
  }

  // Drop items with fewer than two distinct users until stable. Pairs are
  // unique, so a user's rating count on an item is its distinct-user count.
  std::vector<std::uint32_t> item_users(item_names.size());
  while (true) {
    std::fill(item_users.begin(), item_users.end(), 0u);
    for (const auto& p : pairs) ++item_users[p.item];
    const auto before = pairs.size();
    std::erase_if(pairs, [&](const Pair& p) { return item_users[p.item] < 2; });
    if (pairs.size() == before) break;
  }
  // A user whose ratings are all gone simply has no pair left.

  std::vector<char> user_alive(user_names.size(), 0);
  std::vector<char> item_alive(item_names.size(), 0);
  for (const auto& p : pairs) {
    user_alive[p.user] = 1;
    item_alive[p.item] = 1;
  }

  auto assign = [](const std::vector<std::string_view>& names, const std::vector<char>& alive,
                   std::vector<std::string>& ids) {
    std::vector<std::uint32_t> order;
    for (std::uint32_t k = 0; k < names.size(); ++k) {
      if (alive[k]) order.push_back(k);
    }
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return names[a] < names[b]; });
    std::vector<std::uint32_t> index(names.size(), 0);
    ids.reserve(order.size());
    for (std::uint32_t k = 0; k < order.size(); ++k) {
      index[order[k]] = k;
      ids.emplace_back(names[order[k]]);
    }
    return index;
  };

  Dataset dataset;
  const auto user_index = assign(user_names, user_alive, dataset.user_ids);
  const auto item_index = assign(item_names, item_alive, dataset.item_ids);

  dataset.profiles.resize(dataset.user_ids.size());
  for (const auto& p : pairs) {
    dataset.profiles[user_index[p.user]].push_back({item_index[p.item], p.time});
  }
  for (auto& profile : dataset.profiles) {
    std::sort(profile.begin(), profile.end(), [](const Rating& a, const Rating& b) {
      return a.time != b.time ? a.time < b.time : a.item < b.item;
    });
  }
  return dataset;
}

RatingLog to_events(const Dataset& dataset) {
  RatingLog log;
  log.reserve(dataset.rating_count());
  for (std::size_t u = 0; u < dataset.profiles.size(); ++u) {
    for (const auto& r : dataset.profiles[u]) {
      log.push_back({dataset.user_ids[u], dataset.item_ids[r.item], r.time});
    }
  }
  return log;
}

std::size_t TrainSet::rating_count() const {
  std::size_t n = 0;
  for (const auto& p : profiles) n += p.size();
  return n;
}

TrainSet full_train_set(const Dataset& dataset) { return {dataset.item_count(), dataset.profiles}; }

Split split_leave_latest(const Dataset& dataset) {
  Split split;
  split.train.item_count = dataset.item_count();
  split.train.profiles.resize(dataset.user_count());
  for (UserIndex u = 0; u < dataset.user_count(); ++u) {
    const auto& profile = dataset.profiles[u];
    if (profile.size() < 2) {
      split.probe.excluded.push_back(u);
      continue;
    }
    // Profiles are already in (time, item) order, so the latest is last.
    const auto& latest = profile.back();
    split.probe.probes.push_back({u, latest.item, latest.time});
    split.train.profiles[u].assign(profile.begin(), profile.end() - 1);
  }
  return split;
}

}  // namespace tacf
