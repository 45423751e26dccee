#include "prefia/scheduler.hpp"

#include <algorithm>
#include <numeric>

namespace prefia {

Session::Session(std::vector<ItemId> items, Mode mode, Strategy strategy)
    : items_(std::move(items)),
      mode_(mode),
      strategy_(std::move(strategy)),
      n_(items_.size()) {
  if (n_ < 2) {
    throw Error(ErrorCode::TooFewItems, "a session needs at least two items");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (!index_.emplace(items_[i], i).second) {
      throw Error(ErrorCode::DuplicateItems,
                  "duplicate item in session: " + items_[i].str());
    }
  }
  cells_.assign(n_ * n_, Cell::Unknown);
  for (std::size_t i = 0; i < n_; ++i) cell(i, i) = Cell::Tie;
  class_of_.resize(n_);
  std::iota(class_of_.begin(), class_of_.end(), std::size_t{0});
  undetermined_ = n_ * (n_ - 1) / 2;
  if (const auto* r = std::get_if<RandomStrategy>(&strategy_)) rng_.seed(r->seed);
}

std::size_t Session::index_of(const ItemId& item) const {
  auto it = index_.find(item);
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownPair, "item not in session: " + item.str());
  }
  return it->second;
}

Relation Session::to_relation(Cell c) {
  switch (c) {
    case Cell::Better: return Relation::Left;
    case Cell::Worse: return Relation::Right;
    default: return Relation::Tie;
  }
}

std::optional<Relation> Session::relation_of(const ItemId& a,
                                             const ItemId& b) const {
  const Cell c = cell(index_of(a), index_of(b));
  if (c == Cell::Unknown || a == b) return std::nullopt;
  return to_relation(c);
}

bool Session::set(std::size_t i, std::size_t j, Cell c) {
  if (i == j || cell(i, j) == c) return false;
  if (cell(i, j) != Cell::Unknown) {
    throw InvariantViolation("closure update contradicts a determined pair");
  }
  const Cell inverse =
      c == Cell::Better ? Cell::Worse : c == Cell::Worse ? Cell::Better : c;
  cell(i, j) = c;
  cell(j, i) = inverse;
  --undetermined_;
  return true;
}

std::optional<std::pair<std::size_t, std::size_t>> Session::pick_random() {
  std::vector<std::pair<std::size_t, std::size_t>> open;
  open.reserve(undetermined_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (cell(i, j) == Cell::Unknown) open.emplace_back(i, j);
  if (open.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
  return open[pick(rng_)];
}

std::optional<std::pair<std::size_t, std::size_t>> Session::pick_insertion()
    const {
  // First item with an undetermined pair against an earlier item. Earlier
  // items are then fully ordered among themselves.
  std::optional<std::size_t> target;
  for (std::size_t i = 1; i < n_ && !target; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cell(i, j) == Cell::Unknown) {
        target = i;
        break;
      }
    }
  }
  if (!target) return std::nullopt;
  const std::size_t k = *target;

  // Indifference classes of the placed items, best first.
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t j = 0; j < k; ++j) by_class[class_of_[j]].push_back(j);
  std::vector<std::vector<std::size_t>> order;
  for (auto& [id, members] : by_class) order.push_back(std::move(members));
  auto beaten = [&](const std::vector<std::size_t>& c) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < k; ++j) count += cell(c.front(), j) == Cell::Better;
    return count;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](const auto& a, const auto& b) { return beaten(a) > beaten(b); });

  // The classes still undetermined against k form a contiguous window.
  std::size_t lo = order.size();
  std::size_t hi = 0;
  for (std::size_t c = 0; c < order.size(); ++c) {
    if (cell(k, order[c].front()) == Cell::Unknown) {
      lo = std::min(lo, c);
      hi = c + 1;
    }
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  const std::size_t rep = order[mid].front();
  return std::pair{std::min(rep, k), std::max(rep, k)};
}

std::optional<ItemPair> Session::next_pair() {
  if (pending_ && cell(pending_->first, pending_->second) != Cell::Unknown) {
    pending_.reset();
  }
  if (!pending_) {
    pending_ = std::holds_alternative<RandomStrategy>(strategy_)
                   ? pick_random()
                   : pick_insertion();
  }
  if (!pending_) return std::nullopt;
  return ItemPair(items_[pending_->first], items_[pending_->second]);
}

std::vector<PairRelation> Session::record(const ItemId& left,
                                          const ItemId& right, Relation rel) {
  if (left == right) {
    throw Error(ErrorCode::UnknownPair,
                "a pair needs two distinct items: " + left.str());
  }
  const std::size_t a = index_of(left);
  const std::size_t b = index_of(right);
  if (cell(a, b) != Cell::Unknown) {
    throw Error(ErrorCode::PairAlreadyDetermined,
                "pair already determined: " + to_string(ItemPair(left, right)));
  }
  if (rel == Relation::Tie && mode_ == Mode::Strict) {
    throw Error(ErrorCode::TieInStrictMode, "ties are not allowed in strict mode");
  }

  std::vector<std::pair<std::size_t, std::size_t>> changed;
  auto mark = [&](std::size_t i, std::size_t j, Cell c) {
    if (set(i, j, c)) changed.emplace_back(std::min(i, j), std::max(i, j));
  };
  auto members = [&](std::size_t x) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_; ++i)
      if (class_of_[i] == class_of_[x]) out.push_back(i);
    return out;
  };

  if (rel == Relation::Tie) {
    // Merge the two classes; everything above either is above the union,
    // everything below either is below it.
    auto merged = members(a);
    auto other = members(b);
    merged.insert(merged.end(), other.begin(), other.end());
    std::vector<std::size_t> above, below;
    for (std::size_t x = 0; x < n_; ++x) {
      if (cell(x, a) == Cell::Better || cell(x, b) == Cell::Better) above.push_back(x);
      if (cell(x, a) == Cell::Worse || cell(x, b) == Cell::Worse) below.push_back(x);
    }
    for (std::size_t u : merged)
      for (std::size_t v : merged) mark(u, v, Cell::Tie);
    for (std::size_t p : above) {
      for (std::size_t c : merged) mark(p, c, Cell::Better);
      for (std::size_t s : below) mark(p, s, Cell::Better);
    }
    for (std::size_t c : merged)
      for (std::size_t s : below) mark(c, s, Cell::Better);
    const std::size_t keep = std::min(class_of_[a], class_of_[b]);
    const std::size_t drop = std::max(class_of_[a], class_of_[b]);
    for (auto& c : class_of_)
      if (c == drop) c = keep;
  } else {
    const std::size_t win = rel == Relation::Left ? a : b;
    const std::size_t lose = rel == Relation::Left ? b : a;
    std::vector<std::size_t> top = members(win), bottom = members(lose);
    for (std::size_t x = 0; x < n_; ++x) {
      if (cell(x, win) == Cell::Better) top.push_back(x);
      if (cell(x, lose) == Cell::Worse) bottom.push_back(x);
    }
    for (std::size_t p : top)
      for (std::size_t s : bottom) mark(p, s, Cell::Better);
  }

  const ItemPair asked_pair(left, right);
  const PairRelation asked{asked_pair,
                           asked_pair.first() == left ? rel : flip(rel)};
  asked_.push_back(asked);
  log_.emplace_back(asked, JudgmentSource::Asked);

  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  std::vector<PairRelation> newly;
  for (auto [i, j] : changed) {
    if ((i == a && j == b) || (i == b && j == a)) continue;
    ItemPair key(items_[i], items_[j]);
    const std::size_t f = key.first() == items_[i] ? i : j;
    const std::size_t s = f == i ? j : i;
    newly.push_back({key, to_relation(cell(f, s))});
  }
  for (const auto& pr : newly) {
    inferred_.push_back(pr);
    log_.emplace_back(pr, JudgmentSource::Inferred);
  }

  pending_.reset();
  check_invariants();
  return newly;
}

void Session::check_invariants() const {
  std::size_t unknown = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const Cell c = cell(i, j);
      const Cell back = cell(j, i);
      const bool consistent =
          (c == Cell::Unknown && back == Cell::Unknown) ||
          (c == Cell::Tie && back == Cell::Tie) ||
          (c == Cell::Better && back == Cell::Worse) ||
          (c == Cell::Worse && back == Cell::Better);
      if (!consistent || ((c == Cell::Tie) != (class_of_[i] == class_of_[j]))) {
        throw InvariantViolation("session closure table is inconsistent");
      }
      if (i < j && c == Cell::Unknown) ++unknown;
    }
  }
  if (unknown != undetermined_) {
    throw InvariantViolation("undetermined pair count drifted");
  }
}

std::vector<std::vector<ItemId>> Session::classes() const {
  std::map<std::size_t, std::vector<ItemId>> by_class;
  for (std::size_t i = 0; i < n_; ++i) by_class[class_of_[i]].push_back(items_[i]);
  std::vector<std::vector<ItemId>> out;
  for (auto& [id, members] : by_class) out.push_back(std::move(members));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Session::strict_dag() const {
  std::map<std::size_t, std::size_t> position;
  for (std::size_t i = 0; i < n_; ++i) position.emplace(class_of_[i], position.size());
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n_; ++i) {
    if (class_of_[i] != i) continue;
    for (std::size_t j = 0; j < n_; ++j) {
      if (class_of_[j] == j && cell(i, j) == Cell::Better) {
        edges.emplace_back(position.at(i), position.at(j));
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

PreferenceRelation Session::final_relation() const {
  if (status() != SessionStatus::Done) {
    throw Error(ErrorCode::SessionNotDone,
                std::to_string(undetermined_) + " pair(s) still undetermined");
  }
  PreferenceRelation relation(std::set<ItemId>(items_.begin(), items_.end()));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      relation.insert(items_[i], items_[j], to_relation(cell(i, j)));
  return relation;
}

SessionStats Session::stats() const {
  SessionStats s;
  s.n_items = n_;
  s.pairs_total = n_ * (n_ - 1) / 2;
  s.pairs_asked = asked_.size();
  s.pairs_inferred = inferred_.size();
  s.savings_ratio = static_cast<double>(s.pairs_inferred) /
                    static_cast<double>(s.pairs_total);
  return s;
}

std::vector<Judgment> Session::transcript(const AnnotatorId& annotator,
                                          const Criterion& criterion) const {
  std::vector<Judgment> out;
  out.reserve(log_.size());
  for (const auto& [pr, source] : log_) {
    out.push_back(Judgment{annotator, criterion, pr.pair.first(),
                           pr.pair.second(), pr.relation, std::nullopt, source});
  }
  return out;
}

}  // namespace prefia

namespace prefia {

SimulationResult simulate_session(const GroundTruth& truth, Mode mode,
                                  Strategy strategy) {
  std::vector<ItemId> items;
  std::map<ItemId, std::int64_t> score;
  for (const auto& [item, s] : truth) {
    items.push_back(item);
    score.emplace(item, s);
  }
  auto answer = [&](const ItemId& a, const ItemId& b) {
    const auto sa = score.at(a), sb = score.at(b);
    return sa > sb ? Relation::Left : sa < sb ? Relation::Right : Relation::Tie;
  };

  SimulationResult result{Session(std::move(items), mode, std::move(strategy))};
  Session& session = result.session;
  const std::size_t limit = session.stats().pairs_total;
  for (std::size_t step = 0; step <= limit; ++step) {
    auto pair = session.next_pair();
    if (!pair) break;
    session.record(pair->first(), pair->second(),
                   answer(pair->first(), pair->second()));
  }
  if (session.status() != SessionStatus::Done) {
    throw InvariantViolation("simulated session did not terminate");
  }

  const PreferenceRelation relation = session.final_relation();
  result.matches_ground_truth = true;
  for (const auto& [key, rel] : relation.pairs()) {
    if (rel != answer(key.first(), key.second())) {
      result.matches_ground_truth = false;
    }
  }
  return result;
}

}  // namespace prefia
