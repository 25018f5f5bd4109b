#include "lgw/evaluate.hpp"

#include <algorithm>
#include <set>

#include "lgw/error.hpp"
#include "lgw/parallel.hpp"

namespace lgw {

RankedList rank_database(const Signature& query,
                         const std::vector<Signature>& database) {
  if (database.empty()) {
    fail("ranking requested against an empty database");
  }
  RankedList ranked;
  ranked.query_id = query.image_id;
  ranked.entries.reserve(database.size());
  for (const Signature& s : database) {
    ranked.entries.emplace_back(s.image_id, l1_distance(query, s));
  }
  std::sort(ranked.entries.begin(), ranked.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second < b.second;
              return a.first < b.first;
            });
  return ranked;
}

double average_precision(const RankedList& ranked,
                         const std::vector<std::string>& relevant) {
  if (relevant.empty()) {
    fail("average precision of query '", ranked.query_id,
         "' needs a non-empty relevant set");
  }
  const std::set<std::string> rel(relevant.begin(), relevant.end());
  for (const std::string& id : rel) {
    bool found = false;
    for (const auto& e : ranked.entries) {
      if (e.first == id) {
        found = true;
        break;
      }
    }
    if (!found) {
      fail("relevant image '", id, "' is not in the ranked database");
    }
  }

  double sum = 0.0;
  int hits = 0;
  for (std::size_t rank = 0; rank < ranked.entries.size(); ++rank) {
    if (rel.count(ranked.entries[rank].first)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return sum / static_cast<double>(rel.size());
}

EvalReport evaluate_map(const std::vector<Signature>& test_sigs,
                        const std::vector<Signature>& train_sigs,
                        const DatasetManifest& manifest,
                        std::size_t threads) {
  std::map<std::string, const ImageEntry*> by_id;
  for (const ImageEntry& img : manifest.images) {
    by_id[img.id] = &img;
  }
  auto entry_of = [&](const Signature& s, const std::string& role,
                      const char* what) -> const ImageEntry& {
    auto it = by_id.find(s.image_id);
    if (it == by_id.end()) {
      fail(what, " signature '", s.image_id, "' is not in the manifest");
    }
    if (it->second->role != role) {
      fail(what, " signature '", s.image_id, "' has role '",
           it->second->role, "'");
    }
    return *it->second;
  };

  std::map<std::string, std::vector<std::string>> train_by_category;
  for (const Signature& s : train_sigs) {
    const ImageEntry& e = entry_of(s, "train", "train");
    train_by_category[e.category].push_back(e.id);
  }
  for (const Signature& s : test_sigs) {
    entry_of(s, "test", "test");
  }

  std::vector<double> aps(test_sigs.size(), 0.0);
  parallel_for(test_sigs.size(), threads, [&](std::size_t i) {
    const ImageEntry& e = *by_id.at(test_sigs[i].image_id);
    auto rel = train_by_category.find(e.category);
    if (rel == train_by_category.end()) {
      fail("test image '", e.id, "' of category '", e.category,
           "' has no train images to retrieve");
    }
    const RankedList ranked = rank_database(test_sigs[i], train_sigs);
    aps[i] = average_precision(ranked, rel->second);
  });

  EvalReport report;
  std::map<std::string, std::pair<double, int>> per_cat;
  for (std::size_t i = 0; i < test_sigs.size(); ++i) {
    const ImageEntry& e = *by_id.at(test_sigs[i].image_id);
    report.per_query_ap[e.id] = aps[i];
    auto& [total, count] = per_cat[e.category];
    total += aps[i];
    ++count;
  }

  std::set<std::string> categories;
  for (const ImageEntry& img : manifest.images) {
    categories.insert(img.category);
  }
  double sum = 0.0;
  int n_cats = 0;
  for (const std::string& cat : categories) {
    auto it = per_cat.find(cat);
    if (it == per_cat.end()) {
      report.skipped_categories.push_back(cat);
      continue;
    }
    const double m = it->second.first / it->second.second;
    report.per_category_map[cat] = m;
    sum += m;
    ++n_cats;
  }
  if (n_cats == 0) {
    fail("no category has test queries; nothing to evaluate");
  }
  report.dataset_map = sum / n_cats;
  return report;
}

}  // namespace lgw
