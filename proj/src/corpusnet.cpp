#include "campnet/corpusnet.hpp"

#include "campnet/stats.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace campnet::corpusnet {

namespace {

bool is_constant(const std::vector<double>& v) {
  for (double x : v)
    if (x != v.front()) return false;
  return true;
}

std::string round6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

}  // namespace

CorpusNetwork build_corpus_network(const std::vector<ingest::CorpusBucket>& buckets,
                                   const lexicon::TermSet& base, double threshold) {
  if (base.terms.empty()) throw std::runtime_error("corpus network needs a non-empty term set");

  CorpusNetwork net;
  net.threshold = threshold;

  std::vector<const ingest::CorpusBucket*> kept;
  for (const auto& b : buckets) {
    if (b.empty()) {
      net.excluded_empty.push_back(b.label());
      continue;
    }
    kept.push_back(&b);
  }
  if (kept.size() < 2)
    throw std::runtime_error("corpus network needs at least 2 non-empty buckets, got " +
                             std::to_string(kept.size()));

  std::vector<std::vector<double>> profiles;
  std::vector<bool> constant;
  profiles.reserve(kept.size());
  for (const auto* b : kept) {
    auto fv = lexicon::frequency_vector(*b, base);
    profiles.push_back(std::move(*fv.relative));
    constant.push_back(is_constant(profiles.back()));
    std::string label = b->label();
    net.graph.add_node(label);
    net.bucket_meta[label] = BucketMeta{b->documents.size(), b->window};
    if (constant.back())
      net.constant_vector_warnings.push_back("constant base-term vector, node left isolated: " +
                                             label);
  }

  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (constant[i]) continue;
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (constant[j]) continue;
      auto r = graph::pearson(profiles[i], profiles[j]);
      if (r && *r > 0.0 && *r >= threshold)
        net.graph.add_edge(static_cast<int>(i), static_cast<int>(j), *r);
    }
  }
  return net;
}

std::vector<CommunityContinuity> temporal_continuity(const CorpusNetwork& net,
                                                     const graph::Partition& p) {
  const auto& g = net.graph;
  if (static_cast<int>(p.assignment.size()) != g.node_count())
    throw std::runtime_error("partition does not cover the corpus network");

  std::vector<CommunityContinuity> out(static_cast<std::size_t>(p.community_count));
  std::vector<std::vector<TimeWindow>> windows(out.size());
  for (int id = 0; id < g.node_count(); ++id) {
    int c = p.assignment[static_cast<std::size_t>(id)];
    auto& entry = out[static_cast<std::size_t>(c)];
    entry.community = c;
    entry.nodes.push_back(g.label(id));
    windows[static_cast<std::size_t>(c)].push_back(net.bucket_meta.at(g.label(id)).window);
  }

  for (std::size_t c = 0; c < out.size(); ++c) {
    auto& ws = windows[c];
    std::sort(ws.begin(), ws.end(), [](const TimeWindow& a, const TimeWindow& b) {
      return a.start.serial() < b.start.serial();
    });
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    bool contiguous = true;
    for (std::size_t i = 1; i < ws.size(); ++i)
      if (window_gap(ws[i - 1], ws[i]) != 1) contiguous = false;
    out[c].contiguous = contiguous;
    out[c].first_start = ws.front().start;
    out[c].last_end = ws.back().end;
    auto& meta = net.bucket_meta;
    std::sort(out[c].nodes.begin(), out[c].nodes.end(),
              [&](const std::string& a, const std::string& b) {
                auto sa = meta.at(a).window.start.serial();
                auto sb = meta.at(b).window.start.serial();
                if (sa != sb) return sa < sb;
                return a < b;
              });
  }

  std::sort(out.begin(), out.end(), [](const CommunityContinuity& a, const CommunityContinuity& b) {
    if (a.first_start != b.first_start) return a.first_start < b.first_start;
    return a.community < b.community;
  });
  return out;
}

LinearityReport quasi_linearity(const CorpusNetwork& net) {
  const auto& g = net.graph;
  LinearityReport rep;
  std::size_t adjacent = 0, considered = 0;
  for (int u = 0; u < g.node_count(); ++u) {
    const auto& nbrs = g.neighbors(u);
    if (nbrs.empty()) {
      ++rep.isolated;
      continue;
    }
    int best = nbrs.front().first;
    double best_w = nbrs.front().second;
    for (const auto& [v, w] : nbrs) {
      if (w > best_w || (w == best_w && v < best)) {
        best = v;
        best_w = w;
      }
    }
    ++considered;
    const auto& wu = net.bucket_meta.at(g.label(u)).window;
    const auto& wv = net.bucket_meta.at(g.label(best)).window;
    auto gap = std::llabs(window_gap(wu, wv));
    if (gap == 1) ++adjacent;
    if (gap > 2)
      rep.outliers.push_back({g.label(u), g.label(best), static_cast<int>(gap)});
  }
  rep.fraction_adjacent =
      considered == 0 ? 0.0 : static_cast<double>(adjacent) / static_cast<double>(considered);
  return rep;
}

ActivityReport cluster_activity(const CorpusNetwork& net, const graph::Partition& p) {
  auto continuity = temporal_continuity(net, p);  // chronological community order
  ActivityReport rep;
  std::vector<std::vector<double>> docs_per_cluster;
  for (const auto& entry : continuity) {
    std::vector<double> docs;
    for (const auto& label : entry.nodes)
      docs.push_back(static_cast<double>(net.bucket_meta.at(label).document_count));
    ClusterActivity ca;
    ca.community = entry.community;
    ca.buckets = docs.size();
    ca.mean_docs = stats::mean(docs);
    rep.clusters.push_back(ca);
    docs_per_cluster.push_back(std::move(docs));
  }
  for (std::size_t i = 1; i < docs_per_cluster.size(); ++i) {
    ActivityComparison cmp;
    cmp.community_a = rep.clusters[i - 1].community;
    cmp.community_b = rep.clusters[i].community;
    if (docs_per_cluster[i - 1].size() < 2 || docs_per_cluster[i].size() < 2) {
      cmp.skipped = true;
    } else {
      auto w = stats::welch_t_test(docs_per_cluster[i - 1], docs_per_cluster[i]);
      cmp.t = w.t;
      cmp.p = w.p;
    }
    rep.comparisons.push_back(cmp);
  }
  return rep;
}

Diagnostics diagnose(const CorpusNetwork& net, const graph::Partition& p) {
  Diagnostics d;
  d.modularity = net.graph.edge_count() > 0 ? graph::modularity(net.graph, p) : 0.0;
  d.continuity = temporal_continuity(net, p);
  d.linearity = quasi_linearity(net);
  d.activity = cluster_activity(net, p);
  return d;
}

void write_diagnostics_text(std::ostream& out, const Diagnostics& d) {
  out << "modularity: " << round6(d.modularity) << "\n";
  out << "communities: " << d.continuity.size() << "\n";
  for (const auto& c : d.continuity) {
    out << "  community " << c.community << ": " << c.nodes.size() << " buckets, "
        << c.first_start.iso() << " .. " << c.last_end.iso()
        << (c.contiguous ? " (contiguous)" : " (NOT contiguous)") << "\n";
  }
  out << "quasi-linearity: " << round6(d.linearity.fraction_adjacent)
      << " of non-isolated nodes strongest-linked to an adjacent window ("
      << d.linearity.isolated << " isolated)\n";
  for (const auto& o : d.linearity.outliers)
    out << "  outlier: " << o.node << " -> " << o.strongest_neighbor << " (" << o.gap
        << " windows)\n";
  out << "activity:\n";
  for (const auto& a : d.activity.clusters)
    out << "  community " << a.community << ": mean " << round6(a.mean_docs) << " docs over "
        << a.buckets << " buckets\n";
  for (const auto& cmp : d.activity.comparisons) {
    out << "  " << cmp.community_a << " vs " << cmp.community_b << ": ";
    if (cmp.skipped)
      out << "skipped (needs 2 buckets per side)\n";
    else
      out << "welch t=" << round6(cmp.t) << " p=" << round6(cmp.p) << "\n";
  }
}

std::string diagnostics_json(const Diagnostics& d) {
  nlohmann::ordered_json j;
  j["modularity"] = d.modularity;
  j["communities"] = nlohmann::ordered_json::array();
  for (const auto& c : d.continuity) {
    nlohmann::ordered_json jc;
    jc["community"] = c.community;
    jc["contiguous"] = c.contiguous;
    jc["first_start"] = c.first_start.iso();
    jc["last_end"] = c.last_end.iso();
    jc["nodes"] = c.nodes;
    j["communities"].push_back(jc);
  }
  j["quasi_linearity"] = {{"fraction_adjacent", d.linearity.fraction_adjacent},
                          {"isolated", d.linearity.isolated},
                          {"outliers", nlohmann::ordered_json::array()}};
  for (const auto& o : d.linearity.outliers)
    j["quasi_linearity"]["outliers"].push_back(
        {{"node", o.node}, {"strongest_neighbor", o.strongest_neighbor}, {"gap", o.gap}});
  j["activity"] = {{"clusters", nlohmann::ordered_json::array()},
                   {"comparisons", nlohmann::ordered_json::array()}};
  for (const auto& a : d.activity.clusters)
    j["activity"]["clusters"].push_back(
        {{"community", a.community}, {"buckets", a.buckets}, {"mean_docs", a.mean_docs}});
  for (const auto& cmp : d.activity.comparisons) {
    nlohmann::ordered_json jc;
    jc["community_a"] = cmp.community_a;
    jc["community_b"] = cmp.community_b;
    jc["skipped"] = cmp.skipped;
    if (!cmp.skipped) {
      jc["t"] = cmp.t;
      jc["p"] = cmp.p;
    }
    j["activity"]["comparisons"].push_back(jc);
  }
  return j.dump(2) + "\n";
}

}  // namespace campnet::corpusnet
