#include "campnet/corpusnet.hpp"
#include "campnet/dynamics.hpp"
#include "campnet/graph_io.hpp"
#include "campnet/ingest.hpp"
#include "campnet/lexicon.hpp"
#include "campnet/pipeline.hpp"
#include "campnet/synth.hpp"
#include "campnet/topicnet.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace {

using namespace campnet;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pipeline::UserError("cannot open file: " + path);
  return in;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write file: " + path);
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

// Writes to the given path, or stdout when the path is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
  } else {
    write_text_file(path, render(fn));
  }
}

Granularity granularity_of(const std::string& s) {
  auto g = parse_granularity(s);
  if (!g) throw pipeline::UserError("granularity must be \"monthly\" or \"biweekly\", got " + s);
  return *g;
}

Date date_of_flag(const std::string& s, const char* flag) {
  auto d = parse_date(s);
  if (!d) throw pipeline::UserError(std::string(flag) + " must be YYYY-MM-DD, got " + s);
  return *d;
}

struct IngestFlags {
  std::string input;
  std::string format = "jsonl";
  bool strict = false;
  bool drop_duplicate_text = false;
  bool keep_mentions = true;
  bool decode_entities = true;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "document archive")->required();
    cmd->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_flag("--strict", strict, "fail on the first malformed row");
    cmd->add_flag("--drop-duplicate-text", drop_duplicate_text, "drop exact text duplicates");
    cmd->add_flag("--keep-mentions,!--drop-mentions", keep_mentions, "keep @mentions as tokens");
    cmd->add_flag("--decode-entities,!--raw-entities", decode_entities, "decode HTML entities");
  }

  ingest::LoadResult load() const {
    ingest::LoadOptions opts;
    opts.format = *ingest::parse_format(format);
    opts.strict = strict;
    opts.drop_duplicate_text = drop_duplicate_text;
    return ingest::load_documents(input, opts);
  }

  ingest::TokenizerOptions tokenizer() const {
    return {keep_mentions, decode_entities};
  }
};

struct TermFlags {
  std::uint64_t min_count = lexicon::kDefaultMinCount;
  std::uint64_t max_base_terms = lexicon::kDefaultMaxTerms;
  double rare_multiplier = lexicon::kDefaultMultiplier;
  double sig_multiplier = lexicon::kDefaultMultiplier;
  std::uint64_t min_occurrences = lexicon::kDefaultMinOccurrences;
  std::uint64_t min_ngram_count = lexicon::kDefaultMinOccurrences;

  void attach(CLI::App* cmd) {
    cmd->add_option("--min-count", min_count, "base term corpus count floor");
    cmd->add_option("--max-base-terms", max_base_terms, "base term cap");
    cmd->add_option("--rare-multiplier", rare_multiplier, "rare rule multiplier");
    cmd->add_option("--sig-multiplier", sig_multiplier, "significant rule multiplier");
    cmd->add_option("--min-occurrences", min_occurrences, "significant rule count floor");
    cmd->add_option("--min-ngram-count", min_ngram_count, "n-gram corpus count floor");
  }

  lexicon::ExtractOptions extract() const {
    lexicon::ExtractOptions ex;
    ex.rare_multiplier = rare_multiplier;
    ex.sig_multiplier = sig_multiplier;
    ex.min_occurrences = min_occurrences;
    ex.min_ngram_count = min_ngram_count;
    return ex;
  }
};

int run_app(int argc, char** argv) {
  CLI::App app{"campaign text network toolkit"};
  app.require_subcommand(1);

  // synth generate
  auto* synth_cmd = app.add_subcommand("synth", "synthetic corpus generation");
  synth_cmd->require_subcommand(1);
  auto* synth_gen = synth_cmd->add_subcommand("generate", "generate a planted-structure archive");
  std::string synth_spec_path, synth_out;
  synth_gen->add_option("--spec", synth_spec_path, "synth spec JSON")->required();
  synth_gen->add_option("--out", synth_out, "output JSONL path (default stdout)");
  synth_gen->callback([&] {
    auto spec = synth::SynthSpec::load(synth_spec_path);
    auto docs = synth::generate(spec);
    emit(synth_out, [&](std::ostream& o) { ingest::write_documents_jsonl(o, docs); });
  });

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "load, validate and normalize an archive");
  IngestFlags ingest_flags;
  ingest_flags.attach(ingest_cmd);
  std::string ingest_out;
  ingest_cmd->add_option("--out", ingest_out, "normalized JSONL path (default stdout)");
  ingest_cmd->callback([&] {
    auto loaded = ingest_flags.load();
    emit(ingest_out, [&](std::ostream& o) { ingest::write_documents_jsonl(o, loaded.documents); });
    std::cerr << "documents: " << loaded.documents.size()
              << ", malformed: " << loaded.skipped_malformed
              << ", duplicate ids: " << loaded.skipped_duplicate_id
              << ", duplicate texts: " << loaded.skipped_duplicate_text << "\n";
    for (const auto& msg : loaded.messages) std::cerr << "  " << msg << "\n";
  });

  // terms
  auto* terms_cmd = app.add_subcommand("terms", "select base terms and extract topic terms");
  IngestFlags terms_ingest;
  TermFlags term_flags;
  terms_ingest.attach(terms_cmd);
  term_flags.attach(terms_cmd);
  std::string terms_lexicon, terms_base_out, terms_extracted_out;
  std::string terms_granularity = "monthly";
  std::string terms_anchor = "2015-01-04";
  terms_cmd->add_option("--lexicon", terms_lexicon, "reference word,count CSV")->required();
  terms_cmd->add_option("--granularity", terms_granularity, "bucketing granularity");
  terms_cmd->add_option("--anchor", terms_anchor, "biweekly grid anchor");
  terms_cmd->add_option("--base-out", terms_base_out, "base term CSV path");
  terms_cmd->add_option("--extracted-out", terms_extracted_out, "extracted term CSV path");
  terms_cmd->callback([&] {
    auto loaded = terms_ingest.load();
    auto ref = lexicon::ReferenceLexicon::load(terms_lexicon);
    ingest::BucketOptions opts;
    opts.granularity = granularity_of(terms_granularity);
    opts.anchor = date_of_flag(terms_anchor, "--anchor");
    opts.tokenizer = terms_ingest.tokenizer();
    auto buckets = ingest::bucket(loaded.documents, opts);
    auto base = lexicon::select_base_terms(buckets.buckets, term_flags.min_count,
                                           term_flags.max_base_terms);
    auto extracted = lexicon::extract_terms(buckets.buckets, ref, term_flags.extract());
    emit(terms_base_out, [&](std::ostream& o) { lexicon::write_term_csv(o, base); });
    emit(terms_extracted_out, [&](std::ostream& o) { lexicon::write_term_csv(o, extracted); });
  });

  // corpusnet build | cluster | diagnose
  auto* corpus_cmd = app.add_subcommand("corpusnet", "corpus similarity network");
  corpus_cmd->require_subcommand(1);

  auto* cn_build = corpus_cmd->add_subcommand("build", "build the network from an archive");
  IngestFlags cn_ingest;
  TermFlags cn_terms;
  cn_ingest.attach(cn_build);
  cn_terms.attach(cn_build);
  std::string cn_lexicon, cn_author, cn_graphml_out, cn_dot_out;
  std::string cn_granularity = "monthly";
  std::string cn_anchor = "2015-01-04";
  double cn_threshold = corpusnet::kDefaultThreshold;
  bool cn_per_author_terms = false;
  cn_build->add_option("--lexicon", cn_lexicon, "reference word,count CSV");
  cn_build->add_option("--granularity", cn_granularity, "bucketing granularity");
  cn_build->add_option("--anchor", cn_anchor, "biweekly grid anchor");
  cn_build->add_option("--threshold", cn_threshold, "correlation threshold (inclusive)");
  cn_build->add_option("--author", cn_author, "restrict to one author's documents");
  cn_build->add_flag("--per-author-terms", cn_per_author_terms,
                     "select base terms from the filtered subset instead of the whole corpus");
  cn_build->add_option("--graphml-out", cn_graphml_out, "GraphML output path");
  cn_build->add_option("--dot-out", cn_dot_out, "DOT output path");
  cn_build->callback([&] {
    auto loaded = cn_ingest.load();
    ingest::BucketOptions opts;
    opts.granularity = granularity_of(cn_granularity);
    opts.anchor = date_of_flag(cn_anchor, "--anchor");
    opts.tokenizer = cn_ingest.tokenizer();
    auto all_buckets = ingest::bucket(loaded.documents, opts);
    const auto* network_buckets = &all_buckets;
    ingest::BucketResult filtered;
    if (!cn_author.empty()) {
      std::vector<ingest::Document> subset;
      for (const auto& d : loaded.documents)
        if (d.author == cn_author) subset.push_back(d);
      if (subset.empty()) throw pipeline::UserError("no documents by author " + cn_author);
      filtered = ingest::bucket(subset, opts);
      network_buckets = &filtered;
    }
    const auto& term_buckets = cn_per_author_terms ? *network_buckets : all_buckets;
    auto base = lexicon::select_base_terms(term_buckets.buckets, cn_terms.min_count,
                                           cn_terms.max_base_terms);
    auto net = corpusnet::build_corpus_network(network_buckets->buckets, base, cn_threshold);
    for (const auto& w : net.constant_vector_warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& label : net.excluded_empty)
      std::cerr << "excluded empty bucket: " << label << "\n";
    graph::NodeAttributes attrs;
    for (int i = 0; i < net.graph.node_count(); ++i) {
      const auto& meta = net.bucket_meta.at(net.graph.label(i));
      attrs["documents"].push_back(std::to_string(meta.document_count));
      attrs["window_start"].push_back(meta.window.start.iso());
      attrs["window_end"].push_back(meta.window.end.iso());
    }
    emit(cn_graphml_out, [&](std::ostream& o) { graph::write_graphml(o, net.graph, attrs); });
    if (!cn_dot_out.empty())
      write_text_file(cn_dot_out, render([&](std::ostream& o) { graph::write_dot(o, net.graph, attrs); }));
  });

  auto* cn_cluster = corpus_cmd->add_subcommand("cluster", "Louvain-cluster a built network");
  std::string cl_graphml, cl_out;
  std::uint64_t cl_seed = 42;
  cn_cluster->add_option("--graphml", cl_graphml, "network GraphML")->required();
  cn_cluster->add_option("--seed", cl_seed, "Louvain shuffle seed");
  cn_cluster->add_option("--out", cl_out, "partition CSV path (default stdout)");
  cn_cluster->callback([&] {
    auto in = open_in(cl_graphml);
    auto data = graph::read_graphml(in);
    auto part = graph::louvain(data.graph, cl_seed);
    emit(cl_out, [&](std::ostream& o) { graph::write_partition_csv(o, data.graph, part); });
    std::cerr << "communities: " << part.community_count << ", modularity: "
              << graph::format_weight(graph::modularity(data.graph, part)) << "\n";
  });

  auto* cn_diag = corpus_cmd->add_subcommand("diagnose", "continuity, linearity and activity");
  std::string dg_graphml, dg_partition, dg_out, dg_format = "text";
  cn_diag->add_option("--graphml", dg_graphml, "network GraphML")->required();
  cn_diag->add_option("--partition", dg_partition, "node,community CSV")->required();
  cn_diag->add_option("--format", dg_format, "text or json")->check(CLI::IsMember({"text", "json"}));
  cn_diag->add_option("--out", dg_out, "output path (default stdout)");
  cn_diag->callback([&] {
    auto in = open_in(dg_graphml);
    auto data = graph::read_graphml(in);
    corpusnet::CorpusNetwork net;
    net.graph = std::move(data.graph);
    auto starts = data.attrs.find("window_start");
    auto ends = data.attrs.find("window_end");
    auto docs = data.attrs.find("documents");
    if (starts == data.attrs.end() || ends == data.attrs.end() || docs == data.attrs.end())
      throw pipeline::UserError("graphml lacks window_start/window_end/documents attributes");
    for (int i = 0; i < net.graph.node_count(); ++i) {
      auto idx = static_cast<std::size_t>(i);
      corpusnet::BucketMeta meta;
      meta.window.start = date_of_flag(starts->second[idx], "window_start");
      meta.window.end = date_of_flag(ends->second[idx], "window_end");
      meta.window.granularity = meta.window.end.serial() - meta.window.start.serial() == 14
                                    ? Granularity::biweekly
                                    : Granularity::monthly;
      meta.document_count = static_cast<std::size_t>(std::stoull(docs->second[idx]));
      net.bucket_meta[net.graph.label(i)] = meta;
    }
    auto pin = open_in(dg_partition);
    auto part = graph::read_partition_csv(pin, net.graph);
    auto d = corpusnet::diagnose(net, part);
    if (dg_format == "json")
      emit(dg_out, [&](std::ostream& o) { o << corpusnet::diagnostics_json(d); });
    else
      emit(dg_out, [&](std::ostream& o) { corpusnet::write_diagnostics_text(o, d); });
  });

  // topics build | merge | show
  auto* topics_cmd = app.add_subcommand("topics", "semantic networks, subtopics and topics");
  topics_cmd->require_subcommand(1);

  auto* tp_build = topics_cmd->add_subcommand("build", "extract subtopics per candidate-window");
  IngestFlags tp_ingest;
  TermFlags tp_terms;
  tp_ingest.attach(tp_build);
  tp_terms.attach(tp_build);
  std::string tp_lexicon, tp_out;
  std::string tp_granularity = "biweekly";
  std::string tp_anchor = "2015-01-04";
  std::uint64_t tp_seed = 42;
  tp_build->add_option("--lexicon", tp_lexicon, "reference word,count CSV")->required();
  tp_build->add_option("--granularity", tp_granularity, "bucketing granularity");
  tp_build->add_option("--anchor", tp_anchor, "biweekly grid anchor");
  tp_build->add_option("--seed", tp_seed, "Louvain shuffle seed");
  tp_build->add_option("--out", tp_out, "subtopics JSONL path (default stdout)");
  tp_build->callback([&] {
    auto loaded = tp_ingest.load();
    auto ref = lexicon::ReferenceLexicon::load(tp_lexicon);
    ingest::BucketOptions opts;
    opts.granularity = granularity_of(tp_granularity);
    opts.anchor = date_of_flag(tp_anchor, "--anchor");
    opts.per_author = true;
    opts.tokenizer = tp_ingest.tokenizer();
    auto buckets = ingest::bucket(loaded.documents, opts);
    auto extracted = lexicon::extract_terms(buckets.buckets, ref, tp_terms.extract());
    std::vector<topicnet::Subtopic> subtopics;
    for (const auto& b : buckets.buckets) {
      if (b.empty()) continue;
      auto snet = topicnet::build_semantic_network(b, extracted);
      if (snet.empty()) continue;
      auto sts = topicnet::extract_subtopics(snet, tp_seed);
      subtopics.insert(subtopics.end(), sts.begin(), sts.end());
    }
    emit(tp_out, [&](std::ostream& o) { topicnet::write_subtopics_jsonl(o, subtopics); });
  });

  auto* tp_merge = topics_cmd->add_subcommand("merge", "merge subtopics into recurring topics");
  std::string mg_subtopics, mg_out, mg_listing;
  std::string mg_granularity = "biweekly";
  std::string mg_anchor = "2015-01-04";
  double mg_min_jaccard = topicnet::kDefaultMinJaccard;
  bool mg_keep_isolated = false;
  std::uint64_t mg_seed = 42;
  tp_merge->add_option("--subtopics", mg_subtopics, "subtopics JSONL")->required();
  tp_merge->add_option("--granularity", mg_granularity, "window granularity of the subtopics");
  tp_merge->add_option("--anchor", mg_anchor, "biweekly grid anchor");
  tp_merge->add_option("--min-jaccard", mg_min_jaccard, "overlap needed to connect subtopics");
  tp_merge->add_flag("--keep-isolated", mg_keep_isolated, "keep single-subtopic topics");
  tp_merge->add_option("--seed", mg_seed, "Louvain shuffle seed");
  tp_merge->add_option("--out", mg_out, "topics JSON path (default stdout)");
  tp_merge->add_option("--listing", mg_listing, "also write a top-10 text listing here");
  tp_merge->callback([&] {
    auto in = open_in(mg_subtopics);
    auto subtopics = topicnet::read_subtopics_jsonl(in, granularity_of(mg_granularity),
                                                    date_of_flag(mg_anchor, "--anchor"));
    std::vector<topicnet::Topic> topics;
    if (subtopics.size() >= 2) {
      auto net = topicnet::build_subtopic_network(subtopics, mg_min_jaccard);
      topics = topicnet::merge_topics(net, subtopics, mg_seed, mg_keep_isolated);
    }
    emit(mg_out, [&](std::ostream& o) { topicnet::write_topics_json(o, topics); });
    if (!mg_listing.empty())
      write_text_file(mg_listing,
                      render([&](std::ostream& o) { topicnet::write_topic_listing(o, topics, 10); }));
  });

  auto* tp_show = topics_cmd->add_subcommand("show", "print the top terms of each topic");
  std::string sh_topics;
  std::size_t sh_top = 5;
  tp_show->add_option("--topics", sh_topics, "topics JSON")->required();
  tp_show->add_option("--top", sh_top, "terms per topic");
  tp_show->callback([&] {
    auto in = open_in(sh_topics);
    auto topics = topicnet::read_topics_json(in);
    topicnet::write_topic_listing(std::cout, topics, sh_top);
  });

  // dynamics coverage | events | scores
  auto* dyn_cmd = app.add_subcommand("dynamics", "topic coverage, follow events and scores");
  dyn_cmd->require_subcommand(1);

  auto* dy_cov = dyn_cmd->add_subcommand("coverage", "coverage matrix over candidates");
  IngestFlags dy_ingest;
  dy_ingest.attach(dy_cov);
  std::string dy_topics, dy_cov_out;
  std::string dy_granularity = "biweekly";
  std::string dy_anchor = "2015-01-04";
  double dy_threshold = dynamics::kDefaultCoverageThreshold;
  dy_cov->add_option("--topics", dy_topics, "topics JSON")->required();
  dy_cov->add_option("--granularity", dy_granularity, "bucketing granularity");
  dy_cov->add_option("--anchor", dy_anchor, "biweekly grid anchor");
  dy_cov->add_option("--threshold", dy_threshold, "coverage correlation threshold");
  dy_cov->add_option("--out", dy_cov_out, "coverage CSV path (default stdout)");
  dy_cov->callback([&] {
    auto loaded = dy_ingest.load();
    auto tin = open_in(dy_topics);
    auto topics = topicnet::read_topics_json(tin);
    ingest::BucketOptions opts;
    opts.granularity = granularity_of(dy_granularity);
    opts.anchor = date_of_flag(dy_anchor, "--anchor");
    opts.per_author = true;
    opts.tokenizer = dy_ingest.tokenizer();
    auto buckets = ingest::bucket(loaded.documents, opts);
    auto cov = dynamics::build_coverage_matrix(buckets.buckets, topics, dy_threshold);
    emit(dy_cov_out, [&](std::ostream& o) { dynamics::write_coverage_csv(o, cov); });
  });

  auto* dy_events = dyn_cmd->add_subcommand("events", "detect follow events from coverage");
  std::string ev_coverage, ev_out;
  dy_events->add_option("--coverage", ev_coverage, "coverage CSV")->required();
  dy_events->add_option("--out", ev_out, "events CSV path (default stdout)");
  dy_events->callback([&] {
    auto in = open_in(ev_coverage);
    auto cov = dynamics::read_coverage_csv(in);
    auto events = dynamics::detect_follow_events(cov);
    emit(ev_out, [&](std::ostream& o) { dynamics::write_events_csv(o, events); });
  });

  auto* dy_scores = dyn_cmd->add_subcommand("scores", "leadership and engagement scores");
  std::string sc_events, sc_out, sc_graphml, sc_dot;
  std::vector<std::string> sc_candidates;
  bool sc_per_window = false;
  dy_scores->add_option("--events", sc_events, "events CSV")->required();
  dy_scores->add_option("--candidates", sc_candidates,
                        "candidate list (default: everyone in the events)");
  dy_scores->add_flag("--per-window", sc_per_window, "count distinct windows, not events");
  dy_scores->add_option("--out", sc_out, "scores CSV path (default stdout)");
  dy_scores->add_option("--network-graphml", sc_graphml, "also export the follower network");
  dy_scores->add_option("--network-dot", sc_dot, "also export the follower network as DOT");
  dy_scores->callback([&] {
    auto in = open_in(sc_events);
    auto events = dynamics::read_events_csv(in);
    std::vector<std::string> candidates = sc_candidates;
    if (candidates.empty()) {
      std::set<std::string> seen;
      for (const auto& ev : events) {
        seen.insert(ev.follower);
        seen.insert(ev.leaders.begin(), ev.leaders.end());
      }
      candidates.assign(seen.begin(), seen.end());
    }
    dynamics::ScoreOptions opts;
    opts.per_window = sc_per_window;
    auto board = dynamics::scores(events, candidates, opts);
    emit(sc_out, [&](std::ostream& o) { dynamics::write_scores_csv(o, board); });
    if (!sc_graphml.empty() || !sc_dot.empty()) {
      auto net = dynamics::follower_network(events);
      if (!sc_graphml.empty())
        write_text_file(sc_graphml, render([&](std::ostream& o) { graph::write_graphml(o, net); }));
      if (!sc_dot.empty())
        write_text_file(sc_dot, render([&](std::ostream& o) { graph::write_dot(o, net); }));
    }
  });

  // run
  auto* run_cmd = app.add_subcommand("run", "full pipeline from a config file");
  std::string run_config, run_out_dir;
  run_cmd->add_option("--config", run_config, "pipeline config JSON (or a manifest)")->required();
  run_cmd->add_option("--out,-o", run_out_dir, "artifact directory override");
  run_cmd->callback([&] {
    auto config = pipeline::PipelineConfig::load(run_config);
    if (!run_out_dir.empty()) config.out_dir = run_out_dir;
    auto result = pipeline::run_pipeline(config);
    if (result.ok) {
      std::cout << "artifacts: " << result.out_dir.string() << "\n";
    } else {
      std::cerr << "error: stage " << result.failed_stage << ": " << result.error << "\n";
      std::exit(result.exit_code);
    }
  });

  // report
  auto* report_cmd = app.add_subcommand("report", "summarize a finished artifact directory");
  std::string rp_dir, rp_format = "text";
  std::size_t rp_top = 5;
  report_cmd->add_option("--dir", rp_dir, "artifact directory")->required();
  report_cmd->add_option("--format", rp_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  report_cmd->add_option("--top", rp_top, "terms per topic");
  report_cmd->callback([&] {
    pipeline::report(rp_dir,
                     rp_format == "json" ? pipeline::ReportFormat::json
                                         : pipeline::ReportFormat::text,
                     rp_top, std::cout);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
