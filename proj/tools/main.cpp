// Command-line front end: generate / detect / evaluate / bestofn / report.
// All randomness flows from --seed; identical flags + inputs produce
// byte-identical outputs. Logs go to stderr; data goes to files or stdout.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ares/baselines.hpp"
#include "ares/chain.hpp"
#include "ares/datagen.hpp"
#include "ares/entailment.hpp"
#include "ares/errors.hpp"
#include "ares/estimator.hpp"
#include "ares/eval.hpp"
#include "ares/judge.hpp"
#include "ares/oracle.hpp"
#include "ares/score_file.hpp"
#include "ares/tomlmini.hpp"
#include "json.hpp"

namespace {

using namespace ares;

// ---------------------------------------------------------------------------
// Small shared helpers

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string fmt_compact(double v) {
    std::ostringstream out;
    out << v;  // default precision: 0.1 stays "0.1"
    return out.str();
}

std::string fmt_fixed(double v, int places) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(places) << v;
    return out.str();
}

// "-" routes data to stdout; anything else is a file path.
void emit_lines(const std::string& out, const std::vector<std::string>& lines) {
    if (out == "-") {
        for (const std::string& line : lines) std::cout << line << '\n';
        return;
    }
    std::ofstream file(out);
    if (!file) throw IoError("cannot open " + out + " for writing");
    for (const std::string& line : lines) file << line << '\n';
    if (!file) throw IoError("failed writing " + out);
}

void emit_text(const std::string& out, const std::string& text) {
    if (out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream file(out);
    if (!file) throw IoError("cannot open " + out + " for writing");
    file << text;
    if (!file) throw IoError("failed writing " + out);
}

int default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// generate

struct TreeArgs {
    int depth = 1;
    int sources = 1;
    int remove_at = 0;  // 0 = no removal
    int remove_source = 1;
    int insert = 0;
    int count = 1;
    std::uint64_t seed = 0;
    std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string out = "-";
    std::string rules_out;
};

struct RecipeArgs {
    std::string graph;
    std::string drop;
    int count = 1;
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string rules_out;
};

// Sidecar location: explicit flag, else derived from the output file.
std::string sidecar_path(const std::string& rules_out, const std::string& out) {
    if (!rules_out.empty()) return rules_out;
    if (out != "-") return out + ".rules.json";
    return "";
}

void write_generated(const std::vector<ReasoningChain>& chains,
                     const std::map<std::string, RuleSystem>& systems, const std::string& out,
                     const std::string& rules_out) {
    std::vector<std::string> lines;
    lines.reserve(chains.size());
    for (const ReasoningChain& chain : chains) lines.push_back(chain_to_jsonl(chain));
    emit_lines(out, lines);
    std::string sidecar = sidecar_path(rules_out, out);
    if (!sidecar.empty()) write_rule_systems(sidecar, systems);
    std::cerr << "generated " << chains.size() << " chain" << (chains.size() == 1 ? "" : "s")
              << " -> " << (out == "-" ? "stdout" : out) << "\n";
    if (!sidecar.empty()) std::cerr << "rule systems -> " << sidecar << "\n";
}

void run_generate_claimtrees(const TreeArgs& args) {
    std::vector<ReasoningChain> chains;
    std::map<std::string, RuleSystem> systems;
    for (int i = 0; i < args.count; ++i) {
        TreeSpec spec;
        spec.depth = args.depth;
        spec.sources = args.sources;
        if (args.remove_at > 0) spec.removed_rule_position = args.remove_at;
        spec.removed_rule_source = args.remove_source;
        spec.inserted_benign = args.insert;
        spec.seed = args.seed + static_cast<std::uint64_t>(i);
        spec.symbol_alphabet = args.alphabet;
        GeneratedChain generated =
            args.insert > 0 ? gen_benign_insertions(spec) : gen_claimtree(spec);
        systems.emplace(generated.first.id, std::move(generated.second));
        chains.push_back(std::move(generated.first));
    }
    write_generated(chains, systems, args.out, args.rules_out);
}

void run_generate_recipes(const RecipeArgs& args) {
    RecipeGraph graph = read_recipe_graph(args.graph);
    validate_recipe_graph(graph);
    RuleSystem system = recipe_rule_system(graph);
    std::vector<ReasoningChain> chains;
    std::map<std::string, RuleSystem> systems;
    for (int i = 0; i < args.count; ++i) {
        ReasoningChain chain =
            gen_recipe_chain(graph, args.drop, args.seed + static_cast<std::uint64_t>(i));
        systems.emplace(chain.id, system);
        chains.push_back(std::move(chain));
    }
    write_generated(chains, systems, args.out, args.rules_out);
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
    std::string chains;
    std::string rules;
    std::string method = "ares";
    std::string entailment = "oracle";
    std::string score_mode = "binary";
    double epsilon = 0.1;
    double delta = 0.1;
    double prior = 0.95;
    bool use_file_priors = false;
    std::uint64_t seed = 0;
    int workers = default_workers();
    std::string config;
    std::string base_url;
    std::string model;
    std::string prompt;
    std::string cache;
    std::string audit;
    bool malformed_all_sound = false;
    std::string out = "-";
};

bool needs_http(const DetectArgs& args) {
    return args.method == "llm-judge" || args.entailment == "http";
}

// Endpoint settings come from the TOML file and are overridden by flags.
JudgeEndpointConfig endpoint_config(const DetectArgs& args) {
    JudgeEndpointConfig config;
    if (!args.config.empty()) {
        config = judge_config_from_toml(toml::Table::parse_file(args.config));
    } else if (args.base_url.empty() || args.model.empty()) {
        throw DomainError(
            "HTTP judging needs --config, or both --base-url and --model");
    }
    if (!args.base_url.empty()) config.base_url = args.base_url;
    if (!args.model.empty()) config.model = args.model;
    return config;
}

std::map<std::string, RuleSystem> load_rule_systems(const DetectArgs& args) {
    if (!args.rules.empty()) return read_rule_systems(args.rules);
    std::string fallback = args.chains + ".rules.json";
    if (std::filesystem::exists(fallback)) return read_rule_systems(fallback);
    return {};
}

void print_certificate(const StabilityReport& report, const std::string& out) {
    double theoretical = static_cast<double>(report.samples_requested) *
                         static_cast<double>(report.tau_hat.size());
    double ratio = theoretical == 0.0
                       ? 0.0
                       : static_cast<double>(report.unique_entailment_calls) / theoretical;
    std::string line = "N=" + std::to_string(report.samples_requested) +
                       " ε=" + fmt_compact(report.epsilon) + " δ=" + fmt_compact(report.delta) +
                       " unique_calls=" + std::to_string(report.unique_entailment_calls) + " (" +
                       fmt_fixed(ratio, 3) + "x theoretical)";
    // The certificate is result data; it moves to stderr only when the score
    // stream itself owns stdout.
    if (out == "-") {
        std::cerr << line << "\n";
    } else {
        std::cout << line << "\n";
    }
}

void run_detect(const DetectArgs& args) {
    if (args.malformed_all_sound && args.method != "llm-judge") {
        throw DomainError("--malformed-all-sound only applies to --method llm-judge");
    }
    if (args.method != "llm-judge" && args.entailment == "http" && args.prompt.empty()) {
        throw DomainError("--entailment http needs --prompt (an entailment prompt template)");
    }
    if (args.method == "llm-judge" && args.prompt.empty()) {
        throw DomainError("--method llm-judge needs --prompt (a whole-chain prompt template)");
    }

    std::vector<ReasoningChain> chains = read_chain_file(args.chains);
    if (chains.empty()) throw EmptyInput("no chains in " + args.chains);

    std::map<std::string, RuleSystem> systems = load_rule_systems(args);
    auto system_for = [&](const std::string& id) -> RuleSystem {
        auto it = systems.find(id);
        return it == systems.end() ? RuleSystem{} : it->second;
    };

    std::shared_ptr<AuditLog> audit;
    if (!args.audit.empty()) audit = std::make_shared<AuditLog>(args.audit);

    // One shared HTTP-backed model serves every chain; the oracle is rebuilt
    // per chain around that chain's rule system.
    std::shared_ptr<ChainJudge> http_judge;
    if (needs_http(args)) http_judge = std::make_shared<HttpJudgeClient>(endpoint_config(args));

    std::shared_ptr<EntailmentModel> shared_model;
    if (args.method != "llm-judge" && args.entailment == "http") {
        ScoreMode mode =
            args.score_mode == "likert7" ? ScoreMode::likert7 : ScoreMode::binary;
        shared_model = std::make_shared<LlmEntailmentModel>(http_judge, mode,
                                                            read_text_file(args.prompt), audit);
        if (!args.cache.empty()) {
            shared_model = std::make_shared<CachedModel>(shared_model, args.cache);
        }
    }
    auto model_for = [&](const ReasoningChain& chain) -> std::shared_ptr<EntailmentModel> {
        if (shared_model) return shared_model;
        return std::make_shared<RuleOracle>(system_for(chain.id));
    };

    std::vector<ScoreRecord> records;
    records.reserve(chains.size());
    if (args.method == "ares") {
        for (std::size_t i = 0; i < chains.size(); ++i) {
            SamplingConfig config;
            config.epsilon = args.epsilon;
            config.delta = args.delta;
            if (!args.use_file_priors) config.prior_override = args.prior;
            config.seed = args.seed + static_cast<std::uint64_t>(i);
            config.workers = args.workers;
            StabilityReport report = estimate_stability(chains[i], model_for(chains[i]), config);
            print_certificate(report, args.out);
            records.push_back(to_score_record(report));
        }
    } else if (args.method == "entail-prev" || args.method == "entail-base") {
        for (const ReasoningChain& chain : chains) {
            std::shared_ptr<EntailmentModel> model = model_for(chain);
            ScoreRecord record;
            record.id = chain.id;
            record.tau_hat = args.method == "entail-prev" ? entail_prev(chain, *model)
                                                          : entail_base(chain, *model);
            record.method = args.method;
            records.push_back(std::move(record));
        }
    } else {  // llm-judge
        std::string prompt_template = read_text_file(args.prompt);
        std::shared_ptr<ChainJudge> judge = http_judge;
        if (audit) {
            judge = std::make_shared<AuditedJudge>(judge, audit, key_hash(prompt_template));
        }
        for (const ReasoningChain& chain : chains) {
            ScoreRecord record;
            record.id = chain.id;
            record.method = "llm-judge";
            try {
                record.tau_hat = llm_judge(chain, *judge, prompt_template);
            } catch (const MalformedJudgment& e) {
                if (!args.malformed_all_sound) throw;
                std::cerr << "chain " << chain.id << ": " << e.what()
                          << "; scoring every step sound\n";
                record.tau_hat.assign(static_cast<std::size_t>(chain.m), 1.0);
            }
            records.push_back(std::move(record));
        }
    }

    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const ScoreRecord& record : records) lines.push_back(score_to_jsonl(record));
    emit_lines(args.out, lines);
    std::cerr << "scored " << records.size() << " chain" << (records.size() == 1 ? "" : "s")
              << " with " << args.method << " -> " << (args.out == "-" ? "stdout" : args.out)
              << "\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
    std::string chains;
    std::string scores;
    int folds = 5;
    std::uint64_t seed = 0;
    std::string method;
    std::string dataset;
    std::string out = "-";
    std::string lengths_csv;
};

void run_evaluate(const EvaluateArgs& args) {
    std::vector<ReasoningChain> chains = read_chain_file(args.chains);
    std::vector<ScoreRecord> scores = read_score_file(args.scores);
    std::vector<EvalRecord> records = make_eval_records(chains, scores);

    std::string method = args.method;
    if (method.empty()) {
        for (const ScoreRecord& record : scores) {
            if (method.empty()) {
                method = record.method;
            } else if (method != record.method) {
                method = "mixed";
                break;
            }
        }
    }
    std::string dataset = args.dataset.empty()
                              ? std::filesystem::path(args.chains).filename().string()
                              : args.dataset;

    CrossValidation cv = cross_validate(records, args.folds, args.seed);
    emit_text(args.out, report_to_json(method, dataset, cv) + "\n");
    if (!args.lengths_csv.empty()) {
        emit_text(args.lengths_csv, per_length_f1_csv(records, args.folds, args.seed));
    }
    std::cerr << "evaluated " << records.size() << " chains in " << args.folds << " folds ("
              << method << " on " << dataset << ")\n";
}

// ---------------------------------------------------------------------------
// bestofn

struct BestOfNArgs {
    std::string chains;
    std::string scores;
    std::string groups;
    std::string aggregate = "final-step";
    std::string out;
};

struct CandidateGroup {
    std::string name;
    std::vector<std::string> ids;
};

std::vector<CandidateGroup> read_groups(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<CandidateGroup> groups;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            groups.push_back(
                {j.at("group").get<std::string>(), j.at("ids").get<std::vector<std::string>>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad group record: " +
                             e.what());
        }
    }
    return groups;
}

// Correct means every ground-truth-labeled step is sound; a candidate with no
// labels at all cannot be scored and is rejected loudly.
bool chain_correct(const ReasoningChain& chain) {
    int labeled = 0;
    for (int k = 1; k <= chain.m; ++k) {
        const std::optional<TruthLabel>& label = chain.derived_claim(k).truth_label;
        if (!label) continue;
        ++labeled;
        if (*label == TruthLabel::unsound) return false;
    }
    if (labeled == 0) {
        throw DomainError("chain '" + chain.id + "' has no ground-truth labels");
    }
    return true;
}

void run_bestofn(const BestOfNArgs& args) {
    std::vector<ReasoningChain> chains = read_chain_file(args.chains);
    std::vector<ScoreRecord> scores = read_score_file(args.scores);
    std::map<std::string, const ReasoningChain*> chain_by_id;
    for (const ReasoningChain& chain : chains) {
        if (!chain_by_id.emplace(chain.id, &chain).second) {
            throw IdMismatch("duplicate chain id '" + chain.id + "'");
        }
    }
    std::map<std::string, const ScoreRecord*> score_by_id;
    for (const ScoreRecord& record : scores) {
        if (!score_by_id.emplace(record.id, &record).second) {
            throw IdMismatch("duplicate score id '" + record.id + "'");
        }
    }

    Aggregation aggregation =
        args.aggregate == "step-average" ? Aggregation::step_average : Aggregation::final_step;
    std::vector<CandidateGroup> groups = read_groups(args.groups);
    if (groups.empty()) throw EmptyInput("no groups in " + args.groups);

    std::vector<std::string> picks;
    int correct = 0;
    for (const CandidateGroup& group : groups) {
        std::vector<BestOfNCandidate> candidates;
        for (const std::string& id : group.ids) {
            auto chain_it = chain_by_id.find(id);
            if (chain_it == chain_by_id.end()) {
                throw IdMismatch("group '" + group.name + "' references unknown chain '" + id +
                                 "'");
            }
            auto score_it = score_by_id.find(id);
            if (score_it == score_by_id.end()) {
                throw IdMismatch("no scores for chain '" + id + "'");
            }
            const ReasoningChain& chain = *chain_it->second;
            const ScoreRecord& record = *score_it->second;
            if (static_cast<int>(record.tau_hat.size()) != chain.m) {
                throw IdMismatch("chain '" + id + "' has " + std::to_string(chain.m) +
                                 " steps but " + std::to_string(record.tau_hat.size()) +
                                 " scores");
            }
            candidates.push_back({id, record.tau_hat, chain_correct(chain)});
        }
        std::size_t winner = best_of_n(candidates, aggregation);
        bool won = candidates[winner].is_correct;
        correct += won ? 1 : 0;
        nlohmann::json pick;
        pick["group"] = group.name;
        pick["selected_id"] = candidates[winner].chain_id;
        pick["correct"] = won;
        picks.push_back(pick.dump());
    }

    if (!args.out.empty()) emit_lines(args.out, picks);
    std::cout << "accuracy=" << fmt_fixed(static_cast<double>(correct) /
                                              static_cast<double>(groups.size()),
                                          3)
              << " groups=" << groups.size() << " aggregate=" << args.aggregate << "\n";
}

// ---------------------------------------------------------------------------
// report

struct ReportRow {
    std::string method;
    std::string dataset;
    std::int64_t folds = 0;
    double f1_mean = 0, f1_std = 0;
    double precision_mean = 0, precision_std = 0;
    double recall_mean = 0, recall_std = 0;
};

void run_report(const std::vector<std::string>& files) {
    std::vector<ReportRow> rows;
    for (const std::string& file : files) {
        try {
            nlohmann::json j = nlohmann::json::parse(read_text_file(file));
            ReportRow row;
            row.method = j.at("method").get<std::string>();
            row.dataset = j.at("dataset").get<std::string>();
            row.folds = j.at("folds").get<std::int64_t>();
            row.f1_mean = j.at("f1_mean").get<double>();
            row.f1_std = j.at("f1_std").get<double>();
            row.precision_mean = j.at("precision_mean").get<double>();
            row.precision_std = j.at("precision_std").get<double>();
            row.recall_mean = j.at("recall_mean").get<double>();
            row.recall_std = j.at("recall_std").get<double>();
            rows.push_back(std::move(row));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(file + ": not an evaluation report: " + e.what());
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
        if (a.f1_mean != b.f1_mean) return a.f1_mean > b.f1_mean;
        return a.method < b.method;
    });

    std::size_t method_w = 6, dataset_w = 7;
    for (const ReportRow& row : rows) {
        method_w = std::max(method_w, row.method.size());
        dataset_w = std::max(dataset_w, row.dataset.size());
    }
    auto stat = [](double mean, double std_dev) {
        return fmt_fixed(mean, 3) + " ± " + fmt_fixed(std_dev, 3);
    };
    std::ostringstream table;
    table << std::left << std::setw(static_cast<int>(method_w) + 2) << "method"
          << std::setw(static_cast<int>(dataset_w) + 2) << "dataset" << std::setw(7) << "folds"
          << std::setw(16) << "F1" << std::setw(16) << "precision" << std::setw(16) << "recall"
          << "\n";
    for (const ReportRow& row : rows) {
        // setw counts bytes and "±" is two of them, so stat cells get one more.
        table << std::left << std::setw(static_cast<int>(method_w) + 2) << row.method
              << std::setw(static_cast<int>(dataset_w) + 2) << row.dataset << std::setw(7)
              << row.folds << std::setw(17) << stat(row.f1_mean, row.f1_std) << std::setw(17)
              << stat(row.precision_mean, row.precision_std) << std::setw(17)
              << stat(row.recall_mean, row.recall_std) << "\n";
    }
    std::cout << table.str();
}

// ---------------------------------------------------------------------------
// error -> exit code

int exit_code_for(const std::exception& error) {
    if (const auto* aborted = dynamic_cast<const EstimationError*>(&error)) {
        try {
            std::rethrow_if_nested(*aborted);
        } catch (const std::exception& cause) {
            return exit_code_for(cause);
        }
        return 3;  // aborted estimates default to the transport bucket
    }
    if (dynamic_cast<const TransportError*>(&error)) return 3;
    if (dynamic_cast<const MalformedJudgment*>(&error) ||
        dynamic_cast<const UnparseableResponse*>(&error) ||
        dynamic_cast<const UnrecognizedLabel*>(&error) ||
        dynamic_cast<const ParseError*>(&error)) {
        return 4;
    }
    if (dynamic_cast<const IdMismatch*>(&error)) return 5;
    if (dynamic_cast<const Error*>(&error)) return 2;  // domain/spec/graph/io/...
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified soundness scoring for step-by-step reasoning chains"};
    app.require_subcommand(1);

    // generate ---------------------------------------------------------------
    CLI::App* generate = app.add_subcommand("generate", "Write synthetic benchmark chains");
    generate->require_subcommand(1);

    TreeArgs tree_args;
    CLI::App* claimtrees = generate->add_subcommand(
        "claimtrees", "Symbol-rewriting chains with exact ground-truth labels");
    claimtrees->add_option("--depth", tree_args.depth, "Derivation steps per source")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    claimtrees->add_option("--sources", tree_args.sources, "Independent root tokens")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    claimtrees->add_option("--remove-at", tree_args.remove_at,
                           "Withhold the rule feeding this step position (0 = none)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    claimtrees->add_option("--remove-source", tree_args.remove_source,
                           "Source whose path carries the removal")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    claimtrees->add_option("--insert", tree_args.insert,
                           "Benign derivations to insert (rules that exist nowhere)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    claimtrees->add_option("--count", tree_args.count, "Chains to generate")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    claimtrees->add_option("--seed", tree_args.seed, "Base seed; chain i uses seed+i")
        ->capture_default_str();
    claimtrees->add_option("--alphabet", tree_args.alphabet, "Symbol alphabet")
        ->capture_default_str();
    claimtrees->add_option("-o,--out", tree_args.out, "Chain JSONL output ('-' = stdout)")
        ->capture_default_str();
    claimtrees->add_option("--rules", tree_args.rules_out,
                           "Rule-system sidecar path (default: <out>.rules.json)");

    RecipeArgs recipe_args;
    CLI::App* recipes = generate->add_subcommand(
        "recipes", "Task-graph chains from a recipe JSON with optional ingredient drop");
    recipes->add_option("--graph", recipe_args.graph, "Recipe graph JSON")->required();
    recipes->add_option("--drop", recipe_args.drop,
                        "Ingredient to withhold (steps needing it become unsound)");
    recipes->add_option("--count", recipe_args.count, "Chains to generate")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    recipes->add_option("--seed", recipe_args.seed, "Base seed; chain i uses seed+i")
        ->capture_default_str();
    recipes->add_option("-o,--out", recipe_args.out, "Chain JSONL output ('-' = stdout)")
        ->capture_default_str();
    recipes->add_option("--rules", recipe_args.rules_out,
                        "Rule-system sidecar path (default: <out>.rules.json)");

    // detect -------------------------------------------------------------------
    DetectArgs detect_args;
    CLI::App* detect = app.add_subcommand("detect", "Score each derived step of every chain");
    detect->add_option("--chains", detect_args.chains, "Chain JSONL input")->required();
    detect->add_option("--rules", detect_args.rules,
                       "Rule-system sidecar (default: <chains>.rules.json when present)");
    detect->add_option("--method", detect_args.method,
                       "Detector: certified stability (ares) or a baseline")
        ->capture_default_str()
        ->check(CLI::IsMember({"ares", "entail-prev", "entail-base", "llm-judge"}));
    detect->add_option("--entailment", detect_args.entailment, "Entailment backend")
        ->capture_default_str()
        ->check(CLI::IsMember({"oracle", "http"}));
    detect->add_option("--score-mode", detect_args.score_mode,
                       "HTTP entailment reply protocol")
        ->capture_default_str()
        ->check(CLI::IsMember({"binary", "likert7"}));
    detect->add_option("--epsilon", detect_args.epsilon, "Stability estimate tolerance")
        ->capture_default_str();
    detect->add_option("--delta", detect_args.delta, "Certificate failure probability")
        ->capture_default_str();
    CLI::Option* prior_opt =
        detect->add_option("--prior", detect_args.prior, "Uniform base-claim soundness prior")
            ->capture_default_str()
            ->check(CLI::Range(0.0, 1.0));
    detect->add_flag("--use-file-priors", detect_args.use_file_priors,
                     "Use each chain's own priors instead of --prior")
        ->excludes(prior_opt);
    detect->add_option("--seed", detect_args.seed, "Base seed; chain i samples with seed+i")
        ->capture_default_str();
    detect->add_option("--workers", detect_args.workers, "Sampling thread count")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    detect->add_option("--config", detect_args.config, "TOML config with a [judge] section");
    detect->add_option("--base-url", detect_args.base_url,
                       "Judge endpoint base URL (overrides config)");
    detect->add_option("--model", detect_args.model, "Judge model name (overrides config)");
    detect->add_option("--prompt", detect_args.prompt,
                       "Prompt template (entailment query or whole-chain judgment)");
    detect->add_option("--cache", detect_args.cache,
                       "Entailment score log: warm-started when present, appended to");
    detect->add_option("--audit", detect_args.audit, "JSONL audit trail of judge exchanges");
    detect->add_flag("--malformed-all-sound", detect_args.malformed_all_sound,
                     "Score a chain all-sound when the judge reply is malformed");
    detect->add_option("-o,--out", detect_args.out, "Score JSONL output ('-' = stdout)")
        ->capture_default_str();

    // evaluate -----------------------------------------------------------------
    EvaluateArgs eval_args;
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Cross-validated detection metrics from scored chains");
    evaluate->add_option("--chains", eval_args.chains, "Chain JSONL with ground-truth labels")
        ->required();
    evaluate->add_option("--scores", eval_args.scores, "Score JSONL from detect")->required();
    evaluate->add_option("--folds", eval_args.folds, "Cross-validation folds")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000));
    evaluate->add_option("--seed", eval_args.seed, "Fold-assignment shuffle seed")
        ->capture_default_str();
    evaluate->add_option("--method", eval_args.method,
                         "Method name for the report (default: from the score file)");
    evaluate->add_option("--dataset", eval_args.dataset,
                         "Dataset name for the report (default: chains filename)");
    evaluate->add_option("-o,--out", eval_args.out, "Report JSON output ('-' = stdout)")
        ->capture_default_str();
    evaluate->add_option("--lengths-csv", eval_args.lengths_csv,
                         "Also write per-chain-length F1 CSV here");

    // bestofn ------------------------------------------------------------------
    BestOfNArgs bestofn_args;
    CLI::App* bestofn =
        app.add_subcommand("bestofn", "Pick the best chain per candidate group by score");
    bestofn->add_option("--chains", bestofn_args.chains, "Chain JSONL with ground-truth labels")
        ->required();
    bestofn->add_option("--scores", bestofn_args.scores, "Score JSONL from detect")->required();
    bestofn->add_option("--groups", bestofn_args.groups,
                        "Group JSONL: {\"group\": name, \"ids\": [chain ids]}")
        ->required();
    bestofn->add_option("--aggregate", bestofn_args.aggregate, "Chain score aggregation")
        ->capture_default_str()
        ->check(CLI::IsMember({"final-step", "step-average"}));
    bestofn->add_option("-o,--out", bestofn_args.out, "Per-group pick JSONL output");

    // report -------------------------------------------------------------------
    std::vector<std::string> report_files;
    CLI::App* report =
        app.add_subcommand("report", "Tabulate evaluation reports side by side, best F1 first");
    report->add_option("files", report_files, "Evaluation report JSON files")
        ->required()
        ->expected(-1);

    try {
        app.parse(argc, argv);
        if (*claimtrees) {
            run_generate_claimtrees(tree_args);
        } else if (*recipes) {
            run_generate_recipes(recipe_args);
        } else if (*detect) {
            run_detect(detect_args);
        } else if (*evaluate) {
            run_evaluate(eval_args);
        } else if (*bestofn) {
            run_bestofn(bestofn_args);
        } else if (*report) {
            run_report(report_files);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
