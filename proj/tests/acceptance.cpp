// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria are pinned here, in code, with their tolerances and
// runtime budgets.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "decoupling.hpp"
#include "encoder.hpp"
#include "graph.hpp"
#include "oracles.hpp"
#include "question.hpp"
#include "schema.hpp"

namespace fs = std::filesystem;
using namespace syntagraph;

namespace {

struct AcceptanceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& what) {
  if (!condition) throw AcceptanceFailure(what);
}

// ---- criterion bodies -------------------------------------------------------

void graph_totality_and_block_purity() {
  DetRng rng(2024);
  for (int iter = 0; iter < 100; ++iter) {
    const auto instance = oracle::random_instance(rng);
    const auto graph = build_graph(instance.tokens, instance.parse, instance.schema);
    const int n = graph.node_count();
    require(n <= 40, "instance exceeds 40 nodes");
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const RelationLabel label = graph.relations.at(i, j);
        require(label_allowed_in_block(label, graph.nodes[i].kind, graph.nodes[j].kind, i == j),
                "label " + std::string(relation_name(label)) + " outside its block at (" +
                    std::to_string(i) + "," + std::to_string(j) + ") in instance " +
                    std::to_string(iter));
        require(graph.relations.at(j, i) == inverse_label(label),
                "inverse closure broken at (" + std::to_string(i) + "," + std::to_string(j) +
                    ") in instance " + std::to_string(iter));
      }
    }
  }
}

void syntax_induction() {
  DetRng rng(2025);
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 2 + rng.uniform_int(14);
    DependencyParse parse = oracle::random_tree(rng, n);
    const auto matrix = question_relation_matrix(parse);

    int forward = 0, backward = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const SyntaxRelation rel = matrix.at(i, j);
        if (rel == SyntaxRelation::Forward) {
          ++forward;
          require(matrix.at(j, i) == SyntaxRelation::Backward, "duality broken");
        }
        if (rel == SyntaxRelation::Backward) ++backward;
      }
    }
    require(forward == n - 1, "expected " + std::to_string(n - 1) + " Forward entries, got " +
                                  std::to_string(forward));
    require(backward == n - 1, "expected " + std::to_string(n - 1) + " Backward entries, got " +
                                   std::to_string(backward));

    // Raw labels must be irrelevant: permute them and compare.
    for (auto& edge : parse.edges) edge.label = "shuffled-" + std::to_string(rng.uniform_int(55));
    require(question_relation_matrix(parse) == matrix,
            "raw-label permutation changed the relation matrix");
  }
}

void golden_fixture() {
  const ParsedQuestion q = load_conllu(oracle::read_fixture("transcripts.conllu"));
  const Schema schema = load_schema(oracle::read_fixture("transcripts.tables.json"));
  const auto graph = build_graph(q.tokens, q.parse, schema);

  const int show = 0, date = 2, list = 15, id = 17;
  const int col_id0 = 21, col_date = 22, col_id1 = 23;
  require(graph.relations.at(show, list) == RelationLabel::ForwardSyntax,
          "(show -> list) is not Forward-Syntax");
  require(graph.relations.at(show, date) == RelationLabel::ForwardSyntax,
          "(show -> date) is not Forward-Syntax");
  require(graph.relations.at(list, id) == RelationLabel::ForwardSyntax,
          "(list -> id) is not Forward-Syntax");
  require(graph.relations.at(date, col_date) == RelationLabel::QCExactLinking,
          "'date' does not exact-link to column date");
  require(graph.relations.at(id, col_id0) == RelationLabel::QCExactLinking,
          "'id' does not exact-link to transcript.id");
  require(graph.relations.at(id, col_id1) == RelationLabel::QCExactLinking,
          "'id' does not exact-link to result.id");
}

void layer_matches_scalar_oracle() {
  EncoderConfig config;
  config.num_layers = 1;
  config.num_heads = 2;
  config.model_dim = 16;
  config.ffn_dim = 32;
  config.seed = 11;
  const auto [params, tables] = init_params(config);
  for (int n = 1; n <= 8; ++n) {
    const auto instance = make_synthetic_instance(n, config.model_dim, 300 + n);
    const Matrix out = rgat_layer(instance.x, instance.labels, params, tables, 0);
    const auto expected =
        oracle::naive_layer(oracle::to_rows(instance.x), instance.labels, params.layers[0], tables);
    const double diff = oracle::max_abs_diff(expected, out);
    require(diff <= 1e-12,
            "n=" + std::to_string(n) + ": max |layer - oracle| = " + std::to_string(diff));
  }
}

void gradient_check() {
  EncoderConfig config;
  config.num_layers = 2;
  config.num_heads = 2;
  config.model_dim = 16;
  config.ffn_dim = 32;
  config.seed = 0;
  const GradCheckResult result = grad_check(config, 12, 0.01, 20, 1e-5, false);
  require(result.max_rel_err < 1e-4, "max relative error " + std::to_string(result.max_rel_err) +
                                         " (worst tensor " + result.worst_tensor + ")");
}

void dc_loss_exactness() {
  Matrix eye(4, 4);
  for (int i = 0; i < 4; ++i) eye(i, i) = 1.0;
  require(dc_loss(eye) == 0.0, "dc_loss(identity) != 0");

  Matrix ones(2, 2);
  for (double& v : ones.data) v = 1.0;
  require(dc_loss(ones) == 8.0, "dc_loss(2x2 ones) != 8");

  DetRng rng(33);
  Matrix r(6, 4);
  for (double& v : r.data) v = rng.uniform(-1.0, 1.0);
  const double base = dc_loss(r);

  const double c = 1.3;
  Matrix scaled = r;
  for (double& v : scaled.data) v *= c;
  const double homogeneity =
      std::fabs(dc_loss(scaled) - std::pow(c, 4) * base) / (std::pow(c, 4) * base);
  require(homogeneity < 1e-9, "homogeneity violated: rel err " + std::to_string(homogeneity));

  // Random rotation via Gram-Schmidt.
  Matrix q(6, 6);
  for (double& v : q.data) v = rng.uniform(-1.0, 1.0);
  for (int col = 0; col < 6; ++col) {
    for (int prev = 0; prev < col; ++prev) {
      double dot = 0.0;
      for (int row = 0; row < 6; ++row) dot += q(row, col) * q(row, prev);
      for (int row = 0; row < 6; ++row) q(row, col) -= dot * q(row, prev);
    }
    double norm = 0.0;
    for (int row = 0; row < 6; ++row) norm += q(row, col) * q(row, col);
    norm = std::sqrt(norm);
    for (int row = 0; row < 6; ++row) q(row, col) /= norm;
  }
  const double rotated = dc_loss(matmul(q, r));
  const double invariance = std::fabs(rotated - base) / base;
  require(invariance < 1e-9, "rotation invariance violated: rel err " + std::to_string(invariance));
}

void decoupling_mechanism() {
  const DecouplingRun run = decoupling_experiment(32, 64, 2000, 0.1, 1.0, 0);
  require(run.with_dc.max_offdiag_abs < 0.1,
          "with-DC max off-diagonal |cosine| = " + std::to_string(run.with_dc.max_offdiag_abs));

  // The untouched arm must report the initialization exactly.
  DetRng rng(0);
  Matrix init(64, 32);
  for (double& v : init.data) v = rng.uniform(-0.1, 0.1);
  require(similarity_matrix(init) == run.without_dc,
          "without-DC report does not equal the initialization report");

  require(run.loss_trajectory.size() == 2001, "trajectory length is not steps + 1");
  for (size_t s = 1; s < run.loss_trajectory.size(); ++s)
    require(run.loss_trajectory[s] <= run.loss_trajectory[s - 1] + 1e-12,
            "dc_loss increased at step " + std::to_string(s));
  require(run.with_dc.mean_offdiag_abs < run.without_dc.mean_offdiag_abs,
          "with-DC mean |cosine| is not below the without-DC report");
}

void command_determinism() {
  const std::string cli = CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "syntagraph-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto scratch = dir.string();

  const auto path = [&](const std::string& name) { return scratch + "/" + name; };
  const std::string fixtures = FIXTURES_DIR;

  struct Command {
    std::string name;
    std::string args;    // {} expands to the output path
    bool file_output;
  };
  const std::vector<Command> commands = {
      {"build-graph",
       "build-graph --schema " + fixtures + "/transcripts.tables.json --parse " + fixtures +
           "/transcripts.conllu --question " + fixtures + "/transcripts.question.txt --seed 1 "
           "--out {}",
       true},
      {"init-params",
       "init-params --layers 1 --heads 2 --model-dim 16 --ffn-dim 32 --seed 3 --out {}", true},
      {"encode", "encode --graph " + path("graph-1.out") + " --params " + path("init-params-1.out") +
                     " --seed 0 --out {}",
       true},
      {"grad-check", "grad-check --seed 0", false},
      {"dc-train", "dc-train --k 8 --d 16 --steps 200 --lr 0.1 --lambda 1 --seed 0 --out {}", true},
      {"sim-matrix", "sim-matrix --params " + path("init-params-1.out") + " --out {}", true},
  };

  // encode consumes the first build-graph/init-params outputs; stage them.
  for (const std::string stage : {"graph", "init-params"}) {
    const std::string out = path(stage + "-1.out");
    const std::string args =
        stage == "graph"
            ? "build-graph --schema " + fixtures + "/transcripts.tables.json --parse " + fixtures +
                  "/transcripts.conllu --question " + fixtures +
                  "/transcripts.question.txt --seed 1 --out " + out
            : "init-params --layers 1 --heads 2 --model-dim 16 --ffn-dim 32 --seed 3 --out " + out;
    const auto staged = oracle::run_command(cli + " " + args, scratch);
    require(staged.exit_code == 0, stage + " staging run failed");
  }

  for (const Command& command : commands) {
    // Identical invocation both rounds; capture the artifact between runs.
    std::string out_bytes[2], stdout_bytes[2];
    const std::string out = path(command.name + ".out");
    std::string args = command.args;
    if (const auto pos = args.find("{}"); pos != std::string::npos) args.replace(pos, 2, out);
    for (int round = 0; round < 2; ++round) {
      const auto result = oracle::run_command(cli + " " + args, scratch);
      require(result.exit_code == 0,
              command.name + " exited " + std::to_string(result.exit_code));
      stdout_bytes[round] = result.out;
      if (command.file_output) out_bytes[round] = oracle::read_file(out);
    }
    require(stdout_bytes[0] == stdout_bytes[1], command.name + " stdout differs across runs");
    require(out_bytes[0] == out_bytes[1], command.name + " output bytes differ across runs");
  }
  fs::remove_all(dir);
}

// ---- harness ----------------------------------------------------------------

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"graph totality & block purity (100 instances)", 10.0, graph_totality_and_block_purity},
      {"syntax induction (100 random trees)", 5.0, syntax_induction},
      {"golden case-study fixture", 10.0, golden_fixture},
      {"encoder layer vs scalar-loop oracle (1e-12)", 10.0, layer_matches_scalar_oracle},
      {"gradient check vs central differences (1e-4)", 60.0, gradient_check},
      {"decoupling loss exactness", 10.0, dc_loss_exactness},
      {"decoupling experiment mechanism", 30.0, decoupling_mechanism},
      {"command determinism (bit-identical reruns)", 60.0, command_determinism},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool passed = true;
    try {
      criterion.body();
    } catch (const std::exception& e) {
      passed = false;
      detail = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (passed && elapsed > criterion.budget_seconds) {
      passed = false;
      detail = "runtime " + std::to_string(elapsed) + "s exceeds budget " +
               std::to_string(criterion.budget_seconds) + "s";
    }
    std::printf("[%s] %s (%.2fs)%s%s\n", passed ? "PASS" : "FAIL", criterion.name.c_str(),
                elapsed, detail.empty() ? "" : ": ", detail.c_str());
    if (!passed) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu acceptance criteria FAILED\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu acceptance criteria passed\n", criteria.size());
  return 0;
}
