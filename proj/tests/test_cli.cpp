#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "irrhodge/cliruntime.hpp"

using namespace irrhodge;

namespace {

Json z_plus_inv_params() {
  Json p;
  p["f"]["num"] = Json::array({1, 0, 1});  // z + 1/z = (1 + z^2)/z
  p["f"]["den"] = Json::array({0, 1});
  return p;
}

}  // namespace

TEST_CASE("p1-uv on f = z + 1/z: dimension table (0,2,0) across twists") {
  TaskResult r = task_p1_uv(z_plus_inv_params(), RunOptions{});
  CHECK(r.ok);
  const Json& tb = r.report.at("tables").at(0);
  REQUIRE(tb.at("rows").size() == 5);  // the four base twists plus (2,3)
  for (auto& row : tb.at("rows")) CHECK(row.at("dims") == Json::array({0, 2, 0}));
  CHECK(tb.at("oracle").at("h0") == 0);
  CHECK(tb.at("oracle").at("h1") == 2);
  CHECK(tb.at("sheaf_sum") == Json::array({0, 2, 0}));
}

TEST_CASE("empty plan: empty report, overall pass") {
  PlanResult r = run_plan(Json::object(), RunOptions{});
  CHECK(r.ok);
  CHECK(r.report.at("counts").at("tasks") == 0);
  CHECK(r.report.at("tasks").empty());
  CHECK(r.report.at("ok") == true);
}

TEST_CASE("plan reports are byte-identical across runs and job counts") {
  Json plan;
  plan["tasks"] = Json::array();
  {
    Json t;
    t["kind"] = "filtcx-fuzz";
    t["params"]["seed"] = 11;
    t["params"]["count"] = 8;
    t["params"]["max_dim"] = 8;
    plan["tasks"].push_back(t);
  }
  {
    Json t;
    t["kind"] = "p1-degeneration";
    t["params"] = z_plus_inv_params();
    t["params"]["k_list"] = Json::array({1});
    plan["tasks"].push_back(t);
  }
  {
    Json t;
    t["kind"] = "charp-degeneration";
    t["params"]["p"] = 5;
    t["params"]["horizontal_at_zero"] = true;
    plan["tasks"].push_back(t);
  }
  RunOptions serial;
  RunOptions parallel;
  parallel.jobs = 3;
  std::string a = render_report(run_plan(plan, serial).report, "json");
  std::string b = render_report(run_plan(plan, serial).report, "json");
  std::string c = render_report(run_plan(plan, parallel).report, "json");
  CHECK(a == b);
  CHECK(a == c);
  CHECK(run_plan(plan, serial).ok);
}

TEST_CASE("corrupted checker fixture surfaces a serialized counterexample") {
  Json p;
  p["seed"] = 3;
  p["count"] = 4;
  p["max_dim"] = 6;
  p["corrupt_checker"] = true;
  TaskResult r = task_filtcx_fuzz(p, RunOptions{});
  CHECK(!r.ok);
  CHECK(r.report.at("counterexamples").get<int>() >= 1);
  REQUIRE(!r.report.at("witnesses").empty());
  const Json& w = r.report.at("witnesses").at(0);
  CHECK(w.at("verdicts").at("agree") == false);
  // The witness complex round-trips to a valid filtered complex on which the
  // honest checker agrees with itself.
  FilteredComplex<Rat> fc = filtered_from_json(w.at("complex"));
  CHECK(triple_equivalence(fc).agree());
}

TEST_CASE("honest fuzz task passes and is seed-reproducible") {
  Json p;
  p["seed"] = 5;
  p["count"] = 20;
  p["max_dim"] = 9;
  TaskResult a = task_filtcx_fuzz(p, RunOptions{});
  TaskResult b = task_filtcx_fuzz(p, RunOptions{});
  CHECK(a.ok);
  CHECK(a.report.at("agreed") == 20);
  CHECK(a.report.dump() == b.report.dump());
}

TEST_CASE("schema violations raise plan errors, not verdicts") {
  CHECK_THROWS_AS(run_task("no-such-kind", Json::object(), RunOptions{}), PlanError);
  CHECK_THROWS_AS(task_p1_uv(Json::object(), RunOptions{}), PlanError);  // missing f
  Json bad = z_plus_inv_params();
  bad["uv_samples"] = Json::array({Json::array({1})});
  CHECK_THROWS_AS(task_p1_uv(bad, RunOptions{}), PlanError);
  Json notprime;
  notprime["p"] = 4;
  notprime["chart"]["n"] = 1;
  notprime["chart"]["fexp"] = Json::array({-1});
  notprime["chart"]["m"] = 1;
  CHECK_THROWS_AS(task_charp_cartier(notprime, RunOptions{}), PlanError);
  Json plan;
  plan["tasks"] = Json::array({Json::object()});  // task without a kind
  CHECK_THROWS_AS(run_plan(plan, RunOptions{}), PlanError);
  Json badatlas;
  badatlas["p"] = 5;
  badatlas["atlas"] = "A7";
  CHECK_THROWS_AS(task_charp_splitting(badatlas, RunOptions{}), PlanError);
}

TEST_CASE("tiny truncation windows still certify stable, correct dimensions") {
  // The balanced window construction is insensitive to the breadth parameter:
  // even at truncation 0 the dual-window certificate holds and the verdicts
  // match the default-window run.  (A window disagreement would surface as a
  // FAIL check named "window stabilization" rather than a crash.)
  Json p = z_plus_inv_params();
  p["truncation"] = 0;
  TaskResult tiny = task_p1_uv(p, RunOptions{});
  CHECK(tiny.ok);
  TaskResult dflt = task_p1_uv(z_plus_inv_params(), RunOptions{});
  CHECK(tiny.report.at("tables") == dflt.report.at("tables"));
}

TEST_CASE("csv and text renderings project the canonical report") {
  Json plan;
  Json t;
  t["kind"] = "charp-cartier";
  t["params"] = default_task_params("charp-cartier");
  plan["tasks"] = Json::array({t});
  PlanResult r = run_plan(plan, RunOptions{});
  CHECK(r.ok);
  std::string csv = render_report(r.report, "csv");
  CHECK(csv.rfind("task,kind,check,pass\n", 0) == 0);
  CHECK(csv.find(",charp-cartier,") != std::string::npos);
  CHECK(csv.find(",true") != std::string::npos);
  CHECK(csv.find(",false") == std::string::npos);
  std::string text = render_report(r.report, "text");
  CHECK(text.find("PASS  task 0") != std::string::npos);
  CHECK(text.find("RESULT: PASS") != std::string::npos);
  CHECK_THROWS_AS(render_report(r.report, "yaml"), PlanError);
}

TEST_CASE("perturbed projective-line splitting task passes end to end") {
  Json p;
  p["p"] = 5;
  p["atlas"] = "P1";
  p["fexp"] = Json::array({1});
  Json pert;
  pert["chart"] = 0;
  pert["coord"] = 0;
  pert["u"] = Json::array({Json::array({1, Json::array({1})})});  // u = z
  p["perturbations"] = Json::array({pert});
  p["i_max"] = 1;
  TaskResult r = task_charp_splitting(p, RunOptions{});
  CHECK(r.ok);
  // the u-sum check ran on the pole chart and the splitting verdicts are all in
  bool saw_usum = false, saw_match = false;
  for (auto& c : r.report.at("checks")) {
    std::string name = c.at("name").get<std::string>();
    if (name.find("p-th power") != std::string::npos) saw_usum = true;
    if (name.find("match the inverse Cartier") != std::string::npos) saw_match = true;
  }
  CHECK(saw_usum);
  CHECK(saw_match);
}

TEST_CASE("invalid lift perturbation fails the u-sum check with a residual witness") {
  Json p;
  p["p"] = 3;
  p["atlas"] = "Anx2";
  p["chart"]["n"] = 2;
  p["chart"]["fexp"] = Json::array({-1, -1});
  p["chart"]["m"] = 2;
  Json pert;  // a lone perturbation with no cancelling partner breaks the identity
  pert["chart"] = 0;
  pert["coord"] = 0;
  pert["u"] = Json::array({Json::array({1, Json::array({1, 1})})});
  p["perturbations"] = Json::array({pert});
  p["i_max"] = 1;
  TaskResult r = task_charp_splitting(p, RunOptions{});
  CHECK(!r.ok);
  bool witnessed = false;
  for (auto& c : r.report.at("checks"))
    if (!c.at("pass").get<bool>() && c.contains("witness") && !c.at("witness").empty())
      witnessed = true;
  CHECK(witnessed);  // the nonzero residual is serialized
}

TEST_CASE("local-verify family enumeration covers reduced and non-reduced charts") {
  Json p;
  p["family"]["max_total"] = 2;
  p["family"]["max_e"] = 2;
  p["slice_bound"] = 2;
  TaskResult r = task_local_verify(p, RunOptions{});
  CHECK(r.ok);
  // total=1: e=(1),(2).  total=2: (ell=1, m or pz) x e=(1),(2) gives four,
  // and ell=2 gives e=(1,1),(1,2),(2,2).
  CHECK(r.report.at("tables").size() == 9);
}

TEST_CASE("default parameters run clean for every task kind") {
  for (const std::string& kind : task_kinds()) {
    TaskResult r = run_task(kind, default_task_params(kind), RunOptions{});
    CHECK(r.ok);
  }
}
